//! File formats, experiment manifests, verification suites, and the
//! command-line surface for the `fraclap-core` numerics library.
//!
//! Everything here is deliberately thin: parsing and serialization live in
//! [`parse`] and [`formats`], reproducibility metadata in [`manifest`], the
//! named check suites in [`suites`], and the subcommand dispatch in [`app`].
//! All numerical work happens in `fraclap-core`; outputs are byte-identical
//! across reruns of the same invocation (no timestamps, fixed seeds, ordered
//! reductions).

pub mod app;
pub mod formats;
pub mod manifest;
pub mod parse;
pub mod suites;
