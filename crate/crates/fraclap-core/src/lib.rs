//! Numerical core for the integral fractional Laplacian `(-Δ)^s` on bounded
//! domains, with homogeneous exterior condition.
//!
//! The crate provides, without any I/O or OS dependency (`no_std` + `alloc`):
//!
//! * [`geometry`] — interval-union and ball domains, offset classification,
//!   truncated cones of admissible directions, finite coverings;
//! * [`gridfn`] — uniform grids, sampled grid functions with zero extension,
//!   aligned translations, first/second differences, smooth cutoffs, and
//!   L²-moduli of smoothness;
//! * [`fracop`] — the normalization constant of `(-Δ)^s`, pointwise principal
//!   value evaluation, the explicit right-hand-side-one solution on balls,
//!   Gagliardo seminorms of piecewise-linear samples, the Dirichlet energy
//!   functional and its translation modulus;
//! * [`solver1d`] — dense P1 stiffness assembly, load vectors and Cholesky
//!   solve of the 1D homogeneous Dirichlet problem;
//! * [`besov`] — second-difference Besov seminorms, K-functionals for the
//!   (L², H¹) pair, interpolation norms, a Marchaud-inequality check,
//!   localization over coverings;
//! * [`harness`] — smoothness-index estimation from modulus profiles,
//!   predicted indices for the known regularity shift, bootstrap index
//!   sequences and parameter sweeps.
//!
//! All floating-point math routes through [`libm`] so results are identical
//! on and off `std`. Everything is deterministic: no randomness, no threads,
//! reductions in fixed order.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Matrix/tensor assembly indexes several slices with one coupled loop
// variable; iterator rewrites would obscure the index symmetry.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod besov;
pub mod closedform;
pub mod error;
pub mod fracop;
pub mod geometry;
pub mod gridfn;
pub mod harness;
pub mod linalg;
pub mod mth;
pub mod p1pair;
pub mod quad;
pub mod solver1d;

pub use error::{Error, Result};

/// Crate version, for embedding in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
