//! Run manifests: every command writes one beside its outputs, recording the
//! invocation, tool versions, the seed, and the produced files. Manifests
//! carry no timestamps, so identical invocations produce identical bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::formats::to_json_bytes;

/// Seed for every randomized check in the tool (recorded, never varied).
pub const DEFAULT_SEED: u64 = 0x66_72_61_63; // "frac"

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
}

impl Tool {
    pub fn current() -> Self {
        Tool {
            name: "fraclap",
            version: env!("CARGO_PKG_VERSION"),
            core_version: fraclap_core::VERSION,
        }
    }
}

/// The reproducibility record written beside outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: Tool,
    /// Subcommand name.
    pub command: String,
    /// Parsed input flags and paths, as a small JSON object.
    pub inputs: serde_json::Value,
    /// Seed used by any randomized check in this run.
    pub seed: u64,
    /// Files written by the run, relative or absolute as given.
    pub outputs: Vec<String>,
    /// Per-item error records for runs that continue past failures.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, inputs: serde_json::Value) -> Self {
        Manifest {
            tool: Tool::current(),
            command: String::from(command),
            inputs,
            seed: DEFAULT_SEED,
            outputs: Vec::new(),
            errors: Vec::new(),
        }
    }

    /// The manifest path for a primary output: `sol.json` →
    /// `sol.manifest.json`.
    pub fn path_beside(out: &Path) -> PathBuf {
        out.with_extension("manifest.json")
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write_beside(&self, out: &Path) -> std::io::Result<PathBuf> {
        let path = Manifest::path_beside(out);
        std::fs::write(&path, to_json_bytes(self))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_bytes_are_stable_and_timestamp_free() {
        let mut m = Manifest::new("solve", serde_json::json!({"s": 0.5, "n": 512}));
        m.record_output(Path::new("sol.json"));
        let a = to_json_bytes(&m);
        let b = to_json_bytes(&m);
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("\"command\": \"solve\""));
        assert!(!text.to_lowercase().contains("time"), "{text}");
    }

    #[test]
    fn manifest_path_sits_beside_the_output() {
        assert_eq!(
            Manifest::path_beside(Path::new("out/rates.csv")),
            PathBuf::from("out/rates.manifest.json")
        );
    }
}
