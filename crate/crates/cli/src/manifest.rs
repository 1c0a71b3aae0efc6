//! Run manifest: configuration hash, toolkit version, timestamps and the
//! gate summary. Timestamps live only here so that data files stay
//! byte-identical across repeated runs.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::experiments::{Gate, Outcome};

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub toolkit: String,
    pub version: String,
    pub experiment: String,
    pub name: String,
    pub seed: u64,
    /// SHA-256 of the configuration bytes.
    pub config_hash: String,
    pub started_unix: f64,
    pub finished_unix: Option<f64>,
    pub status: String,
    pub exit_code: Option<i32>,
    pub gates: Vec<Gate>,
    pub files: Vec<String>,
    pub error: Option<String>,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

pub fn config_hash(raw: &[u8]) -> String {
    Sha256::digest(raw)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunManifest {
    pub fn start(config: &ExperimentConfig, raw: &[u8]) -> Self {
        RunManifest {
            toolkit: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: config.experiment().into(),
            name: config.name().into(),
            seed: config.seed(),
            config_hash: config_hash(raw),
            started_unix: now(),
            finished_unix: None,
            status: "running".into(),
            exit_code: None,
            gates: Vec::new(),
            files: Vec::new(),
            error: None,
        }
    }

    pub fn finish(
        &mut self,
        exit_code: i32,
        outcome: Option<&Outcome>,
        error: Option<String>,
        files: Vec<String>,
    ) {
        self.finished_unix = Some(now());
        self.exit_code = Some(exit_code);
        self.status = match (exit_code, &error) {
            (0, _) => "pass",
            (_, Some(_)) => "error",
            _ => "fail",
        }
        .into();
        self.gates = outcome.map(|o| o.gates.clone()).unwrap_or_default();
        self.files = files;
        self.error = error;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(
            config_hash(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
