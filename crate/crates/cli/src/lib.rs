//! Reproducible experiment driver: parses a JSON configuration, runs the
//! requested experiment and writes CSV data, a JSON summary and a manifest
//! under `{output}/{experiment}/{name}/`.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod oracle;

use std::path::{Path, PathBuf};

use fermion_doubling::Error;

pub use config::ExperimentConfig;
pub use experiments::{Gate, Outcome};
pub use manifest::RunManifest;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

pub const DEFAULT_OUTPUT: &str = "results";

#[derive(Debug)]
pub struct RunReport {
    pub exit_code: i32,
    /// Directory holding the run's files, absent when nothing was written.
    pub directory: Option<PathBuf>,
    pub manifest: Option<RunManifest>,
    pub message: String,
}

impl RunReport {
    fn config_error(message: String) -> Self {
        RunReport {
            exit_code: EXIT_CONFIG,
            directory: None,
            manifest: None,
            message,
        }
    }
}

/// Runs the experiment described by `text`. Parse and validation errors
/// return before anything is written.
pub fn run_config_text(text: &str, output: Option<&Path>) -> RunReport {
    let config = match ExperimentConfig::parse(text) {
        Ok(c) => c,
        Err(e) => return RunReport::config_error(format!("configuration error: {e}")),
    };
    if let Err(e) = config.validate() {
        return RunReport::config_error(format!("configuration error: {e}"));
    }
    run_validated(&config, text.as_bytes(), output)
}

/// Runs the oracle suite with the given seed.
pub fn run_oracle_suite(seed: u64, output: Option<&Path>) -> RunReport {
    let config = ExperimentConfig::OracleSuite(config::OracleConfig {
        name: format!("seed-{seed}"),
        seed,
        output: None,
    });
    let text = serde_json::to_string(&config).expect("configuration serializes");
    run_validated(&config, text.as_bytes(), output)
}

fn execute(config: &ExperimentConfig) -> fermion_doubling::Result<Outcome> {
    match config {
        ExperimentConfig::PathScan(c) => experiments::path_scan(c),
        ExperimentConfig::Invariants(c) => experiments::invariants(c),
        ExperimentConfig::Boundary(c) => experiments::boundary(c),
        ExperimentConfig::Transport(c) => experiments::transport(c),
        ExperimentConfig::Wannier(c) => experiments::wannier(c),
        ExperimentConfig::OracleSuite(c) => oracle::oracle_suite(c.seed),
    }
}

fn run_validated(config: &ExperimentConfig, raw: &[u8], output: Option<&Path>) -> RunReport {
    let root = output
        .map(Path::to_path_buf)
        .or_else(|| config.output().cloned())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let dir = root.join(config.experiment()).join(config.name());
    let mut manifest = RunManifest::start(config, raw);
    let result = execute(config);
    let (exit_code, message) = match &result {
        Ok(outcome) if outcome.passed() => (EXIT_PASS, "all gates passed".to_string()),
        Ok(outcome) => {
            let failed: Vec<&str> = outcome
                .gates
                .iter()
                .filter(|g| !g.passed)
                .map(|g| g.name.as_str())
                .collect();
            (
                EXIT_GATE_FAILURE,
                format!("failed gates: {}", failed.join(", ")),
            )
        }
        Err(e @ Error::Capacity(_)) => (EXIT_CAPACITY, e.to_string()),
        Err(e) => (EXIT_GATE_FAILURE, e.to_string()),
    };
    let written = std::fs::create_dir_all(&dir).and_then(|_| {
        let mut files = Vec::new();
        if let Ok(outcome) = &result {
            for a in &outcome.artifacts {
                std::fs::write(dir.join(&a.file), &a.body)?;
                files.push(a.file.clone());
            }
            let summary =
                serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
            std::fs::write(dir.join("summary.json"), summary + "\n")?;
            files.push("summary.json".into());
        }
        manifest.finish(
            exit_code,
            result.as_ref().ok(),
            result.as_ref().err().map(|e| e.to_string()),
            files,
        );
        std::fs::write(dir.join("manifest.json"), manifest.to_json() + "\n")
    });
    match written {
        Ok(()) => RunReport {
            exit_code,
            directory: Some(dir),
            manifest: Some(manifest),
            message,
        },
        Err(e) => RunReport {
            exit_code: EXIT_GATE_FAILURE,
            directory: Some(dir),
            manifest: Some(manifest),
            message: format!("{message}; writing outputs failed: {e}"),
        },
    }
}
