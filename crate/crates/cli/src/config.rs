//! Experiment configuration: one JSON document per run, unknown keys rejected.

use std::path::PathBuf;

use fermion_doubling::gaussian::Defect;
use fermion_doubling::hamiltonian::QuadraticHamiltonian;
use fermion_doubling::models::{
    chern_insulator_model, ionic_chain, kitaev_chain, pplusip_model, random_model, trivial_model,
    ChernParams, IonicParams, KitaevParams, PPlusIpParams, RandomParams,
};
use fermion_doubling::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrivialParams {
    pub sites: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    Kitaev(KitaevParams),
    PPlusIp(PPlusIpParams),
    Chern(ChernParams),
    Ionic(IonicParams),
    Trivial(TrivialParams),
    Random(RandomParams),
}

impl ModelSpec {
    pub fn build(&self) -> Result<QuadraticHamiltonian> {
        match self {
            ModelSpec::Kitaev(p) => kitaev_chain(p),
            ModelSpec::PPlusIp(p) => pplusip_model(p),
            ModelSpec::Chern(p) => chern_insulator_model(p),
            ModelSpec::Ionic(p) => ionic_chain(p),
            ModelSpec::Trivial(p) => trivial_model(p.sites, p.gap),
            ModelSpec::Random(p) => random_model(p),
        }
    }

    /// Same one-dimensional model on `sites` sites.
    pub fn with_sites(&self, sites: usize) -> Result<ModelSpec> {
        let mut out = self.clone();
        match &mut out {
            ModelSpec::Kitaev(p) => p.sites = sites,
            ModelSpec::Ionic(p) => p.sites = sites,
            ModelSpec::Trivial(p) => p.sites = sites,
            ModelSpec::Random(p) => p.sites = sites,
            ModelSpec::PPlusIp(_) | ModelSpec::Chern(_) => {
                return Err(Error::Configuration(
                    "size scans need a one-dimensional model".into(),
                ))
            }
        }
        Ok(out)
    }
}

/// Path grid: `points` equally spaced values or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GridSpec {
    Uniform { points: usize },
    Values { values: Vec<f64> },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Uniform { points: 11 }
    }
}

impl GridSpec {
    pub fn path(&self) -> Result<fermion_doubling::doubling::InterpolationPath> {
        use fermion_doubling::doubling::InterpolationPath;
        match self {
            GridSpec::Uniform { points } => InterpolationPath::uniform(*points),
            GridSpec::Values { values } => InterpolationPath::new(values.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathScanConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: GridSpec,
    /// Decay rate for the locality norm; the locality check is skipped without it.
    #[serde(default)]
    pub locality_mu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantsConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: GridSpec,
    /// Brillouin-zone mesh of the momentum-space oracle for Chern models.
    #[serde(default = "default_mesh")]
    pub oracle_mesh: usize,
}

fn default_mesh() -> usize {
    24
}

/// Subset `Y`: explicit sites, or `central` consecutive sites in the middle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SubsetSpec {
    Sites { sites: Vec<usize> },
    Central { central: usize },
}

impl SubsetSpec {
    pub fn resolve(&self, num_sites: usize) -> Result<Vec<usize>> {
        let out = match self {
            SubsetSpec::Sites { sites } => sites.clone(),
            SubsetSpec::Central { central } => {
                if *central == 0 || *central > num_sites {
                    return Err(Error::Configuration(format!(
                        "{central} central sites of {num_sites}"
                    )));
                }
                let start = (num_sites - central) / 2;
                (start..start + central).collect()
            }
        };
        if out.iter().any(|&y| y >= num_sites) {
            return Err(Error::Configuration(format!(
                "subset {out:?} outside {num_sites} sites"
            )));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub subset: SubsetSpec,
    pub margins: Vec<usize>,
    /// Local change just outside each margin; absent means identical systems.
    #[serde(default)]
    pub defect: Option<Defect>,
    #[serde(default = "default_mu")]
    pub locality_mu: f64,
}

fn default_mu() -> f64 {
    std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSpec,
    pub steps: usize,
    /// Step counts for the step-halving order estimate.
    #[serde(default = "default_convergence")]
    pub convergence_steps: Vec<usize>,
    /// Filter widths in units of `1 / dE`.
    #[serde(default)]
    pub filter_widths: Vec<f64>,
    #[serde(default = "default_filter_steps")]
    pub filter_steps: usize,
    #[serde(default = "default_transport_tolerance")]
    pub tolerance: f64,
    /// Path parameters at which the generator locality profile is recorded.
    #[serde(default)]
    pub profile_s: Vec<f64>,
    #[serde(default = "default_mu")]
    pub locality_mu: f64,
}

fn default_convergence() -> Vec<usize> {
    vec![2, 4, 8]
}

fn default_filter_steps() -> usize {
    200
}

fn default_transport_tolerance() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorConfig {
    pub sizes: Vec<usize>,
    pub hopping: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WannierConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Open one-dimensional chain; `sizes` overrides its site count.
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub commutator: Option<CommutatorConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    PathScan(PathScanConfig),
    Invariants(InvariantsConfig),
    Boundary(BoundaryConfig),
    Transport(TransportConfig),
    Wannier(WannierConfig),
    OracleSuite(OracleConfig),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn experiment(&self) -> &'static str {
        match self {
            ExperimentConfig::PathScan(_) => "path-scan",
            ExperimentConfig::Invariants(_) => "invariants",
            ExperimentConfig::Boundary(_) => "boundary",
            ExperimentConfig::Transport(_) => "transport",
            ExperimentConfig::Wannier(_) => "wannier",
            ExperimentConfig::OracleSuite(_) => "oracle-suite",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ExperimentConfig::PathScan(c) => &c.name,
            ExperimentConfig::Invariants(c) => &c.name,
            ExperimentConfig::Boundary(c) => &c.name,
            ExperimentConfig::Transport(c) => &c.name,
            ExperimentConfig::Wannier(c) => &c.name,
            ExperimentConfig::OracleSuite(c) => &c.name,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::PathScan(c) => c.seed,
            ExperimentConfig::Invariants(c) => c.seed,
            ExperimentConfig::Boundary(c) => c.seed,
            ExperimentConfig::Transport(c) => c.seed,
            ExperimentConfig::Wannier(c) => c.seed,
            ExperimentConfig::OracleSuite(c) => c.seed,
        }
    }

    pub fn output(&self) -> Option<&PathBuf> {
        match self {
            ExperimentConfig::PathScan(c) => c.output.as_ref(),
            ExperimentConfig::Invariants(c) => c.output.as_ref(),
            ExperimentConfig::Boundary(c) => c.output.as_ref(),
            ExperimentConfig::Transport(c) => c.output.as_ref(),
            ExperimentConfig::Wannier(c) => c.output.as_ref(),
            ExperimentConfig::OracleSuite(c) => c.output.as_ref(),
        }
    }

    /// Parameter checks that need no heavy computation: names, grids,
    /// model construction and subset ranges.
    pub fn validate(&self) -> Result<()> {
        let name = self.name();
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
            || name.starts_with('.')
        {
            return Err(Error::Configuration(format!(
                "run name {name:?} must be a plain file name"
            )));
        }
        match self {
            ExperimentConfig::PathScan(c) => {
                c.grid.path()?;
                c.model.build()?;
                if let Some(mu) = c.locality_mu {
                    positive("locality_mu", mu)?;
                }
            }
            ExperimentConfig::Invariants(c) => {
                c.grid.path()?;
                c.model.build()?;
                if c.oracle_mesh < 4 {
                    return Err(Error::Configuration(
                        "oracle_mesh must be at least 4".into(),
                    ));
                }
            }
            ExperimentConfig::Boundary(c) => {
                let h = c.model.build()?;
                c.subset.resolve(h.num_sites())?;
                if c.margins.is_empty() {
                    return Err(Error::Configuration("margins must not be empty".into()));
                }
                positive("locality_mu", c.locality_mu)?;
            }
            ExperimentConfig::Transport(c) => {
                c.model.build()?;
                if c.steps < 2 || c.convergence_steps.iter().any(|&n| n < 2) {
                    return Err(Error::Configuration(
                        "transport needs at least two steps".into(),
                    ));
                }
                if c.filter_steps < 2 {
                    return Err(Error::Configuration(
                        "filter_steps must be at least 2".into(),
                    ));
                }
                for &w in &c.filter_widths {
                    positive("filter width", w)?;
                }
                if c.profile_s.iter().any(|s| !(0.0..=1.0).contains(s)) {
                    return Err(Error::Configuration(
                        "profile_s values must lie in [0, 1]".into(),
                    ));
                }
                positive("tolerance", c.tolerance)?;
                positive("locality_mu", c.locality_mu)?;
            }
            ExperimentConfig::Wannier(c) => {
                if c.model.is_none() && c.commutator.is_none() {
                    return Err(Error::Configuration(
                        "wannier run needs a model or a commutator scan".into(),
                    ));
                }
                if let Some(m) = &c.model {
                    if c.sizes.is_empty() {
                        m.build()?;
                    }
                    for &v in &c.sizes {
                        m.with_sites(v)?.build()?;
                    }
                }
                if let Some(cc) = &c.commutator {
                    if cc.sizes.len() < 2 || cc.sizes.iter().any(|&l| l < 2) {
                        return Err(Error::Configuration(
                            "commutator scan needs at least two sizes >= 2".into(),
                        ));
                    }
                }
            }
            ExperimentConfig::OracleSuite(_) => {}
        }
        Ok(())
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Configuration(format!(
            "{what} must be positive, got {v}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path_scan() {
        let text = r#"{"experiment": "path-scan", "name": "k", "model": {"kind": "kitaev", "sites": 8,
            "hopping": 1.0, "pairing": 1.0, "chemical_potential": 0.5, "periodic": true},
            "grid": {"points": 5}, "locality_mu": 0.7}"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.experiment(), "path-scan");
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        let extra = r#"{"experiment": "oracle-suite", "name": "o", "colour": 1}"#;
        assert!(ExperimentConfig::parse(extra).is_err());
        let missing = r#"{"experiment": "path-scan", "name": "k"}"#;
        assert!(ExperimentConfig::parse(missing).is_err());
        let bad_model = r#"{"experiment": "path-scan", "name": "k", "model": {"kind": "kitaev", "sites": 8,
            "hopping": 1.0, "pairing": 1.0, "chemical_potential": 0.5, "periodic": true, "spin": 1}}"#;
        assert!(ExperimentConfig::parse(bad_model).is_err());
        let bad_grid = r#"{"experiment": "path-scan", "name": "k", "model": {"kind": "trivial", "sites": 4, "gap": 1.0},
            "grid": {"points": 5, "spacing": 2}}"#;
        assert!(ExperimentConfig::parse(bad_grid).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let text = r#"{"experiment": "path-scan", "name": "../x", "model": {"kind": "trivial", "sites": 4, "gap": 1.0}}"#;
        assert!(ExperimentConfig::parse(text).unwrap().validate().is_err());
        let text = r#"{"experiment": "path-scan", "name": "x", "model": {"kind": "trivial", "sites": 4, "gap": -1.0}}"#;
        assert!(ExperimentConfig::parse(text).unwrap().validate().is_err());
    }

    #[test]
    fn central_subset() {
        assert_eq!(
            SubsetSpec::Central { central: 4 }.resolve(64).unwrap(),
            vec![30, 31, 32, 33]
        );
        assert!(SubsetSpec::Sites { sites: vec![70] }.resolve(64).is_err());
    }
}
