//! Runners for the experiment families. Each returns its data files and
//! pass/fail gates without touching the file system.

use fermion_doubling::doubling::{
    invariant_scan, product_ground_state_covariance, verify_locality_along_path, DoubledSystem,
    ScanInvariant, GAP_TOLERANCE,
};
use fermion_doubling::flow::{
    exact_flow_generator, generator_locality_profile, transport_projector, FlowVariant,
    GeneratorProfile, TransportResult,
};
use fermion_doubling::gaussian::{
    boundary_sensitivity, boundary_sweep, defect_outside, BoundScales,
};
use fermion_doubling::invariants::{majorana_number, real_space_chern, SectorPartition};
use fermion_doubling::io::{Cell, CsvTable};
use fermion_doubling::linalg::eigvalsh;
use fermion_doubling::oracles::tknn::lower_band_chern;
use fermion_doubling::spectral::{ground_covariance, occupied_projector};
use fermion_doubling::wannier::{commutator_scan, gxg_wannier_1d, Axis, PositionOperator};
use fermion_doubling::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    BoundaryConfig, InvariantsConfig, ModelSpec, PathScanConfig, TransportConfig, WannierConfig,
};

/// Numerical pass/fail check recorded in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Gate {
    /// Passes when `value < threshold`.
    pub fn below(name: &str, value: f64, threshold: f64) -> Gate {
        Gate {
            name: name.into(),
            passed: value < threshold,
            value,
            threshold,
            detail: format!("{value:.3e} < {threshold:.3e}"),
        }
    }

    /// Passes when `value > threshold`.
    pub fn above(name: &str, value: f64, threshold: f64) -> Gate {
        Gate {
            name: name.into(),
            passed: value > threshold,
            value,
            threshold,
            detail: format!("{value:.3e} > {threshold:.3e}"),
        }
    }

    pub fn flag(name: &str, passed: bool, detail: String) -> Gate {
        Gate {
            name: name.into(),
            passed,
            value: f64::from(u8::from(passed)),
            threshold: 1.0,
            detail,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Artifact {
    pub file: String,
    pub body: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub gates: Vec<Gate>,
    pub artifacts: Vec<Artifact>,
    pub summary: Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }
}

fn csv(file: &str, table: &CsvTable) -> Artifact {
    Artifact {
        file: file.into(),
        body: table.render(),
    }
}

fn max_diff(a: &ndarray::Array2<f64>, b: &ndarray::Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn path_scan(c: &PathScanConfig) -> Result<Outcome> {
    let sys = DoubledSystem::new(c.model.build()?)?;
    let path = c.grid.path()?;
    let de = sys.delta_e();
    let rows = path
        .grid()
        .par_iter()
        .map(|&s| {
            let values = eigvalsh(&sys.path_matrix(s)?.data().view())?;
            let predicted = sys.predicted_spectrum(s)?;
            let gap = values.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
            let spec = values
                .iter()
                .zip(&predicted)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            Ok((s, gap, (gap - de).abs(), spec))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&["s", "gap", "gap_deviation", "spectrum_error"]);
    for &(s, gap, dev, spec) in &rows {
        table.push(vec![s.into(), gap.into(), dev.into(), spec.into()])?;
    }
    let max_dev = rows.iter().fold(0.0f64, |a, r| a.max(r.2));
    let max_spec = rows.iter().fold(0.0f64, |a, r| a.max(r.3));
    let endpoint = max_diff(
        sys.ground_covariance_at(1.0)?.data(),
        product_ground_state_covariance(sys.sites())?.data(),
    );
    let mut gates = vec![
        Gate::below("gap_invariance", max_dev, GAP_TOLERANCE * de),
        Gate::below("spectral_map", max_spec, 1e-9),
        Gate::below("product_endpoint", endpoint, 1e-10),
    ];
    let mut artifacts = vec![csv("gap.csv", &table)];
    let mut summary = json!({
        "delta_e": de,
        "sites": sys.sites(),
        "points": rows.len(),
        "max_gap_deviation": max_dev,
        "max_spectrum_error": max_spec,
        "product_endpoint_error": endpoint,
    });
    if let Some(mu) = c.locality_mu {
        let report = verify_locality_along_path(&sys, &path, mu)?;
        let mut t = CsvTable::new(&["s", "expression", "s1"]);
        for r in &report.records {
            t.push(vec![r.s.into(), r.expression.into(), report.s1.into()])?;
        }
        artifacts.push(csv("locality.csv", &t));
        gates.push(Gate::flag(
            "locality_expression",
            report.passed,
            format!(
                "max {:.6e} against s1 = {:.6e}",
                report.max_expression, report.s1
            ),
        ));
        summary["locality"] = json!({
            "mu": mu,
            "s1": report.s1,
            "max_expression": report.max_expression,
            "gap_below_s1": report.gap_below_s1,
        });
    }
    Ok(Outcome {
        gates,
        artifacts,
        summary,
    })
}

pub fn invariants(c: &InvariantsConfig) -> Result<Outcome> {
    let base = c.model.build()?;
    let dim = base.lattice().dimension();
    let sys = DoubledSystem::new(base.clone())?;
    let path = c.grid.path()?;
    let mut gates = Vec::new();
    let mut summary = json!({ "dimension": dim, "sites": sys.sites(), "delta_e": sys.delta_e() });
    let which = if dim == 1 {
        ScanInvariant::Majorana
    } else {
        ScanInvariant::Chern
    };
    if dim == 1 {
        let m = majorana_number(&ground_covariance(&base.assemble_bdg()?)?)?;
        summary["base_majorana_number"] = json!(m);
    } else if base.is_number_conserving() {
        let nu = real_space_chern(
            &occupied_projector(&base)?,
            &SectorPartition::centered(base.lattice())?,
        )?;
        summary["base_nu"] = json!(nu.nu);
        if let ModelSpec::Chern(p) = &c.model {
            let oracle = lower_band_chern(p.hopping, p.mass, c.oracle_mesh);
            summary["oracle_chern"] = json!(oracle);
            gates.push(Gate::below(
                "base_nu_vs_oracle",
                (nu.nu - oracle as f64).abs(),
                0.1,
            ));
        }
    }
    let records = invariant_scan(&sys, &path, which)?;
    let mut table = CsvTable::new(&["s", "majorana_number", "nu_total", "nu_imag_residual"]);
    let opt = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::Float);
    for r in &records {
        table.push(vec![
            r.s.into(),
            r.majorana_number
                .map_or(Cell::Text(String::new()), Cell::from),
            opt(r.nu_total),
            opt(r.nu_imag_residual),
        ])?;
    }
    match which {
        ScanInvariant::Majorana => {
            let all_plus = records.iter().all(|r| r.majorana_number == Some(1));
            gates.push(Gate::flag(
                "doubled_majorana_trivial",
                all_plus,
                "doubled Majorana number +1 at every s".into(),
            ));
        }
        ScanInvariant::Chern => {
            let worst = records
                .iter()
                .filter_map(|r| r.nu_total)
                .fold(0.0f64, |a, v| a.max(v.abs()));
            gates.push(Gate::below("doubled_nu_cancels", worst, 0.05));
            summary["max_abs_nu_total"] = json!(worst);
        }
    }
    Ok(Outcome {
        gates,
        artifacts: vec![csv("invariants.csv", &table)],
        summary,
    })
}

/// Decay length of the exact generator at the start of the path, falling
/// back to the bound scale when the profile cannot be fitted.
fn measured_xi(sys: &DoubledSystem, mu: f64) -> Result<(f64, GeneratorProfile)> {
    let profile = generator_locality_profile(&exact_flow_generator(sys, 0.0)?, sys, mu)?;
    let xi = profile
        .fit
        .map(|f| f.length)
        .filter(|l| l.is_finite() && *l > 0.0)
        .unwrap_or(profile.xi_bound);
    Ok((xi, profile))
}

pub fn boundary(c: &BoundaryConfig) -> Result<Outcome> {
    let h = c.model.build()?;
    let subset = c.subset.resolve(h.num_sites())?;
    let sys = DoubledSystem::new(h.clone())?;
    let locality = h.locality_profile(c.locality_mu)?;
    let (xi_prime, _) = measured_xi(&sys, c.locality_mu)?;
    let scales = BoundScales {
        s1: locality.s1,
        velocity: locality.velocity,
        delta_e: sys.delta_e(),
        xi_prime,
        dimension: h.lattice().dimension(),
    };
    let report = match c.defect {
        Some(defect) => boundary_sweep(
            &h,
            |l| defect_outside(&h, &subset, l, defect),
            &subset,
            &c.margins,
            scales,
        )?,
        None => boundary_sensitivity(&h, &h, &subset, &c.margins, scales)?,
    };
    let (slope, r2) = report.fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r2));
    let mut table = CsvTable::new(&[
        "l",
        "trace_distance",
        "bound_envelope",
        "fit_slope",
        "fit_r2",
    ]);
    for r in &report.records {
        table.push(vec![
            r.l.into(),
            r.trace_distance.into(),
            r.bound_envelope.into(),
            slope.into(),
            r2.into(),
        ])?;
    }
    let max_distance = report
        .records
        .iter()
        .fold(0.0f64, |a, r| a.max(r.trace_distance));
    let gates = if c.defect.is_some() {
        vec![Gate::flag(
            "distance_decays",
            report.decays(),
            format!(
                "slope {slope:.4e}, r2 {r2:.4}, all below floor: {}",
                report.all_below_floor
            ),
        )]
    } else {
        vec![Gate::below("identical_systems", max_distance, 1e-10)]
    };
    let summary = json!({
        "subset": subset,
        "xi_prime": xi_prime,
        "scales": scales,
        "fitted_constant": report.fitted_constant,
        "fit_slope": slope,
        "fit_r2": r2,
        "monotone": report.monotone,
        "max_distance": max_distance,
    });
    Ok(Outcome {
        gates,
        artifacts: vec![csv("boundary.csv", &table)],
        summary,
    })
}

/// `log(e1 / e2) / log(n2 / n1)` for successive runs whose errors both sit
/// above round-off.
fn observed_orders(runs: &[(usize, f64)]) -> Vec<f64> {
    runs.windows(2)
        .filter(|w| w[0].1 > 1e-12 && w[1].1 > 1e-12)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[1].0 as f64 / w[0].0 as f64).ln())
        .collect()
}

fn transport_row(t: &mut CsvTable, label: &str, width: f64, r: &TransportResult) -> Result<()> {
    t.push(vec![
        label.into(),
        width.into(),
        r.steps.into(),
        r.final_error.into(),
        r.unitarity_residual.into(),
        r.idempotency_residual.into(),
        r.trace_drift.into(),
        r.overlap_deficit.into(),
    ])
}

pub fn transport(c: &TransportConfig) -> Result<Outcome> {
    let sys = DoubledSystem::new(c.model.build()?)?;
    let de = sys.delta_e();
    let mut jobs: Vec<(usize, FlowVariant)> = vec![(c.steps, FlowVariant::Exact)];
    jobs.extend(c.convergence_steps.iter().map(|&n| (n, FlowVariant::Exact)));
    jobs.extend(
        c.filter_widths
            .iter()
            .map(|&w| (c.filter_steps, FlowVariant::Filtered { width: w / de })),
    );
    let results = jobs
        .par_iter()
        .map(|&(n, v)| transport_projector(&sys, n, v))
        .collect::<Result<Vec<_>>>()?;
    let main = &results[0];
    let conv = &results[1..1 + c.convergence_steps.len()];
    let filtered = &results[1 + c.convergence_steps.len()..];

    let header = [
        "run",
        "width",
        "steps",
        "final_error",
        "unitarity_residual",
        "idempotency_residual",
        "trace_drift",
        "overlap_deficit",
    ];
    let mut table = CsvTable::new(&header);
    transport_row(&mut table, "exact", f64::NAN, main)?;
    for r in conv {
        transport_row(&mut table, "convergence", f64::NAN, r)?;
    }
    for (r, &w) in filtered.iter().zip(&c.filter_widths) {
        transport_row(&mut table, "filtered", w, r)?;
    }
    let mut errors = CsvTable::new(&["s", "error"]);
    for (s, e) in main.s_grid.iter().zip(&main.errors) {
        errors.push(vec![(*s).into(), (*e).into()])?;
    }

    let mut gates = vec![
        Gate::below("final_error", main.final_error, c.tolerance),
        Gate::below("unitarity", main.unitarity_residual, 1e-8),
        Gate::below("idempotency", main.idempotency_residual, 1e-8),
        Gate::below("trace_drift", main.trace_drift, 1e-8),
    ];
    let mut runs: Vec<(usize, f64)> = conv.iter().map(|r| (r.steps, r.final_error)).collect();
    runs.sort_by_key(|r| r.0);
    let orders = observed_orders(&runs);
    if !runs.is_empty() {
        let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
        gates.push(Gate {
            name: "convergence_order".into(),
            passed: !orders.is_empty() && min_order >= 2.0,
            value: min_order,
            threshold: 2.0,
            detail: format!("orders {orders:?}"),
        });
    }
    let filter_errors: Vec<f64> = filtered.iter().map(|r| r.final_error).collect();
    if filter_errors.len() >= 2 {
        let mut pairs: Vec<(f64, f64)> = c
            .filter_widths
            .iter()
            .copied()
            .zip(filter_errors.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let monotone = pairs.windows(2).all(|w| w[1].1 < w[0].1);
        gates.push(Gate::flag(
            "filtered_monotone",
            monotone,
            format!("errors by width {pairs:?}"),
        ));
    }

    let mut artifacts = vec![
        csv("transport.csv", &table),
        csv("transport_errors.csv", &errors),
    ];
    let mut profiles = Vec::new();
    if !c.profile_s.is_empty() {
        let mut t = CsvTable::new(&["s", "dist", "max_abs", "fit_xi", "fit_r2"]);
        for &s in &c.profile_s {
            let g = exact_flow_generator(&sys, s.asin())?;
            let p = generator_locality_profile(&g, &sys, c.locality_mu)?;
            let (xi, r2) = p.fit.map_or((f64::NAN, f64::NAN), |f| (f.length, f.fit.r2));
            for q in &p.points {
                t.push(vec![
                    s.into(),
                    q.dist.into(),
                    q.max_abs.into(),
                    xi.into(),
                    r2.into(),
                ])?;
            }
            gates.push(Gate::above(&format!("generator_fit_r2_s{s}"), r2, 0.9));
            profiles.push(json!({ "s": s, "fit_xi": xi, "fit_r2": r2, "xi_bound": p.xi_bound }));
        }
        artifacts.push(csv("generator_profile.csv", &t));
    }
    let summary = json!({
        "steps": main.steps,
        "final_error": main.final_error,
        "unitarity_residual": main.unitarity_residual,
        "delta_e": de,
        "convergence": runs,
        "orders": orders,
        "filtered_errors": filter_errors,
        "profiles": profiles,
    });
    Ok(Outcome {
        gates,
        artifacts,
        summary,
    })
}

pub fn wannier(c: &WannierConfig) -> Result<Outcome> {
    let mut gates = Vec::new();
    let mut artifacts = Vec::new();
    let mut summary = json!({});
    if let Some(model) = &c.model {
        let specs: Vec<ModelSpec> = if c.sizes.is_empty() {
            vec![model.clone()]
        } else {
            c.sizes
                .iter()
                .map(|&v| model.with_sites(v))
                .collect::<Result<_>>()?
        };
        let bases = specs
            .par_iter()
            .map(|spec| {
                let h = spec.build()?;
                if !h.lattice().is_open() {
                    return Err(Error::Configuration(
                        "Wannier chains need open boundaries".into(),
                    ));
                }
                let g = occupied_projector(&h)?;
                let x = PositionOperator::new(h.lattice(), Axis::X)?;
                let w = gxg_wannier_1d(&g, &x, h.lattice())?;
                let q = g.single_particle();
                Ok((h.num_sites(), w.reconstruction_residual(&q), w))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sizes = CsvTable::new(&[
            "V",
            "functions",
            "max_xi",
            "min_r2",
            "reconstruction",
            "orthonormality",
        ]);
        for (v, recon, w) in &bases {
            let mut t = CsvTable::new(&["index", "center", "xi_w", "fit_r2"]);
            for r in &w.records {
                t.push(vec![
                    r.index.into(),
                    r.center.into(),
                    r.fit.length.into(),
                    r.fit.r2.into(),
                ])?;
            }
            artifacts.push(csv(&format!("wannier_V{v}.csv"), &t));
            sizes.push(vec![
                (*v).into(),
                w.records.len().into(),
                w.max_length().into(),
                w.min_r2().into(),
                (*recon).into(),
                w.orthonormality_residual().into(),
            ])?;
        }
        artifacts.push(csv("wannier_sizes.csv", &sizes));
        let worst_recon = bases.iter().fold(0.0f64, |a, b| a.max(b.1));
        let min_r2 = bases.iter().map(|b| b.2.min_r2()).fold(1.0, f64::min);
        let lengths: Vec<f64> = bases.iter().map(|b| b.2.max_length()).collect();
        gates.push(Gate::below("reconstruction", worst_recon, 1e-8));
        gates.push(Gate::above("fit_r2", min_r2, 0.9));
        if lengths.len() >= 2 {
            let hi = lengths.iter().copied().fold(0.0, f64::max);
            let lo = lengths.iter().copied().fold(f64::INFINITY, f64::min);
            gates.push(Gate::below("length_stability", hi / lo, 1.5));
        }
        summary["max_lengths"] = json!(lengths);
    }
    if let Some(cc) = &c.commutator {
        let scan = commutator_scan(&cc.sizes, cc.hopping, cc.mass)?;
        let mut t = CsvTable::new(&["L", "comm_norm", "gxg_norm", "gyg_norm", "ratio"]);
        for (l, r) in scan.sizes.iter().zip(&scan.records) {
            t.push(vec![
                (*l).into(),
                r.comm_norm.into(),
                r.gxg_norm.into(),
                r.gyg_norm.into(),
                r.ratio.into(),
            ])?;
        }
        artifacts.push(csv("commutator.csv", &t));
        gates.push(Gate::below(
            "commutator_growth",
            scan.comm_fit.slope.abs(),
            0.2,
        ));
        gates.push(Gate::above("gxg_growth_slope", scan.gxg_fit.slope, 0.0));
        gates.push(Gate::above("gxg_growth_linearity", scan.gxg_fit.r2, 0.99));
        summary["commutator"] = json!({ "comm_fit": scan.comm_fit, "gxg_fit": scan.gxg_fit });
    }
    Ok(Outcome {
        gates,
        artifacts,
        summary,
    })
}
