//! Every independent oracle against the production code path. Random inputs
//! come from a single generator seeded by the run seed.

use fermion_doubling::doubling::{product_ground_state_covariance, DoubledSystem};
use fermion_doubling::gaussian::GaussianReducedState;
use fermion_doubling::invariants::{pfaffian, real_space_chern, SectorPartition, SkewMatrix};
use fermion_doubling::io::CsvTable;
use fermion_doubling::linalg::C64;
use fermion_doubling::models::{
    chern_insulator_model, kitaev_chain, random_model, ChernParams, KitaevParams, RandomParams,
};
use fermion_doubling::oracles::{
    fock, matchings::pfaffian_by_matchings, tknn::lower_band_chern, two_mode,
};
use fermion_doubling::spectral::{ground_covariance, occupied_projector, BdgMatrix};
use fermion_doubling::Result;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::experiments::{Artifact, Gate, Outcome};

struct Comparison {
    oracle: &'static str,
    case: String,
    error: f64,
    tolerance: f64,
}

fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

fn random_skew<T>(rng: &mut ChaCha8Rng, n: usize, draw: impl Fn(&mut ChaCha8Rng) -> T) -> Array2<T>
where
    T: Copy + Default + std::ops::Neg<Output = T>,
{
    let mut m = Array2::from_elem((n, n), T::default());
    for i in 0..n {
        for j in i + 1..n {
            let x = draw(rng);
            m[[i, j]] = x;
            m[[j, i]] = -x;
        }
    }
    m
}

fn pfaffian_cases(rng: &mut ChaCha8Rng, out: &mut Vec<Comparison>) -> Result<()> {
    for n in [2, 4, 6, 8] {
        let m = random_skew(rng, n, |r| r.random_range(-1.0f64..1.0));
        let fast = pfaffian(&SkewMatrix::new(m.clone())?);
        out.push(Comparison {
            oracle: "pfaffian-matchings",
            case: format!("real n={n}"),
            error: (fast - pfaffian_by_matchings(&m.view())).abs(),
            tolerance: 1e-10,
        });
    }
    for n in [4, 6] {
        let m = random_skew(rng, n, |r| {
            C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
        });
        let fast = pfaffian(&SkewMatrix::new(m.clone())?);
        out.push(Comparison {
            oracle: "pfaffian-matchings",
            case: format!("complex n={n}"),
            error: (fast - pfaffian_by_matchings(&m.view())).norm(),
            tolerance: 1e-10,
        });
    }
    Ok(())
}

fn fock_covariance(case: String, a: &BdgMatrix, out: &mut Vec<Comparison>) -> Result<()> {
    let b = ground_covariance(a)?;
    let order = fock::identity_order(a.modes());
    let gs = fock::ground_state(a, &order)?;
    let (exact, imag) = fock::majorana_covariance(&gs.space, &gs.state, &order)?;
    out.push(Comparison {
        oracle: "fock-covariance",
        case,
        error: max_diff(b.data(), &exact).max(imag),
        tolerance: 1e-8,
    });
    Ok(())
}

fn fock_cases(rng: &mut ChaCha8Rng, out: &mut Vec<Comparison>) -> Result<()> {
    let kitaev = kitaev_chain(&KitaevParams::new(4, 1.0, 0.6, 0.3, false))?.assemble_bdg()?;
    fock_covariance("kitaev V=4".into(), &kitaev, out)?;
    for sites in [4, 6] {
        let seed: u64 = rng.random();
        let a = random_model(&RandomParams {
            sites,
            scale: 1.0,
            seed,
        })?
        .assemble_bdg()?;
        fock_covariance(format!("random V={sites}"), &a, out)?;
    }
    let b = ground_covariance(&kitaev)?;
    for subset in [vec![0, 1], vec![1, 2], vec![3, 0], vec![2]] {
        let mut order = subset.clone();
        order.extend((0..4).filter(|m| !subset.contains(m)));
        let gs = fock::ground_state(&kitaev, &order)?;
        let exact = fock::reduced_density_matrix(&gs.space, &gs.state, subset.len())?;
        let rho = GaussianReducedState::new(&b, &subset)?.rho;
        let error = (&rho - &exact)
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        out.push(Comparison {
            oracle: "fock-rdm",
            case: format!("kitaev V=4 Y={subset:?}"),
            error,
            tolerance: 1e-8,
        });
    }
    Ok(())
}

fn tknn_cases(out: &mut Vec<Comparison>) -> Result<()> {
    let l = 16;
    for mass in [1.0, -1.0, 3.0] {
        let h = chern_insulator_model(&ChernParams {
            lx: l,
            ly: l,
            hopping: 1.0,
            mass,
            periodic: true,
        })?;
        let nu = real_space_chern(
            &occupied_projector(&h)?,
            &SectorPartition::centered(h.lattice())?,
        )?;
        let oracle = lower_band_chern(1.0, mass, 24);
        out.push(Comparison {
            oracle: "tknn",
            case: format!("L={l} m={mass}"),
            error: (nu.nu - oracle as f64).abs(),
            tolerance: 0.1,
        });
    }
    Ok(())
}

fn two_mode_cases(out: &mut Vec<Comparison>) -> Result<()> {
    let corr = two_mode::pair_correlators()?;
    let analytic = product_ground_state_covariance(3)?;
    let occupation = (0..6)
        .map(|m| (analytic.occupation(m) - corr.occupation_up).abs())
        .fold(0.0, f64::max);
    out.push(Comparison {
        oracle: "two-mode",
        case: "occupations".into(),
        error: occupation
            .max((corr.occupation_up - 0.5).abs())
            .max((corr.occupation_down - 0.5).abs()),
        tolerance: 1e-12,
    });
    out.push(Comparison {
        oracle: "two-mode",
        case: "product covariance V=3".into(),
        error: max_diff(analytic.data(), &two_mode::product_covariance(3)?),
        tolerance: 1e-12,
    });
    let sys = DoubledSystem::new(kitaev_chain(&KitaevParams::new(8, 1.0, 0.6, 0.5, true))?)?;
    out.push(Comparison {
        oracle: "two-mode",
        case: "doubled kitaev V=8 at s=1".into(),
        error: max_diff(
            sys.ground_covariance_at(1.0)?.data(),
            &two_mode::product_covariance(8)?,
        ),
        tolerance: 1e-10,
    });
    Ok(())
}

pub fn oracle_suite(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cmp = Vec::new();
    pfaffian_cases(&mut rng, &mut cmp)?;
    fock_cases(&mut rng, &mut cmp)?;
    tknn_cases(&mut cmp)?;
    two_mode_cases(&mut cmp)?;
    let mut table = CsvTable::new(&["oracle", "case", "error", "tolerance", "passed"]);
    let mut gates = Vec::new();
    for c in &cmp {
        let passed = c.error < c.tolerance;
        table.push(vec![
            c.oracle.into(),
            c.case.as_str().into(),
            c.error.into(),
            c.tolerance.into(),
            passed.into(),
        ])?;
        gates.push(Gate {
            detail: format!("{} (error {:.3e})", c.case, c.error),
            ..Gate::below(c.oracle, c.error, c.tolerance)
        });
    }
    let failing: Vec<String> = cmp
        .iter()
        .filter(|c| c.error >= c.tolerance)
        .map(|c| format!("{} ({})", c.oracle, c.case))
        .collect();
    let summary = json!({ "seed": seed, "comparisons": cmp.len(), "failing": failing });
    Ok(Outcome {
        gates,
        artifacts: vec![Artifact {
            file: "oracle.csv".into(),
            body: table.render(),
        }],
        summary,
    })
}
