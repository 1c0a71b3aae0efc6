//! Reduced density matrices of fermionic Gaussian states and the
//! boundary-insensitivity experiment.
//!
//! A restricted covariance `B_Y` is brought to the normal form
//! `O B_Y O^T = (+)_k nu_k [[0, 1], [-1, 0]]` with `O` real orthogonal. With
//! the rotated Majoranas `c'_a = sum_b O_ab c_b`, the state is
//! `rho = prod_k (1 + i nu_k c'_{2k} c'_{2k+1}) / 2`. Majoranas are
//! represented on `2^|Y|` dimensions by the Jordan-Wigner strings
//! `c_{2j} = Z..Z X_j`, `c_{2j+1} = Z..Z Y_j`, with bit `j` of a basis index
//! holding the occupation of site `Y[j]`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LineFit};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::linalg::{eigh_raw, eigvalsh, identity, trace, C64, I};
use crate::spectral::{ground_covariance, MajoranaCovariance};

/// Largest subset for which a dense reduced density matrix is built.
pub const MAX_RDM_SITES: usize = 12;

/// Williamson values may exceed one by this much before being rejected.
pub const WILLIAMSON_CLAMP: f64 = 1e-8;

/// Distances below this are treated as exact agreement.
pub const DISTANCE_FLOOR: f64 = 1e-12;

fn check_subset(subset: &[usize], sites: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::InvalidInput("subset is empty".into()));
    }
    let mut seen = vec![false; sites];
    for &y in subset {
        if y >= sites || seen[y] {
            return Err(Error::InvalidInput(format!(
                "subset entry {y} is repeated or outside {sites} sites"
            )));
        }
        seen[y] = true;
    }
    Ok(())
}

/// Principal submatrix of `B` on the Majoranas `2y, 2y + 1` of each `y` in
/// `subset`, in subset order.
pub fn restrict_covariance(b: &MajoranaCovariance, subset: &[usize]) -> Result<Array2<f64>> {
    check_subset(subset, b.modes())?;
    let idx: Vec<usize> = subset.iter().flat_map(|&y| [2 * y, 2 * y + 1]).collect();
    let data = b.data();
    Ok(Array2::from_shape_fn((idx.len(), idx.len()), |(i, j)| {
        data[[idx[i], idx[j]]]
    }))
}

/// Williamson values `nu_k >= 0` (eigenvalues of `i B_Y`, one per pair),
/// in descending order.
pub fn williamson_values(b_y: &Array2<f64>) -> Result<Vec<f64>> {
    let ib = b_y.mapv(|x| I * x);
    let mut vals: Vec<f64> = eigvalsh(&ib.view())?.to_vec();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.truncate(b_y.nrows() / 2);
    Ok(vals.into_iter().map(|v| v.max(0.0)).collect())
}

/// Orthogonal `O` and values `nu_k` with `O B O^T = (+)_k nu_k J`.
pub fn normal_form(b_y: &Array2<f64>) -> Result<(Array2<f64>, Vec<f64>)> {
    let n2 = b_y.nrows();
    let n = n2 / 2;
    let ib = b_y.mapv(|x| I * x);
    let (vals, vecs) = eigh_raw(&ib.view())?;
    let mut o = Array2::<f64>::zeros((n2, n2));
    let mut nus = Vec::with_capacity(n);
    let mut row = 0;
    // Eigenvalues ascend, so the positive ones sit at the end.
    for k in (0..n2).rev() {
        if vals[k] <= 1e-10 || row == n2 {
            break;
        }
        let v = vecs.column(k);
        let s2 = std::f64::consts::SQRT_2;
        o.row_mut(row).assign(&v.mapv(|z| s2 * z.re));
        o.row_mut(row + 1).assign(&v.mapv(|z| -s2 * z.im));
        nus.push(vals[k]);
        row += 2;
    }
    if row < n2 {
        // Complete with an orthonormal basis of the remaining (nu = 0) space.
        let filled = o.slice(ndarray::s![..row, ..]).to_owned();
        let mut comp = Array2::<f64>::eye(n2) - filled.t().dot(&filled);
        comp = (&comp + &comp.t()) * 0.5;
        let (cvals, cvecs) = comp.eigh(UPLO::Lower)?;
        for k in (0..n2).rev() {
            if row == n2 {
                break;
            }
            if cvals[k] > 0.5 {
                o.row_mut(row).assign(&cvecs.column(k));
                row += 1;
            }
        }
        if row != n2 {
            return Err(Error::Linalg(
                "normal form basis could not be completed".into(),
            ));
        }
        while nus.len() < n {
            nus.push(0.0);
        }
    }
    Ok((o, nus))
}

/// Action of `c_k` (`k < 2 * modes`) on basis state `state`: target state
/// and amplitude.
fn majorana_action(k: usize, state: usize) -> (usize, C64) {
    let j = k / 2;
    let parity = (state & ((1 << j) - 1)).count_ones() % 2;
    let string = if parity == 0 { 1.0 } else { -1.0 };
    let occupied = state >> j & 1 == 1;
    let target = state ^ (1 << j);
    let local = if k.is_multiple_of(2) {
        C64::new(1.0, 0.0)
    } else if occupied {
        -I
    } else {
        I
    };
    (target, local * string)
}

/// Dense Jordan-Wigner Majorana operator `c_k` on `modes` modes.
pub fn majorana_operator(modes: usize, k: usize) -> Array2<C64> {
    let dim = 1 << modes;
    let mut m = Array2::zeros((dim, dim));
    for state in 0..dim {
        let (target, amp) = majorana_action(k, state);
        m[[target, state]] = amp;
    }
    m
}

/// `sum_ab u_a w_b c_a c_b` as a dense matrix.
fn bilinear(modes: usize, u: &Array1<f64>, w: &Array1<f64>) -> Array2<C64> {
    let dim = 1 << modes;
    let n2 = 2 * modes;
    let mut m = Array2::<C64>::zeros((dim, dim));
    for a in 0..n2 {
        if u[a] == 0.0 {
            continue;
        }
        for b in 0..n2 {
            let coef = u[a] * w[b];
            if coef == 0.0 {
                continue;
            }
            for state in 0..dim {
                let (mid, amp_b) = majorana_action(b, state);
                let (out, amp_a) = majorana_action(a, mid);
                m[[out, state]] += amp_a * amp_b * coef;
            }
        }
    }
    m
}

/// Gaussian state with covariance `b_y`.
pub fn rdm_from_covariance(b_y: &Array2<f64>) -> Result<Array2<C64>> {
    let (r, cc) = b_y.dim();
    if r != cc || r % 2 != 0 || r == 0 {
        return Err(Error::InvalidInput(format!(
            "restricted covariance is {r}x{cc}"
        )));
    }
    let modes = r / 2;
    if modes > MAX_RDM_SITES {
        return Err(Error::Capacity(format!(
            "{modes} sites exceed the {MAX_RDM_SITES}-site limit"
        )));
    }
    let anti = b_y
        .iter()
        .zip(b_y.t().iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x + y).abs()));
    if anti > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "restricted covariance not antisymmetric ({anti:.3e})"
        )));
    }
    let (o, nus) = normal_form(b_y)?;
    let dim = 1usize << modes;
    let mut rho = identity(dim) * C64::new(1.0 / dim as f64, 0.0);
    for (k, &nu) in nus.iter().enumerate() {
        if nu > 1.0 + WILLIAMSON_CLAMP {
            return Err(Error::InvalidInput(format!(
                "Williamson value {nu} exceeds 1"
            )));
        }
        let nu = nu.min(1.0);
        if nu == 0.0 {
            continue;
        }
        let pair = bilinear(
            modes,
            &o.row(2 * k).to_owned(),
            &o.row(2 * k + 1).to_owned(),
        );
        // rho_k = 1 + i nu c'c' (the 1/2 normalisation is already in rho).
        let factor = identity(dim) + pair * (I * nu);
        rho = rho.dot(&factor);
    }
    Ok((&rho + &rho.t().mapv(|z| z.conj())) * C64::new(0.5, 0.0))
}

/// `B_jk = i tr(rho c_j c_k)` for `j != k`.
pub fn covariance_of_rdm(rho: &Array2<C64>) -> Array2<f64> {
    let modes = rho.nrows().trailing_zeros() as usize;
    let n2 = 2 * modes;
    let ops: Vec<Array2<C64>> = (0..n2).map(|k| majorana_operator(modes, k)).collect();
    Array2::from_shape_fn((n2, n2), |(j, k)| {
        if j == k {
            0.0
        } else {
            (trace(&rho.dot(&ops[j]).dot(&ops[k]).view()) * I).re
        }
    })
}

/// `tr |rho - sigma|`.
pub fn trace_norm_distance(rho: &Array2<C64>, sigma: &Array2<C64>) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho - sigma;
    Ok(eigvalsh(&diff.view())?.iter().map(|x| x.abs()).sum())
}

/// Reduced state on an ordered subset `Y`.
#[derive(Clone, Debug)]
pub struct GaussianReducedState {
    pub subset: Vec<usize>,
    pub covariance: Array2<f64>,
    pub williamson: Vec<f64>,
    pub rho: Array2<C64>,
}

impl GaussianReducedState {
    pub fn new(b: &MajoranaCovariance, subset: &[usize]) -> Result<Self> {
        if subset.len() > MAX_RDM_SITES {
            return Err(Error::Capacity(format!(
                "{} sites exceed the {MAX_RDM_SITES}-site limit",
                subset.len()
            )));
        }
        let covariance = restrict_covariance(b, subset)?;
        let williamson = williamson_values(&covariance)?;
        let rho = rdm_from_covariance(&covariance)?;
        Ok(GaussianReducedState {
            subset: subset.to_vec(),
            covariance,
            williamson,
            rho,
        })
    }

    pub fn purity(&self) -> f64 {
        trace(&self.rho.dot(&self.rho).view()).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigvalsh(&self.rho.view())?[0])
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundaryRecord {
    pub l: usize,
    pub trace_distance: f64,
    /// Bound `const |Y| sqrt(l / (v dE)) s1 exp(-l / xi') xi'^d` with the
    /// constant fitted as the largest ratio.
    pub bound_envelope: f64,
}

/// Scales entering the bound envelope.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundScales {
    pub s1: f64,
    pub velocity: f64,
    pub delta_e: f64,
    pub xi_prime: f64,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub subset: Vec<usize>,
    pub scales: BoundScales,
    pub fitted_constant: f64,
    /// Fit of `log(distance)` against `l` over distances above the floor.
    pub fit: Option<LineFit>,
    pub all_below_floor: bool,
    pub monotone: bool,
    pub records: Vec<BoundaryRecord>,
}

impl BoundaryReport {
    /// Exponential decay in `l` (negative slope, `r^2 > 0.9`) or distances
    /// entirely below the floor.
    pub fn decays(&self) -> bool {
        self.all_below_floor || self.fit.is_some_and(|f| f.slope < 0.0 && f.r2 > 0.9)
    }
}

fn envelope_shape(l: usize, size: usize, scales: &BoundScales) -> f64 {
    let l = l as f64;
    size as f64
        * (l / (scales.velocity * scales.delta_e)).sqrt()
        * scales.s1
        * (-l / scales.xi_prime).exp()
        * scales.xi_prime.powi(scales.dimension as i32)
}

/// Nonincreasing up to `floor` after averaging adjacent points.
pub fn monotone_after_smoothing(values: &[f64], floor: f64) -> bool {
    let smooth: Vec<f64> = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    smooth.windows(2).all(|w| w[1] <= w[0] + floor)
}

fn assemble_report(
    subset: &[usize],
    scales: BoundScales,
    raw: Vec<(usize, f64)>,
) -> Result<BoundaryReport> {
    let fitted_constant = raw
        .iter()
        .map(|&(l, d)| d / envelope_shape(l, subset.len(), &scales))
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max);
    let records: Vec<BoundaryRecord> = raw
        .iter()
        .map(|&(l, d)| BoundaryRecord {
            l,
            trace_distance: d,
            bound_envelope: fitted_constant * envelope_shape(l, subset.len(), &scales),
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = raw
        .iter()
        .filter(|(_, d)| *d > DISTANCE_FLOOR)
        .map(|&(l, d)| (l as f64, d.ln()))
        .unzip();
    let all_below_floor = xs.is_empty();
    let fit = if xs.len() >= 2 {
        Some(linear_fit(&xs, &ys)?)
    } else {
        None
    };
    let distances: Vec<f64> = raw.iter().map(|r| r.1).collect();
    Ok(BoundaryReport {
        subset: subset.to_vec(),
        scales,
        fitted_constant,
        fit,
        all_below_floor,
        monotone: monotone_after_smoothing(&distances, DISTANCE_FLOOR),
        records,
    })
}

fn reduced_state_of(h: &QuadraticHamiltonian, subset: &[usize]) -> Result<Array2<C64>> {
    let b = ground_covariance(&h.assemble_bdg()?)?;
    Ok(GaussianReducedState::new(&b, subset)?.rho)
}

fn check_agreement(
    base: &QuadraticHamiltonian,
    other: &QuadraticHamiltonian,
    subset: &[usize],
    l: usize,
) -> Result<()> {
    let region = base.lattice().neighborhood(subset, l);
    if !base.agrees_on(other, &region) {
        return Err(Error::Configuration(format!(
            "systems differ inside the region within distance {l} of the subset"
        )));
    }
    Ok(())
}

/// Fixed pair of systems: for each margin the pair must agree on every site
/// within that distance of `Y`. The distance is the same for every margin.
pub fn boundary_sensitivity(
    base: &QuadraticHamiltonian,
    perturbed: &QuadraticHamiltonian,
    subset: &[usize],
    margins: &[usize],
    scales: BoundScales,
) -> Result<BoundaryReport> {
    for &l in margins {
        check_agreement(base, perturbed, subset, l)?;
    }
    let d = trace_norm_distance(
        &reduced_state_of(base, subset)?,
        &reduced_state_of(perturbed, subset)?,
    )?;
    assemble_report(subset, scales, margins.iter().map(|&l| (l, d)).collect())
}

/// Margin sweep: `perturb(l)` must agree with `base` within distance `l` of
/// `Y`, and the distance is recorded for each margin.
pub fn boundary_sweep<F>(
    base: &QuadraticHamiltonian,
    perturb: F,
    subset: &[usize],
    margins: &[usize],
    scales: BoundScales,
) -> Result<BoundaryReport>
where
    F: Fn(usize) -> Result<QuadraticHamiltonian>,
{
    let reference = reduced_state_of(base, subset)?;
    let mut raw = Vec::with_capacity(margins.len());
    for &l in margins {
        let other = perturb(l)?;
        check_agreement(base, &other, subset, l)?;
        raw.push((
            l,
            trace_norm_distance(&reference, &reduced_state_of(&other, subset)?)?,
        ));
    }
    assemble_report(subset, scales, raw)
}

/// Local change placed just outside the margin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Defect {
    /// Scale the couplings of a bond whose nearer end is at distance `l + 1`.
    BondScale { factor: f64 },
    /// Shift the on-site energy of a site at distance `l + 1`.
    OnsiteShift { shift: f64 },
}

/// `base` with `defect` at distance `l + 1` from `Y` (lowest-index site at
/// that distance).
pub fn defect_outside(
    base: &QuadraticHamiltonian,
    subset: &[usize],
    l: usize,
    defect: Defect,
) -> Result<QuadraticHamiltonian> {
    let lat = base.lattice();
    let dist_to = |i: usize| {
        subset
            .iter()
            .map(|&y| lat.dist(i, y))
            .min()
            .unwrap_or(usize::MAX)
    };
    let site = (0..lat.num_sites())
        .find(|&i| dist_to(i) == l + 1)
        .ok_or_else(|| {
            Error::Configuration(format!("no site at distance {} from the subset", l + 1))
        })?;
    match defect {
        Defect::OnsiteShift { shift } => base.with_onsite_shift(site, shift),
        Defect::BondScale { factor } => {
            let partner = (0..lat.num_sites())
                .find(|&j| lat.dist(site, j) == 1 && dist_to(j) == l + 2)
                .ok_or_else(|| {
                    Error::Configuration(format!("no outward bond at distance {}", l + 1))
                })?;
            base.with_bond_scaled(site, partner, factor)
        }
    }
}
