//! Single-particle quasi-adiabatic continuation along the doubled path.
//!
//! The path is parametrized by `s = sin(theta)`, so that
//! `C(theta) = [[cos A, sin dE], [sin dE, -cos A]]` and its derivative stay
//! bounded up to the product endpoint. Generators are Hermitian `4V x 4V`
//! matrices `K` in the doubled-path ordering with `dP/dtheta = -i [K, P]`
//! for the negative-energy projector `P` of `C(theta)`:
//!
//! * exact: `K = i [dP, P]`, i.e. `K_mn = i dC_mn / (lambda_n - lambda_m)`
//!   between eigenvectors of opposite sign and zero otherwise;
//! * filtered: `K_mn = i dC_mn w(lambda_m - lambda_n)` for all pairs, with
//!   `w(omega) = -(1 - exp(-omega^2 T^2 / 2)) / omega`, which equals
//!   `-1/omega` up to a Gaussian tail once `|omega| T >> 1`.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use serde::Serialize;

use crate::doubling::{path_from_coefficients, DoubledSystem};
use crate::error::{Error, Result};
use crate::fit::{exponential_decay, DecayFit};
use crate::linalg::{
    c, commutator, dagger, hermitian_norm, hermitian_residual, identity, max_abs, trace,
    unitarity_residual, HermitianEigen, C64, I,
};
use crate::spectral::{negative_projector, GAP_FLOOR_FACTOR};

/// Entries of `|K|` below this are ignored in decay fits.
pub const PROFILE_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FlowVariant {
    Exact,
    /// Gaussian filter with time cutoff `T`.
    Filtered {
        width: f64,
    },
}

#[derive(Clone, Debug)]
pub struct FlowGenerator {
    pub theta: f64,
    pub k: Array2<C64>,
    pub variant: FlowVariant,
}

impl FlowGenerator {
    pub fn s(&self) -> f64 {
        self.theta.sin()
    }
}

/// `C(theta)` and `dC/dtheta`.
pub fn path_matrices(sys: &DoubledSystem, theta: f64) -> Result<(Array2<C64>, Array2<C64>)> {
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "angle {theta} outside [0, pi/2]"
        )));
    }
    let a = sys.bdg().data();
    let de = sys.delta_e();
    let cmat = path_from_coefficients(a, theta.cos(), theta.sin() * de);
    let n = a.nrows();
    let mut dc = path_from_coefficients(a, -theta.sin(), theta.cos() * de);
    // The lower-right block of the derivative is +sin(theta) A.
    let lower = a.mapv(|z| z * theta.sin());
    dc.slice_mut(ndarray::s![n.., n..]).assign(&lower);
    Ok((cmat, dc))
}

fn check_gap(eig: &HermitianEigen) -> Result<()> {
    let gap = eig.min_abs();
    let floor = GAP_FLOOR_FACTOR * eig.max_abs();
    if !(gap > floor) {
        return Err(Error::Gapless { gap, floor });
    }
    Ok(())
}

fn filter_weight(omega: f64, width: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    let x = 0.5 * omega * omega * width * width;
    (-x).exp_m1() / omega
}

fn generator_from_eigen(
    eig: &HermitianEigen,
    dc: &Array2<C64>,
    variant: FlowVariant,
) -> Array2<C64> {
    let u = &eig.vectors;
    let dct = dagger(&u.view()).dot(dc).dot(u);
    let lam = &eig.values;
    let n = lam.len();
    let kt = Array2::from_shape_fn((n, n), |(m, k)| {
        let (lm, lk) = (lam[m], lam[k]);
        match variant {
            FlowVariant::Exact => {
                if (lm < 0.0) != (lk < 0.0) {
                    I * dct[[m, k]] / (lk - lm)
                } else {
                    c(0.0)
                }
            }
            FlowVariant::Filtered { width } => I * dct[[m, k]] * filter_weight(lm - lk, width),
        }
    });
    let k = u.dot(&kt).dot(&dagger(&u.view()));
    (&k + &dagger(&k.view())) * c(0.5)
}

/// Generator for a Hermitian `C` and Hermitian derivative `dC`.
pub fn flow_generator(
    cmat: &Array2<C64>,
    dc: &Array2<C64>,
    variant: FlowVariant,
) -> Result<Array2<C64>> {
    if let FlowVariant::Filtered { width } = variant {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "filter width must be positive, got {width}"
            )));
        }
    }
    if hermitian_residual(&dc.view()) > 1e-10 * max_abs(&dc.view()).max(1.0) {
        return Err(Error::InvalidInput(
            "derivative matrix is not Hermitian".into(),
        ));
    }
    let eig = HermitianEigen::new(&cmat.view())?;
    check_gap(&eig)?;
    Ok(generator_from_eigen(&eig, dc, variant))
}

pub fn exact_flow_generator(sys: &DoubledSystem, theta: f64) -> Result<FlowGenerator> {
    let (cmat, dc) = path_matrices(sys, theta)?;
    Ok(FlowGenerator {
        theta,
        k: flow_generator(&cmat, &dc, FlowVariant::Exact)?,
        variant: FlowVariant::Exact,
    })
}

pub fn filtered_flow_generator(
    sys: &DoubledSystem,
    theta: f64,
    width: f64,
) -> Result<FlowGenerator> {
    let variant = FlowVariant::Filtered { width };
    let (cmat, dc) = path_matrices(sys, theta)?;
    Ok(FlowGenerator {
        theta,
        k: flow_generator(&cmat, &dc, variant)?,
        variant,
    })
}

/// Negative-energy projector of `C(theta)`.
pub fn exact_projector(sys: &DoubledSystem, theta: f64) -> Result<Array2<C64>> {
    let (cmat, _) = path_matrices(sys, theta)?;
    negative_projector(&HermitianEigen::new(&cmat.view())?, None)
}

/// `max |(P(theta + h) - P(theta - h)) / 2h + i [K, P]|`.
pub fn derivative_residual(sys: &DoubledSystem, theta: f64, h: f64) -> Result<f64> {
    let p = exact_projector(sys, theta)?;
    let dp = (exact_projector(sys, theta + h)? - exact_projector(sys, theta - h)?) * c(0.5 / h);
    let k = exact_flow_generator(sys, theta)?.k;
    let predicted = commutator(&k.view(), &p.view()) * (-I);
    Ok(max_abs(&(dp - predicted).view()))
}

fn unitary_exponential(k: &Array2<C64>, h: f64) -> Result<Array2<C64>> {
    // exp(-i K h)
    Ok(HermitianEigen::new(&k.view())?.apply(|x| C64::from_polar(1.0, -x * h)))
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportResult {
    pub steps: usize,
    pub variant: FlowVariant,
    /// `s` after each step, from 1 towards 0.
    pub s_grid: Vec<f64>,
    /// Spectral-norm distance to the exact projector after each step.
    pub errors: Vec<f64>,
    pub final_error: f64,
    /// `1 - |det(V_0^dag U V_1)|` for orthonormal occupied frames.
    pub overlap_deficit: f64,
    pub unitarity_residual: f64,
    pub idempotency_residual: f64,
    pub trace_drift: f64,
}

/// Transports the `s = 1` projector to `s = 0` with the midpoint exponential
/// rule `U <- exp(-i K(theta_mid) h) U`.
pub fn transport_projector(
    sys: &DoubledSystem,
    steps: usize,
    variant: FlowVariant,
) -> Result<TransportResult> {
    transport_between(sys, FRAC_PI_2, 0.0, steps, variant)
}

pub fn transport_between(
    sys: &DoubledSystem,
    from: f64,
    to: f64,
    steps: usize,
    variant: FlowVariant,
) -> Result<TransportResult> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "transport needs at least two steps, got {steps}"
        )));
    }
    let n = 4 * sys.sites();
    let p_start = exact_projector(sys, from)?;
    let start_trace = trace(&p_start.view()).re;
    let h = (to - from) / steps as f64;
    let mut u = identity(n);
    let mut s_grid = Vec::with_capacity(steps);
    let mut errors = Vec::with_capacity(steps);
    let mut idem: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for j in 0..steps {
        let mid = from + (j as f64 + 0.5) * h;
        let (cmat, dc) = path_matrices(sys, mid)?;
        let k = flow_generator(&cmat, &dc, variant)?;
        u = unitary_exponential(&k, h)?.dot(&u);
        let theta = if j + 1 == steps {
            to
        } else {
            from + (j as f64 + 1.0) * h
        };
        let p = u.dot(&p_start).dot(&dagger(&u.view()));
        let exact = exact_projector(sys, theta)?;
        errors.push(hermitian_norm(&(&p - &exact).view())?);
        s_grid.push(theta.sin());
        idem = idem.max(max_abs(&(p.dot(&p) - &p).view()));
        drift = drift.max((trace(&p.view()).re - start_trace).abs());
    }
    let exact_end = exact_projector(sys, to)?;
    let overlap_deficit = occupied_overlap_deficit(&exact_end, &p_start, &u)?;
    Ok(TransportResult {
        steps,
        variant,
        final_error: *errors.last().expect("at least one step"),
        s_grid,
        errors,
        overlap_deficit,
        unitarity_residual: unitarity_residual(&u.view()),
        idempotency_residual: idem,
        trace_drift: drift,
    })
}

fn occupied_frame(p: &Array2<C64>) -> Result<Array2<C64>> {
    let eig = HermitianEigen::new(&p.view())?;
    let cols: Vec<usize> = (0..eig.dim()).filter(|&k| eig.values[k] > 0.5).collect();
    Ok(eig.vectors.select(ndarray::Axis(1), &cols))
}

fn occupied_overlap_deficit(
    exact: &Array2<C64>,
    start: &Array2<C64>,
    u: &Array2<C64>,
) -> Result<f64> {
    use ndarray_linalg::Determinant;
    let v0 = occupied_frame(exact)?;
    let v1 = u.dot(&occupied_frame(start)?);
    if v0.ncols() != v1.ncols() {
        return Ok(1.0);
    }
    let overlap = dagger(&v0.view()).dot(&v1);
    Ok(1.0 - overlap.det()?.norm())
}

/// `log2(e(n) / e(2n))` for successive step counts.
pub fn convergence_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfilePoint {
    pub dist: usize,
    pub max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorProfile {
    pub points: Vec<ProfilePoint>,
    pub fit: Option<DecayFit>,
    /// Scale `2 v / dE + mu` with `v = 2 s1 / mu`.
    pub xi_bound: f64,
}

/// Largest `|K_pq|` at each doubled distance, with an exponential fit over
/// the tail: distances from the peak onward whose maxima exceed
/// [`PROFILE_FLOOR`].
pub fn generator_locality_profile(
    k: &FlowGenerator,
    sys: &DoubledSystem,
    mu: f64,
) -> Result<GeneratorProfile> {
    let n = k.k.nrows();
    if n != 4 * sys.sites() {
        return Err(Error::DimensionMismatch(format!(
            "generator of size {n} for {} sites",
            sys.sites()
        )));
    }
    let lat = sys.lattice();
    let sites: Vec<_> = (0..n).map(|p| sys.path_index_site(p)).collect();
    let mut maxima: Vec<f64> = Vec::new();
    for p in 0..n {
        for q in 0..n {
            let d = lat.doubled_dist(sites[p], sites[q])?;
            if d >= maxima.len() {
                maxima.resize(d + 1, 0.0);
            }
            maxima[d] = maxima[d].max(k.k[[p, q]].norm());
        }
    }
    let points: Vec<ProfilePoint> = maxima
        .iter()
        .enumerate()
        .map(|(dist, &max_abs)| ProfilePoint { dist, max_abs })
        .collect();
    let peak = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.max_abs.total_cmp(&b.1.max_abs))
        .map_or(0, |(i, _)| i);
    let xs: Vec<f64> = points[peak..].iter().map(|p| p.dist as f64).collect();
    let ys: Vec<f64> = points[peak..].iter().map(|p| p.max_abs).collect();
    let fit = exponential_decay(&xs, &ys, PROFILE_FLOOR).ok();
    let profile = sys.base().locality_profile(mu)?;
    Ok(GeneratorProfile {
        points,
        fit,
        xi_bound: profile.correlation_length(sys.delta_e()),
    })
}
