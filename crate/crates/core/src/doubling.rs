//! The doubled system and its gapped interpolation to an on-site product
//! state.
//!
//! Copy `up` carries the base model `H`, copy `down` its time-reversed
//! partner. The path matrix
//!
//! ```text
//! C_s = [[ a A, b 1 ], [ b 1, -a A ]],   a = sqrt(1 - s^2),  b = s dE,
//! ```
//!
//! acts on `Phi = (Psi_up, Psi_up^dag, -Psi_down^dag, Psi_down)` (blocks of
//! `V`), with `H_s = 1/2 Phi^dag C_s Phi`. The sign on `Psi_down^dag` makes
//! the coupling block a genuine on-site pairing,
//! `-s dE sum_i (Psi_{i,up}^dag Psi_{i,down}^dag + h.c.)`, whose `s = 1`
//! ground state is `prod_i (1 + Psi_{i,up}^dag Psi_{i,down}^dag)/sqrt 2 |0>`.
//! In this reading the down copy at `s = 0` is `H^*` with its pairing
//! negated, which is `H^*` up to the on-site phase `Psi_down -> i Psi_down`.
//!
//! The standard two-copy BdG matrix acts on
//! `x = (Psi_up, Psi_down, Psi_up^dag, Psi_down^dag)` and equals `T C_s T^dag`
//! for the signed permutation `x = T Phi`.

use ndarray::{s, Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::invariants::{chern_marker, majorana_number, ProjectorBlocks, SectorPartition};
use crate::lattice::{DoubledSite, Lattice};
use crate::linalg::{c, eigvalsh, HermitianEigen, C64};
use crate::spectral::{ground_covariance, Basis, BdgMatrix, MajoranaCovariance, GAP_FLOOR_FACTOR};

/// Relative tolerance of the constant-gap check.
pub const GAP_TOLERANCE: f64 = 1e-9;

/// Absolute slack of the locality check.
pub const LOCALITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DoubledSystem {
    base: QuadraticHamiltonian,
    a: BdgMatrix,
    eigen: HermitianEigen,
    delta_e: f64,
}

impl DoubledSystem {
    /// Fails with a gapless error when the base gap is not above
    /// `1e-8 * ||A||`.
    pub fn new(base: QuadraticHamiltonian) -> Result<Self> {
        let a = base.assemble_bdg()?;
        let eigen = if base.is_number_conserving() {
            eigen_without_pairing(&base)?
        } else {
            a.eigen()?
        };
        let delta_e = eigen.min_abs();
        let floor = GAP_FLOOR_FACTOR * eigen.max_abs();
        if !(delta_e > floor) {
            return Err(Error::Gapless {
                gap: delta_e,
                floor,
            });
        }
        Ok(DoubledSystem {
            base,
            a,
            eigen,
            delta_e,
        })
    }

    pub fn base(&self) -> &QuadraticHamiltonian {
        &self.base
    }

    pub fn lattice(&self) -> &Lattice {
        self.base.lattice()
    }

    /// Hamiltonian of the down copy, `H^*` with negated pairing.
    pub fn down_copy(&self) -> QuadraticHamiltonian {
        self.base.conjugate().with_pairing_negated()
    }

    pub fn bdg(&self) -> &BdgMatrix {
        &self.a
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// Base gap `dE`, the smallest `|lambda|` of `A`.
    pub fn delta_e(&self) -> f64 {
        self.delta_e
    }

    pub fn sites(&self) -> usize {
        self.base.num_sites()
    }

    fn coefficients(&self, s: f64) -> Result<(f64, f64)> {
        check_parameter(s)?;
        Ok(((1.0 - s * s).max(0.0).sqrt(), s * self.delta_e))
    }

    /// The literal `4V x 4V` matrix `C_s`.
    pub fn path_matrix(&self, s: f64) -> Result<BdgMatrix> {
        let (a, b) = self.coefficients(s)?;
        BdgMatrix::new(
            path_from_coefficients(self.a.data(), a, b),
            Basis::DoubledPath,
        )
    }

    /// `C_s` rewritten on `(Psi_up, Psi_down, Psi_up^dag, Psi_down^dag)`.
    pub fn standard_bdg(&self, s: f64) -> Result<BdgMatrix> {
        to_standard_basis(&self.path_matrix(s)?)
    }

    /// Ground-state covariance of `H_s` over the `2V` doubled modes (all up
    /// sites, then all down sites).
    pub fn ground_covariance_at(&self, s: f64) -> Result<MajoranaCovariance> {
        ground_covariance(&self.standard_bdg(s)?)
    }

    /// Sorted `{+-sqrt((1 - s^2) lambda^2 + s^2 dE^2)}` over the spectrum of `A`.
    pub fn predicted_spectrum(&self, s: f64) -> Result<Vec<f64>> {
        let (a, b) = self.coefficients(s)?;
        let mut out: Vec<f64> = self
            .eigen
            .values
            .iter()
            .flat_map(|&l| {
                let e = (a * a * l * l + b * b).sqrt();
                [e, -e]
            })
            .collect();
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Spectral projector `(1 - sgn C)/2` in the standard ordering, with
    /// blocks evaluated from the spectrum of `A` without forming the
    /// `4V x 4V` matrix.
    pub fn ground_projector(&self, s: f64) -> Result<PathProjector<'_>> {
        let (a, b) = self.coefficients(s)?;
        Ok(PathProjector { system: self, a, b })
    }

    /// Base site of each of the `4V` modes of the standard ordering.
    pub fn standard_mode_sites(&self) -> Vec<usize> {
        let v = self.sites();
        (0..4 * v).map(|p| p % v).collect()
    }

    /// Doubled site carrying entry `idx` of the `Phi` ordering.
    pub fn path_index_site(&self, idx: usize) -> DoubledSite {
        let v = self.sites();
        match idx / v {
            0 | 1 => DoubledSite::up(idx % v),
            _ => DoubledSite::down(idx % v),
        }
    }
}

fn check_parameter(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "path parameter s = {s} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `[[a A, b 1], [b 1, -a A]]`.
pub fn path_from_coefficients(a_mat: &Array2<C64>, a: f64, b: f64) -> Array2<C64> {
    let n = a_mat.nrows();
    let mut out = Array2::zeros((2 * n, 2 * n));
    out.slice_mut(s![..n, ..n]).assign(&a_mat.mapv(|z| z * a));
    out.slice_mut(s![n.., n..]).assign(&a_mat.mapv(|z| -z * a));
    for i in 0..n {
        out[[i, n + i]] = c(b);
        out[[n + i, i]] = c(b);
    }
    out
}

/// `A = H (+) (-H^*)` diagonalized through `H` alone: eigenvectors `(u, 0)`
/// with `lambda` and `(0, u^*)` with `-lambda`.
fn eigen_without_pairing(h: &QuadraticHamiltonian) -> Result<HermitianEigen> {
    let he = HermitianEigen::new(&h.hop().view())?;
    let v = he.dim();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(2 * v);
    for k in 0..v {
        order.push((he.values[k], k));
        order.push((-he.values[k], v + k));
    }
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut values = Array1::zeros(2 * v);
    let mut vectors = Array2::zeros((2 * v, 2 * v));
    for (col, &(value, src)) in order.iter().enumerate() {
        values[col] = value;
        if src < v {
            vectors
                .slice_mut(s![..v, col])
                .assign(&he.vectors.column(src));
        } else {
            vectors
                .slice_mut(s![v.., col])
                .assign(&he.vectors.column(src - v).mapv(|z| z.conj()));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Position in `Phi` and sign of each standard-ordering entry:
/// `x = (Phi_0, Phi_3, Phi_1, -Phi_2)` in blocks of `V`.
fn standard_to_path(p: usize, v: usize) -> (usize, f64) {
    let (block, i) = (p / v, p % v);
    match block {
        0 => (i, 1.0),
        1 => (3 * v + i, 1.0),
        2 => (v + i, 1.0),
        _ => (2 * v + i, -1.0),
    }
}

/// `T C T^dag` for a doubled-path matrix.
pub fn to_standard_basis(cmat: &BdgMatrix) -> Result<BdgMatrix> {
    if cmat.basis() != Basis::DoubledPath {
        return Err(Error::InvalidInput("expected a doubled-path matrix".into()));
    }
    let n = cmat.size();
    if !n.is_multiple_of(4) {
        return Err(Error::InvalidInput(format!(
            "doubled-path matrix of size {n}"
        )));
    }
    let v = n / 4;
    let src = cmat.data();
    let out = Array2::from_shape_fn((n, n), |(p, q)| {
        let (pp, sp) = standard_to_path(p, v);
        let (qq, sq) = standard_to_path(q, v);
        src[[pp, qq]] * (sp * sq)
    });
    BdgMatrix::new(out, Basis::Dirac)
}

/// Ground-state projector of `C_s` in the standard ordering.
///
/// With `g = (a^2 A^2 + b^2)^{-1/2}`, `sgn C_s = [[a A g, b g], [b g, -a A g]]`
/// in the `Phi` ordering, so every block follows from the eigenpairs of `A`.
pub struct PathProjector<'a> {
    system: &'a DoubledSystem,
    a: f64,
    b: f64,
}

impl PathProjector<'_> {
    /// Dense `4V x 4V` projector, for small systems and cross-checks.
    pub fn dense(&self) -> Result<Array2<C64>> {
        let all: Vec<usize> = (0..self.size()).collect();
        self.block(&all, &all)
    }
}

impl ProjectorBlocks for PathProjector<'_> {
    fn size(&self) -> usize {
        4 * self.system.sites()
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> Result<Array2<C64>> {
        let v = self.system.sites();
        let n2 = 2 * v;
        if rows.iter().chain(cols).any(|&p| p >= 4 * v) {
            return Err(Error::InvalidInput("projector index out of range".into()));
        }
        let (a, b) = (self.a, self.b);
        let map = |p: usize| {
            let (phi, sign) = standard_to_path(p, v);
            (phi / n2, phi % n2, sign)
        };
        let rmap: Vec<(usize, usize, f64)> = rows.iter().map(|&p| map(p)).collect();
        let cmap: Vec<(usize, usize, f64)> = cols.iter().map(|&p| map(p)).collect();
        let rk: Vec<usize> = rmap.iter().map(|m| m.1).collect();
        let ck: Vec<usize> = cmap.iter().map(|m| m.1).collect();
        let eig = &self.system.eigen;
        let diag = eig.apply_block(|l| c(a * l / (a * a * l * l + b * b).sqrt()), &rk, &ck);
        let off = eig.apply_block(|l| c(b / (a * a * l * l + b * b).sqrt()), &rk, &ck);
        let mut out = Array2::zeros((rows.len(), cols.len()));
        for (i, &(hr, _, sr)) in rmap.iter().enumerate() {
            for (j, &(hc, _, sc)) in cmap.iter().enumerate() {
                let sign_entry = match (hr, hc) {
                    (0, 0) => diag[[i, j]],
                    (1, 1) => -diag[[i, j]],
                    _ => off[[i, j]],
                } * (sr * sc);
                let delta = if rows[i] == cols[j] { 1.0 } else { 0.0 };
                out[[i, j]] = (c(delta) - sign_entry) * 0.5;
            }
        }
        Ok(out)
    }
}

/// Sorted grid of path parameters in `[0, 1]` including both endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationPath {
    grid: Vec<f64>,
}

impl InterpolationPath {
    pub fn new(grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidParameter(
                "a path needs at least two points".into(),
            ));
        }
        if grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::InvalidParameter(
                "path parameters must lie in [0, 1]".into(),
            ));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "path grid must be strictly increasing".into(),
            ));
        }
        if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
            return Err(Error::InvalidParameter(
                "path grid must contain 0 and 1".into(),
            ));
        }
        Ok(InterpolationPath { grid })
    }

    /// `points` equally spaced values from 0 to 1.
    pub fn uniform(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter(
                "a path needs at least two points".into(),
            ));
        }
        let last = (points - 1) as f64;
        Self::new(
            (0..points)
                .map(|k| {
                    if k + 1 == points {
                        1.0
                    } else {
                        k as f64 / last
                    }
                })
                .collect(),
        )
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapRecord {
    pub s: f64,
    pub gap: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub delta_e: f64,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub records: Vec<GapRecord>,
}

/// Gap of `C_s` at each grid point against `dE`; passes when every
/// deviation is below `1e-9 dE`.
pub fn verify_gap_along_path(sys: &DoubledSystem, path: &InterpolationPath) -> Result<GapReport> {
    let mut records = Vec::with_capacity(path.grid.len());
    for &s in &path.grid {
        let values = eigvalsh(&sys.path_matrix(s)?.data().view())?;
        let gap = values.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
        records.push(GapRecord {
            s,
            gap,
            deviation: (gap - sys.delta_e).abs(),
        });
    }
    let max_deviation = records.iter().fold(0.0f64, |acc, r| acc.max(r.deviation));
    let tolerance = GAP_TOLERANCE * sys.delta_e;
    Ok(GapReport {
        delta_e: sys.delta_e,
        tolerance,
        max_deviation,
        passed: max_deviation < tolerance,
        records,
    })
}

/// `max_i 2 (sqrt(1 - s^2) R_i + s^2 dE)` for per-site locality sums `R_i`.
pub fn locality_expression(row_sums: &[f64], delta_e: f64, s: f64) -> f64 {
    let a = (1.0 - s * s).max(0.0).sqrt();
    row_sums
        .iter()
        .map(|r| 2.0 * (a * r + s * s * delta_e))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocalityRecord {
    pub s: f64,
    pub expression: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    pub mu: f64,
    pub s1: f64,
    pub delta_e: f64,
    /// `dE <= s1`, the premise of the bound.
    pub gap_below_s1: bool,
    pub max_expression: f64,
    pub passed: bool,
    pub records: Vec<LocalityRecord>,
}

/// Evaluates the locality expression along the path; passes when it never
/// exceeds its `s = 0` value `s1` by more than `1e-12`.
pub fn verify_locality_along_path(
    sys: &DoubledSystem,
    path: &InterpolationPath,
    mu: f64,
) -> Result<LocalityReport> {
    let rows = sys.base.locality_row_sums(mu)?;
    let s1 = locality_expression(&rows, sys.delta_e, 0.0);
    let records: Vec<LocalityRecord> = path
        .grid
        .iter()
        .map(|&s| LocalityRecord {
            s,
            expression: locality_expression(&rows, sys.delta_e, s),
        })
        .collect();
    let max_expression = records.iter().fold(0.0f64, |acc, r| acc.max(r.expression));
    Ok(LocalityReport {
        mu,
        s1,
        delta_e: sys.delta_e,
        gap_below_s1: sys.delta_e <= s1,
        max_expression,
        passed: max_expression <= s1 + LOCALITY_SLACK,
        records,
    })
}

/// Covariance of `prod_i (1 + Psi_{i,up}^dag Psi_{i,down}^dag)/sqrt 2 |0>` over
/// `2V` modes ordered up sites then down sites.
pub fn product_ground_state_covariance(sites: usize) -> Result<MajoranaCovariance> {
    if sites == 0 {
        return Err(Error::InvalidSize(
            "product state needs at least one site".into(),
        ));
    }
    let n = 4 * sites;
    let mut b = Array2::zeros((n, n));
    for i in 0..sites {
        let (p, q) = (i, sites + i);
        for (r, cc, value) in [
            (2 * p, 2 * q + 1, -1.0),
            (2 * p + 1, 2 * q, -1.0),
            (2 * q + 1, 2 * p, 1.0),
            (2 * q, 2 * p + 1, 1.0),
        ] {
            b[[r, cc]] = value;
        }
    }
    MajoranaCovariance::new(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanInvariant {
    Majorana,
    Chern,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InvariantRecord {
    pub s: f64,
    pub majorana_number: Option<i8>,
    pub nu_total: Option<f64>,
    pub nu_imag_residual: Option<f64>,
}

/// Majorana number of the doubled ground state, or the sector-sum marker of
/// the doubled spectral projector, at every grid point.
pub fn invariant_scan(
    sys: &DoubledSystem,
    path: &InterpolationPath,
    which: ScanInvariant,
) -> Result<Vec<InvariantRecord>> {
    let partition = match which {
        ScanInvariant::Chern => Some(SectorPartition::centered(sys.lattice())?),
        ScanInvariant::Majorana => None,
    };
    let mode_sites = sys.standard_mode_sites();
    path.grid
        .iter()
        .map(|&s| {
            let mut record = InvariantRecord {
                s,
                majorana_number: None,
                nu_total: None,
                nu_imag_residual: None,
            };
            match which {
                ScanInvariant::Majorana => {
                    record.majorana_number = Some(majorana_number(&sys.ground_covariance_at(s)?)?);
                }
                ScanInvariant::Chern => {
                    let proj = sys.ground_projector(s)?;
                    let nu =
                        chern_marker(&proj, &mode_sites, partition.as_ref().expect("partition"))?;
                    record.nu_total = Some(nu.nu);
                    record.nu_imag_residual = Some(nu.imag_residual);
                }
            }
            Ok(record)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::models::{chern_insulator_model, kitaev_chain, ChernParams, KitaevParams};
    use crate::oracles::two_mode;
    use crate::spectral::{negative_projector, occupied_projector};

    fn kitaev(v: usize) -> DoubledSystem {
        DoubledSystem::new(kitaev_chain(&KitaevParams::new(v, 1.0, 0.6, 0.5, true)).unwrap())
            .unwrap()
    }

    #[test]
    fn endpoints_of_path_matrix() {
        let sys = kitaev(6);
        let n = 2 * sys.sites();
        let c0 = sys.path_matrix(0.0).unwrap();
        assert_eq!(c0.data().slice(s![..n, ..n]), sys.bdg().data());
        assert!(max_abs(&c0.data().slice(s![..n, n..])) == 0.0);
        let c1 = sys.path_matrix(1.0).unwrap();
        let e = eigvalsh(&c1.data().view()).unwrap();
        assert!(e.iter().all(|x| (x.abs() - sys.delta_e()).abs() < 1e-12));
        assert!(sys.path_matrix(1.2).is_err());
        assert!(sys.path_matrix(-0.1).is_err());
    }

    #[test]
    fn spectrum_follows_eigenvalue_map() {
        let sys = kitaev(10);
        for s in [0.0, 0.3, 0.77, 1.0] {
            let got = eigvalsh(&sys.path_matrix(s).unwrap().data().view()).unwrap();
            let want = sys.predicted_spectrum(s).unwrap();
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gap_constant_along_path() {
        let report =
            verify_gap_along_path(&kitaev(12), &InterpolationPath::uniform(21).unwrap()).unwrap();
        assert!(report.passed, "max deviation {}", report.max_deviation);
    }

    #[test]
    fn standard_basis_is_a_valid_bdg_matrix() {
        let sys = kitaev(5);
        let v = sys.sites();
        for s in [0.0, 0.4, 1.0] {
            let a = sys.standard_bdg(s).unwrap();
            let d = a.data();
            let n = 2 * v;
            let h = d.slice(s![..n, ..n]);
            let pair = d.slice(s![..n, n..]);
            let lower = d.slice(s![n.., n..]);
            assert!(max_abs(&(&lower + &h.mapv(|z| z.conj())).view()) < 1e-14);
            assert!(max_abs(&(&pair + &pair.t()).view()) < 1e-14);
        }
        // At s = 0 the copies decouple into H and its time-reversed partner.
        let a0 = sys.standard_bdg(0.0).unwrap();
        let down = sys.down_copy().assemble_bdg().unwrap();
        let d = a0.data();
        for i in 0..v {
            for j in 0..v {
                assert_eq!(d[[v + i, v + j]], down.data()[[i, j]]);
                assert_eq!(d[[v + i, 3 * v + j]], down.data()[[i, v + j]]);
                assert_eq!(d[[i, j]], sys.bdg().data()[[i, j]]);
            }
        }
    }

    #[test]
    fn product_endpoint_matches_two_mode_oracle() {
        for v in [1, 3, 8] {
            let analytic = product_ground_state_covariance(v).unwrap();
            let oracle = two_mode::product_covariance(v).unwrap();
            assert!(max_abs_diff(analytic.data(), &oracle) < 1e-14);
            assert!(analytic.purity_residual() < 1e-14);
            for m in 0..2 * v {
                assert!((analytic.occupation(m) - 0.5).abs() < 1e-15);
            }
        }
        let sys = kitaev(8);
        let b1 = sys.ground_covariance_at(1.0).unwrap();
        let exact = product_ground_state_covariance(8).unwrap();
        assert!(max_abs_diff(b1.data(), exact.data()) < 1e-10);
    }

    fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
    }

    #[test]
    fn covariance_at_zero_is_direct_sum() {
        let sys = kitaev(6);
        let b0 = sys.ground_covariance_at(0.0).unwrap();
        let up = ground_covariance(sys.bdg()).unwrap();
        let down = ground_covariance(&sys.down_copy().assemble_bdg().unwrap()).unwrap();
        assert!(max_abs_diff(b0.data(), up.direct_sum(&down).data()) < 1e-10);
    }

    #[test]
    fn covariance_continuous_in_s() {
        let sys = kitaev(8);
        let mut prev = f64::INFINITY;
        for h in [1e-2, 1e-3, 1e-4] {
            let d = max_abs_diff(
                sys.ground_covariance_at(0.5).unwrap().data(),
                sys.ground_covariance_at(0.5 + h).unwrap().data(),
            );
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn doubled_majorana_number_is_even() {
        let base = kitaev_chain(&KitaevParams::new(16, 1.0, 1.0, 0.0, true)).unwrap();
        let sys = DoubledSystem::new(base).unwrap();
        let path = InterpolationPath::uniform(11).unwrap();
        let records = invariant_scan(&sys, &path, ScanInvariant::Majorana).unwrap();
        assert!(records.iter().all(|r| r.majorana_number == Some(1)));
        let single = majorana_number(&ground_covariance(sys.bdg()).unwrap()).unwrap();
        let trivial =
            DoubledSystem::new(kitaev_chain(&KitaevParams::new(16, 0.1, 0.1, 2.0, true)).unwrap())
                .unwrap();
        assert_eq!(
            single,
            -majorana_number(&ground_covariance(trivial.bdg()).unwrap()).unwrap()
        );
        let product = product_ground_state_covariance(16).unwrap();
        assert_eq!(majorana_number(&product).unwrap(), 1);
    }

    #[test]
    fn structured_projector_matches_dense() {
        let sys = kitaev(5);
        for s in [0.0, 0.35, 1.0] {
            let dense =
                negative_projector(&sys.standard_bdg(s).unwrap().eigen().unwrap(), None).unwrap();
            let fast = sys.ground_projector(s).unwrap().dense().unwrap();
            assert!(max_abs(&(&dense - &fast).view()) < 1e-10);
        }
        let chern = chern_insulator_model(&ChernParams {
            lx: 3,
            ly: 3,
            hopping: 1.0,
            mass: 1.0,
            periodic: true,
        })
        .unwrap();
        let sys = DoubledSystem::new(chern).unwrap();
        for s in [0.0, 0.6] {
            let dense =
                negative_projector(&sys.standard_bdg(s).unwrap().eigen().unwrap(), None).unwrap();
            let fast = sys.ground_projector(s).unwrap().dense().unwrap();
            assert!(max_abs(&(&dense - &fast).view()) < 1e-10);
        }
    }

    #[test]
    fn chern_marker_cancels_under_doubling() {
        let p = ChernParams {
            lx: 12,
            ly: 12,
            hopping: 1.0,
            mass: 1.0,
            periodic: true,
        };
        let base = chern_insulator_model(&p).unwrap();
        let single = crate::invariants::real_space_chern(
            &occupied_projector(&base).unwrap(),
            &SectorPartition::centered(base.lattice()).unwrap(),
        )
        .unwrap();
        assert!(single.nu.abs() > 0.5);
        let sys = DoubledSystem::new(base).unwrap();
        let path = InterpolationPath::new(vec![0.0, 0.5, 1.0]).unwrap();
        for r in invariant_scan(&sys, &path, ScanInvariant::Chern).unwrap() {
            assert!(
                r.nu_total.unwrap().abs() < 0.05,
                "s={} nu={:?}",
                r.s,
                r.nu_total
            );
        }
    }

    #[test]
    fn locality_expression_bounded_for_kitaev() {
        let base = kitaev_chain(&KitaevParams::new(16, 1.0, 1.0, 0.5, true)).unwrap();
        let sys = DoubledSystem::new(base).unwrap();
        let report =
            verify_locality_along_path(&sys, &InterpolationPath::uniform(101).unwrap(), 2f64.ln())
                .unwrap();
        assert!(report.gap_below_s1);
        assert!(report.passed);
        assert_eq!(
            report.records[0].expression,
            sys.base().locality_norm(2f64.ln()).unwrap()
        );
        assert!((report.records.last().unwrap().expression - 2.0 * sys.delta_e()).abs() < 1e-12);
    }

    #[test]
    fn path_grid_validation() {
        assert!(InterpolationPath::new(vec![0.0, 0.5]).is_err());
        assert!(InterpolationPath::new(vec![0.0, 0.7, 0.5, 1.0]).is_err());
        assert!(InterpolationPath::new(vec![0.0, 1.5]).is_err());
        let p = InterpolationPath::uniform(101).unwrap();
        assert_eq!(p.grid().len(), 101);
        assert_eq!(p.grid()[100], 1.0);
    }

    #[test]
    fn gapless_base_rejected() {
        let base = kitaev_chain(&KitaevParams::new(8, 1.0, 0.0, -2.0, true)).unwrap();
        assert!(matches!(
            DoubledSystem::new(base),
            Err(Error::Gapless { .. })
        ));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn random_spectrum_follows_eigenvalue_map(seed in 0u64..100_000, sites in 2usize..7, s in 0.0f64..=1.0) {
            use crate::models::{random_model, RandomParams};
            let sys = DoubledSystem::new(random_model(&RandomParams { sites, scale: 1.0, seed }).unwrap()).unwrap();
            let got = eigvalsh(&sys.path_matrix(s).unwrap().data().view()).unwrap();
            let want = sys.predicted_spectrum(s).unwrap();
            for (g, w) in got.iter().zip(&want) {
                proptest::prop_assert!((g - w).abs() < 1e-9);
            }
            let gap = got.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
            proptest::prop_assert!((gap - sys.delta_e()).abs() < 1e-9 * sys.delta_e().max(1.0));
        }
    }
}
