//! Wannier functions of number-conserving insulators from the projected
//! position operator, and the almost-commuting measurement in two dimensions.
//!
//! `G` below is the single-particle projector onto occupied orbitals (the
//! transpose of the correlator held by [`OccupiedProjector`]).

use ndarray::{Array2, Axis as NdAxis};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LineFit};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::lattice::{Boundary, Lattice};
use crate::linalg::{
    antihermitian_norm, commutator, dagger, hermitian_norm, hermitian_residual, identity, max_abs,
    HermitianEigen, C64,
};
use crate::models::{chern_insulator_model, ChernParams};
use crate::spectral::{occupied_projector, OccupiedProjector};

/// Amplitudes at or below this are excluded from localization fits.
pub const SUPPORT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// Diagonal operator of cell coordinates along one axis.
#[derive(Clone, Debug)]
pub struct PositionOperator {
    axis: Axis,
    values: Vec<f64>,
}

impl PositionOperator {
    /// Rejects periodic axes, where a position operator is not single valued.
    pub fn new(lattice: &Lattice, axis: Axis) -> Result<Self> {
        let k = axis.index();
        if k >= lattice.dimension() {
            return Err(Error::InvalidInput(format!(
                "{axis:?} axis on a {}D lattice",
                lattice.dimension()
            )));
        }
        if lattice.boundary(k) == Boundary::Periodic {
            return Err(Error::UnsupportedModel(format!(
                "position operator along periodic {axis:?} axis"
            )));
        }
        let values = (0..lattice.num_sites())
            .map(|i| lattice.position(i)[k])
            .collect();
        Ok(PositionOperator { axis, values })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn matrix(&self) -> Array2<C64> {
        Array2::from_diag(
            &self
                .values
                .iter()
                .map(|&x| C64::new(x, 0.0))
                .collect::<ndarray::Array1<_>>(),
        )
    }

    fn scale_rows(&self, m: &Array2<C64>) -> Array2<C64> {
        let mut out = m.clone();
        for (mut row, &x) in out.axis_iter_mut(NdAxis(0)).zip(&self.values) {
            row.mapv_inplace(|z| z * x);
        }
        out
    }
}

/// Exponential fit of a function's envelope about its center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalizationFit {
    pub length: f64,
    pub r2: f64,
    pub points: usize,
    /// All support sits in one bin at the center: the length is reported as 0.
    pub degenerate: bool,
}

/// Euclidean distance of every site's cell from `center`.
fn distances(lattice: &Lattice, center: &[f64]) -> Result<Vec<f64>> {
    if center.len() != lattice.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "center has {} coordinates on a {}D lattice",
            center.len(),
            lattice.dimension()
        )));
    }
    Ok((0..lattice.num_sites())
        .map(|i| {
            let p = lattice.position(i);
            center
                .iter()
                .enumerate()
                .map(|(k, c)| (p[k] - c).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// Decay length of `|psi|` about `center`. The envelope is the largest
/// amplitude in each unit distance bin (bins are rounded distances), placed
/// at the distance where that maximum occurs; bins at or below
/// [`SUPPORT_FLOOR`] are dropped.
pub fn localization_length(
    psi: &[C64],
    center: &[f64],
    lattice: &Lattice,
) -> Result<LocalizationFit> {
    if psi.len() != lattice.num_sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for {} sites",
            psi.len(),
            lattice.num_sites()
        )));
    }
    let dist = distances(lattice, center)?;
    let mut bins: Vec<Option<(f64, f64)>> = Vec::new();
    for (z, &d) in psi.iter().zip(&dist) {
        let a = z.norm();
        if a <= SUPPORT_FLOOR {
            continue;
        }
        let b = d.round() as usize;
        if b >= bins.len() {
            bins.resize(b + 1, None);
        }
        match bins[b] {
            Some((_, best)) if best >= a => {}
            _ => bins[b] = Some((d, a)),
        }
    }
    let pts: Vec<(f64, f64)> = bins.into_iter().flatten().collect();
    match pts.len() {
        0 => Err(Error::UndefinedFit(
            "vector has no support above the floor".into(),
        )),
        1 if pts[0].0 < 0.5 => Ok(LocalizationFit {
            length: 0.0,
            r2: 1.0,
            points: 1,
            degenerate: true,
        }),
        1 => Err(Error::UndefinedFit(
            "single support bin away from the center".into(),
        )),
        _ => {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
            let fit = linear_fit(&xs, &ys)?;
            let length = if fit.slope < 0.0 {
                -1.0 / fit.slope
            } else {
                f64::INFINITY
            };
            Ok(LocalizationFit {
                length,
                r2: fit.r2,
                points: fit.points,
                degenerate: false,
            })
        }
    }
}

/// Orthonormal basis of the range of a Hermitian projector, as columns.
fn range_basis(g: &Array2<C64>) -> Result<Array2<C64>> {
    let eig = HermitianEigen::new(&g.view())?;
    let cols: Vec<usize> = (0..eig.dim()).filter(|&k| eig.values[k] > 0.5).collect();
    Ok(eig.vectors.select(NdAxis(1), &cols))
}

#[derive(Clone, Debug, Serialize)]
pub struct WannierFunction {
    pub index: usize,
    pub center: f64,
    pub fit: LocalizationFit,
}

#[derive(Clone, Debug)]
pub struct WannierBasis {
    /// Orthonormal columns spanning the occupied space.
    pub functions: Array2<C64>,
    pub records: Vec<WannierFunction>,
    /// Hermiticity residual of the reduced `GXG`.
    pub gxg_hermitian_residual: f64,
}

impl WannierBasis {
    pub fn centers(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.center).collect()
    }

    pub fn max_length(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.fit.length)
            .fold(0.0, f64::max)
    }

    pub fn min_r2(&self) -> f64 {
        self.records
            .iter()
            .filter(|r| !r.fit.degenerate)
            .map(|r| r.fit.r2)
            .fold(1.0, f64::min)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.functions.ncols();
        max_abs(&(dagger(&self.functions.view()).dot(&self.functions) - identity(n)).view())
    }

    /// `max |sum_n |phi_n><phi_n| - G|`.
    pub fn reconstruction_residual(&self, g: &Array2<C64>) -> f64 {
        let recon = self.functions.dot(&dagger(&self.functions.view()));
        max_abs(&(recon - g).view())
    }

    /// `max |(1 - G) phi_n|`.
    pub fn range_residual(&self, g: &Array2<C64>) -> f64 {
        max_abs(&(&self.functions - &g.dot(&self.functions)).view())
    }
}

/// Eigenvectors of `GXG` within the range of `G` on an open chain.
pub fn gxg_wannier_1d(
    g: &OccupiedProjector,
    x: &PositionOperator,
    lattice: &Lattice,
) -> Result<WannierBasis> {
    if lattice.dimension() != 1 {
        return Err(Error::UnsupportedModel(format!(
            "one-dimensional Wannier construction on a {}D lattice",
            lattice.dimension()
        )));
    }
    if x.values.len() != g.size() || lattice.num_sites() != g.size() {
        return Err(Error::DimensionMismatch(format!(
            "projector of size {}, position operator of size {}",
            g.size(),
            x.values.len()
        )));
    }
    let q = g.single_particle();
    let v = range_basis(&q)?;
    if v.ncols() == 0 {
        return Err(Error::InvalidInput("occupied space is empty".into()));
    }
    let reduced = dagger(&v.view()).dot(&x.scale_rows(&v));
    let residual = hermitian_residual(&reduced.view());
    let eig = HermitianEigen::new(&reduced.view())?;
    let functions = v.dot(&eig.vectors);
    let records = (0..functions.ncols())
        .map(|n| {
            let psi: Vec<C64> = functions.column(n).to_vec();
            let center = eig.values[n];
            Ok(WannierFunction {
                index: n,
                center,
                fit: localization_length(&psi, &[center], lattice)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WannierBasis {
        functions,
        records,
        gxg_hermitian_residual: residual,
    })
}

/// Norms of the projected position operators and their commutator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutatorRecord {
    pub comm_norm: f64,
    pub gxg_norm: f64,
    pub gyg_norm: f64,
    /// `comm_norm / gxg_norm`.
    pub ratio: f64,
}

/// Spectral norms of `[GXG, GYG]`, `GXG` and `GYG`.
pub fn almost_commuting_report(
    g: &OccupiedProjector,
    x: &PositionOperator,
    y: &PositionOperator,
) -> Result<CommutatorRecord> {
    if x.values.len() != g.size() || y.values.len() != g.size() {
        return Err(Error::DimensionMismatch(
            "position operators do not match the projector".into(),
        ));
    }
    let q = g.single_particle();
    let gxg = q.dot(&x.scale_rows(&q));
    let gyg = q.dot(&y.scale_rows(&q));
    let comm_norm = antihermitian_norm(&commutator(&gxg.view(), &gyg.view()).view())?;
    let gxg_norm = hermitian_norm(&gxg.view())?;
    let gyg_norm = hermitian_norm(&gyg.view())?;
    let ratio = if gxg_norm > 0.0 {
        comm_norm / gxg_norm
    } else {
        0.0
    };
    Ok(CommutatorRecord {
        comm_norm,
        gxg_norm,
        gyg_norm,
        ratio,
    })
}

/// Builds `G` from a number-conserving 2D model and measures it.
pub fn commutator_record(h: &QuadraticHamiltonian) -> Result<CommutatorRecord> {
    if !h.is_number_conserving() {
        return Err(Error::UnsupportedModel(
            "projected position operators need a model without pairing".into(),
        ));
    }
    let lat = h.lattice();
    let g = occupied_projector(h)?;
    almost_commuting_report(
        &g,
        &PositionOperator::new(lat, Axis::X)?,
        &PositionOperator::new(lat, Axis::Y)?,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorScan {
    pub sizes: Vec<usize>,
    pub records: Vec<CommutatorRecord>,
    pub comm_fit: LineFit,
    pub gxg_fit: LineFit,
}

/// Open `L x L` Chern-model samples; sizes are evaluated in parallel.
pub fn commutator_scan(sizes: &[usize], hopping: f64, mass: f64) -> Result<CommutatorScan> {
    let records = sizes
        .par_iter()
        .map(|&l| {
            commutator_record(&chern_insulator_model(&ChernParams {
                lx: l,
                ly: l,
                hopping,
                mass,
                periodic: false,
            })?)
        })
        .collect::<Result<Vec<_>>>()?;
    let ls: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    let comm: Vec<f64> = records.iter().map(|r| r.comm_norm).collect();
    let gxg: Vec<f64> = records.iter().map(|r| r.gxg_norm).collect();
    Ok(CommutatorScan {
        sizes: sizes.to_vec(),
        comm_fit: linear_fit(&ls, &comm)?,
        gxg_fit: linear_fit(&ls, &gxg)?,
        records,
    })
}
