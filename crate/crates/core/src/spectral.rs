//! Dense spectral computations on BdG matrices: the gap, the matrix sign
//! function, the Majorana covariance of the Gaussian ground state and the
//! occupied-state projector of number-conserving models.
//!
//! Conventions. Dirac-basis matrices act on `(Psi_1..Psi_V, Psi_1^dag..Psi_V^dag)`
//! with `H = 1/2 (Psi, Psi^dag)^dag A (Psi, Psi^dag)`. Majorana operators are
//! interleaved per site, `c_{2j} = Psi_j + Psi_j^dag` and
//! `c_{2j+1} = (Psi_j - Psi_j^dag)/i` (zero-based), so that with the
//! unitary-up-to-scale `W` mapping `(Psi, Psi^dag)` to `c` the Majorana-basis
//! matrix is `M = W A W^dag / 2` and `H = 1/4 c^T M c`. The ground state
//! obeys `<c_j c_k> = delta_jk - i B_jk` with `B = i sgn(M)`; this sign is fixed
//! by comparison against Fock-space exact diagonalization (see
//! [`crate::oracles::fock`]). It is the same as `B = -i sgn(M^*)`.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::linalg::{
    antisymmetry_residual_real, c, dagger, ensure_square, hermitian_part, hermitian_residual,
    max_abs, max_abs_real, scaled_tol, trace, HermitianEigen, C64, I,
};

/// Relative factor for the default gap floor, `1e-8 * ||A||`.
pub const GAP_FLOOR_FACTOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Dirac,
    Majorana,
    /// Two-copy ordering `(Psi_up, Psi_up^dag, -Psi_down^dag, Psi_down)` of
    /// the interpolation path; see [`crate::doubling`].
    DoubledPath,
}

/// Hermitian single-particle matrix of a quadratic fermion Hamiltonian.
#[derive(Clone, Debug)]
pub struct BdgMatrix {
    data: Array2<C64>,
    basis: Basis,
}

impl BdgMatrix {
    pub fn new(data: Array2<C64>, basis: Basis) -> Result<Self> {
        let n = ensure_square(&data.view(), "BdG matrix")?;
        if n % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "BdG matrix has odd dimension {n}"
            )));
        }
        let res = hermitian_residual(&data.view());
        if res > scaled_tol(&data.view(), 1e-10) {
            return Err(Error::InvalidInput(format!(
                "BdG matrix is not Hermitian (residual {res:.3e})"
            )));
        }
        let data = hermitian_part(&data.view());
        Ok(BdgMatrix { data, basis })
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    pub fn modes(&self) -> usize {
        self.size() / 2
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        HermitianEigen::new(&self.data.view())
    }

    pub fn default_gap_floor(&self) -> Result<f64> {
        Ok(GAP_FLOOR_FACTOR * self.eigen()?.max_abs())
    }
}

/// Real antisymmetric Majorana covariance `B`, `<c_j c_k> = delta_jk - i B_jk`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaCovariance {
    data: Array2<f64>,
}

impl MajoranaCovariance {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (r, cols) = data.dim();
        if r != cols || r % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "covariance must be square with even size, got {r}x{cols}"
            )));
        }
        let res = antisymmetry_residual_real(&data.view());
        if res > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "covariance is not antisymmetric (residual {res:.3e})"
            )));
        }
        let data = (&data - &data.t()) * 0.5;
        Ok(MajoranaCovariance { data })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    pub fn modes(&self) -> usize {
        self.size() / 2
    }

    /// `max |B^2 + 1|`; zero for a pure Gaussian state.
    pub fn purity_residual(&self) -> f64 {
        let mut sq = self.data.dot(&self.data);
        sq.diag_mut().mapv_inplace(|x| x + 1.0);
        max_abs_real(&sq.view())
    }

    /// `<Psi_j^dag Psi_j> = (1 + B_{2j,2j+1}) / 2`.
    pub fn occupation(&self, site: usize) -> f64 {
        0.5 * (1.0 + self.data[[2 * site, 2 * site + 1]])
    }

    /// Direct sum `self (+) other`, with `self` first.
    pub fn direct_sum(&self, other: &MajoranaCovariance) -> MajoranaCovariance {
        let (n, m) = (self.size(), other.size());
        let mut out = Array2::zeros((n + m, n + m));
        out.slice_mut(ndarray::s![..n, ..n]).assign(&self.data);
        out.slice_mut(ndarray::s![n.., n..]).assign(&other.data);
        MajoranaCovariance { data: out }
    }
}

/// Occupied-state correlator `P_jk = <Psi_j^dag Psi_k>` of a number-conserving
/// ground state.
#[derive(Clone, Debug)]
pub struct OccupiedProjector {
    data: Array2<C64>,
}

impl OccupiedProjector {
    /// Wraps a correlator matrix after checking it is a Hermitian projector.
    pub fn new(data: Array2<C64>) -> Result<Self> {
        ensure_square(&data.view(), "projector")?;
        let herm = hermitian_residual(&data.view());
        if herm > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "projector not Hermitian ({herm:.3e})"
            )));
        }
        let p = OccupiedProjector {
            data: hermitian_part(&data.view()),
        };
        let idem = p.idempotency_residual();
        if idem > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "P^2 != P (residual {idem:.3e})"
            )));
        }
        Ok(p)
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    /// The single-particle projector onto occupied orbitals, `Q = P^T`.
    pub fn single_particle(&self) -> Array2<C64> {
        self.data.t().to_owned()
    }

    pub fn idempotency_residual(&self) -> f64 {
        max_abs(&(self.data.dot(&self.data) - &self.data).view())
    }

    pub fn trace(&self) -> f64 {
        trace(&self.data.view()).re
    }
}

pub fn hermitian_spectrum(m: &ArrayView2<C64>) -> Result<HermitianEigen> {
    HermitianEigen::new(m)
}

/// Smallest absolute eigenvalue of `A`.
pub fn spectral_gap(a: &BdgMatrix) -> Result<f64> {
    Ok(a.eigen()?.min_abs())
}

/// `U sgn(Lambda) U^dagger` of a Hermitian matrix whose spectrum stays at
/// least `gap_floor` away from zero.
pub fn sign_of_hermitian(m: &ArrayView2<C64>, gap_floor: Option<f64>) -> Result<Array2<C64>> {
    let eig = HermitianEigen::new(m)?;
    sign_from_eigen(&eig, gap_floor)
}

pub fn sign_from_eigen(eig: &HermitianEigen, gap_floor: Option<f64>) -> Result<Array2<C64>> {
    let floor = gap_floor.unwrap_or(GAP_FLOOR_FACTOR * eig.max_abs());
    let gap = eig.min_abs();
    if !(gap > floor) {
        return Err(Error::Gapless { gap, floor });
    }
    Ok(eig.apply(|x| c(x.signum())))
}

pub fn matrix_sign(a: &BdgMatrix, gap_floor: Option<f64>) -> Result<Array2<C64>> {
    sign_of_hermitian(&a.data.view(), gap_floor)
}

/// `W` with `c = W (Psi, Psi^dag)`.
pub fn majorana_transform(modes: usize) -> Array2<C64> {
    let mut w = Array2::zeros((2 * modes, 2 * modes));
    for j in 0..modes {
        w[[2 * j, j]] = c(1.0);
        w[[2 * j, modes + j]] = c(1.0);
        w[[2 * j + 1, j]] = -I;
        w[[2 * j + 1, modes + j]] = I;
    }
    w
}

/// Rewrites a Dirac-basis BdG matrix in the Majorana basis, `M = W A W^dag / 2`.
pub fn dirac_to_majorana(a: &BdgMatrix) -> Result<BdgMatrix> {
    if a.basis != Basis::Dirac {
        return Err(Error::InvalidInput(
            "matrix is already in the Majorana basis".into(),
        ));
    }
    let w = majorana_transform(a.modes());
    let m = w.dot(&a.data).dot(&dagger(&w.view())) * c(0.5);
    BdgMatrix::new(m, Basis::Majorana)
}

/// Covariance `B = i sgn(M)` of the ground state of `A`.
pub fn ground_covariance(a: &BdgMatrix) -> Result<MajoranaCovariance> {
    ground_covariance_with_floor(a, None)
}

pub fn ground_covariance_with_floor(
    a: &BdgMatrix,
    gap_floor: Option<f64>,
) -> Result<MajoranaCovariance> {
    let m = match a.basis {
        Basis::Dirac => dirac_to_majorana(a)?,
        Basis::Majorana => a.clone(),
        Basis::DoubledPath => {
            return Err(Error::InvalidInput(
                "convert a doubled-path matrix to the Dirac basis first".into(),
            ))
        }
    };
    let sign = matrix_sign(&m, gap_floor)?;
    covariance_from_sign(&sign)
}

/// `B = i S` for the Majorana-basis sign matrix `S`.
pub fn covariance_from_sign(sign: &Array2<C64>) -> Result<MajoranaCovariance> {
    let b = sign.mapv(|z| z * I);
    let imag = b.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if imag > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "covariance has imaginary residual {imag:.3e}"
        )));
    }
    MajoranaCovariance::new(b.mapv(|z| z.re))
}

/// Projector onto negative-energy eigenvectors of a Hermitian matrix.
pub fn negative_projector(eig: &HermitianEigen, gap_floor: Option<f64>) -> Result<Array2<C64>> {
    let floor = gap_floor.unwrap_or(GAP_FLOOR_FACTOR * eig.max_abs());
    let gap = eig.min_abs();
    if !(gap > floor) {
        return Err(Error::Gapless { gap, floor });
    }
    Ok(eig.apply(|x| if x < 0.0 { c(1.0) } else { c(0.0) }))
}

/// Ground-state correlator `P_jk = <Psi_j^dag Psi_k>` of a number-conserving
/// Hamiltonian. `P` is the complex conjugate of the projector onto the
/// negative-energy eigenvectors of `H`.
pub fn occupied_projector(h: &QuadraticHamiltonian) -> Result<OccupiedProjector> {
    occupied_projector_with_floor(h, None)
}

pub fn occupied_projector_with_floor(
    h: &QuadraticHamiltonian,
    gap_floor: Option<f64>,
) -> Result<OccupiedProjector> {
    if !h.is_number_conserving() {
        return Err(Error::UnsupportedModel(
            "occupied projector requires a model without pairing".into(),
        ));
    }
    let eig = HermitianEigen::new(&h.hop().view())?;
    let q = negative_projector(&eig, gap_floor)?;
    Ok(OccupiedProjector {
        data: q.mapv(|z| z.conj()),
    })
}

/// Smallest absolute eigenvalue of `H` itself (the filling gap of a
/// number-conserving model at zero chemical potential).
pub fn hopping_gap(h: &QuadraticHamiltonian) -> Result<f64> {
    Ok(HermitianEigen::new(&h.hop().view())?.min_abs())
}
