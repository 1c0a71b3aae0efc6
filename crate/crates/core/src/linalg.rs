//! Dense helpers shared by every module. All matrices are `ndarray` arrays;
//! eigensolvers come from LAPACK through `ndarray-linalg`.

use ndarray::{Array1, Array2, ArrayView2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: &ArrayView2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &ArrayView2<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn dagger(m: &ArrayView2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, c(1.0))
}

/// `max |M - M^dagger|`.
pub fn hermitian_residual(m: &ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    r
}

/// `max |M + M^T|`.
pub fn antisymmetry_residual(m: &ArrayView2<C64>) -> f64 {
    let n = m.nrows();
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[[i, j]] + m[[j, i]]).norm());
        }
    }
    r
}

pub fn antisymmetry_residual_real(m: &ArrayView2<f64>) -> f64 {
    let n = m.nrows();
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[[i, j]] + m[[j, i]]).abs());
        }
    }
    r
}

pub fn ensure_square(m: &ArrayView2<C64>, what: &str) -> Result<usize> {
    let (r, cols) = m.dim();
    if r != cols {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {r}x{cols}, expected square"
        )));
    }
    Ok(r)
}

/// Relative tolerance scale: `tol * max(1, max|M|)`.
pub fn scaled_tol(m: &ArrayView2<C64>, tol: f64) -> f64 {
    tol * max_abs(m).max(1.0)
}

pub fn hermitian_part(m: &ArrayView2<C64>) -> Array2<C64> {
    (m.to_owned() + dagger(m)) * c(0.5)
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<C64>,
}

impl HermitianEigen {
    pub fn new(m: &ArrayView2<C64>) -> Result<Self> {
        ensure_square(m, "matrix")?;
        let res = hermitian_residual(m);
        if res > scaled_tol(m, 1e-10) {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian (residual {res:.3e})"
            )));
        }
        let (values, vectors) = eigh_raw(&hermitian_part(m).view())?;
        Ok(HermitianEigen { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(f(lambda)) U^dagger`.
    pub fn apply<F: Fn(f64) -> C64>(&self, f: F) -> Array2<C64> {
        let weights: Array1<C64> = self.values.mapv(f);
        let scaled = &self.vectors * &weights.view().insert_axis(Axis(0));
        scaled.dot(&dagger(&self.vectors.view()))
    }

    /// Rows `rows` and columns `cols` of `U diag(f(lambda)) U^dagger`.
    pub fn apply_block<F: Fn(f64) -> C64>(
        &self,
        f: F,
        rows: &[usize],
        cols: &[usize],
    ) -> Array2<C64> {
        let weights: Array1<C64> = self.values.mapv(f);
        let ur = self.vectors.select(Axis(0), rows);
        let uc = self.vectors.select(Axis(0), cols);
        let scaled = &ur * &weights.view().insert_axis(Axis(0));
        scaled.dot(&dagger(&uc.view()))
    }

    /// Smallest absolute eigenvalue.
    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(f64::INFINITY, |acc, x| acc.min(x.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn reconstruction_residual(&self, m: &ArrayView2<C64>) -> f64 {
        let rebuilt = self.apply(c);
        max_abs(&(rebuilt - m).view())
    }
}

/// LAPACK `heevd` on a column-major copy. Row-major complex input would be
/// read as its transpose, which conjugates the returned eigenvectors.
pub fn eigh_raw(m: &ArrayView2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let mut f = Array2::zeros(m.dim().f());
    f.assign(m);
    Ok(f.eigh(UPLO::Lower)?)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &ArrayView2<C64>) -> Result<Array1<f64>> {
    Ok(HermitianEigen::new(m)?.values)
}

/// Operator norm of a Hermitian matrix.
pub fn hermitian_norm(m: &ArrayView2<C64>) -> Result<f64> {
    Ok(eigvalsh(m)?.iter().fold(0.0, |acc, x| acc.max(x.abs())))
}

/// Operator norm of an anti-Hermitian matrix (such as a commutator of
/// Hermitian matrices).
pub fn antihermitian_norm(m: &ArrayView2<C64>) -> Result<f64> {
    hermitian_norm(&m.mapv(|z| z * I).view())
}

pub fn commutator(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

pub fn trace(m: &ArrayView2<C64>) -> C64 {
    m.diag().iter().sum()
}

/// `max |U^dagger U - 1|`.
pub fn unitarity_residual(u: &ArrayView2<C64>) -> f64 {
    let n = u.ncols();
    max_abs(&(dagger(u).dot(u) - identity(n)).view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_non_hermitian() {
        let m = array![[c(0.0), c(1.0)], [c(2.0), c(0.0)]];
        assert!(matches!(
            HermitianEigen::new(&m.view()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn apply_identity_reconstructs() {
        let m = array![[c(2.0), C64::new(0.0, 1.0)], [C64::new(0.0, -1.0), c(-1.0)]];
        let e = HermitianEigen::new(&m.view()).unwrap();
        assert!(e.reconstruction_residual(&m.view()) < 1e-14);
        let block = e.apply_block(c, &[1], &[0]);
        assert!((block[[0, 0]] - m[[1, 0]]).norm() < 1e-14);
    }
}
