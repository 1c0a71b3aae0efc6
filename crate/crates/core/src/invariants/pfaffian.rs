//! Pfaffian of a real or complex antisymmetric matrix by skew-symmetric
//! Gaussian elimination with partial pivoting (the Parlett-Reid `L T L^T`
//! reduction). Row/column swaps flip the sign exactly, so the sign of the
//! result is reliable whenever the magnitude is not lost to round-off.

use ndarray::{s, Array1, Array2, ArrayView2};
use ndarray_linalg::Scalar;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SkewMatrix<T: Scalar> {
    data: Array2<T>,
}

impl<T: Scalar<Real = f64>> SkewMatrix<T> {
    pub fn new(data: Array2<T>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return Err(Error::InvalidInput(format!(
                "Pfaffian needs a square matrix, got {r}x{c}"
            )));
        }
        if r % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "Pfaffian needs even dimension, got {r}"
            )));
        }
        let scale = data.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        let mut res = 0.0f64;
        for i in 0..r {
            for j in i..r {
                res = res.max((data[[i, j]] + data[[j, i]]).abs());
            }
        }
        if res > 1e-10 * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not antisymmetric ({res:.3e})"
            )));
        }
        Ok(SkewMatrix { data })
    }

    pub fn data(&self) -> &Array2<T> {
        &self.data
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }
}

/// Pfaffian of a validated skew matrix.
pub fn pfaffian<T>(m: &SkewMatrix<T>) -> T
where
    T: Scalar<Real = f64>,
{
    skew_elimination(m.data.view())
}

/// Validates and evaluates in one step.
pub fn pfaffian_of<T>(m: &ArrayView2<T>) -> Result<T>
where
    T: Scalar<Real = f64>,
{
    Ok(pfaffian(&SkewMatrix::new(m.to_owned())?))
}

fn skew_elimination<T>(input: ArrayView2<T>) -> T
where
    T: Scalar<Real = f64>,
{
    let n = input.nrows();
    let mut a = input.to_owned();
    let mut pf = T::one();
    let mut k = 0;
    while k + 1 < n {
        // Pivot: largest entry in column k below the diagonal.
        let mut kp = k + 1;
        let mut best = a[[k + 1, k]].abs();
        for r in k + 2..n {
            let v = a[[r, k]].abs();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            swap_rows(&mut a, k + 1, kp);
            swap_cols(&mut a, k + 1, kp);
            pf = -pf;
        }
        let pivot = a[[k, k + 1]];
        if best == 0.0 {
            return T::zero();
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Array1<T> = a.slice(s![k, k + 2..]).mapv(|x| x / pivot);
            let col: Array1<T> = a.slice(s![k + 2.., k + 1]).to_owned();
            let mut trailing = a.slice_mut(s![k + 2.., k + 2..]);
            for (i, mut row) in trailing.outer_iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x += tau[i] * col[j] - col[i] * tau[j];
                }
            }
        }
        k += 2;
    }
    pf
}

fn swap_rows<T: Scalar>(a: &mut Array2<T>, i: usize, j: usize) {
    for c in 0..a.ncols() {
        a.swap([i, c], [j, c]);
    }
}

fn swap_cols<T: Scalar>(a: &mut Array2<T>, i: usize, j: usize) {
    for r in 0..a.nrows() {
        a.swap([r, i], [r, j]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::oracles::matchings::pfaffian_by_matchings;
    use ndarray::array;
    use ndarray_linalg::Determinant;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in i + 1..n {
                let x: f64 = rng.random_range(-1.0..1.0);
                m[[i, j]] = x;
                m[[j, i]] = -x;
            }
        }
        m
    }

    #[test]
    fn two_by_two() {
        let m = array![[0.0, 2.5], [-2.5, 0.0]];
        assert_eq!(pfaffian_of(&m.view()).unwrap(), 2.5);
    }

    #[test]
    fn block_diagonal_multiplies() {
        let m = array![
            [0.0, 1.5, 0.0, 0.0],
            [-1.5, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -0.4],
            [0.0, 0.0, 0.4, 0.0]
        ];
        assert!((pfaffian_of(&m.view()).unwrap() + 0.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_odd_and_symmetric() {
        let odd = Array2::<f64>::zeros((3, 3));
        assert!(matches!(
            pfaffian_of(&odd.view()),
            Err(Error::InvalidInput(_))
        ));
        let sym = array![[0.0, 1.0], [1.0, 0.0]];
        assert!(pfaffian_of(&sym.view()).is_err());
    }

    #[test]
    fn zero_pivot_gives_zero() {
        let m = Array2::<f64>::zeros((4, 4));
        assert_eq!(pfaffian_of(&m.view()).unwrap(), 0.0);
    }

    #[test]
    fn agrees_with_matching_sum() {
        for (n, seed) in [(2, 1), (4, 2), (6, 3), (8, 4), (8, 5)] {
            let m = random_skew(n, seed);
            let fast = pfaffian_of(&m.view()).unwrap();
            let brute = pfaffian_by_matchings(&m.view());
            assert!((fast - brute).abs() < 1e-10, "n={n}: {fast} vs {brute}");
        }
    }

    #[test]
    fn complex_agrees_with_matching_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 6;
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in i + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[[i, j]] = z;
                m[[j, i]] = -z;
            }
        }
        let fast = pfaffian_of(&m.view()).unwrap();
        let brute = pfaffian_by_matchings(&m.view());
        assert!((fast - brute).norm() < 1e-10);
    }

    #[test]
    fn square_is_determinant_up_to_200() {
        for (n, seed) in [(10, 1), (50, 2), (120, 3), (200, 4)] {
            let m = random_skew(n, seed);
            let pf = pfaffian_of(&m.view()).unwrap();
            let (sign, ln) = m.sln_det().unwrap();
            assert!(sign > 0.0);
            let rel = (2.0 * pf.abs().ln() - ln).abs();
            assert!(rel < 1e-8, "n={n}: log mismatch {rel}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn permutation_conjugation_multiplies_by_sign(seed in 0u64..10_000, swaps in proptest::collection::vec((0usize..8, 0usize..8), 1..6)) {
            let n = 8;
            let m = random_skew(n, seed);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut sign = 1.0;
            for (i, j) in swaps {
                if i != j {
                    perm.swap(i, j);
                    sign = -sign;
                }
            }
            let q = Array2::from_shape_fn((n, n), |(i, j)| m[[perm[i], perm[j]]]);
            let a = pfaffian_of(&m.view()).unwrap();
            let b = pfaffian_of(&q.view()).unwrap();
            prop_assert!((b - sign * a).abs() < 1e-10 * a.abs().max(1.0));
            prop_assert_eq!(b.signum(), sign * a.signum());
        }
    }
}
