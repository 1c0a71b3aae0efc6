//! Pfaffian as a signed sum over perfect matchings,
//! `Pf(A) = sum_{j > 0} (-1)^{j+1} a_{0j} Pf(A with rows/cols 0, j removed)`.
//! Exponential cost; meant for `n <= 10`.

use ndarray::ArrayView2;
use ndarray_linalg::Scalar;

pub fn pfaffian_by_matchings<T: Scalar>(a: &ArrayView2<T>) -> T {
    let idx: Vec<usize> = (0..a.nrows()).collect();
    expand(a, &idx)
}

fn expand<T: Scalar>(a: &ArrayView2<T>, idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::one();
    }
    if idx.len() % 2 == 1 {
        return T::zero();
    }
    let first = idx[0];
    let mut total = T::zero();
    for pos in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(p, _)| p + 1 != pos)
            .map(|(_, &x)| x)
            .collect();
        let term = a[[first, idx[pos]]] * expand(a, &rest);
        if pos % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Number of perfect matchings of `n` points, `(n - 1)!!`.
pub fn matching_count(n: usize) -> usize {
    (1..n).step_by(2).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn small_cases() {
        let a = array![[0.0, 3.0], [-3.0, 0.0]];
        assert_eq!(pfaffian_by_matchings(&a.view()), 3.0);
        // Pf of 4x4 = a01 a23 - a02 a13 + a03 a12.
        let b = array![
            [0.0, 1.0, 2.0, 3.0],
            [-1.0, 0.0, 4.0, 5.0],
            [-2.0, -4.0, 0.0, 6.0],
            [-3.0, -5.0, -6.0, 0.0]
        ];
        assert_eq!(pfaffian_by_matchings(&b.view()), 6.0 - 10.0 + 12.0);
        assert_eq!(matching_count(8), 105);
    }
}
