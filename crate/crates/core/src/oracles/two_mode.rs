//! The two-mode state `(1 + Psi_up^dag Psi_down^dag) |0> / sqrt 2` in its
//! four-dimensional Fock space, and the covariance of its product over sites.

use ndarray::Array2;

use crate::error::Result;
use crate::oracles::fock::{majorana_covariance, FockSpace, Ladder};

#[derive(Clone, Copy, Debug)]
pub struct PairCorrelators {
    pub occupation_up: f64,
    pub occupation_down: f64,
    /// `<Psi_up^dag Psi_down^dag>`.
    pub pair: f64,
}

fn pair_state() -> Result<(FockSpace, ndarray::Array1<crate::linalg::C64>)> {
    let space = FockSpace::new(2)?;
    let vac = space.vacuum();
    let pair = space.apply(&[Ladder::Create(0), Ladder::Create(1)], &vac);
    Ok((space, (vac + pair) * std::f64::consts::FRAC_1_SQRT_2))
}

pub fn pair_correlators() -> Result<PairCorrelators> {
    let (space, psi) = pair_state()?;
    let n_up = space.expectation(&psi, &[Ladder::Create(0), Ladder::Annihilate(0)]);
    let n_down = space.expectation(&psi, &[Ladder::Create(1), Ladder::Annihilate(1)]);
    let pair = space.expectation(&psi, &[Ladder::Create(0), Ladder::Create(1)]);
    Ok(PairCorrelators {
        occupation_up: n_up.re,
        occupation_down: n_down.re,
        pair: pair.re,
    })
}

/// 4x4 covariance in the order `(c_{up,0}, c_{up,1}, c_{down,0}, c_{down,1})`.
pub fn pair_covariance() -> Result<Array2<f64>> {
    let (space, psi) = pair_state()?;
    Ok(majorana_covariance(&space, &psi, &[0, 1])?.0)
}

/// Covariance of the product of pair states over `sites` sites, laid out as
/// all up-copy Majoranas followed by all down-copy Majoranas.
pub fn product_covariance(sites: usize) -> Result<Array2<f64>> {
    let block = pair_covariance()?;
    let n = 4 * sites;
    let mut b = Array2::zeros((n, n));
    for i in 0..sites {
        let idx = [2 * i, 2 * i + 1, 2 * (sites + i), 2 * (sites + i) + 1];
        for (r, &p) in idx.iter().enumerate() {
            for (s, &q) in idx.iter().enumerate() {
                b[[p, q]] = block[[r, s]];
            }
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_filling_and_pairing() {
        let c = pair_correlators().unwrap();
        assert!((c.occupation_up - 0.5).abs() < 1e-15);
        assert!((c.occupation_down - 0.5).abs() < 1e-15);
        assert!((c.pair - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pair_covariance_is_pure() {
        let b = pair_covariance().unwrap();
        let sq = b.dot(&b);
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { -1.0 } else { 0.0 };
                assert!((sq[[i, j]] - target).abs() < 1e-14);
            }
        }
    }
}
