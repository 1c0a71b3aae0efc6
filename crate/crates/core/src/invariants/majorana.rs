//! Majorana number of a pure Gaussian state, `sign Pf(B)` in the global
//! Majorana ordering, and the two dimerized reference states.
//!
//! The absolute sign depends on the ordering convention; only relative signs
//! (between phases, or between a chain and its double) carry meaning.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::invariants::pfaffian::{pfaffian, SkewMatrix};
use crate::spectral::MajoranaCovariance;

/// Largest tolerated `max |B^2 + 1|` for a finite-size state.
pub const MAJORANA_PURITY_TOLERANCE: f64 = 1e-6;

fn check_sites(sites: usize) -> Result<()> {
    if sites < 2 {
        return Err(Error::InvalidSize(format!(
            "reference states need at least 2 sites, got {sites}"
        )));
    }
    Ok(())
}

/// Every site occupied: `B_{2j,2j+1} = 1`, pairing Majoranas within a site.
pub fn state_odd(sites: usize) -> Result<MajoranaCovariance> {
    check_sites(sites)?;
    let n = 2 * sites;
    let mut b = Array2::zeros((n, n));
    for j in 0..sites {
        b[[2 * j, 2 * j + 1]] = 1.0;
        b[[2 * j + 1, 2 * j]] = -1.0;
    }
    MajoranaCovariance::new(b)
}

/// The index shift `(B_even)_{ij} = (B_odd)_{i+1,j+1}` (mod `2V`), pairing
/// Majoranas across neighbouring sites.
pub fn state_even(sites: usize) -> Result<MajoranaCovariance> {
    let odd = state_odd(sites)?;
    let n = 2 * sites;
    let src = odd.data();
    let b = Array2::from_shape_fn((n, n), |(i, j)| src[[(i + 1) % n, (j + 1) % n]]);
    MajoranaCovariance::new(b)
}

/// `sign Pf(B)` after checking that `B` is pure within
/// [`MAJORANA_PURITY_TOLERANCE`].
pub fn majorana_number(b: &MajoranaCovariance) -> Result<i8> {
    let residual = b.purity_residual();
    if residual > MAJORANA_PURITY_TOLERANCE {
        return Err(Error::ImpureState {
            residual,
            tolerance: MAJORANA_PURITY_TOLERANCE,
        });
    }
    let pf = pfaffian(&SkewMatrix::new(b.data().clone())?);
    // |Pf B| = 1 for a pure state, so a small value means lost precision.
    if pf.abs() < 0.5 {
        return Err(Error::ImpureState {
            residual: 1.0 - pf.abs(),
            tolerance: 0.5,
        });
    }
    Ok(if pf > 0.0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{kitaev_chain, KitaevParams};
    use crate::spectral::ground_covariance;

    fn number_of(p: KitaevParams) -> i8 {
        let a = kitaev_chain(&p).unwrap().assemble_bdg().unwrap();
        majorana_number(&ground_covariance(&a).unwrap()).unwrap()
    }

    #[test]
    fn reference_states_are_pure_with_opposite_numbers() {
        for v in [2, 3, 8, 16] {
            let odd = state_odd(v).unwrap();
            let even = state_even(v).unwrap();
            assert_eq!(odd.purity_residual(), 0.0);
            assert_eq!(even.purity_residual(), 0.0);
            assert_eq!(
                majorana_number(&odd).unwrap(),
                -majorana_number(&even).unwrap()
            );
            for j in 0..v {
                assert_eq!(odd.occupation(j), 1.0);
            }
        }
        assert!(state_odd(1).is_err());
    }

    #[test]
    fn even_state_is_index_shift() {
        let v = 5;
        let (odd, even) = (state_odd(v).unwrap(), state_even(v).unwrap());
        let n = 2 * v;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(even.data()[[i, j]], odd.data()[[(i + 1) % n, (j + 1) % n]]);
            }
        }
    }

    #[test]
    fn kitaev_phases_have_opposite_numbers() {
        let topo = number_of(KitaevParams::new(16, 1.0, 1.0, 0.0, true));
        let trivial = number_of(KitaevParams::new(16, 0.1, 0.1, 2.0, true));
        assert_eq!(topo, -trivial);
    }

    #[test]
    fn sign_constant_within_a_phase() {
        let reference = number_of(KitaevParams::new(16, 1.0, 1.0, 0.0, true));
        for mu in [-1.5, -0.8, 0.3, 1.2, 1.7] {
            assert_eq!(
                number_of(KitaevParams::new(16, 1.0, 0.7, mu, true)),
                reference,
                "mu={mu}"
            );
        }
    }

    #[test]
    fn impure_state_rejected() {
        let b = state_odd(3).unwrap().data() * 0.9;
        let b = MajoranaCovariance::new(b).unwrap();
        assert!(matches!(
            majorana_number(&b),
            Err(Error::ImpureState { .. })
        ));
    }
}
