//! Quadratic fermion Hamiltonians `sum Psi^dag H Psi + pairing + h.c.` on a
//! lattice, stored as the hopping matrix `H` and the antisymmetric pairing
//! matrix `Delta`.

use ndarray::{s, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{antisymmetry_residual, c, hermitian_residual, max_abs, scaled_tol, C64};
use crate::spectral::{Basis, BdgMatrix};

/// Relative tolerance applied to input invariants.
pub const INPUT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    lattice: Lattice,
    hop: Array2<C64>,
    pair: Array2<C64>,
}

/// Locality data: `s1 >= 2 max_i sum_j exp(mu dist(i,j)) sqrt(|H_ij|^2 + |Delta_ij|^2)`.
///
/// `velocity` is the estimate `2 s1 / mu`. The prefactor of the Lieb-Robinson
/// bound is not known and is left as `None`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocalityProfile {
    pub mu: f64,
    pub s1: f64,
    pub velocity: f64,
    pub prefactor: Option<f64>,
}

impl LocalityProfile {
    /// Correlation length scale `xi = 2 v / gap + mu`.
    pub fn correlation_length(&self, gap: f64) -> f64 {
        2.0 * self.velocity / gap + self.mu
    }
}

impl QuadraticHamiltonian {
    pub fn new(lattice: Lattice, hop: Array2<C64>, pair: Array2<C64>) -> Result<Self> {
        let v = lattice.num_sites();
        if hop.dim() != (v, v) || pair.dim() != (v, v) {
            return Err(Error::DimensionMismatch(format!(
                "lattice has {v} sites but hop is {:?} and pair is {:?}",
                hop.dim(),
                pair.dim()
            )));
        }
        let herm = hermitian_residual(&hop.view());
        if herm > scaled_tol(&hop.view(), INPUT_TOLERANCE) {
            return Err(Error::InvalidInput(format!(
                "hopping matrix not Hermitian ({herm:.3e})"
            )));
        }
        let anti = antisymmetry_residual(&pair.view());
        if anti > scaled_tol(&pair.view(), INPUT_TOLERANCE) {
            return Err(Error::InvalidInput(format!(
                "pairing matrix not antisymmetric ({anti:.3e})"
            )));
        }
        let hop = (&hop + &hop.t().mapv(|z| z.conj())) * c(0.5);
        let pair = (&pair - &pair.t()) * c(0.5);
        Ok(QuadraticHamiltonian { lattice, hop, pair })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn hop(&self) -> &Array2<C64> {
        &self.hop
    }

    pub fn pair(&self) -> &Array2<C64> {
        &self.pair
    }

    pub fn num_sites(&self) -> usize {
        self.lattice.num_sites()
    }

    pub fn is_number_conserving(&self) -> bool {
        max_abs(&self.pair.view()) <= 1e-14 * max_abs(&self.hop.view()).max(1.0)
    }

    /// `A = [[H, Delta], [Delta^dag, -H^*]]`.
    pub fn assemble_bdg(&self) -> Result<BdgMatrix> {
        let v = self.num_sites();
        let mut a = Array2::zeros((2 * v, 2 * v));
        a.slice_mut(s![..v, ..v]).assign(&self.hop);
        a.slice_mut(s![..v, v..]).assign(&self.pair);
        a.slice_mut(s![v.., ..v])
            .assign(&self.pair.t().mapv(|z| z.conj()));
        a.slice_mut(s![v.., v..])
            .assign(&self.hop.mapv(|z| -z.conj()));
        BdgMatrix::new(a, Basis::Dirac)
    }

    /// Per-site sums `sum_j exp(mu dist(i,j)) sqrt(|H_ij|^2 + |Delta_ij|^2)`.
    pub fn locality_row_sums(&self, mu: f64) -> Result<Vec<f64>> {
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay rate must be positive, got {mu}"
            )));
        }
        let v = self.num_sites();
        Ok((0..v)
            .map(|i| {
                (0..v)
                    .map(|j| {
                        let w = (self.hop[[i, j]].norm_sqr() + self.pair[[i, j]].norm_sqr()).sqrt();
                        if w == 0.0 {
                            0.0
                        } else {
                            (mu * self.lattice.dist(i, j) as f64).exp() * w
                        }
                    })
                    .sum()
            })
            .collect())
    }

    pub fn locality_norm(&self, mu: f64) -> Result<f64> {
        Ok(2.0 * self.locality_row_sums(mu)?.into_iter().fold(0.0, f64::max))
    }

    pub fn locality_profile(&self, mu: f64) -> Result<LocalityProfile> {
        let s1 = self.locality_norm(mu)?;
        Ok(LocalityProfile {
            mu,
            s1,
            velocity: 2.0 * s1 / mu,
            prefactor: None,
        })
    }

    /// Entrywise complex conjugate, the matrices of `H^*`.
    pub fn conjugate(&self) -> QuadraticHamiltonian {
        QuadraticHamiltonian {
            lattice: self.lattice.clone(),
            hop: self.hop.mapv(|z| z.conj()),
            pair: self.pair.mapv(|z| z.conj()),
        }
    }

    /// Same model with the pairing matrix negated, which is the image of the
    /// model under the on-site phase change `Psi -> i Psi`.
    pub fn with_pairing_negated(&self) -> QuadraticHamiltonian {
        QuadraticHamiltonian {
            lattice: self.lattice.clone(),
            hop: self.hop.clone(),
            pair: self.pair.mapv(|z| -z),
        }
    }

    pub fn with_onsite_shift(&self, site: usize, shift: f64) -> Result<QuadraticHamiltonian> {
        self.lattice.check_site(site)?;
        let mut out = self.clone();
        out.hop[[site, site]] += c(shift);
        Ok(out)
    }

    /// Multiplies every coupling between `i` and `j` (hopping and pairing) by
    /// `factor`.
    pub fn with_bond_scaled(
        &self,
        i: usize,
        j: usize,
        factor: f64,
    ) -> Result<QuadraticHamiltonian> {
        self.lattice.check_site(i)?;
        self.lattice.check_site(j)?;
        if i == j {
            return Err(Error::InvalidParameter(
                "a bond needs two distinct sites".into(),
            ));
        }
        let mut out = self.clone();
        for (a, b) in [(i, j), (j, i)] {
            out.hop[[a, b]] *= factor;
            out.pair[[a, b]] *= factor;
        }
        Ok(out)
    }

    /// True when every matrix element touching a site of `region` agrees
    /// exactly with `other`.
    pub fn agrees_on(&self, other: &QuadraticHamiltonian, region: &[usize]) -> bool {
        if self.lattice != other.lattice {
            return false;
        }
        let v = self.num_sites();
        region.iter().all(|&x| {
            (0..v).all(|j| {
                self.hop[[x, j]] == other.hop[[x, j]]
                    && self.hop[[j, x]] == other.hop[[j, x]]
                    && self.pair[[x, j]] == other.pair[[x, j]]
                    && self.pair[[j, x]] == other.pair[[j, x]]
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{self, KitaevParams};
    use crate::spectral::spectral_gap;
    use ndarray::Array1;

    fn sorted_eigs(a: &BdgMatrix) -> Vec<f64> {
        a.eigen().unwrap().values.to_vec()
    }

    #[test]
    fn diagonal_hopping_gives_pm_energies() {
        let l = Lattice::chain(3, false).unwrap();
        let eps = [0.5, -1.5, 2.0];
        let hop = Array2::from_diag(&Array1::from_iter(eps.iter().map(|&x| c(x))));
        let h = QuadraticHamiltonian::new(l, hop, Array2::zeros((3, 3))).unwrap();
        let got = sorted_eigs(&h.assemble_bdg().unwrap());
        let mut want: Vec<f64> = eps.iter().flat_map(|&e| [e, -e]).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn single_pair_term() {
        // Hand diagonalization of the 4x4 matrix [[0, D], [D^dag, 0]] with
        // D = [[0, d], [-d, 0]]: A^2 = d^2 so eigenvalues are +-d, each twice.
        let d = 0.8;
        let l = Lattice::chain(2, false).unwrap();
        let mut pair = Array2::zeros((2, 2));
        pair[[0, 1]] = c(d);
        pair[[1, 0]] = c(-d);
        let h = QuadraticHamiltonian::new(l, Array2::zeros((2, 2)), pair).unwrap();
        let got = sorted_eigs(&h.assemble_bdg().unwrap());
        let want = [-d, -d, d, d];
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        let l = Lattice::chain(2, false).unwrap();
        let mut hop = Array2::zeros((2, 2));
        hop[[0, 1]] = c(1.0);
        assert!(matches!(
            QuadraticHamiltonian::new(l.clone(), hop, Array2::zeros((2, 2))),
            Err(Error::InvalidInput(_))
        ));
        let mut pair = Array2::zeros((2, 2));
        pair[[0, 1]] = c(1.0);
        pair[[1, 0]] = c(1.0);
        assert!(QuadraticHamiltonian::new(l.clone(), Array2::zeros((2, 2)), pair).is_err());
        assert!(
            QuadraticHamiltonian::new(l, Array2::zeros((3, 3)), Array2::zeros((3, 3))).is_err()
        );
    }

    #[test]
    fn locality_norm_examples() {
        let l = Lattice::chain(5, true).unwrap();
        let zero =
            QuadraticHamiltonian::new(l.clone(), Array2::zeros((5, 5)), Array2::zeros((5, 5)))
                .unwrap();
        assert_eq!(zero.locality_norm(1.0).unwrap(), 0.0);
        let mut hop = Array2::zeros((5, 5));
        hop[[0, 0]] = c(1.7);
        let onsite = QuadraticHamiltonian::new(l, hop, Array2::zeros((5, 5))).unwrap();
        assert!((onsite.locality_norm(0.3).unwrap() - 3.4).abs() < 1e-14);
        assert!(matches!(
            onsite.locality_norm(0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn locality_norm_by_direct_summation() {
        // Uniform chain at mu = ln 2: each site has an on-site term |mu_chem|
        // and two bonds with weight sqrt(t^2 + delta^2), each scaled by e^mu = 2.
        let (t, delta, mu_chem) = (0.7, 0.4, 0.3);
        let h = models::kitaev_chain(&KitaevParams::new(8, t, delta, mu_chem, true)).unwrap();
        let expected = 2.0 * (mu_chem + 2.0 * 2.0 * (t * t + delta * delta).sqrt());
        let got = h.locality_norm(std::f64::consts::LN_2).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn locality_norm_monotone_in_mu() {
        let h = models::kitaev_chain(&KitaevParams::new(10, 1.0, 0.5, 0.2, false)).unwrap();
        let mut last = 0.0;
        for k in 1..20 {
            let n = h.locality_norm(0.1 * k as f64).unwrap();
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn conjugation_is_an_involution_preserving_spectrum() {
        let h = models::pplusip_model(&models::PPlusIpParams {
            lx: 3,
            ly: 3,
            hopping: 1.0,
            pairing: 0.6,
            chemical_potential: 0.5,
            periodic: true,
        })
        .unwrap();
        let hc = h.conjugate();
        let back = hc.conjugate();
        assert_eq!(back.hop(), h.hop());
        assert_eq!(back.pair(), h.pair());
        let e1 = sorted_eigs(&h.assemble_bdg().unwrap());
        let e2 = sorted_eigs(&hc.assemble_bdg().unwrap());
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-10);
        }
        let real = models::kitaev_chain(&KitaevParams::new(6, 1.0, 0.3, 0.1, true)).unwrap();
        assert_eq!(real.conjugate().hop(), real.hop());
        assert_eq!(real.conjugate().pair(), real.pair());
    }

    #[test]
    fn trivial_model_gap() {
        let h = models::trivial_model(4, 1.0).unwrap();
        let a = h.assemble_bdg().unwrap();
        assert!((spectral_gap(&a).unwrap() - 1.0).abs() < 1e-12);
        for x in sorted_eigs(&a) {
            assert!((x.abs() - 1.0).abs() < 1e-14);
        }
        assert!((h.locality_norm(2.0).unwrap() - 2.0).abs() < 1e-14);
    }
}
