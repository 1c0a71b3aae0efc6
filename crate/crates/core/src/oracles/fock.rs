//! Exact diagonalization in the fermionic Fock space.
//!
//! Basis states are bit strings, bit `m` being the occupation of Fock mode
//! `m`. Ladder operators carry the Jordan-Wigner sign of the modes below:
//! `a_m |n> = (-1)^{n_0 + .. + n_{m-1}} |n - e_m>`. A permutation `order`
//! places physical mode `order[m]` at Fock position `m`, so that any chosen
//! set of modes can be put first before taking a partial trace.

use crate::linalg::eigh_raw;
use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::spectral::{Basis, BdgMatrix};

/// Largest Fock space handled (dense `2^12`-dimensional vectors).
pub const MAX_FOCK_MODES: usize = 12;

/// Largest space for which a dense many-body Hamiltonian is built.
pub const MAX_DENSE_MODES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

#[derive(Clone, Debug)]
pub struct FockSpace {
    modes: usize,
}

impl FockSpace {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 || modes > MAX_FOCK_MODES {
            return Err(Error::Capacity(format!(
                "Fock space of {modes} modes (supported: 1..={MAX_FOCK_MODES})"
            )));
        }
        Ok(FockSpace { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    fn act(&self, op: Ladder, state: usize) -> Option<(f64, usize)> {
        let m = match op {
            Ladder::Create(m) | Ladder::Annihilate(m) => m,
        };
        let occupied = state >> m & 1 == 1;
        let sign = if (state & ((1 << m) - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        match (op, occupied) {
            (Ladder::Annihilate(_), true) => Some((sign, state ^ (1 << m))),
            (Ladder::Create(_), false) => Some((sign, state | (1 << m))),
            _ => None,
        }
    }

    /// Applies the product `ops[0] ops[1] ... ops[n-1]` to `psi`.
    pub fn apply(&self, ops: &[Ladder], psi: &Array1<C64>) -> Array1<C64> {
        let mut out = Array1::zeros(self.dim());
        for (state, &amp) in psi.iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let mut cur = Some((1.0, state));
            for &op in ops.iter().rev() {
                cur = cur.and_then(|(s, st)| self.act(op, st).map(|(s2, st2)| (s * s2, st2)));
            }
            if let Some((s, st)) = cur {
                out[st] += amp * s;
            }
        }
        out
    }

    pub fn vacuum(&self) -> Array1<C64> {
        let mut v = Array1::zeros(self.dim());
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// `<psi| ops |psi>`.
    pub fn expectation(&self, psi: &Array1<C64>, ops: &[Ladder]) -> C64 {
        let phi = self.apply(ops, psi);
        psi.iter().zip(phi.iter()).map(|(a, b)| a.conj() * b).sum()
    }
}

fn position_map(order: &[usize], modes: usize) -> Result<Vec<usize>> {
    if order.len() != modes {
        return Err(Error::DimensionMismatch(format!(
            "order lists {} modes, expected {modes}",
            order.len()
        )));
    }
    let mut pos = vec![usize::MAX; modes];
    for (m, &phys) in order.iter().enumerate() {
        if phys >= modes || pos[phys] != usize::MAX {
            return Err(Error::InvalidInput(
                "mode order is not a permutation".into(),
            ));
        }
        pos[phys] = m;
    }
    Ok(pos)
}

pub fn identity_order(modes: usize) -> Vec<usize> {
    (0..modes).collect()
}

/// Many-body matrix of `1/2 sum_pq x_p^dag A_pq x_q`, `x = (Psi, Psi^dag)`.
pub fn many_body_hamiltonian(a: &BdgMatrix, order: &[usize]) -> Result<(FockSpace, Array2<C64>)> {
    if a.basis() != Basis::Dirac {
        return Err(Error::InvalidInput(
            "Fock construction needs a Dirac-basis matrix".into(),
        ));
    }
    let n = a.modes();
    if n > MAX_DENSE_MODES {
        return Err(Error::Capacity(format!(
            "dense many-body Hamiltonian for {n} modes"
        )));
    }
    let space = FockSpace::new(n)?;
    let pos = position_map(order, n)?;
    // x_p and x_p^dag as Fock ladder operators.
    let x = |p: usize| {
        if p < n {
            Ladder::Annihilate(pos[p])
        } else {
            Ladder::Create(pos[p - n])
        }
    };
    let xd = |p: usize| {
        if p < n {
            Ladder::Create(pos[p])
        } else {
            Ladder::Annihilate(pos[p - n])
        }
    };
    let dim = space.dim();
    let mut hmat = Array2::<C64>::zeros((dim, dim));
    let data = a.data();
    for state in 0..dim {
        for p in 0..2 * n {
            for q in 0..2 * n {
                let coef = data[[p, q]];
                if coef.norm() == 0.0 {
                    continue;
                }
                let step = space
                    .act(x(q), state)
                    .and_then(|(s1, st1)| space.act(xd(p), st1).map(|(s2, st2)| (s1 * s2, st2)));
                if let Some((s, out)) = step {
                    hmat[[out, state]] += coef * (0.5 * s);
                }
            }
        }
    }
    Ok((space, hmat))
}

#[derive(Clone, Debug)]
pub struct FockGroundState {
    pub space: FockSpace,
    pub energies: Array1<f64>,
    pub state: Array1<C64>,
}

impl FockGroundState {
    /// Many-body gap `E_1 - E_0`.
    pub fn gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

/// Ground state of the quadratic Hamiltonian `A`; a degenerate ground level
/// is rejected.
pub fn ground_state(a: &BdgMatrix, order: &[usize]) -> Result<FockGroundState> {
    let (space, hmat) = many_body_hamiltonian(a, order)?;
    let (energies, vectors) = eigh_raw(&hmat.view())?;
    let gap = energies[1] - energies[0];
    if gap < 1e-8 {
        return Err(Error::Gapless { gap, floor: 1e-8 });
    }
    let state = vectors.column(0).to_owned();
    Ok(FockGroundState {
        space,
        energies,
        state,
    })
}

/// `c_{2j} = Psi_j + Psi_j^dag` and `c_{2j+1} = -i (Psi_j - Psi_j^dag)` applied
/// to `psi`, with `j` a physical mode.
fn apply_majorana(space: &FockSpace, pos: &[usize], k: usize, psi: &Array1<C64>) -> Array1<C64> {
    let m = pos[k / 2];
    let down = space.apply(&[Ladder::Annihilate(m)], psi);
    let up = space.apply(&[Ladder::Create(m)], psi);
    if k.is_multiple_of(2) {
        down + up
    } else {
        (down - up) * (-I)
    }
}

/// `B_jk = i <c_j c_k>` for `j != k`; returns the real matrix and the largest
/// imaginary part discarded.
pub fn majorana_covariance(
    space: &FockSpace,
    psi: &Array1<C64>,
    order: &[usize],
) -> Result<(Array2<f64>, f64)> {
    let n = space.modes();
    let pos = position_map(order, n)?;
    let images: Vec<Array1<C64>> = (0..2 * n)
        .map(|k| apply_majorana(space, &pos, k, psi))
        .collect();
    let mut b = Array2::zeros((2 * n, 2 * n));
    let mut imag: f64 = 0.0;
    for j in 0..2 * n {
        for k in 0..2 * n {
            if j == k {
                continue;
            }
            // <psi| c_j c_k |psi> = (c_j psi)^dag (c_k psi) since c_j is Hermitian.
            let corr: C64 = images[j]
                .iter()
                .zip(images[k].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let value = corr * I;
            imag = imag.max(value.im.abs());
            b[[j, k]] = value.re;
        }
    }
    Ok((b, imag))
}

/// `P_jk = <Psi_j^dag Psi_k>` in physical mode labels.
pub fn hopping_correlator(
    space: &FockSpace,
    psi: &Array1<C64>,
    order: &[usize],
) -> Result<Array2<C64>> {
    let n = space.modes();
    let pos = position_map(order, n)?;
    Ok(Array2::from_shape_fn((n, n), |(j, k)| {
        space.expectation(psi, &[Ladder::Create(pos[j]), Ladder::Annihilate(pos[k])])
    }))
}

/// Reduced density matrix of the first `keep` Fock modes.
pub fn reduced_density_matrix(
    space: &FockSpace,
    psi: &Array1<C64>,
    keep: usize,
) -> Result<Array2<C64>> {
    if keep == 0 || keep > space.modes() {
        return Err(Error::InvalidInput(format!(
            "cannot keep {keep} of {} modes",
            space.modes()
        )));
    }
    let low = 1usize << keep;
    let high = space.dim() >> keep;
    let mut rho = Array2::zeros((low, low));
    for h in 0..high {
        for i in 0..low {
            let a = psi[i + (h << keep)];
            if a.norm() == 0.0 {
                continue;
            }
            for j in 0..low {
                rho[[i, j]] += a * psi[j + (h << keep)].conj();
            }
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use ndarray::array;

    #[test]
    fn anticommutation() {
        let space = FockSpace::new(3).unwrap();
        let mut psi = Array1::from_elem(8, c(0.0));
        for (i, z) in psi.iter_mut().enumerate() {
            *z = C64::new(i as f64 + 1.0, 0.5 * i as f64);
        }
        for j in 0..3 {
            for k in 0..3 {
                let ab = space.apply(&[Ladder::Annihilate(j), Ladder::Create(k)], &psi);
                let ba = space.apply(&[Ladder::Create(k), Ladder::Annihilate(j)], &psi);
                let sum = ab + ba;
                let expected = if j == k {
                    psi.clone()
                } else {
                    Array1::zeros(8)
                };
                assert!((sum - expected).iter().all(|z| z.norm() < 1e-12));
                let aa = space.apply(&[Ladder::Annihilate(j), Ladder::Annihilate(k)], &psi)
                    + space.apply(&[Ladder::Annihilate(k), Ladder::Annihilate(j)], &psi);
                assert!(aa.iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn single_mode_energy() {
        // A = diag(e, -e): H = e (n - 1/2).
        let a = BdgMatrix::new(array![[c(0.7), c(0.0)], [c(0.0), c(-0.7)]], Basis::Dirac).unwrap();
        let (_, h) = many_body_hamiltonian(&a, &[0]).unwrap();
        assert!((h[[0, 0]].re + 0.35).abs() < 1e-15);
        assert!((h[[1, 1]].re - 0.35).abs() < 1e-15);
    }

    #[test]
    fn capacity_limits() {
        assert!(matches!(FockSpace::new(13), Err(Error::Capacity(_))));
        assert!(matches!(FockSpace::new(0), Err(Error::Capacity(_))));
    }
}
