//! Concrete model families: the Kitaev chain (1D pairing), the spinless
//! p+ip superconductor, a two-band Chern insulator, an ionic chain used for
//! Wannier experiments, the uncoupled trivial model and dense random
//! Bogoliubov matrices.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::QuadraticHamiltonian;
use crate::lattice::Lattice;
use crate::linalg::{c, C64, I};

/// Uniform i.i.d. on-site energies in `[-strength/2, strength/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disorder {
    pub strength: f64,
    pub seed: u64,
}

impl Disorder {
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..n)
            .map(|_| self.strength * (rng.random::<f64>() - 0.5))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KitaevParams {
    pub sites: usize,
    pub hopping: f64,
    pub pairing: f64,
    pub chemical_potential: f64,
    pub periodic: bool,
    #[serde(default)]
    pub disorder: Option<Disorder>,
}

impl KitaevParams {
    pub fn new(
        sites: usize,
        hopping: f64,
        pairing: f64,
        chemical_potential: f64,
        periodic: bool,
    ) -> Self {
        KitaevParams {
            sites,
            hopping,
            pairing,
            chemical_potential,
            periodic,
            disorder: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PPlusIpParams {
    pub lx: usize,
    pub ly: usize,
    pub hopping: f64,
    pub pairing: f64,
    pub chemical_potential: f64,
    pub periodic: bool,
}

/// Two-band model with Bloch Hamiltonian
/// `t [sin kx sx + sin ky sy + (m + cos kx + cos ky) sz]`.
/// The lower band has Chern number `+-1` for `0 < |m| < 2` and zero for `|m| > 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernParams {
    pub lx: usize,
    pub ly: usize,
    pub hopping: f64,
    pub mass: f64,
    pub periodic: bool,
}

/// Chain with alternating on-site energies `+-stagger` and hopping `-t`;
/// gapped at half filling for `stagger != 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonicParams {
    pub sites: usize,
    pub hopping: f64,
    pub stagger: f64,
    pub periodic: bool,
    #[serde(default)]
    pub disorder: Option<Disorder>,
}

fn add_bond(m: &mut Array2<C64>, i: usize, j: usize, value: C64) {
    m[[i, j]] += value;
    m[[j, i]] += value.conj();
}

fn add_pair(m: &mut Array2<C64>, i: usize, j: usize, value: C64) {
    m[[i, j]] += value;
    m[[j, i]] -= value;
}

pub fn kitaev_chain(p: &KitaevParams) -> Result<QuadraticHamiltonian> {
    let lattice = Lattice::chain(p.sites, p.periodic)?;
    let v = lattice.num_sites();
    let mut hop = Array2::zeros((v, v));
    let mut pair = Array2::zeros((v, v));
    let shifts = p
        .disorder
        .map(|d| d.sample(v))
        .unwrap_or_else(|| vec![0.0; v]);
    for i in 0..v {
        hop[[i, i]] = c(-p.chemical_potential + shifts[i]);
    }
    for cell in lattice.cells() {
        if let Some(next) = lattice.neighbor_cell(cell, 0, true) {
            let (i, j) = (lattice.site(cell, 0), lattice.site(next, 0));
            add_bond(&mut hop, i, j, c(-p.hopping));
            add_pair(&mut pair, i, j, c(p.pairing));
        }
    }
    QuadraticHamiltonian::new(lattice, hop, pair)
}

pub fn pplusip_model(p: &PPlusIpParams) -> Result<QuadraticHamiltonian> {
    let lattice = Lattice::square(p.lx, p.ly, p.periodic)?;
    let v = lattice.num_sites();
    let mut hop = Array2::zeros((v, v));
    let mut pair = Array2::zeros((v, v));
    for i in 0..v {
        hop[[i, i]] = c(-p.chemical_potential);
    }
    for cell in lattice.cells() {
        let i = lattice.site(cell, 0);
        for (axis, amplitude) in [(0, c(p.pairing)), (1, I * p.pairing)] {
            if let Some(next) = lattice.neighbor_cell(cell, axis, true) {
                let j = lattice.site(next, 0);
                add_bond(&mut hop, i, j, c(-p.hopping));
                add_pair(&mut pair, i, j, amplitude);
            }
        }
    }
    QuadraticHamiltonian::new(lattice, hop, pair)
}

pub fn chern_insulator_model(p: &ChernParams) -> Result<QuadraticHamiltonian> {
    let lattice = Lattice::square(p.lx, p.ly, p.periodic)?.with_orbitals(2)?;
    let v = lattice.num_sites();
    let t = p.hopping;
    let mut hop = Array2::zeros((v, v));
    // Hopping blocks T_x = t (sz - i sx) / 2 and T_y = t (sz - i sy) / 2, so
    // that T e^{ik} + h.c. = t (cos k sz + sin k s_axis).
    let tx = [[c(0.5 * t), -I * 0.5 * t], [-I * 0.5 * t, c(-0.5 * t)]];
    let ty = [[c(0.5 * t), c(-0.5 * t)], [c(0.5 * t), c(-0.5 * t)]];
    for cell in lattice.cells() {
        let a = lattice.site(cell, 0);
        let b = lattice.site(cell, 1);
        hop[[a, a]] += c(t * p.mass);
        hop[[b, b]] -= c(t * p.mass);
        for (axis, block) in [(0, &tx), (1, &ty)] {
            if let Some(next) = lattice.neighbor_cell(cell, axis, true) {
                for (o, row) in block.iter().enumerate() {
                    for (q, &value) in row.iter().enumerate() {
                        if value.norm() > 0.0 {
                            add_bond(
                                &mut hop,
                                lattice.site(cell, o),
                                lattice.site(next, q),
                                value,
                            );
                        }
                    }
                }
            }
        }
    }
    QuadraticHamiltonian::new(lattice, hop, Array2::zeros((v, v)))
}

pub fn ionic_chain(p: &IonicParams) -> Result<QuadraticHamiltonian> {
    let lattice = Lattice::chain(p.sites, p.periodic)?;
    let v = lattice.num_sites();
    let shifts = p
        .disorder
        .map(|d| d.sample(v))
        .unwrap_or_else(|| vec![0.0; v]);
    let mut hop = Array2::zeros((v, v));
    for i in 0..v {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        hop[[i, i]] = c(sign * p.stagger + shifts[i]);
    }
    for cell in lattice.cells() {
        if let Some(next) = lattice.neighbor_cell(cell, 0, true) {
            add_bond(
                &mut hop,
                lattice.site(cell, 0),
                lattice.site(next, 0),
                c(-p.hopping),
            );
        }
    }
    QuadraticHamiltonian::new(lattice, hop, Array2::zeros((v, v)))
}

/// Uncoupled sites with `H = -gap * 1`: every site is occupied in the ground
/// state and the BdG gap equals `gap`.
pub fn trivial_model(sites: usize, gap: f64) -> Result<QuadraticHamiltonian> {
    trivial_on(Lattice::chain(sites, false)?, gap)
}

pub fn trivial_on(lattice: Lattice, gap: f64) -> Result<QuadraticHamiltonian> {
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gap must be positive, got {gap}"
        )));
    }
    let v = lattice.num_sites();
    let hop = Array2::from_diag_elem(v, c(-gap));
    QuadraticHamiltonian::new(lattice, hop, Array2::zeros((v, v)))
}

/// Dense random model on a chain: `H` and `Delta` have i.i.d. complex
/// entries of magnitude up to `scale`, symmetrized to Hermitian and
/// antisymmetric form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    pub sites: usize,
    pub scale: f64,
    pub seed: u64,
}

pub fn random_model(p: &RandomParams) -> Result<QuadraticHamiltonian> {
    if !(p.scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale must be positive, got {}",
            p.scale
        )));
    }
    let lattice = Lattice::chain(p.sites, false)?;
    let v = p.sites;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let draw = |rng: &mut ChaCha8Rng| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * p.scale
    };
    let mut hop = Array2::zeros((v, v));
    let mut pair = Array2::zeros((v, v));
    for i in 0..v {
        hop[[i, i]] = c(draw(&mut rng).re);
        for j in i + 1..v {
            add_bond(&mut hop, i, j, draw(&mut rng));
            add_pair(&mut pair, i, j, draw(&mut rng));
        }
    }
    QuadraticHamiltonian::new(lattice, hop, pair)
}
