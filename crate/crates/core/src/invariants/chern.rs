//! Real-space Chern marker
//! `nu(P) = 12 pi i sum_{j in A, k in B, l in C} (P_jk P_kl P_lj - P_jl P_lk P_kj)`
//! over three counterclockwise sectors of a disc.
//!
//! The sum is evaluated as `12 pi i (tr P_AB P_BC P_CA - tr P_AC P_CB P_BA)`,
//! touching only the sector blocks of the projector. It is applied to the
//! single-particle projector onto occupied orbitals, `Q = P^T`, which makes
//! the sign agree with the momentum-space Chern number of the occupied band.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{trace, C64, I};
use crate::spectral::OccupiedProjector;

/// Three disjoint sets of sites forming counterclockwise 120-degree sectors
/// of a disc.
#[derive(Clone, Debug)]
pub struct SectorPartition {
    sectors: [Vec<usize>; 3],
    center: [f64; 2],
    radius: f64,
}

impl SectorPartition {
    /// Sites whose cell lies within `radius` of `center`; sector `k` holds
    /// polar angles in `[2 pi k / 3, 2 pi (k + 1) / 3)`.
    pub fn disc(lattice: &Lattice, center: [f64; 2], radius: f64) -> Result<Self> {
        if lattice.dimension() != 2 {
            return Err(Error::InvalidPartition(
                "sector partition needs a 2D lattice".into(),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidPartition(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let mut sectors: [Vec<usize>; 3] = Default::default();
        for site in 0..lattice.num_sites() {
            let p = lattice.position(site);
            let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
            if dx * dx + dy * dy > radius * radius || (dx == 0.0 && dy == 0.0) {
                continue;
            }
            let angle = dy.atan2(dx).rem_euclid(2.0 * PI);
            let k = ((angle / (2.0 * PI / 3.0)).floor() as usize).min(2);
            sectors[k].push(site);
        }
        if sectors.iter().any(Vec::is_empty) {
            return Err(Error::InvalidPartition(
                "a sector of the disc is empty".into(),
            ));
        }
        Ok(SectorPartition {
            sectors,
            center,
            radius,
        })
    }

    /// Disc of radius `L / 3` centered in the sample.
    pub fn centered(lattice: &Lattice) -> Result<Self> {
        Self::centered_scaled(lattice, 1.0)
    }

    /// Centered disc with radius `scale * L / 3`.
    pub fn centered_scaled(lattice: &Lattice, scale: f64) -> Result<Self> {
        if lattice.dimension() != 2 {
            return Err(Error::InvalidPartition(
                "sector partition needs a 2D lattice".into(),
            ));
        }
        let e = lattice.extents();
        let center = [(e[0] as f64 - 1.0) / 2.0, (e[1] as f64 - 1.0) / 2.0];
        Self::disc(lattice, center, scale * lattice.linear_size() as f64 / 3.0)
    }

    pub fn sectors(&self) -> &[Vec<usize>; 3] {
        &self.sectors
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Access to sub-blocks of a (possibly implicitly stored) projector.
pub trait ProjectorBlocks {
    fn size(&self) -> usize;
    fn block(&self, rows: &[usize], cols: &[usize]) -> Result<Array2<C64>>;
}

impl ProjectorBlocks for Array2<C64> {
    fn size(&self) -> usize {
        self.nrows()
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> Result<Array2<C64>> {
        Ok(Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| {
            self[[rows[i], cols[j]]]
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernValue {
    pub nu: f64,
    pub imag_residual: f64,
}

/// `nu` of a projector whose mode `m` sits on lattice site `mode_sites[m]`.
pub fn chern_marker<P: ProjectorBlocks + ?Sized>(
    projector: &P,
    mode_sites: &[usize],
    part: &SectorPartition,
) -> Result<ChernValue> {
    if mode_sites.len() != projector.size() {
        return Err(Error::DimensionMismatch(format!(
            "{} mode labels for a projector of size {}",
            mode_sites.len(),
            projector.size()
        )));
    }
    let modes: Vec<Vec<usize>> = part
        .sectors
        .iter()
        .map(|sector| {
            (0..mode_sites.len())
                .filter(|&m| sector.binary_search(&mode_sites[m]).is_ok())
                .collect()
        })
        .collect();
    if modes.iter().any(Vec::is_empty) {
        return Err(Error::InvalidPartition("a sector contains no modes".into()));
    }
    let (a, b, cc) = (&modes[0], &modes[1], &modes[2]);
    let p_ab = projector.block(a, b)?;
    let p_bc = projector.block(b, cc)?;
    let p_ca = projector.block(cc, a)?;
    let p_ac = projector.block(a, cc)?;
    let p_cb = projector.block(cc, b)?;
    let p_ba = projector.block(b, a)?;
    let forward = trace(&p_ab.dot(&p_bc).dot(&p_ca).view());
    let backward = trace(&p_ac.dot(&p_cb).dot(&p_ba).view());
    let value = (forward - backward) * I * C64::new(12.0 * PI, 0.0);
    Ok(ChernValue {
        nu: value.re,
        imag_residual: value.im.abs(),
    })
}

/// `nu` of the occupied band of a number-conserving model.
pub fn real_space_chern(p: &OccupiedProjector, part: &SectorPartition) -> Result<ChernValue> {
    let q = p.single_particle();
    let sites: Vec<usize> = (0..p.size()).collect();
    chern_marker(&q, &sites, part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{chern_insulator_model, trivial_on, ChernParams};
    use crate::oracles::tknn::lower_band_chern;
    use crate::spectral::occupied_projector;

    fn chern_projector(l: usize, mass: f64) -> (Lattice, OccupiedProjector) {
        let p = ChernParams {
            lx: l,
            ly: l,
            hopping: 1.0,
            mass,
            periodic: true,
        };
        let h = chern_insulator_model(&p).unwrap();
        (h.lattice().clone(), occupied_projector(&h).unwrap())
    }

    /// Literal triple sum, used to validate the block-trace evaluation.
    fn triple_sum(q: &Array2<C64>, part: &SectorPartition) -> C64 {
        let [a, b, cc] = part.sectors();
        let mut acc = C64::new(0.0, 0.0);
        for &j in a {
            for &k in b {
                for &l in cc {
                    acc += q[[j, k]] * q[[k, l]] * q[[l, j]] - q[[j, l]] * q[[l, k]] * q[[k, j]];
                }
            }
        }
        acc * I * 12.0 * PI
    }

    #[test]
    fn partition_sectors_are_disjoint_and_counterclockwise() {
        let lat = Lattice::square(12, 12, false).unwrap();
        let part = SectorPartition::centered(&lat).unwrap();
        let all: Vec<usize> = part.sectors().iter().flatten().copied().collect();
        let mut dedup = all.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        // Sector A starts on the positive x axis.
        let right = lat.site([9, 6], 0);
        assert!(part.sectors()[0].contains(&right));
        assert!(
            SectorPartition::disc(&Lattice::chain(8, false).unwrap(), [0.0, 0.0], 2.0).is_err()
        );
        assert!(SectorPartition::disc(&lat, [100.0, 100.0], 1.0).is_err());
    }

    #[test]
    fn block_trace_matches_triple_sum() {
        let (lat, p) = chern_projector(8, 1.0);
        let part = SectorPartition::centered(&lat).unwrap();
        let fast = real_space_chern(&p, &part).unwrap();
        let slow = triple_sum(&p.single_particle(), &part);
        assert!((fast.nu - slow.re).abs() < 1e-10);
    }

    #[test]
    fn topological_chern_model_matches_tknn() {
        for mass in [1.0, -1.0] {
            let (lat, p) = chern_projector(20, mass);
            let part = SectorPartition::centered(&lat).unwrap();
            let nu = real_space_chern(&p, &part).unwrap();
            let expected = lower_band_chern(1.0, mass, 24);
            assert_eq!(expected.abs(), 1);
            assert!(
                (nu.nu - expected as f64).abs() < 0.1,
                "mass {mass}: nu {}",
                nu.nu
            );
            assert!(nu.imag_residual < 1e-8);
        }
    }

    #[test]
    fn trivial_chern_model_vanishes() {
        let (lat, p) = chern_projector(20, 3.0);
        assert_eq!(lower_band_chern(1.0, 3.0, 24), 0);
        let nu = real_space_chern(&p, &SectorPartition::centered(&lat).unwrap()).unwrap();
        assert!(nu.nu.abs() < 0.05);
    }

    #[test]
    fn factorized_state_vanishes() {
        let lat = Lattice::square(20, 20, true).unwrap();
        let h = trivial_on(lat.clone(), 1.0).unwrap();
        let p = occupied_projector(&h).unwrap();
        let nu = real_space_chern(&p, &SectorPartition::centered(&lat).unwrap()).unwrap();
        assert!(nu.nu.abs() < 0.05);
    }

    #[test]
    fn radius_enlargement_keeps_value() {
        let (lat, p) = chern_projector(24, 1.0);
        let a = real_space_chern(&p, &SectorPartition::centered(&lat).unwrap()).unwrap();
        let b =
            real_space_chern(&p, &SectorPartition::centered_scaled(&lat, 1.25).unwrap()).unwrap();
        assert!((a.nu - b.nu).abs() < 0.05, "{} vs {}", a.nu, b.nu);
    }

    #[test]
    fn mode_label_mismatch_rejected() {
        let (lat, p) = chern_projector(6, 1.0);
        let part = SectorPartition::centered(&lat).unwrap();
        assert!(chern_marker(&p.single_particle(), &[0, 1], &part).is_err());
    }
}
