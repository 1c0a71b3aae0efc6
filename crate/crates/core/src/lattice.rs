//! Finite Bravais lattices in one and two dimensions.
//!
//! Sites are ordered row-major by cell coordinate (x fastest), with the
//! orbital index innermost. The distance is the graph distance of the
//! nearest-neighbour network: Manhattan distance between cells, respecting
//! periodic wraparound, plus one when two orbitals of a cell differ.
//!
//! The doubled lattice used by the interpolation path stacks two copies,
//! all `Up` sites first and then all `Down` sites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl Boundary {
    pub fn from_flag(periodic: bool) -> Self {
        if periodic {
            Boundary::Periodic
        } else {
            Boundary::Open
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyLabel {
    Up,
    Down,
}

/// A site `(i, a)` of the two-copy lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DoubledSite {
    pub base: usize,
    pub copy: CopyLabel,
}

impl DoubledSite {
    pub fn up(base: usize) -> Self {
        DoubledSite {
            base,
            copy: CopyLabel::Up,
        }
    }

    pub fn down(base: usize) -> Self {
        DoubledSite {
            base,
            copy: CopyLabel::Down,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    extents: Vec<usize>,
    boundaries: Vec<Boundary>,
    orbitals: usize,
}

impl Lattice {
    pub fn chain(sites: usize, periodic: bool) -> Result<Self> {
        if sites < 2 {
            return Err(Error::InvalidSize(format!(
                "chain needs at least 2 sites, got {sites}"
            )));
        }
        Ok(Lattice {
            extents: vec![sites],
            boundaries: vec![Boundary::from_flag(periodic)],
            orbitals: 1,
        })
    }

    pub fn square(lx: usize, ly: usize, periodic: bool) -> Result<Self> {
        if lx < 2 || ly < 2 {
            return Err(Error::InvalidSize(format!(
                "square lattice needs extents >= 2, got {lx}x{ly}"
            )));
        }
        let b = Boundary::from_flag(periodic);
        Ok(Lattice {
            extents: vec![lx, ly],
            boundaries: vec![b, b],
            orbitals: 1,
        })
    }

    /// Places `orbitals` distinct sites in every unit cell.
    pub fn with_orbitals(mut self, orbitals: usize) -> Result<Self> {
        if orbitals == 0 {
            return Err(Error::InvalidSize(
                "a cell needs at least one orbital".into(),
            ));
        }
        self.orbitals = orbitals;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn boundary(&self, axis: usize) -> Boundary {
        self.boundaries[axis]
    }

    pub fn is_open(&self) -> bool {
        self.boundaries.iter().all(|b| *b == Boundary::Open)
    }

    pub fn orbitals(&self) -> usize {
        self.orbitals
    }

    pub fn num_cells(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn num_sites(&self) -> usize {
        self.num_cells() * self.orbitals
    }

    /// Smallest linear extent, the `L` of an `L x L` sample.
    pub fn linear_size(&self) -> usize {
        self.extents.iter().copied().min().unwrap_or(0)
    }

    pub fn cell_of(&self, site: usize) -> [usize; 2] {
        let cell = site / self.orbitals;
        let lx = self.extents[0];
        [cell % lx, cell / lx]
    }

    pub fn orbital_of(&self, site: usize) -> usize {
        site % self.orbitals
    }

    pub fn site(&self, cell: [usize; 2], orbital: usize) -> usize {
        (cell[1] * self.extents[0] + cell[0]) * self.orbitals + orbital
    }

    /// Cartesian position of the cell hosting `site`, in lattice units.
    pub fn position(&self, site: usize) -> [f64; 2] {
        let c = self.cell_of(site);
        [c[0] as f64, c[1] as f64]
    }

    fn axis_distance(&self, axis: usize, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        match self.boundaries[axis] {
            Boundary::Open => d,
            Boundary::Periodic => d.min(self.extents[axis] - d),
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> usize {
        let (ci, cj) = (self.cell_of(i), self.cell_of(j));
        let mut d = 0;
        for axis in 0..self.dimension() {
            d += self.axis_distance(axis, ci[axis], cj[axis]);
        }
        if self.orbital_of(i) != self.orbital_of(j) {
            d += 1;
        }
        d
    }

    /// The cell one step along `axis` (`forward` or backward), if it exists.
    pub fn neighbor_cell(
        &self,
        cell: [usize; 2],
        axis: usize,
        forward: bool,
    ) -> Option<[usize; 2]> {
        let len = self.extents[axis];
        let x = cell[axis];
        let moved = match (forward, self.boundaries[axis]) {
            (true, _) if x + 1 < len => x + 1,
            (true, Boundary::Periodic) => 0,
            (false, _) if x > 0 => x - 1,
            (false, Boundary::Periodic) => len - 1,
            _ => return None,
        };
        let mut out = cell;
        out[axis] = moved;
        Some(out)
    }

    pub fn cells(&self) -> impl Iterator<Item = [usize; 2]> + '_ {
        let lx = self.extents[0];
        (0..self.num_cells()).map(move |c| [c % lx, c / lx])
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.num_sites() {
            return Err(Error::InvalidInput(format!(
                "site {site} outside lattice of {} sites",
                self.num_sites()
            )));
        }
        Ok(())
    }

    /// `dist'((i,a),(j,b)) = dist(i,j) + (1 - delta_ab)`.
    pub fn doubled_dist(&self, p: DoubledSite, q: DoubledSite) -> Result<usize> {
        self.check_site(p.base)?;
        self.check_site(q.base)?;
        Ok(self.dist(p.base, q.base) + usize::from(p.copy != q.copy))
    }

    pub fn doubled_index(&self, p: DoubledSite) -> usize {
        match p.copy {
            CopyLabel::Up => p.base,
            CopyLabel::Down => self.num_sites() + p.base,
        }
    }

    pub fn doubled_site(&self, index: usize) -> DoubledSite {
        let v = self.num_sites();
        if index < v {
            DoubledSite::up(index)
        } else {
            DoubledSite::down(index - v)
        }
    }

    /// Sites within graph distance `margin` of any site of `subset`.
    pub fn neighborhood(&self, subset: &[usize], margin: usize) -> Vec<usize> {
        (0..self.num_sites())
            .filter(|&i| subset.iter().any(|&y| self.dist(i, y) <= margin))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_distances() {
        let ring = Lattice::chain(4, true).unwrap();
        assert_eq!(ring.dist(0, 3), 1);
        let open = Lattice::chain(4, false).unwrap();
        assert_eq!(open.dist(0, 3), 3);
        assert!(matches!(
            Lattice::chain(1, true),
            Err(Error::InvalidSize(_))
        ));
    }

    #[test]
    fn square_distances() {
        let open = Lattice::square(3, 3, false).unwrap();
        assert_eq!(open.dist(open.site([0, 0], 0), open.site([2, 2], 0)), 4);
        let torus = Lattice::square(4, 4, true).unwrap();
        assert_eq!(torus.dist(torus.site([0, 0], 0), torus.site([3, 0], 0)), 1);
        assert!(Lattice::square(1, 4, false).is_err());
    }

    #[test]
    fn doubled_metric_examples() {
        let l = Lattice::chain(8, false).unwrap();
        assert_eq!(
            l.doubled_dist(DoubledSite::up(2), DoubledSite::up(2))
                .unwrap(),
            0
        );
        assert_eq!(
            l.doubled_dist(DoubledSite::up(2), DoubledSite::down(2))
                .unwrap(),
            1
        );
        assert_eq!(
            l.doubled_dist(DoubledSite::up(1), DoubledSite::down(4))
                .unwrap(),
            4
        );
        assert!(l
            .doubled_dist(DoubledSite::up(8), DoubledSite::up(0))
            .is_err());
    }

    fn check_metric_axioms(n: usize, d: impl Fn(usize, usize) -> usize) {
        for i in 0..n {
            assert_eq!(d(i, i), 0);
            for j in 0..n {
                let dij = d(i, j);
                assert_eq!(dij, d(j, i));
                if i != j {
                    assert!(dij > 0, "distinct sites {i},{j} at distance 0");
                }
                for k in 0..n {
                    assert!(d(i, k) <= dij + d(j, k));
                }
            }
        }
    }

    #[test]
    fn metric_axioms_exhaustive() {
        let lattices = [
            Lattice::chain(7, true).unwrap(),
            Lattice::chain(9, false).unwrap(),
            Lattice::square(4, 4, true).unwrap(),
            Lattice::square(3, 5, false).unwrap(),
            Lattice::square(3, 3, true)
                .unwrap()
                .with_orbitals(2)
                .unwrap(),
        ];
        for l in &lattices {
            assert!(l.num_sites() <= 64);
            check_metric_axioms(l.num_sites(), |i, j| l.dist(i, j));
            let n2 = 2 * l.num_sites();
            check_metric_axioms(n2, |p, q| {
                l.doubled_dist(l.doubled_site(p), l.doubled_site(q))
                    .unwrap()
            });
        }
    }

    #[test]
    fn doubled_metric_restricts_to_base() {
        let l = Lattice::square(4, 3, false).unwrap();
        for i in 0..l.num_sites() {
            for j in 0..l.num_sites() {
                let base = l.dist(i, j);
                assert_eq!(
                    l.doubled_dist(DoubledSite::up(i), DoubledSite::up(j))
                        .unwrap(),
                    base
                );
                assert_eq!(
                    l.doubled_dist(DoubledSite::down(i), DoubledSite::down(j))
                        .unwrap(),
                    base
                );
                assert_eq!(
                    l.doubled_dist(DoubledSite::up(i), DoubledSite::down(j))
                        .unwrap(),
                    base + 1
                );
            }
        }
    }

    #[test]
    fn ordering_is_row_major() {
        let l = Lattice::square(3, 2, false)
            .unwrap()
            .with_orbitals(2)
            .unwrap();
        assert_eq!(l.num_sites(), 12);
        assert_eq!(l.site([1, 0], 1), 3);
        assert_eq!(l.site([0, 1], 0), 6);
        for s in 0..l.num_sites() {
            assert_eq!(l.site(l.cell_of(s), l.orbital_of(s)), s);
        }
        assert_eq!(l.doubled_index(DoubledSite::down(5)), 17);
        assert_eq!(l.doubled_site(17), DoubledSite::down(5));
    }
}
