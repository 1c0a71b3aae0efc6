//! Chern number of the lower band of a two-band Bloch Hamiltonian,
//! computed on a discretized Brillouin zone from gauge-invariant plaquette
//! phases of link overlaps.

use std::f64::consts::PI;

use ndarray::Array2;

use crate::linalg::{eigh_raw, C64, I};

/// Chern number of the occupied band(s) of `bloch(kx, ky)` on an `n x n`
/// momentum grid.
pub fn fhs_chern<F>(bloch: F, occupied: usize, n: usize) -> i64
where
    F: Fn(f64, f64) -> Array2<C64>,
{
    let k = |i: usize| 2.0 * PI * i as f64 / n as f64;
    let mut frames: Vec<Array2<C64>> = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            let (_, vecs) =
                eigh_raw(&bloch(k(ix), k(iy)).view()).expect("Bloch matrix diagonalization");
            frames.push(vecs.slice(ndarray::s![.., ..occupied]).to_owned());
        }
    }
    let at = |ix: usize, iy: usize| &frames[(iy % n) * n + (ix % n)];
    let link = |a: &Array2<C64>, b: &Array2<C64>| {
        let overlap = a.t().mapv(|z| z.conj()).dot(b);
        let det = det_small(&overlap);
        det / det.norm()
    };
    let mut total = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let u1 = link(at(ix, iy), at(ix + 1, iy));
            let u2 = link(at(ix + 1, iy), at(ix + 1, iy + 1));
            let u3 = link(at(ix, iy + 1), at(ix + 1, iy + 1));
            let u4 = link(at(ix, iy), at(ix, iy + 1));
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    (total / (2.0 * PI)).round() as i64
}

fn det_small(m: &Array2<C64>) -> C64 {
    match m.nrows() {
        1 => m[[0, 0]],
        2 => m[[0, 0]] * m[[1, 1]] - m[[0, 1]] * m[[1, 0]],
        n => panic!("link determinant implemented for up to 2 bands, got {n}"),
    }
}

/// `h(k) = t [(m + cos kx + cos ky) sz + sin kx sx + sin ky sy]`.
pub fn two_band_bloch(t: f64, mass: f64, kx: f64, ky: f64) -> Array2<C64> {
    let dz = t * (mass + kx.cos() + ky.cos());
    let dx = t * kx.sin();
    let dy = t * ky.sin();
    ndarray::array![
        [C64::new(dz, 0.0), dx - I * dy],
        [dx + I * dy, C64::new(-dz, 0.0)]
    ]
}

pub fn lower_band_chern(t: f64, mass: f64, n: usize) -> i64 {
    fhs_chern(|kx, ky| two_band_bloch(t, mass, kx, ky), 1, n)
}
