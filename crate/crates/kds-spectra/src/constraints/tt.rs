//! Transverse-traceless projection for the flat torus metric.

use super::torus::{SymField, TorusGrid};
use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Traceless, divergence-free part of `u` with respect to the flat metric.
///
/// Mode by mode this is `PuP − ½P tr(Pu)` with `P = 1 − k̂k̂ᵀ`, which is the
/// result of removing `δ*W` and the trace with `W` solved from the vector
/// Laplacian. The mean becomes its traceless part; Nyquist modes are dropped.
pub fn tt_project(grid: &TorusGrid, u: &[Matrix3<f64>]) -> SymField {
    let len = grid.len();
    let hat: Vec<Vec<Complex64>> = PAIRS.iter().map(|&(a, b)| grid.fft(&grid.component(u, a, b))).collect();
    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); len]; 6];
    for i in 0..len {
        if grid.is_nyquist(i) {
            continue;
        }
        let mut m = nalgebra::Matrix3::<Complex64>::zeros();
        for (c, &(a, b)) in PAIRS.iter().enumerate() {
            m[(a, b)] = hat[c][i];
            m[(b, a)] = hat[c][i];
        }
        let k = grid.wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let p = if k2 == 0.0 {
            Matrix3::identity()
        } else {
            Matrix3::from_fn(|a, b| if a == b { 1.0 } else { 0.0 } - k[a] * k[b] / k2)
        };
        let pc = p.map(|x| Complex64::new(x, 0.0));
        let pup = pc * m * pc;
        let tr = pup.trace();
        let rank = if k2 == 0.0 { 3.0 } else { 2.0 };
        // on the mean P = 1 and the trace is split over three directions
        let res = pup - pc * (tr / rank);
        for (c, &(a, b)) in PAIRS.iter().enumerate() {
            out[c][i] = res[(a, b)];
        }
    }
    let comps: Vec<Vec<f64>> = out.into_iter().map(|c| grid.ifft(c)).collect();
    (0..len)
        .map(|i| {
            let mut m = Matrix3::zeros();
            for (c, &(a, b)) in PAIRS.iter().enumerate() {
                m[(a, b)] = comps[c][i];
                m[(b, a)] = comps[c][i];
            }
            m
        })
        .collect()
}

/// Seeded smooth TT field built from modes with `|k_a| ≤ kmax`, scaled to
/// sup norm `amplitude`.
pub fn random_tt(grid: &TorusGrid, seed: u64, kmax: i32, amplitude: f64) -> SymField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for k0 in -kmax..=kmax {
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                let c: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let s: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let w = 1.0 / (1.0 + (k0 * k0 + k1 * k1 + k2 * k2) as f64);
                modes.push(([k0 as f64, k1 as f64, k2 as f64], c.map(|x| x * w), s.map(|x| x * w)));
            }
        }
    }
    let raw = grid.sample(|x| {
        let mut m = Matrix3::zeros();
        for (k, c, s) in &modes {
            let ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            let (sn, cs) = ph.sin_cos();
            for (j, &(a, b)) in PAIRS.iter().enumerate() {
                let v = c[j] * cs + s[j] * sn;
                m[(a, b)] += v;
                if a != b {
                    m[(b, a)] += v;
                }
            }
        }
        m
    });
    let tt = tt_project(grid, &raw);
    let norm = super::torus::sup_sym(&tt);
    if norm == 0.0 {
        return tt;
    }
    tt.into_iter().map(|m| m * (amplitude / norm)).collect()
}
