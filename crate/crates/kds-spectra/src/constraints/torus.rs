//! Fourier collocation on the flat torus `(ℝ/2πℤ)³`.

use crate::error::{KdsError, Result};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Symmetric 2-tensor field, one matrix per node.
pub type SymField = Vec<Matrix3<f64>>;

/// `N³` equispaced nodes, index `(i·N + j)·N + l`.
#[derive(Clone)]
pub struct TorusGrid {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TorusGrid").field("n", &self.n).finish()
    }
}

impl TorusGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(KdsError::InvalidParams(format!("torus grid needs an even size >= 4, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(TorusGrid { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn triple(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        self.triple(idx).map(|i| i as f64 * h)
    }

    /// Signed wavenumber of a Fourier index; Nyquist counts as `+N/2`.
    pub fn wave(&self, i: usize) -> f64 {
        if i <= self.n / 2 {
            i as f64
        } else {
            i as f64 - self.n as f64
        }
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.triple(idx).map(|i| self.wave(i))
    }

    /// True when some component sits on the Nyquist frequency.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.triple(idx).iter().any(|&i| i == self.n / 2)
    }

    pub fn sample<T>(&self, f: impl Fn([f64; 3]) -> T) -> Vec<T> {
        (0..self.len()).map(|i| f(self.point(i))).collect()
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        // last axis is contiguous
        plan.process(data);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for stride in [n, n * n] {
            for base in 0..self.len() {
                if (base / stride) % n != 0 {
                    continue;
                }
                for (m, b) in buf.iter_mut().enumerate() {
                    *b = data[base + m * stride];
                }
                plan.process(&mut buf);
                for (m, b) in buf.iter().enumerate() {
                    data[base + m * stride] = *b;
                }
            }
        }
        if inverse {
            let s = 1.0 / self.len() as f64;
            data.iter_mut().for_each(|c| *c *= s);
        }
    }

    pub fn fft(&self, f: &[f64]) -> Vec<Complex64> {
        let mut c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut c, false);
        c
    }

    pub fn ifft(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut c, true);
        c.into_iter().map(|z| z.re).collect()
    }

    /// Applies the Fourier multiplier `m(k)`.
    pub fn multiply(&self, f: &[f64], m: impl Fn(usize, [f64; 3]) -> Complex64) -> Vec<f64> {
        let mut c = self.fft(f);
        for (i, z) in c.iter_mut().enumerate() {
            *z *= m(i, self.wavevector(i));
        }
        self.ifft(c)
    }

    /// `∂_axis f`, with the Nyquist mode dropped.
    pub fn deriv(&self, f: &[f64], axis: usize) -> Vec<f64> {
        self.multiply(f, |i, k| {
            if self.triple(i)[axis] == self.n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k[axis])
            }
        })
    }

    pub fn gradient(&self, f: &[f64]) -> [Vec<f64>; 3] {
        let c = self.fft(f);
        std::array::from_fn(|a| {
            let mut d = c.clone();
            for (i, z) in d.iter_mut().enumerate() {
                let t = self.triple(i);
                *z *= if t[a] == self.n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, self.wave(t[a])) };
            }
            self.ifft(d)
        })
    }

    /// Non-negative Laplacian `Δ = −Σ∂²`.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.multiply(f, |_, k| Complex64::new(k[0] * k[0] + k[1] * k[1] + k[2] * k[2], 0.0))
    }

    /// `L²` pairing with the flat volume element.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let h = self.spacing();
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h * h * h
    }

    /// Restriction to the grid of half the size, by taking every other node.
    pub fn coarsen<T: Clone>(&self, f: &[T]) -> Vec<T> {
        let n = self.n;
        let m = n / 2;
        (0..m * m * m)
            .map(|c| {
                let (i, j, l) = (c / (m * m), (c / m) % m, c % m);
                f[((2 * i) * n + 2 * j) * n + 2 * l].clone()
            })
            .collect()
    }

    pub fn component(&self, u: &[Matrix3<f64>], a: usize, b: usize) -> Vec<f64> {
        u.iter().map(|m| m[(a, b)]).collect()
    }

    /// `∂_c u` for every `c`, per node.
    pub fn sym_gradient(&self, u: &[Matrix3<f64>]) -> [SymField; 3] {
        let mut out: [SymField; 3] = std::array::from_fn(|_| vec![Matrix3::zeros(); self.len()]);
        for a in 0..3 {
            for b in a..3 {
                let g = self.gradient(&self.component(u, a, b));
                for (c, gc) in g.iter().enumerate() {
                    for (m, v) in out[c].iter_mut().zip(gc) {
                        m[(a, b)] = *v;
                        m[(b, a)] = *v;
                    }
                }
            }
        }
        out
    }

    /// Flat divergence `(δu)_c = −Σ_a ∂_a u_{ac}`.
    pub fn flat_divergence(&self, u: &[Matrix3<f64>]) -> Vec<Vector3<f64>> {
        let d = self.sym_gradient(u);
        (0..self.len()).map(|i| Vector3::from_fn(|c, _| -(0..3).map(|a| d[a][i][(a, c)]).sum::<f64>())).collect()
    }
}

pub fn sup(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sup_sym(u: &[Matrix3<f64>]) -> f64 {
    u.iter().fold(0.0, |m, x| m.max(x.amax()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_derivative() {
        let g = TorusGrid::new(16).unwrap();
        let f = g.sample(|x| (x[0]).sin() * (2.0 * x[1]).cos() + 0.3 * (x[2] - x[0]).cos());
        let back = g.ifft(g.fft(&f));
        assert!(f.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-13));
        let dx = g.deriv(&f, 0);
        let want = g.sample(|x| x[0].cos() * (2.0 * x[1]).cos() + 0.3 * (x[2] - x[0]).sin());
        assert!(dx.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12));
        let lap = g.laplacian(&f);
        let want = g.sample(|x| 5.0 * x[0].sin() * (2.0 * x[1]).cos() + 0.6 * (x[2] - x[0]).cos());
        assert!(lap.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-11));
    }

    #[test]
    fn axis_layout() {
        let g = TorusGrid::new(8).unwrap();
        let f = g.sample(|x| (x[1]).sin());
        let d = g.deriv(&f, 1);
        let want = g.sample(|x| (x[1]).cos());
        assert!(d.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(sup(&g.deriv(&f, 0)) < 1e-13);
        assert!(sup(&g.deriv(&f, 2)) < 1e-13);
    }
}
