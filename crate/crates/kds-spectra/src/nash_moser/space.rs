//! Graded spaces with smoothing operators.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// A finite-dimensional stand-in for a scale of Banach spaces `B^s`.
///
/// Elements are plain coefficient vectors. Norms must be non-decreasing in
/// `s`, and `smooth(θ, ·)` plays the role of `S_θ`.
pub trait GradedSpace {
    fn dim(&self) -> usize;
    fn norm(&self, s: f64, v: &[f64]) -> f64;
    fn smooth(&self, theta: f64, v: &[f64]) -> Vec<f64>;
}

/// `ℝ^m` with the same norm at every level and `S_θ = 1`.
#[derive(Debug, Clone)]
pub struct FlatSpace {
    pub dim: usize,
}

impl GradedSpace for FlatSpace {
    fn dim(&self) -> usize {
        self.dim
    }
    fn norm(&self, _s: f64, v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
    fn smooth(&self, _theta: f64, v: &[f64]) -> Vec<f64> {
        v.to_vec()
    }
}

/// Nodal values on `n` equispaced points of the circle.
///
/// `|v|_s² = weight · Σ (1+f²)^s |v̂_f|²` with `v̂ = fft(v)/n`, and `S_θ` keeps
/// the frequencies with `|f| ≤ θ`.
#[derive(Clone)]
pub struct SpectralSpace {
    n: usize,
    weight: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSpace").field("n", &self.n).field("weight", &self.weight).finish()
    }
}

pub fn make_spectral_space(grid_size: usize, weight: f64) -> SpectralSpace {
    let mut planner = FftPlanner::new();
    SpectralSpace {
        n: grid_size,
        weight,
        fwd: planner.plan_fft_forward(grid_size),
        inv: planner.plan_fft_inverse(grid_size),
    }
}

impl SpectralSpace {
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| 2.0 * PI * j as f64 / self.n as f64).collect()
    }

    pub fn freq(&self, k: usize) -> f64 {
        if k <= self.n / 2 {
            k as f64
        } else {
            k as f64 - self.n as f64
        }
    }

    pub fn coefficients(&self, v: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter().map(|z| z * s).collect()
    }

    fn synthesize(&self, mut c: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut c);
        c.iter().map(|z| z.re).collect()
    }
}

impl GradedSpace for SpectralSpace {
    fn dim(&self) -> usize {
        self.n
    }

    fn norm(&self, s: f64, v: &[f64]) -> f64 {
        let c = self.coefficients(v);
        let sum: f64 = c.iter().enumerate().map(|(k, z)| (1.0 + self.freq(k).powi(2)).powf(s) * z.norm_sqr()).sum();
        (self.weight * sum).sqrt()
    }

    fn smooth(&self, theta: f64, v: &[f64]) -> Vec<f64> {
        let mut c = self.coefficients(v);
        for (k, z) in c.iter_mut().enumerate() {
            if self.freq(k).abs() > theta {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        self.synthesize(c)
    }
}

/// `ℝ^lead ⊕` nodal values at the `n+1` Chebyshev–Lobatto points of `[0, length]`.
///
/// Node `j` sits at `x_j = length·(1 − cos(πj/n))/2`. Grading and smoothing act
/// on the Chebyshev coefficients; the leading scalars are left alone.
#[derive(Debug, Clone)]
pub struct ChebSpace {
    pub lead: usize,
    pub n: usize,
    pub length: f64,
}

impl ChebSpace {
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.length * (1.0 - (PI * j as f64 / self.n as f64).cos()) / 2.0).collect()
    }

    /// Chebyshev coefficients of nodal values (in the variable `t = 1 − 2x/length`).
    pub fn coefficients(&self, vals: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..=n)
            .map(|k| {
                let mut s = 0.0;
                for (j, v) in vals.iter().enumerate() {
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    s += w * v * (PI * (j * k) as f64 / n as f64).cos();
                }
                let c = 2.0 / n as f64 * s;
                if k == 0 || k == n {
                    c / 2.0
                } else {
                    c
                }
            })
            .collect()
    }

    pub fn values(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..=n)
            .map(|j| coeffs.iter().enumerate().map(|(k, a)| a * (PI * (j * k) as f64 / n as f64).cos()).sum())
            .collect()
    }

    /// Differentiation matrix in `x` on the nodes.
    pub fn diff_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n;
        let t: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
        let c = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 } * if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut d = nalgebra::DMatrix::zeros(n + 1, n + 1);
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    d[(i, j)] = c(i) / c(j) / (t[i] - t[j]);
                }
            }
        }
        // negative-sum trick for the diagonal
        for i in 0..=n {
            let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
            d[(i, i)] = -s;
        }
        d * (-2.0 / self.length)
    }

    /// Value and first two `x`-derivatives of the series at `x`.
    pub fn eval(&self, coeffs: &[f64], x: f64) -> [f64; 3] {
        let t = 1.0 - 2.0 * x / self.length;
        let d1 = cheb_derivative(coeffs);
        let d2 = cheb_derivative(&d1);
        let s = -2.0 / self.length;
        [clenshaw(coeffs, t), s * clenshaw(&d1, t), s * s * clenshaw(&d2, t)]
    }
}

fn cheb_derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n < 2 {
        return vec![0.0; n];
    }
    // c_{k−1} = c_{k+1} + 2k a_k, with c_0 halved at the end
    let mut c = vec![0.0; n + 1];
    for k in (1..n).rev() {
        c[k - 1] = c[k + 1] + 2.0 * k as f64 * a[k];
    }
    c[0] /= 2.0;
    c.truncate(n);
    c
}

fn clenshaw(a: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in a.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    a.first().copied().unwrap_or(0.0) + t * b1 - b2
}

impl GradedSpace for ChebSpace {
    fn dim(&self) -> usize {
        self.lead + self.n + 1
    }

    fn norm(&self, s: f64, v: &[f64]) -> f64 {
        let head: f64 = v[..self.lead].iter().map(|x| x * x).sum();
        let a = self.coefficients(&v[self.lead..]);
        let tail: f64 = a.iter().enumerate().map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c * c).sum();
        (head + tail).sqrt()
    }

    fn smooth(&self, theta: f64, v: &[f64]) -> Vec<f64> {
        let mut a = self.coefficients(&v[self.lead..]);
        for (k, c) in a.iter_mut().enumerate() {
            if k as f64 > theta {
                *c = 0.0;
            }
        }
        let mut out = v[..self.lead].to_vec();
        out.extend(self.values(&a));
        out
    }
}

/// Largest observed ratios `|S_θ v|_s / (θ^{s−t}|v|_t)` for `s ≥ t` and
/// `|v − S_θ v|_s / (θ^{s−t}|v|_t)` for `s ≤ t`, over seeded random `v` and `θ ∈ [4, 20]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConstants {
    pub smoothing: f64,
    pub remainder: f64,
}

pub fn measure_smoothing_constants(space: &dyn GradedSpace, samples: usize, seed: u64) -> SmoothingConstants {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let levels = [0.0, 1.0, 2.0, 4.0];
    let mut out = SmoothingConstants { smoothing: 0.0, remainder: 0.0 };
    for _ in 0..samples {
        let v: Vec<f64> = (0..space.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let theta: f64 = rng.gen_range(4.0..20.0);
        let sv = space.smooth(theta, &v);
        let rest: Vec<f64> = v.iter().zip(&sv).map(|(a, b)| a - b).collect();
        for &t in &levels {
            let nt = space.norm(t, &v);
            for &s in &levels {
                let scale = theta.powf(s - t) * nt;
                if s >= t {
                    out.smoothing = out.smoothing.max(space.norm(s, &sv) / scale);
                }
                if s <= t {
                    out.remainder = out.remainder.max(space.norm(s, &rest) / scale);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_on_single_frequencies() {
        let sp = make_spectral_space(32, 1.0);
        for f in 0..16 {
            let v: Vec<f64> = sp.nodes().iter().map(|x| (f as f64 * x).cos()).collect();
            for theta in [2.0, 5.5, 9.0] {
                let out = sp.smooth(theta, &v);
                let want: Vec<f64> = if f as f64 <= theta { v.clone() } else { vec![0.0; 32] };
                let err = out.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                assert!(err < 1e-13, "f={f} theta={theta}");
            }
        }
    }

    #[test]
    fn smoothing_inequalities_have_unit_constants() {
        let sp = make_spectral_space(64, 1.0);
        let c = measure_smoothing_constants(&sp, 60, 3);
        assert!(c.smoothing <= 1.0 && c.remainder <= 1.0, "{c:?}");
        assert!(c.remainder > 0.0);
    }

    #[test]
    fn norms_increase_with_regularity() {
        let sp = make_spectral_space(16, 2.0);
        let v: Vec<f64> = sp.nodes().iter().map(|x| x.sin() + 0.1 * (5.0 * x).cos()).collect();
        assert!(sp.norm(0.0, &v) <= sp.norm(1.0, &v) && sp.norm(1.0, &v) <= sp.norm(3.0, &v));
    }

    #[test]
    fn chebyshev_series_and_derivatives() {
        let sp = ChebSpace { lead: 0, n: 40, length: 6.0 };
        let vals: Vec<f64> = sp.nodes().iter().map(|x| (-x).exp() * x.sin()).collect();
        let a = sp.coefficients(&vals);
        let back = sp.values(&a);
        assert!(back.iter().zip(&vals).all(|(p, q)| (p - q).abs() < 1e-13));
        for x in [0.3, 2.2, 5.9] {
            let [u, du, ddu] = sp.eval(&a, x);
            let e = (-x as f64).exp();
            assert!((u - e * x.sin()).abs() < 1e-12);
            assert!((du - e * (x.cos() - x.sin())).abs() < 1e-10);
            assert!((ddu + 2.0 * e * x.cos()).abs() < 1e-8);
        }
        let d = sp.diff_matrix();
        let dv = d * nalgebra::DVector::from_vec(vals);
        for (x, got) in sp.nodes().iter().zip(dv.iter()) {
            assert!((got - (-x).exp() * (x.cos() - x.sin())).abs() < 1e-10);
        }
    }
}
