//! The model ODE `(∂_x + 1)∂_x u = u²` near `u = 0`.
//!
//! Its linearization has the decaying mode `e^{−x}` and the zero mode `1`.
//! Prescribing `(u(0), u'(0)) = (a, b)` alone does not single out a decaying
//! solution; the data are modified by `c·(1, 0)`, a one-dimensional space,
//! and the constant mode is suppressed by `u(X) = 0` at the far end.
//! Unknowns are `[c, u(x_0), …, u(x_n)]` on Chebyshev–Lobatto nodes.

use super::space::{ChebSpace, FlatSpace, GradedSpace};
use super::NashMoserProblem;
use super::{run_nash_moser, Schedule};
use crate::error::KdsError;
use crate::numeric::fit::fit_line;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone)]
pub struct ToyOde {
    pub a: f64,
    pub b: f64,
    pub space: ChebSpace,
    diff: DMatrix<f64>,
    diff2: DMatrix<f64>,
}

impl ToyOde {
    pub fn new(a: f64, b: f64, n: usize, length: f64) -> Self {
        let space = ChebSpace { lead: 1, n, length };
        let diff = space.diff_matrix();
        let diff2 = &diff * &diff;
        ToyOde { a, b, space, diff, diff2 }
    }

    /// Data `|(a, b)| = size` in the direction `(0.6, 0.8)`, 56 modes on `[0, 24]`.
    pub fn with_data_size(size: f64) -> Self {
        ToyOde::new(0.6 * size, 0.8 * size, 56, 24.0)
    }

    pub fn problem(&self) -> NashMoserProblem<'_> {
        let n = self.space.n;
        NashMoserProblem {
            phi: Box::new(move |v| self.phi(v)),
            dphi: Box::new(move |v, w| (self.jacobian(v) * DVector::from_column_slice(w)).as_slice().to_vec()),
            psi: Box::new(move |v, f| {
                self.jacobian(v)
                    .lu()
                    .solve(&DVector::from_column_slice(f))
                    .map(|x| x.as_slice().to_vec())
                    .ok_or_else(|| KdsError::VerificationFailed("singular linearization".into()))
            }),
            domain: Box::new(self.space.clone()),
            target: Box::new(FlatSpace { dim: n + 2 }),
            d: 2,
            u0: vec![0.0; n + 2],
            delta: 1.0,
        }
    }

    fn phi(&self, v: &[f64]) -> Vec<f64> {
        let n = self.space.n;
        let c = v[0];
        let u = DVector::from_column_slice(&v[1..]);
        let du = &self.diff * &u;
        let ddu = &self.diff2 * &u;
        let mut r = vec![u[0] - self.a - c, du[0] - self.b, u[n]];
        r.extend((1..n).map(|j| ddu[j] + du[j] - u[j] * u[j]));
        r
    }

    fn jacobian(&self, v: &[f64]) -> DMatrix<f64> {
        let n = self.space.n;
        let mut j = DMatrix::zeros(n + 2, n + 2);
        j[(0, 0)] = -1.0;
        j[(0, 1)] = 1.0;
        for k in 0..=n {
            j[(1, k + 1)] = self.diff[(0, k)];
        }
        j[(2, n + 1)] = 1.0;
        for row in 1..n {
            for k in 0..=n {
                j[(row + 2, k + 1)] = self.diff2[(row, k)] + self.diff[(row, k)];
            }
            j[(row + 2, row + 1)] -= 2.0 * v[row + 1];
        }
        j
    }

    pub fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        self.space.coefficients(&v[1..])
    }

    /// `max |u'' + u' − u²|` at seeded uniform points, from the Chebyshev series.
    pub fn collocation_error(&self, v: &[f64], points: usize, seed: u64) -> f64 {
        let a = self.coefficients(v);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..points)
            .map(|_| {
                let x = rng.gen_range(0.0..self.space.length);
                let [u, du, ddu] = self.space.eval(&a, x);
                (ddu + du - u * u).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `(u(0), u'(0)) − (a, b)`; lies on the line spanned by `(1, 0)`.
    pub fn data_modification(&self, v: &[f64]) -> [f64; 2] {
        let [u, du, _] = self.space.eval(&self.coefficients(v), 0.0);
        [u - self.a, du - self.b]
    }

    /// Slope of `log|u|` over `x ∈ [2, 12]`.
    pub fn decay_rate(&self, v: &[f64]) -> f64 {
        let a = self.coefficients(v);
        let xs: Vec<f64> = (0..=20).map(|i| 2.0 + 0.5 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.space.eval(&a, x)[0].abs().ln()).collect();
        fit_line(&xs, &ys).slope
    }

    /// Runs the scheme without the smallness gate for each data size and
    /// records whether it converged.
    pub fn empirical_basin(sizes: &[f64]) -> Vec<(f64, bool)> {
        let sched = Schedule { smallness: f64::INFINITY, ..Schedule::default() };
        sizes.iter().map(|&s| (s, run_nash_moser(&ToyOde::with_data_size(s).problem(), &sched).is_ok())).collect()
    }

    /// Level-`s` size of the unknown, for reporting.
    pub fn size(&self, s: f64, v: &[f64]) -> f64 {
        self.space.norm(s, v)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tame_profile;
    use super::*;

    #[test]
    fn small_data_converges_to_decaying_solution() {
        let toy = ToyOde::with_data_size(1e-3);
        let out = run_nash_moser(&toy.problem(), &Schedule::default()).unwrap();
        assert!(out.trace.final_residual < 1e-10);
        assert!(out.trace.iterations <= 12, "{:?}", out.trace);
        assert!(out.trace.superlinear, "{:?}", out.trace.ratios);
        assert!(toy.collocation_error(&out.u, 200, 4) < 1e-8);
        let m = toy.data_modification(&out.u);
        assert!(m[1].abs() < 1e-10 && (m[0] - out.u[0]).abs() < 1e-10);
        assert!((toy.decay_rate(&out.u) + 1.0).abs() < 1e-2);
    }

    #[test]
    fn zero_data_is_fixed() {
        let toy = ToyOde::with_data_size(0.0);
        let out = run_nash_moser(&toy.problem(), &Schedule::default()).unwrap();
        assert_eq!(out.trace.iterations, 1);
        assert!(out.u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn refined_schedule_gives_same_solution() {
        let toy = ToyOde::with_data_size(1e-3);
        let p = toy.problem();
        let s = Schedule { tol: 1e-13, ..Schedule::default() };
        let a = run_nash_moser(&p, &s).unwrap();
        let b = run_nash_moser(&p, &s.refined(2)).unwrap();
        let diff = a.u.iter().zip(&b.u).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn large_data_is_rejected() {
        let toy = ToyOde::with_data_size(0.5);
        let err = run_nash_moser(&toy.problem(), &Schedule::default()).unwrap_err();
        assert_eq!(err.kind(), "smallness-violated");
    }

    #[test]
    fn basin_contains_small_data() {
        let b = ToyOde::empirical_basin(&[1e-3, 0.1, 2.0]);
        assert!(b[0].1 && b[1].1 && !b[2].1);
    }

    #[test]
    fn tame_constants_are_finite() {
        let toy = ToyOde::with_data_size(1e-3);
        let t = tame_profile(&toy.problem(), 1e-3, 5, 2).unwrap();
        assert!(t.iter().all(|s| s.derivative.is_finite() && s.inverse.is_finite() && s.inverse > 0.0));
    }
}
