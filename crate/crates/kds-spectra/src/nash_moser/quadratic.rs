//! Pointwise quadratic model `u − u²/2 = f` on the circle.

use super::space::{make_spectral_space, SpectralSpace};
use super::{NashMoserProblem, Schedule};
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub space: SpectralSpace,
    pub f: Vec<f64>,
}

impl QuadraticModel {
    /// Seeded trigonometric data with frequencies `≤ 2` and sup norm `size`.
    pub fn new(grid_size: usize, size: f64, seed: u64) -> Self {
        let space = make_spectral_space(grid_size, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let raw: Vec<f64> = space
            .nodes()
            .iter()
            .map(|&x| c[0] + c[1] * x.cos() + c[2] * x.sin() + c[3] * (2.0 * x).cos() + c[4] * (2.0 * x).sin())
            .collect();
        let m = raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let f = raw.iter().map(|x| x * size / m).collect();
        QuadraticModel { space, f }
    }

    pub fn problem(&self) -> NashMoserProblem<'_> {
        let n = self.f.len();
        NashMoserProblem {
            phi: Box::new(move |u| u.iter().zip(&self.f).map(|(u, f)| u - u * u / 2.0 - f).collect()),
            dphi: Box::new(|u, v| u.iter().zip(v).map(|(u, v)| (1.0 - u) * v).collect()),
            psi: Box::new(|u, g| Ok(u.iter().zip(g).map(|(u, g)| g / (1.0 - u)).collect())),
            domain: Box::new(self.space.clone()),
            target: Box::new(self.space.clone()),
            d: 2,
            u0: vec![0.0; n],
            delta: 0.5,
        }
    }

    /// Default schedule with the smallness bound widened to `1`; the level-4
    /// norm of frequency-2 data is about ten times its sup norm.
    pub fn schedule() -> Schedule {
        Schedule { smallness: 1.0, ..Schedule::default() }
    }

    /// The root `1 − √(1 − 2f)` branch through `0`.
    pub fn closed_form(&self) -> Vec<f64> {
        self.f.iter().map(|f| 1.0 - (1.0 - 2.0 * f).sqrt()).collect()
    }

    /// Pointwise damped Newton from `0`, independent of any smoothing.
    pub fn damped_newton(&self, tol: f64) -> Vec<f64> {
        self.f
            .iter()
            .map(|&f| {
                let g = |u: f64| u - u * u / 2.0 - f;
                let mut u = 0.0;
                for _ in 0..100 {
                    if g(u).abs() < tol {
                        break;
                    }
                    let step = g(u) / (1.0 - u);
                    let mut lam = 1.0;
                    while g(u - lam * step).abs() >= g(u).abs() && lam > 1e-6 {
                        lam /= 2.0;
                    }
                    u -= lam * step;
                }
                u
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::run_nash_moser;
    use super::*;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn converges_to_closed_form_root() {
        let m = QuadraticModel::new(32, 0.01, 5);
        let out = run_nash_moser(&m.problem(), &QuadraticModel::schedule()).unwrap();
        assert!(max_diff(&out.u, &m.closed_form()) < 1e-10);
        assert!(max_diff(&out.u, &m.damped_newton(1e-15)) < 1e-10);
        assert!(out.trace.superlinear, "{:?}", out.trace.ratios);
        // linear level: u ≈ f + f²/2
        let lin: Vec<f64> = m.f.iter().map(|f| f + f * f / 2.0).collect();
        assert!(max_diff(&out.u, &lin) < 1e-5);
    }

    #[test]
    fn refinement_invariance() {
        let m = QuadraticModel::new(32, 0.01, 6);
        let s = Schedule { tol: 1e-14, ..QuadraticModel::schedule() };
        let a = run_nash_moser(&m.problem(), &s).unwrap();
        let b = run_nash_moser(&m.problem(), &s.refined(3)).unwrap();
        assert!(max_diff(&a.u, &b.u) < 1e-9);
    }
}
