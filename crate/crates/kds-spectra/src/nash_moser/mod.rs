//! Nash–Moser iteration with smoothing, in the Saint-Raymond form.
//!
//! A [`NashMoserProblem`] bundles a map `φ`, its derivative, a right inverse
//! `ψ` of the derivative and graded spaces for domain and target. The
//! iteration is
//!
//! ```text
//! u_{k+1} = u_k − S_{θ_k} ψ(u_k) φ(u_k),    θ_k = θ₀ ρ^k
//! ```
//!
//! and stops once `max |φ(u)|` drops below the schedule tolerance.
//!
//! ```
//! use kds_spectra::nash_moser::*;
//! let toy = ToyOde::with_data_size(1e-3);
//! let out = run_nash_moser(&toy.problem(), &Schedule::default()).unwrap();
//! assert!(out.trace.final_residual < 1e-10);
//! assert!(toy.collocation_error(&out.u, 200, 1) < 1e-8);
//! ```

mod quadratic;
mod space;
mod toy;

pub use quadratic::QuadraticModel;
pub use space::{
    make_spectral_space, measure_smoothing_constants, ChebSpace, FlatSpace, GradedSpace, SmoothingConstants,
    SpectralSpace,
};
pub use toy::ToyOde;

use crate::error::{KdsError, Result};
use serde::{Deserialize, Serialize};

pub type MapFn<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;
pub type LinFn<'a> = Box<dyn Fn(&[f64], &[f64]) -> Vec<f64> + 'a>;
pub type SolveFn<'a> = Box<dyn Fn(&[f64], &[f64]) -> Result<Vec<f64>> + 'a>;

pub struct NashMoserProblem<'a> {
    pub phi: MapFn<'a>,
    /// `(u, v) ↦ φ'(u)v`.
    pub dphi: LinFn<'a>,
    /// `(u, f) ↦ ψ(u)f` with `φ'(u)ψ(u) = 1`.
    pub psi: SolveFn<'a>,
    pub domain: Box<dyn GradedSpace + 'a>,
    pub target: Box<dyn GradedSpace + 'a>,
    /// Loss of derivatives.
    pub d: u32,
    pub u0: Vec<f64>,
    /// Radius of the neighborhood of `u0` (level-0 norm) the iterates must stay in.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Schedule {
    pub theta0: f64,
    pub rho: f64,
    /// Each factor `ρ` is split into this many equal geometric substeps.
    pub substeps: u32,
    pub max_iter: usize,
    pub tol: f64,
    /// Bound on `|φ(u0)|_{2d}`.
    pub smallness: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { theta0: 4.0, rho: 1.5, substeps: 1, max_iter: 40, tol: 1e-10, smallness: 0.05 }
    }
}

impl Schedule {
    pub fn theta(&self, k: usize) -> f64 {
        self.theta0 * self.rho.powf(k as f64 / self.substeps.max(1) as f64)
    }

    pub fn refined(&self, substeps: u32) -> Self {
        Schedule { substeps, max_iter: self.max_iter * substeps as usize, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NmStep {
    pub iteration: usize,
    pub theta: f64,
    /// `max |φ(u_k)|` before the step.
    pub residual: f64,
    /// Level-0 norm of the applied correction.
    pub step_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NmTrace {
    pub steps: Vec<NmStep>,
    pub final_residual: f64,
    pub iterations: usize,
    pub loss: u32,
    /// `16d² + 43d + 24`, recorded only.
    pub regularity_bound: u32,
    pub initial_size: f64,
    /// Successive residual ratios `r_{k+1}/r_k` above the round-off floor.
    pub ratios: Vec<f64>,
    pub superlinear: bool,
}

#[derive(Debug, Clone)]
pub struct NmOutcome {
    pub u: Vec<f64>,
    pub trace: NmTrace,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn regularity_bound(d: u32) -> u32 {
    16 * d * d + 43 * d + 24
}

/// Runs the smoothed Newton scheme. At least one step is always taken.
pub fn run_nash_moser(problem: &NashMoserProblem<'_>, schedule: &Schedule) -> Result<NmOutcome> {
    let p = problem;
    if p.u0.len() != p.domain.dim() {
        return Err(KdsError::InvalidParams(format!("u0 has length {}, domain has {}", p.u0.len(), p.domain.dim())));
    }
    let f0 = (p.phi)(&p.u0);
    let initial_size = p.target.norm(2.0 * p.d as f64, &f0);
    if !(initial_size <= schedule.smallness) {
        return Err(KdsError::SmallnessViolated(format!(
            "|phi(u0)|_{} = {initial_size:e} exceeds {:e}",
            2 * p.d,
            schedule.smallness
        )));
    }
    let mut u = p.u0.clone();
    let mut steps = Vec::new();
    let mut f = f0;
    let first = sup(&f);
    let history = |steps: &[NmStep], last: f64| steps.iter().map(|s| s.residual).chain([last]).collect::<Vec<_>>();
    for k in 0..schedule.max_iter {
        let res = sup(&f);
        if !res.is_finite() || res > 1e6 * first.max(1e-300) {
            return Err(KdsError::Diverged { iteration: k, residual: res, trace: history(&steps, res) });
        }
        if k > 0 && res < schedule.tol {
            return Ok(finish(p, u, steps, res, initial_size));
        }
        let theta = schedule.theta(k);
        let minus_f: Vec<f64> = f.iter().map(|x| -x).collect();
        let corr = p.domain.smooth(theta, &(p.psi)(&u, &minus_f)?);
        for (a, b) in u.iter_mut().zip(&corr) {
            *a += b;
        }
        let dist: Vec<f64> = u.iter().zip(&p.u0).map(|(a, b)| a - b).collect();
        if p.domain.norm(0.0, &dist) > p.delta {
            return Err(KdsError::Diverged { iteration: k, residual: res, trace: history(&steps, res) });
        }
        steps.push(NmStep { iteration: k, theta, residual: res, step_norm: p.domain.norm(0.0, &corr) });
        f = (p.phi)(&u);
    }
    let res = sup(&f);
    if res < schedule.tol {
        return Ok(finish(p, u, steps, res, initial_size));
    }
    Err(KdsError::Diverged { iteration: schedule.max_iter, residual: res, trace: history(&steps, res) })
}

fn finish(p: &NashMoserProblem<'_>, u: Vec<f64>, steps: Vec<NmStep>, res: f64, initial_size: f64) -> NmOutcome {
    let mut hist: Vec<f64> = steps.iter().map(|s| s.residual).collect();
    hist.push(res);
    let floor = 1e-14;
    let ratios: Vec<f64> = hist.windows(2).filter(|w| w[0] > floor).map(|w| w[1] / w[0]).collect();
    let iterations = steps.len();
    NmOutcome {
        u,
        trace: NmTrace {
            steps,
            final_residual: res,
            iterations,
            loss: p.d,
            regularity_bound: regularity_bound(p.d),
            initial_size,
            superlinear: is_superlinear(&ratios),
            ratios,
        },
    }
}

/// Ratio test: the last three residuals decrease and the final ratio is
/// below `1e-2`. A trace that converges in a single step counts.
pub fn is_superlinear(ratios: &[f64]) -> bool {
    let tail = &ratios[ratios.len().saturating_sub(2)..];
    tail.iter().all(|&r| r < 1.0) && tail.last().map_or(true, |&r| r < 1e-2)
}

/// Largest observed tame constants at level `s`:
/// `|φ'(u)v|_s / (|v|_{s+d} + |u|_{s+d}|v|_{2d})` and the same for `ψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TameSample {
    pub level: f64,
    pub derivative: f64,
    pub inverse: f64,
}

/// Samples seeded directions `v` and base points `u0 + εw` with `|w|_0 = 1`.
pub fn tame_profile(p: &NashMoserProblem<'_>, eps: f64, samples: usize, seed: u64) -> Result<Vec<TameSample>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = p.d as f64;
    let mut out: Vec<TameSample> =
        [0.0, d].iter().map(|&s| TameSample { level: s, derivative: 0.0, inverse: 0.0 }).collect();
    for _ in 0..samples {
        let w: Vec<f64> =
            p.domain.smooth(8.0, &(0..p.domain.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let wn = p.domain.norm(0.0, &w).max(1e-300);
        let u: Vec<f64> = p.u0.iter().zip(&w).map(|(a, b)| a + eps * b / wn).collect();
        let v: Vec<f64> =
            p.domain.smooth(8.0, &(0..p.domain.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let g: Vec<f64> = (0..p.target.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dv = (p.dphi)(&u, &v);
        let pg = (p.psi)(&u, &g)?;
        for t in out.iter_mut() {
            let s = t.level;
            let den_v = p.domain.norm(s + d, &v) + p.domain.norm(s + d, &u) * p.domain.norm(2.0 * d, &v);
            let den_g = p.target.norm(s + d, &g) + p.domain.norm(s + d, &u) * p.target.norm(2.0 * d, &g);
            t.derivative = t.derivative.max(p.target.norm(s, &dv) / den_v);
            t.inverse = t.inverse.max(p.domain.norm(s, &pg) / den_g);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity_bound_for_loss_two() {
        assert_eq!(regularity_bound(2), 174);
    }

    #[test]
    fn schedule_refinement_interleaves() {
        let s = Schedule::default();
        let r = s.refined(2);
        assert!((r.theta(2) - s.theta(1)).abs() < 1e-12);
        assert!((r.theta(1) - 4.0 * 1.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ratio_test() {
        assert!(is_superlinear(&[0.3, 0.1, 1e-3]));
        assert!(!is_superlinear(&[0.5, 0.5, 0.5]));
    }
}
