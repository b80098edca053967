//! Conformal method on the torus: the Lichnerowicz equation with a
//! finite-dimensional modification space.
//!
//! Unknowns are `(ψ, z)` with `φ = 1 + ψ`, `ψ ⊥ ker L` and `z ∈ 𝒵`, solving
//! `P(φ) = f + z` for
//!
//! `P(φ) = Δφ + Vφ − ⅛|Q̃|²φ⁻⁷ + ¼(3H² + Λ)φ⁵`, `f = P(1; 0, 0) = V + Λ/4`,
//!
//! where `Δ ≥ 0` and `V = R/8` of the background (or an artificial potential
//! standing in for it).

use super::residual::{HSign, TorusData};
use super::torus::{sup, sup_sym, SymField, TorusGrid};
use super::tt::tt_project;
use crate::error::{KdsError, Result};
use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Mean curvature, TT tensor and cosmological constant.
#[derive(Debug, Clone)]
pub struct LichnerowiczInput {
    pub h: f64,
    pub qtilde: SymField,
    pub lambda: f64,
}

impl LichnerowiczInput {
    /// Projects `q` to its transverse-traceless part first.
    pub fn projected(grid: &TorusGrid, h: f64, q: &[Matrix3<f64>], lambda: f64) -> Self {
        LichnerowiczInput { h, qtilde: tt_project(grid, q), lambda }
    }

    pub fn size(&self) -> f64 {
        self.h.abs() + sup_sym(&self.qtilde)
    }

    pub fn scaled(&self, s: f64) -> Self {
        LichnerowiczInput { h: self.h * s, qtilde: self.qtilde.iter().map(|m| m * s).collect(), lambda: self.lambda }
    }
}

/// Background operator `L = Δ + V + 5Λ/4`, its kernel and the space 𝒵.
#[derive(Debug, Clone)]
pub struct ConformalBackground {
    pub grid: TorusGrid,
    pub lambda: f64,
    pub potential: Vec<f64>,
    /// True when `V = 0` comes from the flat metric itself.
    pub flat: bool,
    /// L²-orthonormal basis of `ker L`.
    pub kernel: Vec<Vec<f64>>,
    pub zspace: Vec<Vec<f64>>,
    gram_inv: DMatrix<f64>,
    constant: Option<f64>,
}

impl ConformalBackground {
    /// Flat metric; the kernel of `Δ + 5Λ/4` is read off from the Fourier modes.
    pub fn flat(grid: &TorusGrid, lambda: f64) -> Result<Self> {
        let u = 1.25 * lambda;
        let mut kernel = Vec::new();
        for i in 0..grid.len() {
            if grid.is_nyquist(i) {
                continue;
            }
            let k = grid.wavevector(i);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let lead = k.iter().find(|x| **x != 0.0).copied().unwrap_or(1.0);
            if (k2 + u).abs() > 1e-12 || lead < 0.0 {
                continue;
            }
            let phase = |x: [f64; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            kernel.push(grid.sample(|x| phase(x).cos()));
            if k2 > 0.0 {
                kernel.push(grid.sample(|x| phase(x).sin()));
            }
        }
        Self::assemble(grid, lambda, vec![0.0; grid.len()], true, kernel, Some(u))
    }

    /// Artificial potential `V = −Δw/w − 5Λ/4`, so that `ker L = span{w}` for
    /// positive `w`.
    pub fn ground_state(grid: &TorusGrid, lambda: f64, w: &[f64]) -> Result<Self> {
        if w.iter().any(|x| !(*x > 0.0)) {
            return Err(KdsError::InvalidParams("ground state must be positive".into()));
        }
        let lw = grid.laplacian(w);
        let pot: Vec<f64> = lw.iter().zip(w).map(|(a, b)| -a / b - 1.25 * lambda).collect();
        Self::assemble(grid, lambda, pot, false, vec![w.to_vec()], None)
    }

    fn assemble(
        grid: &TorusGrid,
        lambda: f64,
        potential: Vec<f64>,
        flat: bool,
        raw_kernel: Vec<Vec<f64>>,
        constant: Option<f64>,
    ) -> Result<Self> {
        let mut kernel: Vec<Vec<f64>> = Vec::new();
        for mut v in raw_kernel {
            for e in &kernel {
                let c = grid.inner(&v, e);
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
            let nv = grid.inner(&v, &v).sqrt();
            if nv > 1e-10 {
                kernel.push(v.into_iter().map(|x| x / nv).collect());
            }
        }
        let zspace: Vec<Vec<f64>> = (0..kernel.len()).map(|j| bump(grid, j)).collect();
        let m = kernel.len();
        let gram = DMatrix::from_fn(m, m, |i, j| grid.inner(&kernel[i], &zspace[j]));
        let gram_inv = if m == 0 {
            DMatrix::zeros(0, 0)
        } else {
            let inv = gram
                .clone()
                .try_inverse()
                .ok_or_else(|| KdsError::InvalidParams("pairing between ker L and 𝒵 is degenerate".into()))?;
            if inv.amax() * gram.amax() > 1e10 {
                return Err(KdsError::InvalidParams("pairing between ker L and 𝒵 is ill-conditioned".into()));
            }
            inv
        };
        Ok(ConformalBackground { grid: grid.clone(), lambda, potential, flat, kernel, zspace, gram_inv, constant })
    }

    /// `Lψ = Δψ + (V + 5Λ/4)ψ`.
    pub fn apply_l(&self, psi: &[f64]) -> Vec<f64> {
        let lap = self.grid.laplacian(psi);
        lap.iter().zip(psi).zip(&self.potential).map(|((l, p), v)| l + (v + 1.25 * self.lambda) * p).collect()
    }

    fn project_out_kernel(&self, f: &mut [f64]) {
        for v in &self.kernel {
            let c = self.grid.inner(f, v);
            f.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
        }
    }

    /// `L⁻¹` on the orthocomplement of the kernel.
    fn solve_l(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if let Some(u) = self.constant {
            let g = &self.grid;
            let mut out = g.multiply(rhs, |_, k| {
                let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + u;
                if s.abs() < 1e-12 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(1.0 / s, 0.0)
                }
            });
            self.project_out_kernel(&mut out);
            return Ok(out);
        }
        self.pcg(rhs)
    }

    fn pcg(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        let mean = self.potential.iter().sum::<f64>() / g.len() as f64 + 1.25 * self.lambda;
        let shift = mean.max(0.5);
        let precond = |r: &[f64]| {
            let mut z =
                g.multiply(r, |_, k| Complex64::new(1.0 / (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + shift), 0.0));
            self.project_out_kernel(&mut z);
            z
        };
        let dot = |a: &[f64], b: &[f64]| g.inner(a, b);
        let mut b = rhs.to_vec();
        self.project_out_kernel(&mut b);
        let bn = dot(&b, &b).sqrt();
        let mut x = vec![0.0; g.len()];
        if bn == 0.0 {
            return Ok(x);
        }
        let mut r = b;
        let mut z = precond(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for it in 0..500 {
            let mut ap = self.apply_l(&p);
            self.project_out_kernel(&mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(KdsError::NoConvergence { iterations: it, residual: dot(&r, &r).sqrt() / bn });
            }
            let alpha = rz / pap;
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, a)| *ri -= alpha * a);
            if dot(&r, &r).sqrt() < 1e-15 * bn {
                return Ok(x);
            }
            z = precond(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        Err(KdsError::NoConvergence { iterations: 500, residual: dot(&r, &r).sqrt() / bn })
    }

    /// `L′⁻¹ r`: the pair `(ψ ⊥ ker L, c)` with `Lψ − Σ c_j z_j = r`.
    pub fn solve_l_prime(&self, r: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let m = self.kernel.len();
        let proj = DVector::from_fn(m, |i, _| self.grid.inner(&self.kernel[i], r));
        let c = -(&self.gram_inv * proj);
        let mut rhs = r.to_vec();
        for (j, z) in self.zspace.iter().enumerate() {
            rhs.iter_mut().zip(z).for_each(|(x, y)| *x += c[j] * y);
        }
        Ok((self.solve_l(&rhs)?, c.iter().copied().collect()))
    }

    /// `(L + W)′⁻¹ r` by defect correction around `L′`.
    pub fn solve_perturbed(&self, w: &[f64], r: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut psi = vec![0.0; r.len()];
        let scale = sup(r).max(1e-300);
        for _ in 0..200 {
            let rhs: Vec<f64> = r.iter().zip(w).zip(&psi).map(|((a, b), c)| a - b * c).collect();
            let (next, c) = self.solve_l_prime(&rhs)?;
            let change = next.iter().zip(&psi).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            psi = next;
            if change <= 1e-15 * scale.max(sup(&psi)) {
                return Ok((psi, c));
            }
        }
        Err(KdsError::NoConvergence { iterations: 200, residual: f64::NAN })
    }

    pub fn z_field(&self, c: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.grid.len()];
        for (cj, zj) in c.iter().zip(&self.zspace) {
            z.iter_mut().zip(zj).for_each(|(a, b)| *a += cj * b);
        }
        z
    }
}

/// Smooth periodic bump centred away from the origin.
fn bump(grid: &TorusGrid, j: usize) -> Vec<f64> {
    let c = [std::f64::consts::PI + 0.9 * j as f64, std::f64::consts::PI, std::f64::consts::PI];
    grid.sample(|x| (0..3).map(|a| (8.0 * ((x[a] - c[a]).cos() - 1.0)).exp()).product())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LichOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Admissible bound on `|H| + ‖Q̃‖_∞`.
    pub smallness: f64,
    /// Newton steps instead of the plain contraction.
    pub newton: bool,
}

impl Default for LichOptions {
    fn default() -> Self {
        LichOptions { tol: 1e-10, max_iter: 50, smallness: 0.25, newton: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LichnerowiczSolution {
    pub phi: Vec<f64>,
    pub z: Vec<f64>,
    pub z_coeffs: Vec<f64>,
    pub iterations: usize,
    /// `‖P(φ) − f − z‖_∞`.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub psi_sup: f64,
    pub data_size: f64,
}

impl LichnerowiczSolution {
    /// `h = φ⁴δ`, `K = φ⁻²Q̃ + Hh` in the positive convention.
    pub fn initial_data(&self, input: &LichnerowiczInput, bg: &ConformalBackground) -> Result<TorusData> {
        if !bg.flat {
            return Err(KdsError::InvalidParams("initial data exist only over the flat background".into()));
        }
        let h: SymField = self.phi.iter().map(|p| Matrix3::identity() * p.powi(4)).collect();
        let k = h.iter().zip(&input.qtilde).zip(&self.phi).map(|((hm, q), p)| q / (p * p) + hm * input.h).collect();
        Ok(TorusData { grid: bg.grid.clone(), h, k, sign: HSign::Positive })
    }
}

struct Terms<'a> {
    bg: &'a ConformalBackground,
    q2: Vec<f64>,
    h2: f64,
    lambda: f64,
}

impl Terms<'_> {
    /// `F(ψ) = P(1 + ψ) − f`.
    fn f_of(&self, psi: &[f64]) -> Vec<f64> {
        let lap = self.bg.grid.laplacian(psi);
        let c = 0.25 * (3.0 * self.h2 + self.lambda);
        (0..psi.len())
            .map(|i| {
                let phi = 1.0 + psi[i];
                lap[i] + self.bg.potential[i] * psi[i] - 0.125 * self.q2[i] * phi.powi(-7) + c * phi.powi(5)
                    - 0.25 * self.lambda
            })
            .collect()
    }

    /// `d = ⅛|Q̃|² − ¾H²`.
    fn d(&self) -> Vec<f64> {
        self.q2.iter().map(|q| 0.125 * q - 0.75 * self.h2).collect()
    }

    /// `L̃ − L = ⅞|Q̃|² + 15H²/4`.
    fn w(&self) -> Vec<f64> {
        self.q2.iter().map(|q| 0.875 * q + 3.75 * self.h2).collect()
    }

    /// Potential of `F′(ψ) − L`.
    fn w_at(&self, psi: &[f64]) -> Vec<f64> {
        let c = 0.25 * (3.0 * self.h2 + self.lambda);
        (0..psi.len())
            .map(|i| {
                let phi = 1.0 + psi[i];
                0.875 * self.q2[i] * phi.powi(-8) + 5.0 * c * phi.powi(4) - 1.25 * self.lambda
            })
            .collect()
    }

    /// `q(ψ) = F(ψ) − L̃ψ + d`, evaluated pointwise without cancellation.
    fn q(&self, psi: &[f64]) -> Vec<f64> {
        let c = 0.25 * (3.0 * self.h2 + self.lambda);
        psi.iter()
            .zip(&self.q2)
            .map(|(&p, &q2)| {
                let inv7 = (1.0 + p).powi(-7) - 1.0 + 7.0 * p;
                let pow5 = (1.0 + p).powi(5) - 1.0 - 5.0 * p;
                -0.125 * q2 * inv7 + c * pow5
            })
            .collect()
    }
}

/// Solves `P(1 + ψ) = f + z` by the contraction `(ψ, z) ↦ (L̃′)⁻¹(d − q(ψ))`.
pub fn lichnerowicz_solve(
    input: &LichnerowiczInput,
    h0: &ConformalBackground,
    tol: f64,
) -> Result<LichnerowiczSolution> {
    lichnerowicz_solve_with(input, h0, LichOptions { tol, ..LichOptions::default() })
}

pub fn lichnerowicz_solve_with(
    input: &LichnerowiczInput,
    bg: &ConformalBackground,
    opts: LichOptions,
) -> Result<LichnerowiczSolution> {
    let grid = &bg.grid;
    if input.qtilde.len() != grid.len() {
        return Err(KdsError::InvalidParams("Q̃ does not live on the background grid".into()));
    }
    if (input.lambda - bg.lambda).abs() > 1e-14 {
        return Err(KdsError::InvalidParams("Λ differs from the background's".into()));
    }
    let size = input.size();
    if !(size <= opts.smallness) {
        return Err(KdsError::SmallnessViolated(format!("|H| + ‖Q̃‖ = {size:e} exceeds {:e}", opts.smallness)));
    }
    let tr = input.qtilde.iter().fold(0.0f64, |m, q| m.max(q.trace().abs()));
    let div = grid.flat_divergence(&input.qtilde).iter().fold(0.0f64, |m, v| m.max(v.amax()));
    if tr > 1e-10 || div > 1e-8 {
        return Err(KdsError::InvalidParams(format!("Q̃ not TT: trace {tr:e}, divergence {div:e}")));
    }
    let terms = Terms {
        bg,
        q2: input.qtilde.iter().map(|q| q.norm_squared()).collect(),
        h2: input.h * input.h,
        lambda: input.lambda,
    };
    let d = terms.d();
    let w = terms.w();
    let mut psi = vec![0.0; grid.len()];
    let mut coeffs = vec![0.0; bg.kernel.len()];
    let residual_of = |psi: &[f64], c: &[f64]| {
        let z = bg.z_field(c);
        sup(&terms.f_of(psi).iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>())
    };
    let mut res = residual_of(&psi, &coeffs);
    let mut history = vec![res];
    let mut it = 0;
    while res >= opts.tol {
        if it == opts.max_iter {
            return Err(KdsError::NoConvergence { iterations: it, residual: res });
        }
        it += 1;
        if opts.newton {
            let z = bg.z_field(&coeffs);
            let rhs: Vec<f64> = terms.f_of(&psi).iter().zip(&z).map(|(a, b)| b - a).collect();
            let (dpsi, dc) = bg.solve_perturbed(&terms.w_at(&psi), &rhs)?;
            psi.iter_mut().zip(&dpsi).for_each(|(a, b)| *a += b);
            coeffs.iter_mut().zip(&dc).for_each(|(a, b)| *a += b);
        } else {
            let rhs: Vec<f64> = d.iter().zip(terms.q(&psi)).map(|(a, b)| a - b).collect();
            let (next, c) = bg.solve_perturbed(&w, &rhs)?;
            psi = next;
            coeffs = c;
        }
        if psi.iter().any(|p| !(*p > -1.0)) {
            return Err(KdsError::NoConvergence { iterations: it, residual: f64::INFINITY });
        }
        res = residual_of(&psi, &coeffs);
        history.push(res);
        if !res.is_finite() || res > 1e6 * history[0].max(1e-300) {
            return Err(KdsError::NoConvergence { iterations: it, residual: res });
        }
    }
    Ok(LichnerowiczSolution {
        psi_sup: sup(&psi),
        phi: psi.iter().map(|p| 1.0 + p).collect(),
        z: bg.z_field(&coeffs),
        z_coeffs: coeffs,
        iterations: it,
        residual: res,
        residual_history: history,
        data_size: size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::residual::{constraint_residual, InitialDataSet};
    use crate::constraints::tt::random_tt;

    fn input(grid: &TorusGrid, seed: u64, h: f64, amp: f64, lambda: f64) -> LichnerowiczInput {
        LichnerowiczInput { h, qtilde: random_tt(grid, seed, 2, amp), lambda }
    }

    #[test]
    fn trivial_data_needs_no_iteration() {
        let g = TorusGrid::new(8).unwrap();
        let bg = ConformalBackground::flat(&g, 3.0).unwrap();
        let inp = LichnerowiczInput { h: 0.0, qtilde: vec![Matrix3::zeros(); g.len()], lambda: 3.0 };
        let s = lichnerowicz_solve(&inp, &bg, 1e-12).unwrap();
        assert_eq!(s.iterations, 0);
        assert!(s.phi.iter().all(|p| *p == 1.0));
    }

    #[test]
    fn flat_torus_with_positive_lambda() {
        let g = TorusGrid::new(16).unwrap();
        let bg = ConformalBackground::flat(&g, 3.0).unwrap();
        assert!(bg.kernel.is_empty());
        let inp = input(&g, 11, 0.01, 0.05, 3.0);
        let s = lichnerowicz_solve(&inp, &bg, 1e-10).unwrap();
        assert!(s.residual < 1e-10 && s.iterations <= 15, "{} after {}", s.residual, s.iterations);
        assert!(s.z.iter().all(|z| *z == 0.0));
        let half = lichnerowicz_solve(&inp.scaled(0.5), &bg, 1e-10).unwrap();
        assert!(half.psi_sup <= 0.5 * s.psi_sup);
    }

    #[test]
    fn newton_agrees_with_contraction() {
        let g = TorusGrid::new(8).unwrap();
        let bg = ConformalBackground::flat(&g, 3.0).unwrap();
        let inp = input(&g, 3, -0.02, 0.08, 3.0);
        let a = lichnerowicz_solve(&inp, &bg, 1e-12).unwrap();
        let opts = LichOptions { tol: 1e-12, newton: true, ..LichOptions::default() };
        let b = lichnerowicz_solve_with(&inp, &bg, opts).unwrap();
        let diff = a.phi.iter().zip(&b.phi).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-12);
        assert!(b.iterations <= a.iterations);
    }

    #[test]
    fn smallness_is_enforced() {
        let g = TorusGrid::new(8).unwrap();
        let bg = ConformalBackground::flat(&g, 3.0).unwrap();
        let inp = input(&g, 1, 0.3, 0.1, 3.0);
        assert!(matches!(lichnerowicz_solve(&inp, &bg, 1e-10), Err(KdsError::SmallnessViolated(_))));
    }

    #[test]
    fn kernel_from_constants_closes_constraints_off_support() {
        let g = TorusGrid::new(32).unwrap();
        let bg = ConformalBackground::flat(&g, 0.0).unwrap();
        assert_eq!(bg.kernel.len(), 1);
        let inp = input(&g, 5, 0.02, 0.05, 0.0);
        let s = lichnerowicz_solve(&inp, &bg, 1e-12).unwrap();
        assert!(s.z_coeffs[0].abs() > 0.0);
        let data = s.initial_data(&inp, &bg).unwrap();
        let r = constraint_residual(&InitialDataSet::Torus(data), 0.0, 3).unwrap();
        let zmax = sup(&bg.zspace[0]);
        let (ham, mom) = r.max_on(|i| bg.zspace[0][i] < 1e-12 * zmax);
        assert!(ham < 1e-8 && mom < 1e-8, "{ham:e} {mom:e}");
        // and the solved equation is visible inside the support
        assert!(r.hamiltonian_max > 1e-6);
    }

    #[test]
    fn artificial_potential_has_one_dimensional_kernel() {
        let g = TorusGrid::new(16).unwrap();
        let w = g.sample(|x| (0.3 * x[0].cos() + 0.2 * (x[1] - x[2]).sin()).exp());
        let bg = ConformalBackground::ground_state(&g, 3.0, &w).unwrap();
        assert_eq!(bg.kernel.len(), 1);
        assert!(sup(&bg.apply_l(&bg.kernel[0])) < 1e-10);
        let inp = input(&g, 9, 0.01, 0.04, 3.0);
        let s = lichnerowicz_solve(&inp, &bg, 1e-10).unwrap();
        assert!(s.residual < 1e-10);
        assert!(s.z_coeffs[0] != 0.0);
        // ψ stays orthogonal to the kernel
        let psi: Vec<f64> = s.phi.iter().map(|p| p - 1.0).collect();
        assert!(g.inner(&psi, &bg.kernel[0]).abs() < 1e-12);
    }

    #[test]
    fn resolution_convergence() {
        let coarse = TorusGrid::new(16).unwrap();
        let fine = TorusGrid::new(32).unwrap();
        let solve = |g: &TorusGrid| {
            let bg = ConformalBackground::flat(g, 3.0).unwrap();
            let q = g.sample(|x| {
                let (s, c) = (x[2].sin(), x[2].cos());
                // TT: depends on x₃ only and lives in the (1,2) block
                Matrix3::new(0.03 * c, 0.02 * s, 0.0, 0.02 * s, -0.03 * c, 0.0, 0.0, 0.0, 0.0)
            });
            let inp = LichnerowiczInput { h: 0.01, qtilde: q, lambda: 3.0 };
            lichnerowicz_solve(&inp, &bg, 1e-13).unwrap().phi
        };
        let a = solve(&coarse);
        let b = fine.coarsen(&solve(&fine));
        let diff = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(diff < 1e-8, "{diff:e}");
    }
}
