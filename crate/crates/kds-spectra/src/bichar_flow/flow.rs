use crate::error::{KdsError, Result};
use crate::metric_family::{Kds, POLE_TOL};
use crate::numeric::fd::d1;
use crate::numeric::ode::{integrate, Control, OdeOptions};
use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FlowChart {
    Static,
    NuForm,
    Star,
    /// Chart adapted to the horizon with the given sign (`c_± ≡ 0`).
    T0 {
        sign: f64,
    },
}

/// Base point `(t, r, θ, φ)` and covector `(σ, ξ, η_θ, η_φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhasePoint {
    pub chart: FlowChart,
    pub base: [f64; 4],
    pub cov: [f64; 4],
}

impl PhasePoint {
    pub fn momentum(&self) -> Vector4<f64> {
        Vector4::new(-self.cov[0], self.cov[1], self.cov[2], self.cov[3])
    }
}

/// Contravariant metric in a flow chart (no domain checks).
pub fn dual_matrix(kds: &Kds, chart: FlowChart, r: f64, theta: f64) -> Matrix4<f64> {
    match chart {
        FlowChart::Static => {
            let mu = kds.mu(r);
            let s2 = theta.sin().powi(2);
            Matrix4::from_diagonal(&Vector4::new(1.0 / mu, -mu, -1.0 / (r * r), -1.0 / (r * r * s2)))
        }
        FlowChart::NuForm => kds.dual_sampler(crate::metric_family::Chart::NuForm)(&[0.0, r, theta, 0.0]),
        FlowChart::Star => kds.dual_sampler(crate::metric_family::Chart::Star)(&[0.0, r, theta, 0.0]),
        FlowChart::T0 { sign } => {
            let a = kds.a;
            let l1 = 1.0 + kds.lam_b;
            let rho2 = kds.rho2(r, theta);
            let kap = kds.angular_factor(theta);
            let s2 = theta.sin().powi(2);
            let v1 = Vector4::new(0.0, 1.0, 0.0, 0.0);
            let v2 = Vector4::new(a * s2, 0.0, 0.0, 1.0);
            let dt = Vector4::new(1.0, 0.0, 0.0, 0.0);
            let dphi = Vector4::new(0.0, 0.0, 0.0, 1.0);
            let sym = |u: &Vector4<f64>, v: &Vector4<f64>| u * v.transpose() + v * u.transpose();
            let mut g = -(v1 * v1.transpose()) * kds.mu_tilde(r)
                + sym(&v1, &dphi) * (sign * a * l1)
                + sym(&v1, &dt) * (sign * l1 * (r * r + a * a))
                - v2 * v2.transpose() * (l1 * l1 / (kap * s2));
            g[(2, 2)] -= kap;
            g / rho2
        }
    }
}

fn check_domain(kds: &Kds, chart: FlowChart, r: f64, theta: f64) -> Result<()> {
    if theta < POLE_TOL || theta > std::f64::consts::PI - POLE_TOL {
        return Err(KdsError::PoleSingular(theta));
    }
    let ok = match chart {
        FlowChart::Static => r > kds.horizons.r_minus && r < kds.horizons.r_plus,
        _ => {
            let (lo, hi) = kds.extended_range();
            r > lo && r < hi
        }
    };
    if matches!(chart, FlowChart::Static | FlowChart::NuForm) && kds.a != 0.0 {
        return Err(KdsError::ChartDomain("static and nu-form flow charts require a = 0".into()));
    }
    if ok {
        Ok(())
    } else {
        Err(KdsError::ChartDomain(format!("r = {r} outside the flow chart")))
    }
}

/// `G_b(z, ζ) = |ζ|²_{G_b}`.
pub fn dual_metric_fn(kds: &Kds, pp: &PhasePoint) -> Result<f64> {
    check_domain(kds, pp.chart, pp.base[1], pp.base[2])?;
    let p = pp.momentum();
    Ok((p.transpose() * dual_matrix(kds, pp.chart, pp.base[1], pp.base[2]) * p)[(0, 0)])
}

/// `(G, ∂_r G, ∂_θ G)` at momentum `p`.
pub(crate) fn g_and_grad(kds: &Kds, chart: FlowChart, r: f64, theta: f64, p: &Vector4<f64>) -> (f64, f64, f64) {
    let q = |m: Matrix4<f64>| (p.transpose() * m * p)[(0, 0)];
    let g = q(dual_matrix(kds, chart, r, theta));
    if chart == FlowChart::Static {
        let mu = kds.mu(r);
        let dmu = kds.dmu(r);
        let (st, ct) = theta.sin_cos();
        let eta2 = p[2] * p[2] + p[3] * p[3] / (st * st);
        let gr = -dmu / (mu * mu) * p[0] * p[0] - dmu * p[1] * p[1] + 2.0 * eta2 / (r * r * r);
        let gth = 2.0 * p[3] * p[3] * ct / (r * r * st * st * st);
        return (g, gr, gth);
    }
    let h = 1e-4;
    let gr = d1(|e| q(dual_matrix(kds, chart, r + e, theta)), h * r.max(0.1));
    let gth = d1(|e| q(dual_matrix(kds, chart, r, theta + e)), h);
    (g, gr, gth)
}

/// Which vector field is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMode {
    /// `H_G` in its affine parameter.
    Plain,
    /// `|ξ|⁻¹H_G` with the fibre normalised to `|ξ| = 1` and `log|ξ|` tracked.
    Rescaled,
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    pub mode: FlowMode,
    pub ode: OdeOptions,
    /// Record every n-th accepted step.
    pub record_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { mode: FlowMode::Plain, ode: OdeOptions::default(), record_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowSample {
    pub s: f64,
    pub base: [f64; 4],
    /// `(σ, ξ, η_θ, η_φ)`; rescaled by `1/|ξ|` in rescaled mode.
    pub cov: [f64; 4],
    /// `log|ξ|` (zero in plain mode).
    pub log_xi: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowDiagnostics {
    /// `max |G(s) − G(0)|` in the unscaled fibre.
    pub conserved_g: f64,
    /// `max |σ(s) − σ(0)|` in the unscaled fibre.
    pub conserved_sigma: f64,
    /// `max | |η|²(s) − |η|²(0) |` (spherical symmetry, a = 0 only).
    pub conserved_eta2: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Trajectory {
    pub chart: FlowChart,
    pub mode: FlowMode,
    pub samples: Vec<FlowSample>,
    pub diagnostics: FlowDiagnostics,
    /// Set when the flow left the chart before the end of the interval.
    pub left_domain_at: Option<f64>,
}

fn eta2(theta: f64, cov: &[f64]) -> f64 {
    cov[2] * cov[2] + cov[3] * cov[3] / theta.sin().powi(2)
}

/// Integrates the Hamilton flow of `G_b` on `[0, until]`.
///
/// The observer may stop the integration early by returning [`Control::Stop`].
pub fn hamilton_flow(
    kds: &Kds,
    start: &PhasePoint,
    until: f64,
    opts: FlowOptions,
    mut observer: impl FnMut(&FlowSample) -> Control,
) -> Result<Trajectory> {
    let chart = start.chart;
    check_domain(kds, chart, start.base[1], start.base[2])?;
    let p0 = start.momentum();
    let rescaled = opts.mode == FlowMode::Rescaled;
    if rescaled && start.cov[1] == 0.0 {
        return Err(KdsError::InvalidParams("rescaled flow needs ξ ≠ 0".into()));
    }
    let scale0 = if rescaled { start.cov[1].abs() } else { 1.0 };
    let mut y0 = vec![0.0; 9];
    y0[..4].copy_from_slice(&start.base);
    for i in 0..4 {
        y0[4 + i] = p0[i] / scale0;
    }
    y0[8] = scale0.ln();
    let (lo, hi) = match chart {
        FlowChart::Static => (kds.horizons.r_minus, kds.horizons.r_plus),
        _ => kds.extended_range(),
    };
    let rhs = |_s: f64, y: &[f64], dy: &mut [f64]| -> bool {
        let (r, th) = (y[1], y[2]);
        if !(r > lo && r < hi && th > POLE_TOL && th < std::f64::consts::PI - POLE_TOL) {
            return false;
        }
        let p = Vector4::new(y[4], y[5], y[6], y[7]);
        let gm = dual_matrix(kds, chart, r, th);
        let (_, gr, gth) = g_and_grad(kds, chart, r, th, &p);
        let xdot = gm * p * 2.0;
        for i in 0..4 {
            dy[i] = xdot[i];
        }
        if rescaled {
            let xi_hat = y[5];
            let dl = -gr / xi_hat;
            dy[4] = -y[4] * dl;
            dy[5] = -gr - y[5] * dl;
            dy[6] = -gth - y[6] * dl;
            dy[7] = -y[7] * dl;
            dy[8] = dl;
        } else {
            dy[4] = 0.0;
            dy[5] = -gr;
            dy[6] = -gth;
            dy[7] = 0.0;
            dy[8] = 0.0;
        }
        dy.iter().all(|v| v.is_finite())
    };
    let g0 = dual_metric_fn(kds, start)?;
    let sig0 = start.cov[0];
    let e0 = eta2(start.base[2], &start.cov);
    let mk = |s: f64, y: &[f64]| -> FlowSample {
        let p = Vector4::new(y[4], y[5], y[6], y[7]);
        let g = (p.transpose() * dual_matrix(kds, chart, y[1], y[2]) * p)[(0, 0)];
        FlowSample {
            s,
            base: [y[0], y[1], y[2], y[3]],
            cov: [-y[4], y[5], y[6], y[7]],
            log_xi: if rescaled { y[8] } else { 0.0 },
            g,
        }
    };
    let mut samples = vec![mk(0.0, &y0)];
    let mut dg: f64 = 0.0;
    let mut dsig: f64 = 0.0;
    let mut deta: f64 = 0.0;
    let mut count = 0usize;
    let rec = opts.record_every.max(1);
    let res = integrate(&rhs, &y0, 0.0, until, opts.ode, |s, y| {
        let smp = mk(s, y);
        let fac = if rescaled { y[8].exp() } else { 1.0 };
        dg = dg.max((smp.g * fac * fac - g0).abs());
        dsig = dsig.max((smp.cov[0] * fac - sig0).abs());
        deta = deta.max((eta2(y[2], &smp.cov) * fac * fac - e0).abs());
        count += 1;
        let ctl = observer(&smp);
        if count % rec == 0 || ctl == Control::Stop {
            samples.push(smp);
        }
        ctl
    });
    let (steps, left) = match res {
        Ok(o) => {
            if samples.last().map_or(true, |l| l.s != o.s) {
                samples.push(mk(o.s, &o.y));
            }
            (o.steps, None)
        }
        Err(KdsError::LeftDomain { s, steps }) => (steps, Some(s)),
        Err(e) => return Err(e),
    };
    Ok(Trajectory {
        chart,
        mode: opts.mode,
        samples,
        diagnostics: FlowDiagnostics {
            conserved_g: dg,
            conserved_sigma: dsig,
            conserved_eta2: if kds.a == 0.0 { Some(deta) } else { None },
            steps,
        },
        left_domain_at: left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::BlackHoleParams;

    fn sds() -> Kds {
        Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap()
    }

    #[test]
    fn trapped_covectors_are_null() {
        let k = sds();
        for r in [0.25, 0.3, 0.5, 0.8] {
            let (eth, eph, th): (f64, f64, f64) = (0.7, 1.1, 1.2);
            let e2 = eth * eth + eph * eph / th.sin().powi(2);
            let sigma = (k.mu(r) * e2 / (r * r)).sqrt();
            let pp = PhasePoint { chart: FlowChart::Static, base: [0.0, r, th, 0.0], cov: [sigma, 0.0, eth, eph] };
            assert!(dual_metric_fn(&k, &pp).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn dt_star_has_constant_norm() {
        let k = sds();
        for r in [k.r_crit, 0.3, 0.8] {
            let pp = PhasePoint { chart: FlowChart::NuForm, base: [0.0, r, 1.0, 0.0], cov: [-1.0, 0.0, 0.0, 0.0] };
            let g = dual_metric_fn(&k, &pp).unwrap();
            assert!((g - k.c_star * k.c_star).abs() < 1e-13);
        }
    }

    #[test]
    fn dr_is_null_at_horizons() {
        let k = Kds::new(BlackHoleParams::kds(3.0, 0.1, 0.02)).unwrap();
        for r in [k.horizons.r_minus, k.horizons.r_plus] {
            let pp = PhasePoint { chart: FlowChart::Star, base: [0.0, r, 1.0, 0.0], cov: [0.0, 1.0, 0.0, 0.0] };
            assert!(dual_metric_fn(&k, &pp).unwrap().abs() < 1e-14);
        }
    }

    fn null_start(k: &Kds, chart: FlowChart, r: f64, th: f64, xi: f64, eth: f64, eph: f64) -> PhasePoint {
        // solve G = 0 for σ (quadratic in σ)
        let g =
            |s: f64| dual_metric_fn(k, &PhasePoint { chart, base: [0.0, r, th, 0.0], cov: [s, xi, eth, eph] }).unwrap();
        let (c0, c1, cm) = (g(0.0), g(1.0), g(-1.0));
        let a2 = 0.5 * (c1 + cm) - c0;
        let a1 = 0.5 * (c1 - cm);
        let disc = (a1 * a1 - 4.0 * a2 * c0).sqrt();
        let sigma = (-a1 + disc) / (2.0 * a2);
        PhasePoint { chart, base: [0.0, r, th, 0.0], cov: [sigma, xi, eth, eph] }
    }

    #[test]
    fn generic_null_flow_conserves() {
        for a in [0.0, 0.02] {
            let k = Kds::new(BlackHoleParams::kds(3.0, 0.1, a)).unwrap();
            let st = null_start(&k, FlowChart::Star, 0.5, 1.1, 0.3, 0.8, 0.6);
            let tr = hamilton_flow(&k, &st, 0.2, FlowOptions::default(), |_| Control::Continue).unwrap();
            let z2 = 1.0 + st.cov.iter().map(|v| v * v).sum::<f64>();
            assert!(tr.diagnostics.conserved_g <= 1e-9 * z2, "{:?}", tr.diagnostics);
            assert!(tr.diagnostics.conserved_sigma <= 1e-10 * st.cov[0].abs());
            if a == 0.0 {
                let e0 = 0.8f64.powi(2) + 0.36 / 1.1f64.sin().powi(2);
                assert!(tr.diagnostics.conserved_eta2.unwrap() <= 1e-9 * e0);
            }
        }
    }

    #[test]
    fn fibre_homogeneity() {
        let k = sds();
        let st = null_start(&k, FlowChart::Star, 0.45, 1.0, -0.4, 0.5, 0.7);
        let lam = 2.5;
        let mut st2 = st;
        st2.cov.iter_mut().for_each(|v| *v *= lam);
        let until = 0.2;
        let opts = FlowOptions { record_every: usize::MAX, ..Default::default() };
        let a = hamilton_flow(&k, &st, until, opts, |_| Control::Continue).unwrap();
        let b = hamilton_flow(&k, &st2, until / lam, opts, |_| Control::Continue).unwrap();
        let (ea, eb) = (a.samples.last().unwrap(), b.samples.last().unwrap());
        for i in 0..4 {
            assert!((ea.base[i] - eb.base[i]).abs() < 1e-9);
            assert!((ea.cov[i] * lam - eb.cov[i]).abs() < 1e-9 * lam);
        }
    }

    #[test]
    fn static_gradient_matches_differences() {
        let k = sds();
        let p = Vector4::new(0.3, 0.7, -0.2, 0.5);
        let (_, gr, gth) = g_and_grad(&k, FlowChart::Static, 0.4, 1.0, &p);
        let q = |r: f64, th: f64| (p.transpose() * dual_matrix(&k, FlowChart::Static, r, th) * p)[(0, 0)];
        assert!((gr - d1(|e| q(0.4 + e, 1.0), 1e-4)).abs() < 1e-9);
        assert!((gth - d1(|e| q(0.4, 1.0 + e), 1e-4)).abs() < 1e-9);
    }
}
