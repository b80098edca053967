use crate::error::{KdsError, Result};
use crate::metric_family::Kds;
use crate::numeric::fit::fit_line;
use crate::numeric::ode::{Control, OdeOptions};
use serde::{Deserialize, Serialize};

use super::flow::{dual_metric_fn, hamilton_flow, FlowChart, FlowMode, FlowOptions, FlowSample, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonSel {
    Plus,
    Minus,
}

impl HorizonSel {
    pub fn sign(self) -> f64 {
        match self {
            HorizonSel::Plus => 1.0,
            HorizonSel::Minus => -1.0,
        }
    }
}

/// Component of the characteristic set near the radial set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Future,
    Past,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialRates {
    pub horizon: HorizonSel,
    pub direction: Direction,
    pub theta: f64,
    /// Fitted `d/ds log ρ̂` along the rescaled flow.
    pub rate_rhohat: f64,
    /// Fitted `−d/ds log τ`.
    pub rate_tau: f64,
    /// Fitted `d/ds log ρ₀` for the quadratic defining function.
    pub rate_rho0: f64,
    pub expected_beta0: f64,
    pub expected_beta0_beta: f64,
    pub fit_rms: f64,
}

/// Window of rescaled time used for the fits.
pub const RADIAL_WINDOW: f64 = 4.0;
/// Residual bound on the linear fits of the logarithms.
pub const FIT_TOL: f64 = 1e-6;

fn fit_tail(samples: &[FlowSample], f: impl Fn(&FlowSample) -> f64) -> (f64, f64) {
    let s_end = samples.last().map_or(0.0, |l| l.s);
    let cut = 0.4 * s_end;
    let tail: Vec<&FlowSample> = samples.iter().filter(|x| x.s >= cut).collect();
    let xs: Vec<f64> = tail.iter().map(|x| x.s).collect();
    let ys: Vec<f64> = tail.iter().map(|x| f(x)).collect();
    let fit = fit_line(&xs, &ys);
    (fit.slope, fit.rms)
}

/// Expansion rates of the rescaled flow at the conormal bundle of a horizon.
///
/// The start point lies on the conormal bundle (`σ = η = 0`, `ξ = ±1`) in the
/// chart adapted to that horizon; `Future` selects `sgn ξ` equal to the
/// horizon sign.
pub fn radial_set_rates(kds: &Kds, horizon: HorizonSel, direction: Direction, theta: f64) -> Result<RadialRates> {
    let s = horizon.sign();
    let r = match horizon {
        HorizonSel::Plus => kds.horizons.r_plus,
        HorizonSel::Minus => kds.horizons.r_minus,
    };
    if horizon == HorizonSel::Minus && kds.mass() == 0.0 {
        return Err(KdsError::InvalidParams("pure de Sitter has no event horizon".into()));
    }
    let xi = match direction {
        Direction::Future => s,
        Direction::Past => -s,
    };
    let chart = FlowChart::T0 { sign: s };
    let opts = FlowOptions {
        mode: FlowMode::Rescaled,
        ode: OdeOptions { rtol: 1e-12, atol: 1e-40, h0: 1e-3, h_max: 0.02, ..Default::default() },
        record_every: 1,
    };
    let start = PhasePoint { chart, base: [0.0, r, theta, 0.0], cov: [0.0, xi, 0.0, 0.0] };
    let tr = hamilton_flow(kds, &start, RADIAL_WINDOW, opts, |_| Control::Continue)?;
    if tr.left_domain_at.is_some() {
        return Err(KdsError::LeftDomain { s: tr.left_domain_at.unwrap_or(0.0), steps: tr.diagnostics.steps });
    }
    let (rate_rhohat, rms1) = fit_tail(&tr.samples, |x| -x.log_xi);
    let (rate_tau, rms2) = fit_tail(&tr.samples, |x| x.base[0]);

    // quadratic defining function: start slightly off the conormal bundle
    let eta = 1e-12;
    let mut st2 = PhasePoint { chart, base: [0.0, r, theta, 0.0], cov: [0.0, xi, eta, 0.0] };
    let g0 = dual_metric_fn(kds, &st2)?;
    let a = kds.a;
    let rho2 = kds.rho2(r, theta);
    // ∂G/∂σ at σ = 0 is −2 s (1+λ)(r²+a²) ξ / ρ²
    let dgs = -2.0 * s * (1.0 + kds.lam_b) * (r * r + a * a) * xi / rho2;
    st2.cov[0] = -g0 / dgs;
    let tr2 = hamilton_flow(kds, &st2, RADIAL_WINDOW, opts, |_| Control::Continue)?;
    let rho0 = |x: &FlowSample| {
        let th = x.base[2];
        let s2 = th.sin().powi(2);
        let kap = kds.angular_factor(th);
        let l1 = 1.0 + kds.lam_b;
        let (sg, et, ze) = (x.cov[0], x.cov[2], x.cov[3]);
        (l1 * l1 * (a * s2 * sg - ze).powi(2) / (kap * s2) + kap * et * et + sg * sg).ln()
    };
    let (rate_rho0, rms3) = fit_tail(&tr2.samples, rho0);
    let rms = rms1.max(rms2).max(rms3);
    if !(rms <= FIT_TOL) {
        return Err(KdsError::FitFailure { residual: rms, tolerance: FIT_TOL });
    }
    let b0 = kds.dmu_tilde(r).abs() / rho2;
    let beta = 2.0 * (1.0 + kds.lam_b) * (r * r + a * a) / kds.dmu_tilde(r).abs();
    Ok(RadialRates {
        horizon,
        direction,
        theta,
        rate_rhohat,
        rate_tau,
        rate_rho0,
        expected_beta0: b0,
        expected_beta0_beta: b0 * beta,
        fit_rms: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::BlackHoleParams;

    #[test]
    fn static_rates_match_surface_gravity() {
        let k = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let th = 1.0;
        let p = radial_set_rates(&k, HorizonSel::Plus, Direction::Future, th).unwrap();
        assert!((p.rate_rhohat - 2.0 * k.horizons.kappa_plus).abs() < 1e-5, "{p:?}");
        assert!((p.rate_tau - 2.0).abs() < 1e-5);
        assert!((p.rate_rho0 - 2.0 * p.expected_beta0).abs() < 1e-5);
        let m = radial_set_rates(&k, HorizonSel::Minus, Direction::Future, th).unwrap();
        assert!((m.rate_rhohat - 2.0 * k.horizons.kappa_minus).abs() < 1e-5, "{m:?}");
        assert!((m.rate_rhohat - 4.1538).abs() < 1e-3);
        let past = radial_set_rates(&k, HorizonSel::Plus, Direction::Past, th).unwrap();
        assert!((past.rate_rhohat + p.rate_rhohat).abs() < 1e-8 && (past.rate_tau + p.rate_tau).abs() < 1e-8);
    }

    #[test]
    fn rotating_rates_match_beta() {
        let k = Kds::new(BlackHoleParams::kds(3.0, 0.1, 0.005)).unwrap();
        for h in [HorizonSel::Plus, HorizonSel::Minus] {
            let p = radial_set_rates(&k, h, Direction::Future, 0.7).unwrap();
            assert!((p.rate_rhohat - p.expected_beta0).abs() < 1e-5, "{p:?}");
            assert!((p.rate_tau - p.expected_beta0_beta).abs() < 1e-5);
            assert!((p.rate_rho0 - 2.0 * p.expected_beta0).abs() < 1e-5);
        }
    }
}
