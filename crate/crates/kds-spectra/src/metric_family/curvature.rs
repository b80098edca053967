use crate::error::{KdsError, Result};
use crate::numeric::tensor::{ricci, ricci_richardson, upsilon, MetricFn};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::charts::Chart;
use super::params::Kds;

/// Default bound on the step-halving disagreement of the Ricci tensor.
pub const RICHARDSON_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RicciReport {
    pub chart: Chart,
    pub point: [f64; 4],
    pub ricci: [[f64; 4]; 4],
    /// `Ric(g) + Λg`.
    pub residual: [[f64; 4]; 4],
    pub residual_max: f64,
    pub richardson_disagreement: f64,
}

fn arr(m: &DMatrix<f64>) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Ricci tensor by fourth-order differences of the Christoffel symbols.
///
/// The result is Richardson-extrapolated from `step` and `step/2`.
pub fn ricci_fd(kds: &Kds, chart: Chart, point: [f64; 4], step: f64) -> Result<RicciReport> {
    ricci_fd_with(kds, chart, point, step, RICHARDSON_TOL)
}

pub fn ricci_fd_with(kds: &Kds, chart: Chart, point: [f64; 4], step: f64, tol: f64) -> Result<RicciReport> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(KdsError::InvalidParams(format!("step must be positive, got {step}")));
    }
    kds.eval_metric(chart, point)?;
    // the whole stencil (two nested levels of ±2h) must lie in the chart
    for k in 1..4 {
        for e in [-4.0 * step, 4.0 * step] {
            let mut q = point;
            q[k] += e;
            kds.eval_metric(chart, q)?;
        }
    }
    let g = kds.metric_sampler(chart);
    let h = [step; 4];
    let (ric, dis) = ricci_richardson(&g, &point, &h);
    if !(dis <= tol) {
        return Err(KdsError::StepTooLarge { disagreement: dis, tolerance: tol });
    }
    let res = &ric + g(&point) * kds.lambda();
    Ok(RicciReport {
        chart,
        point,
        ricci: arr(&ric),
        residual: arr(&res),
        residual_max: res.amax(),
        richardson_disagreement: dis,
    })
}

/// Residual `‖Ric + Λg‖_∞` without extrapolation, for convergence studies.
pub fn einstein_residual_plain(kds: &Kds, chart: Chart, point: [f64; 4], step: f64) -> f64 {
    let g = kds.metric_sampler(chart);
    (ricci(&g, &point, &[step; 4]) + g(&point) * kds.lambda()).amax()
}

/// Gauge 1-form `Υ(g)` of `g` relative to the background `t`.
pub fn upsilon_eval(g: MetricFn, t: MetricFn, point: &[f64], step: f64) -> DVector<f64> {
    upsilon(g, t, point, &vec![step; point.len()])
}
