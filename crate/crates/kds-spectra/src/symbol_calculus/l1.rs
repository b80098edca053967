use crate::error::{KdsError, Result};
use crate::metric_family::{find_horizons, BlackHoleParams};
use crate::numeric::fd::d1;
use crate::numeric::fit::fit_line;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct L1Report {
    pub lambda: f64,
    pub mass: f64,
    /// Fitted constant `C` in `r d(f/r) = C r⁻³ ⋆1`.
    pub c: f64,
    /// Spread of the pointwise values of `C` over the grid.
    pub spread: f64,
    /// Log–log slope of the coefficient against `r`; `None` when it vanishes.
    pub slope: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

pub const L1_TOL: f64 = 1e-9;

/// Checks that `f = (Λr/3 + 2M/r²)dt` satisfies `r d(f/r) = C r⁻³ ⋆1` on the
/// aspherical part `α²dt² − α⁻²dr²`, with `⋆1` oriented as `dr∧dt`.
pub fn vector_l1_identity(lambda: f64, mass: f64, r_grid: &[f64]) -> Result<L1Report> {
    let b = BlackHoleParams::sds(lambda, mass);
    let (lo, hi) = if mass == 0.0 {
        (0.0, (3.0 / lambda).sqrt())
    } else {
        let h = find_horizons(&b)?;
        (h.r_minus, h.r_plus)
    };
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r > lo && r < hi)) {
        return Err(KdsError::InvalidParams(format!("grid must lie in ({lo}, {hi})")));
    }
    let ft = |r: f64| lambda * r / 3.0 + 2.0 * mass / (r * r);
    let mu = |r: f64| 1.0 - 2.0 * mass / r - lambda * r * r / 3.0;
    let mut samples = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        // (d(f/r))_{rt} = ∂_r(f_t/r); the dr∧dt volume coefficient is √(α²·α⁻²)
        let dh = |h: f64| d1(|e| ft(r + e) / (r + e), h);
        // one Richardson step removes the h⁴ term
        let dcoef = (16.0 * dh(5e-4 * r) - dh(1e-3 * r)) / 15.0;
        let vol = (mu(r) / mu(r)).abs().sqrt();
        let coef = r * dcoef / vol;
        samples.push((r, coef));
    }
    let cs: Vec<f64> = samples.iter().map(|&(r, k)| k * r.powi(3)).collect();
    let c = cs.iter().sum::<f64>() / cs.len() as f64;
    let spread = cs.iter().map(|x| (x - c).abs()).fold(0.0, f64::max);
    let slope = if cs.iter().all(|k| k.abs() < 1e-10) {
        None
    } else {
        let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1.abs().ln()).collect();
        Some(fit_line(&xs, &ys).slope)
    };
    if spread > L1_TOL * c.abs().max(1.0) {
        return Err(KdsError::FitFailure { residual: spread, tolerance: L1_TOL });
    }
    Ok(L1Report { lambda, mass, c, spread, slope, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64) -> Vec<f64> {
        (0..12).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 12.0).collect()
    }

    #[test]
    fn constant_is_minus_six_mass() {
        let rep = vector_l1_identity(3.0, 0.1, &grid(0.25, 0.85)).unwrap();
        assert!((rep.c + 0.6).abs() < 1e-10, "{rep:?}");
        assert!((rep.slope.unwrap() + 3.0).abs() < 1e-8);
    }

    #[test]
    fn massless_case_vanishes() {
        let rep = vector_l1_identity(3.0, 0.0, &grid(0.1, 0.9)).unwrap();
        assert!(rep.c.abs() < 1e-12 && rep.slope.is_none());
    }

    #[test]
    fn grid_outside_static_region_is_rejected() {
        assert!(vector_l1_identity(3.0, 0.1, &[0.1, 0.5]).is_err());
    }
}
