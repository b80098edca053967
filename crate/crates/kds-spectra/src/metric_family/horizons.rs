use crate::error::{KdsError, Result};
use crate::numeric::roots::real_roots;
use serde::{Deserialize, Serialize};

use super::params::BlackHoleParams;

/// A θ-dependent quantity sampled on the 2-sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSample {
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HorizonData {
    pub r_minus: f64,
    pub r_plus: f64,
    pub kappa_minus: f64,
    pub kappa_plus: f64,
    pub beta_minus0: Vec<ThetaSample>,
    pub beta_plus0: Vec<ThetaSample>,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub r_crit: f64,
    pub c_star: f64,
}

/// Number of θ samples reported for `β_{±,0}`.
pub const THETA_SAMPLES: usize = 9;

impl HorizonData {
    pub(crate) fn de_sitter(lambda: f64) -> Self {
        let rp = (3.0 / lambda).sqrt();
        // μ = 1 − Λr²/3, |μ'(r₊)| = 2Λr₊/3
        let kp = lambda * rp / 3.0;
        let samples = (0..THETA_SAMPLES).map(|k| ThetaSample { theta: theta_sample(k), value: 2.0 * kp }).collect();
        HorizonData {
            r_minus: 0.0,
            r_plus: rp,
            kappa_minus: 0.0,
            kappa_plus: kp,
            beta_minus0: Vec::new(),
            beta_plus0: samples,
            beta_minus: f64::INFINITY,
            beta_plus: 1.0 / kp,
            r_crit: 0.0,
            c_star: 1.0,
        }
    }

    /// `β_{±,0}` at an arbitrary angle.
    pub fn beta0_at(&self, b: &BlackHoleParams, plus: bool, theta: f64) -> f64 {
        let r = if plus { self.r_plus } else { self.r_minus };
        let a = b.a();
        dmu_tilde(b, r).abs() / (r * r + a * a * theta.cos().powi(2))
    }
}

fn theta_sample(k: usize) -> f64 {
    std::f64::consts::PI * k as f64 / (THETA_SAMPLES - 1) as f64
}

pub(crate) fn dmu_tilde(b: &BlackHoleParams, r: f64) -> f64 {
    let a2 = b.a() * b.a();
    let l3 = b.lambda / 3.0;
    2.0 * r * (1.0 - l3 * r * r) - 2.0 * l3 * r * (r * r + a2) - 2.0 * b.mass
}

/// Horizon radii and surface quantities.
///
/// The radii are the two largest roots of `μ̃_b`, found as companion-matrix
/// eigenvalues followed by one Newton step.
pub fn find_horizons(b: &BlackHoleParams) -> Result<HorizonData> {
    b.check_basic()?;
    let (lam, m) = (b.lambda, b.mass);
    let a = b.a();
    let x = 9.0 * lam * m * m;
    if !(x > 0.0 && x < 1.0) {
        return Err(KdsError::InvalidParams(format!("9ΛM² = {x} must lie in (0, 1)")));
    }
    let lam_b = lam * a * a / 3.0;
    let coeffs: Vec<f64> = if a == 0.0 {
        vec![-2.0 * m, 1.0, 0.0, -lam / 3.0]
    } else {
        vec![a * a, -2.0 * m, 1.0 - lam_b, 0.0, -lam / 3.0]
    };
    let roots = real_roots(&coeffs, 1e-9);
    let pos: Vec<f64> = roots.into_iter().filter(|&r| r > 0.0).collect();
    if pos.len() < 2 {
        return Err(KdsError::DegenerateHorizons(format!("only {} positive real roots", pos.len())));
    }
    let (rp, rm) = (pos[0], pos[1]);
    let (dp, dm) = (dmu_tilde(b, rp), dmu_tilde(b, rm));
    if rp - rm < 1e-8 * rp || dp.abs() < 1e-10 || dm.abs() < 1e-10 {
        return Err(KdsError::DegenerateHorizons(format!("roots {rm} and {rp} coalesce")));
    }
    let l1 = 1.0 + lam_b;
    let kp = dp.abs() / (2.0 * l1 * (rp * rp + a * a));
    let km = dm.abs() / (2.0 * l1 * (rm * rm + a * a));
    let sample = |r: f64, d: f64| -> Vec<ThetaSample> {
        (0..THETA_SAMPLES)
            .map(|k| {
                let th = theta_sample(k);
                ThetaSample { theta: th, value: d.abs() / (r * r + a * a * th.cos().powi(2)) }
            })
            .collect()
    };
    let r_crit = (3.0 * m / lam).cbrt();
    let c_star = 1.0 / (1.0 - x.cbrt()).sqrt();
    Ok(HorizonData {
        r_minus: rm,
        r_plus: rp,
        kappa_minus: km,
        kappa_plus: kp,
        beta_minus0: sample(rm, dm),
        beta_plus0: sample(rp, dp),
        beta_minus: 1.0 / km,
        beta_plus: 1.0 / kp,
        r_crit,
        c_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Trigonometric solution of the depressed cubic `r³ − r + 2M·(3/Λ)·… = 0`.
    fn cubic_oracle(lam: f64, m: f64) -> (f64, f64) {
        // −(Λ/3)r³ + r − 2M = 0  ⇔  r³ + p r + q = 0
        let p = -3.0 / lam;
        let q = 6.0 * m / lam;
        let k = 2.0 * (-p / 3.0).sqrt();
        let phi = ((3.0 * q / (p * k)).acos()) / 3.0;
        let root = |j: f64| k * (phi - 2.0 * std::f64::consts::PI * j / 3.0).cos();
        let mut rs = [root(0.0), root(1.0), root(2.0)];
        rs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        (rs[1], rs[0])
    }

    #[test]
    fn static_values() {
        let h = find_horizons(&BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let (rm, rp) = cubic_oracle(3.0, 0.1);
        assert!((h.r_minus - rm).abs() < 1e-12 && (h.r_plus - rp).abs() < 1e-12);
        assert!((h.r_minus - 0.2091488).abs() < 1e-6 && (h.r_plus - 0.8788851).abs() < 1e-6);
        assert!((h.r_crit - 0.1f64.cbrt()).abs() < 1e-15);
        assert!((h.c_star - 1.0 / (1.0 - 0.27f64.cbrt()).sqrt()).abs() < 1e-14);
        assert!((h.c_star - 1.681517).abs() < 1e-6);
        let dmu = |r: f64| 2.0 * 0.1 / (r * r) - 2.0 * r;
        assert!((h.kappa_plus + 0.5 * dmu(rp)).abs() < 1e-12);
        assert!((h.kappa_minus - 0.5 * dmu(rm)).abs() < 1e-12);
        assert!((h.beta_plus * h.kappa_plus - 1.0).abs() < 1e-14);
        assert!((h.kappa_plus - 0.749425).abs() < 1e-6);
    }

    #[test]
    fn rejects_extremal_and_massless() {
        assert!(matches!(find_horizons(&BlackHoleParams::sds(3.0, 0.0)), Err(KdsError::InvalidParams(_))));
        assert!(matches!(find_horizons(&BlackHoleParams::sds(3.0, 0.2)), Err(KdsError::InvalidParams(_))));
        assert!(matches!(find_horizons(&BlackHoleParams::kds(3.0, 0.1, 0.3)), Err(KdsError::DegenerateHorizons(_))));
    }

    #[test]
    fn rotating_roots_are_zeros() {
        let b = BlackHoleParams::kds(3.0, 0.1, 0.02);
        let h = find_horizons(&b).unwrap();
        let mt = |r: f64| (r * r + 4e-4) * (1.0 - r * r) - 0.2 * r;
        assert!(mt(h.r_plus).abs() < 1e-15 && mt(h.r_minus).abs() < 1e-15);
        assert!(h.r_minus < h.r_crit && h.r_crit < h.r_plus);
    }

    proptest! {
        #[test]
        fn continuous_in_parameters(m in 0.08f64..0.15, a in 0.0f64..0.005, dm in -1e-8f64..1e-8, da in -1e-8f64..1e-8) {
            let b1 = BlackHoleParams::new(3.0, m, [0.0, 0.0, a]).unwrap();
            let b2 = BlackHoleParams::new(3.0, m + dm, [0.0, 0.0, a + da]).unwrap();
            let (h1, h2) = (find_horizons(&b1).unwrap(), find_horizons(&b2).unwrap());
            for (x, y) in [
                (h1.r_minus, h2.r_minus), (h1.r_plus, h2.r_plus),
                (h1.kappa_minus, h2.kappa_minus), (h1.kappa_plus, h2.kappa_plus),
                (h1.beta_minus, h2.beta_minus), (h1.beta_plus, h2.beta_plus),
                (h1.r_crit, h2.r_crit), (h1.c_star, h2.c_star),
            ] {
                prop_assert!((x - y).abs() < 1e-6);
            }
        }
    }
}
