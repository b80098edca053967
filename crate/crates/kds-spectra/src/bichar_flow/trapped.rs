use crate::error::{KdsError, Result};
use crate::metric_family::Kds;
use crate::numeric::fd::d1;
use crate::numeric::ode::{Control, OdeOptions};
use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use super::flow::{g_and_grad, hamilton_flow, FlowChart, FlowOptions, PhasePoint};

/// Radius of the photon sphere, the root of `(μ r⁻²)' = 2r⁻⁴(3M − r)`.
pub fn trapped_set_locate(kds: &Kds) -> Result<f64> {
    if kds.a != 0.0 {
        return Err(KdsError::InvalidParams("photon sphere location needs a = 0".into()));
    }
    // r⁴(μ r⁻²)' = 6M − 2r is linear; its root is exact.
    let (c0, c1) = (6.0 * kds.mass(), -2.0);
    Ok(-c0 / c1)
}

/// Hamilton vector field `(ṫ, ṙ, θ̇, φ̇, σ̇, ξ̇, η̇_θ, η̇_φ)` in the static chart.
pub fn static_hamilton_field(kds: &Kds, base: [f64; 4], cov: [f64; 4]) -> [f64; 8] {
    let (r, th) = (base[1], base[2]);
    let mu = kds.mu(r);
    let s2 = th.sin().powi(2);
    let p = Vector4::new(-cov[0], cov[1], cov[2], cov[3]);
    let (_, gr, gth) = g_and_grad(kds, FlowChart::Static, r, th, &p);
    [2.0 * p[0] / mu, -2.0 * mu * cov[1], -2.0 * cov[2] / (r * r), -2.0 * cov[3] / (r * r * s2), 0.0, -gr, -gth, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhotonSphereRun {
    pub r_p: f64,
    pub window: f64,
    pub offset: f64,
    /// Angular momentum scale chosen so that `lyapunov · window = 10`.
    pub fibre_scale: f64,
    pub lyapunov: f64,
    pub max_deviation: f64,
    /// First `s` with `|r − r_P| ≥ 0.01`, if any.
    pub exit_time: Option<f64>,
    pub steps: usize,
}

/// Equatorial null geodesic started at `r_P + offset` with `ξ = 0`.
pub fn photon_sphere_run(kds: &Kds, window: f64, offset: f64) -> Result<PhotonSphereRun> {
    let rp = trapped_set_locate(kds)?;
    let th = std::f64::consts::FRAC_PI_2;
    // growth rate of δr for unit angular momentum: λ² = 2μ ∂²_r G
    let sigma1 = (kds.mu(rp) / (rp * rp)).sqrt();
    let p1 = Vector4::new(-sigma1, 0.0, 0.0, 1.0);
    let grr = d1(|e| g_and_grad(kds, FlowChart::Static, rp + e, th, &p1).1, 1e-4);
    let lyap1 = (2.0 * kds.mu(rp) * grr).max(0.0).sqrt();
    let eta = if lyap1 > 0.0 { 10.0 / (lyap1 * window) } else { 1.0 };
    let r0 = rp + offset;
    let sigma = (kds.mu(r0) / (r0 * r0)).sqrt() * eta;
    let start = PhasePoint { chart: FlowChart::Static, base: [0.0, r0, th, 0.0], cov: [sigma, 0.0, 0.0, eta] };
    let mut max_dev: f64 = 0.0;
    let mut exit = None;
    let opts = FlowOptions {
        ode: OdeOptions { rtol: 1e-13, atol: 1e-16, h0: 1e-3, h_max: 0.5, ..Default::default() },
        record_every: usize::MAX,
        ..Default::default()
    };
    let tr = hamilton_flow(kds, &start, window, opts, |smp| {
        let d = (smp.base[1] - rp).abs();
        max_dev = max_dev.max(d);
        if d >= 0.01 {
            exit = Some(smp.s);
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    Ok(PhotonSphereRun {
        r_p: rp,
        window,
        offset,
        fibre_scale: eta,
        lyapunov: lyap1 * eta,
        max_deviation: max_dev,
        exit_time: exit,
        steps: tr.diagnostics.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::BlackHoleParams;

    #[test]
    fn photon_sphere_radius() {
        for (m, want) in [(0.1, 0.3), (0.15, 0.45)] {
            let k = Kds::new(BlackHoleParams::sds(3.0, m)).unwrap();
            let rp = trapped_set_locate(&k).unwrap();
            assert_eq!(rp, 3.0 * m);
            assert!((rp - want).abs() < 1e-15);
        }
    }

    #[test]
    fn hamilton_field_vanishes_radially_on_photon_sphere() {
        let k = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let rp = trapped_set_locate(&k).unwrap();
        let (eth, eph, th): (f64, f64, f64) = (0.6, 0.9, 1.3);
        let e2 = eth * eth + eph * eph / th.sin().powi(2);
        let sigma = (k.mu(rp) * e2 / (rp * rp)).sqrt();
        let v = static_hamilton_field(&k, [0.0, rp, th, 0.0], [sigma, 0.0, eth, eph]);
        assert!(v[1].abs() < 1e-12 && v[5].abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn trapped_orbit_stays_and_perturbed_escapes() {
        let k = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let on = photon_sphere_run(&k, 60.0, 0.0).unwrap();
        assert!(on.max_deviation < 1e-8, "{on:?}");
        assert!(on.exit_time.is_none());
        let off = photon_sphere_run(&k, 60.0, 1e-4).unwrap();
        assert!(off.exit_time.is_some(), "{off:?}");
    }
}
