use crate::error::{KdsError, Result};
use crate::numeric::smooth::smoothstep7;
use serde::{Deserialize, Serialize};

use super::horizons::{find_horizons, HorizonData};

/// Spherical charts refuse angles this close to a pole.
pub const POLE_TOL: f64 = 1e-6;

/// A point `b = (M, a⃗)` of the family together with Λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlackHoleParams {
    pub lambda: f64,
    pub mass: f64,
    pub angmom: [f64; 3],
}

impl BlackHoleParams {
    pub fn new(lambda: f64, mass: f64, angmom: [f64; 3]) -> Result<Self> {
        let b = BlackHoleParams { lambda, mass, angmom };
        b.check_basic()?;
        Ok(b)
    }

    /// Schwarzschild–de Sitter parameters with the given mass.
    pub fn sds(lambda: f64, mass: f64) -> Self {
        BlackHoleParams { lambda, mass, angmom: [0.0; 3] }
    }

    /// Kerr–de Sitter parameters with angular momentum along the z axis.
    pub fn kds(lambda: f64, mass: f64, a: f64) -> Self {
        BlackHoleParams { lambda, mass, angmom: [0.0, 0.0, a] }
    }

    pub fn a(&self) -> f64 {
        let [x, y, z] = self.angmom;
        (x * x + y * y + z * z).sqrt()
    }

    /// The static member `b₀ = (M, 0)` with the same mass.
    pub fn static_part(&self) -> Self {
        BlackHoleParams::sds(self.lambda, self.mass)
    }

    pub(crate) fn check_basic(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(KdsError::InvalidParams(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return Err(KdsError::InvalidParams(format!("mass must be non-negative, got {}", self.mass)));
        }
        if self.angmom.iter().any(|v| !v.is_finite()) {
            return Err(KdsError::InvalidParams("angular momentum must be finite".into()));
        }
        Ok(())
    }
}

/// Cutoff data for the chart that crosses both horizons.
///
/// `χ = 1` on `[r1, r2]`, decreasing to `0` on `[r2, r3]` by the degree-7
/// smooth step. The sign of the chart switches at `r_mid = (r1 + r2)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Extension {
    pub eps_m: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r_mid: f64,
}

/// A parameter point with its derived geometric data.
#[derive(Debug, Clone)]
pub struct Kds {
    pub params: BlackHoleParams,
    pub a: f64,
    /// `λ_b = Λa²/3`.
    pub lam_b: f64,
    pub horizons: HorizonData,
    /// Horizons of the static part `b₀`.
    pub r_minus0: f64,
    pub r_plus0: f64,
    pub r_crit: f64,
    pub c_star: f64,
    pub ext: Extension,
    /// Orthonormal frame `(e1, e2, e3)` with `e3` along `a⃗` (or `z`).
    pub frame: [[f64; 3]; 3],
}

impl Kds {
    /// Builds the geometry with the default margin `ε_M = 0.05(r₊ − r₋)`.
    pub fn new(params: BlackHoleParams) -> Result<Self> {
        Self::with_margin(params, None)
    }

    pub fn with_margin(params: BlackHoleParams, eps_m: Option<f64>) -> Result<Self> {
        params.check_basic()?;
        let a = params.a();
        let frame = axis_frame(params.angmom);
        let lam = params.lambda;
        if params.mass == 0.0 {
            if a != 0.0 {
                return Err(KdsError::InvalidParams("zero mass is only supported with a = 0".into()));
            }
            // Pure de Sitter: one horizon, a single chart sign.
            let rp = (3.0 / lam).sqrt();
            let horizons = HorizonData::de_sitter(lam);
            return Ok(Kds {
                params,
                a,
                lam_b: 0.0,
                horizons,
                r_minus0: 0.0,
                r_plus0: rp,
                r_crit: 0.0,
                c_star: 1.0,
                ext: Extension { eps_m: eps_m.unwrap_or(0.05 * rp), r1: 0.0, r2: 0.0, r3: 0.0, r_mid: 0.0 },
                frame,
            });
        }
        let h0 = find_horizons(&params.static_part())?;
        let horizons = if a == 0.0 { h0.clone() } else { find_horizons(&params)? };
        let eps = eps_m.unwrap_or(0.05 * (h0.r_plus - h0.r_minus));
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(KdsError::InvalidParams(format!("extension margin must be positive, got {eps}")));
        }
        let r1 = h0.r_minus + 2.0 * eps;
        let r2 = h0.r_crit;
        let r3 = h0.r_plus - eps;
        if !(r1 < r2 && r2 < r3) {
            return Err(KdsError::InvalidParams("extension margin too large for the cutoff intervals".into()));
        }
        let ext = Extension { eps_m: eps, r1, r2, r3, r_mid: 0.5 * (r1 + r2) };
        let kds = Kds {
            params,
            a,
            lam_b: lam * a * a / 3.0,
            r_minus0: h0.r_minus,
            r_plus0: h0.r_plus,
            r_crit: h0.r_crit,
            c_star: h0.c_star,
            horizons,
            ext,
            frame,
        };
        // The cutoff region must stay strictly between the rotating horizons.
        if !(kds.horizons.r_minus < ext.r_mid && ext.r3 < kds.horizons.r_plus) {
            return Err(KdsError::InvalidParams("rotation too large for the fixed cutoff intervals".into()));
        }
        Ok(kds)
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn mass(&self) -> f64 {
        self.params.mass
    }

    /// `μ_{b₀}(r) = 1 − 2M/r − Λr²/3`.
    pub fn mu(&self, r: f64) -> f64 {
        1.0 - 2.0 * self.mass() / r - self.lambda() * r * r / 3.0
    }

    pub fn dmu(&self, r: f64) -> f64 {
        2.0 * self.mass() / (r * r) - 2.0 * self.lambda() * r / 3.0
    }

    /// `μ̃_b(r) = (r² + a²)(1 − Λr²/3) − 2Mr`.
    pub fn mu_tilde(&self, r: f64) -> f64 {
        let a2 = self.a * self.a;
        (r * r + a2) * (1.0 - self.lambda() * r * r / 3.0) - 2.0 * self.mass() * r
    }

    pub fn dmu_tilde(&self, r: f64) -> f64 {
        let a2 = self.a * self.a;
        let l3 = self.lambda() / 3.0;
        2.0 * r * (1.0 - l3 * r * r) - 2.0 * l3 * r * (r * r + a2) - 2.0 * self.mass()
    }

    pub fn rho2(&self, r: f64, theta: f64) -> f64 {
        let c = theta.cos();
        r * r + self.a * self.a * c * c
    }

    /// `κ_b(θ) = 1 + λ_b cos²θ`.
    pub fn angular_factor(&self, theta: f64) -> f64 {
        let c = theta.cos();
        1.0 + self.lam_b * c * c
    }

    /// `ν(r) = −c_{t*}(r − r_c)√(Λ(r + 2r_c)/(3r))`.
    ///
    /// This is the root of `ν² = 1 − c_{t*}²μ` with the sign of `r_c − r`,
    /// written without the cancellation near `r_c`.
    pub fn nu(&self, r: f64) -> f64 {
        let rc = self.r_crit;
        -self.c_star * (r - rc) * (self.lambda() * (r + 2.0 * rc) / (3.0 * r)).sqrt()
    }

    /// `c_{b₀,+} = −(1 + ν)/μ`.
    pub fn c0_plus(&self, r: f64) -> f64 {
        -self.c_star * self.c_star / (1.0 - self.nu(r))
    }

    /// `c_{b₀,−} = (ν − 1)/μ`.
    pub fn c0_minus(&self, r: f64) -> f64 {
        -self.c_star * self.c_star / (1.0 + self.nu(r))
    }

    /// The cutoff `χ`, equal to 1 up to `r2` and 0 beyond `r3`.
    pub fn chi(&self, r: f64) -> f64 {
        let e = &self.ext;
        if e.r3 <= e.r2 {
            return 0.0;
        }
        1.0 - smoothstep7((r - e.r2) / (e.r3 - e.r2))
    }

    /// Chart sign: `−1` below `r_mid`, `+1` above.
    pub fn sign(&self, r: f64) -> f64 {
        if r < self.ext.r_mid {
            -1.0
        } else {
            1.0
        }
    }

    /// `c_{b,s}(r)`.
    pub fn c_s(&self, s: f64, r: f64) -> f64 {
        if s < 0.0 {
            return self.c0_minus(r);
        }
        let chi = self.chi(r);
        if chi == 0.0 || self.a == 0.0 {
            return self.c0_plus(r);
        }
        let l1 = 1.0 + self.lam_b;
        let a2 = self.a * self.a;
        -(2.0 * l1 * (r * r + a2) / self.mu_tilde(r) + self.c0_minus(r)) * chi + self.c0_plus(r) * (1.0 - chi)
    }

    /// `c̃_{b,s}(r)/a`, finite as `a → 0`.
    pub fn ct_over_a(&self, s: f64, r: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        let chi = self.chi(r);
        if chi == 0.0 {
            return 0.0;
        }
        -2.0 * (1.0 + self.lam_b) * chi / self.mu_tilde(r)
    }

    /// `c̃_{b,s}(r)`.
    pub fn ct_s(&self, s: f64, r: f64) -> f64 {
        self.a * self.ct_over_a(s, r)
    }

    /// `F_b'(r)` with `t* = t − F_b(r)` (Boyer–Lindquist overlap only).
    pub fn f_prime(&self, r: f64) -> f64 {
        let s = self.sign(r);
        let a2 = self.a * self.a;
        s * ((1.0 + self.lam_b) * (r * r + a2) / self.mu_tilde(r) + self.c_s(s, r))
    }

    /// `Φ_b'(r)` with `φ* = φ − Φ_b(r)`.
    pub fn phi_prime(&self, r: f64) -> f64 {
        let s = self.sign(r);
        s * ((1.0 + self.lam_b) * self.a / self.mu_tilde(r) + self.ct_s(s, r))
    }

    /// Radial range of the horizon-crossing charts.
    pub fn extended_range(&self) -> (f64, f64) {
        let e = self.ext.eps_m;
        ((self.horizons.r_minus - 3.0 * e).max(0.0), self.horizons.r_plus + 3.0 * e)
    }

    /// Spatial point for `(r, θ, φ)` measured in the rotation-adapted frame.
    pub fn to_cartesian(&self, r: f64, theta: f64, phi: f64) -> [f64; 3] {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let [e1, e2, e3] = self.frame;
        let c = [st * cp, st * sp, ct];
        std::array::from_fn(|i| r * (c[0] * e1[i] + c[1] * e2[i] + c[2] * e3[i]))
    }

    /// Inverse of [`Kds::to_cartesian`].
    pub fn to_spherical(&self, p: [f64; 3]) -> (f64, f64, f64) {
        let [e1, e2, e3] = self.frame;
        let dot = |u: [f64; 3]| u[0] * p[0] + u[1] * p[1] + u[2] * p[2];
        let (x, y, z) = (dot(e1), dot(e2), dot(e3));
        let r = (x * x + y * y + z * z).sqrt();
        (r, (z / r).clamp(-1.0, 1.0).acos(), y.atan2(x))
    }
}

fn axis_frame(a: [f64; 3]) -> [[f64; 3]; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if n == 0.0 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let e3 = [a[0] / n, a[1] / n, a[2] / n];
    // pick the coordinate axis least aligned with e3
    let k = (0..3).min_by(|&i, &j| e3[i].abs().partial_cmp(&e3[j].abs()).unwrap()).unwrap();
    let mut u = [0.0; 3];
    u[k] = 1.0;
    let d = u[0] * e3[0] + u[1] * e3[1] + u[2] * e3[2];
    let mut e1 = [u[0] - d * e3[0], u[1] - d * e3[1], u[2] - d * e3[2]];
    let m = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|v| *v /= m);
    let e2 = [e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2], e3[0] * e1[1] - e3[1] * e1[0]];
    [e1, e2, e3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sds() -> Kds {
        Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap()
    }

    #[test]
    fn nu_identity_on_dense_grid() {
        let k = sds();
        let (lo, hi) = k.extended_range();
        for i in 0..=2000 {
            let r = lo + (hi - lo) * i as f64 / 2000.0;
            let nu = k.nu(r);
            let res = nu * nu + k.c_star * k.c_star * k.mu(r) - 1.0;
            assert!(res.abs() < 1e-14, "r = {r}: {res:e}");
        }
        assert_eq!(k.nu(k.r_crit), 0.0);
        assert!(k.nu(k.r_crit + 0.1) < 0.0 && k.nu(k.r_crit - 0.1) > 0.0);
    }

    #[test]
    fn mu_tilde_reduces_at_zero_rotation() {
        let k = sds();
        for r in [0.25, 0.5, 0.8] {
            assert!((k.mu_tilde(r) - r * r * k.mu(r)).abs() < 1e-15);
        }
    }

    #[test]
    fn c_functions_agree_on_overlap() {
        let k = Kds::new(BlackHoleParams::kds(3.0, 0.1, 0.02)).unwrap();
        let r = 0.5 * (k.ext.r1 + k.ext.r2);
        let fm = -((1.0 + k.lam_b) * (r * r + k.a * k.a) / k.mu_tilde(r) + k.c_s(-1.0, r));
        let fp = (1.0 + k.lam_b) * (r * r + k.a * k.a) / k.mu_tilde(r) + k.c_s(1.0, r);
        assert!((fm - fp).abs() < 1e-12);
    }

    #[test]
    fn static_c_plus_matches_closed_form() {
        let k = sds();
        for r in [0.3, 0.45, 0.6, 0.8] {
            let closed = (-1.0 - k.nu(r)) / k.mu(r);
            assert!((k.c0_plus(r) - closed).abs() < 1e-12 * closed.abs().max(1.0));
        }
    }

    #[test]
    fn frame_is_orthonormal_and_aligned() {
        let f = axis_frame([0.3, -0.2, 0.5]);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| f[i][k] * f[j][k]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let n = (0.09f64 + 0.04 + 0.25).sqrt();
        assert!((f[2][0] - 0.3 / n).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Kds::new(BlackHoleParams::sds(-1.0, 0.1)).is_err());
        assert!(Kds::new(BlackHoleParams::sds(3.0, 0.2)).is_err());
        assert!(Kds::new(BlackHoleParams::kds(3.0, 0.0, 0.1)).is_err());
    }

    proptest! {
        #[test]
        fn spherical_roundtrip(r in 0.2f64..1.0, th in 0.01f64..3.13, ph in -3.1f64..3.1) {
            let k = Kds::new(BlackHoleParams::new(3.0, 0.1, [0.01, 0.003, -0.004]).unwrap()).unwrap();
            let (r2, th2, ph2) = k.to_spherical(k.to_cartesian(r, th, ph));
            prop_assert!((r - r2).abs() < 1e-13 && (th - th2).abs() < 1e-9 && (ph - ph2).abs() < 1e-9);
        }
    }
}
