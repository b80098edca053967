use crate::error::{KdsError, Result};
use nalgebra::{DMatrix, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::params::{Extension, Kds, POLE_TOL};

/// Coordinate charts. Spherical charts use the order `(t, r, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    BoyerLindquist,
    Star,
    NuForm,
    Cartesian,
}

impl Chart {
    pub const ALL: [Chart; 4] = [Chart::BoyerLindquist, Chart::Star, Chart::NuForm, Chart::Cartesian];

    pub fn name(self) -> &'static str {
        match self {
            Chart::BoyerLindquist => "boyer-lindquist",
            Chart::Star => "star",
            Chart::NuForm => "nu-form",
            Chart::Cartesian => "cartesian",
        }
    }

    pub fn parse(s: &str) -> Option<Chart> {
        Chart::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn is_spherical(self) -> bool {
        self != Chart::Cartesian
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricAtPoint {
    pub chart: Chart,
    pub point: [f64; 4],
    pub g_cov: [[f64; 4]; 4],
    pub g_con: [[f64; 4]; 4],
    /// Chart sign used at this radius (`±1`), for the horizon-crossing charts.
    pub sign: f64,
    pub chi: f64,
    pub extension: Extension,
}

impl MetricAtPoint {
    pub fn cov(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.g_cov[i][j])
    }

    pub fn con(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.g_con[i][j])
    }
}

fn to_arr(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn sym_outer(u: &Vector4<f64>, v: &Vector4<f64>) -> Matrix4<f64> {
    u * v.transpose() + v * u.transpose()
}

impl Kds {
    fn check_spherical(&self, chart: Chart, r: f64, theta: f64) -> Result<()> {
        if !(r.is_finite() && theta.is_finite()) {
            return Err(KdsError::ChartDomain("non-finite coordinates".into()));
        }
        if theta < POLE_TOL || theta > std::f64::consts::PI - POLE_TOL {
            return Err(KdsError::PoleSingular(theta));
        }
        self.check_radius(chart, r)
    }

    fn check_radius(&self, chart: Chart, r: f64) -> Result<()> {
        let h = &self.horizons;
        let ok = match chart {
            Chart::BoyerLindquist => r > h.r_minus && r < h.r_plus,
            _ => {
                let (lo, hi) = self.extended_range();
                r > lo && r < hi && r > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(KdsError::ChartDomain(format!("r = {r} outside the {} chart", chart.name())))
        }
    }

    /// Covariant and contravariant components at `point`.
    ///
    /// Spherical charts take `(t, r, θ, φ)`, the cartesian chart `(t*, p₁, p₂, p₃)`.
    pub fn eval_metric(&self, chart: Chart, point: [f64; 4]) -> Result<MetricAtPoint> {
        let (cov, con, sign, r) = match chart {
            Chart::BoyerLindquist => {
                self.check_spherical(chart, point[1], point[2])?;
                let cov = self.bl_cov(point[1], point[2]);
                (cov, invert(&cov)?, 0.0, point[1])
            }
            Chart::Star => {
                self.check_spherical(chart, point[1], point[2])?;
                let cov = self.star_cov(point[1], point[2]);
                (cov, self.star_con(point[1], point[2]), self.sign(point[1]), point[1])
            }
            Chart::NuForm => {
                if self.a != 0.0 {
                    return Err(KdsError::ChartDomain("the nu-form chart exists only for a = 0".into()));
                }
                self.check_spherical(chart, point[1], point[2])?;
                (self.nu_cov(point[1], point[2]), self.nu_con(point[1], point[2]), 1.0, point[1])
            }
            Chart::Cartesian => {
                let p = [point[1], point[2], point[3]];
                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                self.check_radius(chart, r)?;
                let con = self.cart_con(p);
                (invert(&con)?, con, self.sign(r), r)
            }
        };
        if cov.iter().any(|v| !v.is_finite()) || con.iter().any(|v| !v.is_finite()) {
            return Err(KdsError::ChartDomain("non-finite metric components".into()));
        }
        Ok(MetricAtPoint {
            chart,
            point,
            g_cov: to_arr(&cov),
            g_con: to_arr(&con),
            sign,
            chi: if chart == Chart::BoyerLindquist { f64::NAN } else { self.chi(r) },
            extension: self.ext,
        })
    }

    /// Covariant metric as a sampler for finite differences (no domain checks).
    pub fn metric_sampler(&self, chart: Chart) -> impl Fn(&[f64]) -> DMatrix<f64> + '_ {
        move |x: &[f64]| {
            let m = match chart {
                Chart::BoyerLindquist => self.bl_cov(x[1], x[2]),
                Chart::Star => self.star_cov(x[1], x[2]),
                Chart::NuForm => self.nu_cov(x[1], x[2]),
                Chart::Cartesian => {
                    let c = self.cart_con([x[1], x[2], x[3]]);
                    c.try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN))
                }
            };
            DMatrix::from_iterator(4, 4, m.iter().copied())
        }
    }

    /// Contravariant metric as a function of the point (no domain checks).
    pub fn dual_sampler(&self, chart: Chart) -> impl Fn(&[f64]) -> Matrix4<f64> + '_ {
        move |x: &[f64]| match chart {
            Chart::BoyerLindquist => {
                self.bl_cov(x[1], x[2]).try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN))
            }
            Chart::Star => self.star_con(x[1], x[2]),
            Chart::NuForm => self.nu_con(x[1], x[2]),
            Chart::Cartesian => self.cart_con([x[1], x[2], x[3]]),
        }
    }

    pub(crate) fn bl_cov(&self, r: f64, theta: f64) -> Matrix4<f64> {
        let a = self.a;
        let l1 = 1.0 + self.lam_b;
        let rho2 = self.rho2(r, theta);
        let kap = self.angular_factor(theta);
        let s2 = theta.sin().powi(2);
        let mt = self.mu_tilde(r);
        let w = Vector4::new(1.0, 0.0, 0.0, -a * s2);
        let z = Vector4::new(a, 0.0, 0.0, -(r * r + a * a));
        let mut g = w * w.transpose() * (mt / (l1 * l1 * rho2)) - z * z.transpose() * (kap * s2 / (l1 * l1 * rho2));
        g[(1, 1)] = -rho2 / mt;
        g[(2, 2)] = -rho2 / kap;
        g
    }

    pub(crate) fn star_cov(&self, r: f64, theta: f64) -> Matrix4<f64> {
        let a = self.a;
        let s = self.sign(r);
        let (c, ct) = (self.c_s(s, r), self.ct_s(s, r));
        let l1 = 1.0 + self.lam_b;
        let rho2 = self.rho2(r, theta);
        let kap = self.angular_factor(theta);
        let s2 = theta.sin().powi(2);
        let mt = self.mu_tilde(r);
        let w = Vector4::new(1.0, s * c - a * s2 * s * ct, 0.0, -a * s2);
        let z = Vector4::new(a, a * s * c - (r * r + a * a) * s * ct, 0.0, -(r * r + a * a));
        let dr = Vector4::new(0.0, 1.0, 0.0, 0.0);
        let mut g = w * w.transpose() * (mt / (l1 * l1 * rho2)) - z * z.transpose() * (kap * s2 / (l1 * l1 * rho2))
            + sym_outer(&w, &dr) * (s / l1);
        g[(2, 2)] -= rho2 / kap;
        g
    }

    pub(crate) fn star_con(&self, r: f64, theta: f64) -> Matrix4<f64> {
        let a = self.a;
        let s = self.sign(r);
        let (c, ct) = (self.c_s(s, r), self.ct_s(s, r));
        let l1 = 1.0 + self.lam_b;
        let rho2 = self.rho2(r, theta);
        let kap = self.angular_factor(theta);
        let s2 = theta.sin().powi(2);
        let mt = self.mu_tilde(r);
        let v1 = Vector4::new(-s * c, 1.0, 0.0, -s * ct);
        let v2 = Vector4::new(a * s2, 0.0, 0.0, 1.0);
        let dt = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let dphi = Vector4::new(0.0, 0.0, 0.0, 1.0);
        let mut g = -(v1 * v1.transpose()) * mt
            + sym_outer(&v1, &dphi) * (s * a * l1)
            + sym_outer(&v1, &dt) * (s * l1 * (r * r + a * a))
            - v2 * v2.transpose() * (l1 * l1 / (kap * s2));
        g[(2, 2)] -= kap;
        g / rho2
    }

    pub(crate) fn nu_cov(&self, r: f64, theta: f64) -> Matrix4<f64> {
        let (mu, nu, c2) = (self.mu(r), self.nu(r), self.c_star * self.c_star);
        let s2 = theta.sin().powi(2);
        Matrix4::new(mu, -nu, 0.0, 0.0, -nu, -c2, 0.0, 0.0, 0.0, 0.0, -r * r, 0.0, 0.0, 0.0, 0.0, -r * r * s2)
    }

    pub(crate) fn nu_con(&self, r: f64, theta: f64) -> Matrix4<f64> {
        let (mu, nu, c2) = (self.mu(r), self.nu(r), self.c_star * self.c_star);
        let s2 = theta.sin().powi(2);
        Matrix4::new(
            c2,
            -nu,
            0.0,
            0.0,
            -nu,
            -mu,
            0.0,
            0.0,
            0.0,
            0.0,
            -1.0 / (r * r),
            0.0,
            0.0,
            0.0,
            0.0,
            -1.0 / (r * r * s2),
        )
    }

    /// Dual metric in `(t*, p)` built from smooth vector fields on ℝ³.
    pub(crate) fn cart_con(&self, p: [f64; 3]) -> Matrix4<f64> {
        let av = self.params.angmom;
        let a = self.a;
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let ph = [p[0] / r, p[1] / r, p[2] / r];
        let adp = av[0] * ph[0] + av[1] * ph[1] + av[2] * ph[2];
        let s = self.sign(r);
        let c = self.c_s(s, r);
        let cta = self.ct_over_a(s, r);
        let l1 = 1.0 + self.lam_b;
        let l3 = self.lambda() / 3.0;
        let rho2 = r * r + adp * adp;
        let kap = 1.0 + l3 * adp * adp;
        let a2s2 = a * a - adp * adp;
        let mt = self.mu_tilde(r);
        let cross = |u: [f64; 3], v: [f64; 3]| {
            [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
        };
        let axp = cross(av, p);
        let pxa = cross(p, av);
        let pp = cross(p, pxa);
        let t = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let rv = Vector4::new(0.0, ph[0], ph[1], ph[2]);
        let av4 = Vector4::new(0.0, axp[0], axp[1], axp[2]);
        let th = Vector4::new(0.0, pp[0] / r, pp[1] / r, pp[2] / r);
        let v1 = rv - t * (s * c) - av4 * (s * cta);
        let mut sph = Matrix4::zeros();
        for i in 0..3 {
            for j in 0..3 {
                sph[(i + 1, j + 1)] = if i == j { r * r } else { 0.0 } - p[i] * p[j];
            }
        }
        let g = -(v1 * v1.transpose()) * mt
            + sym_outer(&v1, &av4) * (s * l1)
            + sym_outer(&v1, &t) * (s * l1 * (r * r + a * a))
            - (t * t.transpose() * a2s2 + sym_outer(&t, &av4)) * (l1 * l1 / kap)
            - (sph * (l1 * l1) - th * th.transpose() * (l3 * (2.0 + self.lam_b + l3 * adp * adp))) / kap;
        g / rho2
    }
}

fn invert(m: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    m.try_inverse().ok_or_else(|| KdsError::ChartDomain("singular metric".into()))
}
