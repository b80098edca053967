//! Finite-difference Riemannian and Lorentzian geometry in any dimension.
//!
//! Christoffel symbols are stored as an `n × n²` matrix: row `a`, column
//! `b·n + c` holds `Γ^a_{bc}`.

use super::fd::{d1, gradient};
use nalgebra::{DMatrix, DVector};

/// A metric sampler `x ↦ g_{ab}(x)`.
pub type MetricFn<'a> = &'a dyn Fn(&[f64]) -> DMatrix<f64>;

pub fn inverse(g: &DMatrix<f64>) -> DMatrix<f64> {
    g.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(g.nrows(), g.ncols(), f64::NAN))
}

/// `Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{db} − ∂_d g_{bc})`.
pub fn christoffel_from(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = ginv.nrows();
    let mut low = vec![0.0; n * n * n];
    for d in 0..n {
        for b in 0..n {
            for c in 0..n {
                low[(d * n + b) * n + c] = 0.5 * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
            }
        }
    }
    let mut gam = DMatrix::zeros(n, n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += ginv[(a, d)] * low[(d * n + b) * n + c];
                }
                gam[(a, b * n + c)] = s;
            }
        }
    }
    gam
}

pub fn christoffel(g: MetricFn, x: &[f64], h: &[f64]) -> DMatrix<f64> {
    let ginv = inverse(&g(x));
    let dg = gradient(g, x, h);
    christoffel_from(&ginv, &dg)
}

/// Ricci tensor by nested differences of the Christoffel field.
pub fn ricci(g: MetricFn, x: &[f64], h: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let gam_field = |y: &[f64]| christoffel(g, y, h);
    let gam = gam_field(x);
    let dgam = gradient(&gam_field, x, h);
    let at = |m: &DMatrix<f64>, a: usize, b: usize, c: usize| m[(a, b * n + c)];
    let mut ric = DMatrix::zeros(n, n);
    for b in 0..n {
        for d in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                s += at(&dgam[a], a, b, d) - at(&dgam[d], a, a, b);
                for e in 0..n {
                    s += at(&gam, a, a, e) * at(&gam, e, b, d) - at(&gam, a, d, e) * at(&gam, e, a, b);
                }
            }
            ric[(b, d)] = s;
        }
    }
    // symmetrise away round-off
    (&ric + ric.transpose()) * 0.5
}

/// Richardson-extrapolated Ricci tensor and the step-halving disagreement.
pub fn ricci_richardson(g: MetricFn, x: &[f64], h: &[f64]) -> (DMatrix<f64>, f64) {
    let r1 = ricci(g, x, h);
    let h2: Vec<f64> = h.iter().map(|v| 0.5 * v).collect();
    let r2 = ricci(g, x, &h2);
    let dis = (&r2 - &r1).amax();
    ((&r2 * 16.0 - &r1) * (1.0 / 15.0), dis)
}

pub fn trace(ginv: &DMatrix<f64>, u: &DMatrix<f64>) -> f64 {
    ginv.component_mul(u).sum()
}

/// `∇_a w_b` for a 1-form field.
pub fn nabla_form(w: &dyn Fn(&[f64]) -> DVector<f64>, gam: &DMatrix<f64>, x: &[f64], h: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w0 = w(x);
    let dw = gradient(w, x, h);
    DMatrix::from_fn(n, n, |a, b| {
        let mut s = dw[a][b];
        for c in 0..n {
            s -= gam[(c, a * n + b)] * w0[c];
        }
        s
    })
}

/// `∇_a u_{bc}` for a symmetric 2-tensor field, returned per `a`.
pub fn nabla_sym(u: &dyn Fn(&[f64]) -> DMatrix<f64>, gam: &DMatrix<f64>, x: &[f64], h: &[f64]) -> Vec<DMatrix<f64>> {
    let n = x.len();
    let u0 = u(x);
    let du = gradient(u, x, h);
    (0..n)
        .map(|a| {
            DMatrix::from_fn(n, n, |b, c| {
                let mut s = du[a][(b, c)];
                for d in 0..n {
                    s -= gam[(d, a * n + b)] * u0[(d, c)] + gam[(d, a * n + c)] * u0[(b, d)];
                }
                s
            })
        })
        .collect()
}

/// Symmetric gradient `δ*w = sym ∇w`.
pub fn sym_grad(w: &dyn Fn(&[f64]) -> DVector<f64>, gam: &DMatrix<f64>, x: &[f64], h: &[f64]) -> DMatrix<f64> {
    let m = nabla_form(w, gam, x, h);
    (&m + m.transpose()) * 0.5
}

/// Divergence `(δu)_c = −g^{ab}∇_a u_{bc}`.
pub fn div_sym(
    u: &dyn Fn(&[f64]) -> DMatrix<f64>,
    ginv: &DMatrix<f64>,
    gam: &DMatrix<f64>,
    x: &[f64],
    h: &[f64],
) -> DVector<f64> {
    let n = x.len();
    let nab = nabla_sym(u, gam, x, h);
    DVector::from_fn(n, |c, _| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s -= ginv[(a, b)] * nab[a][(b, c)];
            }
        }
        s
    })
}

/// Trace reversal `G_g u = u − ½ g tr_g u`.
pub fn trace_reverse(g: &DMatrix<f64>, ginv: &DMatrix<f64>, u: &DMatrix<f64>) -> DMatrix<f64> {
    u - g * (0.5 * trace(ginv, u))
}

/// `Υ(g)_μ = g_{μκ} g^{νλ}(Γ(g)^κ_{νλ} − Γ(t)^κ_{νλ})`.
pub fn upsilon(g: MetricFn, t: MetricFn, x: &[f64], h: &[f64]) -> DVector<f64> {
    let n = x.len();
    let g0 = g(x);
    let ginv = inverse(&g0);
    let diff = christoffel(g, x, h) - christoffel(t, x, h);
    let mut cv = DVector::zeros(n);
    for k in 0..n {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += ginv[(a, b)] * diff[(k, a * n + b)];
            }
        }
        cv[k] = s;
    }
    &g0 * cv
}

/// One-dimensional derivative helper re-exported for callers.
pub fn deriv(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    d1(f, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_sphere(x: &[f64]) -> DMatrix<f64> {
        let s = x[0].sin();
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s * s])
    }

    #[test]
    fn sphere_ricci_equals_metric() {
        let x = [0.9, 0.3];
        let (r, dis) = ricci_richardson(&round_sphere, &x, &[1e-3, 1e-3]);
        let g = round_sphere(&x);
        assert!((r - g).amax() < 1e-9, "disagreement {dis}");
    }

    #[test]
    fn flat_polar_christoffels() {
        let polar = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0] * x[0]]);
        let gam = christoffel(&polar, &[2.0, 0.1], &[1e-3, 1e-3]);
        // Γ^r_{φφ} = −r, Γ^φ_{rφ} = 1/r
        assert!((gam[(0, 3)] + 2.0).abs() < 1e-10);
        assert!((gam[(1, 1)] - 0.5).abs() < 1e-10);
        assert!(ricci(&polar, &[2.0, 0.1], &[1e-3, 1e-3]).amax() < 1e-8);
    }

    #[test]
    fn upsilon_of_identical_metrics_vanishes() {
        let u = upsilon(&round_sphere, &round_sphere, &[1.1, 0.2], &[1e-3, 1e-3]);
        assert_eq!(u.amax(), 0.0);
    }

    #[test]
    fn killing_form_has_zero_symmetric_gradient() {
        // ∂_φ on the sphere, lowered: (0, sin²θ)
        let w = |x: &[f64]| DVector::from_vec(vec![0.0, x[0].sin().powi(2)]);
        let x = [0.7, 1.0];
        let h = [1e-3, 1e-3];
        let gam = christoffel(&round_sphere, &x, &h);
        assert!(sym_grad(&w, &gam, &x, &h).amax() < 1e-10);
    }
}
