//! Fourth-order centred difference stencils over any linear value type.

use nalgebra::{DMatrix, DVector};
use std::ops::{Add, Mul, Sub};

/// Values that can be combined linearly by a stencil.
pub trait Lin: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T> Lin for T where T: Clone + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// First derivative at offset 0 of `f(offset)`.
pub fn d1<T: Lin>(f: impl Fn(f64) -> T, h: f64) -> T {
    let a = f(-2.0 * h);
    let b = f(-h);
    let c = f(h);
    let d = f(2.0 * h);
    ((c - b) * 8.0 + (a - d)) * (1.0 / (12.0 * h))
}

/// Second derivative at offset 0 of `f(offset)`.
pub fn d2<T: Lin>(f: impl Fn(f64) -> T, h: f64) -> T {
    let a = f(-2.0 * h);
    let b = f(-h);
    let m = f(0.0);
    let c = f(h);
    let d = f(2.0 * h);
    ((b + c) * 16.0 - (a + d) - m * 30.0) * (1.0 / (12.0 * h * h))
}

/// Partial derivatives of a field along every coordinate axis.
pub fn gradient<T: Lin>(f: &dyn Fn(&[f64]) -> T, x: &[f64], h: &[f64]) -> Vec<T> {
    (0..x.len())
        .map(|k| {
            d1(
                |e| {
                    let mut y = x.to_vec();
                    y[k] += e;
                    f(&y)
                },
                h[k],
            )
        })
        .collect()
}

/// Convenience alias for matrix-valued fields.
pub type MatField<'a> = &'a dyn Fn(&[f64]) -> DMatrix<f64>;
/// Convenience alias for vector-valued fields.
pub type VecField<'a> = &'a dyn Fn(&[f64]) -> DVector<f64>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x.powi(3) + 0.25 * x.powi(4);
        let g = |e: f64| f(0.3 + e);
        assert!((d1(g, 0.1) - (2.0 - 0.6 + 1.5 * 0.09 + 0.027)).abs() < 1e-12);
        assert!((d2(g, 0.1) - (-2.0 + 3.0 * 0.3 + 3.0 * 0.09)).abs() < 1e-11);
    }

    #[test]
    fn fourth_order_convergence() {
        let g = |e: f64| (0.7 + e).sin();
        let e1 = (d1(g, 0.1) - 0.7f64.cos()).abs();
        let e2 = (d1(g, 0.05) - 0.7f64.cos()).abs();
        let ratio = e1 / e2;
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
