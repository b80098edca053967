//! Exact arithmetic helpers: ring traits, characteristic polynomials, kernels.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Commutative ring with identity.
pub trait Ring:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}
impl<T> Ring for T where
    T: Clone + PartialEq + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

/// Field: a ring with exact division by non-zero elements.
pub trait Field: Ring + Div<Output = Self> {}
impl<T> Field for T where T: Ring + Div<Output = T> {}

pub type Q = BigRational;

/// Exact rational value of a finite double.
pub fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite float")
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Characteristic polynomial `det(λI − A)` by Berkowitz (division free).
///
/// Returns descending coefficients `[1, c1, …, cn]`.
pub fn charpoly<R: Ring>(a: &[Vec<R>]) -> Vec<R> {
    let n = a.len();
    if n == 0 {
        return vec![R::one()];
    }
    let mut c = vec![R::one(), -a[0][0].clone()];
    for r in 1..n {
        let row: Vec<R> = (0..r).map(|j| a[r][j].clone()).collect();
        let mut v: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        let mut col = vec![R::one(), -a[r][r].clone()];
        for _ in 0..r {
            let mut q = R::zero();
            for j in 0..r {
                q = q + row[j].clone() * v[j].clone();
            }
            col.push(-q);
            let mut nv = vec![R::zero(); r];
            for i in 0..r {
                let mut acc = R::zero();
                for j in 0..r {
                    acc = acc + a[i][j].clone() * v[j].clone();
                }
                nv[i] = acc;
            }
            v = nv;
        }
        let mut nc = vec![R::zero(); r + 2];
        for i in 0..r + 2 {
            for j in 0..=i.min(r) {
                nc[i] = nc[i].clone() + col[i - j].clone() * c[j].clone();
            }
        }
        c = nc;
    }
    c
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut [Vec<F>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = F::one() / m[r][c].clone();
        for j in 0..cols {
            m[r][j] = m[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    m[i][j] = m[i][j].clone() - f.clone() * m[r][j].clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn nullspace<F: Field>(m: &[Vec<F>], cols: usize) -> Vec<Vec<F>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); cols];
            x[f] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -w[r][f].clone();
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn charpoly_2x2() {
        let a = vec![vec![qi(1), qi(2)], vec![qi(3), qi(4)]];
        assert_eq!(charpoly(&a), vec![qi(1), qi(-5), qi(-2)]);
    }

    #[test]
    fn charpoly_matches_eigen_product() {
        // upper triangular: eigenvalues are the diagonal
        let a = vec![vec![qi(2), qi(7), qi(-1)], vec![qi(0), qi(3), qi(5)], vec![qi(0), qi(0), qr(1, 2)]];
        // (λ-2)(λ-3)(λ-1/2) = λ³ - 5.5λ² + 8.5λ - 3
        assert_eq!(charpoly(&a), vec![qi(1), qr(-11, 2), qr(17, 2), qi(-3)]);
    }

    #[test]
    fn charpoly_complex_trace_and_det() {
        let a = vec![
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.5, 0.0)],
            vec![Complex64::new(-2.0, 0.0), Complex64::new(0.0, -3.0)],
        ];
        let p = charpoly(&a);
        let tr = a[0][0] + a[1][1];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        assert!((p[1] + tr).norm() < 1e-15 && (p[2] - det).norm() < 1e-15);
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = vec![vec![qi(1), qi(2), qi(3)], vec![qi(2), qi(4), qi(6)]];
        assert_eq!(rank(&m), 1);
        let ker = nullspace(&m, 3);
        assert_eq!(ker.len(), 2);
        for v in ker {
            let s: Q = (0..3).map(|j| m[0][j].clone() * v[j].clone()).fold(qi(0), |a, b| a + b);
            assert!(s.is_zero());
        }
    }

    #[test]
    fn float_conversion_is_exact() {
        assert_eq!(q(0.5), qr(1, 2));
        assert_eq!(q_to_f64(&q(0.1)), 0.1);
    }
}
