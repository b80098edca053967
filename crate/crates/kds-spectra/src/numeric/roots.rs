//! Polynomial roots by companion-matrix eigenvalues with a Newton polish.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Evaluates `sum c[k] z^k` and its derivative by Horner.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `sum c[k] z^k` (ascending order of coefficients).
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().map_or(false, |x| x.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // Zero roots are split off exactly.
    let mut zeros = 0;
    while zeros < n && c[zeros].norm() == 0.0 {
        zeros += 1;
    }
    let c = &c[zeros..];
    let m = c.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if m == 0 {
        return out;
    }
    let lead = c[m];
    let mut comp = DMatrix::<Complex64>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..m {
        comp[(i, m - 1)] = -c[i] / lead;
    }
    // QR can stall on defective companion matrices; Aberth takes over then.
    let eig: Vec<Complex64> = match comp.try_schur(f64::EPSILON, 5000) {
        Some(s) => s.unpack().1.diagonal().iter().copied().collect(),
        None => aberth(c),
    };
    for z0 in eig.iter() {
        let mut z = *z0;
        let (p, dp) = horner(c, z);
        if dp.norm() > 0.0 {
            let step = p / dp;
            let cand = z - step;
            if horner(c, cand).0.norm() <= p.norm() {
                z = cand;
            }
        }
        out.push(z);
    }
    out
}

/// Simultaneous Aberth–Ehrlich iteration; `c` ascending with non-zero lead.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len() - 1;
    let lead = c[m].norm();
    let radius = 1.0 + c[..m].iter().map(|x| x.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / m as f64))
        .collect();
    for _ in 0..2000 {
        let mut worst = 0.0f64;
        for k in 0..m {
            let (p, dp) = horner(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..m).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[k] -= w;
            worst = worst.max(w.norm() / z[k].norm().max(1.0));
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Real roots of a real polynomial, sorted descending.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Vec<f64> {
    let cc: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let scale = poly_roots(&cc).iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let mut r: Vec<f64> =
        poly_roots(&cc).into_iter().filter(|z| z.im.abs() <= imag_tol * scale).map(|z| z.re).collect();
    r.sort_by(|a, b| b.partial_cmp(a).unwrap());
    r
}

/// Monic polynomial with the given roots, ascending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut q = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            q[k + 1] += c;
            q[k] -= c * r;
        }
        p = q;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cubic_roots_match_known_values() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let r = real_roots(&[6.0, -7.0, 0.0, 1.0], 1e-9);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([2.0, 1.0, -3.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_coefficients() {
        // sigma^2 + 7i sigma - 6 = (sigma + i)(sigma + 6i)
        let mut r = poly_roots(&[c(-6.0, 0.0), c(0.0, 7.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-13);
        assert!((r[1] - c(0.0, -6.0)).norm() < 1e-13);
    }

    #[test]
    fn repeated_roots() {
        // (z − 2i)³ (z + 1)
        let p = poly_from_roots(&[c(0.0, 2.0), c(0.0, 2.0), c(0.0, 2.0), c(-1.0, 0.0)]);
        let got = poly_roots(&p);
        assert_eq!(got.len(), 4);
        assert!(got.iter().filter(|g| (**g - c(0.0, 2.0)).norm() < 1e-4).count() == 3);
        let a = aberth(&p);
        assert!(a.iter().filter(|g| (**g - c(0.0, 2.0)).norm() < 1e-4).count() == 3);
    }

    #[test]
    fn zero_roots_are_exact() {
        let r = poly_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn roundtrip_from_roots() {
        let roots = [c(0.5, 1.0), c(-2.0, 0.25), c(3.0, -1.0), c(0.0, 2.0)];
        let p = poly_from_roots(&roots);
        let got = poly_roots(&p);
        for r in roots {
            assert!(got.iter().any(|g| (g - r).norm() < 1e-12));
        }
    }
}
