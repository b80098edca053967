//! Exact arithmetic in ℚ(i, √d) for a single square-free d.

use crate::numeric::exact::{qi, Q};
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Gaussian rational.
pub type CQ = Complex<Q>;

pub fn cq(re: Q, im: Q) -> CQ {
    Complex::new(re, im)
}

/// Element `a + b√d` with `a, b ∈ ℚ(i)`.
///
/// `d` is square-free and `d = 0` whenever `b = 0`, so the derived equality is
/// structural equality of field elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alg {
    pub a: CQ,
    pub b: CQ,
    pub d: u64,
}

impl Alg {
    pub fn new(a: CQ, b: CQ, d: u64) -> Self {
        let mut x = Alg { a, b, d };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.d == 1 {
            self.a = &self.a + &self.b;
            self.b = CQ::zero();
        }
        if self.b.is_zero() {
            self.d = 0;
        }
    }

    pub fn rational(x: Q) -> Self {
        Alg::new(cq(x, qi(0)), CQ::zero(), 0)
    }

    pub fn int(n: i64) -> Self {
        Alg::rational(qi(n))
    }

    pub fn gaussian(re: Q, im: Q) -> Self {
        Alg::new(cq(re, im), CQ::zero(), 0)
    }

    pub fn i() -> Self {
        Alg::gaussian(qi(0), qi(1))
    }

    /// `√m` for a non-negative rational m, reduced to `s√d` with d square-free.
    pub fn sqrt_rational(m: &Q) -> Self {
        assert!(!m.is_negative(), "sqrt of a negative rational; use sqrt_signed");
        let num = m.numer() * m.denom();
        let (s, d) = square_free_split(&num);
        let coef = Q::new(s, m.denom().clone());
        if d == 1 {
            Alg::rational(coef)
        } else {
            Alg::new(CQ::zero(), cq(coef, qi(0)), d)
        }
    }

    /// `√m` for any rational m, with `√(−|m|) = i√|m|`.
    pub fn sqrt_signed(m: &Q) -> Self {
        if m.is_negative() {
            Alg::i() * Alg::sqrt_rational(&-m.clone())
        } else {
            Alg::sqrt_rational(m)
        }
    }

    /// The generator `√d` itself.
    pub fn surd(d: u64) -> Self {
        Alg::sqrt_rational(&qi(d as i64))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.a.im.is_zero()
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.is_rational().then(|| self.a.re.clone())
    }

    pub fn to_c64(&self) -> Complex64 {
        let f = |x: &Q| x.to_f64().unwrap_or(f64::NAN);
        let s = (self.d as f64).sqrt();
        Complex64::new(f(&self.a.re) + f(&self.b.re) * s, f(&self.a.im) + f(&self.b.im) * s)
    }

    pub fn re(&self) -> Alg {
        Alg::new(cq(self.a.re.clone(), qi(0)), cq(self.b.re.clone(), qi(0)), self.d)
    }

    pub fn im(&self) -> Alg {
        Alg::new(cq(self.a.im.clone(), qi(0)), cq(self.b.im.clone(), qi(0)), self.d)
    }

    pub fn conj(&self) -> Alg {
        Alg::new(self.a.conj(), self.b.conj(), self.d)
    }

    /// Exact sign of the real part.
    pub fn re_sign(&self) -> Ordering {
        sign_surd(&self.a.re, &self.b.re, self.d)
    }

    /// Exact sign of the imaginary part.
    pub fn im_sign(&self) -> Ordering {
        sign_surd(&self.a.im, &self.b.im, self.d)
    }

    fn join_d(&self, o: &Alg) -> u64 {
        match (self.d, o.d) {
            (0, d) | (d, 0) => d,
            (d, e) if d == e => d,
            (d, e) => panic!("mixing ℚ(i,√{d}) and ℚ(i,√{e})"),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Alg {
        assert!(!self.is_zero(), "division by zero in ℚ(i,√d)");
        // (a + b√d)(a − b√d) = a² − d b² ∈ ℚ(i)
        let d = qi(self.d as i64);
        let norm = &self.a * &self.a - &self.b * &self.b * cq(d, qi(0));
        let ninv = CQ::one() / norm;
        Alg::new(&self.a * &ninv, -(&self.b * &ninv), self.d)
    }

    /// Compact exact rendering such as `-3/2i + 1/2i√33`.
    pub fn exact_string(&self) -> String {
        let part = |z: &CQ| -> String {
            match (z.re.is_zero(), z.im.is_zero()) {
                (true, true) => "0".into(),
                (false, true) => format!("{}", z.re),
                (true, false) => format!("{}i", z.im),
                (false, false) => format!("({} + {}i)", z.re, z.im),
            }
        };
        if self.b.is_zero() {
            part(&self.a)
        } else if self.a.is_zero() {
            format!("{}√{}", part(&self.b), self.d)
        } else {
            format!("{} + {}√{}", part(&self.a), part(&self.b), self.d)
        }
    }
}

/// Sign of `p + q√d`.
fn sign_surd(p: &Q, q: &Q, d: u64) -> Ordering {
    let z = Q::zero();
    let sp = p.cmp(&z);
    let sq = q.cmp(&z);
    if sq == Ordering::Equal || d == 0 {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // opposite signs: compare p² with q² d
    let lhs = p * p;
    let rhs = q * q * qi(d as i64);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Writes `m = s² d` with d square-free; m > 0.
fn square_free_split(m: &BigInt) -> (BigInt, u64) {
    if m.is_zero() {
        return (BigInt::zero(), 1);
    }
    let mut rest = m.abs().to_u64().expect("radicand fits in u64");
    let mut s: u64 = 1;
    let mut d: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    d *= rest;
    (BigInt::from(s), d)
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rational_approx(x: f64, max_den: i64) -> Q {
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-13 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 {
        return qi(x.round() as i64);
    }
    Q::new(BigInt::from(h1), BigInt::from(k1))
}

impl Zero for Alg {
    fn zero() -> Self {
        Alg { a: CQ::zero(), b: CQ::zero(), d: 0 }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Alg {
    fn one() -> Self {
        Alg::int(1)
    }
}

impl Add for Alg {
    type Output = Alg;
    fn add(self, o: Alg) -> Alg {
        &self + &o
    }
}
impl<'a> Add<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn add(self, o: &Alg) -> Alg {
        let d = self.join_d(o);
        Alg::new(&self.a + &o.a, &self.b + &o.b, d)
    }
}
impl Sub for Alg {
    type Output = Alg;
    fn sub(self, o: Alg) -> Alg {
        &self - &o
    }
}
impl<'a> Sub<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn sub(self, o: &Alg) -> Alg {
        let d = self.join_d(o);
        Alg::new(&self.a - &o.a, &self.b - &o.b, d)
    }
}
impl Mul for Alg {
    type Output = Alg;
    fn mul(self, o: Alg) -> Alg {
        &self * &o
    }
}
impl<'a> Mul<&'a Alg> for &'a Alg {
    type Output = Alg;
    fn mul(self, o: &Alg) -> Alg {
        let d = self.join_d(o);
        let dq = cq(qi(d as i64), qi(0));
        let a = &self.a * &o.a + &self.b * &o.b * dq;
        let b = &self.a * &o.b + &self.b * &o.a;
        Alg::new(a, b, d)
    }
}
impl Div for Alg {
    type Output = Alg;
    fn div(self, o: Alg) -> Alg {
        &self * &o.inv()
    }
}
impl Neg for Alg {
    type Output = Alg;
    fn neg(self) -> Alg {
        Alg::new(-self.a, -self.b, self.d)
    }
}

impl fmt::Display for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.exact_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::exact::qr;

    #[test]
    fn surd_arithmetic() {
        let s = Alg::surd(33);
        assert_eq!(&s * &s, Alg::int(33));
        let x = Alg::int(2) + s.clone();
        let y = x.inv();
        assert_eq!(&x * &y, Alg::one());
        // √48 = 4√3
        assert_eq!(Alg::sqrt_rational(&qi(48)), Alg::int(4) * Alg::surd(3));
        assert_eq!(Alg::sqrt_rational(&qr(9, 4)), Alg::rational(qr(3, 2)));
        assert_eq!(Alg::sqrt_signed(&qi(-4)), Alg::int(2) * Alg::i());
    }

    #[test]
    fn exact_signs() {
        // 6 − √33 < 0 (√33 ≈ 5.745); 5 − √24 > 0
        let a = Alg::int(6) - Alg::surd(33);
        assert_eq!(a.re_sign(), Ordering::Greater);
        let b = Alg::int(5) - Alg::surd(33);
        assert_eq!(b.re_sign(), Ordering::Less);
        let c = Alg::i() * (Alg::int(-3) + Alg::surd(33));
        assert_eq!(c.im_sign(), Ordering::Greater);
        assert_eq!(c.re_sign(), Ordering::Equal);
    }

    #[test]
    fn rational_recognition() {
        assert_eq!(rational_approx(0.75, 1000), qr(3, 4));
        assert_eq!(rational_approx(-7.0 / 49.0, 1000), qr(-1, 7));
        assert_eq!(rational_approx(3.0, 10), qi(3));
    }
}
