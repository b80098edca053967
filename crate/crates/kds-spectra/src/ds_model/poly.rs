//! Polynomials over ℚ(i, √d): sections' coefficient polynomials in (τ, x) and
//! univariate polynomials in the spectral parameter.

use super::field::Alg;
use num_complex::Complex64;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Monomial key: extra power of τ on top of the section's `τ^{iσ}`, then the
/// exponents of `x_1..x_n`.
pub type Mono = (u32, Vec<u32>);

/// `Σ c · τ^k x^α`, with the common factor `τ^{iσ}` kept by the owning section.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TxPoly {
    pub n: usize,
    pub terms: BTreeMap<Mono, Alg>,
}

impl TxPoly {
    pub fn zero(n: usize) -> Self {
        TxPoly { n, terms: BTreeMap::new() }
    }

    pub fn monomial(n: usize, c: Alg, k: u32, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), n);
        let mut p = TxPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert((k, exps), c);
        }
        p
    }

    pub fn constant(n: usize, c: Alg) -> Self {
        TxPoly::monomial(n, c, 0, vec![0; n])
    }

    /// `c · τ^k x_j`.
    pub fn linear(n: usize, c: Alg, k: u32, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        TxPoly::monomial(n, c, k, e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Alg) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Alg::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Alg) -> Self {
        let mut out = TxPoly::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn plus(&self, o: &TxPoly) -> Self {
        let mut out = self.clone();
        for (m, v) in &o.terms {
            out.add_term(m.clone(), v.clone());
        }
        out
    }

    pub fn minus(&self, o: &TxPoly) -> Self {
        self.plus(&o.scale(&Alg::int(-1)))
    }

    /// `∂_{x_i}`.
    pub fn dx(&self, i: usize) -> Self {
        let mut out = TxPoly::zero(self.n);
        for ((k, e), v) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term((*k, e2), v * &Alg::int(e[i] as i64));
            }
        }
        out
    }

    /// `e₀ = τ∂_τ − x·∂_x` acting on `τ^{iσ} · self`; `isigma` is `iσ`.
    pub fn e0(&self, isigma: &Alg) -> Self {
        let mut out = TxPoly::zero(self.n);
        for ((k, e), v) in &self.terms {
            let deg: u32 = e.iter().sum();
            let f = isigma + &Alg::int(*k as i64 - deg as i64);
            out.add_term((*k, e.clone()), v * &f);
        }
        out
    }

    /// Coefficients whose τ-power is exactly `k`.
    pub fn at_tau(&self, k: u32) -> TxPoly {
        TxPoly {
            n: self.n,
            terms: self.terms.iter().filter(|((kk, _), _)| *kk == k).map(|(m, v)| (m.clone(), v.clone())).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.to_c64().norm()).fold(0.0, f64::max)
    }
}

/// Univariate polynomial `Σ c_k z^k` (ascending coefficients, no trailing zeros).
#[derive(Debug, Clone, PartialEq)]
pub struct UPoly(pub Vec<Alg>);

impl UPoly {
    pub fn new(mut c: Vec<Alg>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn constant(c: Alg) -> Self {
        UPoly::new(vec![c])
    }

    /// The variable `z`.
    pub fn var() -> Self {
        UPoly::new(vec![Alg::zero(), Alg::one()])
    }

    /// `z − r`.
    pub fn linear_root(r: &Alg) -> Self {
        UPoly::new(vec![-r.clone(), Alg::one()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Alg {
        self.0.last().cloned().unwrap_or_else(Alg::zero)
    }

    pub fn coeff(&self, k: usize) -> Alg {
        self.0.get(k).cloned().unwrap_or_else(Alg::zero)
    }

    pub fn eval(&self, z: &Alg) -> Alg {
        let mut acc = Alg::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.0.iter().map(Alg::to_c64).collect()
    }

    pub fn scale(&self, c: &Alg) -> Self {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        let l = self.lead();
        if l.is_zero() {
            return self.clone();
        }
        self.scale(&l.inv())
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * &Alg::int(k as i64)).collect())
    }

    /// Euclidean division `(quotient, remainder)`.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.0.clone();
        let lead_inv = d.lead().inv();
        let mut q = vec![Alg::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = &r[r.len() - 1] * &lead_inv;
            for (j, dj) in d.0.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * dj);
            }
            q[k] = c;
            r.pop();
            while r.last().map_or(false, |x| x.is_zero()) {
                r.pop();
            }
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free part `p / gcd(p, p')`, monic.
    pub fn square_free(&self) -> UPoly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Multiplicity of the monic irreducible factor `f` in `self`.
    pub fn multiplicity(&self, f: &UPoly) -> usize {
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() {
            let (q, r) = p.div_rem(f);
            if !r.is_zero() {
                break;
            }
            p = q;
            m += 1;
        }
        m
    }

    /// Taylor coefficients at `z0`: `p(z0 + t) = Σ c_j t^j`.
    pub fn taylor_at(&self, z0: &Alg) -> Vec<Alg> {
        let mut c = self.0.clone();
        let n = c.len();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            // synthetic division by (z − z0)
            let mut acc = Alg::zero();
            let mut q = vec![Alg::zero(); c.len().saturating_sub(1)];
            for k in (0..c.len()).rev() {
                let nacc = &(&acc * z0) + &c[k];
                if k > 0 {
                    q[k - 1] = nacc.clone();
                }
                acc = nacc;
            }
            out.push(acc);
            c = q;
        }
        out
    }

    /// Substitutes `z = c·w`.
    pub fn rescale_var(&self, c: &Alg) -> UPoly {
        let mut pw = Alg::one();
        let mut out = Vec::with_capacity(self.0.len());
        for a in &self.0 {
            out.push(a * &pw);
            pw = &pw * c;
        }
        UPoly::new(out)
    }

    pub fn from_roots(roots: &[Alg]) -> UPoly {
        roots.iter().fold(UPoly::one(), |acc, r| acc * UPoly::linear_root(r))
    }
}

impl Zero for UPoly {
    fn zero() -> Self {
        UPoly(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}
impl One for UPoly {
    fn one() -> Self {
        UPoly::constant(Alg::one())
    }
}
impl Add for UPoly {
    type Output = UPoly;
    fn add(self, o: UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}
impl Sub for UPoly {
    type Output = UPoly;
    fn sub(self, o: UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}
impl Mul for UPoly {
    type Output = UPoly;
    fn mul(self, o: UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Alg::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        UPoly::new(c)
    }
}
impl Neg for UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::new(self.0.into_iter().map(|x| -x).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| Alg::int(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (z−1)²(z+2) and (z−1)(z+3)
        let a = p(&[1, -1]).neg() * p(&[-1, 1]) * p(&[2, 1]);
        let b = p(&[-1, 1]) * p(&[3, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(a.square_free(), p(&[-1, 1]) * p(&[2, 1]));
        assert_eq!(a.multiplicity(&p(&[-1, 1])), 2);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q * b + r, a);
    }

    #[test]
    fn taylor_shift() {
        // z² at 3: 9 + 6t + t²
        assert_eq!(p(&[0, 0, 1]).taylor_at(&Alg::int(3)), vec![Alg::int(9), Alg::int(6), Alg::int(1)]);
    }

    #[test]
    fn e0_is_euler_shifted() {
        let n = 2;
        let isg = Alg::int(5);
        let f = TxPoly::monomial(n, Alg::one(), 1, vec![1, 2]);
        // (iσ + k − deg) = 5 + 1 − 3
        assert_eq!(f.e0(&isg), f.scale(&Alg::int(3)));
    }
}
