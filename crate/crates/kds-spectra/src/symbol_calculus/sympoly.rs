use crate::numeric::exact::{q, q_to_f64, Q};
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Formal symbol alphabet shared by all operator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Sym {
    Sigma,
    Xi,
    Eta,
    R,
    Alpha,
    Gamma1,
    Gamma2,
    KappaPlus,
    KappaMinus,
    FPrime,
    CPm,
}

pub const NSYM: usize = 11;

impl Sym {
    pub const ALL: [Sym; NSYM] = [
        Sym::Sigma,
        Sym::Xi,
        Sym::Eta,
        Sym::R,
        Sym::Alpha,
        Sym::Gamma1,
        Sym::Gamma2,
        Sym::KappaPlus,
        Sym::KappaMinus,
        Sym::FPrime,
        Sym::CPm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sym::Sigma => "σ",
            Sym::Xi => "ξ",
            Sym::Eta => "η",
            Sym::R => "r",
            Sym::Alpha => "α",
            Sym::Gamma1 => "γ₁",
            Sym::Gamma2 => "γ₂",
            Sym::KappaPlus => "κ₊",
            Sym::KappaMinus => "κ₋",
            Sym::FPrime => "F′",
            Sym::CPm => "c",
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

pub type Cq = Complex<Q>;
type Mono = [i8; NSYM];

/// Laurent polynomial in the symbol alphabet with exact complex-rational coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct SymPoly {
    terms: BTreeMap<Mono, Cq>,
}

/// Values substituted for symbols on evaluation.
#[derive(Debug, Clone, Default)]
pub struct SymTable {
    vals: [Option<f64>; NSYM],
}

impl SymTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, s: Sym, v: f64) -> Self {
        self.vals[s.idx()] = Some(v);
        self
    }

    pub fn get(&self, s: Sym) -> Option<f64> {
        self.vals[s.idx()]
    }
}

fn cq(re: f64, im: f64) -> Cq {
    Complex::new(q(re), q(im))
}

impl SymPoly {
    pub fn constant(c: Complex64) -> Self {
        Self::from_cq(cq(c.re, c.im), [0; NSYM])
    }

    pub fn real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::from_cq(Complex::new(crate::numeric::exact::qr(n, d), Q::zero()), [0; NSYM])
    }

    pub fn i() -> Self {
        Self::constant(Complex64::new(0.0, 1.0))
    }

    pub fn sym(s: Sym) -> Self {
        Self::sym_pow(s, 1)
    }

    pub fn sym_pow(s: Sym, k: i8) -> Self {
        let mut m = [0; NSYM];
        m[s.idx()] = k;
        Self::from_cq(Cq::one(), m)
    }

    fn from_cq(c: Cq, m: Mono) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SymPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Whether any monomial carries a non-zero power of `s`.
    pub fn depends_on(&self, s: Sym) -> bool {
        self.terms.keys().any(|m| m[s.idx()] != 0)
    }

    pub fn min_power(&self, s: Sym) -> Option<i8> {
        self.terms.keys().map(|m| m[s.idx()]).min()
    }

    /// Coefficient of `s^k`, as a polynomial in the remaining symbols.
    pub fn coeff_of(&self, s: Sym, k: i8) -> SymPoly {
        let mut out = SymPoly::zero();
        for (m, c) in &self.terms {
            if m[s.idx()] == k {
                let mut mm = *m;
                mm[s.idx()] = 0;
                out.add_term(mm, c.clone());
            }
        }
        out
    }

    fn add_term(&mut self, m: Mono, c: Cq) {
        let e = self.terms.entry(m).or_insert_with(Cq::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Numeric value; every symbol present must be assigned in `tab`.
    pub fn eval(&self, tab: &SymTable) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = Complex64::new(q_to_f64(&c.re), q_to_f64(&c.im));
            for s in Sym::ALL {
                let k = m[s.idx()];
                if k != 0 {
                    let x = tab.get(s).unwrap_or_else(|| panic!("symbol {} not assigned", s.name()));
                    v *= x.powi(k as i32);
                }
            }
            acc += v;
        }
        acc
    }

    /// Substitutes numeric values for the symbols assigned in `tab`.
    pub fn partial_eval(&self, tab: &SymTable) -> SymPoly {
        let mut out = SymPoly::zero();
        for (m, c) in &self.terms {
            let mut mm = *m;
            let mut f = 1.0;
            for s in Sym::ALL {
                if let Some(x) = tab.get(s) {
                    f *= x.powi(m[s.idx()] as i32);
                    mm[s.idx()] = 0;
                }
            }
            let fq = q(f);
            out.add_term(mm, Complex::new(c.re.clone() * fq.clone(), c.im.clone() * fq));
        }
        out
    }
}

impl Zero for SymPoly {
    fn zero() -> Self {
        SymPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for SymPoly {
    fn one() -> Self {
        SymPoly::from_cq(Cq::one(), [0; NSYM])
    }
}

impl Add for SymPoly {
    type Output = SymPoly;
    fn add(mut self, o: SymPoly) -> SymPoly {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for SymPoly {
    type Output = SymPoly;
    fn neg(mut self) -> SymPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Sub for SymPoly {
    type Output = SymPoly;
    fn sub(self, o: SymPoly) -> SymPoly {
        self + (-o)
    }
}

impl Mul for SymPoly {
    type Output = SymPoly;
    fn mul(self, o: SymPoly) -> SymPoly {
        let mut out = SymPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = [0; NSYM];
                for k in 0..NSYM {
                    m[k] = m1[k] + m2[k];
                }
                out.add_term(m, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<'a> Mul<&'a SymPoly> for &'a SymPoly {
    type Output = SymPoly;
    fn mul(self, o: &SymPoly) -> SymPoly {
        self.clone() * o.clone()
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let (re, im) = (q_to_f64(&c.re), q_to_f64(&c.im));
            if im == 0.0 {
                write!(f, "{re}")?;
            } else if re == 0.0 {
                write!(f, "{im}i")?;
            } else {
                write!(f, "({re}+{im}i)")?;
            }
            for s in Sym::ALL {
                let k = m[s.idx()];
                if k == 1 {
                    write!(f, "·{}", s.name())?;
                } else if k != 0 {
                    write!(f, "·{}^{}", s.name(), k)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_cancellation_is_exact() {
        let a = SymPoly::sym(Sym::Alpha);
        let ai = SymPoly::sym_pow(Sym::Alpha, -1);
        let p = a.clone() * ai.clone() - SymPoly::one();
        assert!(p.is_zero());
        let x = (a + SymPoly::sym(Sym::R)) * ai;
        assert_eq!(x.min_power(Sym::Alpha), Some(-1));
        assert_eq!(x.coeff_of(Sym::Alpha, 0), SymPoly::one());
    }

    #[test]
    fn evaluation_and_partial_evaluation_agree() {
        let p = SymPoly::i() * SymPoly::sym(Sym::Sigma) * SymPoly::sym_pow(Sym::R, -2) + SymPoly::rational(3, 2);
        let t = SymTable::new().set(Sym::Sigma, 0.5).set(Sym::R, 2.0);
        let v = p.eval(&t);
        assert!((v - Complex64::new(1.5, 0.125)).norm() < 1e-15);
        let pp = p.partial_eval(&SymTable::new().set(Sym::R, 2.0));
        assert!(!pp.depends_on(Sym::R));
        assert!((pp.eval(&t) - v).norm() < 1e-15);
    }
}
