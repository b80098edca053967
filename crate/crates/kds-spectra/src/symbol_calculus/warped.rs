use crate::metric_family::Kds;
use crate::numeric::fd::{d1, gradient};
use crate::numeric::tensor::{christoffel, div_sym, inverse, nabla_form, sym_grad, trace_reverse};
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::rc::Rc;

/// Field on `ℝ_t × X`, evaluated at `(t, y)`; symmetric tensors are stored flattened.
pub type Field = Rc<dyn Fn(&[f64]) -> DVector<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Form,
    Sym2,
}

impl Rank {
    pub fn len(self, n: usize) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Form => n,
            Rank::Sym2 => n * n,
        }
    }
}

/// Formal first-order building blocks of the warped-product operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Word {
    E0,
    Dx,
    DeltaH,
    DeltaHStar,
    TrH,
    HMul,
    AlphaPow(i32),
    /// contraction with `∇^h Ω`, `Ω = log α`
    GradOmega,
    /// multiplication by `dΩ`
    DOmega,
}

impl Word {
    pub fn maps(self, r: Rank) -> Option<Rank> {
        use Rank::*;
        match (self, r) {
            (Word::E0, r) | (Word::AlphaPow(_), r) => Some(r),
            (Word::Dx, Scalar) | (Word::DOmega, Scalar) => Some(Form),
            (Word::DeltaH, Form) | (Word::GradOmega, Form) => Some(Scalar),
            (Word::DeltaH, Sym2) => Some(Form),
            (Word::DeltaHStar, Form) => Some(Sym2),
            (Word::TrH, Sym2) => Some(Scalar),
            (Word::HMul, Scalar) => Some(Sym2),
            _ => None,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::E0 => write!(f, "e₀"),
            Word::Dx => write!(f, "d_X"),
            Word::DeltaH => write!(f, "δ_h"),
            Word::DeltaHStar => write!(f, "δ_h*"),
            Word::TrH => write!(f, "tr_h"),
            Word::HMul => write!(f, "h"),
            Word::AlphaPow(k) => write!(f, "α^{k}"),
            Word::GradOmega => write!(f, "∇^hΩ"),
            Word::DOmega => write!(f, "dΩ"),
        }
    }
}

/// `coeff · w₁ ∘ w₂ ∘ …`, applied right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct OpTerm {
    pub coeff: f64,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpEntry {
    pub terms: Vec<OpTerm>,
}

impl OpEntry {
    pub fn zero() -> Self {
        OpEntry::default()
    }

    pub fn scalar(c: f64) -> Self {
        Self::word(c, &[])
    }

    pub fn word(c: f64, w: &[Word]) -> Self {
        OpEntry { terms: vec![OpTerm { coeff: c, words: w.to_vec() }] }
    }

    pub fn plus(mut self, c: f64, w: &[Word]) -> Self {
        self.terms.push(OpTerm { coeff: c, words: w.to_vec() });
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    fn compose(&self, o: &OpEntry) -> OpEntry {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                let mut words = a.words.clone();
                words.extend_from_slice(&b.words);
                terms.push(OpTerm { coeff: a.coeff * b.coeff, words });
            }
        }
        OpEntry { terms }
    }
}

impl fmt::Display for OpEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coeff)?;
            for w in &t.words {
                write!(f, "·{w}")?;
            }
        }
        Ok(())
    }
}

/// Operator matrix between split bundles, with formal operator entries.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    pub rows: Vec<(&'static str, Rank)>,
    pub cols: Vec<(&'static str, Rank)>,
    pub entries: Vec<Vec<OpEntry>>,
}

impl BlockOperator {
    pub fn compose(&self, o: &BlockOperator) -> BlockOperator {
        assert_eq!(self.cols, o.rows, "splittings do not match");
        let entries = (0..self.rows.len())
            .map(|i| {
                (0..o.cols.len())
                    .map(|j| {
                        let mut e = OpEntry::zero();
                        for k in 0..self.cols.len() {
                            e.terms.extend(self.entries[i][k].compose(&o.entries[k][j]).terms);
                        }
                        e.terms.retain(|t| t.coeff != 0.0);
                        e
                    })
                    .collect()
            })
            .collect();
        BlockOperator { rows: self.rows.clone(), cols: o.cols.clone(), entries }
    }

    pub fn scaled(mut self, c: f64) -> BlockOperator {
        for row in &mut self.entries {
            for e in row {
                for t in &mut e.terms {
                    t.coeff *= c;
                }
            }
        }
        self
    }

    /// Every term maps its column rank to its row rank.
    pub fn is_well_typed(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, e)| {
                e.terms.iter().all(|t| {
                    let mut r = Some(self.cols[j].1);
                    for w in t.words.iter().rev() {
                        r = r.and_then(|r| w.maps(r));
                    }
                    r == Some(self.rows[i].1)
                })
            })
        })
    }
}

fn form_split() -> Vec<(&'static str, Rank)> {
    vec![("N", Rank::Scalar), ("T", Rank::Form)]
}

fn sym_split() -> Vec<(&'static str, Rank)> {
    vec![("NN", Rank::Scalar), ("NT", Rank::Form), ("T", Rank::Sym2)]
}

/// The four operators `δ*_g, δ_g, G_g, 2δ_g G_g` of `α²dt² − h` in the splittings
/// `T*M = ⟨e⁰⟩ ⊕ T*X` and `S²T*M = ⟨e⁰e⁰⟩ ⊕ 2e⁰·T*X ⊕ S²T*X`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedOperators {
    pub delta_star: BlockOperator,
    pub delta: BlockOperator,
    pub gg: BlockOperator,
    pub delg_gg: BlockOperator,
}

pub fn warped_operator_matrices() -> WarpedOperators {
    use Word::*;
    let z = OpEntry::zero;
    let delta_star = BlockOperator {
        rows: sym_split(),
        cols: form_split(),
        entries: vec![
            vec![OpEntry::word(1.0, &[E0]), OpEntry::word(-1.0, &[GradOmega])],
            vec![OpEntry::word(0.5, &[AlphaPow(1), Dx, AlphaPow(-1)]), OpEntry::word(0.5, &[E0])],
            vec![z(), OpEntry::word(1.0, &[DeltaHStar])],
        ],
    };
    let delta = BlockOperator {
        rows: form_split(),
        cols: sym_split(),
        entries: vec![
            vec![OpEntry::word(-1.0, &[E0]), OpEntry::word(-1.0, &[AlphaPow(-2), DeltaH, AlphaPow(2)]), z()],
            vec![
                OpEntry::word(1.0, &[DOmega]),
                OpEntry::word(-1.0, &[E0]),
                OpEntry::word(-1.0, &[AlphaPow(-1), DeltaH, AlphaPow(1)]),
            ],
        ],
    };
    let gg = BlockOperator {
        rows: sym_split(),
        cols: sym_split(),
        entries: vec![
            vec![OpEntry::scalar(0.5), z(), OpEntry::word(0.5, &[TrH])],
            vec![z(), OpEntry::scalar(1.0), z()],
            vec![OpEntry::word(0.5, &[HMul]), z(), OpEntry::scalar(1.0).plus(-0.5, &[HMul, TrH])],
        ],
    };
    let delg_gg = BlockOperator {
        rows: form_split(),
        cols: sym_split(),
        entries: vec![
            vec![
                OpEntry::word(-1.0, &[E0]),
                OpEntry::word(-2.0, &[AlphaPow(-2), DeltaH, AlphaPow(2)]),
                OpEntry::word(-1.0, &[E0, TrH]),
            ],
            vec![
                OpEntry::word(1.0, &[AlphaPow(-2), Dx, AlphaPow(2)]),
                OpEntry::word(-2.0, &[E0]),
                OpEntry::word(-2.0, &[AlphaPow(-1), DeltaH, AlphaPow(1)]).plus(-1.0, &[Dx, TrH]),
            ],
        ],
    };
    WarpedOperators { delta_star, delta, gg, delg_gg }
}

/// Static metric `α(y)²dt² − h(y)` with a finite-difference action of the formal words.
#[derive(Clone)]
pub struct WarpedGeometry {
    pub n: usize,
    alpha: Rc<dyn Fn(&[f64]) -> f64>,
    h: Rc<dyn Fn(&[f64]) -> DMatrix<f64>>,
    pub step: f64,
}

impl WarpedGeometry {
    pub fn new(
        n: usize,
        alpha: impl Fn(&[f64]) -> f64 + 'static,
        h: impl Fn(&[f64]) -> DMatrix<f64> + 'static,
        step: f64,
    ) -> Self {
        WarpedGeometry { n, alpha: Rc::new(alpha), h: Rc::new(h), step }
    }

    /// Schwarzschild–de Sitter in `(t, r, θ, φ)`.
    pub fn sds(kds: &Kds, step: f64) -> Self {
        let (k1, k2) = (kds.clone(), kds.clone());
        WarpedGeometry::new(
            3,
            move |y| k1.mu(y[0]).sqrt(),
            move |y| {
                let s = y[1].sin();
                DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / k2.mu(y[0]), y[0] * y[0], y[0] * y[0] * s * s]))
            },
            step,
        )
    }

    pub fn alpha_at(&self, y: &[f64]) -> f64 {
        (self.alpha)(y)
    }

    /// Spacetime metric in `(t, y)`.
    pub fn full_metric(&self) -> impl Fn(&[f64]) -> DMatrix<f64> {
        let (a, h, n) = (self.alpha.clone(), self.h.clone(), self.n);
        move |x: &[f64]| {
            let y = &x[1..];
            let mut g = DMatrix::zeros(n + 1, n + 1);
            g[(0, 0)] = a(y).powi(2);
            g.view_mut((1, 1), (n, n)).copy_from(&(-h(y)));
            g
        }
    }

    fn hs(&self) -> Vec<f64> {
        vec![self.step; self.n]
    }

    fn at_y(f: &Field, x: &[f64]) -> impl Fn(&[f64]) -> DVector<f64> {
        let f = f.clone();
        let t = x[0];
        move |y: &[f64]| {
            let mut z = Vec::with_capacity(y.len() + 1);
            z.push(t);
            z.extend_from_slice(y);
            f(&z)
        }
    }

    pub fn apply_word(&self, w: Word, rank: Rank, f: Field) -> Field {
        let g = self.clone();
        let n = self.n;
        match (w, rank) {
            (Word::E0, _) => Rc::new(move |x: &[f64]| {
                let dt = d1(
                    |e| {
                        let mut z = x.to_vec();
                        z[0] += e;
                        f(&z)
                    },
                    g.step,
                );
                dt / (g.alpha)(&x[1..])
            }),
            (Word::AlphaPow(k), _) => Rc::new(move |x: &[f64]| f(x) * (g.alpha)(&x[1..]).powi(k)),
            (Word::Dx, Rank::Scalar) => Rc::new(move |x: &[f64]| {
                let fy = Self::at_y(&f, x);
                let gr = gradient(&|y: &[f64]| fy(y)[0], &x[1..], &g.hs());
                DVector::from_vec(gr)
            }),
            (Word::DOmega, Rank::Scalar) => Rc::new(move |x: &[f64]| {
                let lo = |y: &[f64]| (g.alpha)(y).ln();
                DVector::from_vec(gradient(&lo, &x[1..], &g.hs())) * f(x)[0]
            }),
            (Word::GradOmega, Rank::Form) => Rc::new(move |x: &[f64]| {
                let y = &x[1..];
                let lo = |y: &[f64]| (g.alpha)(y).ln();
                let dom = DVector::from_vec(gradient(&lo, y, &g.hs()));
                let hinv = inverse(&(g.h)(y));
                DVector::from_element(1, (hinv * dom).dot(&f(x)))
            }),
            (Word::TrH, Rank::Sym2) => Rc::new(move |x: &[f64]| {
                let hinv = inverse(&(g.h)(&x[1..]));
                let u = DMatrix::from_column_slice(n, n, f(x).as_slice());
                DVector::from_element(1, hinv.component_mul(&u).sum())
            }),
            (Word::HMul, Rank::Scalar) => Rc::new(move |x: &[f64]| {
                let hm = (g.h)(&x[1..]) * f(x)[0];
                DVector::from_column_slice(hm.as_slice())
            }),
            (Word::DeltaH, Rank::Form) => Rc::new(move |x: &[f64]| {
                let y = &x[1..];
                let hf = |y: &[f64]| (g.h)(y);
                let gam = christoffel(&hf, y, &g.hs());
                let fy = Self::at_y(&f, x);
                let nab = nabla_form(&fy, &gam, y, &g.hs());
                let hinv = inverse(&(g.h)(y));
                DVector::from_element(1, -hinv.component_mul(&nab).sum())
            }),
            (Word::DeltaH, Rank::Sym2) => Rc::new(move |x: &[f64]| {
                let y = &x[1..];
                let hf = |y: &[f64]| (g.h)(y);
                let gam = christoffel(&hf, y, &g.hs());
                let fy = Self::at_y(&f, x);
                let um = |y: &[f64]| DMatrix::from_column_slice(n, n, fy(y).as_slice());
                div_sym(&um, &inverse(&(g.h)(y)), &gam, y, &g.hs())
            }),
            (Word::DeltaHStar, Rank::Form) => Rc::new(move |x: &[f64]| {
                let y = &x[1..];
                let hf = |y: &[f64]| (g.h)(y);
                let gam = christoffel(&hf, y, &g.hs());
                let fy = Self::at_y(&f, x);
                let s = sym_grad(&fy, &gam, y, &g.hs());
                DVector::from_column_slice(s.as_slice())
            }),
            (w, r) => panic!("word {w} does not act on {r:?}"),
        }
    }

    fn apply_entry(&self, e: &OpEntry, rank_in: Rank, rank_out: Rank, f: &Field) -> Option<Field> {
        let mut parts: Vec<(f64, Field)> = Vec::new();
        for t in &e.terms {
            if t.coeff == 0.0 {
                continue;
            }
            let mut cur = f.clone();
            let mut r = rank_in;
            for w in t.words.iter().rev() {
                cur = self.apply_word(*w, r, cur);
                r = w.maps(r).expect("ill-typed operator term");
            }
            debug_assert_eq!(r, rank_out);
            parts.push((t.coeff, cur));
        }
        if parts.is_empty() {
            return None;
        }
        Some(Rc::new(move |x: &[f64]| {
            let mut acc = parts[0].1(x) * parts[0].0;
            for (c, p) in &parts[1..] {
                acc += p(x) * *c;
            }
            acc
        }))
    }

    /// Applies a block operator to split components.
    pub fn apply(&self, op: &BlockOperator, input: &[Field]) -> Vec<Field> {
        let n = self.n;
        (0..op.rows.len())
            .map(|i| {
                let ro = op.rows[i].1;
                let pieces: Vec<Field> = (0..op.cols.len())
                    .filter_map(|j| self.apply_entry(&op.entries[i][j], op.cols[j].1, ro, &input[j]))
                    .collect();
                let len = ro.len(n);
                let out: Field = Rc::new(move |x: &[f64]| {
                    let mut acc = DVector::zeros(len);
                    for p in &pieces {
                        acc += p(x);
                    }
                    acc
                });
                out
            })
            .collect()
    }

    /// Coordinate 1-form `u = u_t dt + u_y dy` split as `(u_N, u_T)` with `e⁰ = α dt`.
    pub fn split_form(&self, u: Field) -> Vec<Field> {
        let (a, u2) = (self.alpha.clone(), u.clone());
        let n = self.n;
        vec![
            Rc::new(move |x: &[f64]| DVector::from_element(1, u(x)[0] / a(&x[1..]))),
            Rc::new(move |x: &[f64]| u2(x).rows(1, n).into_owned()),
        ]
    }

    /// Coordinate symmetric tensor split as `(u_NN, u_NT, u_T)`.
    pub fn split_sym(&self, u: Field) -> Vec<Field> {
        let n = self.n;
        let m = n + 1;
        let (a1, a2) = (self.alpha.clone(), self.alpha.clone());
        let (u1, u2, u3) = (u.clone(), u.clone(), u);
        vec![
            Rc::new(move |x: &[f64]| DVector::from_element(1, u1(x)[0] / a1(&x[1..]).powi(2))),
            Rc::new(move |x: &[f64]| {
                let v = u2(x);
                DVector::from_fn(n, |j, _| v[(j + 1) * m] / a2(&x[1..]))
            }),
            Rc::new(move |x: &[f64]| {
                let v = u3(x);
                DVector::from_fn(n * n, |k, _| v[(k / n + 1) * m + k % n + 1])
            }),
        ]
    }

    /// Inverse of [`Self::split_form`].
    pub fn join_form(&self, parts: &[Field]) -> Field {
        let (a, p0, p1) = (self.alpha.clone(), parts[0].clone(), parts[1].clone());
        let n = self.n;
        Rc::new(move |x: &[f64]| {
            let t = p1(x);
            DVector::from_fn(n + 1, |i, _| if i == 0 { p0(x)[0] * a(&x[1..]) } else { t[i - 1] })
        })
    }
}

/// `δ*_g u = sym ∇u` computed directly in coordinates.
pub fn coord_delta_star(g: Rc<dyn Fn(&[f64]) -> DMatrix<f64>>, u: Field, step: f64) -> Field {
    Rc::new(move |x: &[f64]| {
        let hs = vec![step; x.len()];
        let gam = christoffel(&*g, x, &hs);
        let s = sym_grad(&*u, &gam, x, &hs);
        DVector::from_column_slice(s.as_slice())
    })
}

/// `δ_g w = −tr ∇w` computed directly in coordinates.
pub fn coord_delta(g: Rc<dyn Fn(&[f64]) -> DMatrix<f64>>, w: Field, step: f64) -> Field {
    Rc::new(move |x: &[f64]| {
        let m = x.len();
        let hs = vec![step; m];
        let gam = christoffel(&*g, x, &hs);
        let wm = |z: &[f64]| DMatrix::from_column_slice(m, m, w(z).as_slice());
        div_sym(&wm, &inverse(&g(x)), &gam, x, &hs)
    })
}

/// `G_g w = w − ½ g tr_g w` in coordinates.
pub fn coord_gg(g: Rc<dyn Fn(&[f64]) -> DMatrix<f64>>, w: Field) -> Field {
    Rc::new(move |x: &[f64]| {
        let m = x.len();
        let g0 = g(x);
        let wm = DMatrix::from_column_slice(m, m, w(x).as_slice());
        DVector::from_column_slice(trace_reverse(&g0, &inverse(&g0), &wm).as_slice())
    })
}

/// `□^CP u = 2δ_g G_g δ*_g u` in coordinates.
pub fn coord_box_cp(g: Rc<dyn Fn(&[f64]) -> DMatrix<f64>>, u: Field, step: f64) -> Field {
    let ds = coord_delta_star(g.clone(), u, step);
    let gd = coord_gg(g.clone(), ds);
    let d = coord_delta(g, gd, step);
    Rc::new(move |x: &[f64]| d(x) * 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::BlackHoleParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn geom() -> (Kds, WarpedGeometry) {
        let k = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let g = WarpedGeometry::sds(&k, 1e-3);
        (k, g)
    }

    fn poly_form(seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<[f64; 5]> = (0..4).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
        Rc::new(move |x: &[f64]| {
            DVector::from_fn(4, |i, _| {
                let k = &c[i];
                k[0] + k[1] * x[0] + k[2] * x[1] * x[1] + k[3] * x[2] * x[0] + k[4] * x[3] * x[1]
            })
        })
    }

    fn points() -> Vec<[f64; 4]> {
        vec![[0.3, 0.45, 1.1, 0.4], [-0.2, 0.6, 0.8, 2.0], [0.0, 0.35, 2.0, -1.0]]
    }

    fn close(a: &Field, b: &Field, tol: f64) {
        for p in points() {
            let (va, vb) = (a(&p), b(&p));
            let err = (&va - &vb).amax();
            assert!(err < tol * (1.0 + vb.amax()), "at {p:?}: {va} vs {vb}");
        }
    }

    #[test]
    fn operators_are_well_typed() {
        let w = warped_operator_matrices();
        assert!(w.delta_star.is_well_typed() && w.delta.is_well_typed());
        assert!(w.gg.is_well_typed() && w.delg_gg.is_well_typed());
    }

    #[test]
    fn delta_star_blocks_match_coordinates() {
        let (_, g) = geom();
        let w = warped_operator_matrices();
        let u = poly_form(1);
        let split = g.apply(&w.delta_star, &g.split_form(u.clone()));
        let direct = g.split_sym(coord_delta_star(Rc::new(g.full_metric()), u, g.step));
        for i in 0..3 {
            close(&split[i], &direct[i], 1e-8);
        }
    }

    #[test]
    fn delta_and_trace_reversal_blocks_match_coordinates() {
        let (_, g) = geom();
        let w = warped_operator_matrices();
        let gm: Rc<dyn Fn(&[f64]) -> DMatrix<f64>> = Rc::new(g.full_metric());
        // a symmetric test tensor built as δ* of a polynomial form plus a polynomial
        let u = poly_form(2);
        let base = coord_delta_star(gm.clone(), u, g.step);
        let sym: Field = Rc::new(move |x: &[f64]| {
            let mut v = base(x);
            v[5] += x[1] * x[2];
            v[0] += x[0] * x[3];
            v
        });
        let s_split = g.split_sym(sym.clone());
        let d_split = g.apply(&w.delta, &s_split);
        let d_direct = g.split_form(coord_delta(gm.clone(), sym.clone(), g.step));
        for i in 0..2 {
            close(&d_split[i], &d_direct[i], 1e-7);
        }
        let gg_split = g.apply(&w.gg, &s_split);
        let gg_direct = g.split_sym(coord_gg(gm.clone(), sym.clone()));
        for i in 0..3 {
            close(&gg_split[i], &gg_direct[i], 1e-10);
        }
        let dg = g.apply(&w.delg_gg, &s_split);
        let dg_direct = g.split_form(coord_delta(gm.clone(), coord_gg(gm, sym), g.step));
        for i in 0..2 {
            let twice: Field = {
                let f = dg_direct[i].clone();
                Rc::new(move |x: &[f64]| f(x) * 2.0)
            };
            close(&dg[i], &twice, 1e-7);
        }
    }

    #[test]
    fn gg_on_pure_trace_tangential_input() {
        let (_, g) = geom();
        let w = warped_operator_matrices();
        let hh = g.h.clone();
        let input: Vec<Field> = vec![
            Rc::new(|_: &[f64]| DVector::zeros(1)),
            Rc::new(|_: &[f64]| DVector::zeros(3)),
            Rc::new(move |x: &[f64]| DVector::from_column_slice(hh(&x[1..]).as_slice())),
        ];
        let out = g.apply(&w.gg, &input);
        let p = [0.0, 0.5, 1.0, 0.3];
        assert!((out[0](&p)[0] - 1.5).abs() < 1e-12);
        assert!(out[1](&p).amax() < 1e-12);
        let hp = DVector::from_column_slice(g.h.as_ref()(&p[1..]).as_slice());
        assert!((out[2](&p) + hp * 0.5).amax() < 1e-12);
    }

    #[test]
    fn composed_box_cp_matches_coordinates() {
        let (_, g) = geom();
        let w = warped_operator_matrices();
        let bcp = w.delta.compose(&w.gg).compose(&w.delta_star).scaled(2.0);
        assert!(bcp.is_well_typed());
        let u = poly_form(3);
        let split = g.apply(&bcp, &g.split_form(u.clone()));
        let direct = g.split_form(coord_box_cp(Rc::new(g.full_metric()), u, g.step));
        for i in 0..2 {
            close(&split[i], &direct[i], 1e-6);
        }
    }

    #[test]
    fn killing_form_is_annihilated() {
        let (k, g) = geom();
        let w = warped_operator_matrices();
        let bcp = w.delta.compose(&w.gg).compose(&w.delta_star).scaled(2.0);
        let kk = k.clone();
        let u: Field = Rc::new(move |x: &[f64]| DVector::from_vec(vec![kk.mu(x[1]), 0.0, 0.0, 0.0]));
        let out = g.apply(&bcp, &g.split_form(u));
        for p in points() {
            assert!(out[0](&p).amax() < 1e-6 && out[1](&p).amax() < 1e-6);
        }
    }
}
