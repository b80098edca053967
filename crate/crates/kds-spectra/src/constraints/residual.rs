//! Pointwise residuals of the constraint equations.

use super::torus::{SymField, TorusGrid};
use crate::error::{KdsError, Result};
use crate::numeric::tensor::{christoffel, div_sym, inverse, ricci_richardson, trace, MetricFn};
use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Sign convention of a stored spatial metric.
///
/// `Negative` is the Lorentzian convention of `metric_family`, where `h` is
/// negative definite and `k(X, Y) = ⟨∇_X Y, N⟩`. `Positive` stores `−h` and
/// the extrinsic curvature `K = −k`. Residuals are always reported in the
/// positive convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HSign {
    Positive,
    Negative,
}

impl HSign {
    pub fn factor(self) -> f64 {
        match self {
            HSign::Positive => 1.0,
            HSign::Negative => -1.0,
        }
    }
}

/// Data on the flat torus grid.
#[derive(Debug, Clone)]
pub struct TorusData {
    pub grid: TorusGrid,
    pub h: SymField,
    pub k: SymField,
    pub sign: HSign,
}

/// Data on a slice, given as samplers in slice coordinates, checked at nodes
/// by fourth-order differences.
pub struct SliceData<'a> {
    pub nodes: Vec<[f64; 3]>,
    pub step: f64,
    pub h: MetricFn<'a>,
    pub k: MetricFn<'a>,
    pub sign: HSign,
}

pub enum InitialDataSet<'a> {
    Torus(TorusData),
    Slice(SliceData<'a>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstraintResidual {
    /// `R + (tr K)² − |K|² − (n−1)Λ`.
    pub hamiltonian: Vec<f64>,
    /// `δK + d tr K`.
    pub momentum: Vec<[f64; 3]>,
    pub hamiltonian_max: f64,
    pub momentum_max: f64,
}

impl ConstraintResidual {
    fn from_fields(hamiltonian: Vec<f64>, momentum: Vec<[f64; 3]>) -> Self {
        let hamiltonian_max = hamiltonian.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let momentum_max = momentum.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        ConstraintResidual { hamiltonian, momentum, hamiltonian_max, momentum_max }
    }

    /// Maxima over the nodes selected by `keep`.
    pub fn max_on(&self, keep: impl Fn(usize) -> bool) -> (f64, f64) {
        let mut out = (0.0f64, 0.0f64);
        for i in (0..self.hamiltonian.len()).filter(|&i| keep(i)) {
            out.0 = out.0.max(self.hamiltonian[i].abs());
            out.1 = out.1.max(self.momentum[i].iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
        out
    }
}

/// Residuals of `R_h + (tr k)² − |k|² = (n−1)Λ` and `δ_h k + d tr k = 0` in
/// the positive convention.
///
/// In the negative convention this reads `R_h − (tr_h k)² + |k|²_h = (1−n)Λ`.
pub fn constraint_residual(data: &InitialDataSet<'_>, lambda: f64, n: usize) -> Result<ConstraintResidual> {
    if n != 3 {
        return Err(KdsError::InvalidParams(format!("spatial dimension {n}; only n = 3 slices are supported")));
    }
    let res = match data {
        InitialDataSet::Torus(t) => torus_residual(t, lambda)?,
        InitialDataSet::Slice(s) => slice_residual(s, lambda)?,
    };
    if !res.hamiltonian_max.is_finite() || !res.momentum_max.is_finite() {
        return Err(KdsError::CurvatureFailure("non-finite constraint residual".into()));
    }
    Ok(res)
}

fn torus_residual(d: &TorusData, lambda: f64) -> Result<ConstraintResidual> {
    let g = &d.grid;
    let s = d.sign.factor();
    let h: SymField = d.h.iter().map(|m| m * s).collect();
    let k: SymField = d.k.iter().map(|m| m * s).collect();
    let len = g.len();
    let mut hinv = Vec::with_capacity(len);
    for (i, m) in h.iter().enumerate() {
        match m.try_inverse() {
            Some(x) if m.symmetric_eigen().eigenvalues.min() > 0.0 => hinv.push(x),
            _ => return Err(KdsError::CurvatureFailure(format!("metric not positive definite at node {i}"))),
        }
    }
    let dh = g.sym_gradient(&h);
    // gam[c][node] holds Γ^c_{ab}
    let gam: [SymField; 3] = std::array::from_fn(|c| {
        (0..len)
            .map(|i| {
                Matrix3::from_fn(|a, b| {
                    0.5 * (0..3)
                        .map(|e| hinv[i][(c, e)] * (dh[a][i][(e, b)] + dh[b][i][(e, a)] - dh[e][i][(a, b)]))
                        .sum::<f64>()
                })
            })
            .collect()
    });
    // dgam[c][e][node] = ∂_e Γ^c_{ab}
    let dgam: Vec<[SymField; 3]> = gam.iter().map(|f| g.sym_gradient(f)).collect();
    let dk = g.sym_gradient(&k);
    let trk: Vec<f64> = (0..len).map(|i| (hinv[i] * k[i]).trace()).collect();
    let dtrk = g.gradient(&trk);
    let mut ham = Vec::with_capacity(len);
    let mut mom = Vec::with_capacity(len);
    for i in 0..len {
        let gm = |c: usize, a: usize, b: usize| gam[c][i][(a, b)];
        let ric = Matrix3::from_fn(|b, dd| {
            let mut v = 0.0;
            for a in 0..3 {
                v += dgam[a][a][i][(b, dd)] - dgam[a][dd][i][(a, b)];
                for e in 0..3 {
                    v += gm(a, a, e) * gm(e, b, dd) - gm(a, dd, e) * gm(e, a, b);
                }
            }
            v
        });
        let r = (hinv[i] * ric).trace();
        let hk = hinv[i] * k[i];
        ham.push(r + trk[i] * trk[i] - (hk * hk).trace() - 2.0 * lambda);
        let nab = |a: usize, b: usize, c: usize| {
            let mut v = dk[a][i][(b, c)];
            for e in 0..3 {
                v -= gm(e, a, b) * k[i][(e, c)] + gm(e, a, c) * k[i][(b, e)];
            }
            v
        };
        let m = Vector3::from_fn(|c, _| {
            let mut v = dtrk[c][i];
            for a in 0..3 {
                for b in 0..3 {
                    v -= hinv[i][(a, b)] * nab(a, b, c);
                }
            }
            v
        });
        mom.push([m[0], m[1], m[2]]);
    }
    Ok(ConstraintResidual::from_fields(ham, mom))
}

fn slice_residual(d: &SliceData<'_>, lambda: f64) -> Result<ConstraintResidual> {
    let s = d.sign.factor();
    let hf = |y: &[f64]| (d.h)(y) * s;
    let kf = |y: &[f64]| (d.k)(y) * s;
    let steps = [d.step; 3];
    let mut ham = Vec::with_capacity(d.nodes.len());
    let mut mom = Vec::with_capacity(d.nodes.len());
    for y in &d.nodes {
        let h0 = hf(y);
        let hinv = inverse(&h0);
        if !hinv[(0, 0)].is_finite() {
            return Err(KdsError::CurvatureFailure(format!("singular metric at {y:?}")));
        }
        let (ric, _) = ricci_richardson(&hf, y, &steps);
        let r = trace(&hinv, &ric);
        let k0 = kf(y);
        let trk = trace(&hinv, &k0);
        let hk = &hinv * &k0;
        let kk = (&hk * &hk).trace();
        ham.push(r + trk * trk - kk - 2.0 * lambda);
        let gam = christoffel(&hf, y, &steps);
        let div = div_sym(&kf, &hinv, &gam, y, &steps);
        let trf = |z: &[f64]| DMatrix::from_element(1, 1, trace(&inverse(&hf(z)), &kf(z)));
        let dtr = crate::numeric::fd::gradient(&trf, y, &steps);
        mom.push(std::array::from_fn(|c| div[c] + dtr[c][(0, 0)]));
    }
    Ok(ConstraintResidual::from_fields(ham, mom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::{BlackHoleParams, Chart, Kds};

    #[test]
    fn flat_torus_is_exact() {
        let g = TorusGrid::new(8).unwrap();
        let data = TorusData {
            grid: g.clone(),
            h: vec![Matrix3::identity(); g.len()],
            k: vec![Matrix3::zeros(); g.len()],
            sign: HSign::Positive,
        };
        let r = constraint_residual(&InitialDataSet::Torus(data), 0.0, 3).unwrap();
        assert_eq!(r.hamiltonian_max, 0.0);
        assert_eq!(r.momentum_max, 0.0);
    }

    #[test]
    fn flat_de_sitter_slicing() {
        // K = H h with 3H² = Λ
        let g = TorusGrid::new(8).unwrap();
        let data = TorusData {
            grid: g.clone(),
            h: vec![-Matrix3::identity(); g.len()],
            k: vec![Matrix3::identity(); g.len()],
            sign: HSign::Negative,
        };
        let r = constraint_residual(&InitialDataSet::Torus(data), 3.0, 3).unwrap();
        assert!(r.hamiltonian_max < 1e-13 && r.momentum_max < 1e-13);
    }

    #[test]
    fn sds_slice_satisfies_constraints() {
        let kd = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let (hf, kf) = kd.induced_samplers(Chart::Star, 0.0, 1e-3);
        let nodes: Vec<[f64; 3]> =
            (0..6).map(|i| [0.18 + 0.12 * i as f64, 0.6 + 0.3 * i as f64, 0.4 * i as f64]).collect();
        let data = SliceData { nodes, step: 1e-3, h: &hf, k: &kf, sign: HSign::Negative };
        let r = constraint_residual(&InitialDataSet::Slice(data), 3.0, 3).unwrap();
        assert!(r.hamiltonian_max < 1e-5, "{}", r.hamiltonian_max);
        assert!(r.momentum_max < 1e-5, "{}", r.momentum_max);
    }

    #[test]
    fn conformally_flat_metric_curvature() {
        // h = e^{2w}δ has R = −e^{−2w}(4∇²w + 2|∇w|²)
        let g = TorusGrid::new(32).unwrap();
        let w = |x: [f64; 3]| 0.1 * x[0].sin() + 0.05 * (x[1] + 2.0 * x[2]).cos();
        let h = g.sample(|x| Matrix3::identity() * (2.0 * w(x)).exp());
        let data = TorusData { grid: g.clone(), h, k: vec![Matrix3::zeros(); g.len()], sign: HSign::Positive };
        let r = constraint_residual(&InitialDataSet::Torus(data), 0.0, 3).unwrap();
        let want = g.sample(|x| {
            let lap = -0.1 * x[0].sin() - 0.05 * 5.0 * (x[1] + 2.0 * x[2]).cos();
            let s = 0.05 * (x[1] + 2.0 * x[2]).sin();
            let grad2 = (0.1 * x[0].cos()).powi(2) + s * s + 4.0 * s * s;
            -(-2.0 * w(x)).exp() * (4.0 * lap + 2.0 * grad2)
        });
        let err = r.hamiltonian.iter().zip(&want).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10, "{err}");
    }
}
