//! Gauged Cauchy data from initial data on `t* = const`.

use crate::error::{KdsError, Result};
use crate::metric_family::{Chart, Kds};
use crate::numeric::tensor::{christoffel, inverse, upsilon, MetricFn};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Slice `t* = t` in `chart`, sampled at `nodes`; `step` drives the
/// difference stencils.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceGrid {
    pub chart: Chart,
    pub t: f64,
    pub nodes: Vec<[f64; 3]>,
    pub step: f64,
}

/// `(g₀, g₁) = (g|_Σ, ∂_{t*}g|_Σ)` at each node, in the chart's coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CauchyData {
    pub chart: Chart,
    pub t: f64,
    pub nodes: Vec<[f64; 3]>,
    pub g0: Vec<[[f64; 4]; 4]>,
    pub g1: Vec<[[f64; 4]; 4]>,
}

impl CauchyData {
    pub fn g0_mat(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |a, b| self.g0[i][a][b])
    }

    pub fn g1_mat(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |a, b| self.g1[i][a][b])
    }
}

/// Pointwise form of the map, usable as a sampler away from the nodes.
///
/// `h` and `k` follow the Lorentzian sign: `h` negative definite and
/// `k(X, Y) = ⟨∇_X Y, N⟩`.
pub struct CauchyMap<'a> {
    kds: &'a Kds,
    chart: Chart,
    t: f64,
    step: f64,
    h: MetricFn<'a>,
    k: MetricFn<'a>,
}

impl<'a> CauchyMap<'a> {
    pub fn new(kds: &'a Kds, grid: &SliceGrid, h: MetricFn<'a>, k: MetricFn<'a>) -> Self {
        CauchyMap { kds, chart: grid.chart, t: grid.t, step: grid.step, h, k }
    }

    fn background(&self, x: &[f64]) -> DMatrix<f64> {
        self.kds.metric_sampler(self.chart)(x)
    }

    /// `φ_b dt*² + 2dt*·ω_b + h`.
    pub fn g0_at(&self, y: &[f64]) -> DMatrix<f64> {
        let mut g = self.background(&[self.t, y[0], y[1], y[2]]);
        let h = (self.h)(y);
        for i in 0..3 {
            for j in 0..3 {
                g[(i + 1, j + 1)] = h[(i, j)];
            }
        }
        g
    }

    /// `g₁` at `y`; `node` labels errors.
    pub fn g1_at(&self, y: &[f64], node: usize) -> Result<DMatrix<f64>> {
        let g0 = self.g0_at(y);
        let ev = g0.clone().symmetric_eigen().eigenvalues;
        let pos = ev.iter().filter(|v| **v > 0.0).count();
        let neg = ev.iter().filter(|v| **v < 0.0).count();
        if pos != 1 || neg != 3 {
            return Err(KdsError::NotLorentzian(node));
        }
        let ginv = inverse(&g0);
        if !(ginv[(0, 0)] > 0.0) {
            return Err(KdsError::DegenerateNormal(node));
        }
        let nt = ginv[(0, 0)].sqrt();
        let normal: Vec<f64> = (0..4).map(|m| ginv[(m, 0)] / nt).collect();
        if !(normal[0] > 0.0) {
            return Err(KdsError::DegenerateNormal(node));
        }
        let x = [self.t, y[0], y[1], y[2]];
        let steps = [self.step; 4];
        let ext0 = |z: &[f64]| self.g0_at(&z[1..]);
        let bg = |z: &[f64]| self.background(z);
        let gam = christoffel(&ext0, &x, &steps);
        let k = (self.k)(y);
        let mut g1 = DMatrix::zeros(4, 4);
        // tangential block from the second fundamental form condition
        for i in 0..3 {
            for j in 0..3 {
                let d = k[(i, j)] - gam[(0, (i + 1) * 4 + j + 1)] / nt;
                g1[(i + 1, j + 1)] = -2.0 * d / nt;
            }
        }
        // gauge: (G g₁)(∇t*, V) = (Υ(g_b) − Υ(g₀))(V), with Υ(g_b) = 0
        let ups: DVector<f64> = upsilon(&ext0, &bg, &x, &steps);
        let g1_nx: Vec<f64> = (0..3).map(|i| -ups[i + 1] / nt).collect();
        let ups_n: f64 = (0..4).map(|m| normal[m] * ups[m]).sum();
        let gg1_nn = -ups_n / nt;
        let hinv = inverse(&DMatrix::from_fn(3, 3, |i, j| g0[(i + 1, j + 1)]));
        let tau: f64 = (0..3).map(|i| (0..3).map(|j| hinv[(i, j)] * g1[(i + 1, j + 1)]).sum::<f64>()).sum();
        let g1_nn = 2.0 * gg1_nn + tau;
        let n0 = normal[0];
        for i in 0..3 {
            let tang: f64 = (0..3).map(|j| normal[j + 1] * g1[(j + 1, i + 1)]).sum();
            let v = (g1_nx[i] - tang) / n0;
            g1[(0, i + 1)] = v;
            g1[(i + 1, 0)] = v;
        }
        let mut rest = 0.0;
        for i in 0..3 {
            rest += 2.0 * n0 * normal[i + 1] * g1[(0, i + 1)];
            for j in 0..3 {
                rest += normal[i + 1] * normal[j + 1] * g1[(i + 1, j + 1)];
            }
        }
        g1[(0, 0)] = (g1_nn - rest) / (n0 * n0);
        Ok(g1)
    }

    /// `g₀ + (t* − t) g₁`, a metric with the produced Cauchy data.
    pub fn extension(&self, x: &[f64]) -> DMatrix<f64> {
        let g0 = self.g0_at(&x[1..]);
        let dt = x[0] - self.t;
        if dt == 0.0 {
            return g0;
        }
        match self.g1_at(&x[1..], 0) {
            Ok(g1) => g0 + g1 * dt,
            Err(_) => DMatrix::from_element(4, 4, f64::NAN),
        }
    }
}

/// `i_b(h, k)` at the grid nodes.
pub fn cauchy_data_map(b: &Kds, h: MetricFn<'_>, k: MetricFn<'_>, grid: &SliceGrid) -> Result<CauchyData> {
    let map = CauchyMap::new(b, grid, h, k);
    let mut g0 = Vec::with_capacity(grid.nodes.len());
    let mut g1 = Vec::with_capacity(grid.nodes.len());
    for (i, y) in grid.nodes.iter().enumerate() {
        let a = map.g0_at(y);
        let c = map.g1_at(y, i)?;
        g0.push(std::array::from_fn(|p| std::array::from_fn(|q| a[(p, q)])));
        g1.push(std::array::from_fn(|p| std::array::from_fn(|q| c[(p, q)])));
    }
    Ok(CauchyData { chart: grid.chart, t: grid.t, nodes: grid.nodes.clone(), g0, g1 })
}

/// Induced `(h, k)` of a metric sampler on `x⁰ = t`, at a node.
pub fn induced_by(g: MetricFn<'_>, t: f64, y: &[f64], step: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let x = [t, y[0], y[1], y[2]];
    let m = g(&x);
    let ginv = inverse(&m);
    let gam = christoffel(g, &x, &[step; 4]);
    let nt = ginv[(0, 0)].sqrt();
    let h = DMatrix::from_fn(3, 3, |i, j| m[(i + 1, j + 1)]);
    let k = DMatrix::from_fn(3, 3, |i, j| 0.5 * (gam[(0, (i + 1) * 4 + j + 1)] + gam[(0, (j + 1) * 4 + i + 1)]) / nt);
    (h, k)
}

/// Directional derivative of `i_b` at `(h, k)` along `(h′, k′)`, by central
/// differences with increment `eps`.
pub fn cauchy_data_derivative(
    b: &Kds,
    h: MetricFn<'_>,
    k: MetricFn<'_>,
    dh: MetricFn<'_>,
    dk: MetricFn<'_>,
    grid: &SliceGrid,
    eps: f64,
) -> Result<CauchyData> {
    let shifted = |s: f64| {
        let hs = move |y: &[f64]| h(y) + dh(y) * s;
        let ks = move |y: &[f64]| k(y) + dk(y) * s;
        cauchy_data_map(b, &hs, &ks, grid)
    };
    let p = shifted(eps)?;
    let m = shifted(-eps)?;
    let diff = |a: &[[[f64; 4]; 4]], c: &[[[f64; 4]; 4]]| -> Vec<[[f64; 4]; 4]> {
        a.iter()
            .zip(c)
            .map(|(x, y)| std::array::from_fn(|i| std::array::from_fn(|j| (x[i][j] - y[i][j]) / (2.0 * eps))))
            .collect()
    };
    Ok(CauchyData {
        chart: grid.chart,
        t: grid.t,
        nodes: grid.nodes.clone(),
        g0: diff(&p.g0, &m.g0),
        g1: diff(&p.g1, &m.g1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::BlackHoleParams;

    fn nodes() -> Vec<[f64; 3]> {
        (0..8).map(|i| [0.2 + 0.09 * i as f64, 0.5 + 0.25 * i as f64, 0.3 * i as f64]).collect()
    }

    fn grid() -> SliceGrid {
        SliceGrid { chart: Chart::Star, t: 0.0, nodes: nodes(), step: 1e-3 }
    }

    fn bump(y: &[f64]) -> DMatrix<f64> {
        let s = (3.0 * y[0]).sin() * y[1].cos();
        DMatrix::from_fn(3, 3, |i, j| if i == j { s } else { 0.3 * s * (1.0 + (i + j) as f64) })
    }

    #[test]
    fn kds_data_maps_to_kds_cauchy_data() {
        for a in [0.0, 0.002] {
            let kd = Kds::new(BlackHoleParams::kds(3.0, 0.1, a)).unwrap();
            let (hf, kf) = kd.induced_samplers(Chart::Star, 0.0, 1e-3);
            let cd = cauchy_data_map(&kd, &hf, &kf, &grid()).unwrap();
            let gb = kd.metric_sampler(Chart::Star);
            for (i, y) in cd.nodes.iter().enumerate() {
                let want = gb(&[0.0, y[0], y[1], y[2]]);
                assert!((cd.g0_mat(i) - want).amax() < 1e-12);
                assert!(cd.g1_mat(i).amax() < 1e-8, "a = {a}: {}", cd.g1_mat(i).amax());
            }
        }
    }

    #[test]
    fn perturbed_data_round_trip_and_gauge() {
        let kd = Kds::new(BlackHoleParams::kds(3.0, 0.1, 0.002)).unwrap();
        let (hf, kf) = kd.induced_samplers(Chart::Star, 0.0, 1e-3);
        let h = |y: &[f64]| hf(y) + bump(y) * 1e-3;
        let k = |y: &[f64]| kf(y) + bump(&[y[1], y[2], y[0]]) * 2e-3;
        let g = grid();
        let map = CauchyMap::new(&kd, &g, &h, &k);
        let cd = cauchy_data_map(&kd, &h, &k, &g).unwrap();
        assert!(cd.g1.iter().any(|m| m.iter().flatten().any(|v| v.abs() > 1e-5)));
        let ext = |x: &[f64]| map.extension(x);
        let bg = kd.metric_sampler(Chart::Star);
        for y in &g.nodes {
            let (h2, k2) = induced_by(&ext, 0.0, y, 1e-3);
            let hd = DMatrix::from_fn(3, 3, |i, j| h(y)[(i, j)]);
            assert!((h2 - hd).amax() < 1e-12);
            assert!((k2 - k(y)).amax() < 1e-6);
            let ups = upsilon(&ext, &bg, &[0.0, y[0], y[1], y[2]], &[1e-3; 4]);
            assert!(ups.amax() < 1e-5, "{}", ups.amax());
        }
    }

    #[test]
    fn lorentzian_failure_is_reported() {
        let kd = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let (_, kf) = kd.induced_samplers(Chart::Star, 0.0, 1e-3);
        let h = |_: &[f64]| DMatrix::identity(3, 3);
        assert!(matches!(cauchy_data_map(&kd, &h, &kf, &grid()), Err(KdsError::NotLorentzian(0))));
    }

    #[test]
    fn derivative_matches_forward_differences() {
        let kd = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let (hf, kf) = kd.induced_samplers(Chart::Star, 0.0, 1e-3);
        let g = SliceGrid { nodes: nodes()[..3].to_vec(), ..grid() };
        let dk = |y: &[f64]| bump(&[y[2], y[0], y[1]]);
        let d = cauchy_data_derivative(&kd, &hf, &kf, &bump, &dk, &g, 1e-5).unwrap();
        let base = cauchy_data_map(&kd, &hf, &kf, &g).unwrap();
        let fwd_err = |eps: f64| {
            let hs = |y: &[f64]| hf(y) + bump(y) * eps;
            let ks = |y: &[f64]| kf(y) + dk(y) * eps;
            let p = cauchy_data_map(&kd, &hs, &ks, &g).unwrap();
            let mut e = 0.0f64;
            for i in 0..g.nodes.len() {
                for a in 0..4 {
                    for b in 0..4 {
                        let q = (p.g1[i][a][b] - base.g1[i][a][b]) / eps;
                        e = e.max((q - d.g1[i][a][b]).abs());
                    }
                }
            }
            e
        };
        let (e1, e2) = (fwd_err(1e-3), fwd_err(5e-4));
        let scale = d.g1.iter().flatten().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        // first order in ε
        assert!(e1 < 0.2 * scale && e2 < 0.6 * e1, "{e1:e} {e2:e} {scale:e}");
        // g₀ depends affinely on h
        for i in 0..g.nodes.len() {
            let want = bump(&g.nodes[i]);
            for a in 0..3 {
                for b in 0..3 {
                    assert!((d.g0[i][a + 1][b + 1] - want[(a, b)]).abs() < 1e-9);
                }
            }
        }
    }
}
