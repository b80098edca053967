use crate::error::{KdsError, Result};
use crate::numeric::tensor::{christoffel, inverse};
use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use super::charts::Chart;
use super::params::Kds;

/// First and second fundamental forms of `t* = const` at grid nodes.
///
/// `h` follows the Lorentzian sign and is negative definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedData {
    pub chart: Chart,
    pub t: f64,
    pub nodes: Vec<[f64; 3]>,
    pub h: Vec<[[f64; 3]; 3]>,
    pub k: Vec<[[f64; 3]; 3]>,
}

impl InducedData {
    pub fn h_mat(&self, i: usize) -> Matrix3<f64> {
        Matrix3::from_fn(|a, b| self.h[i][a][b])
    }

    pub fn k_mat(&self, i: usize) -> Matrix3<f64> {
        Matrix3::from_fn(|a, b| self.k[i][a][b])
    }
}

impl Kds {
    /// `h_{ij} = g_{ij}` and `k_{ij} = Γ^0_{ij}/√(g^{00})` on `x⁰ = t`.
    ///
    /// `k(X, Y) = ⟨∇_X Y, N⟩` with `N` the future unit normal.
    pub fn fundamental_forms(&self, chart: Chart, x: [f64; 4], step: f64) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
        let m = self.eval_metric(chart, x)?;
        let g = self.metric_sampler(chart);
        let gam = christoffel(&g, &x, &[step; 4]);
        let g00 = m.g_con[0][0];
        if !(g00 > 0.0) {
            return Err(KdsError::NotSpacelike(0));
        }
        let n0 = g00.sqrt();
        let h = Matrix3::from_fn(|i, j| m.g_cov[i + 1][j + 1]);
        let k = Matrix3::from_fn(|i, j| 0.5 * (gam[(0, (i + 1) * 4 + j + 1)] + gam[(0, (j + 1) * 4 + i + 1)]) / n0);
        Ok((h, k))
    }

    /// The induced fields as samplers on the slice, for curvature work.
    pub fn induced_samplers(
        &self,
        chart: Chart,
        t: f64,
        step: f64,
    ) -> (impl Fn(&[f64]) -> DMatrix<f64> + '_, impl Fn(&[f64]) -> DMatrix<f64> + '_) {
        let g = self.metric_sampler(chart);
        let g2 = self.metric_sampler(chart);
        let hf = move |y: &[f64]| {
            let m = g(&[t, y[0], y[1], y[2]]);
            DMatrix::from_fn(3, 3, |i, j| m[(i + 1, j + 1)])
        };
        let kf = move |y: &[f64]| {
            let x = [t, y[0], y[1], y[2]];
            let gm = g2(&x);
            let ginv = inverse(&gm);
            let gam = christoffel(&g2, &x, &[step; 4]);
            let n0 = ginv[(0, 0)].sqrt();
            DMatrix::from_fn(3, 3, |i, j| gam[(0, (i + 1) * 4 + j + 1)] / n0)
        };
        (hf, kf)
    }
}

/// Induced data on `t* = t` at the given spatial nodes.
pub fn induced_data(kds: &Kds, chart: Chart, t: f64, nodes: &[[f64; 3]], step: f64) -> Result<InducedData> {
    let mut h = Vec::with_capacity(nodes.len());
    let mut k = Vec::with_capacity(nodes.len());
    for (i, y) in nodes.iter().enumerate() {
        let (hm, km) = kds.fundamental_forms(chart, [t, y[0], y[1], y[2]], step).map_err(|e| {
            if matches!(e, KdsError::NotSpacelike(_)) {
                KdsError::NotSpacelike(i)
            } else {
                e
            }
        })?;
        let ev = hm.symmetric_eigen().eigenvalues;
        if ev.iter().any(|v| !(*v < 0.0)) {
            return Err(KdsError::NotSpacelike(i));
        }
        h.push(std::array::from_fn(|a| std::array::from_fn(|b| hm[(a, b)])));
        k.push(std::array::from_fn(|a| std::array::from_fn(|b| km[(a, b)])));
    }
    Ok(InducedData { chart, t, nodes: nodes.to_vec(), h, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_family::BlackHoleParams;

    #[test]
    fn slice_is_spacelike_and_k_symmetric() {
        let kd = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        let nodes: Vec<[f64; 3]> =
            (0..12).map(|i| [0.16 + 0.07 * i as f64, 0.3 + 0.2 * i as f64, 0.1 * i as f64]).collect();
        let d = induced_data(&kd, Chart::Star, 0.0, &nodes, 1e-3).unwrap();
        for i in 0..nodes.len() {
            let k = d.k_mat(i);
            assert!((k - k.transpose()).amax() < 1e-12);
        }
        // t* is not totally geodesic
        assert!(d.k_mat(3).amax() > 1e-3);
    }

    #[test]
    fn rotating_slice_in_cartesian_chart() {
        let kd = Kds::new(BlackHoleParams::kds(3.0, 0.1, 0.002)).unwrap();
        let nodes = [[0.0, 0.0, 0.5], [0.3, 0.2, -0.1], [0.0, 0.85, 0.1]];
        assert!(induced_data(&kd, Chart::Cartesian, 0.0, &nodes, 1e-3).is_ok());
    }
}
