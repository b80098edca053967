//! Adaptive Dormand–Prince 5(4) integrator.

use crate::error::{KdsError, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-14, h0: 1e-3, h_max: 0.05, max_steps: 2_000_000 }
    }
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct OdeOutcome {
    pub s: f64,
    pub y: Vec<f64>,
    pub steps: usize,
    pub stopped_early: bool,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const BS: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(s, y)` from `s0` to `s1`.
///
/// The observer sees every accepted step and may rescale the state in place.
/// A right-hand side returning `false` marks the state as outside its domain.
pub fn integrate(
    f: &dyn Fn(f64, &[f64], &mut [f64]) -> bool,
    y0: &[f64],
    s0: f64,
    s1: f64,
    opts: OdeOptions,
    mut observe: impl FnMut(f64, &mut [f64]) -> Control,
) -> Result<OdeOutcome> {
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut s = s0;
    let mut h = opts.h0.min(opts.h_max).min(s1 - s0);
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut steps = 0;
    if !f(s, &y, &mut k[0]) {
        return Err(KdsError::LeftDomain { s, steps });
    }
    while s < s1 {
        if steps >= opts.max_steps {
            return Err(KdsError::ToleranceFailure(format!("step budget exhausted at s = {s}")));
        }
        h = h.min(s1 - s);
        let mut ok = true;
        for st in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..st {
                    acc += h * A[st][j] * k[j][i];
                }
                tmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(st);
            let _ = head;
            if !f(s + C[st] * h, &tmp, &mut tail[0]) {
                ok = false;
                break;
            }
        }
        if !ok {
            if h < 1e-14 * (1.0 + s.abs()) {
                return Err(KdsError::LeftDomain { s, steps });
            }
            h *= 0.25;
            continue;
        }
        let mut err = 0.0;
        for i in 0..n {
            let mut y5 = y[i];
            let mut e = 0.0;
            for j in 0..7 {
                y5 += h * B[j] * k[j][i];
                e += h * (B[j] - BS[j]) * k[j][i];
            }
            ynew[i] = y5;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5.abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * (1.0 + s.abs()) {
                return Err(KdsError::ToleranceFailure("non-finite error estimate".into()));
            }
            continue;
        }
        if err <= 1.0 {
            s += h;
            y.copy_from_slice(&ynew);
            steps += 1;
            let ctl = observe(s, &mut y);
            if ctl == Control::Stop {
                return Ok(OdeOutcome { s, y, steps, stopped_early: true });
            }
            if !f(s, &y, &mut k[0]) {
                return Err(KdsError::LeftDomain { s, steps });
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(opts.h_max);
        if h < 1e-15 * (1.0 + s.abs()) {
            return Err(KdsError::ToleranceFailure(format!("step size underflow at s = {s}")));
        }
    }
    Ok(OdeOutcome { s, y, steps, stopped_early: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_s: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
            true
        };
        let out = integrate(&f, &[1.0, 0.0], 0.0, 2.0 * std::f64::consts::PI, OdeOptions::default(), |_, _| {
            Control::Continue
        })
        .unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-10 && out.y[1].abs() < 1e-10);
    }

    #[test]
    fn observer_can_stop() {
        let f = |_s: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = 1.0;
            true
        };
        let out = integrate(&f, &[0.0], 0.0, 10.0, OdeOptions::default(), |_, y| {
            if y[0] > 1.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!(out.stopped_early && out.s < 1.2);
    }

    #[test]
    fn domain_exit_reported() {
        let f = |_s: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = 1.0;
            y[0] < 0.5
        };
        let r = integrate(&f, &[0.0], 0.0, 10.0, OdeOptions::default(), |_, _| Control::Continue);
        assert!(matches!(r, Err(KdsError::LeftDomain { .. })));
    }
}
