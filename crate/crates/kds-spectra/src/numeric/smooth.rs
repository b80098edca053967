//! The degree-7 smooth step with three vanishing derivatives at both ends.

/// `S(t) = t⁴(35 − 84t + 70t² − 20t³)` clamped to `[0, 1]`.
pub fn smoothstep7(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let t4 = t * t * t * t;
        t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(smoothstep7(0.0), 0.0);
        assert_eq!(smoothstep7(1.0), 1.0);
        assert!((smoothstep7(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_ends() {
        let h = 1e-3;
        let d = (smoothstep7(1.0 - h) - 1.0).abs();
        assert!(d < 40.0 * h.powi(4));
        assert!(smoothstep7(h) < 40.0 * h.powi(4));
    }

    proptest! {
        #[test]
        fn monotone_and_symmetric(t in 0.0f64..1.0) {
            prop_assert!((smoothstep7(t) + smoothstep7(1.0 - t) - 1.0).abs() < 1e-14);
            prop_assert!(smoothstep7(t + 1e-6) >= smoothstep7(t));
        }
    }
}
