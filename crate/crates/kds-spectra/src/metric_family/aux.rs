use serde::{Deserialize, Serialize};

use super::params::Kds;

/// The auxiliary radial and angular functions at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuxValues {
    pub r: f64,
    pub theta: f64,
    pub mu: f64,
    pub mu_tilde: f64,
    pub rho2: f64,
    pub lambda_b: f64,
    pub angular_factor: f64,
    pub nu: f64,
    pub f_prime: f64,
    pub phi_prime: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub ct_plus: f64,
    pub ct_minus: f64,
    pub chi: f64,
}

impl Kds {
    pub fn aux_at(&self, r: f64, theta: f64) -> AuxValues {
        AuxValues {
            r,
            theta,
            mu: self.mu(r),
            mu_tilde: self.mu_tilde(r),
            rho2: self.rho2(r, theta),
            lambda_b: self.lam_b,
            angular_factor: self.angular_factor(theta),
            nu: self.nu(r),
            f_prime: self.f_prime(r),
            phi_prime: self.phi_prime(r),
            c_plus: self.c_s(1.0, r),
            c_minus: self.c_s(-1.0, r),
            ct_plus: self.ct_s(1.0, r),
            ct_minus: self.ct_s(-1.0, r),
            chi: self.chi(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::metric_family::{BlackHoleParams, Kds};

    #[test]
    fn static_f_prime_is_minus_nu_over_mu() {
        let k = Kds::new(BlackHoleParams::sds(3.0, 0.1)).unwrap();
        for r in [0.25, 0.4, 0.6, 0.85] {
            let v = k.aux_at(r, 1.0);
            assert!((v.f_prime + v.nu / v.mu).abs() < 1e-10 * (1.0 + (v.nu / v.mu).abs()));
            assert_eq!(v.phi_prime, 0.0);
        }
    }
}
