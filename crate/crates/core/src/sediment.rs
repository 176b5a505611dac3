//! Sediment transport coefficient `F(Q, S)` from Manning depth and Shields number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Channel and grain properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SedimentPhysics {
    /// Grain diameter (m).
    pub d: f64,
    /// Porosity.
    pub zeta: f64,
    /// Manning roughness (s/m^{1/3}).
    pub n_w: f64,
    /// Channel width (m).
    pub b_w: f64,
    /// Bed slope.
    pub i_w: f64,
    /// Threshold Shields number.
    pub theta_t: f64,
    /// Particle density (kg/m³).
    pub rho_p: f64,
    /// Water density (kg/m³).
    pub rho_w: f64,
    /// Gravity (m/s²).
    pub g: f64,
    /// Karman constant.
    pub kappa: f64,
    /// Bed friction coefficient.
    pub mu_b: f64,
    /// Momentum coefficient.
    pub c_m: f64,
}

impl Default for SedimentPhysics {
    fn default() -> Self {
        Self {
            d: 0.005,
            zeta: 0.5,
            n_w: 0.035,
            b_w: 20.0,
            i_w: 0.0015,
            theta_t: 0.072,
            rho_p: 2650.0,
            rho_w: 997.0,
            g: 9.81,
            kappa: 0.4,
            mu_b: 0.63,
            c_m: 1.7,
        }
    }
}

/// Reduced transport law `F = χ{S>0} f1 X (1 + f2 X)` with
/// `X = max(min(Q, q̄)^0.6 - q̂^0.6, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportCoefficient {
    /// Amplitude (m³/s per (m³/s)^0.6).
    pub f1: f64,
    /// Quadratic coefficient (per (m³/s)^0.6).
    pub f2: f64,
    /// Threshold discharge (m³/s).
    pub q_hat: f64,
    /// Truncation discharge (m³/s).
    pub q_bar: f64,
}

impl TransportCoefficient {
    /// Transport rate in m³/s.
    pub fn rate(&self, q: f64, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let x = (q.max(0.0).min(self.q_bar).powf(0.6) - self.q_hat.powf(0.6)).max(0.0);
        self.f1 * x * (1.0 + self.f2 * x)
    }
}

impl SedimentPhysics {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d", self.d),
            ("n_w", self.n_w),
            ("b_w", self.b_w),
            ("i_w", self.i_w),
            ("theta_t", self.theta_t),
            ("rho_p", self.rho_p),
            ("rho_w", self.rho_w),
            ("g", self.g),
            ("kappa", self.kappa),
            ("mu_b", self.mu_b),
            ("c_m", self.c_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Physical(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return Err(Error::Physical(format!("porosity {} must lie in (0, 1)", self.zeta)));
        }
        if self.i_w >= 0.1 {
            return Err(Error::Physical(format!("bed slope {} is not small", self.i_w)));
        }
        if self.rho_p <= self.rho_w {
            return Err(Error::Physical("particles must be denser than water".into()));
        }
        let z = self.slope_correction();
        if !(z > 0.0) {
            return Err(Error::Physical(format!("slope correction Z_c = {z} must be positive")));
        }
        Ok(())
    }

    /// Water depth (m) from the Manning formula for a wide rectangular channel.
    pub fn manning_depth(&self, q: f64) -> f64 {
        (self.n_w * q.max(0.0) / (self.b_w * self.i_w.sqrt())).powf(0.6)
    }

    /// Slope correction `Z_c = 1 - I_w ρ_p / (μ_b (ρ_p - ρ_w))`.
    pub fn slope_correction(&self) -> f64 {
        1.0 - self.i_w * self.rho_p / (self.mu_b * (self.rho_p - self.rho_w))
    }

    fn checked_slope_correction(&self) -> Result<f64> {
        let z = self.slope_correction();
        if z > 0.0 {
            Ok(z)
        } else {
            Err(Error::Physical(format!("slope correction Z_c = {z} must be positive")))
        }
    }

    /// Shields number from bed shear stress `ρ_w g H_w I_w`.
    pub fn shields_number(&self, q: f64) -> Result<f64> {
        let zc = self.checked_slope_correction()?;
        let tau = self.rho_w * self.g * self.manning_depth(q) * self.i_w;
        Ok(tau / ((self.rho_p - self.rho_w) * self.g * self.d * zc))
    }

    /// Discharge at which the Shields number reaches its threshold.
    pub fn threshold_discharge(&self) -> Result<f64> {
        let zc = self.checked_slope_correction()?;
        let depth = self.theta_t * (self.rho_p - self.rho_w) * self.d * zc / (self.rho_w * self.i_w);
        Ok(self.b_w * self.i_w.sqrt() / self.n_w * depth.powf(5.0 / 3.0))
    }

    /// `dθ/d(Q^0.6)`, the constant linking the Shields excess to the depth law.
    fn shields_slope(&self, zc: f64) -> f64 {
        self.rho_w * self.i_w * (self.n_w / (self.b_w * self.i_w.sqrt())).powf(0.6)
            / ((self.rho_p - self.rho_w) * self.d * zc)
    }

    /// Reduced-law coefficients for truncation `q_bar`.
    pub fn transport_coefficient(&self, q_bar: f64) -> Result<TransportCoefficient> {
        self.validate()?;
        let zc = self.slope_correction();
        let k = self.shields_slope(zc);
        let q_hat = self.threshold_discharge()?;
        if !(q_bar > q_hat) {
            return Err(Error::Physical(format!(
                "truncation {q_bar} must exceed the threshold discharge {q_hat}"
            )));
        }
        let f1 = (self.b_w / (self.zeta * self.rho_p)) * self.transport_scale()
            * 2.0 * self.theta_t.sqrt() / (self.kappa * self.mu_b * zc.sqrt())
            * k;
        let f2 = self.c_m / self.mu_b * k;
        Ok(TransportCoefficient { f1, f2, q_hat, q_bar })
    }

    /// `ρ_p d √((ρ_p/ρ_w - 1) g d)`.
    fn transport_scale(&self) -> f64 {
        self.rho_p * self.d * ((self.rho_p / self.rho_w - 1.0) * self.g * self.d).sqrt()
    }

    /// Transport rate (m³/s) evaluated from the Shields excess directly.
    pub fn transport_rate_physical(&self, q: f64, s: f64, q_bar: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let zc = self.checked_slope_correction()?;
        let excess = (self.shields_number(q.min(q_bar))? - self.theta_t).max(0.0);
        let q_s = self.transport_scale() * 2.0 * self.theta_t.sqrt() / (self.kappa * self.mu_b * zc.sqrt())
            * excess
            * (1.0 + self.c_m / self.mu_b * excess);
        Ok(self.b_w * q_s / (self.zeta * self.rho_p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn depth_scaling_and_zero() {
        let p = SedimentPhysics::default();
        assert_eq!(p.manning_depth(0.0), 0.0);
        assert_relative_eq!(p.manning_depth(20.0) / p.manning_depth(10.0), 2f64.powf(0.6), max_relative = 1e-14);
    }

    #[test]
    fn threshold_round_trip() {
        let p = SedimentPhysics::default();
        let q_hat = p.threshold_discharge().unwrap();
        assert_relative_eq!(p.shields_number(q_hat).unwrap(), p.theta_t, max_relative = 1e-10);
        let p2 = SedimentPhysics { theta_t: 2.0 * p.theta_t, ..p };
        assert_relative_eq!(
            p2.threshold_discharge().unwrap() / q_hat,
            2f64.powf(5.0 / 3.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn transport_zero_cases() {
        let p = SedimentPhysics::default();
        let c = p.transport_coefficient(200.0).unwrap();
        assert_eq!(c.rate(150.0, 0.0), 0.0);
        assert_eq!(c.rate(c.q_hat, 10.0), 0.0);
        assert!(c.rate(c.q_hat * 1.5, 10.0) > 0.0);
    }

    #[test]
    fn rejects_bad_physics() {
        let p = SedimentPhysics { zeta: 1.5, ..Default::default() };
        assert!(p.validate().is_err());
        let steep = SedimentPhysics { i_w: 0.2, ..Default::default() };
        assert!(steep.validate().is_err());
        let collapsed = SedimentPhysics { mu_b: 0.001, i_w: 0.05, ..Default::default() };
        assert!(collapsed.shields_number(1.0).is_err());
    }
}
