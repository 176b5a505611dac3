//! Tempered-stable jump kernel `ν(dz) = a z^{-(1+α)} e^{-bz} dz` on `z > 0`.
//!
//! Only the finite-variation regime `0 ≤ α < 1` is supported, so every moment
//! `M_k = ∫ z^k ν(dz) = a b^{α-k} Γ(k-α)` with `k ≥ 1` is finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the tempered-stable Lévy kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Intensity, per unit time.
    pub a: f64,
    /// Tilting, inverse discharge (s/m³).
    pub b: f64,
    /// Intermittency exponent.
    pub alpha: f64,
}

impl KernelParams {
    pub fn new(a: f64, b: f64, alpha: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("kernel intensity a = {a} must be positive")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!("kernel tilting b = {b} must be positive")));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "intermittency alpha = {alpha} must lie in [0, 1)"
            )));
        }
        Ok(Self { a, b, alpha })
    }

    /// Kernel density `a z^{-(1+α)} e^{-bz}`.
    pub fn density(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("jump size z = {z} must be positive")));
        }
        Ok(self.density_unchecked(z))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, z: f64) -> f64 {
        self.a * (-(1.0 + self.alpha) * z.ln() - self.b * z).exp()
    }

    /// Analytic moment `M_k = a b^{α-k} Γ(k-α)`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(Error::Domain("moment order must be at least 1".into()));
        }
        let k = f64::from(k);
        Ok(self.a * self.b.powf(self.alpha - k) * gamma(k - self.alpha))
    }

    /// First moment, the quantity the drift rewriting and stability condition use.
    pub fn m1(&self) -> f64 {
        self.a * self.b.powf(self.alpha - 1.0) * gamma(1.0 - self.alpha)
    }

    /// Midpoint-cell masses `v_k = ΔQ · density((k+1/2)ΔQ)` for `k = 1..=count`.
    ///
    /// Entry `k-1` of the returned vector holds `v_k`.
    pub fn quadrature_weights(&self, dq: f64, count: usize) -> Result<Vec<f64>> {
        if !(dq > 0.0) {
            return Err(Error::Domain(format!("grid step dq = {dq} must be positive")));
        }
        if count == 0 {
            return Err(Error::Domain("weight count must be at least 1".into()));
        }
        Ok((1..=count)
            .map(|k| dq * self.density_unchecked(jump_midpoint(k, dq)))
            .collect())
    }

    /// Tail first moment `V = ∫_{q̄}^∞ z ν(dz)`.
    ///
    /// Evaluated as `a q̄^{1-α} ∫_0^1 x^{α-2} e^{-b q̄/x} dx` by composite Simpson
    /// with panel doubling; the integrand vanishes at `x = 0`.
    pub fn tail_first_moment(&self, qbar: f64) -> Result<f64> {
        if !(qbar > 0.0) {
            return Err(Error::Domain(format!("truncation qbar = {qbar} must be positive")));
        }
        let c = self.b * qbar;
        let alpha = self.alpha;
        let integrand = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                ((alpha - 2.0) * x.ln() - c / x).exp()
            }
        };
        let integral = simpson_doubling(integrand, 0.0, 1.0, 1e-10, 24)?;
        Ok(self.a * qbar.powf(1.0 - alpha) * integral)
    }

    /// First moment carried by jumps smaller than `eps`, `∫_0^eps z ν(dz)`.
    pub fn small_jump_first_moment(&self, eps: f64) -> Result<f64> {
        if eps < 0.0 {
            return Err(Error::Domain(format!("cut eps = {eps} must be non-negative")));
        }
        if eps == 0.0 {
            return Ok(0.0);
        }
        // t = u^{1/(1-α)} removes the z^{-α} singularity at the origin.
        let p = 1.0 / (1.0 - self.alpha);
        let be = self.b * eps;
        let integral = simpson_doubling(|u: f64| (-be * u.powf(p)).exp(), 0.0, 1.0, 1e-12, 20)?;
        Ok(self.a * eps.powf(1.0 - self.alpha) / (1.0 - self.alpha) * integral)
    }

    /// Jump frequency above `z0`, `∫_{z0}^∞ ν(dz)`.
    pub fn tail_mass(&self, z0: f64) -> Result<f64> {
        if !(z0 > 0.0) {
            return Err(Error::Domain(format!("threshold z0 = {z0} must be positive")));
        }
        let upper = z0 + TAIL_DECAY_LENGTHS / self.b;
        self.log_integral(z0, upper, |z| self.density_unchecked(z))
    }

    /// `∫_{lo}^{hi} g(z) dz` computed in `u = ln z`, where the kernel is smooth.
    pub(crate) fn log_integral<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: G) -> Result<f64> {
        let (ul, uh) = (lo.ln(), hi.ln());
        simpson_doubling(|u: f64| {
            let z = u.exp();
            g(z) * z
        }, ul, uh, 1e-11, 22)
    }
}

/// Number of `1/b` decay lengths after which the exponential tilt is treated as zero.
pub(crate) const TAIL_DECAY_LENGTHS: f64 = 60.0;

/// Jump size `(k + 1/2) ΔQ` attached to the `k`-th quadrature cell.
#[inline]
pub fn jump_midpoint(k: usize, dq: f64) -> f64 {
    (k as f64 + 0.5) * dq
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function via the Lanczos approximation (g = 7, n = 9), with reflection
/// below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Composite Simpson rule on `[lo, hi]`, doubling the panel count until two
/// successive estimates agree to `rel_tol`.
pub(crate) fn simpson_doubling<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    max_doublings: u32,
) -> Result<f64> {
    let mut n: usize = 16;
    let mut h = (hi - lo) / n as f64;
    let ends = f(lo) + f(hi);
    let mut odd: f64 = (0..n / 2).map(|i| f(lo + (2 * i + 1) as f64 * h)).sum();
    let mut even: f64 = (1..n / 2).map(|i| f(lo + (2 * i) as f64 * h)).sum();
    let mut prev = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    for _ in 0..max_doublings {
        // old odd and even nodes become the even nodes of the refined rule
        even += odd;
        n *= 2;
        h *= 0.5;
        odd = (0..n / 2).map(|i| f(lo + (2 * i + 1) as f64 * h)).sum();
        let cur = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        if !cur.is_finite() {
            return Err(Error::Numeric(format!(
                "Simpson estimate became non-finite on [{lo}, {hi}]"
            )));
        }
        if (cur - prev).abs() <= rel_tol * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numeric(format!(
        "Simpson refinement on [{lo}, {hi}] did not reach relative tolerance {rel_tol:e} \
         with {n} panels (last estimate {prev:e})"
    )))
}
