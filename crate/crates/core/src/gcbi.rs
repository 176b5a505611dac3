//! Generalized CBI streamflow model: stationary moments, autocorrelation, and
//! moment-matching identification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{gamma, KernelParams};
use crate::optim::nelder_mead;

/// Streamflow SDE `dQ = -ρ(Q - Q̲)dt + jumps` with jump intensity `(Q + A)ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcbiModel {
    /// Decay rate (1/h).
    pub rho: f64,
    /// Minimum discharge Q̲ (m³/s).
    pub q_min: f64,
    /// Self-excitation offset A (m³/s).
    pub a_shift: f64,
    pub kernel: KernelParams,
}

impl GcbiModel {
    pub fn new(rho: f64, q_min: f64, a_shift: f64, kernel: KernelParams) -> Result<Self> {
        if !(q_min > 0.0 && q_min.is_finite()) {
            return Err(Error::Domain(format!("minimum discharge {q_min} must be positive")));
        }
        if !(a_shift >= 0.0 && a_shift.is_finite()) {
            return Err(Error::Domain(format!("offset A = {a_shift} must be non-negative")));
        }
        let m1 = kernel.m1();
        if !(rho > m1 && rho.is_finite()) {
            return Err(Error::InfeasibleModel { rho, m1 });
        }
        Ok(Self { rho, q_min, a_shift, kernel })
    }

    /// Builds the model from the rate-free intensity `a′ = a/ρ`.
    pub fn from_scaled(
        a_prime: f64,
        b: f64,
        alpha: f64,
        rho: f64,
        q_min: f64,
        a_shift: f64,
    ) -> Result<Self> {
        Self::new(rho, q_min, a_shift, KernelParams::new(a_prime * rho, b, alpha)?)
    }

    /// Rate-free intensity `a′ = a/ρ`.
    pub fn a_prime(&self) -> f64 {
        self.kernel.a / self.rho
    }

    pub fn m1(&self) -> f64 {
        self.kernel.m1()
    }

    /// Net mean-reversion rate `ρ - M₁`.
    pub fn decay_rate(&self) -> f64 {
        self.rho - self.m1()
    }

    pub fn stationary_mean(&self) -> f64 {
        (self.rho * self.q_min + self.a_shift * self.m1()) / (self.rho - self.m1())
    }

    /// Stationary raw moments `E[Q^n]` for `n = 1..=n_max`.
    pub fn stationary_raw_moments(&self, n_max: usize) -> Result<Vec<f64>> {
        if n_max < 1 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        let m1 = self.m1();
        if self.rho <= m1 {
            return Err(Error::InfeasibleModel { rho: self.rho, m1 });
        }
        let kernel_moments = (1..=n_max as u32)
            .map(|k| self.kernel.moment(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(raw_moment_recursion(
            self.rho,
            self.q_min,
            self.a_shift,
            &kernel_moments,
        ))
    }

    pub fn stationary_stats(&self) -> Result<StationaryStats> {
        let m = self.stationary_raw_moments(4)?;
        StationaryStats::from_raw_moments(m[0], m[1], m[2], m[3])
    }

    /// Autocorrelation `e^{-(ρ - M₁)δ}` of the stationary process at lag δ (h).
    pub fn autocorrelation(&self, lag: f64) -> f64 {
        (-self.decay_rate() * lag).exp()
    }
}

/// Solves the steady moment equations for `m_1..m_{n}` given kernel moments `M_1..M_n`.
fn raw_moment_recursion(rho: f64, q_min: f64, a_shift: f64, big_m: &[f64]) -> Vec<f64> {
    let n_max = big_m.len();
    let mut m = vec![1.0; n_max + 1];
    for n in 1..=n_max {
        let mut acc = rho * q_min * m[n - 1] + big_m[0] * a_shift * m[n - 1];
        let mut tail = 0.0;
        for k in 0..n.saturating_sub(1) {
            tail += binomial(n, k) * big_m[n - k - 1] * (m[k + 1] + a_shift * m[k]);
        }
        acc += tail / n as f64;
        m[n] = acc / (rho - big_m[0]);
    }
    m.remove(0);
    m
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Mean, standard deviation, skewness and (non-excess) kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryStats {
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl StationaryStats {
    pub fn from_raw_moments(m1: f64, m2: f64, m3: f64, m4: f64) -> Result<Self> {
        let var = m2 - m1 * m1;
        if !(var > 0.0) {
            return Err(Error::Numeric(format!("non-positive variance {var:e}")));
        }
        let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
        let c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
        Ok(Self {
            mean: m1,
            std_dev: var.sqrt(),
            skewness: c3 / var.powf(1.5),
            kurtosis: c4 / (var * var),
        })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.mean, self.std_dev, self.skewness, self.kurtosis]
    }

    /// Sum of squared relative deviations of `self` from `targets`.
    pub fn relative_error(&self, targets: &StationaryStats) -> f64 {
        self.as_array()
            .iter()
            .zip(targets.as_array())
            .map(|(m, o)| ((o - m) / o).powi(2))
            .sum()
    }
}

/// Sample statistics of a discharge series, using the stationary-statistics convention.
pub fn empirical_stats(series: &[f64]) -> Result<StationaryStats> {
    if series.len() < 4 {
        return Err(Error::Data(format!(
            "need at least 4 samples, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let (mut c2, mut c3, mut c4) = (0.0, 0.0, 0.0);
    for &x in series {
        let d = x - mean;
        let d2 = d * d;
        c2 += d2;
        c3 += d2 * d;
        c4 += d2 * d2;
    }
    let (c2, c3, c4) = (c2 / n, c3 / n, c4 / n);
    if !(c2 > 0.0) {
        return Err(Error::Data("series has zero variance".into()));
    }
    Ok(StationaryStats {
        mean,
        std_dev: c2.sqrt(),
        skewness: c3 / c2.powf(1.5),
        kurtosis: c4 / (c2 * c2),
    })
}

/// Sample autocorrelation of an evenly spaced series at the given integer lags.
pub fn empirical_acf(series: &[f64], lags: &[usize]) -> Result<Vec<f64>> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    if !(var > 0.0) {
        return Err(Error::Data("series has zero variance".into()));
    }
    lags.iter()
        .map(|&lag| {
            if lag >= n {
                return Err(Error::Data(format!("lag {lag} exceeds series length {n}")));
            }
            let cov: f64 = series[..n - lag]
                .iter()
                .zip(&series[lag..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum();
            Ok(cov / var)
        })
        .collect()
}

/// Result of fitting the exponential autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `ρ - M₁` (1/h).
    pub decay_rate: f64,
    /// `ρ` (1/h).
    pub rho: f64,
}

/// Fits `ln ω = -(ρ - M₁)·lag` by least squares through the origin and
/// recovers `ρ` from the calibrated ratio `M₁/ρ`.
pub fn identify_decay(pairs: &[(f64, f64)], m1_over_rho: f64) -> Result<DecayFit> {
    if pairs.len() < 2 {
        return Err(Error::Data(format!("need at least 2 (lag, acf) pairs, got {}", pairs.len())));
    }
    if !(0.0..1.0).contains(&m1_over_rho) {
        return Err(Error::Domain(format!("ratio M1/rho = {m1_over_rho} must lie in [0, 1)")));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(lag, w) in pairs {
        if !(w > 0.0 && w <= 1.0) || !(lag >= 0.0) {
            return Err(Error::Data(format!(
                "autocorrelation {w} at lag {lag} must lie in (0, 1] with non-negative lag"
            )));
        }
        sxy += lag * w.ln();
        sxx += lag * lag;
    }
    if sxx == 0.0 {
        return Err(Error::Data("all lags are zero".into()));
    }
    let decay_rate = -sxy / sxx;
    Ok(DecayFit { decay_rate, rho: decay_rate / (1.0 - m1_over_rho) })
}

/// Fitted rate-free streamflow parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub alpha: f64,
    pub a_prime: f64,
    pub b: f64,
    pub a_shift: f64,
    /// Achieved sum of squared relative errors.
    pub error: f64,
    pub stats: StationaryStats,
    pub evaluations: usize,
}

impl Calibration {
    /// `M₁/ρ = a′ b^{α-1} Γ(1-α)`.
    pub fn m1_over_rho(&self) -> f64 {
        self.a_prime * self.b.powf(self.alpha - 1.0) * gamma(1.0 - self.alpha)
    }
}

/// Initial guess `(α, a′, b, A)` for the calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamGuess {
    pub alpha: f64,
    pub a_prime: f64,
    pub b: f64,
    pub a_shift: f64,
}

/// Search settings for [`identify_from_moments`].
#[derive(Debug, Clone, Copy)]
pub struct CalibrationOptions {
    pub starts: usize,
    pub max_evaluations: usize,
    /// Error level counted as success.
    pub tolerance: f64,
    pub seed: u64,
    pub initial_guess: Option<ParamGuess>,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { starts: 20, max_evaluations: 100_000, tolerance: 1e-6, seed: 1, initial_guess: None }
    }
}

/// Stationary statistics as a function of the rate-free parameters, `None` if infeasible.
pub fn scaled_stats(alpha: f64, a_prime: f64, b: f64, a_shift: f64, q_min: f64) -> Option<StationaryStats> {
    if !(0.0..1.0).contains(&alpha) || !(a_prime > 0.0) || !(b > 0.0) || !(a_shift >= 0.0) {
        return None;
    }
    let mu: Vec<f64> = (1..=4)
        .map(|k| a_prime * b.powf(alpha - k as f64) * gamma(k as f64 - alpha))
        .collect();
    if !(mu[0] < 1.0) || mu.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let m = raw_moment_recursion(1.0, q_min, a_shift, &mu);
    StationaryStats::from_raw_moments(m[0], m[1], m[2], m[3]).ok()
}

fn decode(y: &[f64]) -> (f64, f64, f64, f64) {
    (y[0], y[1].exp(), y[2].exp(), y[3])
}

/// Matches model statistics to `targets` over `(α, a′, b, A)` with a multistart
/// simplex search; the minimum discharge `q_min` is held fixed.
///
/// Returns [`Error::Calibration`] carrying the best parameters found when the
/// achieved error exceeds `options.tolerance`.
pub fn identify_from_moments(
    targets: &StationaryStats,
    q_min: f64,
    options: &CalibrationOptions,
) -> Result<Calibration> {
    if targets.as_array().iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("all target statistics must be positive".into()));
    }
    let objective = |y: &[f64]| -> f64 {
        let (alpha, ap, b, a_shift) = decode(y);
        match scaled_stats(alpha, ap, b, a_shift, q_min) {
            Some(s) => s.relative_error(targets),
            None => 1e30,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(options.starts.max(1));
    if let Some(g) = options.initial_guess {
        starts.push(vec![g.alpha, g.a_prime.ln(), g.b.ln(), g.a_shift]);
    }
    while starts.len() < options.starts.max(1) {
        starts.push(vec![
            rng.random_range(0.05..0.9),
            rng.random_range((1e-4f64).ln()..(1e-1f64).ln()),
            rng.random_range((1e-3f64).ln()..(1.0f64).ln()),
            rng.random_range(0.0..50.0),
        ]);
    }
    let per_start = (options.max_evaluations / starts.len()).max(10);
    let step = [0.05, 0.3, 0.3, 2.0];
    let results: Vec<_> = starts
        .par_iter()
        .map(|x0| nelder_mead(objective, x0, &step, per_start, 1e-30))
        .collect();

    let evaluations = results.iter().map(|r| r.evaluations).sum();
    // first strictly smaller value wins, so ties go to the lowest start index
    let best = results
        .iter()
        .fold(None::<&crate::optim::Minimum>, |acc, r| match acc {
            Some(a) if a.value <= r.value => Some(a),
            _ => Some(r),
        })
        .expect("at least one start");
    let (alpha, a_prime, b, a_shift) = decode(&best.x);
    let stats = scaled_stats(alpha, a_prime, b, a_shift, q_min)
        .ok_or_else(|| Error::Numeric("no feasible parameters found".into()))?;
    let calibration = Calibration {
        alpha,
        a_prime,
        b,
        a_shift,
        error: best.value,
        stats,
        evaluations,
    };
    if calibration.error > options.tolerance {
        return Err(Error::Calibration { best: Box::new(calibration) });
    }
    Ok(calibration)
}
