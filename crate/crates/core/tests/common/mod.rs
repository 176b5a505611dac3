//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rivsed::gcbi::GcbiModel;
use rivsed::kernel::KernelParams;

/// Recursive adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫_lo^hi z^k ν(dz)` for the tempered stable kernel, integrated after the
/// substitution `z = u^p`, `p = 1/(1-α)`, which removes the singularity at 0.
pub fn kernel_moment_quad(a: f64, b: f64, alpha: f64, k: u32, lo: f64, hi: f64) -> f64 {
    let p = 1.0 / (1.0 - alpha);
    let g = move |u: f64| {
        if u <= 0.0 {
            return if k == 1 { a * p } else { 0.0 };
        }
        let z = u.powf(p);
        a * p * u.powf(p * (k as f64 - alpha) - 1.0) * (-b * z).exp()
    };
    let (ul, uh) = (lo.powf(1.0 / p), hi.powf(1.0 / p));
    let pieces = 64;
    let edge = |m: usize| ul + (uh - ul) * m as f64 / pieces as f64;
    let rough: f64 = (0..pieces).map(|m| (edge(m + 1) - edge(m)) * g(0.5 * (edge(m) + edge(m + 1)))).sum();
    let tol = 1e-14 * rough.abs() / pieces as f64;
    (0..pieces).map(|m| adaptive_simpson(&g, edge(m), edge(m + 1), tol)).sum()
}

/// Upper integration limit beyond which `z^k e^{-bz}` is negligible.
pub fn kernel_cutoff(b: f64, k: u32) -> f64 {
    (60.0 + 10.0 * k as f64) / b
}

/// `ln Γ(x)` by upward recurrence and the Stirling series.
pub fn ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut y = x;
    while y < 20.0 {
        shift += y.ln();
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Erlang(`l`, scale `w`) distribution function.
pub fn erlang_cdf(l: usize, w: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = x / w;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..l {
        term *= y / n as f64;
        sum += term;
    }
    1.0 - (-y).exp() * sum
}

/// Kolmogorov–Smirnov distance between a sample and a distribution function.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.total_cmp(b));
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Stationary cumulants `κ₁..κ₄` of the streamflow from the Laplace-transform
/// identity `(ln L)′(u) = (A φ(u) − ρQ̲u)/(ρu + φ(u))`, `φ(u) = ∫(e^{−uz} − 1)ν(dz)`,
/// expanded as power series in `u` with kernel moments from [`gamma`].
pub fn stationary_cumulants(model: &GcbiModel) -> [f64; 4] {
    let KernelParams { a, b, alpha } = model.kernel;
    let moments: Vec<f64> = (0..=5).map(|n| if n == 0 { 0.0 } else { a * b.powf(alpha - n as f64) * gamma(n as f64 - alpha) }).collect();
    // φ(u)/u = Σ_{n≥1} (−1)^n M_n u^{n−1}/n!
    let mut phi_over_u = [0.0; 5];
    let mut fact = 1.0;
    for n in 1..=5 {
        fact *= n as f64;
        phi_over_u[n - 1] = if n % 2 == 0 { 1.0 } else { -1.0 } * moments[n] / fact;
    }
    let num: Vec<f64> = (0..4)
        .map(|m| model.a_shift * phi_over_u[m] - if m == 0 { model.rho * model.q_min } else { 0.0 })
        .collect();
    let den: Vec<f64> = (0..4).map(|m| phi_over_u[m] + if m == 0 { model.rho } else { 0.0 }).collect();
    let mut c = [0.0; 4];
    for m in 0..4 {
        let acc: f64 = (1..=m).map(|r| den[r] * c[m - r]).sum();
        c[m] = (num[m] - acc) / den[0];
    }
    let mut kappa = [0.0; 4];
    let mut fact = 1.0;
    for n in 1..=4 {
        if n > 1 {
            fact *= (n - 1) as f64;
        }
        kappa[n - 1] = if n % 2 == 0 { 1.0 } else { -1.0 } * fact * c[n - 1];
    }
    kappa
}

/// `(mean, sd, skewness, kurtosis)` from cumulants, kurtosis non-excess.
pub fn stats_from_cumulants(k: [f64; 4]) -> [f64; 4] {
    [k[0], k[1].sqrt(), k[2] / k[1].powf(1.5), k[3] / (k[1] * k[1]) + 3.0]
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Sample mean and standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// `∫ g(z) ν(dz)` for `g(z) = O(z)` at 0, integrated after `z = u^p`, `p = 1/(1-α)`.
pub fn kernel_integral(kernel: &KernelParams, g: &dyn Fn(f64) -> f64, upper: f64) -> f64 {
    let KernelParams { a, b, alpha } = *kernel;
    let p = 1.0 / (1.0 - alpha);
    let f = move |u: f64| {
        let z = u.max(1e-12).powf(p);
        a * p * (-b * z).exp() * g(z) / z
    };
    let uh = upper.powf(1.0 / p);
    let pieces = 64;
    (0..pieces)
        .map(|m| adaptive_simpson(&f, uh * m as f64 / pieces as f64, uh * (m + 1) as f64 / pieces as f64, 1e-16))
        .sum()
}

/// Five-point central difference.
pub fn derivative(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}
