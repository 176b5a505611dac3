use approx::assert_relative_eq;
use proptest::prelude::*;
use rivsed::sediment::SedimentPhysics;

/// Transport (m³/s) evaluated straight from depth, shear stress and the Shields excess.
fn full_physics(p: &SedimentPhysics, q: f64, s: f64, q_bar: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let q = q.min(q_bar);
    let depth = (p.n_w * q / (p.b_w * p.i_w.sqrt())).powf(0.6);
    let zc = 1.0 - p.i_w * p.rho_p / (p.mu_b * (p.rho_p - p.rho_w));
    let tau = p.rho_w * p.g * depth * p.i_w;
    let theta = tau / ((p.rho_p - p.rho_w) * p.g * p.d * zc);
    let excess = (theta - p.theta_t).max(0.0);
    let scale = p.rho_p * p.d * ((p.rho_p / p.rho_w - 1.0) * p.g * p.d).sqrt();
    let momentum = scale * 2.0 * p.theta_t.sqrt() / (p.kappa * p.mu_b * zc.sqrt()) * excess * (1.0 + p.c_m / p.mu_b * excess);
    p.b_w * momentum / (p.zeta * p.rho_p)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn manning_depth_reference() {
    let p = SedimentPhysics::default();
    assert_eq!(p.manning_depth(0.0), 0.0);
    let expected = (0.035 * 10.0 / (20.0 * 0.0015f64.sqrt())).powf(0.6);
    assert_relative_eq!(p.manning_depth(10.0), expected, max_relative = 1e-14);
    assert!((p.manning_depth(10.0) - 0.6209).abs() < 1e-4);
}

#[test]
fn slope_correction_reference() {
    let p = SedimentPhysics::default();
    assert!((p.slope_correction() - 0.99618).abs() < 1e-5);
}

#[test]
fn shields_halves_with_grain_size() {
    let p = SedimentPhysics::default();
    let q = SedimentPhysics { d: 2.0 * p.d, ..p };
    assert_relative_eq!(q.shields_number(50.0).unwrap(), 0.5 * p.shields_number(50.0).unwrap(), max_relative = 1e-14);
    assert_eq!(p.shields_number(0.0).unwrap(), 0.0);
}

#[test]
fn threshold_matches_bisection() {
    let p = SedimentPhysics::default();
    let closed = p.threshold_discharge().unwrap();
    let root = bisect(|q| p.shields_number(q).unwrap() - p.theta_t, 0.0, 1e4);
    assert_relative_eq!(closed, root, max_relative = 1e-8);
    assert_relative_eq!(p.shields_number(closed).unwrap(), p.theta_t, max_relative = 1e-10);
}

#[test]
fn threshold_power_law() {
    let p = SedimentPhysics::default();
    let q = SedimentPhysics { theta_t: 2.0 * p.theta_t, ..p };
    assert_relative_eq!(
        q.threshold_discharge().unwrap(),
        2f64.powf(5.0 / 3.0) * p.threshold_discharge().unwrap(),
        max_relative = 1e-12
    );
}

#[test]
fn reduced_law_equals_full_physics() {
    let p = SedimentPhysics::default();
    let coef = p.transport_coefficient(200.0).unwrap();
    for m in 0..=300 {
        let q = m as f64;
        let reduced = coef.rate(q, 1.0);
        let full = full_physics(&p, q, 1.0, 200.0);
        if full == 0.0 {
            assert_eq!(reduced, 0.0);
        } else {
            assert_relative_eq!(reduced, full, max_relative = 1e-10);
        }
        assert_relative_eq!(p.transport_rate_physical(q, 1.0, 200.0).unwrap(), full, max_relative = 1e-12, epsilon = 1e-300);
    }
    assert_eq!(coef.rate(150.0, 0.0), 0.0);
    assert_eq!(coef.rate(coef.q_hat, 5.0), 0.0);
}

#[test]
fn demonstration_transport_values() {
    let coef = SedimentPhysics::default().transport_coefficient(200.0).unwrap();
    assert!((coef.q_hat - 4.73).abs() < 0.01, "q_hat = {}", coef.q_hat);
    assert!((coef.rate(200.0, 1.0) - 0.1956).abs() < 1e-3);
}

proptest! {
    #[test]
    fn transport_monotone_and_bounded(q1 in 0.0f64..400.0, q2 in 0.0f64..400.0, s in 0.0f64..400.0) {
        let coef = SedimentPhysics::default().transport_coefficient(200.0).unwrap();
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        prop_assert!(coef.rate(lo, s) <= coef.rate(hi, s));
        prop_assert!(coef.rate(hi, s) <= coef.rate(200.0, 1.0));
        prop_assert!(coef.rate(hi, 0.0) <= coef.rate(hi, s));
    }

    #[test]
    fn transport_is_holder_in_depth_law(q1 in 0.0f64..200.0, q2 in 0.0f64..200.0) {
        let coef = SedimentPhysics::default().transport_coefficient(200.0).unwrap();
        let x_max = 200f64.powf(0.6) - coef.q_hat.powf(0.6);
        let lipschitz = coef.f1 * (1.0 + 2.0 * coef.f2 * x_max);
        let gap = (q1.powf(0.6) - q2.powf(0.6)).abs();
        prop_assert!((coef.rate(q1, 1.0) - coef.rate(q2, 1.0)).abs() <= lipschitz * gap * (1.0 + 1e-12) + 1e-15);
    }
}
