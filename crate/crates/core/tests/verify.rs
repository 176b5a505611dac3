mod common;

use common::{derivative, kernel_cutoff, kernel_integral};
use rivsed::problem::{identified_model, SECONDS_PER_HOUR};
use rivsed::sediment::SedimentPhysics;
use rivsed::solver::SolverOptions;
use rivsed::verify::{convergence_study, write_convergence_csv, ManufacturedCase};

#[test]
fn source_at_empty_storage_is_one_for_linear_case() {
    let model = identified_model().unwrap();
    let case = ManufacturedCase::new(1.0, 1.0, 200.0, 400.0).unwrap();
    for q in [0.0, 1.0, 57.0, 200.0] {
        assert_eq!(case.source(&model, 0.2, q, 0.0), 1.0);
    }
}

#[test]
fn source_at_minimum_discharge_without_transport() {
    let model = identified_model().unwrap();
    for beta in [0.5, 1.0, 2.0] {
        let case = ManufacturedCase::new(beta, 1.0, 200.0, 400.0).unwrap();
        let s = 250.0;
        let expected = 1.0 + (s / 400.0f64).powf(beta) / 200.0 * (model.q_min + model.a_shift) * model.m1();
        let got = case.source(&model, 0.0, model.q_min, s);
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }
}

#[test]
fn exact_pair_solves_continuous_equation() {
    let model = identified_model().unwrap();
    let coef = SedimentPhysics::default().transport_coefficient(200.0).unwrap();
    for beta in [0.5, 1.0, 2.0] {
        let case = ManufacturedCase::new(beta, 1.0, 200.0, 400.0).unwrap();
        for (q, s) in [(3.3, 17.0), (47.1, 211.9), (133.7, 389.2), (199.1, 5.5)] {
            let transport = coef.rate(q, s) * SECONDS_PER_HOUR;
            let phi = |q: f64, s: f64| case.exact(q, s);
            let phi_q = derivative(&|x| phi(x, s), q, 1e-2);
            let phi_s = derivative(&|y| phi(q, y), s, 1e-2);
            let jumps = kernel_integral(&model.kernel, &|z| phi(q, s) - phi(q + z, s), kernel_cutoff(model.kernel.b, 1));
            let lhs = 1.0 + model.rho * (q - model.q_min) * phi_q + transport * phi_s + (q + model.a_shift) * jumps
                - case.source(&model, transport, q, s);
            assert!(lhs.abs() < 1e-8, "beta {beta} at ({q}, {s}): {lhs:e}");
        }
    }
}

#[test]
fn exact_field_pins_origin() {
    let case = ManufacturedCase::new(2.0, 1.0, 200.0, 400.0).unwrap();
    assert_eq!(case.exact(0.0, 0.0), 0.0);
    assert!(ManufacturedCase::new(0.0, 1.0, 200.0, 400.0).is_err());
}

#[test]
fn study_reports_rates_between_rows() {
    let model = identified_model().unwrap();
    let case = ManufacturedCase::new(2.0, 1.0, 200.0, 400.0).unwrap();
    let options = SolverOptions { relaxation: 0.7, tolerance: 1e-10, ..Default::default() };
    let rows = convergence_study(&case, &model, &SedimentPhysics::default(), &[10, 20, 40], &options, false).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[..2].iter().all(|r| r.rates.is_some()));
    assert!(rows[2].rates.is_none());
    let (a, b) = (rows[0].errors.unwrap(), rows[1].errors.unwrap());
    let expected = (a.l1 / b.l1).ln() / 2f64.ln();
    assert!((rows[0].rates.unwrap()[1] - expected).abs() < 1e-12);

    let mut csv = Vec::new();
    write_convergence_csv(&rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,err(H),err(l1),err(l2),err(linf),rate(H),rate(l1),rate(l2),rate(linf)");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].ends_with(",,,,"));

    assert!(convergence_study(&case, &model, &SedimentPhysics::default(), &[20, 10], &options, false).is_err());
}
