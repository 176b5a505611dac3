//! Manufactured-solution harness: exact-solution injection, error norms and
//! convergence tables for the reduced equation without the phase operator.
//!
//! The exact pair is `h = 1`, `Φ(Q, S) = -amp (Q/Q̄)(S/S̄)^β` on the normalized
//! unit square.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::{Grid, PotentialField, Scheme, SchemeSpec};
use crate::error::{Error, Result};
use crate::gcbi::GcbiModel;
use crate::problem::SECONDS_PER_HOUR;
use crate::sediment::{SedimentPhysics, TransportCoefficient};
use crate::solver::{solve, SolverOptions};

/// Manufactured test configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedCase {
    pub beta: f64,
    pub amp: f64,
    pub q_bar: f64,
    pub s_bar: f64,
}

impl ManufacturedCase {
    pub fn new(beta: f64, amp: f64, q_bar: f64, s_bar: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("exponent beta = {beta} must be positive")));
        }
        if !(q_bar > 0.0 && s_bar > 0.0) {
            return Err(Error::Domain("manufactured domain must be non-degenerate".into()));
        }
        Ok(Self { beta, amp, q_bar, s_bar })
    }

    pub fn exact(&self, q: f64, s: f64) -> f64 {
        -self.amp * (q / self.q_bar) * (s / self.s_bar).powf(self.beta)
    }

    /// Physical-unit coefficient of `Q S^β`.
    fn scale(&self) -> f64 {
        self.amp / (self.q_bar * self.s_bar.powf(self.beta))
    }

    /// Source `f̄(Q, S)` making the exact pair solve the reduced equation.
    ///
    /// `transport` is `F(Q, S > 0)` in the solver time unit. At `S = 0` the
    /// storage-derivative term is dropped because `F(Q, 0) = 0`.
    pub fn source(&self, model: &GcbiModel, transport: f64, q: f64, s: f64) -> f64 {
        let c = self.scale();
        let mut f = 1.0 - c * s.powf(self.beta) * (model.rho * (q - model.q_min) - (q + model.a_shift) * model.m1());
        if s > 0.0 {
            f -= c * self.beta * q * s.powf(self.beta - 1.0) * transport;
        }
        f
    }

    /// Exact potential sampled on the grid (single phase).
    pub fn exact_field(&self, grid: Grid) -> PotentialField {
        PotentialField::from_fn(grid, |i, j, _| self.exact(grid.q(i), grid.s(j)))
    }

    /// Assembles the reduced scheme with `N_Q = N_S = n`.
    pub fn scheme(&self, model: &GcbiModel, coef: &TransportCoefficient, n: usize, upwind_top: bool) -> Result<Scheme> {
        let grid = Grid::new(n, n, self.q_bar, self.s_bar, 1)?;
        let transport: Vec<f64> = (0..=n).map(|i| coef.rate(grid.q(i), 1.0) * SECONDS_PER_HOUR).collect();
        let source = (0..=n)
            .flat_map(|j| (0..=n).map(move |i| (i, j)))
            .map(|(i, j)| {
                let s = grid.s(j);
                let f = if s > 0.0 { transport[i] } else { 0.0 };
                self.source(model, f, grid.q(i), s)
            })
            .collect();
        Scheme::new(SchemeSpec {
            grid,
            model: *model,
            transport,
            psi: 0.0,
            switching: None,
            source,
            upwind_top,
        })
    }
}

/// Errors of a numerical solution against the exact pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// `h_num - 1`.
    pub h_error: f64,
}

/// Trapezoid-weighted norms of `numeric - exact` on the normalized unit square,
/// taken on phase `l = 1`.
pub fn error_norms(numeric: &PotentialField, exact: &PotentialField, h: f64) -> Result<ErrorNorms> {
    if numeric.grid != exact.grid {
        return Err(Error::Usage("fields live on different grids".into()));
    }
    let g = numeric.grid;
    let (nq, ns) = (g.n_q, g.n_s);
    let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0f64);
    for j in 0..=ns {
        let wj = if j == 0 || j == ns { 0.5 } else { 1.0 } / ns as f64;
        for i in 0..=nq {
            let wi = if i == 0 || i == nq { 0.5 } else { 1.0 } / nq as f64;
            let e = (numeric.get(i, j, 1) - exact.get(i, j, 1)).abs();
            l1 += wi * wj * e;
            l2 += wi * wj * e * e;
            linf = linf.max(e);
        }
    }
    Ok(ErrorNorms { l1, l2: l2.sqrt(), linf, h_error: h - 1.0 })
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub errors: Option<ErrorNorms>,
    /// Rates `(H, l1, l2, l∞)` against the next row.
    pub rates: Option<[f64; 4]>,
    pub iterations: usize,
    pub failure: Option<String>,
}

fn rate(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (e_coarse.abs() / e_fine.abs()).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

/// Solves the manufactured problem on each `N` and tabulates errors and rates.
pub fn convergence_study(
    case: &ManufacturedCase,
    model: &GcbiModel,
    physics: &SedimentPhysics,
    ns: &[usize],
    options: &SolverOptions,
    upwind_top: bool,
) -> Result<Vec<ConvergenceRow>> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Usage("grid sizes must be strictly increasing".into()));
    }
    let coef = physics.transport_coefficient(case.q_bar)?;
    let mut rows: Vec<ConvergenceRow> = ns
        .par_iter()
        .map(|&n| {
            let run = || -> Result<(ErrorNorms, usize)> {
                let scheme = case.scheme(model, &coef, n, upwind_top)?;
                let sol = solve(&scheme, options)?;
                let exact = case.exact_field(*scheme.grid());
                Ok((error_norms(&sol.field, &exact, sol.h)?, sol.iterations))
            };
            match run() {
                Ok((errors, iterations)) => {
                    ConvergenceRow { n, errors: Some(errors), rates: None, iterations, failure: None }
                }
                Err(e) => ConvergenceRow { n, errors: None, rates: None, iterations: 0, failure: Some(e.to_string()) },
            }
        })
        .collect();
    for k in 0..rows.len().saturating_sub(1) {
        if let (Some(a), Some(b)) = (rows[k].errors, rows[k + 1].errors) {
            let (n0, n1) = (rows[k].n, rows[k + 1].n);
            rows[k].rates = Some([
                rate(a.h_error, b.h_error, n0, n1),
                rate(a.l1, b.l1, n0, n1),
                rate(a.l2, b.l2, n0, n1),
                rate(a.linf, b.linf, n0, n1),
            ]);
        }
    }
    Ok(rows)
}

/// Writes a convergence table as CSV; failed rows carry `failed` markers.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header = ["N", "err(H)", "err(l1)", "err(l2)", "err(linf)", "rate(H)", "rate(l1)", "rate(l2)", "rate(linf)"];
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        let mut rec = vec![row.n.to_string()];
        match row.errors {
            Some(e) => rec.extend([e.h_error, e.l1, e.l2, e.linf].iter().map(|v| v.to_string())),
            None => rec.extend(std::iter::repeat_n("failed".to_string(), 4)),
        }
        match row.rates {
            Some(r) => rec.extend(r.iter().map(|v| v.to_string())),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Data(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_fields_have_zero_error() {
        let g = Grid::new(4, 4, 1.0, 1.0, 1).unwrap();
        let f = PotentialField::from_fn(g, |i, j, _| (i * j) as f64);
        let e = error_norms(&f, &f, 1.0).unwrap();
        assert_eq!((e.l1, e.l2, e.linf, e.h_error), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_error_norms() {
        let g = Grid::new(5, 3, 200.0, 400.0, 1).unwrap();
        let a = PotentialField::zeros(g);
        let b = PotentialField::from_fn(g, |_, _, _| 0.25);
        let e = error_norms(&b, &a, 1.0).unwrap();
        assert!((e.l1 - 0.25).abs() < 1e-15 && (e.l2 - 0.25).abs() < 1e-15 && e.linf == 0.25);
    }

    #[test]
    fn grid_mismatch_is_usage_error() {
        let a = PotentialField::zeros(Grid::new(4, 4, 1.0, 1.0, 1).unwrap());
        let b = PotentialField::zeros(Grid::new(5, 4, 1.0, 1.0, 1).unwrap());
        assert!(matches!(error_norms(&a, &b, 1.0), Err(Error::Usage(_))));
    }
}
