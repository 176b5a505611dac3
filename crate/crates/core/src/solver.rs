//! Fast-sweeping fixed-point solver for `(h, Φ)` and policy extraction.

use serde::{Deserialize, Serialize};

use crate::discretization::{Grid, Penalty, PotentialField, Scheme, Switching};
use crate::error::{Error, Result};

/// Iteration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop once the sup-norm update drops to this level.
    pub tolerance: f64,
    /// Damping weight `w ∈ (0, 1)`.
    pub relaxation: f64,
    pub max_sweeps: usize,
    /// Abort if the update grows tenfold over this many sweeps.
    pub divergence_window: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, relaxation: 0.6, max_sweeps: 1_000_000, divergence_window: 50 }
    }
}

/// Converged effective Hamiltonian and potential.
#[derive(Debug, Clone)]
pub struct Solution {
    pub h: f64,
    pub field: PotentialField,
    pub iterations: usize,
    pub final_error: f64,
    /// Largest absolute vertex residual of the returned state.
    pub max_residual: f64,
    /// Exponent clamps applied during the run.
    pub clamp_count: usize,
    /// `(h, update)` after each sweep.
    pub history: Vec<SweepRecord>,
}

/// State after one macro-iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub h: f64,
    pub update: f64,
}

/// Bounds `0 ≤ h ≤ sup f + o/W` every discrete solution satisfies.
pub fn hamiltonian_bound(penalty: &Penalty, switching: &Switching) -> (f64, f64) {
    (0.0, penalty.sup() + switching.o / switching.w)
}

/// Index of the vertex pinned to zero.
pub const GAUGE: (usize, usize, usize) = (0, 0, 1);

/// One macro-iteration: recompute `h` at the gauge vertex, then a damped
/// Gauss–Seidel pass in the given ordering (0..4). Returns the sup-norm update.
pub fn sweep(scheme: &Scheme, h: &mut f64, phi: &mut [f64], w: f64, ordering: usize) -> f64 {
    let g = *scheme.grid();
    let (nq, ns, lb) = (g.n_q, g.n_s, g.l_bar);
    let gauge_min = scheme.switching_min_raw(phi, 0, 0);
    *h -= scheme.local_residual(*h, phi, GAUGE.0, GAUGE.1, GAUGE.2, gauge_min);

    let i_fwd = ordering % 2 == 0;
    let j_fwd = (ordering / 2) % 2 == 0;
    let switching = scheme.switching().copied();
    let layer = g.layer_len();
    let mut suffix = vec![f64::INFINITY; ns + 2];
    let mut er: f64 = 0.0;

    let phase_min = |phi: &[f64], i: usize, j: usize| -> f64 {
        let mut m = f64::INFINITY;
        let mut idx = g.index(i, j, 1);
        for _ in 0..lb {
            m = m.min(phi[idx]);
            idx += layer;
        }
        m
    };

    for ii in 0..=nq {
        let i = if i_fwd { ii } else { nq - ii };
        let mut running = f64::INFINITY;
        if let Some(sw) = switching {
            if j_fwd {
                for j in (0..=ns).rev() {
                    suffix[j] = suffix[j + 1].min(phase_min(phi, i, j) + sw.c1_step * j as f64);
                }
            }
        }
        for jj in 0..=ns {
            let j = if j_fwd { jj } else { ns - jj };
            let smin = match switching {
                Some(sw) => {
                    let next = if j_fwd { suffix[j + 1] } else { running };
                    sw.o + phase_min(phi, i, j).min(sw.c0 + next - sw.c1_step * j as f64)
                }
                None => 0.0,
            };
            let xi = scheme.diagonal(i, j);
            if xi > 0.0 {
                for l in 1..=lb {
                    if (i, j, l) == GAUGE {
                        continue;
                    }
                    let r = scheme.local_residual(*h, phi, i, j, l, smin);
                    let delta = -w * r / xi;
                    phi[g.index(i, j, l)] += delta;
                    er = er.max(delta.abs());
                }
            }
            if let (Some(sw), false) = (switching, j_fwd) {
                running = running.min(phase_min(phi, i, j) + sw.c1_step * j as f64);
            }
        }
    }
    er
}

/// Largest absolute residual over all vertices.
pub fn max_residual(scheme: &Scheme, h: f64, field: &PotentialField) -> f64 {
    let g = scheme.grid();
    let mut worst: f64 = 0.0;
    for j in 0..=g.n_s {
        for i in 0..=g.n_q {
            if scheme.diagonal(i, j) == 0.0 {
                continue;
            }
            let m = scheme.switching_min_raw(&field.values, i, j);
            for l in 1..=g.l_bar {
                worst = worst.max(scheme.local_residual(h, &field.values, i, j, l, m).abs());
            }
        }
    }
    worst
}

/// Solves from the zero initial state.
pub fn solve(scheme: &Scheme, options: &SolverOptions) -> Result<Solution> {
    solve_from(scheme, options, 0.0, PotentialField::zeros(*scheme.grid()))
}

/// Solves from a given initial state; the field is shifted so the gauge vertex is zero.
pub fn solve_from(scheme: &Scheme, options: &SolverOptions, h0: f64, init: PotentialField) -> Result<Solution> {
    let g = *scheme.grid();
    if init.grid != g {
        return Err(Error::Usage("initial field does not match the scheme grid".into()));
    }
    if !(options.relaxation > 0.0 && options.relaxation < 1.0) {
        return Err(Error::Usage(format!("relaxation {} must lie in (0, 1)", options.relaxation)));
    }
    if !(options.tolerance > 0.0) {
        return Err(Error::Usage(format!("tolerance {} must be positive", options.tolerance)));
    }
    let mut phi = init.values;
    let anchor = phi[g.index(GAUGE.0, GAUGE.1, GAUGE.2)];
    phi.iter_mut().for_each(|v| *v -= anchor);
    let mut h = h0;
    let clamps_before = scheme.clamp_count();
    let mut history: Vec<SweepRecord> = Vec::new();
    let mut er = f64::INFINITY;

    for n in 0..options.max_sweeps {
        er = sweep(scheme, &mut h, &mut phi, options.relaxation, n % 4);
        if !er.is_finite() || !h.is_finite() {
            return Err(Error::Divergence { iterations: n + 1, reason: "non-finite state".into() });
        }
        let window = options.divergence_window;
        if window > 0 && n >= window && er > 10.0 * history[n - window].update {
            return Err(Error::Divergence {
                iterations: n + 1,
                reason: format!(
                    "update grew from {:.3e} to {er:.3e} over {window} sweeps",
                    history[n - window].update
                ),
            });
        }
        history.push(SweepRecord { h, update: er });
        if n % 1000 == 999 {
            log::debug!("sweep {}: h = {h:.10}, update = {er:.3e}", n + 1);
        }
        if er <= options.tolerance {
            let field = PotentialField { grid: g, values: phi };
            let max_residual = max_residual(scheme, h, &field);
            let solution = Solution {
                h,
                field,
                iterations: n + 1,
                final_error: er,
                max_residual,
                clamp_count: scheme.clamp_count() - clamps_before,
                history,
            };
            if solution.clamp_count > 0 {
                log::warn!("{} exponent clamps during solve", solution.clamp_count);
            }
            return Ok(solution);
        }
    }
    Err(Error::NonConvergence { iterations: options.max_sweeps, last_error: er, h })
}

/// Checks `0 ≤ h ≤ sup f + o/W` up to `slack`.
pub fn check_bound(h: f64, penalty: &Penalty, switching: &Switching, slack: f64) -> Result<()> {
    let (lo, hi) = hamiltonian_bound(penalty, switching);
    if h < lo - slack || h > hi + slack {
        return Err(Error::Numeric(format!("h = {h} violates the bound [{lo}, {hi}]")));
    }
    Ok(())
}

/// Optimal observation level, replenishment and worst-case distortion.
#[derive(Debug, Clone)]
pub struct Policy {
    pub grid: Grid,
    /// Erlang level chosen at each `(i, j)`.
    pub l_star: Vec<usize>,
    /// Replenishment steps `j′` at each `(i, j)`.
    pub steps: Vec<usize>,
    psi: f64,
    field: Option<PotentialField>,
}

impl Policy {
    /// Builds a policy from explicit per-vertex decisions (layer order, `i` fastest).
    pub fn from_parts(grid: Grid, l_star: Vec<usize>, steps: Vec<usize>) -> Result<Self> {
        if l_star.len() != grid.layer_len() || steps.len() != grid.layer_len() {
            return Err(Error::Usage("policy arrays do not match the grid".into()));
        }
        for (k, (&l, &s)) in l_star.iter().zip(&steps).enumerate() {
            let j = k / (grid.n_q + 1);
            if l < 1 || l > grid.l_bar || j + s > grid.n_s {
                return Err(Error::Usage(format!("policy entry {k} out of range (l = {l}, steps = {s})")));
            }
        }
        Ok(Self { grid, l_star, steps, psi: 0.0, field: None })
    }

    fn at(&self, i: usize, j: usize) -> usize {
        j * (self.grid.n_q + 1) + i
    }

    pub fn l_star(&self, i: usize, j: usize) -> usize {
        self.l_star[self.at(i, j)]
    }

    pub fn replenish_steps(&self, i: usize, j: usize) -> usize {
        self.steps[self.at(i, j)]
    }

    /// Replenishment volume (m³).
    pub fn eta_star(&self, i: usize, j: usize) -> f64 {
        self.replenish_steps(i, j) as f64 * self.grid.ds()
    }

    /// Worst-case kernel distortion for a jump of `i′` cells from `(i, j, l)`.
    pub fn phi_star(&self, i: usize, j: usize, l: usize, i_jump: usize) -> f64 {
        match &self.field {
            Some(f) if self.psi > 0.0 => (-self.psi * (f.get(i, j, l) - f.get(i + i_jump, j, l))).exp(),
            _ => 1.0,
        }
    }
}

/// Per-vertex minimizer of the phase operator, ties to the smallest `j′` then `l′`.
pub fn extract_policy(solution: &Solution, scheme: &Scheme) -> Result<Policy> {
    let g = *scheme.grid();
    if solution.field.grid != g {
        return Err(Error::Usage("solution grid does not match the scheme".into()));
    }
    if scheme.switching().is_none() {
        return Err(Error::Usage("policy extraction needs the phase operator".into()));
    }
    let mut l_star = Vec::with_capacity(g.layer_len());
    let mut steps = Vec::with_capacity(g.layer_len());
    for j in 0..=g.n_s {
        for i in 0..=g.n_q {
            let (_, jp, lp) = scheme.switching_min(&solution.field, i, j).expect("switching enabled");
            l_star.push(lp);
            steps.push(jp);
        }
    }
    Ok(Policy { grid: g, l_star, steps, psi: scheme.psi(), field: Some(solution.field.clone()) })
}
