//! Grid on `(Q, S, l)` and the monotone finite-difference residual of the
//! ergodic optimality equation.
//!
//! Every vertex equation has the form `h - source + Ξ Φ_c - Θ[Φ] + Λ[Φ] = 0`,
//! where `Θ` is non-decreasing in every neighbour value. The solver isolates
//! `Φ_c` through the diagonal `Ξ`.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcbi::GcbiModel;

/// Largest exponent magnitude accepted in the uncertainty-averse jump term.
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Tensor grid `Q_i = i ΔQ`, `S_j = j ΔS`, Erlang phase `l = 1..=l_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_q: usize,
    pub n_s: usize,
    pub q_bar: f64,
    pub s_bar: f64,
    pub l_bar: usize,
}

impl Grid {
    pub fn new(n_q: usize, n_s: usize, q_bar: f64, s_bar: f64, l_bar: usize) -> Result<Self> {
        if n_q < 2 || n_s < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 cells per axis, got {n_q}x{n_s}")));
        }
        if l_bar < 1 {
            return Err(Error::Domain("Erlang cap must be at least 1".into()));
        }
        if !(q_bar > 0.0 && s_bar > 0.0) {
            return Err(Error::Domain(format!("domain [0,{q_bar}]x[0,{s_bar}] must be non-degenerate")));
        }
        Ok(Self { n_q, n_s, q_bar, s_bar, l_bar })
    }

    pub fn dq(&self) -> f64 {
        self.q_bar / self.n_q as f64
    }

    pub fn ds(&self) -> f64 {
        self.s_bar / self.n_s as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        i as f64 * self.dq()
    }

    pub fn s(&self, j: usize) -> f64 {
        j as f64 * self.ds()
    }

    /// Number of `(i, j)` vertices in one phase layer.
    pub fn layer_len(&self) -> usize {
        (self.n_q + 1) * (self.n_s + 1)
    }

    pub fn len(&self) -> usize {
        self.layer_len() * self.l_bar
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of `(i, j, l)`; `i` runs fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        ((l - 1) * (self.n_s + 1) + j) * (self.n_q + 1) + i
    }

    /// Inverse of [`Grid::index`].
    pub fn vertex(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % (self.n_q + 1);
        let rest = idx / (self.n_q + 1);
        (i, rest % (self.n_s + 1), rest / (self.n_s + 1) + 1)
    }
}

/// Potential `Φ[i][j][l]` stored flat in [`Grid::index`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl PotentialField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for l in 1..=grid.l_bar {
            for j in 0..=grid.n_s {
                for i in 0..=grid.n_q {
                    values[grid.index(i, j, l)] = f(i, j, l);
                }
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.values[self.grid.index(i, j, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, l: usize, v: f64) {
        let idx = self.grid.index(i, j, l);
        self.values[idx] = v;
    }

    pub fn sup_distance(&self, other: &PotentialField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Depletion penalty `f(S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Penalty {
    /// `χ{S = 0}`.
    Indicator,
    /// `max(κ - S, 0)/κ`.
    Regularized { kappa: f64 },
}

impl Penalty {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Penalty::Indicator => {
                if s <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Penalty::Regularized { kappa } => ((kappa - s) / kappa).max(0.0),
        }
    }

    pub fn sup(&self) -> f64 {
        1.0
    }
}

/// Observation and replenishment economics entering the phase operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Switching {
    /// Erlang phase scale `W` in solver time units.
    pub w: f64,
    /// Observation cost.
    pub o: f64,
    /// Fixed replenishment cost.
    pub c0: f64,
    /// Cost of one `ΔS` replenishment step.
    pub c1_step: f64,
}

impl Switching {
    /// Replenishment cost `C(j′ΔS)`, zero for `j′ = 0`.
    #[inline]
    pub fn cost(&self, steps: usize) -> f64 {
        if steps == 0 {
            0.0
        } else {
            self.c0 + self.c1_step * steps as f64
        }
    }
}

/// Coefficients of the discrete operator, all in one consistent time unit.
#[derive(Debug, Clone)]
pub struct SchemeSpec {
    pub grid: Grid,
    pub model: GcbiModel,
    /// Transport rate `F(Q_i, S > 0)` for each `i`.
    pub transport: Vec<f64>,
    /// Uncertainty aversion; 0 selects the linear jump operator.
    pub psi: f64,
    /// Phase operator; `None` drops it entirely.
    pub switching: Option<Switching>,
    /// Source term at `(i, j)`, stored `j`-major like a phase layer.
    pub source: Vec<f64>,
    /// Keep the backward drift difference on the top row `i = N_Q` instead of
    /// dropping the `Q` terms there.
    pub upwind_top: bool,
}

/// Assembled monotone scheme.
#[derive(Debug)]
pub struct Scheme {
    grid: Grid,
    dq: f64,
    ds: f64,
    drift: Vec<f64>,
    transport: Vec<f64>,
    intensity: Vec<f64>,
    weights: Vec<f64>,
    midpoints: Vec<f64>,
    sum_v: Vec<f64>,
    sum_vz: Vec<f64>,
    tail: f64,
    boundary_coef: f64,
    m1: f64,
    a_shift: f64,
    psi: f64,
    switching: Option<Switching>,
    source: Vec<f64>,
    upwind_top: bool,
    diagonal: Vec<f64>,
    clamps: AtomicUsize,
}

impl Scheme {
    pub fn new(spec: SchemeSpec) -> Result<Self> {
        let SchemeSpec { grid, model, transport, psi, switching, source, upwind_top } = spec;
        let nq = grid.n_q;
        if transport.len() != nq + 1 {
            return Err(Error::Usage(format!(
                "transport has {} entries, grid needs {}",
                transport.len(),
                nq + 1
            )));
        }
        if source.len() != grid.layer_len() {
            return Err(Error::Usage(format!(
                "source has {} entries, grid needs {}",
                source.len(),
                grid.layer_len()
            )));
        }
        if transport.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
            return Err(Error::Domain("transport rates must be finite and non-negative".into()));
        }
        if !(psi >= 0.0 && psi.is_finite()) {
            return Err(Error::Domain(format!("uncertainty aversion psi = {psi} must be non-negative")));
        }
        if let Some(sw) = switching {
            if !(sw.w > 0.0 && sw.o >= 0.0 && sw.c0 >= 0.0 && sw.c1_step >= 0.0) {
                return Err(Error::Domain(format!("invalid switching costs {sw:?}")));
            }
        }
        let dq = grid.dq();
        let ds = grid.ds();
        let m1 = model.m1();
        let weights = model.kernel.quadrature_weights(dq, nq)?;
        let midpoints: Vec<f64> = (1..=nq).map(|k| crate::kernel::jump_midpoint(k, dq)).collect();
        let tail = model.kernel.tail_first_moment(grid.q_bar)?;
        let drift: Vec<f64> = (0..=nq)
            .map(|i| (model.rho - m1) * grid.q(i) - model.a_shift * m1 - model.rho * model.q_min)
            .collect();
        let intensity: Vec<f64> = (0..=nq).map(|i| grid.q(i) + model.a_shift).collect();
        let mut sum_v = vec![0.0; nq + 1];
        let mut sum_vz = vec![0.0; nq + 1];
        for i in (0..nq).rev() {
            let k = nq - i;
            sum_v[i] = sum_v[i + 1] + weights[k - 1];
            sum_vz[i] = sum_vz[i + 1] + weights[k - 1] * midpoints[k - 1];
        }
        let boundary_coef = (model.a_shift * (m1 - tail) + model.rho * model.q_min) / dq;

        let mut scheme = Self {
            grid,
            dq,
            ds,
            drift,
            transport,
            intensity,
            weights,
            midpoints,
            sum_v,
            sum_vz,
            tail,
            boundary_coef,
            m1,
            a_shift: model.a_shift,
            psi,
            switching,
            source,
            upwind_top,
            diagonal: Vec::new(),
            clamps: AtomicUsize::new(0),
        };
        scheme.diagonal = (0..=grid.n_s)
            .flat_map(|j| (0..=nq).map(move |i| (i, j)))
            .map(|(i, j)| scheme.compute_diagonal(i, j))
            .collect();
        Ok(scheme)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn switching(&self) -> Option<&Switching> {
        self.switching.as_ref()
    }

    pub fn tail_first_moment(&self) -> f64 {
        self.tail
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    /// Effective drift `(ρ - M₁)Q_i - A M₁ - ρQ̲`.
    pub fn effective_drift(&self, i: usize) -> f64 {
        self.drift[i]
    }

    pub fn transport(&self, i: usize) -> f64 {
        self.transport[i]
    }

    pub fn source(&self, i: usize, j: usize) -> f64 {
        self.source[j * (self.grid.n_q + 1) + i]
    }

    /// Number of exponent clamps applied so far in the averse jump term.
    pub fn clamp_count(&self) -> usize {
        self.clamps.load(Ordering::Relaxed)
    }

    /// Coefficient `Ξ_{i,j,l}` of the centre value (independent of `l`).
    pub fn diagonal(&self, i: usize, j: usize) -> f64 {
        self.diagonal[j * (self.grid.n_q + 1) + i]
    }

    fn compute_diagonal(&self, i: usize, j: usize) -> f64 {
        let nq = self.grid.n_q;
        let mut xi = self.switching.map_or(0.0, |sw| 1.0 / sw.w);
        if i == 0 {
            xi += self.boundary_coef + self.a_shift * self.sum_v[0];
        } else if i < nq {
            xi += self.drift[i].abs() / self.dq
                + self.intensity[i] * (self.sum_v[i] + self.sum_vz[i] / self.dq);
        } else if self.top_drift() > 0.0 {
            xi += self.top_drift() / self.dq;
        }
        if j > 0 {
            xi += self.transport[i] / self.ds;
        }
        xi
    }

    /// Drift acting on the top row: the effective drift when it points
    /// outward and the top row keeps its upwind difference, otherwise 0.
    fn top_drift(&self) -> f64 {
        let d = self.drift[self.grid.n_q];
        if self.upwind_top && d > 0.0 {
            d
        } else {
            0.0
        }
    }

    /// Upwind discretization of `drift · ∂Φ/∂Q`.
    pub fn drift_q_upwind(&self, field: &PotentialField, i: usize, j: usize, l: usize) -> f64 {
        let nq = self.grid.n_q;
        if i == nq {
            return self.top_drift() * (field.get(i, j, l) - field.get(i - 1, j, l)) / self.dq;
        }
        let d = self.drift[i];
        let c = field.get(i, j, l);
        if d >= 0.0 && i > 0 {
            d * (c - field.get(i - 1, j, l)) / self.dq
        } else {
            d * (field.get(i + 1, j, l) - c) / self.dq
        }
    }

    /// Backward difference of `F ∂Φ/∂S`, zero on `j = 0`.
    pub fn advect_s(&self, field: &PotentialField, i: usize, j: usize, l: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        self.transport[i] * (field.get(i, j, l) - field.get(i, j - 1, l)) / self.ds
    }

    /// Linear jump term, including the tail-moment correction at `i = 0`.
    pub fn nonlocal_neutral(&self, field: &PotentialField, i: usize, j: usize, l: usize) -> f64 {
        let nq = self.grid.n_q;
        if i == nq {
            return 0.0;
        }
        let c = field.get(i, j, l);
        let mut sum = 0.0;
        for k in 1..=nq - i {
            let mut term = c - field.get(i + k, j, l);
            if i > 0 {
                term += self.midpoints[k - 1] * (c - field.get(i - 1, j, l)) / self.dq;
            }
            sum += self.weights[k - 1] * term;
        }
        let mut value = self.intensity[i] * sum;
        if i == 0 {
            value += self.a_shift * self.tail * (field.get(1, j, l) - c) / self.dq;
        }
        value
    }

    /// Entropy-penalized jump term for `ψ > 0`.
    pub fn nonlocal_averse(&self, field: &PotentialField, i: usize, j: usize, l: usize) -> Result<f64> {
        let nq = self.grid.n_q;
        let psi = self.psi;
        if !(psi > 0.0) {
            return Err(Error::Usage("averse jump term requires psi > 0".into()));
        }
        if i == nq {
            return Ok(0.0);
        }
        let c = field.get(i, j, l);
        let mut sum = 0.0;
        for k in 1..=nq - i {
            let x = psi * (c - field.get(i + k, j, l));
            if x.abs() > EXPONENT_CLAMP {
                return Err(Error::Numeric(format!(
                    "exponent {x:e} out of range at vertex ({i}, {j}, {l}), jump {k}"
                )));
            }
            let mut term = -(-x).exp_m1();
            if i > 0 {
                term += psi * self.midpoints[k - 1] * (c - field.get(i - 1, j, l)) / self.dq;
            }
            sum += self.weights[k - 1] * term;
        }
        let mut value = self.intensity[i] / psi * sum;
        if i == 0 {
            value += self.a_shift * self.tail * (field.get(1, j, l) - c) / self.dq;
        }
        Ok(value)
    }

    /// Jump term selected by `ψ`.
    pub fn nonlocal(&self, field: &PotentialField, i: usize, j: usize, l: usize) -> Result<f64> {
        if self.psi > 0.0 {
            self.nonlocal_averse(field, i, j, l)
        } else {
            Ok(self.nonlocal_neutral(field, i, j, l))
        }
    }

    /// Merged drift and jump form at `i = 0`, written with non-negative coefficients.
    pub fn boundary_merged(&self, field: &PotentialField, j: usize, l: usize) -> f64 {
        let nq = self.grid.n_q;
        let c = field.get(0, j, l);
        let mut sum = 0.0;
        for k in 1..=nq {
            sum += self.weights[k - 1] * (c - field.get(k, j, l));
        }
        self.a_shift * sum + self.boundary_coef * (c - field.get(1, j, l))
    }

    /// Replenishment/observation minimum `min_{j′,l′} Φ_{i,j+j′,l′} + o + C(j′ΔS)`
    /// by exhaustive scan; ties go to the smallest `j′`, then the smallest `l′`.
    pub fn switching_min(&self, field: &PotentialField, i: usize, j: usize) -> Option<(f64, usize, usize)> {
        let sw = self.switching?;
        let mut best = (f64::INFINITY, 0, 1);
        for jp in 0..=self.grid.n_s - j {
            let cost = sw.o + sw.cost(jp);
            for lp in 1..=self.grid.l_bar {
                let v = field.get(i, j + jp, lp) + cost;
                if v < best.0 {
                    best = (v, jp, lp);
                }
            }
        }
        Some(best)
    }

    /// Phase operator value and, for `l = 1`, the minimizing `(j′, l′)`.
    pub fn switching_operator(
        &self,
        field: &PotentialField,
        i: usize,
        j: usize,
        l: usize,
    ) -> (f64, Option<(usize, usize)>) {
        let Some(sw) = self.switching else {
            return (0.0, None);
        };
        let c = field.get(i, j, l);
        if l >= 2 {
            return ((c - field.get(i, j, l - 1)) / sw.w, None);
        }
        let (m, jp, lp) = self.switching_min(field, i, j).expect("switching enabled");
        ((c - m) / sw.w, Some((jp, lp)))
    }

    /// Full vertex residual, evaluated term by term.
    pub fn residual(&self, h: f64, field: &PotentialField, i: usize, j: usize, l: usize) -> Result<f64> {
        let q_part = if i == 0 {
            if self.psi > 0.0 {
                // the averse term carries the tail correction; merge it with the drift
                self.drift_q_upwind(field, i, j, l) + self.nonlocal_averse(field, i, j, l)?
            } else {
                self.boundary_merged(field, j, l)
            }
        } else {
            self.drift_q_upwind(field, i, j, l) + self.nonlocal(field, i, j, l)?
        };
        Ok(h - self.source(i, j)
            + q_part
            + self.advect_s(field, i, j, l)
            + self.switching_operator(field, i, j, l).0)
    }

    /// Residual on raw storage with a precomputed phase minimum for `l = 1`.
    ///
    /// Exponents beyond [`EXPONENT_CLAMP`] are clamped and counted.
    #[inline]
    pub(crate) fn local_residual(&self, h: f64, phi: &[f64], i: usize, j: usize, l: usize, switch_min: f64) -> f64 {
        let nq = self.grid.n_q;
        let stride = nq + 1;
        let base = self.grid.index(0, j, l);
        let row = &phi[base..base + stride];
        let c = row[i];
        let mut r = h - self.source[j * stride + i];
        if i < nq {
            let qa = self.intensity[i];
            let ahead = &row[i + 1..];
            let v = &self.weights[..nq - i];
            if i == 0 {
                r += self.boundary_coef * (c - row[1]);
            } else {
                let d = self.drift[i];
                r += if d >= 0.0 {
                    d * (c - row[i - 1])
                } else {
                    -d * (c - row[i + 1])
                } / self.dq;
                r += qa * self.sum_vz[i] * (c - row[i - 1]) / self.dq;
            }
            if self.psi > 0.0 {
                let psi = self.psi;
                let mut s = 0.0;
                for (vk, &p) in v.iter().zip(ahead) {
                    let mut x = psi * (c - p);
                    if x < -EXPONENT_CLAMP {
                        self.clamps.fetch_add(1, Ordering::Relaxed);
                        x = -EXPONENT_CLAMP;
                    }
                    s += vk * -(-x).exp_m1();
                }
                r += qa / psi * s;
            } else {
                let s: f64 = v.iter().zip(ahead).map(|(vk, p)| vk * p).sum();
                r += qa * (self.sum_v[i] * c - s);
            }
        } else {
            r += self.top_drift() * (c - row[nq - 1]) / self.dq;
        }
        if j > 0 {
            r += self.transport[i] * (c - phi[base - stride + i]) / self.ds;
        }
        if let Some(sw) = self.switching {
            let other = if l >= 2 { phi[base - self.grid.layer_len() + i] } else { switch_min };
            r += (c - other) / sw.w;
        }
        r
    }

    /// Raw-storage phase minimum by exhaustive scan (no tie information).
    pub(crate) fn switching_min_raw(&self, phi: &[f64], i: usize, j: usize) -> f64 {
        let Some(sw) = self.switching else {
            return 0.0;
        };
        let mut best = f64::INFINITY;
        for jp in 0..=self.grid.n_s - j {
            let cost = sw.o + sw.cost(jp);
            for lp in 1..=self.grid.l_bar {
                best = best.min(phi[self.grid.index(i, j + jp, lp)] + cost);
            }
        }
        best
    }

    /// Vertices whose value enters the residual at `(i, j, l)` with a strictly
    /// positive monotone coefficient, for the current field.
    pub fn couplings(&self, field: &PotentialField, i: usize, j: usize, l: usize) -> Vec<usize> {
        let g = &self.grid;
        let nq = g.n_q;
        let mut out = Vec::new();
        if i < nq {
            if i == 0 {
                if self.boundary_coef > 0.0 {
                    out.push(g.index(1, j, l));
                }
            } else {
                let d = self.drift[i];
                if d > 0.0 || self.sum_vz[i] > 0.0 {
                    out.push(g.index(i - 1, j, l));
                }
                if d < 0.0 {
                    out.push(g.index(i + 1, j, l));
                }
            }
            for k in 1..=nq - i {
                if self.weights[k - 1] > 0.0 {
                    out.push(g.index(i + k, j, l));
                }
            }
        } else if self.top_drift() > 0.0 {
            out.push(g.index(nq - 1, j, l));
        }
        if j > 0 && self.transport[i] > 0.0 {
            out.push(g.index(i, j - 1, l));
        }
        if self.switching.is_some() {
            if l >= 2 {
                out.push(g.index(i, j, l - 1));
            } else if let (_, Some((jp, lp))) = self.switching_operator(field, i, j, l) {
                out.push(g.index(i, j + jp, lp));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelParams;

    fn small_scheme(psi: f64, switching: Option<Switching>) -> Scheme {
        let grid = Grid::new(6, 4, 60.0, 40.0, 2).unwrap();
        let model = GcbiModel::new(0.2, 1.0, 2.0, KernelParams::new(0.01, 0.05, 0.3).unwrap()).unwrap();
        let transport = (0..=6).map(|i| if i > 2 { 0.5 * i as f64 } else { 0.0 }).collect();
        let source = (0..grid.layer_len()).map(|k| if k < 7 { 1.0 } else { 0.0 }).collect();
        Scheme::new(SchemeSpec { grid, model, transport, psi, switching, source, upwind_top: false }).unwrap()
    }

    fn costs() -> Switching {
        Switching { w: 2.0, o: 0.5, c0: 1.0, c1_step: 0.1 }
    }

    #[test]
    fn index_round_trip() {
        let g = Grid::new(3, 5, 1.0, 1.0, 4).unwrap();
        for idx in 0..g.len() {
            let (i, j, l) = g.vertex(idx);
            assert_eq!(g.index(i, j, l), idx);
        }
    }

    #[test]
    fn constant_field_terms_vanish() {
        let s = small_scheme(0.0, Some(costs()));
        let f = PotentialField::from_fn(*s.grid(), |_, _, _| 3.0);
        for i in 0..=6 {
            for j in 0..=4 {
                assert_eq!(s.drift_q_upwind(&f, i, j, 1), 0.0);
                assert_eq!(s.advect_s(&f, i, j, 1), 0.0);
                assert!(s.nonlocal_neutral(&f, i, j, 2).abs() < 1e-15);
                assert_eq!(s.switching_operator(&f, i, j, 2).0, 0.0);
                let (v, arg) = s.switching_operator(&f, i, j, 1);
                assert!((v + 0.25).abs() < 1e-15);
                assert_eq!(arg, Some((0, 1)));
            }
        }
    }

    #[test]
    fn local_residual_matches_term_by_term() {
        for psi in [0.0, 0.05] {
            let s = small_scheme(psi, Some(costs()));
            let f = PotentialField::from_fn(*s.grid(), |i, j, l| ((i * 7 + j * 3 + l) % 5) as f64 * 0.3 - 0.4);
            for idx in 0..s.grid().len() {
                let (i, j, l) = s.grid().vertex(idx);
                let m = s.switching_min_raw(&f.values, i, j);
                let fast = s.local_residual(0.7, &f.values, i, j, l, m);
                let slow = s.residual(0.7, &f, i, j, l).unwrap();
                assert!((fast - slow).abs() < 1e-12, "({i},{j},{l}) {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn averse_overflow_is_reported() {
        let s = small_scheme(1.0, None);
        let f = PotentialField::from_fn(*s.grid(), |i, _, _| if i == 3 { 1000.0 } else { 0.0 });
        assert!(s.nonlocal_averse(&f, 1, 1, 1).is_err());
    }
}
