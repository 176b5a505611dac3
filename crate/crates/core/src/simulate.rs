//! Monte Carlo simulation of streamflow, managed storage under Erlangized
//! observation, and ergodic-cost estimation.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcbi::GcbiModel;
use crate::kernel::{KernelParams, TAIL_DECAY_LENGTHS};
use crate::problem::{ProblemSpec, SECONDS_PER_HOUR};
use crate::sediment::TransportCoefficient;
use crate::solver::Policy;

/// Number of nodes in the inverse-CDF jump table.
pub const JUMP_TABLE_NODES: usize = 10_000;

/// Fraction of `M₁` the default small-jump cut may drop.
pub const DEFAULT_DROPPED_FRACTION: f64 = 1e-3;

/// Path and replication settings (hours, m³/s, m³).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    /// Recording and storage integration step (h).
    pub dt: f64,
    /// Horizon `T` (h).
    pub horizon: f64,
    /// Jumps below this size are dropped (m³/s); `None` picks the default cut.
    pub small_jump_cut: Option<f64>,
    /// Adds the mean of the dropped jumps as drift.
    pub compensate_small_jumps: bool,
    pub seed: u64,
    /// Initial discharge (m³/s).
    pub q0: f64,
    /// Initial storage (m³).
    pub s0: f64,
    /// Costs before this time (h) are discarded.
    pub burn_in: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            dt: 1.0,
            horizon: 1e5,
            small_jump_cut: None,
            compensate_small_jumps: true,
            seed: 1,
            q0: 5.0,
            s0: 0.0,
            burn_in: 0.0,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("time step dt = {} must be positive", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon T = {} must be positive", self.horizon)));
        }
        if let Some(eps) = self.small_jump_cut {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::Domain(format!("small-jump cut {eps} must be non-negative")));
            }
        }
        if !(self.q0 >= 0.0 && self.q0.is_finite()) {
            return Err(Error::Domain(format!("initial discharge {} must be non-negative", self.q0)));
        }
        if !(self.s0 >= 0.0 && self.s0.is_finite()) {
            return Err(Error::Domain(format!("initial storage {} must be non-negative", self.s0)));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.horizon) {
            return Err(Error::Domain(format!("burn-in {} must lie in [0, T)", self.burn_in)));
        }
        Ok(())
    }
}

/// Waiting time of `l` exponential phases with mean `w` each.
pub fn sample_erlang<R: Rng + ?Sized>(l: usize, w: f64, rng: &mut R) -> Result<f64> {
    if l < 1 {
        return Err(Error::Domain("Erlang shape must be at least 1".into()));
    }
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Domain(format!("Erlang scale {w} must be positive")));
    }
    let exp = Exp::new(1.0 / w).map_err(|e| Error::Domain(e.to_string()))?;
    Ok((0..l).map(|_| exp.sample(rng)).sum())
}

/// Smallest cut whose dropped first moment stays below `fraction · M₁`.
pub fn default_small_jump_cut(kernel: &KernelParams, fraction: f64) -> Result<f64> {
    let target = fraction * kernel.m1();
    let (mut lo, mut hi) = (1e-300f64.ln(), (TAIL_DECAY_LENGTHS / kernel.b).ln());
    if kernel.small_jump_first_moment(hi.exp())? < target {
        return Ok(hi.exp());
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kernel.small_jump_first_moment(mid.exp())? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(lo.exp())
}

/// Inverse-CDF sampler of the kernel restricted to `z ≥ ε_z`.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    cut: f64,
    /// Total jump frequency `∫_{ε_z}^∞ ν(dz)` per unit `(Q + A)`.
    total_rate: f64,
    log_nodes: Vec<f64>,
    cdf: Vec<f64>,
}

impl JumpSampler {
    pub fn new(kernel: &KernelParams, cut: f64) -> Result<Self> {
        if !(cut > 0.0 && cut.is_finite()) {
            return Err(Error::Domain(format!("jump cut {cut} must be positive")));
        }
        let upper = cut + TAIL_DECAY_LENGTHS / kernel.b;
        let (ul, uh) = (cut.ln(), upper.ln());
        let n = JUMP_TABLE_NODES;
        let log_nodes: Vec<f64> = (0..n).map(|k| ul + (uh - ul) * k as f64 / (n - 1) as f64).collect();
        let mass = |u: f64| {
            let z = u.exp();
            kernel.density_unchecked(z) * z
        };
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        for w in log_nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let piece = (b - a) / 6.0 * (mass(a) + 4.0 * mass(0.5 * (a + b)) + mass(b));
            cdf.push(cdf.last().copied().unwrap_or(0.0) + piece);
        }
        let total_rate = *cdf.last().unwrap_or(&0.0);
        let reference = kernel.tail_mass(cut)?;
        if !(total_rate > 0.0) || ((total_rate - reference) / reference).abs() > 1e-6 {
            return Err(Error::Numeric(format!(
                "jump table mass {total_rate} disagrees with the kernel tail mass {reference}"
            )));
        }
        cdf.iter_mut().for_each(|c| *c /= total_rate);
        Ok(Self { cut, total_rate, log_nodes, cdf })
    }

    pub fn cut(&self) -> f64 {
        self.cut
    }

    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    /// Draws one jump size by table inversion, log-linear within a cell.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        (self.log_nodes[k - 1] + t * (self.log_nodes[k] - self.log_nodes[k - 1])).exp()
    }
}

/// Streamflow state advanced exactly between jumps, with jumps by thinning.
#[derive(Debug, Clone)]
pub struct DischargeProcess {
    sampler: JumpSampler,
    a_shift: f64,
    /// Relaxation rate including the small-jump compensation.
    decay: f64,
    /// Relaxation target.
    level: f64,
    q: f64,
    t: f64,
    bound: f64,
    next_candidate: f64,
    jumps: usize,
}

impl DischargeProcess {
    pub fn new<R: Rng + ?Sized>(model: &GcbiModel, config: &PathConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let cut = match config.small_jump_cut {
            Some(eps) if eps > 0.0 => eps,
            Some(_) => return Err(Error::Domain("a zero small-jump cut gives infinite jump activity".into())),
            None => default_small_jump_cut(&model.kernel, DEFAULT_DROPPED_FRACTION)?,
        };
        let sampler = JumpSampler::new(&model.kernel, cut)?;
        let m_small = if config.compensate_small_jumps { model.kernel.small_jump_first_moment(cut)? } else { 0.0 };
        let decay = model.rho - m_small;
        if !(decay > 0.0) {
            return Err(Error::InfeasibleModel { rho: model.rho, m1: m_small });
        }
        let level = (model.rho * model.q_min + m_small * model.a_shift) / decay;
        let mut process = Self {
            sampler,
            a_shift: model.a_shift,
            decay,
            level,
            q: config.q0,
            t: 0.0,
            bound: 0.0,
            next_candidate: 0.0,
            jumps: 0,
        };
        process.refresh_bound(rng);
        Ok(process)
    }

    pub fn discharge(&self) -> f64 {
        self.q
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn jump_count(&self) -> usize {
        self.jumps
    }

    pub fn sampler(&self) -> &JumpSampler {
        &self.sampler
    }

    fn relax(&mut self, to: f64) {
        self.q = self.level + (self.q - self.level) * (-self.decay * (to - self.t)).exp();
        self.t = to;
    }

    /// Intensity bound valid until the next accepted jump (relaxation is monotone).
    fn refresh_bound<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.bound = self.q.max(self.level) + self.a_shift;
        self.draw_candidate(rng);
    }

    fn draw_candidate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let rate = self.bound * self.sampler.total_rate;
        self.next_candidate = if rate > 0.0 {
            let e: f64 = Exp1.sample(rng);
            self.t + e / rate
        } else {
            f64::INFINITY
        };
    }

    /// Advances to time `to`, calling `on_jump(t, z)` for each accepted jump.
    pub fn advance_to<R: Rng + ?Sized>(&mut self, to: f64, rng: &mut R, mut on_jump: impl FnMut(f64, f64)) {
        while self.next_candidate <= to {
            self.relax(self.next_candidate);
            let accept = (self.q + self.a_shift) / self.bound;
            debug_assert!(accept <= 1.0 + 1e-12);
            if rng.random::<f64>() < accept {
                let z = self.sampler.sample(rng);
                self.q += z;
                self.jumps += 1;
                on_jump(self.t, z);
                self.refresh_bound(rng);
            } else {
                self.draw_candidate(rng);
            }
        }
        self.relax(to);
    }
}

/// Discharge sampled on a regular time grid, with the accepted jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct DischargePath {
    pub dt: f64,
    /// `Q(k dt)` for `k = 0..=⌊T/dt⌋`.
    pub values: Vec<f64>,
    /// Accepted jumps `(t, z)`.
    pub jumps: Vec<(f64, f64)>,
}

/// Samples a streamflow path on `[0, T]`.
pub fn sample_path<R: Rng + ?Sized>(model: &GcbiModel, config: &PathConfig, rng: &mut R) -> Result<DischargePath> {
    let mut process = DischargeProcess::new(model, config, rng)?;
    let steps = (config.horizon / config.dt).floor() as usize;
    let mut values = Vec::with_capacity(steps + 1);
    let mut jumps = Vec::new();
    values.push(process.discharge());
    for k in 1..=steps {
        process.advance_to(k as f64 * config.dt, rng, |t, z| jumps.push((t, z)));
        values.push(process.discharge());
    }
    Ok(DischargePath { dt: config.dt, values, jumps })
}

/// Cost totals of one managed run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostAccumulator {
    /// Integrated depletion penalty.
    pub j1: f64,
    /// Observation and replenishment costs.
    pub j2: f64,
    pub observations: usize,
    /// Accounted time (h).
    pub time: f64,
}

impl CostAccumulator {
    /// Long-run average cost `(J₁ + J₂)/T`.
    pub fn average_cost(&self) -> f64 {
        if self.time > 0.0 {
            (self.j1 + self.j2) / self.time
        } else {
            0.0
        }
    }

    pub fn merge(&mut self, other: &CostAccumulator) {
        self.j1 += other.j1;
        self.j2 += other.j2;
        self.observations += other.observations;
        self.time += other.time;
    }
}

fn nearest(x: f64, step: f64, n: usize) -> usize {
    ((x / step).round().max(0.0) as usize).min(n)
}

/// Simulates the storage under a grid policy: at each observation the state is
/// snapped to the nearest vertex, `o + C(η*)` is paid, storage is refilled and
/// the next waiting time is Erlang(`L*`).
pub fn simulate_managed<R: Rng + ?Sized>(
    problem: &ProblemSpec,
    policy: &Policy,
    config: &PathConfig,
    rng: &mut R,
) -> Result<CostAccumulator> {
    problem.costs.validate()?;
    let grid = policy.grid;
    if config.s0 > grid.s_bar {
        return Err(Error::Usage(format!("initial storage {} exceeds the policy capacity {}", config.s0, grid.s_bar)));
    }
    let coef: TransportCoefficient = problem.physics.transport_coefficient(grid.q_bar)?;
    let w = problem.costs.w_hours();
    let penalty = problem.costs.penalty;
    let mut process = DischargeProcess::new(&problem.model, config, rng)?;
    let mut acc = CostAccumulator::default();
    let mut s = config.s0;

    let vertex = |q: f64, s: f64| (nearest(q, grid.dq(), grid.n_q), nearest(s, grid.ds(), grid.n_s));
    let (i0, j0) = vertex(process.discharge(), s);
    let mut next_obs = sample_erlang(policy.l_star(i0, j0), w, rng)?;
    let mut t = 0.0;

    while t < config.horizon {
        let t_next = (t + config.dt).min(config.horizon).min(next_obs);
        let tau = t_next - t;
        let q = process.discharge();
        let rate = coef.rate(q, s) * SECONDS_PER_HOUR;
        let counted = (t_next.min(config.horizon) - t.max(config.burn_in)).max(0.0);
        acc.j1 += penalty.value(s) * counted;
        acc.time += counted;
        s = (s - rate * tau).max(0.0);
        process.advance_to(t_next, rng, |_, _| {});
        t = t_next;

        if t >= next_obs && t < config.horizon {
            let (i, j) = vertex(process.discharge(), s);
            let eta = policy.eta_star(i, j);
            if t >= config.burn_in {
                acc.j2 += problem.costs.o + problem.costs.replenishment_cost(eta, grid.s_bar);
                acc.observations += 1;
            }
            s = (s + eta).min(grid.s_bar);
            next_obs = t + sample_erlang(policy.l_star(i, j), w, rng)?;
        }
    }
    Ok(acc)
}

/// One replication of the ergodic-cost estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub replication: usize,
    pub accumulator: CostAccumulator,
}

/// Mean long-run average cost across replications with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replications: Vec<ReplicationResult>,
}

/// RNG for replication `k`: the configured seed with stream `k`.
pub fn replication_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Runs independent replications in parallel and averages their costs after burn-in.
pub fn estimate_hamiltonian(
    problem: &ProblemSpec,
    policy: &Policy,
    config: &PathConfig,
    replications: usize,
) -> Result<HamiltonianEstimate> {
    if replications < 2 {
        return Err(Error::Usage(format!("need at least 2 replications, got {replications}")));
    }
    let results: Vec<ReplicationResult> = (0..replications)
        .into_par_iter()
        .map(|k| {
            let mut rng = replication_rng(config.seed, k);
            simulate_managed(problem, policy, config, &mut rng).map(|accumulator| ReplicationResult { replication: k, accumulator })
        })
        .collect::<Result<_>>()?;
    let n = results.len() as f64;
    let avgs: Vec<f64> = results.iter().map(|r| r.accumulator.average_cost()).collect();
    let mean = avgs.iter().sum::<f64>() / n;
    let var = avgs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(HamiltonianEstimate { mean, std_error: (var / n).sqrt(), replications: results })
}

/// Writes `replication, T, J1, J2, observations, average_cost` rows.
pub fn write_replications_csv<W: Write>(results: &[ReplicationResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(["replication", "T", "J1", "J2", "observations", "average_cost"]).map_err(err)?;
    for r in results {
        let a = r.accumulator;
        w.write_record([
            r.replication.to_string(),
            a.time.to_string(),
            a.j1.to_string(),
            a.j2.to_string(),
            a.observations.to_string(),
            a.average_cost().to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> GcbiModel {
        GcbiModel::from_scaled(3.49e-3, 8.33e-3, 0.201, 0.03444, 1.0, 16.5).unwrap()
    }

    #[test]
    fn no_jumps_relaxes_exactly() {
        let m = GcbiModel::new(0.033, 1.0, 0.0, KernelParams::new(1e-300, 1.0, 0.5).unwrap()).unwrap();
        let cfg = PathConfig { q0: 10.0, horizon: 50.0, small_jump_cut: Some(1.0), ..Default::default() };
        let path = sample_path(&m, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(path.jumps.is_empty());
        for (k, q) in path.values.iter().enumerate() {
            let exact = 1.0 + 9.0 * (-0.033 * k as f64).exp();
            assert!((q - exact).abs() < 1e-12, "k = {k}: {q} vs {exact}");
        }
    }

    #[test]
    fn default_cut_drops_small_fraction() {
        let k = model().kernel;
        let eps = default_small_jump_cut(&k, 1e-3).unwrap();
        let dropped = k.small_jump_first_moment(eps).unwrap();
        assert!(dropped < 1e-3 * k.m1() && dropped > 0.99e-3 * k.m1());
    }

    #[test]
    fn jump_sampler_stays_in_support() {
        let s = JumpSampler::new(&model().kernel, 0.02).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let z = s.sample(&mut rng);
            assert!(z >= 0.02 && z.is_finite());
        }
    }

    #[test]
    fn erlang_rejects_bad_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_erlang(0, 1.0, &mut rng).is_err());
        assert!(sample_erlang(1, 0.0, &mut rng).is_err());
    }

    #[test]
    fn replication_streams_differ() {
        let a: u64 = replication_rng(5, 0).random();
        let b: u64 = replication_rng(5, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, replication_rng(5, 0).random::<u64>());
    }
}
