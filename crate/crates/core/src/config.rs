//! JSON run configuration with unit-suffixed keys, converted to library types.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discretization::{Grid, Penalty};
use crate::error::{Error, Result};
use crate::gcbi::{CalibrationOptions, GcbiModel, ParamGuess};
use crate::problem::{identified_model, CostSpec, ProblemSpec, DEMO_L_BAR, DEMO_Q_BAR, DEMO_S_BAR};
use crate::sediment::SedimentPhysics;
use crate::simulate::PathConfig;
use crate::solver::SolverOptions;

/// Streamflow model block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamflowConfig {
    pub rho_per_hour: f64,
    pub q_min_m3s: f64,
    pub a_shift_m3s: f64,
    pub alpha: f64,
    /// Rate-free intensity `a′`; the kernel intensity is `a′ ρ`.
    pub a_prime: f64,
    pub b_per_m3s: f64,
}

impl Default for StreamflowConfig {
    fn default() -> Self {
        let m = identified_model().expect("identified model is feasible");
        Self {
            rho_per_hour: m.rho,
            q_min_m3s: m.q_min,
            a_shift_m3s: m.a_shift,
            alpha: m.kernel.alpha,
            a_prime: m.a_prime(),
            b_per_m3s: m.kernel.b,
        }
    }
}

impl StreamflowConfig {
    pub fn model(&self) -> Result<GcbiModel> {
        GcbiModel::from_scaled(
            self.a_prime,
            self.b_per_m3s,
            self.alpha,
            self.rho_per_hour,
            self.q_min_m3s,
            self.a_shift_m3s,
        )
    }
}

/// Channel and grain block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SedimentConfig {
    pub grain_diameter_m: f64,
    pub porosity: f64,
    pub manning_s_per_m13: f64,
    pub channel_width_m: f64,
    pub bed_slope: f64,
    pub threshold_shields: f64,
    pub particle_density_kg_m3: f64,
    pub water_density_kg_m3: f64,
    pub gravity_m_s2: f64,
    pub karman: f64,
    pub bed_friction: f64,
    pub momentum_coefficient: f64,
}

impl Default for SedimentConfig {
    fn default() -> Self {
        Self::from(SedimentPhysics::default())
    }
}

impl From<SedimentPhysics> for SedimentConfig {
    fn from(p: SedimentPhysics) -> Self {
        Self {
            grain_diameter_m: p.d,
            porosity: p.zeta,
            manning_s_per_m13: p.n_w,
            channel_width_m: p.b_w,
            bed_slope: p.i_w,
            threshold_shields: p.theta_t,
            particle_density_kg_m3: p.rho_p,
            water_density_kg_m3: p.rho_w,
            gravity_m_s2: p.g,
            karman: p.kappa,
            bed_friction: p.mu_b,
            momentum_coefficient: p.c_m,
        }
    }
}

impl SedimentConfig {
    pub fn physics(&self) -> Result<SedimentPhysics> {
        let p = SedimentPhysics {
            d: self.grain_diameter_m,
            zeta: self.porosity,
            n_w: self.manning_s_per_m13,
            b_w: self.channel_width_m,
            i_w: self.bed_slope,
            theta_t: self.threshold_shields,
            rho_p: self.particle_density_kg_m3,
            rho_w: self.water_density_kg_m3,
            g: self.gravity_m_s2,
            kappa: self.karman,
            mu_b: self.bed_friction,
            c_m: self.momentum_coefficient,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Depletion penalty block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyConfig {
    Indicator,
    Regularized { kappa_m3: f64 },
}

/// Economics block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    pub fixed_cost: f64,
    /// Cost per unit of normalized storage `η/S̄`.
    pub proportional_cost: f64,
    pub observation_cost: f64,
    pub psi: f64,
    pub erlang_scale_days: f64,
    pub penalty: PenaltyConfig,
}

impl Default for CostConfig {
    fn default() -> Self {
        let c = CostSpec::default();
        Self {
            fixed_cost: c.c0,
            proportional_cost: c.c1,
            observation_cost: c.o,
            psi: c.psi,
            erlang_scale_days: c.w_days,
            penalty: PenaltyConfig::Indicator,
        }
    }
}

impl CostConfig {
    pub fn costs(&self) -> Result<CostSpec> {
        let c = CostSpec {
            c0: self.fixed_cost,
            c1: self.proportional_cost,
            o: self.observation_cost,
            psi: self.psi,
            w_days: self.erlang_scale_days,
            penalty: match self.penalty {
                PenaltyConfig::Indicator => Penalty::Indicator,
                PenaltyConfig::Regularized { kappa_m3 } => Penalty::Regularized { kappa: kappa_m3 },
            },
        };
        c.validate()?;
        Ok(c)
    }
}

/// Grid block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_q: usize,
    pub n_s: usize,
    pub q_bar_m3s: f64,
    pub s_bar_m3: f64,
    pub l_bar: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_q: 80, n_s: 80, q_bar_m3s: DEMO_Q_BAR, s_bar_m3: DEMO_S_BAR, l_bar: DEMO_L_BAR }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_q, self.n_s, self.q_bar_m3s, self.s_bar_m3, self.l_bar)
    }
}

/// Solver block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub relaxation: f64,
    pub max_sweeps: usize,
    pub divergence_window: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        Self {
            tolerance: o.tolerance,
            relaxation: o.relaxation,
            max_sweeps: o.max_sweeps,
            divergence_window: o.divergence_window,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.tolerance,
            relaxation: self.relaxation,
            max_sweeps: self.max_sweeps,
            divergence_window: self.divergence_window,
        }
    }
}

/// Monte Carlo block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub dt_hours: f64,
    pub horizon_hours: f64,
    pub burn_in_hours: f64,
    /// `null` selects the default cut.
    pub small_jump_cut_m3s: Option<f64>,
    pub compensate_small_jumps: bool,
    pub seed: u64,
    pub q0_m3s: f64,
    pub s0_m3: f64,
    pub replications: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        let p = PathConfig::default();
        Self {
            dt_hours: p.dt,
            horizon_hours: p.horizon,
            burn_in_hours: 1e4,
            small_jump_cut_m3s: p.small_jump_cut,
            compensate_small_jumps: p.compensate_small_jumps,
            seed: p.seed,
            q0_m3s: p.q0,
            s0_m3: p.s0,
            replications: 20,
        }
    }
}

impl SimulationConfig {
    pub fn path(&self) -> Result<PathConfig> {
        let p = PathConfig {
            dt: self.dt_hours,
            horizon: self.horizon_hours,
            small_jump_cut: self.small_jump_cut_m3s,
            compensate_small_jumps: self.compensate_small_jumps,
            seed: self.seed,
            q0: self.q0_m3s,
            s0: self.s0_m3,
            burn_in: self.burn_in_hours,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Manufactured-solution block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub betas: Vec<f64>,
    pub q_bars_m3s: Vec<f64>,
    pub grid_sizes: Vec<usize>,
    pub s_bar_m3: f64,
    pub amplitude: f64,
    pub relaxation: f64,
    /// Keeps the upwind drift difference on the top discharge row.
    pub upwind_top: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            betas: vec![0.5, 1.0, 2.0],
            q_bars_m3s: vec![200.0, 300.0],
            grid_sizes: vec![10, 20, 40, 80, 160],
            s_bar_m3: DEMO_S_BAR,
            amplitude: 1.0,
            relaxation: 0.35,
            upwind_top: false,
        }
    }
}

/// Identification block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifyConfig {
    pub q_min_m3s: f64,
    pub acf_lags_hours: Vec<usize>,
    pub starts: usize,
    pub max_evaluations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub initial_guess: Option<ParamGuess>,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        let o = CalibrationOptions::default();
        Self {
            q_min_m3s: 1.0,
            acf_lags_hours: vec![6, 12, 24, 48],
            starts: o.starts,
            max_evaluations: o.max_evaluations,
            tolerance: o.tolerance,
            seed: o.seed,
            initial_guess: o.initial_guess,
        }
    }
}

impl IdentifyConfig {
    pub fn options(&self) -> CalibrationOptions {
        CalibrationOptions {
            starts: self.starts,
            max_evaluations: self.max_evaluations,
            tolerance: self.tolerance,
            seed: self.seed,
            initial_guess: self.initial_guess,
        }
    }
}

/// Complete run configuration; every block is optional and defaults to the
/// demonstration setting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub streamflow: StreamflowConfig,
    pub sediment: SedimentConfig,
    pub costs: CostConfig,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub simulation: SimulationConfig,
    pub verify: VerifyConfig,
    pub identify: IdentifyConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Re-validates every block against the library invariants.
    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        self.grid.grid()?;
        self.simulation.path()?;
        if self.simulation.replications < 2 {
            return Err(Error::Config("simulation.replications must be at least 2".into()));
        }
        let s = &self.solver;
        if !(s.relaxation > 0.0 && s.relaxation < 1.0) || !(s.tolerance > 0.0) {
            return Err(Error::Config("solver relaxation must lie in (0, 1) and tolerance be positive".into()));
        }
        let v = &self.verify;
        if v.betas.iter().any(|b| !(*b > 0.0)) || v.q_bars_m3s.iter().any(|q| !(*q > 0.0)) {
            return Err(Error::Config("verify betas and q_bars must be positive".into()));
        }
        if v.grid_sizes.is_empty() || v.grid_sizes.windows(2).any(|w| w[1] <= w[0]) || v.grid_sizes[0] < 2 {
            return Err(Error::Config("verify grid sizes must be increasing and at least 2".into()));
        }
        if !(v.relaxation > 0.0 && v.relaxation < 1.0) {
            return Err(Error::Config("verify relaxation must lie in (0, 1)".into()));
        }
        if !(self.identify.q_min_m3s > 0.0) || self.identify.acf_lags_hours.len() < 2 {
            return Err(Error::Config("identify needs q_min > 0 and at least two lags".into()));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        Ok(ProblemSpec {
            model: self.streamflow.model()?,
            physics: self.sediment.physics()?,
            costs: self.costs.costs()?,
        })
    }
}
