//! Sediment management problem in physical units and its assembly into a scheme.
//!
//! The solver works in hours: streamflow rates are per hour, transport is in
//! m³/h, the Erlang scale is converted from days, and `h` is a cost per hour.

use serde::{Deserialize, Serialize};

use crate::discretization::{Grid, Penalty, Scheme, SchemeSpec, Switching};
use crate::error::{Error, Result};
use crate::gcbi::GcbiModel;
use crate::kernel::gamma;
use crate::sediment::{SedimentPhysics, TransportCoefficient};

pub const SECONDS_PER_HOUR: f64 = 3600.0;
pub const HOURS_PER_DAY: f64 = 24.0;

/// Costs, aversion and observation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    /// Fixed replenishment cost.
    pub c0: f64,
    /// Proportional replenishment cost per unit of normalized storage `η / S̄`.
    pub c1: f64,
    /// Observation cost.
    pub o: f64,
    /// Uncertainty aversion.
    pub psi: f64,
    /// Erlang phase scale (days).
    pub w_days: f64,
    pub penalty: Penalty,
}

impl Default for CostSpec {
    /// Demonstration economics: `c0 = 20`, `c1 = 60`, `o = 20`, `ψ = 1e-4`, `W = 2` days.
    fn default() -> Self {
        Self { c0: 20.0, c1: 60.0, o: 20.0, psi: 1e-4, w_days: 2.0, penalty: Penalty::Indicator }
    }
}

impl CostSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c1 > 0.0 && self.o > 0.0) {
            return Err(Error::Domain(format!(
                "costs c0 = {}, c1 = {}, o = {} must be positive",
                self.c0, self.c1, self.o
            )));
        }
        if !(self.psi >= 0.0 && self.psi.is_finite()) {
            return Err(Error::Domain(format!("psi = {} must be non-negative", self.psi)));
        }
        if !(self.w_days > 0.0) {
            return Err(Error::Domain(format!("W = {} days must be positive", self.w_days)));
        }
        if let Penalty::Regularized { kappa } = self.penalty {
            if !(kappa > 0.0) {
                return Err(Error::Domain(format!("penalty width kappa = {kappa} must be positive")));
            }
        }
        Ok(())
    }

    pub fn w_hours(&self) -> f64 {
        self.w_days * HOURS_PER_DAY
    }

    /// Replenishment cost `c1 η / S̄ + c0` for `η > 0` m³, zero otherwise.
    pub fn replenishment_cost(&self, eta: f64, s_bar: f64) -> f64 {
        if eta > 0.0 {
            self.c0 + self.c1 * eta / s_bar
        } else {
            0.0
        }
    }
}

/// Complete control problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub model: GcbiModel,
    pub physics: SedimentPhysics,
    pub costs: CostSpec,
}

/// Identified streamflow model: `α = 0.201`, `a′ = 3.49e-3`, `b = 8.33e-3`,
/// `A = 16.5`, `Q̲ = 1`, with `ρ` recovered from the fitted decay `0.028/h`.
pub fn identified_model() -> Result<GcbiModel> {
    let (alpha, a_prime, b): (f64, f64, f64) = (0.201, 3.49e-3, 8.33e-3);
    let ratio = a_prime * b.powf(alpha - 1.0) * gamma(1.0 - alpha);
    GcbiModel::from_scaled(a_prime, b, alpha, IDENTIFIED_DECAY / (1.0 - ratio), 1.0, 16.5)
}

/// Fitted autocorrelation decay `ρ - M₁` (1/h).
pub const IDENTIFIED_DECAY: f64 = 0.028;

/// Demonstration domain: `Q̄ = 200` m³/s, `S̄ = 400` m³, `L̄ = 10`.
pub const DEMO_Q_BAR: f64 = 200.0;
pub const DEMO_S_BAR: f64 = 400.0;
pub const DEMO_L_BAR: usize = 10;

impl ProblemSpec {
    /// Identified model, default sediment physics and demonstration economics.
    pub fn demonstration() -> Result<Self> {
        Ok(Self { model: identified_model()?, physics: SedimentPhysics::default(), costs: CostSpec::default() })
    }

    pub fn transport_coefficient(&self, grid: &Grid) -> Result<TransportCoefficient> {
        self.physics.transport_coefficient(grid.q_bar)
    }

    /// Transport rate in m³/h at `(q, s)`.
    pub fn transport_rate_hourly(&self, coef: &TransportCoefficient, q: f64, s: f64) -> f64 {
        coef.rate(q, s) * SECONDS_PER_HOUR
    }

    pub fn scheme(&self, grid: Grid) -> Result<Scheme> {
        self.costs.validate()?;
        let coef = self.transport_coefficient(&grid)?;
        let transport = (0..=grid.n_q)
            .map(|i| self.transport_rate_hourly(&coef, grid.q(i), 1.0))
            .collect();
        let source = (0..=grid.n_s)
            .flat_map(|j| (0..=grid.n_q).map(move |_| j))
            .map(|j| self.costs.penalty.value(grid.s(j)))
            .collect();
        Scheme::new(SchemeSpec {
            grid,
            model: self.model,
            transport,
            psi: self.costs.psi,
            switching: Some(Switching {
                w: self.costs.w_hours(),
                o: self.costs.o,
                c0: self.costs.c0,
                c1_step: self.costs.c1 * grid.ds() / grid.s_bar,
            }),
            source,
            upwind_top: true,
        })
    }
}
