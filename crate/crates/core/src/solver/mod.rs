//! Built-in LP and MIP engine: bounded-variable revised simplex plus
//! best-bound branch-and-bound.

mod branch;
pub mod external;
mod lu;
mod simplex;

pub use branch::{solve_mip, solve_mip_with, PrimalHeuristic};
pub use simplex::solve_lp;

use std::time::Duration;

use thiserror::Error;

use crate::linmodel::LinearModel;

/// Node selection strategy for branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeSelection {
    #[default]
    BestBound,
}

/// Branching variable selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    #[default]
    MostFractional,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Wall-clock budget in seconds.
    pub time_limit_s: f64,
    pub feasibility_tol: f64,
    pub integrality_tol: f64,
    /// Relative MIP gap at which a solve counts as optimal.
    pub gap_tol: f64,
    pub node_selection: NodeSelection,
    pub branching: Branching,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            time_limit_s: 3600.0,
            feasibility_tol: 1e-6,
            integrality_tol: 1e-6,
            gap_tol: 1e-6,
            node_selection: NodeSelection::BestBound,
            branching: Branching::MostFractional,
        }
    }
}

impl SolveConfig {
    pub fn with_time_limit(secs: f64) -> SolveConfig {
        SolveConfig {
            time_limit_s: secs,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let tol_ok = self.feasibility_tol > 0.0 && self.integrality_tol > 0.0 && self.gap_tol > 0.0;
        if !tol_ok {
            return Err(SolveError::BadConfig(
                "tolerances must be strictly positive".into(),
            ));
        }
        if self.time_limit_s.is_nan() || self.time_limit_s <= 0.0 {
            return Err(SolveError::BadConfig("time limit must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn time_limit(&self) -> Duration {
        Duration::from_secs_f64(self.time_limit_s.min(1e9))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Proven optimal within the gap tolerance.
    Optimal,
    /// A feasible solution exists but optimality was not proven.
    Feasible,
    Infeasible,
    Unbounded,
    /// Budget exhausted with an incumbent available.
    TimeLimit,
    /// Budget exhausted with no feasible solution found.
    NoSolution,
    /// The engine detected numerical breakdown and refuses to guess.
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::NoSolution => "no_solution",
            SolveStatus::NumericalFailure => "numerical_failure",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective of the returned solution, if any.
    pub objective: Option<f64>,
    /// Best proven lower bound (minimisation).
    pub best_bound: f64,
    /// Relative gap (objective - bound) / max(1, |objective|).
    pub mip_gap: Option<f64>,
    pub wall_time_s: f64,
    /// Full variable vector in model order, if a solution exists.
    pub solution: Option<Vec<f64>>,
    pub node_count: u64,
    pub simplex_iterations: u64,
}

impl SolveResult {
    pub(crate) fn status_only(status: SolveStatus, wall_time_s: f64) -> SolveResult {
        let best_bound = match status {
            SolveStatus::Infeasible => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        };
        SolveResult {
            status,
            objective: None,
            best_bound,
            mip_gap: None,
            wall_time_s,
            solution: None,
            node_count: 0,
            simplex_iterations: 0,
        }
    }

    pub fn has_solution(&self) -> bool {
        self.solution.is_some()
    }
}

pub(crate) fn relative_gap(objective: f64, bound: f64) -> f64 {
    (objective - bound) / f64::max(1.0, objective.abs())
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("model has integer variables; use solve_mip")]
    IntegerVarsInLp,
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("external solver: {0}")]
    External(String),
    #[error("model error: {0}")]
    Model(#[from] crate::linmodel::ModelError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience dispatch: LP when the model is continuous, otherwise MIP.
pub fn solve_auto(model: &LinearModel, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    if model.is_pure_lp() {
        solve_lp(model, cfg)
    } else {
        solve_mip(model, cfg)
    }
}
