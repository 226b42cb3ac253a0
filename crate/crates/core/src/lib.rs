//! Master-planning toolkit for container vessels.
//!
//! The crate bundles everything needed to study block-level stowage
//! master planning end to end:
//!
//! * [`data`] — vessels, container types, transports and instances,
//!   with a documented JSON schema;
//! * [`generator`] — a deterministic benchmark-instance generator and
//!   the canonical 162-instance grid;
//! * [`linmodel`] — a solver-agnostic sparse LP/MIP container with MPS
//!   and LP-format writers and readers;
//! * [`solver`] — a bounded-variable revised simplex engine plus
//!   branch-and-bound, with time limits and gap reporting;
//! * [`assignment`] and [`netflow`] — the two master-planning MIP
//!   formulations this toolkit compares;
//! * [`validate`] — an independent solution checker that recomputes
//!   every constraint family directly from a plan;
//! * [`bench`] — the experiment harness and result tables.

pub mod assignment;
pub mod bench;
pub mod data;
pub mod generator;
pub mod linmodel;
pub mod netflow;
pub mod solver;
pub mod validate;

pub use data::{Instance, PlanAssignment, SizeClass, VesselProfile};
pub use solver::{SolveConfig, SolveResult, SolveStatus};
