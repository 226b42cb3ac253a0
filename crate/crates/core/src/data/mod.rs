//! Domain model: vessel geometry, cargo types, transports and instances.
//!
//! Everything here is immutable after construction and safe to share
//! across threads read-only. Construction goes through validating
//! builders ([`VesselProfile::new`], [`Instance::new`]) so the rest of
//! the crate can rely on the documented invariants.

mod instance;
mod plan;
mod vessel;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use instance::{ContainerType, Demand, Instance, InstanceFile, LoadlistEntry, ReleaseEntry, Transport};
pub use plan::{ExtractError, PlanAssignment};
pub(crate) use plan::plan_from_solution;
pub use vessel::{Bay, BaySpec, Block, BlockSpec, HatchCoverSpec, VesselProfile, VesselSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense 0-based identifier of a block (sub-section of a bay).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockId(pub u32);

/// Dense 0-based identifier of a bay, ordered bow to stern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BayId(pub u32);

/// 0-based port index along the voyage rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PortIndex(pub u32);

/// Dense 0-based identifier of a container type.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TypeId(pub u32);

impl BlockId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl BayId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl PortIndex {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl TypeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for BlockId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for BayId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for PortIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for TypeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether a block sits on deck (above the hatch covers) or below deck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeckPosition {
    OnDeck,
    BelowDeck,
}

/// Vessel size class by nominal TEU capacity.
///
/// Small is below 2,500 TEU, medium between 2,500 and 15,000 TEU,
/// large above 15,000 TEU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    S,
    M,
    L,
}

impl SizeClass {
    pub fn from_teu_capacity(teu: u32) -> SizeClass {
        if teu < 2_500 {
            SizeClass::S
        } else if teu <= 15_000 {
            SizeClass::M
        } else {
            SizeClass::L
        }
    }
}

impl std::fmt::Display for SizeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SizeClass::S => write!(f, "S"),
            SizeClass::M => write!(f, "M"),
            SizeClass::L => write!(f, "L"),
        }
    }
}

impl std::str::FromStr for SizeClass {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" | "s" => Ok(SizeClass::S),
            "M" | "m" => Ok(SizeClass::M),
            "L" | "l" => Ok(SizeClass::L),
            other => Err(DataError::Invalid(format!(
                "unknown size class `{other}`, expected S, M or L"
            ))),
        }
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("port index {port} out of range (num_ports = {num_ports})")]
    PortOutOfRange { port: u32, num_ports: u32 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl DataError {
    pub(crate) fn invalid(msg: impl Into<String>) -> DataError {
        DataError::Invalid(msg.into())
    }
}
