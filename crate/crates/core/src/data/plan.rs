use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::Transport;
use super::{BlockId, DataError, PortIndex, TypeId};
use crate::linmodel::VarId;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("variable `{name}` = {value} is fractional beyond tolerance")]
    Fractional { name: String, value: f64 },
    #[error("variable `{name}` = {value} is negative")]
    Negative { name: String, value: f64 },
}

/// Rounds a map of count variables into a plan. Fails when any count
/// strays from an integer by more than `tol` (solve the MIP, not the
/// relaxation, before extracting).
pub(crate) fn plan_from_solution(
    x: &BTreeMap<(TypeId, Transport, BlockId), VarId>,
    solution: &[f64],
    tol: f64,
) -> Result<PlanAssignment, ExtractError> {
    let mut plan = PlanAssignment::default();
    for (&(ty, t, l), &var) in x {
        let v = solution[var.idx()];
        let rounded = v.round();
        if (v - rounded).abs() > tol {
            return Err(ExtractError::Fractional {
                name: format!("x[{ty},{t},{l}]"),
                value: v,
            });
        }
        if rounded < 0.0 {
            return Err(ExtractError::Negative {
                name: format!("x[{ty},{t},{l}]"),
                value: v,
            });
        }
        plan.add(ty, t, l, rounded as u32);
    }
    Ok(plan)
}

/// A master plan: how many containers of each type, per transport, sit
/// in each block. This is the solution object every solver path
/// produces and the validator consumes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanAssignment {
    pub x: BTreeMap<(TypeId, Transport, BlockId), u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanEntry {
    #[serde(rename = "type")]
    type_id: u32,
    origin: u32,
    destination: u32,
    block: u32,
    count: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    assignments: Vec<PlanEntry>,
}

impl PlanAssignment {
    pub fn count(&self, ty: TypeId, t: Transport, l: BlockId) -> u32 {
        self.x.get(&(ty, t, l)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, ty: TypeId, t: Transport, l: BlockId, count: u32) {
        if count > 0 {
            *self.x.entry((ty, t, l)).or_insert(0) += count;
        }
    }

    pub fn total_containers(&self) -> u64 {
        self.x.values().map(|&c| c as u64).sum()
    }

    pub fn to_json(&self) -> Result<String, DataError> {
        let file = PlanFile {
            assignments: self
                .x
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(&(ty, t, l), &count)| PlanEntry {
                    type_id: ty.0,
                    origin: t.origin.0,
                    destination: t.destination.0,
                    block: l.0,
                    count,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<PlanAssignment, DataError> {
        let file: PlanFile = serde_json::from_str(text)?;
        let mut plan = PlanAssignment::default();
        for e in file.assignments {
            let key = (
                TypeId(e.type_id),
                Transport {
                    origin: PortIndex(e.origin),
                    destination: PortIndex(e.destination),
                },
                BlockId(e.block),
            );
            *plan.x.entry(key).or_insert(0) += e.count;
        }
        Ok(plan)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<PlanAssignment, DataError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
