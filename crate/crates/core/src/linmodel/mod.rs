//! Solver-agnostic container for sparse linear and mixed-integer models.
//!
//! A [`LinearModel`] is built once through the `add_var` /
//! `add_constraint` / `set_objective` builder calls and is immutable
//! afterwards as far as this crate is concerned. Row senses are stored
//! as written (`<=`, `=`, `>=`) rather than being normalised, so text
//! exports stay auditable against the formulations that produced them.

mod lp_format;
mod mps;

pub use lp_format::{parse_lp, write_lp};
pub use mps::{parse_mps, write_mps};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub usize);

impl VarId {
    pub fn idx(self) -> usize {
        self.0
    }
}

impl RowId {
    pub fn idx(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Eq => write!(f, "="),
            Sense::Ge => write!(f, ">="),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    /// Sorted by variable id, one entry per variable.
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("non-finite coefficient or bound in {context}")]
    NonFinite { context: String },
    #[error("variable bounds inverted: lower {lower} > upper {upper} for `{name}`")]
    BadBounds { name: String, lower: f64, upper: f64 },
    #[error("unknown variable id {0:?}")]
    UnknownVar(VarId),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Sparse minimisation model: variables with bounds and kinds, rows
/// with explicit senses, and a linear objective.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearModel {
    pub name: String,
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    /// Sparse objective, sorted by variable id. Minimisation only.
    pub objective: Vec<(VarId, f64)>,
}

impl LinearModel {
    pub fn new(name: impl Into<String>) -> LinearModel {
        LinearModel {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Adds a variable. An empty name is replaced by `x<index>`.
    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<VarId, ModelError> {
        let mut name = name.into();
        if name.is_empty() {
            name = format!("x{}", self.vars.len());
        }
        if lower.is_nan() || upper.is_nan() {
            return Err(ModelError::NonFinite {
                context: format!("bounds of `{name}`"),
            });
        }
        if lower > upper {
            return Err(ModelError::BadBounds { name, lower, upper });
        }
        let id = VarId(self.vars.len());
        self.vars.push(Variable {
            name,
            lower,
            upper,
            kind,
        });
        Ok(id)
    }

    /// Adds a row; duplicate variable entries are merged.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<RowId, ModelError> {
        let mut name = name.into();
        if name.is_empty() {
            name = format!("c{}", self.rows.len());
        }
        let coeffs = self.merge_coeffs(coeffs, &name)?;
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite {
                context: format!("rhs of `{name}`"),
            });
        }
        let id = RowId(self.rows.len());
        self.rows.push(Row {
            name,
            coeffs,
            sense,
            rhs,
        });
        Ok(id)
    }

    pub fn set_objective(
        &mut self,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
    ) -> Result<(), ModelError> {
        self.objective = self.merge_coeffs(coeffs, "objective")?;
        Ok(())
    }

    fn merge_coeffs(
        &self,
        coeffs: impl IntoIterator<Item = (VarId, f64)>,
        context: &str,
    ) -> Result<Vec<(VarId, f64)>, ModelError> {
        let mut v: Vec<(VarId, f64)> = Vec::new();
        for (var, c) in coeffs {
            if var.idx() >= self.vars.len() {
                return Err(ModelError::UnknownVar(var));
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite {
                    context: context.to_string(),
                });
            }
            v.push((var, c));
        }
        v.sort_by_key(|&(var, _)| var);
        v.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1;
                true
            } else {
                false
            }
        });
        v.retain(|&(_, c)| c != 0.0);
        Ok(v)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn num_integer_vars(&self) -> usize {
        self.vars
            .iter()
            .filter(|v| v.kind != VarKind::Continuous)
            .count()
    }

    pub fn is_pure_lp(&self) -> bool {
        self.num_integer_vars() == 0
    }

    /// The continuous relaxation: integrality dropped, bounds kept.
    /// Idempotent; structure is otherwise identical.
    pub fn relax(&self) -> LinearModel {
        let mut m = self.clone();
        for v in &mut m.vars {
            v.kind = VarKind::Continuous;
        }
        m
    }

    /// Equality keyed on names rather than indices: same variable set
    /// (bounds, kind), same rows (sense, rhs, coefficients) and same
    /// objective, regardless of declaration order. This is the identity
    /// a text format can faithfully preserve.
    pub fn structurally_equal(&self, other: &LinearModel) -> bool {
        use std::collections::BTreeMap;
        if self.vars.len() != other.vars.len() || self.rows.len() != other.rows.len() {
            return false;
        }
        let vars_a: BTreeMap<&str, &Variable> =
            self.vars.iter().map(|v| (v.name.as_str(), v)).collect();
        let vars_b: BTreeMap<&str, &Variable> =
            other.vars.iter().map(|v| (v.name.as_str(), v)).collect();
        if vars_a.len() != self.vars.len() || vars_b.len() != other.vars.len() {
            return false; // duplicate names, identity undefined
        }
        for (name, va) in &vars_a {
            match vars_b.get(name) {
                Some(vb) => {
                    if va.lower != vb.lower || va.upper != vb.upper || va.kind != vb.kind {
                        return false;
                    }
                }
                None => return false,
            }
        }
        let named = |m: &LinearModel, coeffs: &[(VarId, f64)]| -> BTreeMap<String, f64> {
            coeffs
                .iter()
                .map(|&(v, c)| (m.vars[v.idx()].name.clone(), c))
                .collect()
        };
        let rows_a: BTreeMap<&str, &Row> = self.rows.iter().map(|r| (r.name.as_str(), r)).collect();
        let rows_b: BTreeMap<&str, &Row> =
            other.rows.iter().map(|r| (r.name.as_str(), r)).collect();
        if rows_a.len() != self.rows.len() || rows_b.len() != other.rows.len() {
            return false;
        }
        for (name, ra) in &rows_a {
            match rows_b.get(name) {
                Some(rb) => {
                    if ra.sense != rb.sense
                        || ra.rhs != rb.rhs
                        || named(self, &ra.coeffs) != named(other, &rb.coeffs)
                    {
                        return false;
                    }
                }
                None => return false,
            }
        }
        named(self, &self.objective) == named(other, &other.objective)
    }

    /// Objective value of a full solution vector.
    pub fn objective_value(&self, solution: &[f64]) -> f64 {
        self.objective
            .iter()
            .map(|&(v, c)| c * solution[v.idx()])
            .sum()
    }

    /// Largest violation of any row or bound by `solution`.
    pub fn max_violation(&self, solution: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, x) in self.vars.iter().zip(solution) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(v, c)| c * solution[v.idx()]).sum();
            let viol = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}
