//! Pass-through mode: export a model as MPS, run any external solver
//! command on it, and read a simple solution file back.
//!
//! Solution file format, one entry per line:
//!
//! ```text
//! status optimal
//! objective -42.5
//! x0 1
//! x1 0.25
//! ```
//!
//! Variables not listed default to zero. Returned solutions are
//! re-checked against the model before being accepted.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use super::{SolveError, SolveResult, SolveStatus};
use crate::linmodel::{write_mps, LinearModel};

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

const EXTERNAL_FEAS_TOL: f64 = 1e-4;

pub fn parse_solution_file(text: &str, model: &LinearModel) -> Result<SolveResult, SolveError> {
    let mut status: Option<SolveStatus> = None;
    let mut objective: Option<f64> = None;
    let mut x = vec![0.0; model.num_vars()];
    let name_to_idx: std::collections::HashMap<&str, usize> = model
        .vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();

    for (lno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let key = it.next().unwrap();
        let val = it.next().ok_or_else(|| {
            SolveError::External(format!("solution line {} has no value", lno + 1))
        })?;
        match key {
            "status" => {
                status = Some(match val.to_ascii_lowercase().as_str() {
                    "optimal" => SolveStatus::Optimal,
                    "feasible" => SolveStatus::Feasible,
                    "infeasible" => SolveStatus::Infeasible,
                    "unbounded" => SolveStatus::Unbounded,
                    "time_limit" | "timelimit" => SolveStatus::TimeLimit,
                    other => {
                        return Err(SolveError::External(format!(
                            "unknown solver status `{other}`"
                        )))
                    }
                });
            }
            "objective" => {
                objective = Some(val.parse::<f64>().map_err(|_| {
                    SolveError::External(format!("bad objective value `{val}`"))
                })?);
            }
            name => {
                let &idx = name_to_idx.get(name).ok_or_else(|| {
                    SolveError::External(format!("solution references unknown variable `{name}`"))
                })?;
                x[idx] = val
                    .parse::<f64>()
                    .map_err(|_| SolveError::External(format!("bad value for `{name}`")))?;
            }
        }
    }

    let status = status.ok_or_else(|| SolveError::External("missing status line".into()))?;
    let has_solution = matches!(
        status,
        SolveStatus::Optimal | SolveStatus::Feasible | SolveStatus::TimeLimit
    );
    if has_solution {
        let viol = model.max_violation(&x);
        if viol > EXTERNAL_FEAS_TOL {
            return Err(SolveError::External(format!(
                "external solution violates the model by {viol:.3e}"
            )));
        }
        let obj = objective.unwrap_or_else(|| model.objective_value(&x));
        Ok(SolveResult {
            status,
            objective: Some(obj),
            best_bound: if status == SolveStatus::Optimal {
                obj
            } else {
                f64::NEG_INFINITY
            },
            mip_gap: (status == SolveStatus::Optimal).then_some(0.0),
            wall_time_s: 0.0,
            solution: Some(x),
            node_count: 0,
            simplex_iterations: 0,
        })
    } else {
        Ok(SolveResult::status_only(status, 0.0))
    }
}

/// Runs `program args...` after substituting `{mps}` and `{sol}`
/// placeholders with fresh temp-file paths, then parses the solution
/// file (or stdout when no `{sol}` placeholder is used).
pub fn solve_with_command(
    model: &LinearModel,
    program: &str,
    args: &[String],
) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let stamp = format!(
        "mpplan-{}-{}",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    );
    let mps_path: PathBuf = std::env::temp_dir().join(format!("{stamp}.mps"));
    let sol_path: PathBuf = std::env::temp_dir().join(format!("{stamp}.sol"));
    {
        let mut f = std::fs::File::create(&mps_path)?;
        f.write_all(write_mps(model).as_bytes())?;
    }
    let uses_sol_file = args.iter().any(|a| a.contains("{sol}"));
    let argv: Vec<String> = args
        .iter()
        .map(|a| {
            a.replace("{mps}", &mps_path.to_string_lossy())
                .replace("{sol}", &sol_path.to_string_lossy())
        })
        .collect();
    let output = Command::new(program).args(&argv).output().map_err(|e| {
        SolveError::External(format!("failed to run `{program}`: {e}"))
    })?;
    if !output.status.success() {
        let _ = std::fs::remove_file(&mps_path);
        let _ = std::fs::remove_file(&sol_path);
        return Err(SolveError::External(format!(
            "`{program}` exited with {}",
            output.status
        )));
    }
    let text = if uses_sol_file {
        std::fs::read_to_string(&sol_path)?
    } else {
        String::from_utf8_lossy(&output.stdout).into_owned()
    };
    let _ = std::fs::remove_file(&mps_path);
    let _ = std::fs::remove_file(&sol_path);
    let mut result = parse_solution_file(&text, model)?;
    result.wall_time_s = start.elapsed().as_secs_f64();
    Ok(result)
}
