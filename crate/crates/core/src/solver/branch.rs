//! Best-bound branch-and-bound on top of the simplex engine.
//!
//! Nodes carry bound changes relative to the root, the frontier is a
//! min-heap keyed on the parent LP bound (ties by node id, so runs are
//! deterministic), and branching picks the most fractional integer
//! variable. Incumbents are re-solved with their integer variables
//! fixed so the stored solution is exactly integral and feasible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::simplex::{solve_standard_form, LpStatus, StandardForm};
use super::{relative_gap, SolveConfig, SolveError, SolveResult, SolveStatus};
use crate::linmodel::{LinearModel, VarKind};

struct Node {
    id: u64,
    bound: f64,
    /// (var index, new lower, new upper), applied over the root bounds.
    changes: Vec<(usize, f64, f64)>,
}

struct Ranked(Node);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert to pop the smallest bound,
        // oldest node first.
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

/// A primal heuristic: maps a fractional LP point to a candidate
/// point whose integer variables are integral. Candidates are never
/// trusted: the solver re-solves with the integers fixed and only
/// accepts what that LP proves feasible.
pub type PrimalHeuristic<'a> = dyn Fn(&[f64]) -> Option<Vec<f64>> + 'a;

/// Solves a mixed-integer model. Pure LPs are accepted and solved
/// directly. Deterministic for a fixed model and configuration.
pub fn solve_mip(model: &LinearModel, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    solve_mip_with(model, cfg, None)
}

/// [`solve_mip`] with an optional rounding heuristic supplied by the
/// model builder; see [`PrimalHeuristic`].
pub fn solve_mip_with(
    model: &LinearModel,
    cfg: &SolveConfig,
    heuristic: Option<&PrimalHeuristic>,
) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    let start = Instant::now();
    let deadline = start + cfg.time_limit();

    let int_vars: Vec<usize> = model
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind != VarKind::Continuous)
        .map(|(j, _)| j)
        .collect();

    let sf = StandardForm::from_model(model);
    let mut root_lower: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
    let mut root_upper: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
    // Integral bound tightening for integer variables.
    for &j in &int_vars {
        if root_lower[j].is_finite() {
            root_lower[j] = (root_lower[j] - 1e-9).ceil();
        }
        if root_upper[j].is_finite() {
            root_upper[j] = (root_upper[j] + 1e-9).floor();
        }
    }

    let mut heap: BinaryHeap<Ranked> = BinaryHeap::new();
    heap.push(Ranked(Node {
        id: 0,
        bound: f64::NEG_INFINITY,
        changes: Vec::new(),
    }));
    let mut next_id = 1u64;
    let mut node_count = 0u64;
    let mut iterations = 0u64;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut prune_floor = f64::INFINITY;
    let mut timed_out = false;
    let mut numerical = false;
    // Until a first incumbent exists, plunge depth-first into the
    // child nearest the LP point; best-bound alone floats near the
    // root on symmetric models and never reaches integral leaves.
    let mut plunge_next: Option<Node> = None;

    let mut lower = root_lower.clone();
    let mut upper = root_upper.clone();

    loop {
        let node = match plunge_next.take() {
            Some(n) if incumbent.is_none() => n,
            Some(n) => {
                heap.push(Ranked(n));
                match heap.pop() {
                    Some(Ranked(n)) => n,
                    None => break,
                }
            }
            None => match heap.pop() {
                Some(Ranked(n)) => n,
                None => break,
            },
        };
        if Instant::now() >= deadline {
            heap.push(Ranked(node));
            timed_out = true;
            break;
        }
        let cutoff = incumbent
            .as_ref()
            .map(|&(obj, _)| obj - cfg.gap_tol * f64::max(1.0, obj.abs()));
        if let Some(cut) = cutoff {
            if node.bound >= cut {
                prune_floor = prune_floor.min(node.bound);
                continue;
            }
        }

        lower.copy_from_slice(&root_lower);
        upper.copy_from_slice(&root_upper);
        for &(j, l, u) in &node.changes {
            lower[j] = lower[j].max(l);
            upper[j] = upper[j].min(u);
        }

        node_count += 1;
        let out = solve_standard_form(&sf, &lower, &upper, cfg, deadline);
        iterations += out.iterations;
        match out.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                // Only reachable at the root: children restrict the
                // feasible region of a bounded parent.
                return Ok(SolveResult {
                    simplex_iterations: iterations,
                    node_count,
                    ..SolveResult::status_only(SolveStatus::Unbounded, start.elapsed().as_secs_f64())
                });
            }
            LpStatus::TimeLimit => {
                heap.push(Ranked(node));
                timed_out = true;
                break;
            }
            LpStatus::NumericalFailure => {
                numerical = true;
                break;
            }
            LpStatus::Optimal => {}
        }
        let obj = out.objective;
        if let Some(cut) = cutoff {
            if obj >= cut {
                prune_floor = prune_floor.min(obj);
                continue;
            }
        }

        // Most fractional integer variable.
        let mut branch_var: Option<(usize, f64, f64)> = None; // (var, value, score)
        for &j in &int_vars {
            let v = out.x[j];
            let frac = (v - v.round()).abs();
            if frac > cfg.integrality_tol {
                let score = (v - v.floor()).min(v.ceil() - v);
                let better = branch_var.map(|(_, _, s)| score > s).unwrap_or(true);
                if better {
                    branch_var = Some((j, v, score));
                }
            }
        }

        // Give the rounding heuristic a shot at this node's LP point:
        // aggressively until a first incumbent exists, sparsely after.
        if branch_var.is_some() {
            if let Some(h) = heuristic {
                if incumbent.is_none() || node_count % 64 == 1 {
                    if let Some(candidate) = h(&out.x) {
                        let mut fl = root_lower.clone();
                        let mut fu = root_upper.clone();
                        let mut in_bounds = candidate.len() == fl.len();
                        if in_bounds {
                            for &j in &int_vars {
                                let v = candidate[j].round();
                                if v < fl[j] - 1e-9 || v > fu[j] + 1e-9 {
                                    in_bounds = false;
                                    break;
                                }
                                fl[j] = v;
                                fu[j] = v;
                            }
                        }
                        if in_bounds {
                            let fixed = solve_standard_form(&sf, &fl, &fu, cfg, deadline);
                            iterations += fixed.iterations;
                            match fixed.status {
                                LpStatus::Optimal => {
                                    let mut x = fixed.x;
                                    for &j in &int_vars {
                                        x[j] = x[j].round();
                                    }
                                    let fobj = fixed.objective;
                                    if incumbent
                                        .as_ref()
                                        .map(|&(o, _)| fobj < o)
                                        .unwrap_or(true)
                                    {
                                        incumbent = Some((fobj, x));
                                    }
                                }
                                LpStatus::TimeLimit => {
                                    heap.push(Ranked(node));
                                    timed_out = true;
                                    break;
                                }
                                LpStatus::NumericalFailure => {
                                    numerical = true;
                                    break;
                                }
                                LpStatus::Infeasible | LpStatus::Unbounded => {}
                            }
                        }
                    }
                }
            }
        }

        // A fresh incumbent may prune this node before it branches.
        if let Some((inc_obj, _)) = &incumbent {
            let cut = inc_obj - cfg.gap_tol * f64::max(1.0, inc_obj.abs());
            if obj >= cut {
                prune_floor = prune_floor.min(obj);
                continue;
            }
        }

        match branch_var {
            None => {
                // Integral within tolerance: re-solve with integers
                // fixed to get an exactly integral, feasible point.
                let mut fl = lower.clone();
                let mut fu = upper.clone();
                for &j in &int_vars {
                    let v = out.x[j].round();
                    fl[j] = v;
                    fu[j] = v;
                }
                let fixed = solve_standard_form(&sf, &fl, &fu, cfg, deadline);
                iterations += fixed.iterations;
                match fixed.status {
                    LpStatus::Optimal => {
                        let mut x = fixed.x;
                        for &j in &int_vars {
                            x[j] = x[j].round();
                        }
                        let fobj = fixed.objective;
                        if incumbent.as_ref().map(|&(o, _)| fobj < o).unwrap_or(true) {
                            incumbent = Some((fobj, x));
                        }
                    }
                    LpStatus::TimeLimit => {
                        heap.push(Ranked(node));
                        timed_out = true;
                        break;
                    }
                    LpStatus::NumericalFailure => {
                        numerical = true;
                        break;
                    }
                    // The rounding was too aggressive; split on the
                    // first integer variable still movable.
                    LpStatus::Infeasible | LpStatus::Unbounded => {
                        if let Some(&j) = int_vars
                            .iter()
                            .find(|&&j| upper[j] - lower[j] > 0.5)
                        {
                            let v = out.x[j];
                            push_children(
                                &mut heap,
                                &mut plunge_next,
                                incumbent.is_none(),
                                &mut next_id,
                                &node,
                                obj,
                                j,
                                v,
                                &lower,
                                &upper,
                            );
                        }
                    }
                }
                continue;
            }
            Some((j, v, _)) => {
                push_children(
                    &mut heap,
                    &mut plunge_next,
                    incumbent.is_none(),
                    &mut next_id,
                    &node,
                    obj,
                    j,
                    v,
                    &lower,
                    &upper,
                );
            }
        }
    }

    let wall = start.elapsed().as_secs_f64();
    if let Some(n) = plunge_next.take() {
        heap.push(Ranked(n)); // unexplored; its bound still counts
    }
    let heap_bound = heap
        .iter()
        .map(|r| r.0.bound)
        .fold(f64::INFINITY, f64::min);
    let mut best_bound = heap_bound.min(prune_floor);
    if let Some((obj, _)) = &incumbent {
        best_bound = best_bound.min(*obj);
    }
    if best_bound == f64::INFINITY && incumbent.is_none() {
        // Whole tree explored, nothing feasible.
        if !timed_out && !numerical {
            return Ok(SolveResult {
                simplex_iterations: iterations,
                node_count,
                ..SolveResult::status_only(SolveStatus::Infeasible, wall)
            });
        }
    }
    if best_bound == f64::NEG_INFINITY && node_count == 0 {
        // Popped nothing successfully; keep the bound conservative.
        best_bound = f64::NEG_INFINITY;
    }

    let (objective, solution) = match incumbent {
        Some((obj, x)) => (Some(obj), Some(x)),
        None => (None, None),
    };
    let mip_gap = objective.map(|obj| relative_gap(obj, best_bound).max(0.0));

    let status = if numerical {
        SolveStatus::NumericalFailure
    } else if timed_out {
        if objective.is_some() {
            SolveStatus::TimeLimit
        } else {
            SolveStatus::NoSolution
        }
    } else if objective.is_some() {
        // Exhausted frontier. Early prunes against since-improved
        // incumbents can leave the proven bound a hair above the gap
        // tolerance; report that honestly as Feasible.
        if mip_gap.unwrap() <= cfg.gap_tol {
            SolveStatus::Optimal
        } else {
            SolveStatus::Feasible
        }
    } else {
        SolveStatus::Infeasible
    };
    Ok(SolveResult {
        status,
        objective,
        best_bound,
        mip_gap,
        wall_time_s: wall,
        solution,
        node_count,
        simplex_iterations: iterations,
    })
}

#[allow(clippy::too_many_arguments)]
fn push_children(
    heap: &mut BinaryHeap<Ranked>,
    plunge_next: &mut Option<Node>,
    plunging: bool,
    next_id: &mut u64,
    node: &Node,
    obj: f64,
    j: usize,
    v: f64,
    lower: &[f64],
    upper: &[f64],
) {
    let down = v.floor();
    let up = v.ceil();
    let prefer_up = v - down >= 0.5;
    let mut emit = |child: Node, preferred: bool| {
        if plunging && preferred && plunge_next.is_none() {
            *plunge_next = Some(child);
        } else {
            heap.push(Ranked(child));
        }
    };
    if down >= lower[j] - 1e-9 {
        let mut changes = node.changes.clone();
        changes.push((j, lower[j], down));
        let child = Node {
            id: *next_id,
            bound: obj,
            changes,
        };
        *next_id += 1;
        emit(child, !prefer_up);
    }
    if up <= upper[j] + 1e-9 {
        let mut changes = node.changes.clone();
        changes.push((j, up, upper[j]));
        let child = Node {
            id: *next_id,
            bound: obj,
            changes,
        };
        *next_id += 1;
        emit(child, prefer_up);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmodel::{LinearModel, Sense, VarKind};

    #[test]
    fn binary_knapsack() {
        // min -3x - 2y  s.t. x + y <= 1, binary  ->  -3 at (1, 0)
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 1.0, VarKind::Binary).unwrap();
        let y = m.add_var("y", 0.0, 1.0, VarKind::Binary).unwrap();
        m.add_constraint("c", [(x, 1.0), (y, 1.0)], Sense::Le, 1.0)
            .unwrap();
        m.set_objective([(x, -3.0), (y, -2.0)]).unwrap();
        let r = solve_mip(&m, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 3.0).abs() < 1e-9);
        let sol = r.solution.unwrap();
        assert_eq!(sol[0], 1.0);
        assert_eq!(sol[1], 0.0);
    }

    #[test]
    fn fractional_lp_relaxation_forces_branching() {
        // min -x - y  s.t. 2x + 2y <= 3, integer in [0, 5]
        // LP gives 1.5 total; best integer sum is 1 -> objective -1.
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 5.0, VarKind::Integer).unwrap();
        let y = m.add_var("y", 0.0, 5.0, VarKind::Integer).unwrap();
        m.add_constraint("c", [(x, 2.0), (y, 2.0)], Sense::Le, 3.0)
            .unwrap();
        m.set_objective([(x, -1.0), (y, -1.0)]).unwrap();
        let r = solve_mip(&m, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 1.0).abs() < 1e-9);
        assert!(r.node_count >= 2);
    }

    #[test]
    fn integer_infeasible() {
        // 0.4 <= x <= 0.6 has no integer point.
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 1.0, VarKind::Integer).unwrap();
        m.add_constraint("lo", [(x, 1.0)], Sense::Ge, 0.4).unwrap();
        m.add_constraint("hi", [(x, 1.0)], Sense::Le, 0.6).unwrap();
        m.set_objective([(x, 1.0)]).unwrap();
        let r = solve_mip(&m, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn pure_lp_accepted() {
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 2.0, VarKind::Continuous).unwrap();
        m.set_objective([(x, 1.0)]).unwrap();
        let r = solve_mip(&m, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective.unwrap(), 0.0);
    }

    #[test]
    fn tiny_time_limit_returns_valid_bound() {
        // A nontrivial model with a 1 ms budget: the solve must stop
        // with a limit status and a bound no higher than the optimum.
        let mut m = LinearModel::new("t");
        let vars: Vec<_> = (0..24)
            .map(|j| m.add_var(format!("b{j}"), 0.0, 1.0, VarKind::Binary).unwrap())
            .collect();
        let coeffs: Vec<_> = vars
            .iter()
            .enumerate()
            .map(|(j, &v)| (v, 3.0 + (j % 7) as f64 + 1.0 / (j as f64 + 2.0)))
            .collect();
        m.add_constraint("cap", coeffs.clone(), Sense::Le, 40.0).unwrap();
        m.set_objective(coeffs.iter().map(|&(v, c)| (v, -(c + 5.0))).collect::<Vec<_>>())
            .unwrap();
        let quick = solve_mip(&m, &SolveConfig::with_time_limit(0.001)).unwrap();
        assert!(
            matches!(quick.status, SolveStatus::TimeLimit | SolveStatus::NoSolution),
            "{:?}",
            quick.status
        );
        let full = solve_mip(&m, &SolveConfig::with_time_limit(60.0)).unwrap();
        assert_eq!(full.status, SolveStatus::Optimal);
        assert!(quick.best_bound <= full.objective.unwrap() + 1e-9);
    }

    #[test]
    fn mip_bound_relation_holds() {
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 7.0, VarKind::Integer).unwrap();
        let y = m.add_var("y", 0.0, 7.0, VarKind::Integer).unwrap();
        m.add_constraint("c1", [(x, 3.0), (y, 5.0)], Sense::Le, 22.0)
            .unwrap();
        m.add_constraint("c2", [(x, 5.0), (y, 2.0)], Sense::Le, 19.0)
            .unwrap();
        m.set_objective([(x, -2.0), (y, -3.0)]).unwrap();
        let r = solve_mip(&m, &SolveConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let obj = r.objective.unwrap();
        assert!(r.best_bound <= obj + 1e-6 * obj.abs().max(1.0));
        assert!(r.mip_gap.unwrap() <= 1e-6);
    }
}
