//! Bounded-variable primal revised simplex.
//!
//! Standard form: every row `a.x (<=|=|>=) b` becomes `a.x + s = b`
//! with slack bounds encoding the sense. Phase 1 adds signed
//! artificial columns for rows whose initial slack value violates its
//! bounds and minimises total artificial magnitude; phase 2 minimises
//! the true objective with artificials fixed at zero.
//!
//! Anti-cycling: after a run of degenerate steps the pivot selection
//! falls back to Bland's rule until a real step is made.

use std::time::Instant;

use super::lu::{LuFactors, SparseCol};
use super::{SolveConfig, SolveError, SolveResult, SolveStatus};
use crate::linmodel::{LinearModel, Sense, VarKind};

const DUAL_TOL: f64 = 1e-9;
// Rows with smaller pivots do not block: accepting near-zero pivots
// makes the updated basis numerically singular.
const PIVOT_TOL: f64 = 5e-8;
const DEGENERATE_STEP: f64 = 1e-12;
const BLAND_TRIGGER: usize = 60;
const DEADLINE_CHECK_EVERY: u64 = 32;

/// A model lowered to computational form. Structural columns are CSC;
/// slack and artificial columns are implicit unit vectors.
pub(crate) struct StandardForm {
    pub n_struct: usize,
    pub m: usize,
    col_starts: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    pub obj: Vec<f64>,
    rhs: Vec<f64>,
    /// Slack bounds per row, from the row sense.
    slack_lower: Vec<f64>,
    slack_upper: Vec<f64>,
}

impl StandardForm {
    pub fn from_model(model: &LinearModel) -> StandardForm {
        let n = model.num_vars();
        let m = model.num_rows();
        let mut col_starts = vec![0usize; n + 1];
        for row in &model.rows {
            for &(v, _) in &row.coeffs {
                col_starts[v.idx() + 1] += 1;
            }
        }
        for j in 0..n {
            col_starts[j + 1] += col_starts[j];
        }
        let nnz = col_starts[n];
        let mut col_rows = vec![0usize; nnz];
        let mut col_vals = vec![0.0f64; nnz];
        let mut fill = col_starts.clone();
        for (ri, row) in model.rows.iter().enumerate() {
            for &(v, c) in &row.coeffs {
                let p = fill[v.idx()];
                col_rows[p] = ri;
                col_vals[p] = c;
                fill[v.idx()] += 1;
            }
        }
        let mut obj = vec![0.0; n];
        for &(v, c) in &model.objective {
            obj[v.idx()] = c;
        }
        let mut slack_lower = Vec::with_capacity(m);
        let mut slack_upper = Vec::with_capacity(m);
        for row in &model.rows {
            match row.sense {
                Sense::Le => {
                    slack_lower.push(0.0);
                    slack_upper.push(f64::INFINITY);
                }
                Sense::Ge => {
                    slack_lower.push(f64::NEG_INFINITY);
                    slack_upper.push(0.0);
                }
                Sense::Eq => {
                    slack_lower.push(0.0);
                    slack_upper.push(0.0);
                }
            }
        }
        StandardForm {
            n_struct: n,
            m,
            col_starts,
            col_rows,
            col_vals,
            obj,
            rhs: model.rows.iter().map(|r| r.rhs).collect(),
            slack_lower,
            slack_upper,
        }
    }

    fn struct_col(&self, j: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.col_starts[j], self.col_starts[j + 1]);
        (&self.col_rows[a..b], &self.col_vals[a..b])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
    NumericalFailure,
}

pub(crate) struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    /// Structural variable values (only meaningful when Optimal).
    pub x: Vec<f64>,
    pub iterations: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    FreeZero,
}

struct Engine<'a> {
    sf: &'a StandardForm,
    /// Bounds for all columns: structural, slack, artificial.
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Phase-specific costs for all columns.
    cost: Vec<f64>,
    n_total: usize,
    art_row: Vec<usize>,
    state: Vec<VarState>,
    /// Keep Bland's rule on for the whole solve (stability retry).
    force_bland: bool,
    /// Nonbasic values, indexed by column.
    value: Vec<f64>,
    basic: Vec<usize>,
    x_basic: Vec<f64>,
    lu: Option<LuFactors>,
    iterations: u64,
    degenerate_run: usize,
    bland: bool,
    price_cursor: usize,
    deadline: Instant,
    // scratch
    w: Vec<f64>,
    y: Vec<f64>,
    cb: Vec<f64>,
}

enum StepOutcome {
    Done,
    Step,
    Unbounded,
    TimeLimit,
    Singular,
}

impl<'a> Engine<'a> {
    fn new(
        sf: &'a StandardForm,
        struct_lower: &[f64],
        struct_upper: &[f64],
        deadline: Instant,
    ) -> Engine<'a> {
        let m = sf.m;
        let mut lower = Vec::with_capacity(sf.n_struct + m);
        let mut upper = Vec::with_capacity(sf.n_struct + m);
        lower.extend_from_slice(struct_lower);
        upper.extend_from_slice(struct_upper);
        lower.extend_from_slice(&sf.slack_lower);
        upper.extend_from_slice(&sf.slack_upper);
        Engine {
            sf,
            lower,
            upper,
            cost: Vec::new(),
            n_total: sf.n_struct + m,
            art_row: Vec::new(),
            state: Vec::new(),
            force_bland: false,
            value: Vec::new(),
            basic: Vec::new(),
            x_basic: vec![0.0; m],
            lu: None,
            iterations: 0,
            degenerate_run: 0,
            bland: false,
            price_cursor: 0,
            deadline,
            w: vec![0.0; m],
            y: vec![0.0; m],
            cb: vec![0.0; m],
        }
    }

    fn column(&self, j: usize) -> SparseCol {
        if j < self.sf.n_struct {
            let (rows, vals) = self.sf.struct_col(j);
            rows.iter().copied().zip(vals.iter().copied()).collect()
        } else if j < self.sf.n_struct + self.sf.m {
            vec![(j - self.sf.n_struct, 1.0)]
        } else {
            vec![(self.art_row[j - self.sf.n_struct - self.sf.m], 1.0)]
        }
    }

    /// Dot of a dense row-space vector with column j.
    fn col_dot(&self, y: &[f64], j: usize) -> f64 {
        if j < self.sf.n_struct {
            let (rows, vals) = self.sf.struct_col(j);
            rows.iter()
                .zip(vals)
                .map(|(&r, &v)| y[r] * v)
                .sum()
        } else if j < self.sf.n_struct + self.sf.m {
            y[j - self.sf.n_struct]
        } else {
            y[self.art_row[j - self.sf.n_struct - self.sf.m]]
        }
    }

    /// Initial point: structural variables at a finite bound, slacks
    /// basic; rows whose slack violates its own bounds get a signed
    /// artificial that absorbs the residual.
    fn build_initial_basis(&mut self) {
        let m = self.sf.m;
        let ns = self.sf.n_struct;
        self.state = Vec::with_capacity(self.n_total);
        self.value = vec![0.0; self.n_total];
        for j in 0..ns {
            let (l, u) = (self.lower[j], self.upper[j]);
            let (st, v) = if l.is_finite() {
                (VarState::AtLower, l)
            } else if u.is_finite() {
                (VarState::AtUpper, u)
            } else {
                (VarState::FreeZero, 0.0)
            };
            self.state.push(st);
            self.value[j] = v;
        }

        // Residual slack values.
        let mut resid = self.sf.rhs.clone();
        for (j, &v) in self.value.iter().enumerate().take(ns) {
            if v != 0.0 {
                let (rows, vals) = self.sf.struct_col(j);
                for (&r, &c) in rows.iter().zip(vals) {
                    resid[r] -= c * v;
                }
            }
        }

        // Column layout is [structural | slacks | artificials]; slack
        // states fill ns..ns+m here, artificial states are appended
        // after the loop so indices line up.
        self.basic = Vec::with_capacity(m);
        self.art_row.clear();
        let mut art_states = Vec::new();
        for (i, &s) in resid.iter().enumerate() {
            let (sl, su) = (self.sf.slack_lower[i], self.sf.slack_upper[i]);
            if s >= sl && s <= su {
                // Slack basic at the residual value.
                self.state.push(VarState::Basic(i));
                self.basic.push(ns + i);
                self.x_basic[i] = s;
            } else {
                // Clamp the slack to its nearest bound, park it there
                // non-basic, and let an artificial carry the rest.
                let (clamped, slack_state) = if s > su {
                    (su, VarState::AtUpper)
                } else {
                    (sl, VarState::AtLower)
                };
                self.state.push(slack_state);
                self.value[ns + i] = clamped;
                let art_val = s - clamped;
                let art_col = ns + m + self.art_row.len();
                self.art_row.push(i);
                if art_val > 0.0 {
                    self.lower.push(0.0);
                    self.upper.push(f64::INFINITY);
                } else {
                    self.lower.push(f64::NEG_INFINITY);
                    self.upper.push(0.0);
                }
                art_states.push(VarState::Basic(i));
                self.basic.push(art_col);
                self.x_basic[i] = art_val;
            }
        }
        self.state.extend(art_states);
        self.n_total += self.art_row.len();
        self.value.resize(self.n_total, 0.0);
        debug_assert_eq!(self.state.len(), self.n_total);
        debug_assert_eq!(self.lower.len(), self.n_total);
    }

    fn refactorize(&mut self) -> Result<(), ()> {
        let cols: Vec<SparseCol> = self.basic.iter().map(|&j| self.column(j)).collect();
        match LuFactors::factorize(self.sf.m, &cols) {
            Ok(lu) => {
                self.lu = Some(lu);
                self.recompute_basics();
                Ok(())
            }
            Err(_) => Err(()),
        }
    }

    /// Recomputes basic values from scratch: x_B = B^-1 (b - N x_N).
    fn recompute_basics(&mut self) {
        let mut rhs = self.sf.rhs.clone();
        for j in 0..self.n_total {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let v = self.value[j];
            if v != 0.0 {
                for (r, c) in self.column(j) {
                    rhs[r] -= c * v;
                }
            }
        }
        let lu = self.lu.as_ref().unwrap();
        lu.ftran(&rhs, &mut self.x_basic);
    }

    /// Pricing: returns (entering column, direction).
    fn price(&mut self) -> Option<(usize, f64)> {
        let lu = self.lu.as_ref().unwrap();
        for (slot, &j) in self.basic.iter().enumerate() {
            self.cb[slot] = self.cost[j];
        }
        lu.btran(&self.cb, &mut self.y);

        let eligible = |st: VarState, d: f64| -> Option<f64> {
            match st {
                VarState::AtLower => (d < -DUAL_TOL).then_some(1.0),
                VarState::AtUpper => (d > DUAL_TOL).then_some(-1.0),
                VarState::FreeZero => {
                    if d < -DUAL_TOL {
                        Some(1.0)
                    } else if d > DUAL_TOL {
                        Some(-1.0)
                    } else {
                        None
                    }
                }
                VarState::Basic(_) => None,
            }
        };

        if self.bland {
            // Bland's rule: first eligible column by index.
            for j in 0..self.n_total {
                if matches!(self.state[j], VarState::Basic(_)) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.cost[j] - self.col_dot(&self.y, j);
                if let Some(dir) = eligible(self.state[j], d) {
                    return Some((j, dir));
                }
            }
            return None;
        }

        // Partial pricing: scan blocks from a moving cursor, take the
        // best candidate in the first block that has one.
        let n = self.n_total;
        let block = usize::max(256, n / 16);
        let mut scanned = 0usize;
        let mut cursor = self.price_cursor % n;
        while scanned < n {
            let mut best: Option<(usize, f64, f64)> = None;
            let end = usize::min(cursor + block, n);
            for j in cursor..end {
                if matches!(self.state[j], VarState::Basic(_)) || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.cost[j] - self.col_dot(&self.y, j);
                if let Some(dir) = eligible(self.state[j], d) {
                    let score = d.abs();
                    if best.map(|(_, _, s)| score > s).unwrap_or(true) {
                        best = Some((j, dir, score));
                    }
                }
            }
            scanned += end - cursor;
            cursor = if end >= n { 0 } else { end };
            if let Some((j, dir, _)) = best {
                self.price_cursor = cursor;
                return Some((j, dir));
            }
        }
        None
    }

    fn step(&mut self) -> StepOutcome {
        self.iterations += 1;
        if self.iterations.is_multiple_of(DEADLINE_CHECK_EVERY) && Instant::now() >= self.deadline {
            return StepOutcome::TimeLimit;
        }
        if self.lu.as_ref().map(|lu| lu.should_refactor()).unwrap_or(true)
            && self.refactorize().is_err()
        {
            return StepOutcome::Singular;
        }

        let (q, dir) = match self.price() {
            Some(t) => t,
            None => return StepOutcome::Done,
        };

        // w = B^-1 A_q
        let mut aq = vec![0.0; self.sf.m];
        for (r, v) in self.column(q) {
            aq[r] += v;
        }
        self.lu.as_ref().unwrap().ftran(&aq, &mut self.w);

        // Ratio test. Moving x_q by dir * theta changes basic slot i
        // at rate -dir * w[i].
        let mut theta = f64::INFINITY;
        let mut leave: Option<(usize, f64)> = None; // (slot, |pivot|)
        for slot in 0..self.sf.m {
            let wi = self.w[slot];
            if wi.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * wi;
            let xb = self.x_basic[slot];
            let jb = self.basic[slot];
            let limit = if rate > 0.0 {
                let ub = self.upper[jb];
                if ub.is_infinite() {
                    continue;
                }
                (ub - xb).max(0.0) / rate
            } else {
                let lb = self.lower[jb];
                if lb.is_infinite() {
                    continue;
                }
                (xb - lb).max(0.0) / (-rate)
            };
            let better = if self.bland {
                // Smallest basic variable index among ties.
                limit < theta - 1e-12
                    || (limit <= theta + 1e-12
                        && leave.map(|(s, _)| jb < self.basic[s]).unwrap_or(true))
            } else {
                limit < theta - 1e-9
                    || (limit <= theta + 1e-9
                        && leave.map(|(_, p)| wi.abs() > p).unwrap_or(true))
            };
            if better {
                theta = theta.min(limit);
                leave = Some((slot, wi.abs()));
            }
        }

        let flip_limit = self.upper[q] - self.lower[q]; // may be inf
        if flip_limit <= theta {
            if flip_limit.is_infinite() {
                return StepOutcome::Unbounded;
            }
            // Bound flip: no basis change.
            let delta = dir * flip_limit;
            for slot in 0..self.sf.m {
                let wi = self.w[slot];
                if wi != 0.0 {
                    self.x_basic[slot] -= dir * wi * flip_limit;
                }
            }
            self.value[q] += delta;
            self.state[q] = if dir > 0.0 {
                VarState::AtUpper
            } else {
                VarState::AtLower
            };
            // Snap to the exact bound.
            self.value[q] = if dir > 0.0 {
                self.upper[q]
            } else {
                self.lower[q]
            };
            self.degenerate_run = 0;
            self.bland = self.force_bland;
            return StepOutcome::Step;
        }

        let (slot, _) = match leave {
            Some(t) => t,
            None => return StepOutcome::Unbounded,
        };

        if theta.is_infinite() {
            return StepOutcome::Unbounded;
        }

        // Update basic values and swap the basis.
        for s in 0..self.sf.m {
            let wi = self.w[s];
            if wi != 0.0 {
                self.x_basic[s] -= dir * wi * theta;
            }
        }
        let leaving = self.basic[slot];
        let rate = -dir * self.w[slot];
        let (leave_state, leave_val) = if rate > 0.0 {
            (VarState::AtUpper, self.upper[leaving])
        } else {
            (VarState::AtLower, self.lower[leaving])
        };
        self.state[leaving] = leave_state;
        self.value[leaving] = leave_val;

        let entering_val = self.value[q] + dir * theta;
        self.state[q] = VarState::Basic(slot);
        self.basic[slot] = q;
        self.x_basic[slot] = entering_val;

        if let Some(lu) = self.lu.as_mut() {
            lu.push_eta(slot, &self.w);
        }

        if theta <= DEGENERATE_STEP {
            self.degenerate_run += 1;
            if self.degenerate_run >= BLAND_TRIGGER {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = self.force_bland;
        }
        StepOutcome::Step
    }

    fn run_phase(&mut self, max_iters: u64) -> StepOutcome {
        loop {
            match self.step() {
                StepOutcome::Step => {
                    if self.iterations >= max_iters {
                        return StepOutcome::Singular; // treated as numerical failure
                    }
                }
                other => return other,
            }
        }
    }

    fn objective_now(&self) -> f64 {
        let mut obj = 0.0;
        for j in 0..self.n_total {
            let v = match self.state[j] {
                VarState::Basic(slot) => self.x_basic[slot],
                _ => self.value[j],
            };
            obj += self.cost[j] * v;
        }
        obj
    }

    fn primal_infeasibility(&self) -> f64 {
        let mut worst = 0.0f64;
        for slot in 0..self.sf.m {
            let j = self.basic[slot];
            let x = self.x_basic[slot];
            worst = worst.max(self.lower[j] - x).max(x - self.upper[j]);
        }
        worst
    }

    fn extract_struct(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.sf.n_struct];
        for (j, xi) in x.iter_mut().enumerate() {
            *xi = match self.state[j] {
                VarState::Basic(slot) => self.x_basic[slot],
                _ => self.value[j],
            };
        }
        x
    }
}

/// Solves the standard form with the given structural bounds. A
/// numerical failure triggers one full restart under Bland's rule,
/// whose unit-heavy pivot choices keep the basis well conditioned.
pub(crate) fn solve_standard_form(
    sf: &StandardForm,
    struct_lower: &[f64],
    struct_upper: &[f64],
    cfg: &SolveConfig,
    deadline: Instant,
) -> LpOutcome {
    let mut total_iters = 0;
    for attempt in 0..2 {
        let mut out = solve_standard_form_once(
            sf,
            struct_lower,
            struct_upper,
            cfg,
            deadline,
            attempt == 1,
        );
        out.iterations += total_iters;
        if out.status != LpStatus::NumericalFailure || attempt == 1 {
            return out;
        }
        total_iters = out.iterations;
    }
    unreachable!()
}

fn solve_standard_form_once(
    sf: &StandardForm,
    struct_lower: &[f64],
    struct_upper: &[f64],
    cfg: &SolveConfig,
    deadline: Instant,
    force_bland: bool,
) -> LpOutcome {
    for j in 0..sf.n_struct {
        if struct_lower[j] > struct_upper[j] {
            return LpOutcome {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                x: Vec::new(),
                iterations: 0,
            };
        }
    }

    let mut eng = Engine::new(sf, struct_lower, struct_upper, deadline);
    eng.force_bland = force_bland;
    eng.bland = force_bland;
    eng.build_initial_basis();
    let max_iters = 2_000_000 + 2_000 * (sf.m as u64 + 64);

    // Phase 1: minimise total artificial magnitude.
    let need_phase1 = !eng.art_row.is_empty();
    if need_phase1 {
        eng.cost = vec![0.0; eng.n_total];
        let base = eng.sf.n_struct + eng.sf.m;
        for k in 0..eng.art_row.len() {
            let j = base + k;
            eng.cost[j] = if eng.upper[j] == 0.0 { -1.0 } else { 1.0 };
        }
        match eng.run_phase(max_iters) {
            StepOutcome::Done => {}
            StepOutcome::TimeLimit => {
                return LpOutcome {
                    status: LpStatus::TimeLimit,
                    objective: f64::NAN,
                    x: Vec::new(),
                    iterations: eng.iterations,
                }
            }
            StepOutcome::Unbounded | StepOutcome::Singular => {
                return LpOutcome {
                    status: LpStatus::NumericalFailure,
                    objective: f64::NAN,
                    x: Vec::new(),
                    iterations: eng.iterations,
                }
            }
            StepOutcome::Step => unreachable!(),
        }
        let infeas = eng.objective_now();
        if infeas > cfg.feasibility_tol {
            return LpOutcome {
                status: LpStatus::Infeasible,
                objective: f64::INFINITY,
                x: Vec::new(),
                iterations: eng.iterations,
            };
        }
        // Fix artificials at zero for phase 2.
        let base = eng.sf.n_struct + eng.sf.m;
        for k in 0..eng.art_row.len() {
            let j = base + k;
            eng.lower[j] = 0.0;
            eng.upper[j] = 0.0;
            if !matches!(eng.state[j], VarState::Basic(_)) {
                eng.state[j] = VarState::AtLower;
                eng.value[j] = 0.0;
            }
        }
    }

    // Phase 2: true objective.
    eng.cost = vec![0.0; eng.n_total];
    eng.cost[..sf.n_struct].copy_from_slice(&sf.obj);
    eng.bland = eng.force_bland;
    eng.degenerate_run = 0;
    let status = match eng.run_phase(max_iters) {
        StepOutcome::Done => LpStatus::Optimal,
        StepOutcome::Unbounded => LpStatus::Unbounded,
        StepOutcome::TimeLimit => LpStatus::TimeLimit,
        StepOutcome::Singular => LpStatus::NumericalFailure,
        StepOutcome::Step => unreachable!(),
    };
    if status != LpStatus::Optimal {
        return LpOutcome {
            status,
            objective: f64::NAN,
            x: Vec::new(),
            iterations: eng.iterations,
        };
    }

    // Refresh the factorisation and double-check primal feasibility
    // before declaring optimality.
    if eng.refactorize().is_err() {
        return LpOutcome {
            status: LpStatus::NumericalFailure,
            objective: f64::NAN,
            x: Vec::new(),
            iterations: eng.iterations,
        };
    }
    let drift = eng.primal_infeasibility();
    if drift > 10.0 * cfg.feasibility_tol {
        return LpOutcome {
            status: LpStatus::NumericalFailure,
            objective: f64::NAN,
            x: Vec::new(),
            iterations: eng.iterations,
        };
    }

    let x = eng.extract_struct();
    let objective = sf
        .obj
        .iter()
        .zip(&x)
        .map(|(&c, &v)| c * v)
        .sum();
    LpOutcome {
        status: LpStatus::Optimal,
        objective,
        x,
        iterations: eng.iterations,
    }
}

/// Solves a continuous model with the revised simplex engine.
///
/// Models containing integer variables are rejected; callers wanting
/// integral solutions go through [`super::solve_mip`].
pub fn solve_lp(model: &LinearModel, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    if model.vars.iter().any(|v| v.kind != VarKind::Continuous) {
        return Err(SolveError::IntegerVarsInLp);
    }
    let start = Instant::now();
    let sf = StandardForm::from_model(model);
    let lower: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
    let deadline = start + cfg.time_limit();
    let out = solve_standard_form(&sf, &lower, &upper, cfg, deadline);
    let wall = start.elapsed().as_secs_f64();
    let result = match out.status {
        LpStatus::Optimal => SolveResult {
            status: SolveStatus::Optimal,
            objective: Some(out.objective),
            best_bound: out.objective,
            mip_gap: Some(0.0),
            wall_time_s: wall,
            solution: Some(out.x),
            node_count: 0,
            simplex_iterations: out.iterations,
        },
        LpStatus::Infeasible => SolveResult {
            simplex_iterations: out.iterations,
            ..SolveResult::status_only(SolveStatus::Infeasible, wall)
        },
        LpStatus::Unbounded => SolveResult {
            simplex_iterations: out.iterations,
            ..SolveResult::status_only(SolveStatus::Unbounded, wall)
        },
        LpStatus::TimeLimit => SolveResult {
            simplex_iterations: out.iterations,
            ..SolveResult::status_only(SolveStatus::NoSolution, wall)
        },
        LpStatus::NumericalFailure => SolveResult {
            simplex_iterations: out.iterations,
            ..SolveResult::status_only(SolveStatus::NumericalFailure, wall)
        },
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmodel::{LinearModel, Sense, VarKind};

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn bound_only_lp() {
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 1.0, VarKind::Continuous).unwrap();
        m.set_objective([(x, -1.0)]).unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 1.0).abs() < 1e-9);
        assert!((r.solution.unwrap()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn simple_capacity_lp() {
        // min -x - y  s.t. x + y <= 1, x,y in [0,1]  ->  -1
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", 0.0, 1.0, VarKind::Continuous).unwrap();
        let y = m.add_var("y", 0.0, 1.0, VarKind::Continuous).unwrap();
        m.add_constraint("cap", [(x, 1.0), (y, 1.0)], Sense::Le, 1.0)
            .unwrap();
        m.set_objective([(x, -1.0), (y, -1.0)]).unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_pair() {
        let mut m = LinearModel::new("t");
        let x = m
            .add_var("x", f64::NEG_INFINITY, f64::INFINITY, VarKind::Continuous)
            .unwrap();
        m.add_constraint("ge", [(x, 1.0)], Sense::Ge, 2.0).unwrap();
        m.add_constraint("le", [(x, 1.0)], Sense::Le, 1.0).unwrap();
        m.set_objective([(x, 1.0)]).unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut m = LinearModel::new("t");
        let x = m
            .add_var("x", 0.0, f64::INFINITY, VarKind::Continuous)
            .unwrap();
        m.set_objective([(x, -1.0)]).unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_rows_need_phase_one() {
        // min x + y  s.t. x + y = 2, x - y = 0  ->  x = y = 1
        let mut m = LinearModel::new("t");
        let x = m
            .add_var("x", 0.0, f64::INFINITY, VarKind::Continuous)
            .unwrap();
        let y = m
            .add_var("y", 0.0, f64::INFINITY, VarKind::Continuous)
            .unwrap();
        m.add_constraint("sum", [(x, 1.0), (y, 1.0)], Sense::Eq, 2.0)
            .unwrap();
        m.add_constraint("diff", [(x, 1.0), (y, -1.0)], Sense::Eq, 0.0)
            .unwrap();
        m.set_objective([(x, 1.0), (y, 1.0)]).unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let sol = r.solution.unwrap();
        assert!((sol[0] - 1.0).abs() < 1e-8);
        assert!((sol[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn negative_lower_bounds() {
        // min x  s.t. x >= -3 and x + y >= -1, y in [-2, 2]
        let mut m = LinearModel::new("t");
        let x = m.add_var("x", -3.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let y = m.add_var("y", -2.0, 2.0, VarKind::Continuous).unwrap();
        m.add_constraint("c", [(x, 1.0), (y, 1.0)], Sense::Ge, -1.0)
            .unwrap();
        m.set_objective([(x, 1.0)]).unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 3.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_integer_vars() {
        let mut m = LinearModel::new("t");
        m.add_var("x", 0.0, 1.0, VarKind::Binary).unwrap();
        assert!(matches!(
            solve_lp(&m, &cfg()),
            Err(SolveError::IntegerVarsInLp)
        ));
    }

    #[test]
    fn degenerate_cycling_guard() {
        // Classic degenerate LP; must terminate.
        let mut m = LinearModel::new("t");
        let x1 = m.add_var("x1", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let x2 = m.add_var("x2", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let x3 = m.add_var("x3", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        let x4 = m.add_var("x4", 0.0, f64::INFINITY, VarKind::Continuous).unwrap();
        m.add_constraint(
            "r1",
            [(x1, 0.5), (x2, -5.5), (x3, -2.5), (x4, 9.0)],
            Sense::Le,
            0.0,
        )
        .unwrap();
        m.add_constraint(
            "r2",
            [(x1, 0.5), (x2, -1.5), (x3, -0.5), (x4, 1.0)],
            Sense::Le,
            0.0,
        )
        .unwrap();
        m.add_constraint("r3", [(x1, 1.0)], Sense::Le, 1.0).unwrap();
        m.set_objective([(x1, -10.0), (x2, 57.0), (x3, 9.0), (x4, 24.0)])
            .unwrap();
        let r = solve_lp(&m, &cfg()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective.unwrap() + 1.0).abs() < 1e-7);
    }
}
