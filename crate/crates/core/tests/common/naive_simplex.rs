//! Independent oracle: a textbook dense-tableau two-phase simplex with
//! Bland's rule throughout. Deliberately shares no code with the
//! engine under test; bounded variables are handled by substitution
//! into standard form (x >= 0, Ax = b) instead of a bounded ratio
//! test.

use mpplan::linmodel::{LinearModel, Sense};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum NaiveOutcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Internal description of one original variable in terms of the
/// standard-form variables.
enum VarMap {
    /// x = lo + x_k, with optional explicit upper-bound row.
    Shifted { k: usize, lo: f64 },
    /// x = up - x_k (no finite lower bound).
    Mirrored { k: usize, up: f64 },
    /// x = x_plus - x_minus (free).
    Split { plus: usize, minus: usize },
    /// Fixed value.
    Fixed(f64),
}

pub fn naive_simplex(model: &LinearModel) -> NaiveOutcome {
    let n_orig = model.num_vars();

    // Substitute every variable into nonnegative standard form.
    let mut maps: Vec<VarMap> = Vec::with_capacity(n_orig);
    let mut n = 0usize;
    // extra rows for finite [lo, up] ranges: x_k <= up - lo
    let mut range_rows: Vec<(usize, f64)> = Vec::new();
    for v in &model.vars {
        let (lo, up) = (v.lower, v.upper);
        if lo == up {
            maps.push(VarMap::Fixed(lo));
        } else if lo.is_finite() {
            let k = n;
            n += 1;
            if up.is_finite() {
                range_rows.push((k, up - lo));
            }
            maps.push(VarMap::Shifted { k, lo });
        } else if up.is_finite() {
            let k = n;
            n += 1;
            maps.push(VarMap::Mirrored { k, up });
        } else {
            let plus = n;
            let minus = n + 1;
            n += 2;
            maps.push(VarMap::Split { plus, minus });
        }
    }

    // Rewrite rows over the standard-form variables.
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for row in &model.rows {
        let mut coeffs = vec![0.0; n];
        let mut rhs = row.rhs;
        for &(var, c) in &row.coeffs {
            match &maps[var.idx()] {
                VarMap::Shifted { k, lo } => {
                    coeffs[*k] += c;
                    rhs -= c * lo;
                }
                VarMap::Mirrored { k, up } => {
                    coeffs[*k] -= c;
                    rhs -= c * up;
                }
                VarMap::Split { plus, minus } => {
                    coeffs[*plus] += c;
                    coeffs[*minus] -= c;
                }
                VarMap::Fixed(v) => rhs -= c * v,
            }
        }
        rows.push((coeffs, row.sense, rhs));
    }
    for &(k, ub) in &range_rows {
        let mut coeffs = vec![0.0; n];
        coeffs[k] = 1.0;
        rows.push((coeffs, Sense::Le, ub));
    }

    // Objective over standard-form variables plus a constant offset.
    let mut cost = vec![0.0; n];
    let mut offset = 0.0;
    for &(var, c) in &model.objective {
        match &maps[var.idx()] {
            VarMap::Shifted { k, lo } => {
                cost[*k] += c;
                offset += c * lo;
            }
            VarMap::Mirrored { k, up } => {
                cost[*k] -= c;
                offset += c * up;
            }
            VarMap::Split { plus, minus } => {
                cost[*plus] += c;
                cost[*minus] -= c;
            }
            VarMap::Fixed(v) => offset += c * v,
        }
    }

    // Standard form: normalise rhs >= 0, add slacks/surplus/artificials.
    let m = rows.len();
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut b: Vec<f64> = Vec::with_capacity(m);
    let mut n_total = n;
    // (row, column) of slack/surplus columns
    let mut extras: Vec<(usize, usize, f64)> = Vec::new();
    let mut artificial_of_row: Vec<Option<usize>> = vec![None; m];
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        let flip = *rhs < 0.0;
        let sgn = if flip { -1.0 } else { 1.0 };
        let sense = if flip {
            match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            }
        } else {
            *sense
        };
        a.push(coeffs.iter().map(|&c| sgn * c).collect());
        b.push(sgn * rhs);
        match sense {
            Sense::Le => {
                extras.push((i, n_total, 1.0));
                n_total += 1;
            }
            Sense::Ge => {
                extras.push((i, n_total, -1.0));
                n_total += 1;
                artificial_of_row[i] = Some(n_total);
                n_total += 1;
            }
            Sense::Eq => {
                artificial_of_row[i] = Some(n_total);
                n_total += 1;
            }
        }
    }

    // Dense tableau: m rows by n_total columns plus rhs.
    let mut t: Vec<Vec<f64>> = vec![vec![0.0; n_total + 1]; m];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i][..n]);
        t[i][n_total] = b[i];
    }
    for &(i, col, v) in &extras {
        t[i][col] = v;
    }
    let mut basis: Vec<usize> = vec![usize::MAX; m];
    for (i, art) in artificial_of_row.iter().enumerate() {
        if let Some(col) = art {
            t[i][*col] = 1.0;
            basis[i] = *col;
        }
    }
    // Rows without artificials start with their slack basic.
    for &(i, col, v) in &extras {
        if basis[i] == usize::MAX && v > 0.0 {
            basis[i] = col;
        }
    }
    debug_assert!(basis.iter().all(|&c| c != usize::MAX));

    let is_artificial = |j: usize| -> bool {
        artificial_of_row.iter().flatten().any(|&c| c == j)
    };

    // Phase 1: minimise the sum of artificials.
    let mut phase1_cost = vec![0.0; n_total];
    for art in artificial_of_row.iter().flatten() {
        phase1_cost[*art] = 1.0;
    }
    if artificial_of_row.iter().any(|a| a.is_some()) {
        match run_bland(&mut t, &mut basis, &phase1_cost, |_| false) {
            TableauOutcome::Optimal => {}
            TableauOutcome::Unbounded => unreachable!("phase 1 is bounded below"),
        }
        let infeas: f64 = basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| is_artificial(j))
            .map(|(i, _)| t[i][n_total])
            .sum();
        if infeas > 1e-7 {
            return NaiveOutcome::Infeasible;
        }
        // Drive basic zero artificials out where possible.
        for i in 0..m {
            if is_artificial(basis[i]) {
                if let Some(j) = (0..n_total)
                    .find(|&j| !is_artificial(j) && t[i][j].abs() > 1e-7)
                {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
    }

    // Phase 2: artificials barred from entering.
    let mut full_cost = vec![0.0; n_total];
    full_cost[..n].copy_from_slice(&cost);
    match run_bland(&mut t, &mut basis, &full_cost, is_artificial) {
        TableauOutcome::Optimal => {}
        TableauOutcome::Unbounded => return NaiveOutcome::Unbounded,
    }

    // Read the standard-form solution, then map back.
    let mut xs = vec![0.0; n_total];
    for i in 0..m {
        xs[basis[i]] = t[i][n_total];
    }
    let mut x = vec![0.0; n_orig];
    for (v, map) in maps.iter().enumerate() {
        x[v] = match map {
            VarMap::Shifted { k, lo } => lo + xs[*k],
            VarMap::Mirrored { k, up } => up - xs[*k],
            VarMap::Split { plus, minus } => xs[*plus] - xs[*minus],
            VarMap::Fixed(val) => *val,
        };
    }
    let objective = offset
        + cost
            .iter()
            .zip(&xs)
            .map(|(&c, &v)| c * v)
            .sum::<f64>();
    NaiveOutcome::Optimal { objective, x }
}

enum TableauOutcome {
    Optimal,
    Unbounded,
}

fn run_bland(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    barred: impl Fn(usize) -> bool,
) -> TableauOutcome {
    let m = t.len();
    let n_total = t[0].len() - 1;
    loop {
        // Reduced costs from scratch (O(mn), fine at oracle scale).
        let mut entering = None;
        for j in 0..n_total {
            if barred(j) || basis.contains(&j) {
                continue;
            }
            let mut d = cost[j];
            for i in 0..m {
                d -= cost[basis[i]] * t[i][j];
            }
            if d < -EPS {
                entering = Some(j);
                break; // Bland: first improving index
            }
        }
        let j = match entering {
            Some(j) => j,
            None => return TableauOutcome::Optimal,
        };
        // Ratio test; ties broken by smallest basis variable (Bland).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][j] > EPS {
                let ratio = t[i][n_total] / t[i][j];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - EPS || (ratio < lr + EPS && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = match leave {
            Some(t) => t,
            None => return TableauOutcome::Unbounded,
        };
        pivot(t, basis, r, j);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, j: usize) {
    let m = t.len();
    let p = t[r][j];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    for i in 0..m {
        if i != r {
            let f = t[i][j];
            if f != 0.0 {
                let pivot_row = t[r].clone();
                for (v, pv) in t[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    basis[r] = j;
}
