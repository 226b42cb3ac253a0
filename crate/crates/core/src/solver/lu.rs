//! Sparse LU factorisation of a simplex basis, with product-form eta
//! updates between refactorisations.
//!
//! Left-looking elimination with partial pivoting. Columns are
//! factored in ascending nonzero-count order so the unit columns of
//! slack-heavy bases pivot first without fill.

/// A sparse column: (row, value) pairs, unordered.
pub type SparseCol = Vec<(usize, f64)>;

const SINGULAR_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct LuFactors {
    m: usize,
    /// Column slot factored at elimination step k.
    slot_of_step: Vec<usize>,
    /// Physical pivot row of step k.
    pivot_row: Vec<usize>,
    /// L entries per step, as (step, multiplier), unit diagonal implicit.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Strict upper entries per step, as (step, value).
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    /// Eta updates since the last refactorisation, in slot coordinates.
    etas: Vec<(usize, SparseCol)>,
    eta_nnz: usize,
    lu_nnz: usize,
}

#[derive(Debug)]
pub enum LuError {
    Singular,
}

impl LuFactors {
    /// Factors the m x m matrix whose column for basis slot `s` is
    /// `cols[s]`.
    pub fn factorize(m: usize, cols: &[SparseCol]) -> Result<LuFactors, LuError> {
        assert_eq!(cols.len(), m);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&s| (cols[s].len(), s));

        let mut pivot_row = Vec::with_capacity(m);
        let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut u_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut u_diag = Vec::with_capacity(m);
        // step_of_row[r] = elimination step that pivoted physical row r.
        let mut step_of_row: Vec<usize> = vec![usize::MAX; m];

        let mut work: Vec<f64> = vec![0.0; m];
        let mut touched: Vec<usize> = Vec::with_capacity(64);
        let mut lu_nnz = 0usize;

        for (k, &slot) in order.iter().enumerate() {
            // Scatter column into the dense work array.
            for &(r, v) in &cols[slot] {
                if work[r] == 0.0 {
                    touched.push(r);
                }
                work[r] += v;
            }
            // Eliminate with all previous steps, in step order.
            let mut u_col: Vec<(usize, f64)> = Vec::new();
            for j in 0..k {
                let t = work[pivot_row[j]];
                if t == 0.0 {
                    continue;
                }
                u_col.push((j, t));
                // l entries are still keyed by physical row at this point.
                for &(r, lv) in &l_cols[j] {
                    if work[r] == 0.0 {
                        touched.push(r);
                    }
                    work[r] -= lv * t;
                }
                work[pivot_row[j]] = 0.0;
            }
            // Pick the largest remaining entry as pivot.
            let mut best_r = usize::MAX;
            let mut best_abs = 0.0f64;
            for &r in &touched {
                if step_of_row[r] == usize::MAX {
                    let a = work[r].abs();
                    if a > best_abs {
                        best_abs = a;
                        best_r = r;
                    }
                }
            }
            if best_abs < SINGULAR_TOL {
                for &r in &touched {
                    work[r] = 0.0;
                }
                return Err(LuError::Singular);
            }
            let piv = work[best_r];
            let mut l_col: Vec<(usize, f64)> = Vec::new();
            for &r in &touched {
                if step_of_row[r] == usize::MAX && r != best_r {
                    let v = work[r];
                    if v != 0.0 {
                        // Store by physical row for now; remapped to steps below.
                        l_col.push((r, v / piv));
                    }
                }
                work[r] = 0.0;
            }
            touched.clear();
            lu_nnz += l_col.len() + u_col.len() + 1;
            step_of_row[best_r] = k;
            pivot_row.push(best_r);
            u_diag.push(piv);
            u_cols.push(u_col);
            // l entries point at rows not yet pivoted; fix them up later.
            l_cols.push(l_col);
        }

        // Remap L entries from physical rows to elimination steps.
        for col in &mut l_cols {
            for e in col.iter_mut() {
                e.0 = step_of_row[e.0];
            }
        }

        Ok(LuFactors {
            m,
            slot_of_step: order,
            pivot_row,
            l_cols,
            u_cols,
            u_diag,
            etas: Vec::new(),
            eta_nnz: 0,
            lu_nnz: lu_nnz.max(1),
        })
    }

    /// True when the eta file has grown enough that refactorising is
    /// cheaper than continuing to apply updates.
    pub fn should_refactor(&self) -> bool {
        self.etas.len() >= 100 || self.eta_nnz > 4 * self.lu_nnz + 256
    }

    /// Records a basis change: the column at `slot` was replaced, and
    /// `ftran_col` is the solved representation B^-1 a of the entering
    /// column (slot coordinates, dense).
    pub fn push_eta(&mut self, slot: usize, ftran_col: &[f64]) {
        let col: SparseCol = ftran_col
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        self.eta_nnz += col.len();
        self.etas.push((slot, col));
    }

    /// Solves B x = b. Input and output are dense in slot coordinates;
    /// `b` is given per physical row.
    pub fn ftran(&self, b: &[f64], out: &mut [f64]) {
        let m = self.m;
        let mut w = vec![0.0; m];
        for k in 0..m {
            w[k] = b[self.pivot_row[k]];
        }
        // L solve (unit diagonal).
        for k in 0..m {
            let t = w[k];
            if t != 0.0 {
                for &(i, lv) in &self.l_cols[k] {
                    w[i] -= lv * t;
                }
            }
        }
        // U solve.
        for k in (0..m).rev() {
            let t = w[k] / self.u_diag[k];
            w[k] = t;
            if t != 0.0 {
                for &(j, uv) in &self.u_cols[k] {
                    w[j] -= uv * t;
                }
            }
        }
        // Steps map to slots.
        for i in out.iter_mut() {
            *i = 0.0;
        }
        for k in 0..m {
            out[self.slot_of_step[k]] = w[k];
        }
        // Eta updates, oldest first.
        for (r, col) in &self.etas {
            let pivot = col
                .iter()
                .find(|&&(i, _)| i == *r)
                .map(|&(_, v)| v)
                .unwrap_or(0.0);
            let t = out[*r] / pivot;
            out[*r] = t;
            if t != 0.0 {
                for &(i, v) in col {
                    if i != *r {
                        out[i] -= v * t;
                    }
                }
            }
        }
    }

    /// Solves B^T y = c. `c` is dense in slot coordinates; the result
    /// is dense per physical row.
    pub fn btran(&self, c: &[f64], out: &mut [f64]) {
        let m = self.m;
        let mut v: Vec<f64> = c.to_vec();
        // Eta transposes, newest first.
        for (r, col) in self.etas.iter().rev() {
            let mut acc = 0.0;
            let mut pivot = 1.0;
            for &(i, cv) in col {
                if i == *r {
                    pivot = cv;
                } else {
                    acc += cv * v[i];
                }
            }
            v[*r] = (v[*r] - acc) / pivot;
        }
        // Slot coordinates to step coordinates.
        let mut w = vec![0.0; m];
        for k in 0..m {
            w[k] = v[self.slot_of_step[k]];
        }
        // U^T solve, forward.
        for k in 0..m {
            let mut acc = w[k];
            for &(j, uv) in &self.u_cols[k] {
                acc -= uv * w[j];
            }
            w[k] = acc / self.u_diag[k];
        }
        // L^T solve, backward.
        for k in (0..m).rev() {
            let mut acc = w[k];
            for &(i, lv) in &self.l_cols[k] {
                acc -= lv * w[i];
            }
            w[k] = acc;
        }
        for o in out.iter_mut() {
            *o = 0.0;
        }
        for k in 0..m {
            out[self.pivot_row[k]] = w[k];
        }
    }
}
