//! Two-phase dense tableau simplex with Bland's pivoting rule.

use super::{LinearProgram, SolverError};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

/// How an original variable maps onto the non-negative tableau columns.
#[derive(Clone, Copy)]
enum Var {
    /// `x = lb + z[col]`
    Shifted { col: usize, lb: f64 },
    /// `x = z[pos] - z[neg]`
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = obj[col];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            obj[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Runs simplex pivots on `obj` (reduced costs, last entry is minus the
    /// objective value) over the columns `allowed` admits.
    fn optimize(
        &mut self,
        obj: &mut [f64],
        allowed: impl Fn(usize) -> bool,
        pivots: &mut usize,
    ) -> Result<(), SolverError> {
        loop {
            let Some(col) = (0..self.width).find(|&j| allowed(j) && obj[j] < -COST_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-13
                                || (ratio <= lratio + 1e-13 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(SolverError::Unbounded);
            };
            self.pivot(obj, r, col);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(SolverError::IterationLimit);
            }
        }
    }
}

/// Optimal vertex of `lp`. Ties among optimal vertices resolve by the fixed
/// pivot order, so the answer is reproducible.
pub fn solve_lp(lp: &LinearProgram) -> Result<Vec<f64>, SolverError> {
    lp.check()?;
    let n = lp.dim();

    let mut vars = Vec::with_capacity(n);
    let mut nz = 0;
    for &lb in &lp.lower_bounds {
        if lb.is_finite() {
            vars.push(Var::Shifted { col: nz, lb });
            nz += 1;
        } else {
            vars.push(Var::Split {
                pos: nz,
                neg: nz + 1,
            });
            nz += 2;
        }
    }

    // Every row as `a · z ≥ b` over the tableau columns.
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut push_row = |coeffs: &[f64], bound: f64| {
        let mut a = vec![0.0; nz];
        let mut b = bound;
        for (v, &c) in vars.iter().zip(coeffs) {
            match *v {
                Var::Shifted { col, lb } => {
                    a[col] += c;
                    b -= c * lb;
                }
                Var::Split { pos, neg } => {
                    a[pos] += c;
                    a[neg] -= c;
                }
            }
        }
        rows.push((a, b));
    };
    for c in &lp.constraints {
        push_row(&c.coeffs, c.bound);
    }
    if let Some(ub) = &lp.upper_bounds {
        for (i, &u) in ub.iter().enumerate() {
            if u.is_finite() {
                let mut e = vec![0.0; n];
                e[i] = -1.0;
                push_row(&e, -u);
            }
        }
    }

    let m = rows.len();
    let n_art = rows.iter().filter(|(_, b)| *b >= 0.0).count();
    let width = nz + m + n_art;
    let art_start = nz + m;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        width,
    };
    let mut next_art = art_start;
    for (r, (a, b)) in rows.iter().enumerate() {
        let mut row = vec![0.0; width + 1];
        if *b >= 0.0 {
            // a·z - s + t = b
            row[..nz].copy_from_slice(a);
            row[nz + r] = -1.0;
            row[next_art] = 1.0;
            row[width] = *b;
            tab.basis.push(next_art);
            next_art += 1;
        } else {
            // -a·z + s = -b
            for (dst, v) in row[..nz].iter_mut().zip(a) {
                *dst = -v;
            }
            row[nz + r] = 1.0;
            row[width] = -b;
            tab.basis.push(nz + r);
        }
        tab.rows.push(row);
    }

    let mut pivots = 0;
    if n_art > 0 {
        let mut obj = vec![0.0; width + 1];
        for (r, row) in tab.rows.iter().enumerate() {
            if tab.basis[r] >= art_start {
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= v;
                }
            }
        }
        for o in &mut obj[art_start..width] {
            *o = 0.0;
        }
        tab.optimize(&mut obj, |_| true, &mut pivots).map_err(|e| {
            if e == SolverError::Unbounded {
                SolverError::Infeasible
            } else {
                e
            }
        })?;
        let scale = 1.0 + rows.iter().map(|(_, b)| b.abs()).fold(0.0, f64::max);
        if -obj[width] > 1e-9 * scale {
            return Err(SolverError::Infeasible);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&j| tab.rows[r][j].abs() > 1e-9) {
                    Some(col) => tab.pivot(&mut obj, r, col),
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![0.0; width];
    for (v, &c) in vars.iter().zip(&lp.objective) {
        match *v {
            Var::Shifted { col, .. } => cost[col] = c,
            Var::Split { pos, neg } => {
                cost[pos] = c;
                cost[neg] = -c;
            }
        }
    }
    let mut obj = vec![0.0; width + 1];
    obj[..width].copy_from_slice(&cost);
    for (r, row) in tab.rows.iter().enumerate() {
        let cb = cost[tab.basis[r]];
        if cb != 0.0 {
            for (o, v) in obj.iter_mut().zip(row) {
                *o -= cb * v;
            }
        }
    }
    tab.optimize(&mut obj, |j| j < art_start, &mut pivots)?;

    let mut z = vec![0.0; nz];
    for (r, &col) in tab.basis.iter().enumerate() {
        if col < nz {
            z[col] = tab.rhs(r).max(0.0);
        }
    }
    Ok(vars
        .iter()
        .map(|v| match *v {
            Var::Shifted { col, lb } => lb + z[col],
            Var::Split { pos, neg } => z[pos] - z[neg],
        })
        .collect())
}
