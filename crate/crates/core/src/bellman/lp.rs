//! Dense tableau simplex for `max cᵀy  s.t.  Ay <= b, y >= 0` with `b >= 0`.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Optimal primal point.
    pub y: Vec<f64>,
    /// Optimal dual prices of the `m` inequality rows.
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Solves the LP starting from the all-slack basis, entering and leaving by
/// Bland's rule. `a` is row-major `m x n`.
pub fn simplex_max(c: &[f64], a: &[f64], b: &[f64]) -> Result<LpSolution> {
    let (m, n) = (b.len(), c.len());
    if a.len() != m * n {
        return Err(Error::Dimension(format!("lp matrix has {} entries, expected {}", a.len(), m * n)));
    }
    if b.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::Numerical("lp right-hand side must be finite and nonnegative".into()));
    }
    if c.iter().chain(a).any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite lp coefficient".into()));
    }
    let width = n + m + 1;
    // Rows 0..m are constraints, row m is the objective (reduced costs).
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        let row = &mut t[i * width..(i + 1) * width];
        row[..n].copy_from_slice(&a[i * n..(i + 1) * n]);
        row[n + i] = 1.0;
        row[width - 1] = b[i];
    }
    for j in 0..n {
        t[m * width + j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0;
    loop {
        let obj = &t[m * width..(m + 1) * width];
        let Some(enter) = (0..n + m).find(|&j| obj[j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let aij = t[i * width + enter];
            if aij > PIVOT_TOL {
                let ratio = t[i * width + width - 1] / aij;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - 1e-14 * best_ratio.abs().max(1.0)
                            || (ratio <= best_ratio + 1e-14 * best_ratio.abs().max(1.0)
                                && basis[i] < basis[l])
                    }
                };
                if better {
                    best_ratio = ratio.min(best_ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Err(Error::Numerical("lp is unbounded".into()));
        };
        pivot(&mut t, width, m, r, enter);
        basis[r] = enter;
        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::Numerical(format!("simplex exceeded {MAX_PIVOTS} pivots")));
        }
    }

    let mut y = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            y[bv] = t[i * width + width - 1].max(0.0);
        }
    }
    let duals = (0..m).map(|i| t[m * width + n + i].max(0.0)).collect();
    let objective = c.iter().zip(&y).map(|(ci, yi)| ci * yi).sum();
    Ok(LpSolution { y, duals, objective, pivots })
}

fn pivot(t: &mut [f64], width: usize, m: usize, r: usize, col: usize) {
    let p = t[r * width + col];
    for x in &mut t[r * width..(r + 1) * width] {
        *x /= p;
    }
    let pivot_row: Vec<f64> = t[r * width..(r + 1) * width].to_vec();
    for i in 0..=m {
        if i == r {
            continue;
        }
        let f = t[i * width + col];
        if f == 0.0 {
            continue;
        }
        let row = &mut t[i * width..(i + 1) * width];
        for (x, pr) in row.iter_mut().zip(&pivot_row) {
            *x -= f * pr;
        }
        row[col] = 0.0;
    }
}
