//! Zero-sum matrix games `max_{x ∈ Δ(A)} min_k (Qx)_k`.

use super::lp::simplex_max;
use crate::error::{Error, Result};

/// Iteration cap of the multiplicative-weights fallback.
pub const MWU_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameMethod {
    Simplex,
    MultiplicativeWeights,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    /// Maximizer's mixed strategy over columns.
    pub strategy: Vec<f64>,
    /// Minimizer's mixed strategy over rows.
    pub adversary: Vec<f64>,
    /// `min_k (Q x)_k` at the returned strategy.
    pub value: f64,
    /// `max_a (qᵀQ)_a - min_k (Qx)_k`, an upper bound on the suboptimality.
    pub gap: f64,
    pub method: GameMethod,
}

/// Row-major `rows x cols` payoff to the column (maximizing) player.
#[derive(Debug, Clone, PartialEq)]
pub struct Payoff<'a> {
    pub q: &'a [f64],
    pub rows: usize,
    pub cols: usize,
}

impl Payoff<'_> {
    fn at(&self, k: usize, a: usize) -> f64 {
        self.q[k * self.cols + a]
    }

    fn guaranteed(&self, x: &[f64]) -> f64 {
        (0..self.rows)
            .map(|k| (0..self.cols).map(|a| self.at(k, a) * x[a]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    fn best_response(&self, y: &[f64]) -> f64 {
        (0..self.cols)
            .map(|a| (0..self.rows).map(|k| self.at(k, a) * y[k]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check(q: &[f64], rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 || q.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "payoff has {} entries for a {rows} x {cols} game",
            q.len()
        )));
    }
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite payoff entry".into()));
    }
    Ok(())
}

/// Solves the game by the simplex method, falling back to optimistic
/// multiplicative weights if the LP certificate is off by more than `tol`.
pub fn solve_matrix_game(q: &[f64], rows: usize, cols: usize, tol: f64) -> Result<GameSolution> {
    check(q, rows, cols)?;
    let game = Payoff { q, rows, cols };
    match solve_by_simplex(&game) {
        Ok(sol) if sol.gap <= tol.max(1e-12) => Ok(sol),
        _ => {
            let sol = solve_by_mwu(&game, tol)?;
            if sol.gap > tol {
                return Err(Error::Numerical(format!(
                    "matrix game unresolved: duality gap {:.3e} after {MWU_MAX_ITERS} iterations",
                    sol.gap
                )));
            }
            Ok(sol)
        }
    }
}

fn solve_by_simplex(game: &Payoff<'_>) -> Result<GameSolution> {
    let (rows, cols) = (game.rows, game.cols);
    let lo = game.q.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = game.q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = (hi - lo).max(1e-300);
    // Shifted payoffs in [1, 2]; the minimizer's LP is
    // max 1ᵀy s.t. Σ_k Q'[k][a] y_k <= 1.
    let mut a = vec![0.0; cols * rows];
    for ac in 0..cols {
        for k in 0..rows {
            a[ac * rows + k] = 1.0 + (game.at(k, ac) - lo) / scale;
        }
    }
    let sol = simplex_max(&vec![1.0; rows], &a, &vec![1.0; cols])?;
    let sx: f64 = sol.duals.iter().sum();
    let sy: f64 = sol.y.iter().sum();
    if !(sx > 0.0 && sy > 0.0) {
        return Err(Error::Numerical("degenerate game lp".into()));
    }
    let strategy: Vec<f64> = sol.duals.iter().map(|u| u / sx).collect();
    let adversary: Vec<f64> = sol.y.iter().map(|y| y / sy).collect();
    let value = game.guaranteed(&strategy);
    let gap = (game.best_response(&adversary) - value).max(0.0);
    Ok(GameSolution { strategy, adversary, value, gap, method: GameMethod::Simplex })
}

/// Optimistic Hedge for both players on the normalized game; returns the
/// iterate with the smallest duality gap, stopping once it reaches `tol`.
pub fn solve_by_mwu(game: &Payoff<'_>, tol: f64) -> Result<GameSolution> {
    let (rows, cols) = (game.rows, game.cols);
    let lo = game.q.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = game.q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = hi - lo;
    if scale <= 0.0 {
        let mut strategy = vec![0.0; cols];
        strategy[0] = 1.0;
        return Ok(GameSolution {
            strategy,
            adversary: vec![1.0 / rows as f64; rows],
            value: lo,
            gap: 0.0,
            method: GameMethod::MultiplicativeWeights,
        });
    }
    let eta = 0.5;
    let norm = |k: usize, a: usize| (game.at(k, a) - lo) / scale;
    let (mut lx, mut ly) = (vec![0.0; cols], vec![0.0; rows]);
    let (mut gx_prev, mut gy_prev) = (vec![0.0; cols], vec![0.0; rows]);
    let (mut avg_x, mut avg_y) = (vec![0.0; cols], vec![0.0; rows]);
    let mut best: Option<GameSolution> = None;
    for it in 1..=MWU_MAX_ITERS {
        let x = softmax(&lx, &gx_prev, eta);
        let y = softmax(&ly, &gy_prev, eta);
        let gx: Vec<f64> = (0..cols).map(|a| (0..rows).map(|k| norm(k, a) * y[k]).sum()).collect();
        let gy: Vec<f64> = (0..rows).map(|k| -(0..cols).map(|a| norm(k, a) * x[a]).sum::<f64>()).collect();
        for a in 0..cols {
            lx[a] += gx[a];
            avg_x[a] += x[a];
        }
        for k in 0..rows {
            ly[k] += gy[k];
            avg_y[k] += y[k];
        }
        gx_prev = gx;
        gy_prev = gy;
        if it % 64 == 0 || it == MWU_MAX_ITERS {
            // Averages converge at rate 1/T; the optimistic last iterate
            // often converges much faster, so both are checked.
            let sx: f64 = avg_x.iter().sum();
            let sy: f64 = avg_y.iter().sum();
            let averaged = (
                avg_x.iter().map(|v| v / sx).collect::<Vec<f64>>(),
                avg_y.iter().map(|v| v / sy).collect::<Vec<f64>>(),
            );
            for (strategy, adversary) in [averaged, (x, y)] {
                let value = game.guaranteed(&strategy);
                let gap = (game.best_response(&adversary) - value).max(0.0);
                if best.as_ref().is_none_or(|b| gap < b.gap) {
                    best = Some(GameSolution {
                        strategy,
                        adversary,
                        value,
                        gap,
                        method: GameMethod::MultiplicativeWeights,
                    });
                }
            }
            if best.as_ref().is_some_and(|b| b.gap <= tol) {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::Numerical("multiplicative weights produced no iterate".into()))
}

/// `x ∝ exp(η (L + g_prev))`: cumulative gains plus one optimistic step.
fn softmax(cum: &[f64], prev: &[f64], eta: f64) -> Vec<f64> {
    let z: Vec<f64> = cum.iter().zip(prev).map(|(c, p)| eta * (c + p)).collect();
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}
