//! Per-state maximization of `π ↦ ρ(Σ_a π_a Q[·][a])` over the simplex.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::game::solve_matrix_game;
use super::lp::simplex_max;
use crate::error::{Error, Result};
use crate::risk::{evar_t_max, maximize_concave_1d_grid, DiscreteDistribution, RiskSpec};

/// Accuracy requested from the matrix-game solver.
pub const GAME_TOL: f64 = 1e-10;

/// Largest scenario count for the subset enumeration behind exact VaR.
pub const VAR_EXACT_MAX_SCENARIOS: usize = 16;

/// Mixed rows must beat the best one-hot row by more than this to be kept.
const MIX_MARGIN: f64 = 1e-12;

const SMO_MAX_ITERS: usize = 5_000;
const LOCAL_MAX_SWEEPS: usize = 50;
const LOCAL_SEED: u64 = 0x05EE_D0F5_7A7E;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreedyStrategy {
    DeterministicEnum,
    ExactGame,
    LocalSearch { restarts: usize, step_tol: f64 },
}

impl Default for GreedyStrategy {
    fn default() -> Self {
        GreedyStrategy::LocalSearch { restarts: 4, step_tol: 1e-10 }
    }
}

impl GreedyStrategy {
    pub fn validate(&self) -> Result<()> {
        if let GreedyStrategy::LocalSearch { restarts, step_tol } = *self {
            if restarts < 1 {
                return Err(Error::InvalidParameter("local search needs restarts >= 1".into()));
            }
            if !(step_tol > 0.0 && step_tol.is_finite()) {
                return Err(Error::InvalidParameter(format!("step_tol {step_tol} must be > 0")));
            }
        }
        Ok(())
    }

    /// Whether the strategy returns an exact maximizer for `spec`.
    pub fn is_exact_for(&self, spec: &RiskSpec) -> bool {
        match self {
            GreedyStrategy::ExactGame => true,
            _ => vertex_optimal(spec),
        }
    }
}

impl fmt::Display for GreedyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreedyStrategy::DeterministicEnum => f.write_str("deterministic"),
            GreedyStrategy::ExactGame => f.write_str("exact"),
            GreedyStrategy::LocalSearch { restarts, step_tol } => {
                write!(f, "local:{restarts}:{step_tol:e}")
            }
        }
    }
}

impl FromStr for GreedyStrategy {
    type Err = Error;
    /// `deterministic`, `exact`, `local`, `local:R` or `local:R:TOL`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let strategy = match head {
            "deterministic" | "det" | "enum" => GreedyStrategy::DeterministicEnum,
            "exact" | "game" => GreedyStrategy::ExactGame,
            "local" => {
                let GreedyStrategy::LocalSearch { mut restarts, mut step_tol } = Self::default()
                else {
                    unreachable!()
                };
                if let Some(r) = parts.next() {
                    restarts = r.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad restart count `{r}`"))
                    })?;
                }
                if let Some(t) = parts.next() {
                    step_tol = t
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad step tolerance `{t}`")))?;
                }
                GreedyStrategy::LocalSearch { restarts, step_tol }
            }
            other => return Err(Error::InvalidParameter(format!("unknown strategy `{other}`"))),
        };
        if parts.next().is_some() {
            return Err(Error::InvalidParameter(format!("malformed strategy `{s}`")));
        }
        strategy.validate()?;
        Ok(strategy)
    }
}

/// Measures that are convex in the payoff vector, so some one-hot row is
/// optimal.
fn vertex_optimal(spec: &RiskSpec) -> bool {
    match *spec {
        RiskSpec::Expectation | RiskSpec::EssSup => true,
        RiskSpec::Erm(beta) => beta >= -1e-12,
        RiskSpec::Cvar(alpha) => alpha <= 0.0,
        _ => false,
    }
}

/// The scenario payoff matrix of one state: `q[k * cols + a]` is the
/// one-step lookahead of action `a` under scenario `k`, which has weight
/// `weights[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateProblem {
    pub q: Vec<f64>,
    pub weights: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl StateProblem {
    pub fn payoffs(&self, pi: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|k| {
                let row = &self.q[k * self.cols..(k + 1) * self.cols];
                row.iter().zip(pi).map(|(q, p)| q * p).sum()
            })
            .collect()
    }

    pub fn distribution(&self, pi: &[f64]) -> DiscreteDistribution {
        let y = self.payoffs(pi);
        DiscreteDistribution::canonical(y.into_iter().zip(self.weights.iter().copied()).collect())
    }

    pub fn objective(&self, spec: &RiskSpec, pi: &[f64]) -> f64 {
        spec.eval_canonical(&self.distribution(pi))
    }

    fn sub_rows(&self, keep: &[usize]) -> Vec<f64> {
        keep.iter()
            .flat_map(|&k| self.q[k * self.cols..(k + 1) * self.cols].iter().copied())
            .collect()
    }

    fn bounds(&self) -> (f64, f64) {
        let lo = self.q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

fn one_hot(n: usize, a: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[a] = 1.0;
    v
}

fn normalized(mut pi: Vec<f64>) -> Vec<f64> {
    pi.iter_mut().for_each(|p| *p = p.max(0.0));
    let s: f64 = pi.iter().sum();
    if s > 0.0 {
        pi.iter_mut().for_each(|p| *p /= s);
    }
    pi
}

/// Best one-hot row, lowest index on ties.
pub fn best_deterministic(problem: &StateProblem, spec: &RiskSpec) -> (Vec<f64>, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for a in 0..problem.cols {
        let v = problem.objective(spec, &one_hot(problem.cols, a));
        if v > best.1 {
            best = (a, v);
        }
    }
    (one_hot(problem.cols, best.0), best.1)
}

/// Maximizes the state objective with the chosen strategy. The returned
/// value is the objective evaluated at the returned row.
pub fn maximize_row(
    problem: &StateProblem,
    spec: &RiskSpec,
    strategy: &GreedyStrategy,
) -> Result<(Vec<f64>, f64)> {
    strategy.validate()?;
    let det = best_deterministic(problem, spec);
    if problem.cols == 1 || problem.rows == 1 || vertex_optimal(spec) {
        return Ok(det);
    }
    let candidate = match strategy {
        GreedyStrategy::DeterministicEnum => return Ok(det),
        GreedyStrategy::ExactGame => exact_candidate(problem, spec)?,
        GreedyStrategy::LocalSearch { restarts, step_tol } => {
            local_search(problem, spec, *restarts, *step_tol)
        }
    };
    let value = problem.objective(spec, &candidate);
    if value > det.1 + MIX_MARGIN {
        Ok((candidate, value))
    } else {
        Ok(det)
    }
}

fn exact_candidate(problem: &StateProblem, spec: &RiskSpec) -> Result<Vec<f64>> {
    match *spec {
        RiskSpec::EssInf | RiskSpec::Cvar(1.0) => game_row(problem, None),
        RiskSpec::Cvar(alpha) => cvar_row(problem, alpha),
        RiskSpec::Var(alpha) => var_row(problem, alpha),
        RiskSpec::Erm(beta) => Ok(erm_row(problem, beta, None)),
        RiskSpec::Evar(alpha) => evar_row(problem, alpha),
        _ => Ok(best_deterministic(problem, spec).0),
    }
}

fn game_row(problem: &StateProblem, keep: Option<&[usize]>) -> Result<Vec<f64>> {
    let sol = match keep {
        None => solve_matrix_game(&problem.q, problem.rows, problem.cols, GAME_TOL)?,
        Some(rows) => {
            let q = problem.sub_rows(rows);
            solve_matrix_game(&q, rows.len(), problem.cols, GAME_TOL)?
        }
    };
    Ok(normalized(sol.strategy))
}

/// Rockafellar-Uryasev LP on positively shifted payoffs:
/// `max ξ - Σ_k w_k z_k / (1-α)` s.t. `ξ - z_k - (Q'π)_k <= 0`, `Σ π <= 1`.
fn cvar_row(problem: &StateProblem, alpha: f64) -> Result<Vec<f64>> {
    let (ns, nk) = (problem.cols, problem.rows);
    let (lo, hi) = problem.bounds();
    let scale = (hi - lo).max(1e-300);
    let n = ns + 1 + nk;
    let m = nk + 1;
    let mut a = vec![0.0; m * n];
    for k in 0..nk {
        let row = &mut a[k * n..(k + 1) * n];
        for ac in 0..ns {
            row[ac] = -(1.0 + (problem.q[k * ns + ac] - lo) / scale);
        }
        row[ns] = 1.0;
        row[ns + 1 + k] = -1.0;
    }
    a[nk * n..nk * n + ns].iter_mut().for_each(|x| *x = 1.0);
    let mut c = vec![0.0; n];
    c[ns] = 1.0;
    for k in 0..nk {
        c[ns + 1 + k] = -problem.weights[k] / (1.0 - alpha);
    }
    let mut b = vec![0.0; m];
    b[nk] = 1.0;
    let sol = simplex_max(&c, &a, &b)?;
    Ok(normalized(sol.y[..ns].to_vec()))
}

/// `VaR_α(Y) >= t` iff the scenarios with `Y >= t` carry mass `>= α`, so the
/// optimum is the best matrix game over minimal scenario sets of mass `>= α`.
fn var_row(problem: &StateProblem, alpha: f64) -> Result<Vec<f64>> {
    let nk = problem.rows;
    if nk > VAR_EXACT_MAX_SCENARIOS {
        return Err(Error::IncompatibleStrategy(format!(
            "exact VaR maximization supports at most {VAR_EXACT_MAX_SCENARIOS} scenarios, got {nk}"
        )));
    }
    let need = alpha - 1e-12;
    let spec = RiskSpec::Var(alpha);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1u32 << nk) {
        let members: Vec<usize> = (0..nk).filter(|k| mask >> k & 1 == 1).collect();
        let mass: f64 = members.iter().map(|&k| problem.weights[k]).sum();
        if mass < need {
            continue;
        }
        if members.iter().any(|&k| mass - problem.weights[k] >= need) {
            continue;
        }
        let pi = game_row(problem, Some(&members))?;
        let v = problem.objective(&spec, &pi);
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((pi, v));
        }
    }
    Ok(best.map(|b| b.0).unwrap_or_else(|| one_hot(problem.cols, 0)))
}

/// Softmin weights `w_k e^{β (y_k - m)}` normalized, for `β < 0`.
fn tilted(weights: &[f64], y: &[f64], beta: f64) -> Vec<f64> {
    let m = y.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = weights.iter().zip(y).map(|(w, v)| w * (beta * (v - m)).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Pairwise coordinate ascent with exact line search for the smooth concave
/// objective `ERM_β(Qπ)`, `β < 0`.
fn erm_row(problem: &StateProblem, beta: f64, start: Option<&[f64]>) -> Vec<f64> {
    let (nk, na) = (problem.rows, problem.cols);
    let col = |k: usize, a: usize| problem.q[k * na + a];
    let mut pi = match start {
        Some(p) => p.to_vec(),
        None => best_deterministic(problem, &RiskSpec::Erm(beta)).0,
    };
    let (lo, hi) = problem.bounds();
    let scale = (hi - lo).max(1e-300);
    for _ in 0..SMO_MAX_ITERS {
        let y = problem.payoffs(&pi);
        let p = tilted(&problem.weights, &y, beta);
        let grad: Vec<f64> = (0..na).map(|a| (0..nk).map(|k| p[k] * col(k, a)).sum()).collect();
        let up = (0..na).fold(0, |b, a| if grad[a] > grad[b] { a } else { b });
        let Some(down) = (0..na)
            .filter(|&a| pi[a] > 0.0)
            .min_by(|&a, &b| grad[a].total_cmp(&grad[b]))
        else {
            break;
        };
        if up == down || grad[up] - grad[down] <= 1e-12 * scale {
            break;
        }
        let dir: Vec<f64> = (0..nk).map(|k| col(k, up) - col(k, down)).collect();
        let slope = |tau: f64| {
            let yt: Vec<f64> = y.iter().zip(&dir).map(|(v, d)| v + tau * d).collect();
            let pt = tilted(&problem.weights, &yt, beta);
            pt.iter().zip(&dir).map(|(p, d)| p * d).sum::<f64>()
        };
        let cap = pi[down];
        let tau = if slope(cap) >= 0.0 {
            cap
        } else {
            let (mut a, mut b) = (0.0, cap);
            while b - a > 1e-15 * cap {
                let mid = 0.5 * (a + b);
                if slope(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        };
        if tau <= 1e-16 {
            break;
        }
        pi[up] += tau;
        pi[down] = if tau >= cap { 0.0 } else { pi[down] - tau };
    }
    normalized(pi)
}

/// `max_π EVaR_α(Qπ) = max_{t >= 0} max_π [ERM_{-1/t}(Qπ) + t log(1-α)]`,
/// where the inner value is concave in `t`; `t = 0` is the matrix game.
fn evar_row(problem: &StateProblem, alpha: f64) -> Result<Vec<f64>> {
    let (lo, hi) = problem.bounds();
    let spread = hi - lo;
    let game = game_row(problem, None)?;
    if spread <= 0.0 {
        return Ok(game);
    }
    let log_level = (1.0 - alpha).ln();
    let t_max = evar_t_max(spread, log_level);
    let warm = std::cell::RefCell::new(game.clone());
    let inner = |t: f64| -> (Vec<f64>, f64) {
        if t <= 0.0 {
            let v = problem.objective(&RiskSpec::EssInf, &game);
            return (game.clone(), v);
        }
        let beta = -1.0 / t;
        let pi = erm_row(problem, beta, Some(&warm.borrow()));
        let v = problem.objective(&RiskSpec::Erm(beta), &pi) + t * log_level;
        warm.replace(pi.clone());
        (pi, v)
    };
    let (t_star, _) = maximize_concave_1d_grid(|t| inner(t).1, 0.0, t_max, 24, 1e-10);
    let spec = RiskSpec::Evar(alpha);
    let (pi, _) = inner(t_star);
    let candidates = [pi, game];
    let best = candidates
        .into_iter()
        .map(|p| {
            let v = problem.objective(&spec, &p);
            (p, v)
        })
        .fold((Vec::new(), f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    Ok(best.0)
}

/// Multi-start pairwise ascent: from every one-hot row, the barycenter and
/// `restarts` random interior points, repeatedly move mass between two
/// actions along the best point of a line scan. Returns a lower bound.
fn local_search(problem: &StateProblem, spec: &RiskSpec, restarts: usize, step_tol: f64) -> Vec<f64> {
    let na = problem.cols;
    let mut starts: Vec<Vec<f64>> = (0..na).map(|a| one_hot(na, a)).collect();
    starts.push(vec![1.0 / na as f64; na]);
    let mut rng = ChaCha8Rng::seed_from_u64(LOCAL_SEED ^ (na as u64) << 32 ^ problem.rows as u64);
    for _ in 0..restarts {
        let raw: Vec<f64> = (0..na).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
        starts.push(normalized(raw));
    }
    let f = |pi: &[f64]| problem.objective(spec, pi);
    let mut best = (starts[0].clone(), f(&starts[0]));
    for start in starts {
        let mut pi = start;
        let mut val = f(&pi);
        for _ in 0..LOCAL_MAX_SWEEPS {
            let mut improved = false;
            for i in 0..na {
                for j in i + 1..na {
                    // π + τ(e_i - e_j), τ ∈ [-π_i, π_j].
                    let (lo, hi) = (-pi[i], pi[j]);
                    if hi - lo <= 0.0 {
                        continue;
                    }
                    let moved = |tau: f64| {
                        let mut p = pi.clone();
                        p[i] += tau;
                        p[j] -= tau;
                        p[i] = p[i].max(0.0);
                        p[j] = p[j].max(0.0);
                        p
                    };
                    let (tau, v) = maximize_concave_1d_grid(|t| f(&moved(t)), lo, hi, 16, 1e-9);
                    if v > val + step_tol {
                        pi = normalized(moved(tau));
                        val = f(&pi);
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        if val > best.1 {
            best = (pi, val);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn problem(q: &[f64], weights: &[f64], cols: usize) -> StateProblem {
        StateProblem { q: q.to_vec(), weights: weights.to_vec(), rows: weights.len(), cols }
    }

    /// Barycentric grid over Δ(A) with `n` subdivisions, `A <= 3`.
    fn simplex_grid(cols: usize, n: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        match cols {
            1 => out.push(vec![1.0]),
            2 => (0..=n).for_each(|i| out.push(vec![i as f64 / n as f64, 1.0 - i as f64 / n as f64])),
            _ => {
                for i in 0..=n {
                    for j in 0..=n - i {
                        let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                        out.push(vec![x, y, (1.0 - x - y).max(0.0)]);
                    }
                }
            }
        }
        out
    }

    fn grid_max(p: &StateProblem, spec: &RiskSpec, n: usize) -> f64 {
        simplex_grid(p.cols, n)
            .iter()
            .map(|pi| p.objective(spec, pi))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn essinf_needs_mixing() {
        let p = problem(&[1.0, 0.0, 0.0, 1.0], &[0.5, 0.5], 2);
        let (pi, v) = maximize_row(&p, &RiskSpec::EssInf, &GreedyStrategy::ExactGame).unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(pi[0], 0.5, epsilon = 1e-12);
        let (_, d) = maximize_row(&p, &RiskSpec::EssInf, &GreedyStrategy::DeterministicEnum).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn ties_prefer_lowest_index() {
        let p = problem(&[1.0, 1.0, 1.0], &[1.0], 3);
        let (pi, _) = maximize_row(&p, &RiskSpec::EssInf, &GreedyStrategy::ExactGame).unwrap();
        assert_eq!(pi, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("exact".parse::<GreedyStrategy>().unwrap(), GreedyStrategy::ExactGame);
        assert_eq!(
            "local:7:1e-8".parse::<GreedyStrategy>().unwrap(),
            GreedyStrategy::LocalSearch { restarts: 7, step_tol: 1e-8 }
        );
        assert!("local:0".parse::<GreedyStrategy>().is_err());
        assert!("simulated".parse::<GreedyStrategy>().is_err());
        let s = GreedyStrategy::LocalSearch { restarts: 3, step_tol: 1e-9 };
        assert_eq!(s.to_string().parse::<GreedyStrategy>().unwrap(), s);
    }

    fn specs() -> Vec<RiskSpec> {
        vec![
            RiskSpec::Expectation,
            RiskSpec::EssInf,
            RiskSpec::EssSup,
            RiskSpec::Var(0.3),
            RiskSpec::Var(0.7),
            RiskSpec::Cvar(0.4),
            RiskSpec::Cvar(0.9),
            RiskSpec::Erm(-2.0),
            RiskSpec::Erm(1.5),
            RiskSpec::Evar(0.3),
            RiskSpec::Evar(0.8),
        ]
    }

    fn random_problem() -> impl Strategy<Value = StateProblem> {
        (1usize..=3, 1usize..=4).prop_flat_map(|(cols, rows)| {
            (
                proptest::collection::vec(-2.0f64..2.0, rows * cols),
                proptest::collection::vec(0.1f64..1.0, rows),
            )
                .prop_map(move |(q, w)| {
                    let s: f64 = w.iter().sum();
                    let weights = w.iter().map(|x| x / s).collect();
                    StateProblem { q, weights, rows, cols }
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_beats_fine_grid(p in random_problem()) {
            for spec in specs() {
                let (pi, v) = maximize_row(&p, &spec, &GreedyStrategy::ExactGame).unwrap();
                prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!((p.objective(&spec, &pi) - v).abs() < 1e-15);
                let grid = grid_max(&p, &spec, 40);
                prop_assert!(v >= grid - 1e-9, "{spec}: exact {v} < grid {grid}");
            }
        }

        #[test]
        fn essinf_matches_41_point_grid(p in random_problem()) {
            let (_, v) = maximize_row(&p, &RiskSpec::EssInf, &GreedyStrategy::ExactGame).unwrap();
            let grid = grid_max(&p, &RiskSpec::EssInf, 40);
            prop_assert!(v >= grid - 1e-12);
            // The piecewise-linear objective moves at most 4 spread / 40
            // between neighbouring grid points.
            prop_assert!(v - grid <= 4.0 * 4.0 / 40.0 + 1e-12);
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn local_search_is_a_lower_bound(p in random_problem()) {
            let local = GreedyStrategy::LocalSearch { restarts: 2, step_tol: 1e-10 };
            for spec in specs() {
                let (_, exact) = maximize_row(&p, &spec, &GreedyStrategy::ExactGame).unwrap();
                let (_, lower) = maximize_row(&p, &spec, &local).unwrap();
                let (_, det) = maximize_row(&p, &spec, &GreedyStrategy::DeterministicEnum).unwrap();
                prop_assert!(lower <= exact + 1e-9, "{spec}: local {lower} > exact {exact}");
                prop_assert!(det <= lower + 1e-15);
            }
        }
    }
}
