//! Fixed-point solvers: policy evaluation, value iteration, policy
//! iteration and the linear program for the optimistic (ess sup) case.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::bellman::{
    apply_optimal_operator, apply_policy_operator, maximize_row, simplex_max, state_problem,
    GreedyStrategy, KernelDistribution,
};
use crate::error::{Error, Result};
use crate::mdp::{
    ensure_valid, nominal_value, solve_policy_system, state_policy_row, MdpInstance,
    StationaryPolicy, ValueFunction,
};
use crate::risk::RiskSpec;

/// Iteration cap for fixed-point evaluation and value iteration.
pub const EVAL_MAX_ITERS: usize = 1_000_000;
/// Outer-iteration cap for policy iteration.
pub const PI_MAX_OUTER: usize = 10_000;
/// Greedy rows within this of the incumbent's value keep the incumbent.
pub const PI_TIE_TOL: f64 = 1e-10;
/// Allowed decrease between successive policy-iteration values.
pub const PI_MONOTONE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    ValueIteration,
    PolicyIteration,
    ConvexProgram,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::ValueIteration => "vi",
            Algorithm::PolicyIteration => "pi",
            Algorithm::ConvexProgram => "lp",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vi" => Ok(Algorithm::ValueIteration),
            "pi" => Ok(Algorithm::PolicyIteration),
            "lp" => Ok(Algorithm::ConvexProgram),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub value: ValueFunction,
    pub policy: StationaryPolicy,
    pub iterations: usize,
    /// Sup-norm step size (VI) or Bellman residual (PI, LP) at exit.
    pub final_residual: f64,
    /// A-posteriori bound on the distance to the optimal value.
    pub certified_bound: f64,
    /// The linear-rate bound of the method, with `‖V⁰ - V*‖` replaced by a
    /// certified surrogate.
    pub a_priori_bound: f64,
    /// Wall-clock seconds.
    pub wall_time: f64,
    /// Per-iteration sup-norm steps (VI) or value changes (PI).
    pub residual_history: Vec<f64>,
    /// Policy values `V^{π^n}` (PI only).
    pub value_history: Vec<ValueFunction>,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

fn check_nu(nu: &KernelDistribution, instance: &MdpInstance) -> Result<()> {
    ensure_valid(instance)?;
    if nu.n_states != instance.n_states || nu.n_actions != instance.n_actions {
        return Err(Error::Dimension(format!(
            "kernel law is {} x {}, instance is {} x {}",
            nu.n_states, nu.n_actions, instance.n_states, instance.n_actions
        )));
    }
    let problems = nu.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidInstance(problems));
    }
    Ok(())
}

/// Stop threshold on successive iterates guaranteeing distance `tol` to the
/// fixed point of a γ-contraction.
fn step_threshold(tol: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        f64::INFINITY
    } else {
        tol * (1.0 - gamma) / gamma
    }
}

/// Fixed point of `T^{π,ν,ρ}` to within `tol`, iterating from zero.
pub fn policy_fixed_point(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    tol: f64,
    instance: &MdpInstance,
) -> Result<ValueFunction> {
    policy_fixed_point_capped(policy, nu, spec, tol, instance, EVAL_MAX_ITERS)
}

pub fn policy_fixed_point_capped(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    tol: f64,
    instance: &MdpInstance,
    max_iters: usize,
) -> Result<ValueFunction> {
    check_tol(tol)?;
    check_nu(nu, instance)?;
    let threshold = step_threshold(tol, instance.discount);
    let mut v = ValueFunction::zeros(instance.n_states);
    let mut step = f64::INFINITY;
    for _ in 0..max_iters {
        let next = apply_policy_operator(&v, policy, nu, spec, instance)?;
        step = next.sup_distance(&v);
        v = next;
        if step <= threshold {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence { iterations: max_iters, residual: step })
}

/// Exact fixed point of `T^{π,ν,ρ}` for the expectation (mean-kernel linear
/// solve) and the essential infimum or supremum (policy iteration for the
/// adversary, or ally, over per-state scenario choices).
pub fn exact_policy_value(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    instance: &MdpInstance,
) -> Result<ValueFunction> {
    check_nu(nu, instance)?;
    let minimize = match spec {
        RiskSpec::Expectation => return nominal_value(policy, &nu.mean_kernel(), instance),
        RiskSpec::EssInf => true,
        RiskSpec::EssSup => false,
        other => {
            return Err(Error::IncompatibleStrategy(format!(
                "no exact policy evaluation for {other}"
            )))
        }
    };
    let ns = instance.n_states;
    let gamma = instance.discount;
    // rows[s][k] = (P_π(s,.), r_π(s)) under scenario k.
    let rows: Vec<Vec<(Vec<f64>, f64)>> = (0..ns)
        .map(|s| {
            nu.scenarios(s)
                .iter()
                .map(|sc| state_policy_row(policy.row(s), &sc.block, s, instance))
                .collect()
        })
        .collect();
    let lookahead = |s: usize, k: usize, v: &[f64]| {
        let (p, r) = &rows[s][k];
        r + gamma * p.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    };
    let better = |cand: f64, inc: f64| {
        let margin = 1e-13 * (1.0 + inc.abs());
        if minimize {
            cand < inc - margin
        } else {
            cand > inc + margin
        }
    };
    let zero = vec![0.0; ns];
    let mut choice: Vec<usize> = (0..ns)
        .map(|s| {
            (0..rows[s].len()).fold(0, |b, k| {
                if better(lookahead(s, k, &zero), lookahead(s, b, &zero)) {
                    k
                } else {
                    b
                }
            })
        })
        .collect();
    for _ in 0..PI_MAX_OUTER {
        let mut p = vec![0.0; ns * ns];
        let mut r = vec![0.0; ns];
        for s in 0..ns {
            let (row, rew) = &rows[s][choice[s]];
            p[s * ns..(s + 1) * ns].copy_from_slice(row);
            r[s] = *rew;
        }
        let v = solve_policy_system(&p, &r, gamma)?;
        let mut changed = false;
        for s in 0..ns {
            let incumbent = lookahead(s, choice[s], &v);
            let mut best = (choice[s], incumbent);
            for k in 0..rows[s].len() {
                let val = lookahead(s, k, &v);
                if better(val, best.1) {
                    best = (k, val);
                }
            }
            if best.0 != choice[s] {
                choice[s] = best.0;
                changed = true;
            }
        }
        if !changed {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence { iterations: PI_MAX_OUTER, residual: f64::NAN })
}

/// Value iteration from `V⁰ = 0`, stopping once the step certifies `tol`.
pub fn value_iteration(
    nu: &KernelDistribution,
    spec: &RiskSpec,
    strategy: &GreedyStrategy,
    tol: f64,
    instance: &MdpInstance,
) -> Result<SolveReport> {
    value_iteration_capped(nu, spec, strategy, tol, instance, EVAL_MAX_ITERS)
}

pub fn value_iteration_capped(
    nu: &KernelDistribution,
    spec: &RiskSpec,
    strategy: &GreedyStrategy,
    tol: f64,
    instance: &MdpInstance,
    max_iters: usize,
) -> Result<SolveReport> {
    check_tol(tol)?;
    check_nu(nu, instance)?;
    let start = Instant::now();
    let gamma = instance.discount;
    let threshold = step_threshold(tol, gamma);
    let mut v = ValueFunction::zeros(instance.n_states);
    let mut history = Vec::new();
    for n in 1..=max_iters {
        let (next, policy) = apply_optimal_operator(&v, nu, spec, strategy, instance)?;
        let step = next.sup_distance(&v);
        history.push(step);
        v = next;
        if step <= threshold {
            let certified = if gamma == 0.0 { 0.0 } else { step * gamma / (1.0 - gamma) };
            let v0_gap = v.sup_norm() + certified;
            return Ok(SolveReport {
                algorithm: Algorithm::ValueIteration,
                value: v,
                policy,
                iterations: n,
                final_residual: step,
                certified_bound: certified,
                a_priori_bound: 2.0 * gamma.powi(n as i32) / (1.0 - gamma) * v0_gap,
                wall_time: start.elapsed().as_secs_f64(),
                residual_history: history,
                value_history: Vec::new(),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Policy iteration with exact evaluation, keeping the incumbent row whenever it
/// is greedy up to [`PI_TIE_TOL`].
pub fn policy_iteration(
    nu: &KernelDistribution,
    spec: &RiskSpec,
    strategy: &GreedyStrategy,
    tol: f64,
    instance: &MdpInstance,
) -> Result<SolveReport> {
    check_tol(tol)?;
    check_nu(nu, instance)?;
    let supported = matches!(spec, RiskSpec::Expectation | RiskSpec::EssInf | RiskSpec::EssSup);
    if !supported || !strategy.is_exact_for(spec) {
        return Err(Error::IncompatibleStrategy(
            "policy iteration requires an exact greedy strategy".into(),
        ));
    }
    let start = Instant::now();
    let (ns, na) = (instance.n_states, instance.n_actions);
    let gamma = instance.discount;
    let mut policy = StationaryPolicy::deterministic(na, &vec![0; ns]);
    let mut values: Vec<ValueFunction> = Vec::new();
    let mut history = Vec::new();
    for n in 0..PI_MAX_OUTER {
        let v = exact_policy_value(&policy, nu, spec, instance)?;
        if let Some(prev) = values.last() {
            for s in 0..ns {
                let drop = prev[s] - v[s];
                if drop > PI_MONOTONE_TOL {
                    return Err(Error::NonMonotone { state: s, drop });
                }
            }
            history.push(v.sup_distance(prev));
        }
        let mut next = policy.clone();
        let mut best_value = Vec::with_capacity(ns);
        for s in 0..ns {
            let problem = state_problem(&v, s, nu, instance)?;
            let (row, val) = maximize_row(&problem, spec, strategy)?;
            let incumbent = problem.objective(spec, policy.row(s));
            if incumbent >= val - PI_TIE_TOL {
                best_value.push(incumbent.max(val));
            } else {
                next.set_row(s, &row);
                best_value.push(val);
            }
        }
        let residual = best_value.iter().zip(v.iter()).map(|(t, x)| (t - x).abs()).fold(0.0, f64::max);
        let stalled = history.last().is_some_and(|&d| d <= tol * (1.0 - gamma));
        let repeated = next.distance(&policy) == 0.0;
        values.push(v);
        if repeated || stalled {
            let value = values.last().unwrap().clone();
            let certified = residual / (1.0 - gamma);
            let v0_gap = values[0].sup_distance(&value) + certified;
            return Ok(SolveReport {
                algorithm: Algorithm::PolicyIteration,
                value,
                policy,
                iterations: n + 1,
                final_residual: residual,
                certified_bound: certified,
                a_priori_bound: gamma.powi(n as i32) * v0_gap,
                wall_time: start.elapsed().as_secs_f64(),
                residual_history: history,
                value_history: values,
            });
        }
        policy = next;
    }
    Err(Error::NoConvergence { iterations: PI_MAX_OUTER, residual: f64::NAN })
}

/// Optimal optimistic value as the solution of
/// `min Σ_s V(s)  s.t.  V(s) >= r_{s,a,k} + γ B_{s,k}(a,.)·V` for all
/// `(s, a, k)`, solved through its dual with the bundled simplex.
pub fn convex_program_solve(nu: &KernelDistribution, instance: &MdpInstance) -> Result<ValueFunction> {
    check_nu(nu, instance)?;
    let (ns, na) = (instance.n_states, instance.n_actions);
    let gamma = instance.discount;
    // U = V + R/(1-γ) >= 0 turns the constraints into G U >= h with h >= 0.
    let r_max = instance.reward_bound();
    let shift = r_max / (1.0 - gamma);
    let mut g_rows: Vec<Vec<f64>> = Vec::new();
    let mut h = Vec::new();
    for s in 0..ns {
        for sc in nu.scenarios(s) {
            for a in 0..na {
                let row = &sc.block[a * ns..(a + 1) * ns];
                let rewards = instance.reward_row(s, a);
                let q: f64 = row.iter().zip(rewards).map(|(p, r)| p * r).sum();
                let mut g: Vec<f64> = row.iter().map(|p| -gamma * p).collect();
                g[s] += 1.0;
                g_rows.push(g);
                h.push((q + r_max).max(0.0));
            }
        }
    }
    // Dual: max hᵀy s.t. Gᵀy <= 1, y >= 0; the primal U is its dual price.
    let m = g_rows.len();
    let mut a = vec![0.0; ns * m];
    for (i, g) in g_rows.iter().enumerate() {
        for s in 0..ns {
            a[s * m + i] = g[s];
        }
    }
    let sol = simplex_max(&h, &a, &vec![1.0; ns])?;
    let v = ValueFunction(sol.duals.iter().map(|u| u - shift).collect());
    let (tv, _) = apply_optimal_operator(
        &v,
        nu,
        &RiskSpec::EssSup,
        &GreedyStrategy::DeterministicEnum,
        instance,
    )?;
    let residual = tv.sup_distance(&v);
    if !(residual <= 1e-7 * (1.0 + shift)) {
        return Err(Error::Numerical(format!(
            "convex program solution has Bellman residual {residual:.3e}"
        )));
    }
    Ok(v)
}
