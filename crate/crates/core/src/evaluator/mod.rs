//! Ground-truth evaluation of stationary policies under static and
//! resampled kernels, and checks of the Bellman fixed-point conditions.

mod gallery;
mod lemma;

pub use gallery::{
    build_counterexample_instance, build_fig1_instance, random_robust_instance, table1_suite,
    two_state_instance, SuiteEntry, VAR_WITNESS_SEED,
};
pub use lemma::{
    build_lemma_mdp, lemma_equation_residuals, lemma_state_names, var_witness, LemmaTriple,
    LEMMA_STATES,
};

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bellman::{
    apply_optimal_operator, apply_policy_operator, GreedyStrategy, KernelDistribution,
    SamplingMode, Scenario,
};
use crate::error::{Error, Result};
use crate::mdp::{
    ensure_valid, nominal_value, solve_policy_system, state_policy_row, MdpInstance,
    StationaryPolicy, ValueFunction,
};
use crate::risk::{DiscreteDistribution, RiskSpec};
use crate::solvers::value_iteration;

pub const DEFAULT_ENUMERATION_BUDGET: usize = 1 << 20;
pub const DEFAULT_MC_SAMPLES: usize = 20_000;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Default verdict tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// Truncation target of the exact worst/best-sequence recursion.
pub const RECURSION_TRUNCATION: f64 = 1e-9;
/// Stopping tolerance of the value iteration behind optimal-target checks.
pub const OPTIMAL_TARGET_TOL: f64 = 1e-10;

const BOOTSTRAP_SALT: u64 = 0xB007_57A9_0000_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    /// All joint kernels enumerated with product weights.
    ExactEnumeration,
    /// Nominal value of the mean kernel (resampled expectation).
    MeanKernel,
    /// Worst- or best-sequence backward recursion over `horizon` periods.
    ExactRecursion { horizon: usize },
    /// `horizon = None` for static sampling, whose per-sample values are
    /// exact linear solves.
    MonteCarlo { n_samples: usize, horizon: Option<usize>, seed: u64 },
}

impl EvalMethod {
    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, EvalMethod::MonteCarlo { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            EvalMethod::ExactEnumeration => "exact-enumeration",
            EvalMethod::MeanKernel => "mean-kernel",
            EvalMethod::ExactRecursion { .. } => "exact-recursion",
            EvalMethod::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalEstimate {
    pub values: ValueFunction,
    pub stderr: Vec<f64>,
    pub method: EvalMethod,
    pub truncation_bound: f64,
}

impl EvalEstimate {
    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().copied().fold(0.0, f64::max)
    }
}

/// Monte-Carlo settings; `horizon = None` picks the default truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub n_samples: usize,
    pub horizon: Option<usize>,
    pub seed: u64,
}

impl Default for McParams {
    fn default() -> Self {
        Self { n_samples: DEFAULT_MC_SAMPLES, horizon: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    pub enumeration_budget: usize,
    pub mc: McParams,
    /// Use the exact resampled paths (mean kernel, worst/best sequence)
    /// where they exist instead of sampling.
    pub prefer_exact: bool,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self { enumeration_budget: DEFAULT_ENUMERATION_BUDGET, mc: McParams::default(), prefer_exact: true }
    }
}

fn check_inputs(policy: &StationaryPolicy, nu: &KernelDistribution, instance: &MdpInstance) -> Result<()> {
    ensure_valid(instance)?;
    if nu.n_states != instance.n_states || nu.n_actions != instance.n_actions {
        return Err(Error::Dimension("kernel law does not match the instance".into()));
    }
    if policy.n_states != instance.n_states || policy.n_actions != instance.n_actions {
        return Err(Error::Dimension("policy does not match the instance".into()));
    }
    let problems = nu.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidInstance(problems));
    }
    Ok(())
}

/// `(P_π(s,.), r_π(s))` for every state and scenario.
type PolicyRows = Vec<Vec<(Vec<f64>, f64)>>;

fn policy_rows(policy: &StationaryPolicy, nu: &KernelDistribution, instance: &MdpInstance) -> PolicyRows {
    (0..instance.n_states)
        .map(|s| {
            nu.scenarios(s)
                .iter()
                .map(|sc| state_policy_row(policy.row(s), &sc.block, s, instance))
                .collect()
        })
        .collect()
}

fn joint_value(rows: &PolicyRows, choice: &[usize], gamma: f64) -> Result<Vec<f64>> {
    let ns = rows.len();
    let mut p = vec![0.0; ns * ns];
    let mut r = vec![0.0; ns];
    for s in 0..ns {
        let (row, rew) = &rows[s][choice[s]];
        p[s * ns..(s + 1) * ns].copy_from_slice(row);
        r[s] = *rew;
    }
    Ok(solve_policy_system(&p, &r, gamma)?.into_inner())
}

/// Per-state scenario samplers.
struct ChoiceSampler(Vec<Option<WeightedIndex<f64>>>);

impl ChoiceSampler {
    fn new(nu: &KernelDistribution) -> Result<Self> {
        (0..nu.n_states)
            .map(|s| {
                let sc = nu.scenarios(s);
                if sc.len() == 1 {
                    return Ok(None);
                }
                WeightedIndex::new(sc.iter().map(|x| x.weight))
                    .map(Some)
                    .map_err(|e| Error::InvalidDistribution(e.to_string()))
            })
            .collect::<Result<_>>()
            .map(ChoiceSampler)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        self.0.iter().map(|d| d.as_ref().map_or(0, |d| d.sample(rng))).collect()
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Applies `spec` per state to equally weighted samples and bootstraps the
/// standard error.
fn empirical_estimate(samples: &[Vec<f64>], spec: &RiskSpec, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len();
    let ns = samples[0].len();
    let w = 1.0 / n as f64;
    let rho_of = |pick: &dyn Fn(usize) -> usize, s: usize| {
        let atoms = (0..n).map(|i| (samples[pick(i)][s], w)).collect();
        spec.eval_canonical(&DiscreteDistribution::canonical(atoms))
    };
    let values: Vec<f64> = (0..ns).map(|s| rho_of(&|i| i, s)).collect();
    let boot: Vec<Vec<f64>> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed ^ BOOTSTRAP_SALT, b as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            (0..ns).map(|s| rho_of(&|i| idx[i], s)).collect()
        })
        .collect();
    let stderr = (0..ns)
        .map(|s| {
            let m = boot.iter().map(|b| b[s]).sum::<f64>() / boot.len() as f64;
            let var = boot.iter().map(|b| (b[s] - m).powi(2)).sum::<f64>() / (boot.len() - 1) as f64;
            var.sqrt()
        })
        .collect();
    (values, stderr)
}

fn check_mc(n_samples: usize) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 Monte-Carlo samples".into()));
    }
    Ok(())
}

/// `V^{π,ν,ρ}` with one kernel drawn for all time: exact over all joint
/// kernels when there are at most `enumeration_budget` of them, otherwise
/// Monte Carlo over joint kernels.
pub fn static_value(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    enumeration_budget: usize,
    mc: &McParams,
    instance: &MdpInstance,
) -> Result<EvalEstimate> {
    spec.validate()?;
    check_inputs(policy, nu, instance)?;
    if enumeration_budget == 0 {
        return Err(Error::InvalidParameter("enumeration budget must be positive".into()));
    }
    let ns = instance.n_states;
    let gamma = instance.discount;
    let rows = policy_rows(policy, nu, instance);
    let count = nu.joint_count().filter(|&c| c <= enumeration_budget);
    if let Some(count) = count {
        let solved: Vec<(f64, Vec<f64>)> = (0..count)
            .into_par_iter()
            .map(|idx| {
                let (choice, weight) = nu.choice_at(idx);
                joint_value(&rows, &choice, gamma).map(|v| (weight, v))
            })
            .collect::<Result<_>>()?;
        let values = (0..ns)
            .map(|s| {
                let atoms = solved.iter().map(|(w, v)| (v[s], *w)).collect();
                spec.eval_canonical(&DiscreteDistribution::canonical(atoms))
            })
            .collect();
        return Ok(EvalEstimate {
            values: ValueFunction(values),
            stderr: vec![0.0; ns],
            method: EvalMethod::ExactEnumeration,
            truncation_bound: 0.0,
        });
    }
    check_mc(mc.n_samples)?;
    let sampler = ChoiceSampler::new(nu)?;
    let samples: Vec<Vec<f64>> = (0..mc.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(mc.seed, i as u64);
            let choice = sampler.draw(&mut rng);
            joint_value(&rows, &choice, gamma)
        })
        .collect::<Result<_>>()?;
    let (values, stderr) = empirical_estimate(&samples, spec, mc.seed);
    Ok(EvalEstimate {
        values: ValueFunction(values),
        stderr,
        method: EvalMethod::MonteCarlo { n_samples: mc.n_samples, horizon: None, seed: mc.seed },
        truncation_bound: 0.0,
    })
}

/// `V^{π,ν,ρ}` under i.i.d. kernels, estimated from `n_samples` kernel
/// sequences of length `horizon`, each valued exactly by backward recursion.
pub fn resampled_value_mc(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    horizon: usize,
    n_samples: usize,
    seed: u64,
    instance: &MdpInstance,
) -> Result<EvalEstimate> {
    spec.validate()?;
    check_inputs(policy, nu, instance)?;
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    check_mc(n_samples)?;
    let ns = instance.n_states;
    let gamma = instance.discount;
    let rows = policy_rows(policy, nu, instance);
    let sampler = ChoiceSampler::new(nu)?;
    let samples: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let choices: Vec<Vec<usize>> = (0..horizon).map(|_| sampler.draw(&mut rng)).collect();
            let mut v = vec![0.0; ns];
            for choice in choices.iter().rev() {
                v = (0..ns)
                    .map(|s| {
                        let (p, r) = &rows[s][choice[s]];
                        r + gamma * p.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()
                    })
                    .collect();
            }
            v
        })
        .collect();
    let (values, stderr) = empirical_estimate(&samples, spec, seed);
    Ok(EvalEstimate {
        values: ValueFunction(values),
        stderr,
        method: EvalMethod::MonteCarlo { n_samples, horizon: Some(horizon), seed },
        truncation_bound: instance.truncation_bound(horizon),
    })
}

/// Exact resampled value where a closed route exists: the mean-kernel
/// nominal value for the expectation, and the worst (best) kernel sequence
/// by backward recursion for the essential infimum (supremum).
pub fn resampled_value_exact(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    horizon: Option<usize>,
    instance: &MdpInstance,
) -> Result<EvalEstimate> {
    check_inputs(policy, nu, instance)?;
    let ns = instance.n_states;
    let minimize = match spec {
        RiskSpec::Expectation => {
            let values = nominal_value(policy, &nu.mean_kernel(), instance)?;
            return Ok(EvalEstimate {
                values,
                stderr: vec![0.0; ns],
                method: EvalMethod::MeanKernel,
                truncation_bound: 0.0,
            });
        }
        RiskSpec::EssInf => true,
        RiskSpec::EssSup => false,
        other => {
            return Err(Error::IncompatibleStrategy(format!(
                "no exact resampled evaluation for {other}"
            )))
        }
    };
    let horizon = horizon.unwrap_or_else(|| instance.horizon_for(RECURSION_TRUNCATION));
    let gamma = instance.discount;
    let rows = policy_rows(policy, nu, instance);
    let mut v = vec![0.0; ns];
    for _ in 0..horizon {
        v = (0..ns)
            .map(|s| {
                let vals = rows[s]
                    .iter()
                    .map(|(p, r)| r + gamma * p.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>());
                if minimize {
                    vals.fold(f64::INFINITY, f64::min)
                } else {
                    vals.fold(f64::NEG_INFINITY, f64::max)
                }
            })
            .collect();
    }
    Ok(EvalEstimate {
        values: ValueFunction(v),
        stderr: vec![0.0; ns],
        method: EvalMethod::ExactRecursion { horizon },
        truncation_bound: instance.truncation_bound(horizon),
    })
}

/// Mode dispatcher over the evaluation routes.
pub fn evaluate_policy(
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    mode: SamplingMode,
    params: &EvalParams,
    instance: &MdpInstance,
) -> Result<EvalEstimate> {
    match mode {
        SamplingMode::Static => {
            static_value(policy, nu, spec, params.enumeration_budget, &params.mc, instance)
        }
        SamplingMode::Resampled => {
            let exact = matches!(spec, RiskSpec::Expectation | RiskSpec::EssInf | RiskSpec::EssSup);
            if params.prefer_exact && exact {
                resampled_value_exact(policy, nu, spec, params.mc.horizon, instance)
            } else {
                let horizon = params.mc.horizon.unwrap_or_else(|| instance.horizon_for(DEFAULT_TOLERANCE));
                resampled_value_mc(policy, nu, spec, horizon, params.mc.n_samples, params.mc.seed, instance)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holds" => Ok(Verdict::Holds),
            "violated" => Ok(Verdict::Violated),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(Error::InvalidParameter(format!("unknown verdict `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DpTarget {
    Policy(StationaryPolicy),
    /// The value-iteration policy for the operator risk, whose value is
    /// compared against the optimal operator.
    Optimal(GreedyStrategy),
}

/// Residuals of a discretization sequence, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementEvidence {
    pub scenario_counts: Vec<usize>,
    pub residuals: Vec<f64>,
    pub shrinking: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpCheckReport {
    pub mode: SamplingMode,
    pub value_risk: RiskSpec,
    pub operator_risk: RiskSpec,
    pub policy: StationaryPolicy,
    pub method: EvalMethod,
    pub v: ValueFunction,
    pub tv: ValueFunction,
    pub residual_per_state: Vec<f64>,
    pub residual_sup: f64,
    pub mc_stderr: f64,
    pub truncation_bound: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub refinement: Option<RefinementEvidence>,
}

/// Compares `V` (evaluated under `value_risk`) with its image under the
/// policy or optimal operator for `operator_risk`.
#[allow(clippy::too_many_arguments)]
pub fn dp_check(
    target: &DpTarget,
    nu: &KernelDistribution,
    value_risk: &RiskSpec,
    operator_risk: &RiskSpec,
    mode: SamplingMode,
    tolerance: f64,
    params: &EvalParams,
    instance: &MdpInstance,
) -> Result<DpCheckReport> {
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be >= 0")));
    }
    value_risk.validate()?;
    operator_risk.validate()?;
    let policy = match target {
        DpTarget::Policy(p) => p.clone(),
        DpTarget::Optimal(strategy) => {
            if !strategy.is_exact_for(operator_risk) {
                return Err(Error::IncompatibleStrategy(format!(
                    "optimal-target check needs an exact greedy strategy for {operator_risk}"
                )));
            }
            value_iteration(nu, operator_risk, strategy, OPTIMAL_TARGET_TOL, instance)?.policy
        }
    };
    let est = evaluate_policy(&policy, nu, value_risk, mode, params, instance)?;
    let tv = match target {
        DpTarget::Policy(_) => apply_policy_operator(&est.values, &policy, nu, operator_risk, instance)?,
        DpTarget::Optimal(strategy) => {
            apply_optimal_operator(&est.values, nu, operator_risk, strategy, instance)?.0
        }
    };
    let residual_per_state: Vec<f64> =
        tv.iter().zip(est.values.iter()).map(|(a, b)| (a - b).abs()).collect();
    let residual_sup = residual_per_state.iter().copied().fold(0.0, f64::max);
    let gamma = instance.discount;
    let mc_stderr = est.max_stderr();
    let noise = 3.0 * (1.0 + gamma) * mc_stderr;
    let trunc = (1.0 + gamma) * est.truncation_bound;
    let verdict = if est.method.is_monte_carlo() {
        if residual_sup <= noise + trunc {
            Verdict::Holds
        } else if residual_sup > tolerance + noise + trunc {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    } else if residual_sup <= tolerance + trunc {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    Ok(DpCheckReport {
        mode,
        value_risk: *value_risk,
        operator_risk: *operator_risk,
        policy,
        method: est.method,
        v: est.values,
        tv,
        residual_per_state,
        residual_sup,
        mc_stderr,
        truncation_bound: est.truncation_bound,
        tolerance,
        verdict,
        refinement: None,
    })
}

/// Halves the scenario count of every state with at least two scenarios by
/// merging consecutive pairs (weights add, blocks average by weight).
pub fn coarsen(nu: &KernelDistribution) -> Result<KernelDistribution> {
    let per_state = (0..nu.n_states)
        .map(|s| {
            nu.scenarios(s)
                .chunks(2)
                .map(|pair| {
                    let weight: f64 = pair.iter().map(|sc| sc.weight).sum();
                    let mut block = vec![0.0; pair[0].block.len()];
                    for sc in pair {
                        for (b, x) in block.iter_mut().zip(&sc.block) {
                            *b += sc.weight / weight * x;
                        }
                    }
                    Scenario { weight, block }
                })
                .collect()
        })
        .collect();
    KernelDistribution::new(nu.n_states, nu.n_actions, per_state)
}

/// Reruns the check on `levels - 1` successive coarsenings of `nu` and
/// requires each refinement to at least halve the residual, with the finest
/// residual within tolerance.
#[allow(clippy::too_many_arguments)]
pub fn refinement_check(
    target: &DpTarget,
    nu: &KernelDistribution,
    value_risk: &RiskSpec,
    operator_risk: &RiskSpec,
    mode: SamplingMode,
    tolerance: f64,
    params: &EvalParams,
    instance: &MdpInstance,
    levels: usize,
) -> Result<RefinementEvidence> {
    let mut laws = vec![nu.clone()];
    for _ in 1..levels.max(1) {
        let coarser = coarsen(laws.last().unwrap())?;
        laws.push(coarser);
    }
    laws.reverse();
    let mut scenario_counts = Vec::new();
    let mut residuals = Vec::new();
    for law in &laws {
        let report = dp_check(target, law, value_risk, operator_risk, mode, tolerance, params, instance)?;
        scenario_counts.push((0..law.n_states).map(|s| law.n_scenarios(s)).max().unwrap_or(0));
        residuals.push(report.residual_sup);
    }
    let halving = residuals.windows(2).all(|w| w[1] <= 0.5 * w[0] + 1e-12);
    let shrinking = halving && residuals.last().is_some_and(|&r| r <= tolerance);
    Ok(RefinementEvidence { scenario_counts, residuals, shrinking })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fig1_static_values() {
        let (inst, nu) = build_fig1_instance(0.5, 3).unwrap();
        let pol = StationaryPolicy::uniform(2, 1);
        let mc = McParams::default();
        let e = static_value(&pol, &nu, &RiskSpec::Expectation, 100, &mc, &inst).unwrap();
        assert_eq!(e.method, EvalMethod::ExactEnumeration);
        assert_abs_diff_eq!(e.values[0], 13.0 / 9.0, epsilon = 1e-12);
        let lo = static_value(&pol, &nu, &RiskSpec::EssInf, 100, &mc, &inst).unwrap();
        assert_abs_diff_eq!(lo.values[0], 1.0, epsilon = 1e-12);
        let hi = static_value(&pol, &nu, &RiskSpec::EssSup, 100, &mc, &inst).unwrap();
        assert_abs_diff_eq!(hi.values[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn static_mc_is_seeded_and_consistent() {
        let (inst, nu) = build_fig1_instance(0.5, 3).unwrap();
        let pol = StationaryPolicy::uniform(2, 1);
        let mc = McParams { n_samples: 4000, horizon: None, seed: 9 };
        let a = static_value(&pol, &nu, &RiskSpec::Expectation, 1, &mc, &inst).unwrap();
        let b = static_value(&pol, &nu, &RiskSpec::Expectation, 1, &mc, &inst).unwrap();
        assert_eq!(a, b);
        assert!(a.method.is_monte_carlo());
        assert!((a.values[0] - 13.0 / 9.0).abs() <= 3.0 * a.stderr[0]);
    }

    #[test]
    fn resampled_routes_agree() {
        let (inst, nu) = build_fig1_instance(0.5, 3).unwrap();
        let pol = StationaryPolicy::uniform(2, 1);
        let exact = resampled_value_exact(&pol, &nu, &RiskSpec::Expectation, None, &inst).unwrap();
        assert_abs_diff_eq!(exact.values[0], 4.0 / 3.0, epsilon = 1e-12);
        let mc = resampled_value_mc(&pol, &nu, &RiskSpec::Expectation, 40, 20_000, 3, &inst).unwrap();
        let band = 3.0 * mc.stderr[0] + mc.truncation_bound;
        assert!((mc.values[0] - 4.0 / 3.0).abs() <= band, "{} +- {band}", mc.values[0]);
        let worst = resampled_value_exact(&pol, &nu, &RiskSpec::EssInf, Some(40), &inst).unwrap();
        assert_abs_diff_eq!(worst.values[0], 1.0, epsilon = worst.truncation_bound);
        let sampled_worst = resampled_value_mc(&pol, &nu, &RiskSpec::EssInf, 40, 2000, 3, &inst).unwrap();
        assert!((sampled_worst.values[0] - 1.0).abs() <= sampled_worst.truncation_bound);
    }

    #[test]
    fn single_scenario_is_nominal() {
        let (inst, nu) = build_fig1_instance(0.5, 1).unwrap();
        let pol = StationaryPolicy::uniform(2, 1);
        let nominal = nominal_value(&pol, &nu.mean_kernel(), &inst).unwrap();
        let mc = resampled_value_mc(&pol, &nu, &RiskSpec::Cvar(0.3), 30, 50, 1, &inst).unwrap();
        assert!((mc.values[0] - nominal[0]).abs() <= mc.truncation_bound);
        assert!(mc.stderr[0] < 1e-12);
    }

    #[test]
    fn dp_check_fig1_verdicts() {
        let (inst, nu) = build_fig1_instance(0.5, 3).unwrap();
        let pol = DpTarget::Policy(StationaryPolicy::uniform(2, 1));
        let params = EvalParams::default();
        let e = RiskSpec::Expectation;
        let st = dp_check(&pol, &nu, &e, &e, SamplingMode::Static, 1e-3, &params, &inst).unwrap();
        // 13/9 against 1 + (1/2)(1/2)(13/9).
        assert_abs_diff_eq!(st.residual_sup, 13.0 / 9.0 - (1.0 + 13.0 / 36.0), epsilon = 1e-12);
        assert_eq!(st.verdict, Verdict::Violated);
        let rs = dp_check(&pol, &nu, &e, &e, SamplingMode::Resampled, 1e-3, &params, &inst).unwrap();
        assert!(rs.residual_sup <= 1e-12);
        assert_eq!(rs.verdict, Verdict::Holds);
        let inf = RiskSpec::EssInf;
        let ri = dp_check(&pol, &nu, &inf, &inf, SamplingMode::Resampled, 1e-3, &params, &inst).unwrap();
        assert!(ri.residual_sup <= 1e-6);
        assert_eq!(ri.verdict, Verdict::Holds);
    }

    #[test]
    fn coarsening_halves_scenarios() {
        let (_, nu) = build_fig1_instance(0.5, 4).unwrap();
        let c = coarsen(&nu).unwrap();
        assert_eq!(c.n_scenarios(0), 2);
        assert_abs_diff_eq!(c.scenarios(0)[0].block[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(c.n_scenarios(1), 1);
    }

    #[test]
    fn bad_parameters() {
        let (inst, nu) = build_fig1_instance(0.5, 3).unwrap();
        let pol = StationaryPolicy::uniform(2, 1);
        assert!(resampled_value_mc(&pol, &nu, &RiskSpec::EssInf, 0, 10, 0, &inst).is_err());
        assert!(resampled_value_mc(&pol, &nu, &RiskSpec::EssInf, 5, 0, 0, &inst).is_err());
        let mc = McParams { n_samples: 0, horizon: None, seed: 0 };
        assert!(static_value(&pol, &nu, &RiskSpec::EssInf, 1, &mc, &inst).is_err());
        assert!(static_value(&pol, &nu, &RiskSpec::EssInf, 0, &McParams::default(), &inst).is_err());
    }
}
