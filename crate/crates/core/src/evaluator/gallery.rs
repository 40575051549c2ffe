//! Reference instances: the two-state counterexample, random robust MDPs
//! and the verdict suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lemma::{build_lemma_mdp, var_witness};
use super::Verdict;
use crate::bellman::{KernelDistribution, Scenario};
use crate::error::{Error, Result};
use crate::mdp::{MdpInstance, StationaryPolicy};
use crate::risk::RiskSpec;

/// Seed of the pinned VaR witness search.
pub const VAR_WITNESS_SEED: u64 = 7;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("discount {gamma} not in (0,1)")));
    }
    Ok(())
}

/// Start (reward 1) stays put w.p. `x` and otherwise moves to the absorbing,
/// unrewarded End; `x` ranges over `xs` with equal weights.
pub fn two_state_instance(xs: &[f64], gamma: f64) -> Result<(MdpInstance, KernelDistribution)> {
    check_gamma(gamma)?;
    let inst = MdpInstance::new(2, 1, vec![1.0, 1.0, 0.0, 0.0], gamma, vec![1.0, 0.0])
        .with_names(&["Start", "End"], &["go"]);
    let w = 1.0 / xs.len() as f64;
    let start = xs.iter().map(|&x| Scenario { weight: w, block: vec![x, 1.0 - x] }).collect();
    let end = vec![Scenario { weight: 1.0, block: vec![0.0, 1.0] }];
    let nu = KernelDistribution::new(2, 1, vec![start, end])?;
    Ok((inst, nu))
}

/// Midpoint discretization `x_k = (k - ½)/n` of a uniform self-loop
/// probability.
pub fn build_counterexample_instance(gamma: f64, n_atoms: usize) -> Result<(MdpInstance, KernelDistribution)> {
    if n_atoms < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 atoms, got {n_atoms}")));
    }
    let xs: Vec<f64> = (1..=n_atoms).map(|k| (k as f64 - 0.5) / n_atoms as f64).collect();
    two_state_instance(&xs, gamma)
}

/// Uniform grid `{0, 1/(n-1), ..., 1}`; a single scenario sits at ½.
pub fn build_fig1_instance(gamma: f64, n_scenarios: usize) -> Result<(MdpInstance, KernelDistribution)> {
    let xs: Vec<f64> = match n_scenarios {
        0 => return Err(Error::InvalidParameter("need at least one scenario".into())),
        1 => vec![0.5],
        n => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    };
    two_state_instance(&xs, gamma)
}

fn random_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    // Exponential weights, with each entry dropped w.p. ½ to get sparse rows.
    let mut row: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { -rng.gen::<f64>().max(1e-300).ln() } else { 0.0 })
        .collect();
    if row.iter().all(|&x| x == 0.0) {
        row[rng.gen_range(0..n)] = 1.0;
    }
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|x| *x /= total);
    row
}

/// Random instance with rewards in `[0,1]` and between 1 and
/// `max_scenarios` equally likely scenarios per state.
pub fn random_robust_instance(
    n_states: usize,
    n_actions: usize,
    max_scenarios: usize,
    gamma: f64,
    seed: u64,
) -> Result<(MdpInstance, KernelDistribution)> {
    check_gamma(gamma)?;
    if n_states == 0 || n_actions == 0 || max_scenarios == 0 {
        return Err(Error::InvalidParameter("sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rewards = (0..n_states * n_actions * n_states).map(|_| rng.gen::<f64>()).collect();
    let init = vec![1.0 / n_states as f64; n_states];
    let inst = MdpInstance::new(n_states, n_actions, rewards, gamma, init);
    let per_state = (0..n_states)
        .map(|_| {
            let k = rng.gen_range(1..=max_scenarios);
            (0..k)
                .map(|_| Scenario {
                    weight: 1.0 / k as f64,
                    block: (0..n_actions).flat_map(|_| random_row(&mut rng, n_states)).collect(),
                })
                .collect()
        })
        .collect();
    let nu = KernelDistribution::new(n_states, n_actions, per_state)?;
    Ok((inst, nu))
}

/// One row of the verdict suite: an instance, the risk measure used for
/// both value and operator, and the expected verdict per sampling mode.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub risk: RiskSpec,
    pub instance: MdpInstance,
    pub nu: KernelDistribution,
    pub policy: StationaryPolicy,
    pub expected_static: Verdict,
    pub expected_resampled: Verdict,
}

/// Nominal, robust, optimistic, multi-model and percentile variants at
/// `γ = ½`; the first four share the `n_atoms` counterexample kernel law.
pub fn table1_suite(n_atoms: usize) -> Result<Vec<SuiteEntry>> {
    let gamma = 0.5;
    let (inst, nu) = build_counterexample_instance(gamma, n_atoms)?;
    let (nominal_inst, nominal_nu) = two_state_instance(&[0.5], gamma)?;
    let w = var_witness(0.5, gamma, 0.05, 0.05, VAR_WITNESS_SEED, 100_000)?;
    let (lemma_inst, lemma_nu) = build_lemma_mdp(&w.x, &w.y, &w.z, 0.0, 0.0, 1.0, 1.0, gamma)?;
    let one = |i: &MdpInstance| StationaryPolicy::uniform(i.n_states, i.n_actions);
    let entry = |name, risk, i: &MdpInstance, n: &KernelDistribution, st, rs| SuiteEntry {
        name,
        risk,
        instance: i.clone(),
        nu: n.clone(),
        policy: one(i),
        expected_static: st,
        expected_resampled: rs,
    };
    use Verdict::{Holds, Violated};
    Ok(vec![
        entry("nominal", RiskSpec::Expectation, &nominal_inst, &nominal_nu, Holds, Holds),
        entry("robust", RiskSpec::EssInf, &inst, &nu, Holds, Holds),
        entry("optimistic", RiskSpec::EssSup, &inst, &nu, Holds, Holds),
        entry("multi-model", RiskSpec::Expectation, &inst, &nu, Violated, Holds),
        entry("percentile", RiskSpec::Var(0.5), &lemma_inst, &lemma_nu, Violated, Violated),
    ])
}
