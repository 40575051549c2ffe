use super::greedy::{maximize_row, GreedyStrategy, StateProblem};
use super::kernel::KernelDistribution;
use crate::error::{Error, Result};
use crate::mdp::{lookahead, MdpInstance, StationaryPolicy, ValueFunction};
use crate::risk::{DiscreteDistribution, RiskSpec};

fn check_inputs(v: &ValueFunction, nu: &KernelDistribution, instance: &MdpInstance) -> Result<()> {
    if nu.n_states != instance.n_states || nu.n_actions != instance.n_actions {
        return Err(Error::Dimension(format!(
            "kernel law is {} x {}, instance is {} x {}",
            nu.n_states, nu.n_actions, instance.n_states, instance.n_actions
        )));
    }
    if v.len() != instance.n_states {
        return Err(Error::Dimension(format!(
            "value has {} entries, instance has {} states",
            v.len(),
            instance.n_states
        )));
    }
    Ok(())
}

/// Scenario-by-action lookahead matrix of state `s` under `v`.
pub fn state_problem(
    v: &ValueFunction,
    s: usize,
    nu: &KernelDistribution,
    instance: &MdpInstance,
) -> Result<StateProblem> {
    check_inputs(v, nu, instance)?;
    if s >= instance.n_states {
        return Err(Error::Dimension(format!("state {s} out of range")));
    }
    Ok(build_problem(v, s, nu, instance))
}

fn build_problem(
    v: &ValueFunction,
    s: usize,
    nu: &KernelDistribution,
    instance: &MdpInstance,
) -> StateProblem {
    let (ns, na) = (instance.n_states, instance.n_actions);
    let scenarios = nu.scenarios(s);
    let mut q = Vec::with_capacity(scenarios.len() * na);
    for sc in scenarios {
        for a in 0..na {
            q.push(lookahead(
                &sc.block[a * ns..(a + 1) * ns],
                instance.reward_row(s, a),
                instance.discount,
                v,
            ));
        }
    }
    StateProblem {
        q,
        weights: scenarios.iter().map(|sc| sc.weight).collect(),
        rows: scenarios.len(),
        cols: na,
    }
}

fn check_row(pi_row: &[f64], n_actions: usize) -> Result<()> {
    if pi_row.len() != n_actions {
        return Err(Error::Dimension(format!(
            "policy row has {} entries, expected {n_actions}",
            pi_row.len()
        )));
    }
    Ok(())
}

/// Law of `T^{π,P̃} v(s)`: one atom per scenario of state `s`.
pub fn state_value_distribution(
    v: &ValueFunction,
    s: usize,
    pi_row: &[f64],
    nu: &KernelDistribution,
    instance: &MdpInstance,
) -> Result<DiscreteDistribution> {
    check_row(pi_row, instance.n_actions)?;
    Ok(state_problem(v, s, nu, instance)?.distribution(pi_row))
}

/// `T^{π,ν,ρ} v(s) = ρ(T^{π,P̃} v(s))` for every state.
pub fn apply_policy_operator(
    v: &ValueFunction,
    policy: &StationaryPolicy,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    instance: &MdpInstance,
) -> Result<ValueFunction> {
    spec.validate()?;
    check_inputs(v, nu, instance)?;
    if policy.n_states != instance.n_states {
        return Err(Error::Dimension("policy state count differs from instance".into()));
    }
    check_row(policy.row(0), instance.n_actions)?;
    let out = (0..instance.n_states)
        .map(|s| build_problem(v, s, nu, instance).objective(spec, policy.row(s)))
        .collect();
    Ok(ValueFunction(out))
}

/// Greedy row of state `s` and its value `ρ(T^{π,P̃} v(s))`.
pub fn greedy_row(
    v: &ValueFunction,
    s: usize,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    strategy: &GreedyStrategy,
    instance: &MdpInstance,
) -> Result<(Vec<f64>, f64)> {
    spec.validate()?;
    maximize_row(&state_problem(v, s, nu, instance)?, spec, strategy)
}

/// `T^{ν,ρ} v` together with a stationary policy attaining it.
pub fn apply_optimal_operator(
    v: &ValueFunction,
    nu: &KernelDistribution,
    spec: &RiskSpec,
    strategy: &GreedyStrategy,
    instance: &MdpInstance,
) -> Result<(ValueFunction, StationaryPolicy)> {
    spec.validate()?;
    strategy.validate()?;
    check_inputs(v, nu, instance)?;
    let (ns, na) = (instance.n_states, instance.n_actions);
    let mut value = Vec::with_capacity(ns);
    let mut pi = Vec::with_capacity(ns * na);
    for s in 0..ns {
        let (row, val) = maximize_row(&build_problem(v, s, nu, instance), spec, strategy)?;
        value.push(val);
        pi.extend(row);
    }
    Ok((ValueFunction(value), StationaryPolicy::new(ns, na, pi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellman::kernel::Scenario;
    use crate::mdp::{nominal_bellman, TransitionKernel};
    use approx::assert_abs_diff_eq;

    /// Start(0) -> Start w.p. x else End(1); End absorbing; reward 1 leaving
    /// Start, 0 from End.
    fn fig1(xs: &[f64], gamma: f64) -> (MdpInstance, KernelDistribution) {
        let inst = MdpInstance::new(2, 1, vec![1.0, 1.0, 0.0, 0.0], gamma, vec![1.0, 0.0]);
        let w = 1.0 / xs.len() as f64;
        let start = xs.iter().map(|&x| Scenario { weight: w, block: vec![x, 1.0 - x] }).collect();
        let end = vec![Scenario { weight: 1.0, block: vec![0.0, 1.0] }];
        (inst, KernelDistribution::new(2, 1, vec![start, end]).unwrap())
    }

    #[test]
    fn start_state_atoms() {
        let (inst, nu) = fig1(&[0.0, 1.0], 0.5);
        let v = ValueFunction(vec![3.0, 0.0]);
        let d = state_value_distribution(&v, 0, &[1.0], &nu, &inst).unwrap();
        assert_eq!(d.atoms(), &[(1.0, 0.5), (2.5, 0.5)]);
    }

    #[test]
    fn essinf_picks_zero_scenario() {
        let (inst, nu) = fig1(&[0.0, 0.5, 1.0], 0.5);
        let pol = StationaryPolicy::uniform(2, 1);
        for v0 in [0.0, 1.0, 7.5] {
            let v = ValueFunction(vec![v0, 0.0]);
            let out = apply_policy_operator(&v, &pol, &nu, &RiskSpec::EssInf, &inst).unwrap();
            assert_abs_diff_eq!(out[0], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_scenario_matches_nominal() {
        let inst = MdpInstance::new(
            2,
            2,
            vec![1.0, 0.0, 0.5, 2.0, 0.0, 1.0, -1.0, 0.3],
            0.9,
            vec![0.5, 0.5],
        );
        let kernel = TransitionKernel::new(2, 2, vec![0.2, 0.8, 1.0, 0.0, 0.6, 0.4, 0.5, 0.5]);
        let nu = KernelDistribution::dirac(&kernel);
        let pol = StationaryPolicy::new(2, 2, vec![0.3, 0.7, 1.0, 0.0]).unwrap();
        let v = ValueFunction(vec![1.5, -0.5]);
        let nominal = nominal_bellman(&v, &pol, &kernel, &inst).unwrap();
        for spec in [RiskSpec::Expectation, RiskSpec::Cvar(0.3), RiskSpec::Evar(0.5)] {
            let out = apply_policy_operator(&v, &pol, &nu, &spec, &inst).unwrap();
            assert_abs_diff_eq!(out[0], nominal[0], epsilon = 1e-12);
            assert_abs_diff_eq!(out[1], nominal[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        let (inst, nu) = fig1(&[0.0, 1.0], 0.5);
        let v = ValueFunction(vec![0.0]);
        assert!(state_value_distribution(&v, 0, &[1.0], &nu, &inst).is_err());
        let v = ValueFunction(vec![0.0, 0.0]);
        assert!(state_value_distribution(&v, 0, &[0.5, 0.5], &nu, &inst).is_err());
        assert!(state_value_distribution(&v, 5, &[1.0], &nu, &inst).is_err());
    }
}
