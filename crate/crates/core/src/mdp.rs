//! Finite discounted MDP instances and the exact nominal computations
//! (Bellman operator of a fixed kernel, linear-solve value functions).
//!
//! Rewards are stored densely as `r[s][a][s']` and transition kernels as
//! `P[s][a][s']`, both flattened row-major.

use std::fmt;
use std::ops::{Deref, DerefMut};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Absolute tolerance for probability-vector checks.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Returns true when `row` is nonnegative and sums to one within `tol`.
pub fn is_probability_vector(row: &[f64], tol: f64) -> bool {
    if row.is_empty() || row.iter().any(|p| !p.is_finite() || *p < -tol) {
        return false;
    }
    (row.iter().sum::<f64>() - 1.0).abs() <= tol
}

/// States, actions, rewards, discount and initial distribution of an MDP.
/// The transition law lives separately (a fixed [`TransitionKernel`] or a
/// [`crate::bellman::KernelDistribution`]).
#[derive(Debug, Clone, PartialEq)]
pub struct MdpInstance {
    pub n_states: usize,
    pub n_actions: usize,
    /// Dense `r[s][a][s']`.
    pub rewards: Vec<f64>,
    pub discount: f64,
    pub initial_dist: Vec<f64>,
    pub state_names: Vec<String>,
    pub action_names: Vec<String>,
}

impl MdpInstance {
    /// Builds an instance with generated names (`s0`, `s1`, ... / `a0`, ...).
    pub fn new(
        n_states: usize,
        n_actions: usize,
        rewards: Vec<f64>,
        discount: f64,
        initial_dist: Vec<f64>,
    ) -> Self {
        Self {
            n_states,
            n_actions,
            rewards,
            discount,
            initial_dist,
            state_names: (0..n_states).map(|s| format!("s{s}")).collect(),
            action_names: (0..n_actions).map(|a| format!("a{a}")).collect(),
        }
    }

    pub fn with_names(mut self, states: &[&str], actions: &[&str]) -> Self {
        self.state_names = states.iter().map(|s| s.to_string()).collect();
        self.action_names = actions.iter().map(|a| a.to_string()).collect();
        self
    }

    #[inline]
    pub fn reward(&self, s: usize, a: usize, next: usize) -> f64 {
        self.rewards[(s * self.n_actions + a) * self.n_states + next]
    }

    #[inline]
    pub fn reward_row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.rewards[start..start + self.n_states]
    }

    pub fn set_reward(&mut self, s: usize, a: usize, next: usize, value: f64) {
        let idx = (s * self.n_actions + a) * self.n_states + next;
        self.rewards[idx] = value;
    }

    /// `max |r|`.
    pub fn reward_bound(&self) -> f64 {
        self.rewards.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    /// `R_max / (1 - γ)`, the sup-norm bound on any value function.
    pub fn value_bound(&self) -> f64 {
        self.reward_bound() / (1.0 - self.discount)
    }

    /// Truncation bound `γ^T R_max / (1 - γ)` for a horizon-`T` return.
    pub fn truncation_bound(&self, horizon: usize) -> f64 {
        self.discount.powi(horizon as i32) * self.value_bound()
    }

    /// Shortest horizon whose truncation bound is at most `tol`.
    pub fn horizon_for(&self, tol: f64) -> usize {
        let gamma = self.discount;
        if gamma <= 0.0 {
            return 1;
        }
        let scale = self.reward_bound().max(1.0);
        let t = ((tol * (1.0 - gamma)) / scale).ln() / gamma.ln();
        (t.ceil().max(1.0)) as usize
    }

    fn check_dims(&self, what: &str, n_states: usize, n_actions: usize) -> Result<()> {
        if n_states != self.n_states || n_actions != self.n_actions {
            return Err(Error::Dimension(format!(
                "{what} is {n_states}x{n_actions}, instance is {}x{}",
                self.n_states, self.n_actions
            )));
        }
        Ok(())
    }
}

/// A violated instance invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyStateSpace,
    EmptyActionSpace,
    RewardShape { expected: usize, found: usize },
    NonFiniteReward { s: usize, a: usize, next: usize },
    DiscountOutOfRange(f64),
    InitialDistShape { expected: usize, found: usize },
    InitialDistNotSimplex,
    NameCount { what: &'static str, expected: usize, found: usize },
    KernelShape { expected: usize, found: usize },
    KernelRow { s: usize, a: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStateSpace => write!(f, "state space is empty"),
            Violation::EmptyActionSpace => write!(f, "action space is empty"),
            Violation::RewardShape { expected, found } => {
                write!(f, "reward tensor has {found} entries, expected {expected}")
            }
            Violation::NonFiniteReward { s, a, next } => {
                write!(f, "reward r({s},{a},{next}) is not finite")
            }
            Violation::DiscountOutOfRange(g) => write!(f, "discount out of range: {g}"),
            Violation::InitialDistShape { expected, found } => {
                write!(f, "initial_dist has {found} entries, expected {expected}")
            }
            Violation::InitialDistNotSimplex => {
                write!(f, "initial_dist not a probability vector")
            }
            Violation::NameCount { what, expected, found } => {
                write!(f, "{found} {what} names given, expected {expected}")
            }
            Violation::KernelShape { expected, found } => {
                write!(f, "kernel tensor has {found} entries, expected {expected}")
            }
            Violation::KernelRow { s, a } => {
                write!(f, "kernel row P({s},{a},.) not a probability vector")
            }
        }
    }
}

/// Checks every instance invariant and returns the violated ones.
pub fn validate_instance(instance: &MdpInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let (ns, na) = (instance.n_states, instance.n_actions);
    if ns == 0 {
        out.push(Violation::EmptyStateSpace);
    }
    if na == 0 {
        out.push(Violation::EmptyActionSpace);
    }
    let expected = ns * na * ns;
    if instance.rewards.len() != expected {
        out.push(Violation::RewardShape { expected, found: instance.rewards.len() });
    } else if let Some(idx) = instance.rewards.iter().position(|r| !r.is_finite()) {
        out.push(Violation::NonFiniteReward {
            s: idx / (na * ns),
            a: (idx / ns) % na,
            next: idx % ns,
        });
    }
    let g = instance.discount;
    if !(0.0..1.0).contains(&g) {
        out.push(Violation::DiscountOutOfRange(g));
    }
    if instance.initial_dist.len() != ns {
        out.push(Violation::InitialDistShape { expected: ns, found: instance.initial_dist.len() });
    } else if !is_probability_vector(&instance.initial_dist, SIMPLEX_TOL) {
        out.push(Violation::InitialDistNotSimplex);
    }
    if instance.state_names.len() != ns {
        out.push(Violation::NameCount {
            what: "state",
            expected: ns,
            found: instance.state_names.len(),
        });
    }
    if instance.action_names.len() != na {
        out.push(Violation::NameCount {
            what: "action",
            expected: na,
            found: instance.action_names.len(),
        });
    }
    out
}

/// Errors with every violation when the instance is not well-formed.
pub fn ensure_valid(instance: &MdpInstance) -> Result<()> {
    let v = validate_instance(instance);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(v.iter().map(|x| x.to_string()).collect()))
    }
}

/// A fixed transition kernel `P[s][a][s']`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    pub n_states: usize,
    pub n_actions: usize,
    pub p: Vec<f64>,
}

impl TransitionKernel {
    pub fn new(n_states: usize, n_actions: usize, p: Vec<f64>) -> Self {
        Self { n_states, n_actions, p }
    }

    #[inline]
    pub fn row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.n_actions + a) * self.n_states;
        &self.p[start..start + self.n_states]
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize, next: usize) -> f64 {
        self.p[(s * self.n_actions + a) * self.n_states + next]
    }

    /// The `actions x states` block of state `s`.
    pub fn block(&self, s: usize) -> &[f64] {
        let len = self.n_actions * self.n_states;
        &self.p[s * len..(s + 1) * len]
    }

    pub fn validate(&self) -> Vec<Violation> {
        let expected = self.n_states * self.n_actions * self.n_states;
        if self.p.len() != expected {
            return vec![Violation::KernelShape { expected, found: self.p.len() }];
        }
        let mut out = Vec::new();
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                if !is_probability_vector(self.row(s, a), SIMPLEX_TOL) {
                    out.push(Violation::KernelRow { s, a });
                }
            }
        }
        out
    }
}

/// A stationary randomized policy `π[s][a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPolicy {
    pub n_states: usize,
    pub n_actions: usize,
    pub pi: Vec<f64>,
}

impl StationaryPolicy {
    pub fn new(n_states: usize, n_actions: usize, pi: Vec<f64>) -> Result<Self> {
        if pi.len() != n_states * n_actions {
            return Err(Error::Dimension(format!(
                "policy has {} entries, expected {}",
                pi.len(),
                n_states * n_actions
            )));
        }
        let policy = Self { n_states, n_actions, pi };
        for s in 0..n_states {
            if !is_probability_vector(policy.row(s), 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "policy row {s} is not a probability vector"
                )));
            }
        }
        Ok(policy)
    }

    /// One-hot policy taking `actions[s]` in state `s`.
    pub fn deterministic(n_actions: usize, actions: &[usize]) -> Self {
        let mut pi = vec![0.0; actions.len() * n_actions];
        for (s, &a) in actions.iter().enumerate() {
            pi[s * n_actions + a] = 1.0;
        }
        Self { n_states: actions.len(), n_actions, pi }
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        Self { n_states, n_actions, pi: vec![1.0 / n_actions as f64; n_states * n_actions] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_states = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        Self::new(n_states, n_actions, rows.into_iter().flatten().collect())
    }

    #[inline]
    pub fn row(&self, s: usize) -> &[f64] {
        &self.pi[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn set_row(&mut self, s: usize, row: &[f64]) {
        self.pi[s * self.n_actions..(s + 1) * self.n_actions].copy_from_slice(row);
    }

    /// Largest absolute entry difference against `other`.
    pub fn distance(&self, other: &StationaryPolicy) -> f64 {
        self.pi.iter().zip(&other.pi).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

/// A value vector indexed by state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
    }

    pub fn sup_distance(&self, other: &ValueFunction) -> f64 {
        self.0.iter().zip(&other.0).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    pub fn shifted(&self, c: f64) -> ValueFunction {
        ValueFunction(self.0.iter().map(|x| x + c).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ValueFunction {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for ValueFunction {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for ValueFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// One-step lookahead `Σ_{s'} P(s'|s,a) (r(s,a,s') + γ v(s'))` for a single
/// kernel row.
#[inline]
pub fn lookahead(row: &[f64], rewards: &[f64], gamma: f64, v: &[f64]) -> f64 {
    row.iter()
        .zip(rewards)
        .zip(v)
        .map(|((p, r), x)| p * (r + gamma * x))
        .sum()
}

fn check_policy_kernel(
    policy: &StationaryPolicy,
    kernel: &TransitionKernel,
    instance: &MdpInstance,
) -> Result<()> {
    instance.check_dims("policy", policy.n_states, policy.n_actions)?;
    instance.check_dims("kernel", kernel.n_states, kernel.n_actions)?;
    let expected = instance.n_states * instance.n_actions * instance.n_states;
    if kernel.p.len() != expected || instance.rewards.len() != expected {
        return Err(Error::Dimension("kernel or reward tensor has the wrong length".into()));
    }
    Ok(())
}

/// The nominal policy Bellman operator `T^{π,P} v`.
pub fn nominal_bellman(
    v: &ValueFunction,
    policy: &StationaryPolicy,
    kernel: &TransitionKernel,
    instance: &MdpInstance,
) -> Result<ValueFunction> {
    check_policy_kernel(policy, kernel, instance)?;
    if v.len() != instance.n_states {
        return Err(Error::Dimension(format!(
            "value has {} entries, instance has {} states",
            v.len(),
            instance.n_states
        )));
    }
    let gamma = instance.discount;
    let out = (0..instance.n_states)
        .map(|s| {
            policy
                .row(s)
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(a, &w)| w * lookahead(kernel.row(s, a), instance.reward_row(s, a), gamma, v))
                .sum()
        })
        .collect();
    Ok(ValueFunction(out))
}

/// Policy-averaged transition matrix `P_π` (row-major `S x S`) and expected
/// one-step reward `r_π`.
pub fn policy_matrices(
    policy: &StationaryPolicy,
    kernel: &TransitionKernel,
    instance: &MdpInstance,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_policy_kernel(policy, kernel, instance)?;
    let ns = instance.n_states;
    let mut p_pi = vec![0.0; ns * ns];
    let mut r_pi = vec![0.0; ns];
    for s in 0..ns {
        let (p_row, r) = state_policy_row(policy.row(s), kernel.block(s), s, instance);
        p_pi[s * ns..(s + 1) * ns].copy_from_slice(&p_row);
        r_pi[s] = r;
    }
    Ok((p_pi, r_pi))
}

/// `(P_π(s,.), r_π(s))` for one state given its policy row and its
/// `actions x states` kernel block.
pub fn state_policy_row(
    pi_row: &[f64],
    block: &[f64],
    s: usize,
    instance: &MdpInstance,
) -> (Vec<f64>, f64) {
    let ns = instance.n_states;
    let mut p_row = vec![0.0; ns];
    let mut r = 0.0;
    for (a, &w) in pi_row.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let row = &block[a * ns..(a + 1) * ns];
        let rewards = instance.reward_row(s, a);
        for next in 0..ns {
            p_row[next] += w * row[next];
            r += w * row[next] * rewards[next];
        }
    }
    (p_row, r)
}

/// Solves `(I - γ P_π) V = r_π` by dense LU factorization.
pub fn solve_policy_system(p_pi: &[f64], r_pi: &[f64], gamma: f64) -> Result<ValueFunction> {
    let n = r_pi.len();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - gamma * p_pi[i * n + j]
    });
    let b = DVector::from_column_slice(r_pi);
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular policy evaluation system".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite policy value".into()));
    }
    Ok(ValueFunction(x.iter().copied().collect()))
}

/// Exact value `V^{π,P}` of a stationary policy under a fixed kernel.
pub fn nominal_value(
    policy: &StationaryPolicy,
    kernel: &TransitionKernel,
    instance: &MdpInstance,
) -> Result<ValueFunction> {
    let (p_pi, r_pi) = policy_matrices(policy, kernel, instance)?;
    solve_policy_system(&p_pi, &r_pi, instance.discount)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_state(x: f64, gamma: f64) -> (MdpInstance, TransitionKernel) {
        // Start -> Start w.p. x, End absorbing; reward 1 from Start.
        let inst = MdpInstance::new(2, 1, vec![1.0, 1.0, 0.0, 0.0], gamma, vec![1.0, 0.0])
            .with_names(&["Start", "End"], &["go"]);
        let kernel = TransitionKernel::new(2, 1, vec![x, 1.0 - x, 0.0, 1.0]);
        (inst, kernel)
    }

    fn random_instance(rng: &mut ChaCha8Rng, ns: usize, na: usize) -> (MdpInstance, TransitionKernel) {
        let rewards = (0..ns * na * ns).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gamma = rng.gen_range(0.1..0.95);
        let mut mu = vec![0.0; ns];
        mu[0] = 1.0;
        let mut p = Vec::with_capacity(ns * na * ns);
        for _ in 0..ns * na {
            let row: Vec<f64> = (0..ns).map(|_| rng.gen_range(0.0..1.0)).collect();
            let z: f64 = row.iter().sum();
            p.extend(row.iter().map(|x| x / z));
        }
        (MdpInstance::new(ns, na, rewards, gamma, mu), TransitionKernel::new(ns, na, p))
    }

    fn random_policy(rng: &mut ChaCha8Rng, ns: usize, na: usize) -> StationaryPolicy {
        let mut pi = Vec::new();
        for _ in 0..ns {
            let row: Vec<f64> = (0..na).map(|_| rng.gen_range(0.01..1.0)).collect();
            let z: f64 = row.iter().sum();
            pi.extend(row.iter().map(|x| x / z));
        }
        StationaryPolicy::new(ns, na, pi).unwrap()
    }

    #[test]
    fn validation_accepts_well_formed() {
        let (inst, kernel) = two_state(0.5, 0.5);
        assert!(validate_instance(&inst).is_empty());
        assert!(kernel.validate().is_empty());
    }

    #[test]
    fn validation_reports_bad_initial_dist() {
        let (mut inst, _) = two_state(0.5, 0.5);
        inst.initial_dist = vec![0.6, 0.6];
        let v = validate_instance(&inst);
        assert_eq!(v, vec![Violation::InitialDistNotSimplex]);
        assert_eq!(v[0].to_string(), "initial_dist not a probability vector");
    }

    #[test]
    fn validation_reports_discount_one() {
        let (mut inst, _) = two_state(0.5, 0.5);
        inst.discount = 1.0;
        let v = validate_instance(&inst);
        assert_eq!(v, vec![Violation::DiscountOutOfRange(1.0)]);
        assert!(v[0].to_string().starts_with("discount out of range"));
    }

    #[test]
    fn validation_reports_shape_and_rows() {
        let (mut inst, mut kernel) = two_state(0.5, 0.5);
        inst.rewards.pop();
        assert!(matches!(validate_instance(&inst)[0], Violation::RewardShape { .. }));
        kernel.p[0] = 0.7;
        assert_eq!(kernel.validate(), vec![Violation::KernelRow { s: 0, a: 0 }]);
    }

    #[test]
    fn bellman_zero_value_is_one_step_reward() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (inst, kernel) = random_instance(&mut rng, 3, 2);
        let pi = random_policy(&mut rng, 3, 2);
        let out = nominal_bellman(&ValueFunction::zeros(3), &pi, &kernel, &inst).unwrap();
        let (_, r_pi) = policy_matrices(&pi, &kernel, &inst).unwrap();
        for s in 0..3 {
            assert_abs_diff_eq!(out[s], r_pi[s], epsilon = 1e-14);
        }
    }

    #[test]
    fn bellman_two_state_closed_form() {
        let gamma = 0.5;
        for &x in &[0.0, 0.3, 1.0] {
            let (inst, kernel) = two_state(x, gamma);
            let v0 = 1.7;
            let pi = StationaryPolicy::deterministic(1, &[0, 0]);
            let out = nominal_bellman(&ValueFunction(vec![v0, 0.0]), &pi, &kernel, &inst).unwrap();
            assert_abs_diff_eq!(out[0], 1.0 + gamma * x * v0, epsilon = 1e-15);
            assert_abs_diff_eq!(out[1], 0.0);
        }
    }

    #[test]
    fn bellman_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let (inst, kernel) = random_instance(&mut rng, 3, 3);
            let pi = random_policy(&mut rng, 3, 3);
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let out = nominal_bellman(&ValueFunction(v.clone()), &pi, &kernel, &inst).unwrap();
            for s in 0..3 {
                let mut acc = 0.0;
                for a in 0..3 {
                    for n in 0..3 {
                        acc += pi.row(s)[a]
                            * kernel.get(s, a, n)
                            * (inst.reward(s, a, n) + inst.discount * v[n]);
                    }
                }
                assert_abs_diff_eq!(out[s], acc, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn value_two_state_geometric_series() {
        for &x in &[0.0, 0.25, 0.5, 0.9] {
            let (inst, kernel) = two_state(x, 0.5);
            let pi = StationaryPolicy::deterministic(1, &[0, 0]);
            let v = nominal_value(&pi, &kernel, &inst).unwrap();
            assert_abs_diff_eq!(v[0], 1.0 / (1.0 - x / 2.0), epsilon = 1e-13);
            assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn value_zero_discount_is_one_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (mut inst, kernel) = random_instance(&mut rng, 4, 2);
        inst.discount = 0.0;
        let pi = random_policy(&mut rng, 4, 2);
        let v = nominal_value(&pi, &kernel, &inst).unwrap();
        let (_, r_pi) = policy_matrices(&pi, &kernel, &inst).unwrap();
        for s in 0..4 {
            assert_abs_diff_eq!(v[s], r_pi[s], epsilon = 1e-14);
        }
    }

    #[test]
    fn value_matches_truncated_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (inst, kernel) = random_instance(&mut rng, 4, 2);
            let pi = random_policy(&mut rng, 4, 2);
            let v = nominal_value(&pi, &kernel, &inst).unwrap();
            let (p_pi, r_pi) = policy_matrices(&pi, &kernel, &inst).unwrap();
            // Σ_{t<T} γ^t P_π^t r_π with γ^T R/(1-γ) < 1e-9.
            let gamma = inst.discount;
            let horizon = inst.horizon_for(1e-10);
            let mut term = r_pi.clone();
            let mut acc = vec![0.0; 4];
            let mut g = 1.0;
            for _ in 0..horizon {
                for s in 0..4 {
                    acc[s] += g * term[s];
                }
                let next: Vec<f64> = (0..4)
                    .map(|s| (0..4).map(|j| p_pi[s * 4 + j] * term[j]).sum())
                    .collect();
                term = next;
                g *= gamma;
            }
            for s in 0..4 {
                assert_abs_diff_eq!(v[s], acc[s], epsilon = 1e-9);
            }
            let tv = nominal_bellman(&v, &pi, &kernel, &inst).unwrap();
            assert!(tv.sup_distance(&v) <= 1e-10);
            assert!(v.sup_norm() <= inst.value_bound() + 1e-12);
        }
    }

    #[test]
    fn bellman_monotone_and_contractive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (inst, kernel) = random_instance(&mut rng, 3, 2);
            let pi = random_policy(&mut rng, 3, 2);
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let w: Vec<f64> = v.iter().map(|x| x + rng.gen_range(0.0..2.0)).collect();
            let (v, w) = (ValueFunction(v), ValueFunction(w));
            let tv = nominal_bellman(&v, &pi, &kernel, &inst).unwrap();
            let tw = nominal_bellman(&w, &pi, &kernel, &inst).unwrap();
            for s in 0..3 {
                assert!(tv[s] <= tw[s] + 1e-12);
            }
            assert!(tv.sup_distance(&tw) <= inst.discount * v.sup_distance(&w) + 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let (inst, kernel) = two_state(0.5, 0.5);
        let pi = StationaryPolicy::deterministic(1, &[0, 0, 0]);
        assert!(matches!(
            nominal_value(&pi, &kernel, &inst),
            Err(Error::Dimension(_))
        ));
    }
}
