//! Fixtures shared by the benchmarks.

use aamdp_core::evaluator::random_robust_instance;
use aamdp_core::{KernelDistribution, MdpInstance, RiskSpec, StationaryPolicy, ValueFunction};

pub const SPECS: [RiskSpec; 7] = [
    RiskSpec::Expectation,
    RiskSpec::EssInf,
    RiskSpec::EssSup,
    RiskSpec::Var(0.5),
    RiskSpec::Cvar(0.5),
    RiskSpec::Erm(1.0),
    RiskSpec::Evar(0.5),
];

pub struct Fixture {
    pub instance: MdpInstance,
    pub nu: KernelDistribution,
    pub policy: StationaryPolicy,
    pub v: ValueFunction,
}

/// A seeded random robust instance with a uniform policy and a fixed,
/// non-constant value function.
pub fn fixture(n_states: usize, n_actions: usize, max_scenarios: usize, seed: u64) -> Fixture {
    let (instance, nu) = random_robust_instance(n_states, n_actions, max_scenarios, 0.9, seed).expect("valid sizes");
    let policy = StationaryPolicy::uniform(n_states, n_actions);
    let v = ValueFunction((0..n_states).map(|s| (s as f64 * 0.7).sin()).collect());
    Fixture { instance, nu, policy, v }
}

/// Deterministic pseudo-random payoff matrix with entries in [-1, 1].
pub fn payoff_matrix(rows: usize, cols: usize, seed: u64) -> Vec<f64> {
    let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..rows * cols)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect()
}
