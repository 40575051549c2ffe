//! Ambiguity-averse Bellman operators and the per-state greedy step.

mod game;
mod greedy;
mod kernel;
mod lp;
mod operator;

pub use game::{solve_by_mwu, solve_matrix_game, GameMethod, GameSolution, Payoff, MWU_MAX_ITERS};
pub use greedy::{
    best_deterministic, maximize_row, GreedyStrategy, StateProblem, GAME_TOL,
    VAR_EXACT_MAX_SCENARIOS,
};
pub use kernel::{KernelDistribution, SamplingMode, Scenario};
pub use lp::{simplex_max, LpSolution};
pub use operator::{
    apply_optimal_operator, apply_policy_operator, greedy_row, state_problem,
    state_value_distribution,
};

