//! Ambiguity-averse MDPs: risk measures over a law of transition kernels,
//! the induced Bellman operators, solvers, and policy evaluation with
//! dynamic-programming consistency checks.

pub mod bellman;
pub mod error;
pub mod evaluator;
pub mod mdp;
pub mod risk;
pub mod solvers;

pub use bellman::{GreedyStrategy, KernelDistribution, SamplingMode, Scenario};
pub use error::{Error, Result};
pub use evaluator::{DpCheckReport, EvalEstimate, EvalMethod, EvalParams, McParams, Verdict};
pub use mdp::{MdpInstance, StationaryPolicy, TransitionKernel, ValueFunction};
pub use risk::{DiscreteDistribution, RiskSpec};
pub use solvers::{Algorithm, SolveReport};
