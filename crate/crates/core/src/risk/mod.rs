//! Risk measures on finite discrete distributions.

mod axioms;
mod distribution;
mod measure;

pub use axioms::{axiom_probe, Axiom, AxiomReport, AxiomResult, AXIOM_TOL};
pub use distribution::{
    convolve_independent, convolve_independent_with_budget, w1_distance, Combine,
    DiscreteDistribution, DEFAULT_ATOM_BUDGET, MERGE_TOL,
};
pub use measure::{rho_eval, RiskSpec};

pub(crate) use measure::{evar_t_max, maximize_concave_1d_grid};
