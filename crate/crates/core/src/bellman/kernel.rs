use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{is_probability_vector, TransitionKernel, SIMPLEX_TOL};

/// One atom of a state's kernel law: a weight and an `actions x states`
/// transition block.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub weight: f64,
    pub block: Vec<f64>,
}

/// Finite-support law of a random transition kernel with product
/// structure: the scenario of each state is drawn independently.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDistribution {
    pub n_states: usize,
    pub n_actions: usize,
    per_state: Vec<Vec<Scenario>>,
}

impl KernelDistribution {
    pub fn new(n_states: usize, n_actions: usize, per_state: Vec<Vec<Scenario>>) -> Result<Self> {
        let nu = Self { n_states, n_actions, per_state };
        let problems = nu.validate();
        if problems.is_empty() {
            Ok(nu)
        } else {
            Err(Error::InvalidInstance(problems))
        }
    }

    /// Point mass on a fixed kernel.
    pub fn dirac(kernel: &TransitionKernel) -> Self {
        let per_state = (0..kernel.n_states)
            .map(|s| vec![Scenario { weight: 1.0, block: kernel.block(s).to_vec() }])
            .collect();
        Self { n_states: kernel.n_states, n_actions: kernel.n_actions, per_state }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.per_state.len() != self.n_states {
            out.push(format!(
                "kernel law covers {} states, expected {}",
                self.per_state.len(),
                self.n_states
            ));
            return out;
        }
        let (ns, na) = (self.n_states, self.n_actions);
        for (s, scenarios) in self.per_state.iter().enumerate() {
            if scenarios.is_empty() {
                out.push(format!("state {s} has no kernel scenarios"));
                continue;
            }
            let mut total = 0.0;
            for (k, sc) in scenarios.iter().enumerate() {
                if !(sc.weight.is_finite() && sc.weight > 0.0) {
                    out.push(format!("state {s} scenario {k}: weight {} not positive", sc.weight));
                }
                total += sc.weight;
                if sc.block.len() != na * ns {
                    out.push(format!(
                        "state {s} scenario {k}: block has {} entries, expected {}",
                        sc.block.len(),
                        na * ns
                    ));
                    continue;
                }
                for a in 0..na {
                    if !is_probability_vector(&sc.block[a * ns..(a + 1) * ns], SIMPLEX_TOL) {
                        out.push(format!("state {s} scenario {k}: row {a} not a probability vector"));
                    }
                }
            }
            if (total - 1.0).abs() > SIMPLEX_TOL.max(scenarios.len() as f64 * 4.0 * f64::EPSILON) {
                out.push(format!("state {s}: scenario weights sum to {total}"));
            }
        }
        out
    }

    pub fn scenarios(&self, s: usize) -> &[Scenario] {
        &self.per_state[s]
    }

    pub fn n_scenarios(&self, s: usize) -> usize {
        self.per_state[s].len()
    }

    /// Number of joint kernels `Π_s K_s`, or `None` on overflow.
    pub fn joint_count(&self) -> Option<usize> {
        self.per_state.iter().try_fold(1usize, |acc, sc| acc.checked_mul(sc.len()))
    }

    /// Kernel obtained by picking scenario `choice[s]` in every state.
    pub fn kernel_from_choice(&self, choice: &[usize]) -> TransitionKernel {
        let mut p = Vec::with_capacity(self.n_states * self.n_actions * self.n_states);
        for (s, &k) in choice.iter().enumerate() {
            p.extend_from_slice(&self.per_state[s][k].block);
        }
        TransitionKernel::new(self.n_states, self.n_actions, p)
    }

    /// Scenario-weighted mean kernel `E[P̃]`.
    pub fn mean_kernel(&self) -> TransitionKernel {
        let len = self.n_actions * self.n_states;
        let mut p = vec![0.0; self.n_states * len];
        for (s, scenarios) in self.per_state.iter().enumerate() {
            let out = &mut p[s * len..(s + 1) * len];
            for sc in scenarios {
                for (o, b) in out.iter_mut().zip(&sc.block) {
                    *o += sc.weight * b;
                }
            }
        }
        TransitionKernel::new(self.n_states, self.n_actions, p)
    }

    /// Decodes joint index `idx < joint_count()` (state 0 varies fastest)
    /// into a scenario choice and its product weight.
    pub fn choice_at(&self, mut idx: usize) -> (Vec<usize>, f64) {
        let mut weight = 1.0;
        let choice = self
            .per_state
            .iter()
            .map(|sc| {
                let k = idx % sc.len();
                idx /= sc.len();
                weight *= sc[k].weight;
                k
            })
            .collect();
        (choice, weight)
    }

    /// Draws one scenario index in state `s`.
    pub fn sample_scenario<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> usize {
        let scenarios = &self.per_state[s];
        if scenarios.len() == 1 {
            return 0;
        }
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (k, sc) in scenarios.iter().enumerate() {
            cum += sc.weight;
            if u < cum {
                return k;
            }
        }
        scenarios.len() - 1
    }

    /// Draws a joint kernel (one scenario per state, independently).
    pub fn sample_choice<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        (0..self.n_states).map(|s| self.sample_scenario(s, rng)).collect()
    }
}

/// Whether one kernel is drawn once (static) or i.i.d. every period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    #[default]
    Static,
    Resampled,
}

impl SamplingMode {
    pub fn is_resampled(self) -> bool {
        self == SamplingMode::Resampled
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Static => "static",
            SamplingMode::Resampled => "resampled",
        })
    }
}

impl FromStr for SamplingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "static" => Ok(SamplingMode::Static),
            "resampled" => Ok(SamplingMode::Resampled),
            other => Err(Error::InvalidParameter(format!("unknown sampling mode `{other}`"))),
        }
    }
}
