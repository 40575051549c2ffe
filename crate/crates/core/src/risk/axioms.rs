//! Randomized probes of the structural properties of a risk measure.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::distribution::{convolve_independent, Combine, DiscreteDistribution};
use super::measure::RiskSpec;
use crate::error::{Error, Result};

/// A probed property holds when its worst violation is at most this.
pub const AXIOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    LawInvariance,
    Monotonicity,
    TranslationInvariance,
    PositiveHomogeneity,
    /// `ρ(X + Y) = ρ(X) + ρ(Y)` for independent `X, Y`.
    AdditiveIndependence,
    /// `ρ(XY) = ρ(X) ρ(Y)` for independent nonnegative `X, Y`.
    MultiplicativeIndependence,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::LawInvariance,
        Axiom::Monotonicity,
        Axiom::TranslationInvariance,
        Axiom::PositiveHomogeneity,
        Axiom::AdditiveIndependence,
        Axiom::MultiplicativeIndependence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::LawInvariance => "law-invariance",
            Axiom::Monotonicity => "monotonicity",
            Axiom::TranslationInvariance => "translation-invariance",
            Axiom::PositiveHomogeneity => "positive-homogeneity",
            Axiom::AdditiveIndependence => "additive-independence",
            Axiom::MultiplicativeIndependence => "multiplicative-independence",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub max_violation: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub spec: RiskSpec,
    pub trials: usize,
    pub seed: u64,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("every axiom is probed")
    }

    pub fn holds(&self, axiom: Axiom) -> bool {
        self.get(axiom).holds
    }

    /// Monotone and translation-invariant.
    pub fn monetary(&self) -> bool {
        self.holds(Axiom::Monotonicity) && self.holds(Axiom::TranslationInvariance)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "axioms for {} ({} trials, seed {})", self.spec, self.trials, self.seed)?;
        for r in &self.results {
            writeln!(
                f,
                "  {:<28} {:<5} max violation {:.3e}",
                r.axiom.name(),
                if r.holds { "ok" } else { "FAIL" },
                r.max_violation
            )?;
        }
        Ok(())
    }
}

fn random_atoms(rng: &mut ChaCha8Rng, nonnegative: bool) -> Vec<(f64, f64)> {
    let n = rng.gen_range(1..=5);
    let lattice = rng.gen_bool(0.5);
    let mut weights: Vec<f64> = if rng.gen_bool(0.3) {
        vec![1.0; n]
    } else {
        (0..n).map(|_| rng.gen_range(0.05..1.0)).collect()
    };
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    weights
        .into_iter()
        .map(|w| {
            let x = match (lattice, nonnegative) {
                (true, false) => rng.gen_range(-2..=2) as f64,
                (true, true) => rng.gen_range(0..=3) as f64 * 0.5,
                (false, false) => rng.gen_range(-3.0..3.0),
                (false, true) => rng.gen_range(0.0..2.0),
            };
            (x, w)
        })
        .collect()
}

/// Probes every axiom on `n_trials` random distributions (and independent
/// pairs built as product measures) and records the worst violation.
pub fn axiom_probe(spec: &RiskSpec, n_trials: usize, seed: u64) -> Result<AxiomReport> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be at least 1".into()));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0_f64; 6];
    let rho = |d: &DiscreteDistribution| spec.eval_canonical(d);

    for _ in 0..n_trials {
        let raw = random_atoms(&mut rng, false);
        let x = DiscreteDistribution::new(raw.clone())?;
        let rx = rho(&x);

        // Permute and split an atom.
        let mut shuffled = raw.clone();
        shuffled.shuffle(&mut rng);
        let k = rng.gen_range(0..shuffled.len());
        let (v, w) = shuffled[k];
        shuffled[k] = (v, w / 2.0);
        shuffled.push((v, w / 2.0));
        let same_law = DiscreteDistribution::new(shuffled)?;
        worst[0] = worst[0].max((rho(&same_law) - rx).abs());

        // Coupled nonnegative shift.
        let shifted: Vec<(f64, f64)> = raw
            .iter()
            .map(|&(v, w)| {
                let delta = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.5) };
                (v + delta, w)
            })
            .collect();
        let up = DiscreteDistribution::new(shifted)?;
        worst[1] = worst[1].max(rx - rho(&up));

        let c = rng.gen_range(-5.0..5.0);
        worst[2] = worst[2].max((rho(&x.shift(c)) - rx - c).abs());

        let lambda = rng.gen_range(0.1..3.0);
        worst[3] = worst[3].max((rho(&x.scale(lambda)) - lambda * rx).abs());

        let y = DiscreteDistribution::new(random_atoms(&mut rng, false))?;
        let sum = convolve_independent(&x, &y, Combine::Sum)?;
        worst[4] = worst[4].max((rho(&sum) - rx - rho(&y)).abs());

        let p = DiscreteDistribution::new(random_atoms(&mut rng, true))?;
        let q = DiscreteDistribution::new(random_atoms(&mut rng, true))?;
        let prod = convolve_independent(&p, &q, Combine::Product)?;
        worst[5] = worst[5].max((rho(&prod) - rho(&p) * rho(&q)).abs());
    }

    let results = Axiom::ALL
        .iter()
        .zip(worst)
        .map(|(&axiom, v)| {
            let v = v.max(0.0);
            AxiomResult { axiom, max_violation: v, holds: v <= AXIOM_TOL }
        })
        .collect();
    Ok(AxiomReport { spec: *spec, trials: n_trials, seed, results })
}
