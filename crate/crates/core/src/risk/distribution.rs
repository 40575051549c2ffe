//! Finite-support distributions in canonical form.

use crate::error::{Error, Result};

/// Atoms whose values differ by at most this much are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Default cap on the atom count of a convolution.
pub const DEFAULT_ATOM_BUDGET: usize = 1 << 22;

/// A weighted list of atoms, kept sorted ascending by value with equal
/// values merged and zero-weight atoms dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

fn weight_tol(n: usize) -> f64 {
    1e-12_f64.max(n as f64 * 4.0 * f64::EPSILON)
}

impl DiscreteDistribution {
    /// Validates `(value, weight)` pairs and canonicalizes them.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty atom list".into()));
        }
        let mut total = 0.0;
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite value {x}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!("invalid weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > weight_tol(atoms.len()) {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
        }
        Ok(Self::canonical(atoms))
    }

    /// Uniform weights over `values`.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty atom list".into()));
        }
        let w = 1.0 / values.len() as f64;
        Self::new(values.iter().map(|&x| (x, w)).collect())
    }

    pub fn point(value: f64) -> Self {
        Self { atoms: vec![(value, 1.0)] }
    }

    /// Sorts, merges and renormalizes; inputs are trusted to be a law.
    pub(crate) fn canonical(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.retain(|&(_, w)| w > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        let mut anchor = f64::NEG_INFINITY;
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if x - anchor <= MERGE_TOL => last.1 += w,
                _ => {
                    anchor = x;
                    merged.push((x, w));
                }
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if total > 0.0 && total != 1.0 {
            for a in &mut merged {
                a.1 /= total;
            }
        }
        Self { atoms: merged }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|(x, w)| x * w).sum()
    }

    /// Pushes every atom through `f` (weights unchanged).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::canonical(self.atoms.iter().map(|&(x, w)| (f(x), w)).collect())
    }

    pub fn shift(&self, c: f64) -> Self {
        self.map(|x| x + c)
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map(|x| lambda * x)
    }

    /// Mixture `Σ_i p_i D_i`; the mixing weights must form a law.
    pub fn mixture(parts: &[(f64, DiscreteDistribution)]) -> Result<Self> {
        let mut atoms = Vec::new();
        for (p, d) in parts {
            atoms.extend(d.atoms.iter().map(|&(x, w)| (x, p * w)));
        }
        Self::new(atoms)
    }

    /// Cumulative probability `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().take_while(|a| a.0 <= x).map(|a| a.1).sum()
    }
}

/// How two independent variables are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Sum,
    Product,
}

/// Law of `X ⊕ Y` for independent `X ~ d1`, `Y ~ d2`: the product measure on
/// atom pairs, merged to canonical form.
pub fn convolve_independent(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
    combine: Combine,
) -> Result<DiscreteDistribution> {
    convolve_independent_with_budget(d1, d2, combine, DEFAULT_ATOM_BUDGET)
}

pub fn convolve_independent_with_budget(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
    combine: Combine,
    budget: usize,
) -> Result<DiscreteDistribution> {
    let needed = d1.len().saturating_mul(d2.len());
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut atoms = Vec::with_capacity(needed);
    for &(x, wx) in d1.atoms() {
        for &(y, wy) in d2.atoms() {
            let v = match combine {
                Combine::Sum => x + y,
                Combine::Product => x * y,
            };
            atoms.push((v, wx * wy));
        }
    }
    Ok(DiscreteDistribution::canonical(atoms))
}

/// Wasserstein-1 distance `∫_0^1 |F1^{-1}(u) - F2^{-1}(u)| du`, computed
/// exactly by walking the merged quantile breakpoints.
pub fn w1_distance(d1: &DiscreteDistribution, d2: &DiscreteDistribution) -> f64 {
    let (a, b) = (d1.atoms(), d2.atoms());
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (a[0].1, b[0].1);
    let mut u = 0.0;
    let mut total = 0.0;
    loop {
        let next = ca.min(cb);
        total += (next - u).max(0.0) * (a[i].0 - b[j].0).abs();
        u = next;
        let a_done = ca <= next && i + 1 < a.len();
        let b_done = cb <= next && j + 1 < b.len();
        if a_done {
            i += 1;
            ca += a[i].1;
        }
        if b_done {
            j += 1;
            cb += b[j].1;
        }
        if !a_done && !b_done {
            break;
        }
    }
    total
}
