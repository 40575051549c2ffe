//! The seven law-invariant risk measures, evaluated on canonical
//! distributions. Larger is better throughout (returns, not losses): VaR,
//! CVaR and EVaR look at the lower tail.

use std::fmt;
use std::str::FromStr;

use super::distribution::DiscreteDistribution;
use crate::error::{Error, Result};

/// Probability ties within this margin resolve upward in VaR.
const VAR_TIE_TOL: f64 = 1e-12;

/// Points on the initial EVaR grid before golden-section refinement.
const EVAR_GRID: usize = 200;

/// A risk measure with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiskSpec {
    Expectation,
    EssInf,
    EssSup,
    /// Upper `(1-α)`-quantile, `α ∈ (0,1)`.
    Var(f64),
    /// Mean of the worst `(1-α)` mass, `α ∈ [0,1]`.
    Cvar(f64),
    /// Exponential certainty equivalent `(1/β) log E e^{βX}`, `β ∈ ℝ`.
    Erm(f64),
    /// Entropic value-at-risk at level `α ∈ (0,1)`.
    Evar(f64),
}

impl RiskSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            RiskSpec::Var(a) if !(a > 0.0 && a < 1.0) => bad(format!("var alpha {a} not in (0,1)")),
            RiskSpec::Cvar(a) if !(0.0..=1.0).contains(&a) => {
                bad(format!("cvar alpha {a} not in [0,1]"))
            }
            RiskSpec::Erm(b) if !b.is_finite() => bad(format!("erm beta {b} not finite")),
            RiskSpec::Evar(a) if !(a > 0.0 && a < 1.0) => {
                bad(format!("evar alpha {a} not in (0,1)"))
            }
            _ => Ok(()),
        }
    }

    /// `ρ(X)` for `X ~ dist`.
    pub fn eval(&self, dist: &DiscreteDistribution) -> Result<f64> {
        self.validate()?;
        if dist.is_empty() {
            return Err(Error::InvalidDistribution("empty atom list".into()));
        }
        Ok(self.eval_canonical(dist))
    }

    pub(crate) fn eval_canonical(&self, dist: &DiscreteDistribution) -> f64 {
        match *self {
            RiskSpec::Expectation => dist.mean(),
            RiskSpec::EssInf => dist.min(),
            RiskSpec::EssSup => dist.max(),
            RiskSpec::Var(alpha) => value_at_risk(dist, alpha),
            RiskSpec::Cvar(alpha) => cvar(dist, alpha),
            RiskSpec::Erm(beta) => erm(dist, beta),
            RiskSpec::Evar(alpha) => evar(dist, alpha),
        }
    }

    /// Whether the risk measure is known to satisfy both dynamic-programming
    /// conditions for the given sampling mode.
    pub fn dp_compatible(&self, resampled: bool) -> bool {
        match self {
            RiskSpec::EssInf | RiskSpec::EssSup => true,
            RiskSpec::Expectation => resampled,
            _ => false,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RiskSpec::Expectation => "expectation",
            RiskSpec::EssInf => "essinf",
            RiskSpec::EssSup => "esssup",
            RiskSpec::Var(_) => "var",
            RiskSpec::Cvar(_) => "cvar",
            RiskSpec::Erm(_) => "erm",
            RiskSpec::Evar(_) => "evar",
        }
    }
}

/// Free-function form of [`RiskSpec::eval`].
pub fn rho_eval(spec: &RiskSpec, dist: &DiscreteDistribution) -> Result<f64> {
    spec.eval(dist)
}

impl fmt::Display for RiskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiskSpec::Var(p) | RiskSpec::Cvar(p) | RiskSpec::Erm(p) | RiskSpec::Evar(p) => {
                write!(f, "{}:{}", self.name(), p)
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for RiskSpec {
    type Err = Error;

    /// Grammar: `expectation | essinf | esssup | var:<a> | cvar:<a> | erm:<b> | evar:<a>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, param) = match s.split_once(':') {
            Some((h, p)) => (h.trim(), Some(p.trim())),
            None => (s, None),
        };
        let number = |p: Option<&str>| -> Result<f64> {
            let p = p.ok_or_else(|| {
                Error::InvalidParameter(format!("risk `{head}` needs a parameter, e.g. `{head}:0.5`"))
            })?;
            p.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad risk parameter `{p}`")))
        };
        let no_param = |spec: RiskSpec| -> Result<RiskSpec> {
            match param {
                None => Ok(spec),
                Some(_) => Err(Error::InvalidParameter(format!("risk `{head}` takes no parameter"))),
            }
        };
        let spec = match head.to_ascii_lowercase().as_str() {
            "expectation" | "mean" => no_param(RiskSpec::Expectation)?,
            "essinf" => no_param(RiskSpec::EssInf)?,
            "esssup" => no_param(RiskSpec::EssSup)?,
            "var" => RiskSpec::Var(number(param)?),
            "cvar" => RiskSpec::Cvar(number(param)?),
            "erm" => RiskSpec::Erm(number(param)?),
            "evar" => RiskSpec::Evar(number(param)?),
            other => return Err(Error::InvalidParameter(format!("unknown risk measure `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `inf{x : P(X <= x) > 1 - α}` on the canonical CDF.
fn value_at_risk(dist: &DiscreteDistribution, alpha: f64) -> f64 {
    let level = 1.0 - alpha;
    let mut cum = 0.0;
    for &(x, w) in dist.atoms() {
        cum += w;
        if cum > level + VAR_TIE_TOL {
            return x;
        }
    }
    dist.max()
}

/// Average of the lowest `1 - α` probability mass, splitting the boundary
/// atom. `α = 0` is the mean and `α = 1` the essential infimum.
fn cvar(dist: &DiscreteDistribution, alpha: f64) -> f64 {
    let mass = 1.0 - alpha;
    if mass <= 0.0 {
        return dist.min();
    }
    if alpha <= 0.0 {
        return dist.mean();
    }
    let mut remaining = mass;
    let mut acc = 0.0;
    for &(x, w) in dist.atoms() {
        let take = w.min(remaining);
        acc += take * x;
        remaining -= take;
        if remaining <= 0.0 {
            break;
        }
    }
    acc / (mass - remaining.max(0.0))
}

fn erm(dist: &DiscreteDistribution, beta: f64) -> f64 {
    if beta.abs() < 1e-12 {
        return dist.mean();
    }
    // Shift by the atom maximizing βx so every exponent is <= 0.
    let m = if beta > 0.0 { dist.max() } else { dist.min() };
    let s: f64 = dist.atoms().iter().map(|&(x, w)| w * (beta * (x - m)).exp()).sum();
    m + s.ln() / beta
}

/// `t ↦ -t log E exp(-(X - min)/t) + t log(1-α) + min`, the EVaR objective
/// written in the temperature `t = 1/β`. Jointly concave in `(X, t)`.
pub(crate) fn evar_objective(dist: &DiscreteDistribution, log_level: f64, t: f64) -> f64 {
    let m = dist.min();
    if t <= 0.0 {
        return m;
    }
    let s: f64 = dist.atoms().iter().map(|&(x, w)| w * (-(x - m) / t).exp()).sum();
    m - t * s.ln() + t * log_level
}

/// Upper end of the temperature range that can hold the EVaR maximizer.
pub(crate) fn evar_t_max(spread: f64, log_level: f64) -> f64 {
    // For t >= this, E[X] + t log(1-α) <= max - 2 spread < min.
    2.0 * spread / (-log_level) + spread
}

/// `EVaR_α(X) = sup_{β>0} ERM_{-β}(X) + log(1-α)/β`, lying between the
/// essential infimum (α → 1) and the mean (α → 0).
///
/// The objective is concave in `t = 1/β` on `[0, t_max]` (with the essential
/// infimum as its `t = 0` limit), so a uniform grid followed by golden-section
/// refinement around the best grid point recovers the supremum.
fn evar(dist: &DiscreteDistribution, alpha: f64) -> f64 {
    let spread = dist.max() - dist.min();
    if spread <= 0.0 {
        return dist.min();
    }
    let log_level = (1.0 - alpha).ln();
    let t_max = evar_t_max(spread, log_level);
    maximize_concave_1d(|t| evar_objective(dist, log_level, t), 0.0, t_max).1
}

/// Grid search followed by golden-section refinement of a unimodal function
/// on `[lo, hi]`. Returns `(argmax, max)`.
pub(crate) fn maximize_concave_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    maximize_concave_1d_grid(f, lo, hi, EVAR_GRID, 1e-12)
}

/// [`maximize_concave_1d`] with a caller-chosen grid size and final
/// bracket width relative to `hi - lo`.
pub(crate) fn maximize_concave_1d_grid(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid: usize,
    rel_width: f64,
) -> (f64, f64) {
    let grid = grid.max(2);
    let step = (hi - lo) / grid as f64;
    let (mut best_i, mut best) = (0usize, f(lo));
    for i in 1..=grid {
        let v = f(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let width = rel_width * (hi - lo).max(f64::MIN_POSITIVE);
    while b - a > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let (t, v) = if fc >= fd { (c, fc) } else { (d, fd) };
    if v >= best {
        (t, v)
    } else {
        (lo + step * best_i as f64, best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(atoms: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(atoms.to_vec()).unwrap()
    }

    #[test]
    fn basic_values() {
        let coin10 = d(&[(0.0, 0.5), (10.0, 0.5)]);
        assert_eq!(RiskSpec::Expectation.eval(&coin10).unwrap(), 5.0);
        assert_eq!(RiskSpec::EssInf.eval(&d(&[(1.0, 0.2), (3.0, 0.8)])).unwrap(), 1.0);
        assert_eq!(RiskSpec::EssSup.eval(&d(&[(1.0, 0.2), (3.0, 0.8)])).unwrap(), 3.0);
        assert_abs_diff_eq!(RiskSpec::Cvar(0.5).eval(&coin10).unwrap(), 0.0);
        assert_eq!(RiskSpec::Var(0.3).eval(&d(&[(1.0, 0.5), (2.0, 0.5)])).unwrap(), 2.0);
        let erm1 = RiskSpec::Erm(1.0).eval(&d(&[(0.0, 0.5), (1.0, 0.5)])).unwrap();
        assert_abs_diff_eq!(erm1, ((1.0 + 1f64.exp()) / 2.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(erm1, 0.620115, epsilon = 1e-6);
    }

    #[test]
    fn constants_are_fixed() {
        let c = DiscreteDistribution::point(-2.5);
        for spec in [
            RiskSpec::Expectation,
            RiskSpec::EssInf,
            RiskSpec::EssSup,
            RiskSpec::Var(0.2),
            RiskSpec::Cvar(0.7),
            RiskSpec::Erm(-3.0),
            RiskSpec::Erm(0.0),
            RiskSpec::Erm(40.0),
            RiskSpec::Evar(0.9),
        ] {
            assert_abs_diff_eq!(spec.eval(&c).unwrap(), -2.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn var_tie_resolves_upward() {
        let coin = d(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(RiskSpec::Var(0.5).eval(&coin).unwrap(), 1.0);
        assert_eq!(RiskSpec::Var(0.6).eval(&coin).unwrap(), 0.0);
    }

    #[test]
    fn cvar_boundaries() {
        let x = d(&[(-1.0, 0.1), (2.0, 0.6), (7.0, 0.3)]);
        assert_eq!(RiskSpec::Cvar(0.0).eval(&x).unwrap(), x.mean());
        assert_eq!(RiskSpec::Cvar(1.0).eval(&x).unwrap(), -1.0);
        // Lowest 0.4 mass: 0.1 at -1 and 0.3 at 2.
        assert_abs_diff_eq!(RiskSpec::Cvar(0.6).eval(&x).unwrap(), (-0.1 + 0.6) / 0.4, epsilon = 1e-14);
    }

    #[test]
    fn erm_limits() {
        let x = d(&[(-1.0, 0.25), (3.0, 0.75)]);
        assert_abs_diff_eq!(RiskSpec::Erm(1e-14).eval(&x).unwrap(), x.mean());
        assert_abs_diff_eq!(RiskSpec::Erm(500.0).eval(&x).unwrap(), 3.0, epsilon = 1e-3);
        assert_abs_diff_eq!(RiskSpec::Erm(-500.0).eval(&x).unwrap(), -1.0, epsilon = 3e-3);
        // No overflow for large |β x|.
        let big = d(&[(-1e3, 0.5), (1e3, 0.5)]);
        assert!(RiskSpec::Erm(10.0).eval(&big).unwrap().is_finite());
        assert!(RiskSpec::Erm(-10.0).eval(&big).unwrap().is_finite());
    }

    #[test]
    fn evar_matches_dense_beta_scan() {
        // Independent check: scan β on a dense log grid of the defining
        // supremum and compare.
        let x = d(&[(0.0, 0.2), (1.0, 0.3), (2.5, 0.5)]);
        for &alpha in &[0.05, 0.3, 0.6, 0.9] {
            let got = RiskSpec::Evar(alpha).eval(&x).unwrap();
            let mut best = x.min();
            for i in 0..200_000 {
                let beta = 10f64.powf(-4.0 + 8.0 * i as f64 / 200_000.0);
                let erm_neg = RiskSpec::Erm(-beta).eval(&x).unwrap();
                best = best.max(erm_neg + (1.0 - alpha).ln() / beta);
            }
            assert_abs_diff_eq!(got, best, epsilon = 1e-6);
            assert!(got >= x.min() - 1e-12 && got <= x.mean() + 1e-12);
        }
    }

    #[test]
    fn evar_essinf_regime() {
        // 1-α below the mass at the minimum: the supremum is the limit β → ∞.
        let x = d(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_abs_diff_eq!(RiskSpec::Evar(0.6).eval(&x).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn parse_and_display() {
        for s in ["expectation", "essinf", "esssup", "var:0.3", "cvar:0.5", "erm:-2", "evar:0.9"] {
            let spec: RiskSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<RiskSpec>().unwrap(), spec);
        }
        assert_eq!("cvar:0.5".parse::<RiskSpec>().unwrap(), RiskSpec::Cvar(0.5));
        assert!("var:1.5".parse::<RiskSpec>().is_err());
        assert!("var".parse::<RiskSpec>().is_err());
        assert!("essinf:2".parse::<RiskSpec>().is_err());
        assert!("median".parse::<RiskSpec>().is_err());
    }

    #[test]
    fn parameter_range_errors() {
        let x = DiscreteDistribution::point(1.0);
        assert!(RiskSpec::Var(0.0).eval(&x).is_err());
        assert!(RiskSpec::Evar(1.0).eval(&x).is_err());
        assert!(RiskSpec::Cvar(1.2).eval(&x).is_err());
        assert!(RiskSpec::Erm(f64::INFINITY).eval(&x).is_err());
    }
}
