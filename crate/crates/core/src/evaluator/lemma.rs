//! The seven-state mixing MDP and its distribution-level fixed-point
//! identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bellman::{KernelDistribution, Scenario};
use crate::error::{Error, Result};
use crate::mdp::MdpInstance;
use crate::risk::{convolve_independent, Combine, DiscreteDistribution, RiskSpec};

pub const LEMMA_STATES: usize = 7;
const START: usize = 0;
const LEFT: usize = 1;
const RIGHT: usize = 2;
const WIN_L: usize = 3;
const LOSE_L: usize = 4;
const WIN_R: usize = 5;
const LOSE_R: usize = 6;

const SUPPORT_TOL: f64 = 1e-12;

pub fn lemma_state_names() -> [&'static str; LEMMA_STATES] {
    ["Start", "Left", "Right", "WinL", "LoseL", "WinR", "LoseR"]
}

/// Independent `(X, Y, Z)` driving the mixing MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaTriple {
    pub x: DiscreteDistribution,
    pub y: DiscreteDistribution,
    pub z: DiscreteDistribution,
}

fn unit_prob(v: f64, what: &str) -> Result<f64> {
    if !(-SUPPORT_TOL..=1.0 + SUPPORT_TOL).contains(&v) {
        return Err(Error::InvalidDistribution(format!("{what} atom maps to {v}, outside [0,1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("discount {gamma} not in (0,1)")));
    }
    Ok(())
}

fn row(target: &[(usize, f64)]) -> Vec<f64> {
    let mut r = vec![0.0; LEMMA_STATES];
    for &(s, p) in target {
        r[s] += p;
    }
    r
}

fn atoms_to_scenarios(
    dist: &DiscreteDistribution,
    what: &str,
    f: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<Vec<Scenario>> {
    dist.atoms()
        .iter()
        .map(|&(v, w)| f(v).map(|block| Scenario { weight: w, block }))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::InvalidDistribution(m) => Error::InvalidDistribution(format!("{what}: {m}")),
            other => other,
        })
}

/// Start moves to Left w.p. `Z`, else Right; Left pays `a` and reaches WinL
/// w.p. `(X-a)/c`; Right pays `b` and reaches WinR w.p. `(Y-b)/d`; Win
/// states pay `c/γ` (`d/γ`) and fall into absorbing, unrewarded Lose states.
#[allow(clippy::too_many_arguments)]
pub fn build_lemma_mdp(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    z: &DiscreteDistribution,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    gamma: f64,
) -> Result<(MdpInstance, KernelDistribution)> {
    check_gamma(gamma)?;
    if c == 0.0 || d == 0.0 || ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("need finite a, b and nonzero finite c, d".into()));
    }
    let n = LEMMA_STATES;
    let mut rewards = vec![0.0; n * n];
    let mut set = |s: usize, r: f64| rewards[s * n..(s + 1) * n].fill(r);
    set(LEFT, a);
    set(RIGHT, b);
    set(WIN_L, c / gamma);
    set(WIN_R, d / gamma);
    let mut init = vec![0.0; n];
    init[START] = 1.0;
    let names = lemma_state_names();
    let instance = MdpInstance::new(n, 1, rewards, gamma, init).with_names(&names, &["go"]);

    let start = atoms_to_scenarios(z, "Z", |v| {
        let p = unit_prob(v, "Z")?;
        Ok(row(&[(LEFT, p), (RIGHT, 1.0 - p)]))
    })?;
    let left = atoms_to_scenarios(x, "X", |v| {
        let p = unit_prob((v - a) / c, "(X-a)/c")?;
        Ok(row(&[(WIN_L, p), (LOSE_L, 1.0 - p)]))
    })?;
    let right = atoms_to_scenarios(y, "Y", |v| {
        let p = unit_prob((v - b) / d, "(Y-b)/d")?;
        Ok(row(&[(WIN_R, p), (LOSE_R, 1.0 - p)]))
    })?;
    let fixed = |to: usize| vec![Scenario { weight: 1.0, block: row(&[(to, 1.0)]) }];
    let per_state =
        vec![start, left, right, fixed(LOSE_L), fixed(LOSE_L), fixed(LOSE_R), fixed(LOSE_R)];
    let nu = KernelDistribution::new(n, 1, per_state)?;
    Ok((instance, nu))
}

fn check_unit_support(d: &DiscreteDistribution, what: &str) -> Result<()> {
    for &(v, _) in d.atoms() {
        unit_prob(v, what)?;
    }
    Ok(())
}

/// `Σ_z P(Z=z) · law(γ(z·U + (1-z)·W))` for independent `U`, `W`.
fn mix(z: &DiscreteDistribution, u: &DiscreteDistribution, w: &DiscreteDistribution, gamma: f64) -> Result<DiscreteDistribution> {
    let parts = z
        .atoms()
        .iter()
        .map(|&(zv, p)| {
            convolve_independent(&u.scale(zv), &w.scale(1.0 - zv), Combine::Sum)
                .map(|d| (p, d.scale(gamma)))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteDistribution::mixture(&parts)
}

/// `|ρ-value − ρ-operator image|` per state of the mixing MDP with
/// `a = b = 0`, `c = d = 1`, computed on distributions in state order.
/// Only `Z` must lie in `[0,1]`; the identities are well defined for any
/// bounded `X`, `Y`.
pub fn lemma_equation_residuals(
    x: &DiscreteDistribution,
    y: &DiscreteDistribution,
    z: &DiscreteDistribution,
    spec: &RiskSpec,
    gamma: f64,
) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    spec.validate()?;
    check_unit_support(z, "Z")?;
    let rho = |d: &DiscreteDistribution| spec.eval_canonical(d);
    let pt = DiscreteDistribution::point;
    let rho_x = rho(x);
    let rho_y = rho(y);
    let win = rho(&pt(1.0 / gamma));
    let lose = rho(&pt(0.0));

    let start_lhs = rho(&mix(z, x, y, gamma)?);
    let start_rhs = rho(&mix(z, &pt(rho_x), &pt(rho_y), gamma)?);
    // Left: value ρ(X); image ρ(γ(X ρ(1/γ) + (1-X) ρ(0))).
    let branch = |d: &DiscreteDistribution| rho(&d.map(|p| gamma * (p * win + (1.0 - p) * lose)));
    let win_rhs = rho(&pt(1.0 / gamma + gamma * lose));
    let lose_rhs = rho(&pt(gamma * lose));
    Ok(vec![
        (start_lhs - start_rhs).abs(),
        (rho_x - branch(x)).abs(),
        (rho_y - branch(y)).abs(),
        (win - win_rhs).abs(),
        (lose - lose_rhs).abs(),
        (win - win_rhs).abs(),
        (lose - lose_rhs).abs(),
    ])
}

fn cdf_margin(d: &DiscreteDistribution, level: f64) -> f64 {
    let mut cum = 0.0;
    let mut margin = f64::INFINITY;
    for &(_, w) in d.atoms() {
        cum += w;
        margin = margin.min((cum - level).abs());
    }
    margin
}

/// Seeded search over two-atom `(X, Y, Z)` with unequal weights for a
/// triple whose Start residual under `VaR_α` exceeds `min_residual`, while
/// every CDF involved stays at least `margin` away from `α` so the verdict
/// is stable under resampling.
pub fn var_witness(
    alpha: f64,
    gamma: f64,
    min_residual: f64,
    margin: f64,
    seed: u64,
    max_tries: usize,
) -> Result<LemmaTriple> {
    let spec = RiskSpec::Var(alpha);
    spec.validate()?;
    check_gamma(gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_atoms = |rng: &mut ChaCha8Rng| {
        let w: f64 = rng.gen_range(0.15..0.85);
        let lo: f64 = rng.gen_range(0.0..0.5);
        let hi: f64 = rng.gen_range(0.5..1.0);
        DiscreteDistribution::canonical(vec![(lo, w), (hi, 1.0 - w)])
    };
    for _ in 0..max_tries {
        let x = two_atoms(&mut rng);
        let y = two_atoms(&mut rng);
        let z = two_atoms(&mut rng);
        let res = lemma_equation_residuals(&x, &y, &z, &spec, gamma)?;
        if res[START] <= min_residual {
            continue;
        }
        let rho_x = spec.eval_canonical(&x);
        let rho_y = spec.eval_canonical(&y);
        let pt = DiscreteDistribution::point;
        let laws = [x.clone(), y.clone(), mix(&z, &x, &y, gamma)?, mix(&z, &pt(rho_x), &pt(rho_y), gamma)?];
        if laws.iter().all(|d| cdf_margin(d, alpha) >= margin) {
            return Ok(LemmaTriple { x, y, z });
        }
    }
    Err(Error::NoConvergence { iterations: max_tries, residual: f64::NAN })
}
