//! Independent oracles and random generators shared by the integration
//! tests. Nothing here calls the solvers under test.
#![allow(dead_code)]

use aamdp_core::bellman::KernelDistribution;
use aamdp_core::mdp::MdpInstance;
use aamdp_core::risk::{DiscreteDistribution, RiskSpec};
use rand::Rng;

pub fn random_dist<R: Rng>(rng: &mut R, max_atoms: usize, lo: f64, hi: f64) -> DiscreteDistribution {
    let n = rng.gen_range(1..=max_atoms);
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = raw.iter().map(|w| (rng.gen_range(lo..=hi), w / total)).collect();
    DiscreteDistribution::new(atoms).unwrap()
}

/// `max_ξ ξ - E[(ξ - X)+] / (1 - α)` over the atoms, or the minimum at α = 1.
pub fn cvar_xi_scan(atoms: &[(f64, f64)], alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
    }
    atoms
        .iter()
        .map(|&(xi, _)| {
            let shortfall: f64 = atoms.iter().map(|&(x, w)| w * (xi - x).max(0.0)).sum();
            xi - shortfall / (1.0 - alpha)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Textbook value of the 2x2 zero-sum game `[[a, b], [c, d]]` (rows are the
/// minimizer's, columns the maximizer's).
pub fn two_by_two_value(q: [f64; 4]) -> f64 {
    let [a, b, c, d] = q;
    let lower = a.min(c).max(b.min(d));
    let upper = a.max(b).min(c.max(d));
    if (upper - lower).abs() < 1e-12 {
        return lower;
    }
    (a * d - b * c) / (a + d - b - c)
}

/// Per joint kernel `j`: rows `P_j(s,a,.)` and expected one-step rewards.
pub struct JointTables {
    pub weights: Vec<f64>,
    pub rows: Vec<Vec<Vec<f64>>>,
    pub rewards: Vec<Vec<f64>>,
}

pub fn joint_tables(nu: &KernelDistribution, inst: &MdpInstance) -> JointTables {
    let (ns, na) = (inst.n_states, inst.n_actions);
    let count: usize = (0..ns).map(|s| nu.n_scenarios(s)).product();
    let mut out = JointTables { weights: vec![], rows: vec![], rewards: vec![] };
    for mut j in 0..count {
        let mut w = 1.0;
        let mut rows = vec![vec![0.0; ns]; ns * na];
        let mut rew = vec![0.0; ns * na];
        for s in 0..ns {
            let k = j % nu.n_scenarios(s);
            j /= nu.n_scenarios(s);
            let sc = &nu.scenarios(s)[k];
            w *= sc.weight;
            for a in 0..na {
                let row = &sc.block[a * ns..(a + 1) * ns];
                rows[s * na + a] = row.to_vec();
                rew[s * na + a] = (0..ns).map(|t| row[t] * inst.reward(s, a, t)).sum();
            }
        }
        out.weights.push(w);
        out.rows.push(rows);
        out.rewards.push(rew);
    }
    out
}

fn aggregate(spec: &RiskSpec, vals: &[f64], weights: &[f64]) -> f64 {
    match spec {
        RiskSpec::Expectation => vals.iter().zip(weights).map(|(v, w)| v * w).sum(),
        RiskSpec::EssInf => vals.iter().copied().fold(f64::INFINITY, f64::min),
        RiskSpec::EssSup => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        other => panic!("oracle does not support {other}"),
    }
}

/// Best value per start state over all deterministic Markov policies of
/// depth `horizon`, one kernel drawn for the whole run.
pub fn static_markov_oracle(nu: &KernelDistribution, inst: &MdpInstance, spec: &RiskSpec, horizon: usize) -> Vec<f64> {
    let tables = joint_tables(nu, inst);
    let ns = inst.n_states;
    let nj = tables.weights.len();
    let mut best = vec![f64::NEG_INFINITY; ns];
    let w0 = vec![0.0; ns * nj];
    static_dfs(&tables, inst, spec, horizon, &w0, &mut best);
    best
}

fn static_dfs(t: &JointTables, inst: &MdpInstance, spec: &RiskSpec, depth: usize, w: &[f64], best: &mut [f64]) {
    let (ns, na) = (inst.n_states, inst.n_actions);
    let nj = t.weights.len();
    let g = inst.discount;
    let rules = na.pow(ns as u32);
    for mut rule in 0..rules {
        let mut next = vec![0.0; ns * nj];
        for s in 0..ns {
            let a = rule % na;
            rule /= na;
            for j in 0..nj {
                let row = &t.rows[j][s * na + a];
                let cont: f64 = (0..ns).map(|u| row[u] * w[u * nj + j]).sum();
                next[s * nj + j] = t.rewards[j][s * na + a] + g * cont;
            }
        }
        if depth == 1 {
            for s in 0..ns {
                let v = aggregate(spec, &next[s * nj..(s + 1) * nj], &t.weights);
                best[s] = best[s].max(v);
            }
        } else {
            static_dfs(t, inst, spec, depth - 1, &next, best);
        }
    }
}

/// As [`static_markov_oracle`] with a fresh kernel every period: the
/// adversarial (or averaging) kernel sequence is resolved backward for each
/// enumerated policy.
pub fn resampled_markov_oracle(nu: &KernelDistribution, inst: &MdpInstance, spec: &RiskSpec, horizon: usize) -> Vec<f64> {
    let mut best = vec![f64::NEG_INFINITY; inst.n_states];
    resampled_dfs(nu, inst, spec, horizon, &vec![0.0; inst.n_states], &mut best);
    best
}

fn resampled_dfs(nu: &KernelDistribution, inst: &MdpInstance, spec: &RiskSpec, depth: usize, w: &[f64], best: &mut [f64]) {
    let (ns, na) = (inst.n_states, inst.n_actions);
    let g = inst.discount;
    for mut rule in 0..na.pow(ns as u32) {
        let mut next = vec![0.0; ns];
        for s in 0..ns {
            let a = rule % na;
            rule /= na;
            let sc = nu.scenarios(s);
            let vals: Vec<f64> = sc
                .iter()
                .map(|k| {
                    let row = &k.block[a * ns..(a + 1) * ns];
                    (0..ns).map(|u| row[u] * (inst.reward(s, a, u) + g * w[u])).sum()
                })
                .collect();
            let weights: Vec<f64> = sc.iter().map(|k| k.weight).collect();
            next[s] = aggregate(spec, &vals, &weights);
        }
        if depth == 1 {
            for s in 0..ns {
                best[s] = best[s].max(next[s]);
            }
        } else {
            resampled_dfs(nu, inst, spec, depth - 1, &next, best);
        }
    }
}
