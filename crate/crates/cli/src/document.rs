//! Instance and policy documents (JSON, names instead of indices).

use aamdp_core::bellman::{KernelDistribution, SamplingMode, Scenario};
use aamdp_core::mdp::{MdpInstance, StationaryPolicy};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::Failure;

/// Sums within this distance of 1 are accepted and renormalized.
pub const SUM_TOL: f64 = 1e-9;
/// Sums already this close to 1 are left untouched.
const NORMALIZED_TOL: f64 = 1e-12;

pub type ProbMap = IndexMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardEntry {
    pub from: String,
    pub action: String,
    pub to: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub weight: f64,
    /// action -> next state -> probability; omitted next states are 0.
    pub rows: IndexMap<String, ProbMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub gamma: f64,
    pub initial_dist: ProbMap,
    #[serde(default)]
    pub rewards: Vec<RewardEntry>,
    pub kernel_scenarios: IndexMap<String, Vec<ScenarioEntry>>,
    #[serde(default = "default_mode")]
    pub mode: String,
}

fn default_mode() -> String {
    "static".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDocument {
    /// state -> action -> probability; omitted actions are 0.
    pub policy: IndexMap<String, ProbMap>,
}

/// In-memory form of an instance document.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub instance: MdpInstance,
    pub nu: KernelDistribution,
    pub mode: SamplingMode,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::validation(msg.into())
}

fn index_of(names: &[String], what: &str, name: &str, at: &str) -> Result<usize, Failure> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| invalid(format!("{at}: unknown {what} `{name}`")))
}

fn check_names(names: &[String], what: &str) -> Result<(), Failure> {
    if names.is_empty() {
        return Err(invalid(format!("{what}: list is empty")));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(invalid(format!("{what}: duplicate name `{n}`")));
        }
    }
    Ok(())
}

/// Accepts a nonnegative vector summing to 1 within [`SUM_TOL`] and
/// renormalizes it unless it is already normalized.
pub fn normalize(v: &mut [f64], at: &str) -> Result<(), Failure> {
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(invalid(format!("{at}: invalid probability {x}")));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(invalid(format!("{at}: probabilities sum to {total}, not 1")));
    }
    if (total - 1.0).abs() > NORMALIZED_TOL {
        v.iter_mut().for_each(|x| *x /= total);
    }
    Ok(())
}

fn dense(map: &ProbMap, names: &[String], what: &str, at: &str) -> Result<Vec<f64>, Failure> {
    let mut out = vec![0.0; names.len()];
    for (name, &p) in map {
        out[index_of(names, what, name, at)?] = p;
    }
    normalize(&mut out, at)?;
    Ok(out)
}

fn sparse(row: &[f64], names: &[String]) -> ProbMap {
    row.iter()
        .zip(names)
        .filter(|(p, _)| **p != 0.0)
        .map(|(p, n)| (n.clone(), *p))
        .collect()
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| invalid(format!("instance document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize") + "\n"
    }

    pub fn to_model(&self) -> Result<Model, Failure> {
        check_names(&self.states, "states")?;
        check_names(&self.actions, "actions")?;
        let (ns, na) = (self.states.len(), self.actions.len());
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(invalid(format!("gamma: {} not in [0,1)", self.gamma)));
        }
        let mode: SamplingMode =
            self.mode.parse().map_err(|_| invalid(format!("mode: expected static or resampled, got `{}`", self.mode)))?;
        let init = dense(&self.initial_dist, &self.states, "state", "initial_dist")?;

        let mut rewards = vec![0.0; ns * na * ns];
        for (i, r) in self.rewards.iter().enumerate() {
            let at = format!("rewards[{i}]");
            let s = index_of(&self.states, "state", &r.from, &at)?;
            let a = index_of(&self.actions, "action", &r.action, &at)?;
            let t = index_of(&self.states, "state", &r.to, &at)?;
            if !r.value.is_finite() {
                return Err(invalid(format!("{at}: reward must be finite")));
            }
            rewards[(s * na + a) * ns + t] = r.value;
        }

        let mut per_state = vec![Vec::new(); ns];
        for (state, scenarios) in &self.kernel_scenarios {
            let s = index_of(&self.states, "state", state, "kernel_scenarios")?;
            if scenarios.is_empty() {
                return Err(invalid(format!("kernel_scenarios.{state}: no scenarios")));
            }
            let mut weights: Vec<f64> = scenarios.iter().map(|sc| sc.weight).collect();
            normalize(&mut weights, &format!("kernel_scenarios.{state} weights"))?;
            for (k, (sc, w)) in scenarios.iter().zip(weights).enumerate() {
                let at = format!("kernel_scenarios.{state}[{k}]");
                let mut block = vec![0.0; na * ns];
                for (action, row) in &sc.rows {
                    let a = index_of(&self.actions, "action", action, &format!("{at}.rows"))?;
                    let dense_row = dense(row, &self.states, "state", &format!("{at}.rows.{action}"))?;
                    block[a * ns..(a + 1) * ns].copy_from_slice(&dense_row);
                }
                if let Some(name) = self.actions.iter().find(|n| !sc.rows.contains_key(*n)) {
                    return Err(invalid(format!("{at}.rows: missing action `{name}`")));
                }
                per_state[s].push(Scenario { weight: w, block });
            }
        }
        for (s, name) in self.states.iter().enumerate() {
            if per_state[s].is_empty() {
                return Err(invalid(format!("kernel_scenarios: missing state `{name}`")));
            }
        }
        let states: Vec<&str> = self.states.iter().map(String::as_str).collect();
        let actions: Vec<&str> = self.actions.iter().map(String::as_str).collect();
        let instance = MdpInstance::new(ns, na, rewards, self.gamma, init).with_names(&states, &actions);
        let problems = aamdp_core::mdp::validate_instance(&instance);
        if !problems.is_empty() {
            let msgs: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
            return Err(invalid(msgs.join("; ")));
        }
        let nu = KernelDistribution::new(ns, na, per_state).map_err(Failure::from)?;
        Ok(Model { instance, nu, mode })
    }

    pub fn from_model(model: &Model) -> Self {
        let inst = &model.instance;
        let (ns, na) = (inst.n_states, inst.n_actions);
        let states = inst.state_names.clone();
        let actions = inst.action_names.clone();
        let mut rewards = Vec::new();
        for s in 0..ns {
            for a in 0..na {
                for t in 0..ns {
                    let value = inst.reward(s, a, t);
                    if value != 0.0 {
                        rewards.push(RewardEntry {
                            from: states[s].clone(),
                            action: actions[a].clone(),
                            to: states[t].clone(),
                            value,
                        });
                    }
                }
            }
        }
        let kernel_scenarios = (0..ns)
            .map(|s| {
                let list = model
                    .nu
                    .scenarios(s)
                    .iter()
                    .map(|sc| ScenarioEntry {
                        weight: sc.weight,
                        rows: (0..na)
                            .map(|a| (actions[a].clone(), sparse(&sc.block[a * ns..(a + 1) * ns], &states)))
                            .collect(),
                    })
                    .collect();
                (states[s].clone(), list)
            })
            .collect();
        InstanceDocument {
            initial_dist: sparse(&inst.initial_dist, &states),
            states,
            actions,
            gamma: inst.discount,
            rewards,
            kernel_scenarios,
            mode: model.mode.to_string(),
        }
    }
}

impl PolicyDocument {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| invalid(format!("policy document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize") + "\n"
    }

    pub fn to_policy(&self, instance: &MdpInstance) -> Result<StationaryPolicy, Failure> {
        let mut rows = vec![None; instance.n_states];
        for (state, row) in &self.policy {
            let s = index_of(&instance.state_names, "state", state, "policy")?;
            rows[s] = Some(dense(row, &instance.action_names, "action", &format!("policy.{state}"))?);
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(s, r)| r.ok_or_else(|| invalid(format!("policy: missing state `{}`", instance.state_names[s]))))
            .collect::<Result<Vec<_>, _>>()?;
        StationaryPolicy::from_rows(rows).map_err(Failure::from)
    }

    pub fn from_policy(policy: &StationaryPolicy, instance: &MdpInstance) -> Self {
        let policy = (0..instance.n_states)
            .map(|s| (instance.state_names[s].clone(), sparse(policy.row(s), &instance.action_names)))
            .collect();
        PolicyDocument { policy }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = r#"{
  "states": ["Start", "End"],
  "actions": ["go"],
  "gamma": 0.5,
  "initial_dist": {"Start": 1.0},
  "rewards": [
    {"from": "Start", "action": "go", "to": "Start", "value": 1.0},
    {"from": "Start", "action": "go", "to": "End", "value": 1.0}
  ],
  "kernel_scenarios": {
    "Start": [
      {"weight": 0.3333333333, "rows": {"go": {"End": 1.0}}},
      {"weight": 0.3333333333, "rows": {"go": {"Start": 0.5, "End": 0.5}}},
      {"weight": 0.3333333334, "rows": {"go": {"Start": 1.0}}}
    ],
    "End": [{"weight": 1.0, "rows": {"go": {"End": 1.0}}}]
  },
  "mode": "static"
}"#;

    #[test]
    fn parses_and_round_trips() {
        let doc = InstanceDocument::parse(FIG1).unwrap();
        let model = doc.to_model().unwrap();
        assert_eq!(model.nu.n_scenarios(0), 3);
        assert_eq!(model.instance.reward(0, 0, 1), 1.0);
        let again = InstanceDocument::parse(&InstanceDocument::from_model(&model).to_json()).unwrap();
        assert_eq!(again.to_model().unwrap(), model);
    }

    #[test]
    fn unknown_keys_carry_positions() {
        let bad = FIG1.replace("\"mode\"", "\"mood\"");
        let err = InstanceDocument::parse(&bad).unwrap_err();
        assert!(err.message.contains("unknown field `mood`"), "{}", err.message);
        assert!(err.message.contains("line 18"), "{}", err.message);
        assert_eq!(err.code, 2);
    }

    #[test]
    fn semantic_errors() {
        let cases = [
            (FIG1.replace("\"Start\": 0.5, \"End\": 0.5", "\"Start\": 0.5, \"End\": 0.6"), "sum to"),
            (FIG1.replace("{\"Start\": 1.0}}}\n", "{\"Nowhere\": 1.0}}}\n"), "unknown state `Nowhere`"),
            (FIG1.replace("\"gamma\": 0.5", "\"gamma\": 1.0"), "gamma"),
            (FIG1.replace("\"mode\": \"static\"", "\"mode\": \"sometimes\""), "mode"),
        ];
        for (text, needle) in cases {
            let err = InstanceDocument::parse(&text).and_then(|d| d.to_model()).unwrap_err();
            assert!(err.message.contains(needle), "{needle}: {}", err.message);
        }
    }

    #[test]
    fn policy_documents() {
        let model = InstanceDocument::parse(FIG1).unwrap().to_model().unwrap();
        let doc = PolicyDocument::parse(r#"{"policy": {"Start": {"go": 1}, "End": {"go": 1}}}"#).unwrap();
        let pol = doc.to_policy(&model.instance).unwrap();
        assert_eq!(pol.row(0), &[1.0]);
        let missing = PolicyDocument::parse(r#"{"policy": {"Start": {"go": 1}}}"#).unwrap();
        assert!(missing.to_policy(&model.instance).is_err());
        let back = PolicyDocument::from_policy(&pol, &model.instance);
        assert_eq!(back, doc);
    }
}
