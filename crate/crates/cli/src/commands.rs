use std::path::{Path, PathBuf};
use std::time::Instant;

use aamdp_core::bellman::{apply_optimal_operator, GreedyStrategy, KernelDistribution, SamplingMode};
use aamdp_core::evaluator::{
    build_counterexample_instance, build_fig1_instance, build_lemma_mdp, dp_check, evaluate_policy,
    random_robust_instance, refinement_check, table1_suite, var_witness, DpTarget, EvalEstimate, EvalMethod,
    EvalParams, McParams, Verdict, DEFAULT_ENUMERATION_BUDGET, DEFAULT_MC_SAMPLES, VAR_WITNESS_SEED,
};
use aamdp_core::mdp::{MdpInstance, StationaryPolicy, ValueFunction};
use aamdp_core::risk::{axiom_probe, DiscreteDistribution, RiskSpec};
use aamdp_core::solvers::{convex_program_solve, policy_iteration, value_iteration, Algorithm};
use clap::{Args, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::Serialize;

use crate::document::{normalize, InstanceDocument, Model, PolicyDocument};
use crate::error::{Failure, EXIT_INCONCLUSIVE, EXIT_VIOLATED};
use crate::report::{nums, write_atomic, write_output, Format, Meta, Num, Report, StateRow, Timing};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the optimal value and a greedy stationary policy.
    Solve(SolveArgs),
    /// Evaluate a stationary policy.
    Eval(EvalArgs),
    /// Check the one-step Bellman consistency of a policy's value.
    CheckDp(CheckDpArgs),
    /// Write reference instances.
    Gallery(GalleryArgs),
    /// Evaluate a risk measure on a discrete distribution.
    Risk(RiskArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub risk: RiskSpec,
    /// Overrides the document's mode.
    #[arg(long)]
    pub mode: Option<SamplingMode>,
    #[arg(long, value_enum, default_value_t = Algo::Vi)]
    pub algo: Algo,
    /// exact, det (deterministic) or local[:restarts[:tol]].
    #[arg(long, default_value = "exact")]
    pub strategy: GreedyStrategy,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Vi,
    Pi,
    Lp,
}

impl From<Algo> for Algorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Vi => Algorithm::ValueIteration,
            Algo::Pi => Algorithm::PolicyIteration,
            Algo::Lp => Algorithm::ConvexProgram,
        }
    }
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    pub samples: usize,
    /// Truncation horizon of resampled Monte Carlo.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, env = "AAMDP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Largest joint-kernel count enumerated exactly.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: usize,
    /// Sample even where an exact resampled evaluation exists.
    #[arg(long)]
    pub monte_carlo: bool,
}

impl SamplingArgs {
    fn params(&self) -> EvalParams {
        EvalParams {
            enumeration_budget: self.budget,
            mc: McParams { n_samples: self.samples, horizon: self.horizon, seed: self.seed },
            prefer_exact: !self.monte_carlo,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub policy: PathBuf,
    #[arg(long)]
    pub risk: RiskSpec,
    #[arg(long)]
    pub mode: Option<SamplingMode>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CheckDpArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Value risk, optionally followed by `,<operator risk>`.
    #[arg(long)]
    pub risk: String,
    #[arg(long)]
    pub mode: Option<SamplingMode>,
    /// `policy <path>` or `optimal`.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "PATH"])]
    pub target: Vec<String>,
    /// Policy file when `--target policy` carries no path.
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Greedy strategy for `--target optimal`.
    #[arg(long, default_value = "exact")]
    pub strategy: GreedyStrategy,
    #[arg(long, default_value_t = aamdp_core::evaluator::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Also check on successively coarsened kernel laws.
    #[arg(long)]
    pub refine: bool,
    #[arg(long, default_value_t = 3)]
    pub refine_levels: usize,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GalleryName {
    Fig1,
    Example3,
    LemmaMdp,
    RobustRandom,
    Table1Suite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LemmaPreset {
    Coin,
    VarWitness,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    #[arg(value_enum)]
    pub name: GalleryName,
    #[arg(long, default_value_t = 3)]
    pub scenarios: usize,
    #[arg(long, default_value_t = 2000)]
    pub atoms: usize,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t = LemmaPreset::Coin)]
    pub preset: LemmaPreset,
    #[arg(long, default_value_t = 4)]
    pub states: usize,
    #[arg(long, default_value_t = 2)]
    pub actions: usize,
    #[arg(long, env = "AAMDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    pub risk: RiskSpec,
    /// `value:weight` pairs separated by commas.
    #[arg(long, conflicts_with = "atoms_file", required_unless_present = "atoms_file")]
    pub atoms: Option<String>,
    /// File of `value:weight` pairs separated by commas or newlines.
    #[arg(long)]
    pub atoms_file: Option<PathBuf>,
    /// Also probe the structural properties of the measure.
    #[arg(long)]
    pub axioms: bool,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, env = "AAMDP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

pub fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Solve(a) => solve(a),
        Command::Eval(a) => eval(a),
        Command::CheckDp(a) => check_dp(a),
        Command::Gallery(a) => gallery(a),
        Command::Risk(a) => risk(a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    InstanceDocument::parse(&read(path)?)
        .and_then(|d| d.to_model())
        .map_err(|f| Failure { message: format!("{}: {}", path.display(), f.message), ..f })
}

fn load_policy(path: &Path, instance: &MdpInstance) -> Result<StationaryPolicy, Failure> {
    PolicyDocument::parse(&read(path)?)
        .and_then(|d| d.to_policy(instance))
        .map_err(|f| Failure { message: format!("{}: {}", path.display(), f.message), ..f })
}

fn rows(instance: &MdpInstance, columns: &[(&str, &[f64])], policy: Option<&StationaryPolicy>) -> Vec<StateRow> {
    (0..instance.n_states)
        .map(|s| {
            let mut map: IndexMap<String, Num> =
                columns.iter().map(|(name, col)| (name.to_string(), Num(col[s]))).collect();
            if let Some(p) = policy {
                for (a, name) in instance.action_names.iter().enumerate() {
                    map.insert(format!("pi[{name}]"), Num(p.row(s)[a]));
                }
            }
            StateRow { state: instance.state_names[s].clone(), columns: map }
        })
        .collect()
}

fn emit<R: Serialize>(
    meta: Meta,
    result: R,
    states: Vec<StateRow>,
    start: Instant,
    output: &Output,
) -> Result<(), Failure> {
    let report = Report { meta, result, states, timing: Timing { wall_seconds: Num(start.elapsed().as_secs_f64()) } };
    write_output(output.out.as_deref(), &report.render(output.format)?)
}

fn policy_doc(policy: &StationaryPolicy, instance: &MdpInstance) -> IndexMap<String, IndexMap<String, f64>> {
    PolicyDocument::from_policy(policy, instance).policy
}

#[derive(Serialize)]
struct SolveResult {
    algorithm: String,
    strategy: String,
    mode: String,
    dp_compatible: bool,
    iterations: usize,
    final_residual: Num,
    certified_bound: Num,
    initial_value: Num,
    value: Vec<Num>,
    policy: IndexMap<String, IndexMap<String, f64>>,
}

fn solve(args: SolveArgs) -> Result<i32, Failure> {
    let start = Instant::now();
    let model = load_model(&args.instance)?;
    let mode = args.mode.unwrap_or(model.mode);
    let (inst, nu) = (&model.instance, &model.nu);
    let report = match args.algo {
        Algo::Vi => value_iteration(nu, &args.risk, &args.strategy, args.tol, inst)?,
        Algo::Pi => policy_iteration(nu, &args.risk, &args.strategy, args.tol, inst)?,
        Algo::Lp => {
            if args.risk != RiskSpec::EssSup {
                return Err(Failure::validation(
                    "the linear program solves the optimistic (esssup) problem only".into(),
                ));
            }
            let v = convex_program_solve(nu, inst)?;
            let (tv, policy) = apply_optimal_operator(&v, nu, &args.risk, &args.strategy, inst)?;
            aamdp_core::solvers::SolveReport {
                algorithm: Algorithm::ConvexProgram,
                final_residual: tv.sup_distance(&v),
                certified_bound: tv.sup_distance(&v) / (1.0 - inst.discount),
                a_priori_bound: 0.0,
                value: v,
                policy,
                iterations: 1,
                wall_time: 0.0,
                residual_history: Vec::new(),
                value_history: Vec::new(),
            }
        }
    };
    let result = SolveResult {
        algorithm: Algorithm::from(args.algo).to_string(),
        strategy: args.strategy.to_string(),
        mode: mode.to_string(),
        dp_compatible: args.risk.dp_compatible(mode.is_resampled()),
        iterations: report.iterations,
        final_residual: Num(report.final_residual),
        certified_bound: Num(report.certified_bound),
        initial_value: Num(initial_value(&report.value, inst)),
        value: nums(&report.value),
        policy: policy_doc(&report.policy, inst),
    };
    let meta = Meta::new("solve", None)
        .param("instance", args.instance.display().to_string())
        .param("risk", args.risk.to_string())
        .param("mode", mode.to_string())
        .param("algo", result.algorithm.clone())
        .param("strategy", result.strategy.clone())
        .param("tol", args.tol);
    let states = rows(inst, &[("value", &report.value)], Some(&report.policy));
    emit(meta, result, states, start, &args.output)?;
    Ok(0)
}

fn initial_value(v: &ValueFunction, inst: &MdpInstance) -> f64 {
    v.iter().zip(&inst.initial_dist).map(|(x, p)| x * p).sum()
}

#[derive(Serialize)]
struct MethodInfo {
    name: &'static str,
    n_samples: Option<usize>,
    horizon: Option<usize>,
    seed: Option<u64>,
}

fn method_info(m: &EvalMethod) -> MethodInfo {
    match *m {
        EvalMethod::MonteCarlo { n_samples, horizon, seed } => {
            MethodInfo { name: m.name(), n_samples: Some(n_samples), horizon, seed: Some(seed) }
        }
        EvalMethod::ExactRecursion { horizon } => {
            MethodInfo { name: m.name(), n_samples: None, horizon: Some(horizon), seed: None }
        }
        _ => MethodInfo { name: m.name(), n_samples: None, horizon: None, seed: None },
    }
}

fn method_seed(m: &EvalMethod) -> Option<u64> {
    match m {
        EvalMethod::MonteCarlo { seed, .. } => Some(*seed),
        _ => None,
    }
}

#[derive(Serialize)]
struct EvalResult {
    mode: String,
    method: MethodInfo,
    initial_value: Num,
    value: Vec<Num>,
    stderr: Vec<Num>,
    truncation_bound: Num,
}

fn eval(args: EvalArgs) -> Result<i32, Failure> {
    let start = Instant::now();
    let model = load_model(&args.instance)?;
    let mode = args.mode.unwrap_or(model.mode);
    let inst = &model.instance;
    let policy = load_policy(&args.policy, inst)?;
    let est: EvalEstimate = evaluate_policy(&policy, &model.nu, &args.risk, mode, &args.sampling.params(), inst)?;
    let result = EvalResult {
        mode: mode.to_string(),
        method: method_info(&est.method),
        initial_value: Num(initial_value(&est.values, inst)),
        value: nums(&est.values),
        stderr: nums(&est.stderr),
        truncation_bound: Num(est.truncation_bound),
    };
    let meta = Meta::new("eval", method_seed(&est.method))
        .param("instance", args.instance.display().to_string())
        .param("policy", args.policy.display().to_string())
        .param("risk", args.risk.to_string())
        .param("mode", mode.to_string())
        .param("samples", args.sampling.samples)
        .param("horizon", args.sampling.horizon)
        .param("budget", args.sampling.budget)
        .param("monte_carlo", args.sampling.monte_carlo);
    let states = rows(inst, &[("value", &est.values), ("stderr", &est.stderr)], None);
    emit(meta, result, states, start, &args.output)?;
    Ok(0)
}

fn parse_risk_pair(text: &str) -> Result<(RiskSpec, RiskSpec), Failure> {
    let mut parts = text.split(',');
    let value: RiskSpec = parts.next().unwrap_or_default().parse()?;
    let operator = match parts.next() {
        Some(p) => p.parse()?,
        None => value,
    };
    if parts.next().is_some() {
        return Err(Failure::validation(format!("--risk: expected one or two risk specs, got `{text}`")));
    }
    Ok((value, operator))
}

#[derive(Serialize)]
struct RefinementResult {
    scenario_counts: Vec<usize>,
    residuals: Vec<Num>,
    shrinking: bool,
}

#[derive(Serialize)]
struct CheckResult {
    mode: String,
    value_risk: String,
    operator_risk: String,
    target: String,
    method: MethodInfo,
    verdict: String,
    residual_sup: Num,
    tolerance: Num,
    mc_stderr: Num,
    truncation_bound: Num,
    v: Vec<Num>,
    tv: Vec<Num>,
    residual: Vec<Num>,
    policy: IndexMap<String, IndexMap<String, f64>>,
    refinement: Option<RefinementResult>,
}

fn check_dp(args: CheckDpArgs) -> Result<i32, Failure> {
    let start = Instant::now();
    let model = load_model(&args.instance)?;
    let mode = args.mode.unwrap_or(model.mode);
    let inst = &model.instance;
    let (value_risk, operator_risk) = parse_risk_pair(&args.risk)?;
    let (target, target_name) = match args.target.first().map(String::as_str) {
        Some("optimal") if args.target.len() == 1 => (DpTarget::Optimal(args.strategy), "optimal".to_string()),
        Some("policy") | None => {
            let path = args.target.get(1).map(PathBuf::from).or(args.policy.clone()).ok_or_else(|| {
                Failure::validation("--target policy needs a policy file".into())
            })?;
            let name = format!("policy {}", path.display());
            (DpTarget::Policy(load_policy(&path, inst)?), name)
        }
        Some(other) => {
            return Err(Failure::validation(format!("--target: expected `policy <path>` or `optimal`, got `{other}`")))
        }
    };
    let params = args.sampling.params();
    let mut report = dp_check(&target, &model.nu, &value_risk, &operator_risk, mode, args.tol, &params, inst)?;
    if args.refine {
        let evidence = refinement_check(
            &target,
            &model.nu,
            &value_risk,
            &operator_risk,
            mode,
            args.tol,
            &params,
            inst,
            args.refine_levels,
        )?;
        if report.verdict == Verdict::Holds && !evidence.shrinking {
            report.verdict = Verdict::Inconclusive;
        }
        report.refinement = Some(evidence);
    }
    let result = CheckResult {
        mode: mode.to_string(),
        value_risk: value_risk.to_string(),
        operator_risk: operator_risk.to_string(),
        target: target_name.clone(),
        method: method_info(&report.method),
        verdict: report.verdict.to_string(),
        residual_sup: Num(report.residual_sup),
        tolerance: Num(report.tolerance),
        mc_stderr: Num(report.mc_stderr),
        truncation_bound: Num(report.truncation_bound),
        v: nums(&report.v),
        tv: nums(&report.tv),
        residual: nums(&report.residual_per_state),
        policy: policy_doc(&report.policy, inst),
        refinement: report.refinement.as_ref().map(|r| RefinementResult {
            scenario_counts: r.scenario_counts.clone(),
            residuals: nums(&r.residuals),
            shrinking: r.shrinking,
        }),
    };
    let meta = Meta::new("check-dp", method_seed(&report.method))
        .param("instance", args.instance.display().to_string())
        .param("risk", args.risk.clone())
        .param("mode", mode.to_string())
        .param("target", target_name)
        .param("tol", args.tol)
        .param("refine", args.refine.then_some(args.refine_levels));
    let states = rows(
        inst,
        &[("v", &report.v), ("tv", &report.tv), ("residual", &report.residual_per_state)],
        Some(&report.policy),
    );
    emit(meta, result, states, start, &args.output)?;
    eprintln!("verdict: {} (residual {:.6e})", report.verdict, report.residual_sup);
    Ok(match report.verdict {
        Verdict::Holds => 0,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn write_instance(
    dir: &Path,
    name: &str,
    instance: &MdpInstance,
    nu: &KernelDistribution,
    mode: SamplingMode,
) -> Result<(String, String), Failure> {
    let model = Model { instance: instance.clone(), nu: nu.clone(), mode };
    let file = format!("{name}.json");
    let pi_file = format!("{name}.pi0.json");
    write_atomic(&dir.join(&file), &InstanceDocument::from_model(&model).to_json())?;
    let pi0 = StationaryPolicy::uniform(instance.n_states, instance.n_actions);
    write_atomic(&dir.join(&pi_file), &PolicyDocument::from_policy(&pi0, instance).to_json())?;
    Ok((file, pi_file))
}

#[derive(Serialize)]
struct ManifestEntry {
    variant: String,
    instance: String,
    policy: String,
    risk: String,
    expected_static: String,
    expected_resampled: String,
}

fn gallery(args: GalleryArgs) -> Result<i32, Failure> {
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let stat = SamplingMode::Static;
    let written = match args.name {
        GalleryName::Fig1 => {
            let (i, n) = build_fig1_instance(args.gamma, args.scenarios)?;
            vec![write_instance(dir, "fig1", &i, &n, stat)?]
        }
        GalleryName::Example3 => {
            let (i, n) = build_counterexample_instance(args.gamma, args.atoms)?;
            vec![write_instance(dir, "example3", &i, &n, stat)?]
        }
        GalleryName::LemmaMdp => {
            let (x, y, z) = match args.preset {
                LemmaPreset::Coin => {
                    let coin = DiscreteDistribution::uniform(&[0.0, 1.0])?;
                    (coin.clone(), coin.clone(), coin)
                }
                LemmaPreset::VarWitness => {
                    let w = var_witness(0.5, args.gamma, 0.05, 0.05, VAR_WITNESS_SEED, 100_000)?;
                    (w.x, w.y, w.z)
                }
            };
            let (i, n) = build_lemma_mdp(&x, &y, &z, 0.0, 0.0, 1.0, 1.0, args.gamma)?;
            vec![write_instance(dir, "lemma-mdp", &i, &n, stat)?]
        }
        GalleryName::RobustRandom => {
            let (i, n) = random_robust_instance(args.states, args.actions, args.scenarios, args.gamma, args.seed)?;
            vec![write_instance(dir, "robust-random", &i, &n, stat)?]
        }
        GalleryName::Table1Suite => {
            let mut manifest = Vec::new();
            let mut written = Vec::new();
            for entry in table1_suite(args.atoms)? {
                let (file, pi_file) = write_instance(dir, entry.name, &entry.instance, &entry.nu, stat)?;
                manifest.push(ManifestEntry {
                    variant: entry.name.into(),
                    instance: file.clone(),
                    policy: pi_file.clone(),
                    risk: entry.risk.to_string(),
                    expected_static: entry.expected_static.to_string(),
                    expected_resampled: entry.expected_resampled.to_string(),
                });
                written.push((file, pi_file));
            }
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
            write_atomic(&dir.join("manifest.json"), &text)?;
            written
        }
    };
    for (file, pi_file) in written {
        println!("{}", dir.join(file).display());
        println!("{}", dir.join(pi_file).display());
    }
    Ok(0)
}

/// Parses `value:weight` pairs separated by commas or whitespace.
pub fn parse_atoms(text: &str) -> Result<DiscreteDistribution, Failure> {
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for item in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let bad = || Failure::validation(format!("atoms: expected `value:weight`, got `{item}`"));
        let (v, w) = item.split_once(':').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        let w: f64 = w.trim().parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        values.push(v);
        weights.push(w);
    }
    if values.is_empty() {
        return Err(Failure::validation("atoms: no atoms given".into()));
    }
    normalize(&mut weights, "atoms")?;
    Ok(DiscreteDistribution::new(values.into_iter().zip(weights).collect())?)
}

#[derive(Serialize)]
struct AxiomEntry {
    axiom: &'static str,
    holds: bool,
    max_violation: Num,
}

#[derive(Serialize)]
struct RiskResult {
    value: Num,
    axioms: Option<Vec<AxiomEntry>>,
}

fn risk(args: RiskArgs) -> Result<i32, Failure> {
    let start = Instant::now();
    let text = match (&args.atoms, &args.atoms_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => unreachable!("clap requires one atom source"),
    };
    let dist = parse_atoms(&text)?;
    let value = args.risk.eval(&dist)?;
    let axioms = if args.axioms { Some(axiom_probe(&args.risk, args.trials, args.seed)?) } else { None };
    if args.output.out.is_none() && args.output.format == Format::Json {
        println!("{value}");
        if let Some(report) = &axioms {
            print!("{report}");
        }
        return Ok(0);
    }
    let result = RiskResult {
        value: Num(value),
        axioms: axioms.as_ref().map(|r| {
            r.results
                .iter()
                .map(|x| AxiomEntry { axiom: x.axiom.name(), holds: x.holds, max_violation: Num(x.max_violation) })
                .collect()
        }),
    };
    let meta = Meta::new("risk", args.axioms.then_some(args.seed))
        .param("risk", args.risk.to_string())
        .param("atoms", dist.atoms().iter().map(|&(v, w)| [v, w]).collect::<Vec<_>>())
        .param("trials", args.axioms.then_some(args.trials));
    emit(meta, result, Vec::new(), start, &args.output)?;
    Ok(0)
}
