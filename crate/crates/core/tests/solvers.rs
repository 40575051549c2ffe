use aamdp_core::bellman::{GreedyStrategy, KernelDistribution, SamplingMode};
use aamdp_core::evaluator::{
    build_counterexample_instance, build_fig1_instance, random_robust_instance, resampled_value_exact,
    static_value, McParams,
};
use aamdp_core::mdp::MdpInstance;
use aamdp_core::risk::RiskSpec;
use aamdp_core::solvers::{convex_program_solve, policy_iteration, value_iteration};

fn gallery() -> Vec<(&'static str, MdpInstance, KernelDistribution)> {
    let mut out = Vec::new();
    let (i, n) = build_fig1_instance(0.5, 3).unwrap();
    out.push(("fig1", i, n));
    let (i, n) = build_counterexample_instance(0.5, 200).unwrap();
    out.push(("example3", i, n));
    for seed in 0..3 {
        let (i, n) = random_robust_instance(4, 3, 3, 0.8, 100 + seed).unwrap();
        out.push(("random", i, n));
    }
    out
}

#[test]
fn all_solve_paths_agree_on_gallery() {
    let tol = 1e-8;
    let exact = GreedyStrategy::ExactGame;
    for (name, inst, nu) in gallery() {
        for spec in [RiskSpec::EssInf, RiskSpec::EssSup, RiskSpec::Expectation] {
            let vi = value_iteration(&nu, &spec, &exact, tol, &inst).unwrap();
            let pi = policy_iteration(&nu, &spec, &exact, tol, &inst).unwrap();
            let d = vi.value.sup_distance(&pi.value);
            assert!(d <= 2.0 * tol, "{name} {spec}: VI/PI gap {d:e}");
            if spec == RiskSpec::EssSup {
                let lp = convex_program_solve(&nu, &inst).unwrap();
                let d = vi.value.sup_distance(&lp);
                assert!(d <= 2.0 * tol, "{name}: VI/LP gap {d:e}");
            }
        }
    }
}

#[test]
fn fixed_points_match_ground_truth_for_compatible_pairs() {
    // The optimal stationary policy's ground-truth value equals the VI value
    // whenever the (spec, mode) pair is DP-compatible.
    let exact = GreedyStrategy::ExactGame;
    for (name, inst, nu) in gallery() {
        for (spec, mode) in [
            (RiskSpec::EssInf, SamplingMode::Resampled),
            (RiskSpec::EssSup, SamplingMode::Resampled),
            (RiskSpec::Expectation, SamplingMode::Resampled),
            (RiskSpec::EssInf, SamplingMode::Static),
        ] {
            let vi = value_iteration(&nu, &spec, &exact, 1e-10, &inst).unwrap();
            let truth = match mode {
                SamplingMode::Resampled => resampled_value_exact(&vi.policy, &nu, &spec, None, &inst).unwrap(),
                SamplingMode::Static => static_value(&vi.policy, &nu, &spec, 1 << 16, &McParams::default(), &inst).unwrap(),
            };
            let d = truth.values.sup_distance(&vi.value);
            assert!(d <= 1e-8 + truth.truncation_bound, "{name} {spec}/{mode}: {d:e}");
        }
    }
}

#[test]
fn value_iteration_decays_geometrically() {
    for seed in 0..10 {
        let (inst, nu) = random_robust_instance(4, 2, 3, 0.9, seed).unwrap();
        for spec in [RiskSpec::EssInf, RiskSpec::Cvar(0.3), RiskSpec::Expectation] {
            let r = value_iteration(&nu, &spec, &GreedyStrategy::ExactGame, 1e-9, &inst).unwrap();
            let h = &r.residual_history;
            // Rounding in the iterates themselves is not a contraction.
            let roundoff = 64.0 * f64::EPSILON * inst.value_bound();
            for n in 3..h.len() {
                if h[n - 1] > 1e-12 {
                    assert!(h[n] <= (inst.discount + 1e-9) * h[n - 1] + roundoff, "seed {seed} {spec} step {n}: {:e} after {:e}", h[n], h[n - 1]);
                }
            }
        }
    }
}

#[test]
fn robust_gallery_pi_needs_fewer_outer_iterations() {
    let (inst, nu) = random_robust_instance(5, 3, 4, 0.9, 7).unwrap();
    let vi = value_iteration(&nu, &RiskSpec::EssInf, &GreedyStrategy::ExactGame, 1e-8, &inst).unwrap();
    let pi = policy_iteration(&nu, &RiskSpec::EssInf, &GreedyStrategy::ExactGame, 1e-8, &inst).unwrap();
    assert!(vi.value.sup_distance(&pi.value) <= 2e-8);
    assert!(pi.iterations < vi.iterations, "PI {} vs VI {}", pi.iterations, vi.iterations);
    assert!(pi.certified_bound <= 1e-8);
}
