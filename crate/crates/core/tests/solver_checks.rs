mod common;

use std::sync::OnceLock;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqrtlap_core::solvers::{global_minimize, minimize_in_ball, solve_three, SolveReport};
use sqrtlap_core::*;

fn worked() -> &'static (ProblemInstance, ConstantsBundle, SolveReport) {
    static W: OnceLock<(ProblemInstance, ConstantsBundle, SolveReport)> = OnceLock::new();
    W.get_or_init(|| {
        let (inst, bundle) = common::worked_disk(64, 48);
        let report = solve_three(&inst, &bundle, &SolverOptions::default()).unwrap();
        (inst, bundle, report)
    })
}

fn unit_direction(inst: &ProblemInstance, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let v = common::random_field(inst.basis(), rng);
    let a = inst.coeffs(&v);
    let n = inst.x_norm(&a);
    a / n
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for domain in [common::rectangle(), common::unit_disk()] {
        for nl in [Nonlinearity::power(1.0, 3.0).unwrap(), Nonlinearity::truncated_bump(1.5, 1.0).unwrap()] {
            let inst = ProblemInstance::new(domain.clone(), BetaField::Constant(1.3), nl, 7.0, 20, 32).unwrap();
            for _ in 0..5 {
                let u = inst.coeffs(&common::random_field(inst.basis(), &mut rng));
                let v = inst.coeffs(&common::random_field(inst.basis(), &mut rng));
                let h = 1e-5;
                let fd = (inst.energy(&(&u + h * &v)) - inst.energy(&(&u - h * &v))) / (2.0 * h);
                let an = inst.x_inner(&inst.gradient(&u), &v);
                assert!((fd - an).abs() <= 1e-5 * an.abs().max(1e-3), "fd {fd} vs {an}");
            }
        }
    }
}

#[test]
fn worked_instance_has_two_positive_solutions() {
    let (_, _, report) = worked();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert!(report.distinct_nontrivial >= 2);
    for s in &report.solutions {
        assert!(s.residual < 1e-8 && s.nonnegative, "{}", s.label);
    }
    let w1 = report.solution("w1").unwrap();
    let w2 = report.solution("w2").unwrap();
    let w3 = report.solution("w3").unwrap();
    assert!(w1.trivial && w1.inside_ball);
    assert!(w2.phi > report.gamma * report.gamma && w2.energy < w1.energy);
    assert!(w3.energy >= w1.energy.max(w2.energy) - 1e-9);
}

#[test]
fn minima_pass_the_local_certificate() {
    let (inst, _, report) = worked();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for label in ["w1", "w2"] {
        let w = &report.solution(label).unwrap().coeffs;
        let e0 = inst.energy(w);
        let eps = 1e-4 * inst.x_norm(w).max(1.0);
        for _ in 0..50 {
            let v = unit_direction(inst, &mut rng);
            assert!(inst.energy(&(w + eps * &v)) >= e0 - 1e-10, "{label}");
        }
    }
}

#[test]
fn mountain_pass_point_is_a_saddle() {
    let (inst, _, report) = worked();
    let w3 = &report.solution("w3").unwrap().coeffs;
    let e0 = inst.energy(w3);
    let eps = 1e-4 * inst.x_norm(w3).max(1e-2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    // the ray through w3 is one direction, the others are random
    let mut dirs = vec![w3 / inst.x_norm(w3)];
    dirs.extend((0..9).map(|_| unit_direction(inst, &mut rng)));
    let quotients: Vec<f64> =
        dirs.iter().map(|v| (inst.energy(&(w3 + eps * v)) - 2.0 * e0 + inst.energy(&(w3 - eps * v))) / (eps * eps)).collect();
    assert!(quotients.iter().any(|q| *q < 0.0) && quotients.iter().any(|q| *q > 0.0), "{quotients:?}");
}

#[test]
fn interior_minimum_is_reproduced_from_random_starts() {
    let (inst, bundle, report) = worked();
    let w1 = &report.solution("w1").unwrap().coeffs;
    let radius = 2f64.sqrt() * bundle.gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let v = unit_direction(inst, &mut rng);
        let start = rng.random_range(0.05..0.9) * radius * v;
        let cp = minimize_in_ball(inst, bundle.gamma, &start, &SolverOptions::default()).unwrap();
        assert!(inst.x_norm(&(&cp.coeffs - w1)) < 1e-6);
        assert!(cp.residual < 1e-8);
    }
}

#[test]
fn global_minimum_beats_every_start() {
    let (inst, bundle, report) = worked();
    let g = global_minimize(inst, bundle, &SolverOptions::default()).unwrap();
    assert!(g.asserted_outside);
    assert_eq!(g.point.coeffs, report.solution("w2").unwrap().coeffs);
    let cone = sqrtlap_core::solvers::cone_start(inst, bundle, None).unwrap();
    assert!(g.point.energy <= inst.energy(&cone));
    for o in &g.outcomes {
        if let Some(e) = o.energy {
            assert!(g.point.energy <= e, "{}", o.label);
        }
    }
}

#[test]
fn fixed_seed_is_bit_identical() {
    let (inst, bundle, report) = worked();
    let again = solve_three(inst, bundle, &SolverOptions::default()).unwrap();
    assert_eq!(&again, report);
}

#[test]
fn zero_nonlinearity_and_zero_lambda() {
    let (_, bundle) = common::worked_disk(8, 16);
    let zero = Nonlinearity::power(0.0, 2.0).unwrap();
    let inst = ProblemInstance::new(common::unit_disk(), BetaField::Constant(1.0), zero, 100.0, 16, 24).unwrap();
    let rep = solve_three(&inst, &bundle, &SolverOptions::default()).unwrap();
    assert!(rep.failures.is_empty());
    assert!(rep.solutions.iter().all(|s| s.trivial));
    assert!(rep.notes.iter().any(|n| n == "multiplicity not exhibited"));
    let g = global_minimize(&inst, &bundle, &SolverOptions::default()).unwrap();
    assert!(inst.x_norm(&g.point.coeffs) < 1e-12);

    let (worked16, _) = common::worked_disk(16, 24);
    let rest = worked16.with_lambda(0.0).unwrap();
    let rep = solve_three(&rest, &bundle, &SolverOptions::default()).unwrap();
    assert_eq!(rep.solutions.len(), 1);
    assert!(rep.solutions[0].trivial && !rep.guaranteed);
}

#[test]
fn competitor_chain_and_sampled_sup() {
    use sqrtlap_core::test_functions::{sample_psi_sup, verify_competitor_chain, ClauseStatus};
    let (inst, bundle, _) = worked();
    let chain = verify_competitor_chain(bundle, inst, 0).unwrap();
    assert!(chain.passed());
    for name in ["phi_above_gamma", "psi_lower_bound", "ratio_condition", "below_truncated_level"] {
        assert_eq!(chain.clause(name).unwrap().status, ClauseStatus::Pass, "{name}");
    }
    for r in [1e-4, bundle.gamma * bundle.gamma, 0.5] {
        assert!(sample_psi_sup(inst, r, 200, 1) <= bundle.psi_sup_bound(r));
    }
}
