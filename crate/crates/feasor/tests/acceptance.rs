//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with the measured quantities (run with `--nocapture` to see
//! them). Ground truths are hand computations or independent oracles, never
//! the implementation under test.

use std::path::PathBuf;
use std::time::Instant;

use feasor::analysis::{coincidence_check, estimate_difference_vectors, two_set_report};
use feasor::cli::problem_file;
use feasor::engine::{
    asymptotic_rate_check, run, RunConfig, Scheme, Trace, VerdictKind, NORM_WINDOW,
};
use feasor::geometry::{ConvexSet, ScalarConvexFn, Vector};
use feasor::operators::{cyclic_dr_cycle, dr_step, CyclicProblem};
use feasor::oracle::{
    brute_force_project, check_firmly_nonexpansive, check_nonexpansive,
    check_projection_characterization, check_reflection_characterization, Sampler,
};

fn v(coords: &[f64]) -> Vector {
    Vector::new(coords.to_vec()).unwrap()
}

fn fixture(name: &str) -> (CyclicProblem, Vector, RunConfig) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    problem_file::parse(&text).unwrap().to_problem().unwrap()
}

const ALL_FIXTURES: [&str; 6] = [
    "parallel_lines.json",
    "three_lines.json",
    "parabola.json",
    "hyperbola.json",
    "consistent_ball_halfspace.json",
    "consistent_crossing_lines.json",
];

fn tail_min_norms(trace: &Trace) -> Vec<f64> {
    let mut tail: Vec<f64> = trace
        .rows()
        .rev()
        .take(NORM_WINDOW)
        .map(|r| r.min_norm())
        .collect();
    tail.reverse();
    tail
}

#[test]
fn criterion_1_parallel_lines_dichotomy() {
    let started = Instant::now();
    let (problem, x0, config) = fixture("parallel_lines.json");

    // Cyclic Douglas-Rachford reaches a fixed cycle immediately with
    // x^2 - x^1 = (0, 1) exactly.
    let (trace, verdict) = run(&problem, &x0, &config).unwrap();
    assert_eq!(verdict.kind, VerdictKind::FixedPointsExist);
    let row = trace.last_row().unwrap();
    let step = &row.points[1] - &row.points[0];
    assert!(
        step.distance_to(&v(&[0.0, 1.0])) <= 1e-12,
        "x2 - x1 = {step:?}"
    );

    // The classical scheme from the same start walks off to infinity with
    // per-step displacement exactly (0, 1).
    let classical = RunConfig {
        scheme: Scheme::ClassicalDr,
        blowup_norm: 1e4,
        max_cycles: 100_000,
        ..config
    };
    let (trace, verdict) = run(&problem, &x0, &classical).unwrap();
    assert_eq!(verdict.kind, VerdictKind::NormBlowup);
    for row in trace.rows() {
        let displacement = &row.end - &row.points[0];
        assert!(displacement.distance_to(&v(&[0.0, 1.0])) <= 1e-12);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: parallel lines; cyclic DR fixed with step (0,1), classical DR norm blow-up at cycle {} in {elapsed:?}",
        verdict.cycles_used
    );
}

#[test]
fn criterion_2_parabola_best_approximation_pair() {
    // Ground truth by calculus: min of 1 + u^2 is 1 at u = 0, so the unique
    // best approximation pair of epi(1 + u^2) and the axis is ((0,1),(0,0)).
    let (problem, x0, config) = fixture("parabola.json");
    assert_eq!(config.max_cycles, 100_000);
    let (trace, verdict) = run(&problem, &x0, &config).unwrap();
    assert_eq!(verdict.kind, VerdictKind::FixedPointsExist);
    assert!(verdict.cycles_used <= 100_000);

    let report = two_set_report(&trace, &verdict, &problem).unwrap();
    let e = report.e_point.unwrap();
    let f = report.f_point.unwrap();
    let gap = report.gap.unwrap();
    assert!(e.distance_to(&v(&[0.0, 1.0])) <= 1e-4, "e = {e:?}");
    assert!(f.distance_to(&v(&[0.0, 0.0])) <= 1e-4, "f = {f:?}");
    assert!((gap - 1.0).abs() <= 1e-4, "gap = {gap}");

    let shadows = &trace.last_row().unwrap().shadow_residuals;
    assert!(
        shadows.iter().all(|s| *s < 1e-6),
        "shadow residuals {shadows:?}"
    );
    println!(
        "ACCEPTANCE 2 PASS: parabola pair e={e:?} f={f:?} gap={gap:.6} in {} cycles, max shadow {:.2e}",
        verdict.cycles_used,
        shadows.iter().cloned().fold(0.0, f64::max)
    );
}

#[test]
fn criterion_3_hyperbola_never_converges() {
    let (problem, x0, config) = fixture("hyperbola.json");
    assert_eq!(config.max_cycles, 100_000);
    let norm_floor = 2.0 * x0.norm() + 10.0;
    for scheme in [
        Scheme::CyclicDr,
        Scheme::CyclicProjections,
        Scheme::ClassicalDr,
    ] {
        let config = RunConfig {
            scheme,
            ..config.clone()
        };
        let (trace, verdict) = run(&problem, &x0, &config).unwrap();
        assert_ne!(verdict.kind, VerdictKind::FixedPointsExist, "{scheme:?}");
        assert_eq!(verdict.cycles_used, 100_000, "{scheme:?}");
        assert!(
            verdict.witness_norm > norm_floor,
            "{scheme:?}: norm {} below {norm_floor}",
            verdict.witness_norm
        );
        assert!(verdict.tail_growth.unwrap() > 0.0, "{scheme:?}");
        let tail = tail_min_norms(&trace);
        assert!(
            tail.windows(2).all(|w| w[1] >= w[0] - 1e-9),
            "{scheme:?}: tail norms not monotone"
        );
    }
    println!(
        "ACCEPTANCE 3 PASS: hyperbola; all three schemes non-convergent at 1e5 cycles with monotone norm growth past {norm_floor:.2}"
    );
}

#[test]
fn criterion_4_coincidence_from_first_set_seed_400() {
    let mut worst: f64 = 0.0;
    for name in ALL_FIXTURES {
        let (problem, _, _) = fixture(name);
        let sampler = Sampler::cube(400, problem.dim(), 4.0, 20).unwrap();
        for raw in sampler.samples() {
            let start = problem.sets()[0].project(&raw).unwrap();
            let deviation = coincidence_check(&problem, &start, 100).unwrap();
            worst = worst.max(deviation);
        }
    }
    assert!(worst <= 1e-8, "worst deviation {worst:.3e}");
    println!(
        "ACCEPTANCE 4 PASS: cyclic DR and cyclic projections coincide from C_1 starts; worst deviation {worst:.3e} over 20 seeds x 6 fixtures x 100 cycles"
    );
}

#[test]
fn criterion_5_consistent_case_collapse() {
    for name in [
        "consistent_ball_halfspace.json",
        "consistent_crossing_lines.json",
    ] {
        let (problem, x0, config) = fixture(name);
        let (trace, verdict) = run(&problem, &x0, &config).unwrap();
        assert_eq!(verdict.kind, VerdictKind::FixedPointsExist, "{name}");
        let row = trace.last_row().unwrap();
        for (i, pi) in row.projections.iter().enumerate() {
            for pj in row.projections.iter().skip(i + 1) {
                assert!(pi.distance_to(pj) <= 1e-6, "{name}: projections disagree");
            }
            for set in problem.sets() {
                let d = set.distance(pi).unwrap();
                assert!(d <= 1e-6, "{name}: projection {i} off a set by {d:.3e}");
            }
        }
    }
    println!(
        "ACCEPTANCE 5 PASS: consistent fixtures collapse to a common point inside every set (pairwise and membership within 1e-6)"
    );
}

#[test]
fn criterion_6_operator_property_suite_seed_600() {
    let families: Vec<(&str, ConvexSet)> = vec![
        (
            "hyperplane",
            ConvexSet::hyperplane(v(&[3.0, 1.0]), -0.5).unwrap(),
        ),
        (
            "halfspace",
            ConvexSet::halfspace(v(&[1.0, -2.0]), 0.5).unwrap(),
        ),
        ("ball", ConvexSet::ball(v(&[0.5, -0.25]), 1.5).unwrap()),
        (
            "box",
            ConvexSet::box_set(vec![-1.0, 0.0], vec![2.0, f64::INFINITY]).unwrap(),
        ),
        (
            "affine",
            ConvexSet::affine_subspace(vec![(v(&[1.0, 2.0]), 1.0)]).unwrap(),
        ),
        (
            "epigraph_parabola",
            ConvexSet::epigraph(ScalarConvexFn::parabola(1.0, 0.0, 1.0).unwrap(), 0, 1, 2).unwrap(),
        ),
        (
            "epigraph_hyperbola",
            ConvexSet::epigraph(ScalarConvexFn::hyperbola_branch(1.0, 1.0).unwrap(), 0, 1, 2)
                .unwrap(),
        ),
    ];
    let sampler = Sampler::cube(600, 2, 5.0, 1000).unwrap();
    let mut worst: f64 = f64::NEG_INFINITY;
    for (name, set) in &families {
        let firm = check_firmly_nonexpansive(|x| Ok(set.project(x)?), &sampler).unwrap();
        let nonexp = check_nonexpansive(|x| Ok(set.reflect(x)?), &sampler).unwrap();
        let proj = check_projection_characterization(set, &sampler).unwrap();
        let refl = check_reflection_characterization(set, &sampler).unwrap();
        for (what, viol) in [
            ("firm", firm),
            ("reflect", nonexp),
            ("proj-char", proj),
            ("refl-char", refl),
        ] {
            assert!(viol <= 1e-9, "{name} {what}: violation {viol:.3e}");
            worst = worst.max(viol);
        }
    }

    // Two-set Douglas-Rachford steps are firmly nonexpansive; full cycles
    // are nonexpansive.
    let axis = ConvexSet::hyperplane(v(&[0.0, 1.0]), 0.0).unwrap();
    for (_, set) in &families {
        let viol = check_firmly_nonexpansive(|x| Ok(dr_step(set, &axis, x)?), &sampler).unwrap();
        assert!(viol <= 1e-9, "dr_step violation {viol:.3e}");
        worst = worst.max(viol);
    }
    let (three, _, _) = fixture("three_lines.json");
    let viol = check_nonexpansive(|x| Ok(cyclic_dr_cycle(&three, 1, x)?.end), &sampler).unwrap();
    assert!(viol <= 1e-9, "cyclic composite violation {viol:.3e}");
    worst = worst.max(viol);

    // Negative controls: the checkers can fail.
    let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
    let control_a = check_firmly_nonexpansive(|x| Ok(ball.reflect(x)?), &sampler).unwrap();
    assert!(
        control_a > 1e-3,
        "reflection control too small: {control_a:.3e}"
    );
    let control_b = check_nonexpansive(|x| Ok(x.scaled(1.1)), &sampler).unwrap();
    assert!(
        control_b > 1e-3,
        "scaled-identity control too small: {control_b:.3e}"
    );

    println!(
        "ACCEPTANCE 6 PASS: operator properties hold to {worst:.2e} over 1000 seeded pairs per check; negative controls {control_a:.2e} / {control_b:.2e}"
    );
}

#[test]
fn criterion_7_oracle_equivalence_seed_700() {
    let started = Instant::now();
    let families: Vec<(&str, ConvexSet)> = vec![
        (
            "hyperplane",
            ConvexSet::hyperplane(v(&[3.0, 1.0]), -0.5).unwrap(),
        ),
        (
            "halfspace",
            ConvexSet::halfspace(v(&[1.0, -2.0]), 0.5).unwrap(),
        ),
        ("ball", ConvexSet::ball(v(&[0.5, -0.25]), 1.5).unwrap()),
        (
            "box",
            ConvexSet::box_set(vec![-1.0, 0.0], vec![2.0, 1.5]).unwrap(),
        ),
        (
            "affine",
            ConvexSet::affine_subspace(vec![(v(&[1.0, 2.0]), 1.0)]).unwrap(),
        ),
        (
            "epigraph_parabola",
            ConvexSet::epigraph(ScalarConvexFn::parabola(1.0, 0.0, 1.0).unwrap(), 0, 1, 2).unwrap(),
        ),
        (
            "epigraph_hyperbola",
            ConvexSet::epigraph(ScalarConvexFn::hyperbola_branch(1.0, 1.0).unwrap(), 0, 1, 2)
                .unwrap(),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (name, set) in &families {
        let sampler = Sampler::cube(700, 2, 4.0, 200).unwrap();
        for query in sampler.samples() {
            let fast = set.project(&query).unwrap();
            let slow = brute_force_project(set, &query, 401, 60).unwrap();
            let gap = fast.distance_to(&slow);
            assert!(
                gap <= 1e-5,
                "{name}: query {query:?} disagreement {gap:.3e}"
            );
            worst = worst.max(gap);
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 7 PASS: projector vs brute force within {worst:.2e} over 200 seeded queries x 7 families in {elapsed:?}"
    );
}

#[test]
fn criterion_8_difference_vector_estimators() {
    // Hand-derived limit cycles: parallel lines walk (0,0) -> (0,1) and
    // back; the three-line cycle visits (0,0) -> (0,1) -> (0,1).
    let cases: [(&str, Vec<Vector>); 2] = [
        ("parallel_lines.json", vec![v(&[0.0, 1.0]), v(&[0.0, -1.0])]),
        (
            "three_lines.json",
            vec![v(&[0.0, 1.0]), v(&[0.0, 0.0]), v(&[0.0, -1.0])],
        ),
    ];
    for (name, expected) in &cases {
        let (problem, x0, config) = fixture(name);
        let (trace, verdict) = run(&problem, &x0, &config).unwrap();
        let dv = estimate_difference_vectors(&trace, &verdict).unwrap();
        assert!(
            dv.estimator_spread <= 1e-6,
            "{name}: spread {:.3e}",
            dv.estimator_spread
        );
        for (d, want) in dv.d.iter().zip(expected) {
            assert!(
                d.distance_to(want) <= 1e-6,
                "{name}: d = {d:?}, want {want:?}"
            );
        }
        assert!(dv.closure_defect() <= 1e-6, "{name}: sum d != 0");
    }
    println!(
        "ACCEPTANCE 8 PASS: difference-vector estimators agree and match hand-derived d^i on parallel-lines and three-lines fixtures"
    );
}

#[test]
fn criterion_9_rate_identities_on_classical_run() {
    let (problem, x0, _) = fixture("parallel_lines.json");
    let config = RunConfig {
        scheme: Scheme::ClassicalDr,
        max_cycles: 300,
        ..RunConfig::default()
    };
    let (trace, _) = run(&problem, &x0, &config).unwrap();
    let report = asymptotic_rate_check(&trace, 10).unwrap();
    let mut checked = 0;
    for s in report.samples.iter().filter(|s| s.cycle >= 100) {
        assert!(
            (s.consecutive - 1.0).abs() <= 1e-9,
            "cycle {}: {s:?}",
            s.cycle
        );
        assert!(
            (s.k_step_mean - 1.0).abs() <= 1e-9,
            "cycle {}: {s:?}",
            s.cycle
        );
        assert!(
            (s.norm_over_cycles - 1.0).abs() <= 1e-9,
            "cycle {}: {s:?}",
            s.cycle
        );
        checked += 1;
    }
    assert!(checked >= 200, "only {checked} samples past cycle 100");
    println!(
        "ACCEPTANCE 9 PASS: consecutive-step, k-step mean (k=10), and norm-over-n all equal 1 within 1e-9 on {checked} cycles >= 100"
    );
}
