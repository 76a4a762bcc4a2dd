//! Post-processing of completed traces into limit objects: per-pair
//! difference vectors, the displacement vector between two sets, best
//! approximation pairs, and cross-scheme comparison.
//!
//! All functions here are pure over completed traces and immutable
//! problems; [`compare_methods`] may run the three schemes concurrently
//! since each run is independent.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::engine::{run, DichotomyVerdict, EngineError, RunConfig, Scheme, Trace, VerdictKind};
use crate::geometry::{default_membership_tol, GeometryError, Vector};
use crate::operators::{cyclic_dr_cycle, cyclic_projection_cycle, CyclicProblem, OperatorError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("estimates are meaningless on a diverging trace")]
    DivergingTrace,
    #[error("operation requires a {expected} trace, got {got}")]
    WrongScheme {
        expected: &'static str,
        got: &'static str,
    },
    #[error("operation requires a two-set problem, got {0} sets")]
    NeedsTwoSets(usize),
    #[error("x0 must lie in the first set (distance {distance:.3e})")]
    StartNotInFirstSet { distance: f64 },
    #[error("trace is empty")]
    EmptyTrace,
}

/// Estimated difference vectors `d^i` along the limit cycle, with the
/// worst disagreement among the three estimators as an honest error proxy.
#[derive(Clone, Debug)]
pub struct DifferenceVectors {
    pub d: Vec<Vector>,
    pub estimator_spread: f64,
}

impl DifferenceVectors {
    /// `Σ d^i`, which vanishes because the limit cycle closes.
    pub fn closure_defect(&self) -> f64 {
        let dim = self.d[0].dim();
        let mut sum = Vector::zeros(dim);
        for d in &self.d {
            sum = &sum + d;
        }
        sum.norm()
    }
}

/// Estimates `d^i` at the final recorded cycle from the three sequences
/// that converge to it: the iterate gaps `x^{i+1} − x^i`, the step
/// decompositions `P_{C_{i+1}} R_{C_i} x^i − P_{C_i} x^i`, and the
/// projection gaps `P_{C_{i+1}} x^{i+1} − P_{C_i} x^i`. The mean is the
/// estimate; the max pairwise distance is the reported spread.
pub fn estimate_difference_vectors(
    trace: &Trace,
    verdict: &DichotomyVerdict,
) -> Result<DifferenceVectors, AnalysisError> {
    if trace.scheme == Scheme::ClassicalDr {
        return Err(AnalysisError::WrongScheme {
            expected: "cyclic",
            got: trace.scheme.name(),
        });
    }
    if verdict.kind != VerdictKind::FixedPointsExist {
        return Err(AnalysisError::DivergingTrace);
    }
    let row = trace.last_row().ok_or(AnalysisError::EmptyTrace)?;
    let n = row.points.len();
    let mut d = Vec::with_capacity(n);
    let mut spread: f64 = 0.0;
    for i in 0..n {
        let next_point = if i + 1 < n {
            &row.points[i + 1]
        } else {
            &row.end
        };
        let next_proj = if i + 1 < n {
            &row.projections[i + 1]
        } else {
            &row.end_projection
        };
        let e1 = next_point - &row.points[i];
        let e2 = &row.reflected_projections[i] - &row.projections[i];
        let e3 = next_proj - &row.projections[i];
        spread = spread
            .max(e1.distance_to(&e2))
            .max(e1.distance_to(&e3))
            .max(e2.distance_to(&e3));
        let mean = Vector::from_raw(
            e1.as_slice()
                .iter()
                .zip(e2.as_slice().iter().zip(e3.as_slice()))
                .map(|(a, (b, c))| (a + b + c) / 3.0)
                .collect(),
        );
        d.push(mean);
    }
    Ok(DifferenceVectors {
        d,
        estimator_spread: spread,
    })
}

/// The two-set limit objects: a point of `E` (nearest points of `C_1` to
/// `C_2`), a point of `F`, the displacement vector `v = f − e`, and the gap
/// `‖v‖`. When the trace diverges no best approximation pair exists and
/// `attained` is false with no points.
#[derive(Clone, Debug)]
pub struct TwoSetReport {
    pub attained: bool,
    pub e_point: Option<Vector>,
    pub f_point: Option<Vector>,
    pub v: Option<Vector>,
    pub gap: Option<f64>,
    /// `‖P_{C_2} R_{C_1} x^1 − P_{C_2} x^2‖`, which vanishes at a fixed
    /// cycle; large values mean the run stopped short of its limit.
    pub identity_residual: Option<f64>,
}

pub fn two_set_report(
    trace: &Trace,
    verdict: &DichotomyVerdict,
    problem: &CyclicProblem,
) -> Result<TwoSetReport, AnalysisError> {
    if problem.n_sets() != 2 || trace.n_sets != 2 {
        return Err(AnalysisError::NeedsTwoSets(problem.n_sets()));
    }
    if trace.scheme == Scheme::ClassicalDr {
        return Err(AnalysisError::WrongScheme {
            expected: "cyclic",
            got: trace.scheme.name(),
        });
    }
    if verdict.kind != VerdictKind::FixedPointsExist {
        return Ok(TwoSetReport {
            attained: false,
            e_point: None,
            f_point: None,
            v: None,
            gap: None,
            identity_residual: None,
        });
    }
    let row = trace.last_row().ok_or(AnalysisError::EmptyTrace)?;
    let e_point = row.projections[0].clone();
    let f_point = row.projections[1].clone();
    let v = &f_point - &e_point;
    let gap = v.norm();
    let identity_residual = row.shadow_residuals[0];
    debug_assert!(problem.sets()[0].contains(&e_point, default_membership_tol(&e_point))?);
    debug_assert!(problem.sets()[1].contains(&f_point, default_membership_tol(&f_point))?);
    Ok(TwoSetReport {
        attained: true,
        e_point: Some(e_point),
        f_point: Some(f_point),
        v: Some(v),
        gap: Some(gap),
        identity_residual: Some(identity_residual),
    })
}

/// Runs cyclic Douglas-Rachford and cyclic projections side by side from the
/// same `x0 ∈ C_1` for `cycles` cycles and returns the largest pointwise
/// deviation between the two inner sequences, which coincide exactly in
/// that case.
pub fn coincidence_check(
    problem: &CyclicProblem,
    x0: &Vector,
    cycles: u64,
) -> Result<f64, AnalysisError> {
    let distance = problem.sets()[0].distance(x0)?;
    if distance > default_membership_tol(x0) {
        return Err(AnalysisError::StartNotInFirstSet { distance });
    }
    let mut x = x0.clone();
    let mut y = x0.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..cycles {
        let dr = cyclic_dr_cycle(problem, 1, &x)?;
        let cp = cyclic_projection_cycle(problem, 1, &y)?;
        for (xi, yi) in dr.inner.iter().zip(&cp.inner) {
            worst = worst.max(xi.distance_to(yi));
        }
        x = dr.end;
        y = cp.end;
    }
    Ok(worst)
}

/// Runs cyclic Douglas-Rachford from `x0` and cyclic projections from
/// `P_{C_1} x0` for `cycles` cycles, then returns the largest deviation of
/// the consecutive-iterate differences `(x^i − x^{i+1}) − (y^i − y^{i+1})`
/// at the final cycle. The deviation tends to zero even when the starting
/// points (and hence the sequences) differ.
pub fn asymptotic_difference_check(
    problem: &CyclicProblem,
    x0: &Vector,
    cycles: u64,
) -> Result<f64, AnalysisError> {
    let mut x = x0.clone();
    let mut y = problem.sets()[0].project(x0)?;
    let mut worst = f64::INFINITY;
    for _ in 0..cycles {
        let dr = cyclic_dr_cycle(problem, 1, &x)?;
        let cp = cyclic_projection_cycle(problem, 1, &y)?;
        let mut cur_x = x.clone();
        let mut cur_y = y.clone();
        let mut max_dev: f64 = 0.0;
        for (nx, ny) in dr.inner.iter().zip(&cp.inner) {
            let dx = &cur_x - nx;
            let dy = &cur_y - ny;
            max_dev = max_dev.max(dx.distance_to(&dy));
            cur_x = nx.clone();
            cur_y = ny.clone();
        }
        worst = max_dev;
        x = dr.end;
        y = cp.end;
    }
    Ok(worst)
}

/// Displacement and best-approximation-pair estimates from a classical
/// Douglas-Rachford trace. Even when the iterates `z_n` diverge, the shadow
/// sequences `P_{C_1} z_n` stay bounded exactly when nearest pairs exist,
/// and their cluster points form such a pair.
#[derive(Clone, Debug)]
pub struct ClassicalShadowReport {
    /// `P_{C_2} P_{C_1} z_n − P_{C_1} z_n` at the final recorded cycle.
    pub v_estimate: Vector,
    /// Whether the shadow sequence looks bounded over the trailing window.
    pub shadows_bounded: bool,
    /// Window means of `(P_{C_1} z_n, P_{C_2} P_{C_1} z_n)` when bounded.
    pub best_pair: Option<(Vector, Vector)>,
    /// Largest deviation from the window means; flags unresolved multiple
    /// cluster points (or a run stopped far from its limit).
    pub pair_dispersion: f64,
    pub shadow_norm_first: f64,
    pub shadow_norm_last: f64,
}

pub fn classical_dr_shadow_report(trace: &Trace) -> Result<ClassicalShadowReport, AnalysisError> {
    if trace.scheme != Scheme::ClassicalDr {
        return Err(AnalysisError::WrongScheme {
            expected: "classical_dr",
            got: trace.scheme.name(),
        });
    }
    let last = trace.last_row().ok_or(AnalysisError::EmptyTrace)?;
    let v_estimate = &last.composed_projections[0] - &last.projections[0];

    let window: Vec<_> = {
        let mut rows: Vec<_> = trace.rows().rev().take(100).collect();
        rows.reverse();
        rows
    };
    let shadow_norm_first = window
        .first()
        .map(|r| r.projections[0].norm())
        .unwrap_or(0.0);
    let shadow_norm_last = window
        .last()
        .map(|r| r.projections[0].norm())
        .unwrap_or(0.0);
    let shadows_bounded = shadow_norm_last - shadow_norm_first <= 1e-3 * (1.0 + shadow_norm_first);

    let dim = last.projections[0].dim();
    let count = window.len() as f64;
    let mut mean1 = Vector::zeros(dim);
    let mut mean2 = Vector::zeros(dim);
    for r in &window {
        mean1 = mean1.add_scaled(1.0 / count, &r.projections[0]);
        mean2 = mean2.add_scaled(1.0 / count, &r.composed_projections[0]);
    }
    let mut pair_dispersion: f64 = 0.0;
    for r in &window {
        pair_dispersion = pair_dispersion
            .max(r.projections[0].distance_to(&mean1))
            .max(r.composed_projections[0].distance_to(&mean2));
    }
    let best_pair = shadows_bounded.then_some((mean1, mean2));
    Ok(ClassicalShadowReport {
        v_estimate,
        shadows_bounded,
        best_pair,
        pair_dispersion,
        shadow_norm_first,
        shadow_norm_last,
    })
}

/// One scheme's outcome in a side-by-side comparison.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub scheme: Scheme,
    pub verdict: VerdictKind,
    pub cycles: u64,
    pub final_residual: f64,
    /// Two-set gap estimate where the scheme defines one.
    pub gap_estimate: Option<f64>,
    pub v_estimate: Option<Vector>,
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub struct MethodComparison {
    pub rows: Vec<ComparisonRow>,
}

/// Runs every applicable scheme from the same `x0` under the same
/// thresholds and tabulates verdicts, cycles, and gap estimates. The
/// classical scheme only applies to two-set problems. Purely observational.
pub fn compare_methods(
    problem: &CyclicProblem,
    x0: &Vector,
    config: &RunConfig,
) -> Result<MethodComparison, AnalysisError> {
    let mut schemes = vec![Scheme::CyclicDr, Scheme::CyclicProjections];
    if problem.n_sets() == 2 {
        schemes.push(Scheme::ClassicalDr);
    }

    #[cfg(feature = "parallel")]
    let results: Vec<Result<ComparisonRow, AnalysisError>> = {
        use rayon::prelude::*;
        schemes
            .par_iter()
            .map(|&scheme| compare_one(problem, x0, config, scheme))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<ComparisonRow, AnalysisError>> = schemes
        .iter()
        .map(|&scheme| compare_one(problem, x0, config, scheme))
        .collect();

    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(MethodComparison { rows })
}

fn compare_one(
    problem: &CyclicProblem,
    x0: &Vector,
    config: &RunConfig,
    scheme: Scheme,
) -> Result<ComparisonRow, AnalysisError> {
    let started = Instant::now();
    let config = RunConfig {
        scheme,
        ..config.clone()
    };
    let (trace, verdict) = run(problem, x0, &config)?;
    let wall = started.elapsed();
    let (gap_estimate, v_estimate) = match scheme {
        Scheme::ClassicalDr => {
            let report = classical_dr_shadow_report(&trace)?;
            (Some(report.v_estimate.norm()), Some(report.v_estimate))
        }
        _ if problem.n_sets() == 2 && verdict.kind == VerdictKind::FixedPointsExist => {
            let report = two_set_report(&trace, &verdict, problem)?;
            (report.gap, report.v)
        }
        _ => (None, None),
    };
    Ok(ComparisonRow {
        scheme,
        verdict: verdict.kind,
        cycles: verdict.cycles_used,
        final_residual: verdict.final_residual,
        gap_estimate,
        v_estimate,
        wall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexSet, ScalarConvexFn};

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec()).unwrap()
    }

    fn parallel_lines() -> CyclicProblem {
        CyclicProblem::new(vec![
            ConvexSet::hyperplane(v(&[0.0, 1.0]), 0.0).unwrap(),
            ConvexSet::hyperplane(v(&[0.0, 1.0]), 1.0).unwrap(),
        ])
        .unwrap()
    }

    fn three_lines() -> CyclicProblem {
        CyclicProblem::new(vec![
            ConvexSet::hyperplane(v(&[0.0, 1.0]), 0.0).unwrap(),
            ConvexSet::hyperplane(v(&[0.0, 1.0]), 1.0).unwrap(),
            ConvexSet::hyperplane(v(&[1.0, 0.0]), 0.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn difference_vectors_on_parallel_lines() {
        let problem = parallel_lines();
        let (trace, verdict) = run(&problem, &v(&[0.0, 0.0]), &RunConfig::default()).unwrap();
        let dv = estimate_difference_vectors(&trace, &verdict).unwrap();
        assert!(dv.d[0].distance_to(&v(&[0.0, 1.0])) <= 1e-12);
        assert!(dv.d[1].distance_to(&v(&[0.0, -1.0])) <= 1e-12);
        assert!(dv.estimator_spread <= 1e-12);
        assert!(dv.closure_defect() <= 1e-12);
    }

    #[test]
    fn difference_vectors_on_three_lines() {
        let problem = three_lines();
        let (trace, verdict) = run(&problem, &v(&[2.0, 0.5]), &RunConfig::default()).unwrap();
        let dv = estimate_difference_vectors(&trace, &verdict).unwrap();
        assert!(dv.d[0].distance_to(&v(&[0.0, 1.0])) <= 1e-12);
        assert!(dv.d[1].distance_to(&v(&[0.0, 0.0])) <= 1e-12);
        assert!(dv.d[2].distance_to(&v(&[0.0, -1.0])) <= 1e-12);
        assert!(dv.estimator_spread <= 1e-12);
    }

    #[test]
    fn difference_vectors_vanish_on_consistent_problems() {
        let problem = CyclicProblem::new(vec![
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::halfspace(v(&[0.0, -1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let (trace, verdict) = run(&problem, &v(&[2.0, -1.5]), &RunConfig::default()).unwrap();
        assert_eq!(verdict.kind, VerdictKind::FixedPointsExist);
        let dv = estimate_difference_vectors(&trace, &verdict).unwrap();
        for d in &dv.d {
            assert!(d.norm() <= 1e-8, "{d:?}");
        }
    }

    #[test]
    fn two_set_report_on_parallel_lines() {
        let problem = parallel_lines();
        let (trace, verdict) = run(&problem, &v(&[0.0, 0.0]), &RunConfig::default()).unwrap();
        let report = two_set_report(&trace, &verdict, &problem).unwrap();
        assert!(report.attained);
        assert!(report.e_point.unwrap().distance_to(&v(&[0.0, 0.0])) <= 1e-12);
        assert!(report.f_point.unwrap().distance_to(&v(&[0.0, 1.0])) <= 1e-12);
        assert!((report.gap.unwrap() - 1.0).abs() <= 1e-12);
        assert!(report.identity_residual.unwrap() <= 1e-12);
    }

    #[test]
    fn two_set_report_gap_matches_difference_vector_norm() {
        let problem = parallel_lines();
        let (trace, verdict) = run(&problem, &v(&[3.0, -2.0]), &RunConfig::default()).unwrap();
        let report = two_set_report(&trace, &verdict, &problem).unwrap();
        let dv = estimate_difference_vectors(&trace, &verdict).unwrap();
        assert!((report.gap.unwrap() - dv.d[0].norm()).abs() <= 1e-6);
    }

    #[test]
    fn consistent_two_set_report_has_zero_gap() {
        let problem = CyclicProblem::new(vec![
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::halfspace(v(&[0.0, -1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let (trace, verdict) = run(&problem, &v(&[2.0, -1.5]), &RunConfig::default()).unwrap();
        let report = two_set_report(&trace, &verdict, &problem).unwrap();
        assert!(report.gap.unwrap() <= 1e-8);
        let e = report.e_point.unwrap();
        let f = report.f_point.unwrap();
        assert!(e.distance_to(&f) <= 1e-8);
    }

    #[test]
    fn coincidence_check_examples() {
        // One set repeated: both schemes collapse to the same projection.
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let problem = CyclicProblem::new(vec![ball.clone(), ball]).unwrap();
        let dev = coincidence_check(&problem, &v(&[0.5, 0.0]), 50).unwrap();
        assert_eq!(dev, 0.0);

        // Starting point off C_1 is rejected.
        let problem = parallel_lines();
        assert!(matches!(
            coincidence_check(&problem, &v(&[0.0, 0.5]), 10),
            Err(AnalysisError::StartNotInFirstSet { .. })
        ));
    }

    #[test]
    fn asymptotic_difference_on_parallel_lines_vanishes() {
        let problem = parallel_lines();
        let dev = asymptotic_difference_check(&problem, &v(&[4.0, -3.0]), 3).unwrap();
        assert!(dev <= 1e-12, "deviation {dev}");
    }

    #[test]
    fn classical_shadow_report_on_parallel_lines() {
        let problem = parallel_lines();
        let config = RunConfig {
            scheme: Scheme::ClassicalDr,
            max_cycles: 500,
            ..RunConfig::default()
        };
        let (trace, _) = run(&problem, &v(&[0.0, 0.0]), &config).unwrap();
        let report = classical_dr_shadow_report(&trace).unwrap();
        assert!(report.v_estimate.distance_to(&v(&[0.0, 1.0])) <= 1e-12);
        assert!(report.shadows_bounded);
        let (e, f) = report.best_pair.unwrap();
        assert!(e.distance_to(&v(&[0.0, 0.0])) <= 1e-12);
        assert!(f.distance_to(&v(&[0.0, 1.0])) <= 1e-12);
        assert!(report.pair_dispersion <= 1e-12);
    }

    #[test]
    fn classical_shadow_report_rejects_cyclic_traces() {
        let problem = parallel_lines();
        let (trace, _) = run(&problem, &v(&[0.0, 0.0]), &RunConfig::default()).unwrap();
        assert!(matches!(
            classical_dr_shadow_report(&trace),
            Err(AnalysisError::WrongScheme { .. })
        ));
    }

    #[test]
    fn compare_methods_on_parallel_lines() {
        let problem = parallel_lines();
        let config = RunConfig {
            blowup_norm: 1e3,
            max_cycles: 50_000,
            ..RunConfig::default()
        };
        let cmp = compare_methods(&problem, &v(&[0.0, 0.0]), &config).unwrap();
        assert_eq!(cmp.rows.len(), 3);
        assert_eq!(cmp.rows[0].scheme, Scheme::CyclicDr);
        assert_eq!(cmp.rows[0].verdict, VerdictKind::FixedPointsExist);
        assert_eq!(cmp.rows[1].scheme, Scheme::CyclicProjections);
        assert_eq!(cmp.rows[1].verdict, VerdictKind::FixedPointsExist);
        assert_eq!(cmp.rows[2].scheme, Scheme::ClassicalDr);
        assert_eq!(cmp.rows[2].verdict, VerdictKind::NormBlowup);
        assert!((cmp.rows[2].gap_estimate.unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn compare_methods_consistent_case() {
        let problem = CyclicProblem::new(vec![
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::halfspace(v(&[0.0, -1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let cmp = compare_methods(&problem, &v(&[2.0, -1.5]), &RunConfig::default()).unwrap();
        for row in &cmp.rows {
            assert_eq!(
                row.verdict,
                VerdictKind::FixedPointsExist,
                "{:?}",
                row.scheme
            );
        }
    }

    #[test]
    fn estimators_reject_diverging_runs() {
        let problem = parallel_lines();
        let config = RunConfig {
            scheme: Scheme::ClassicalDr,
            blowup_norm: 1e3,
            max_cycles: 50_000,
            ..RunConfig::default()
        };
        let (trace, verdict) = run(&problem, &v(&[0.0, 0.0]), &config).unwrap();
        assert!(matches!(
            estimate_difference_vectors(&trace, &verdict),
            Err(AnalysisError::WrongScheme { .. })
        ));
        // A cyclic trace that did not converge is also rejected.
        let config = RunConfig {
            max_cycles: 3,
            fix_tol: 1e-300,
            ..RunConfig::default()
        };
        let hyper = CyclicProblem::new(vec![
            ConvexSet::epigraph(ScalarConvexFn::hyperbola_branch(1.0, 1.0).unwrap(), 0, 1, 2)
                .unwrap(),
            ConvexSet::hyperplane(v(&[0.0, 1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let (trace, verdict) = run(&hyper, &v(&[1.0, 0.5]), &config).unwrap();
        assert!(matches!(
            estimate_difference_vectors(&trace, &verdict),
            Err(AnalysisError::DivergingTrace)
        ));
    }
}
