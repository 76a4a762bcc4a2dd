//! Drives a projection scheme from an initial point, records per-cycle
//! traces, and classifies each run as one of the two dichotomy
//! alternatives: fixed points exist (the residual vanishes) or no fixed
//! points exist (the iterate norms diverge).
//!
//! A single run is strictly sequential — every iterate depends on the
//! previous one — but runs over distinct problems are independent and may
//! execute concurrently; see [`crate::analysis::compare_methods`].

use std::collections::VecDeque;
use std::io;

use thiserror::Error;

use crate::geometry::{GeometryError, Vector};
use crate::operators::{cyclic_dr_averagedness, dr_step_decomposed, CyclicProblem, OperatorError};

/// Recorded cycles kept in memory; older rows are dropped once streamed.
pub const RING_CAPACITY: usize = 1000;

/// Trailing window of recorded cycles over which norm growth must be
/// positive before a run is declared a norm blow-up. Divergence cannot be
/// proven in finite time; this threshold (like `blowup_norm`) is an
/// engineering choice, surfaced as `tail_growth` in the verdict.
pub const NORM_WINDOW: usize = 100;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("the classical Douglas-Rachford scheme needs exactly two sets, got {0}")]
    ClassicalNeedsTwoSets(usize),
    #[error("iterate became non-finite at cycle {cycle} (numerical breakdown)")]
    NonFiniteIterate { cycle: u64 },
    #[error("trace sink failed: {0}")]
    Sink(#[from] io::Error),
    #[error("trace is empty")]
    EmptyTrace,
    #[error("trace too short: need {needed} recorded cycles, have {have}")]
    TraceTooShort { needed: usize, have: usize },
}

/// Which iteration to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    CyclicDr,
    CyclicProjections,
    ClassicalDr,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::CyclicDr => "cyclic_dr",
            Scheme::CyclicProjections => "cyclic_projections",
            Scheme::ClassicalDr => "classical_dr",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cyclic_dr" => Ok(Scheme::CyclicDr),
            "cyclic_projections" => Ok(Scheme::CyclicProjections),
            "classical_dr" => Ok(Scheme::ClassicalDr),
            other => Err(format!(
                "unknown scheme `{other}` (expected cyclic_dr, cyclic_projections, classical_dr)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub max_cycles: u64,
    /// Fixed-point residual threshold on `‖x_{n+1}^1 − x_n^1‖`.
    pub fix_tol: f64,
    /// Norm threshold that, with sustained growth, declares divergence.
    pub blowup_norm: f64,
    pub record_stride: u64,
    pub scheme: Scheme,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_cycles: 1_000_000,
            fix_tol: 1e-10,
            blowup_norm: 1e8,
            record_stride: 1,
            scheme: Scheme::CyclicDr,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.max_cycles == 0 {
            return Err(EngineError::InvalidConfig(
                "max_cycles must be positive".into(),
            ));
        }
        if self.record_stride == 0 {
            return Err(EngineError::InvalidConfig(
                "record_stride must be positive".into(),
            ));
        }
        if !(self.fix_tol > 0.0 && self.fix_tol.is_finite()) {
            return Err(EngineError::InvalidConfig(
                "fix_tol must be positive and finite".into(),
            ));
        }
        if !(self.blowup_norm > 0.0 && self.blowup_norm.is_finite()) {
            return Err(EngineError::InvalidConfig(
                "blowup_norm must be positive and finite".into(),
            ));
        }
        if self.fix_tol >= self.blowup_norm {
            return Err(EngineError::InvalidConfig(
                "fix_tol must be below blowup_norm".into(),
            ));
        }
        Ok(())
    }
}

/// One recorded cycle.
///
/// For the cyclic schemes `points[i]` holds the iterates `x_n^1 .. x_n^N`
/// (resp. `y_n^1 .. y_n^N`), and:
///
/// * `projections[i] = P_{C_i} x_n^i` — nearest point in the slot's own set,
/// * `reflected_projections[i] = P_{C_{i+1}} R_{C_i} x_n^i` — the projected
///   reflection the Douglas-Rachford step passes through (for cyclic
///   projections this is simply the next iterate),
/// * `end` — the iterate starting the next cycle (`x_{n+1}^1`),
/// * `end_projection = P_{C_1} end`,
/// * `shadow_residuals[i] = ‖reflected_projections[i] − P_{C_{i+1}} x_n^{i+1}‖`,
///   the difference-form residual that vanishes along every run,
/// * `cycle_residual = ‖end − points[0]‖`.
///
/// The classical scheme stores one slot per cycle: `points = [z_n]`,
/// `projections = [P_{C_1} z_n]`, `reflected_projections = [P_{C_2} R_{C_1} z_n]`,
/// plus `composed_projections = [P_{C_2} P_{C_1} z_n]` (empty for the other
/// schemes), and its shadow residual is the gap between the two displacement
/// estimators `‖P_{C_2} R_{C_1} z_n − P_{C_2} P_{C_1} z_n‖`.
#[derive(Clone, Debug)]
pub struct TraceRow {
    pub cycle: u64,
    pub points: Vec<Vector>,
    pub projections: Vec<Vector>,
    pub reflected_projections: Vec<Vector>,
    pub composed_projections: Vec<Vector>,
    pub end: Vector,
    pub end_projection: Vector,
    pub cycle_residual: f64,
    pub shadow_residuals: Vec<f64>,
    pub norms: Vec<f64>,
}

impl TraceRow {
    pub fn min_norm(&self) -> f64 {
        self.norms.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Recorded history of a run: a ring buffer of the most recent
/// [`RING_CAPACITY`] recorded cycles plus the first two cycles, which the
/// bounded-residual-sum diagnostic needs. Full traces are streamed to disk
/// by the CLI as rows are produced.
#[derive(Clone, Debug)]
pub struct Trace {
    pub scheme: Scheme,
    pub n_sets: usize,
    pub dim: usize,
    pub record_stride: u64,
    /// Averagedness constant `1 − 2^{−N}` of the cycle operator (metadata).
    pub averagedness: f64,
    rows: VecDeque<TraceRow>,
    head: Vec<TraceRow>,
    pub total_cycles: u64,
    pub recorded: u64,
    /// Running `Σ_{n≥2} Σ_i ‖(x^{i+1} − P x^{i+1}) − (x^i − P x^i)‖²`
    /// (cyclic Douglas-Rachford only).
    pub residual_diff_sum: Option<f64>,
    /// The first-cycle inner product that bounds the sum above.
    pub residual_diff_bound: Option<f64>,
}

impl Trace {
    fn new(scheme: Scheme, n_sets: usize, dim: usize, record_stride: u64) -> Self {
        Self {
            scheme,
            n_sets,
            dim,
            record_stride,
            averagedness: cyclic_dr_averagedness(n_sets as u32),
            rows: VecDeque::new(),
            head: Vec::new(),
            total_cycles: 0,
            recorded: 0,
            residual_diff_sum: if scheme == Scheme::CyclicDr {
                Some(0.0)
            } else {
                None
            },
            residual_diff_bound: None,
        }
    }

    fn record(&mut self, row: TraceRow) {
        if row.cycle <= 2 {
            self.head.push(row.clone());
        }
        if self.rows.len() == RING_CAPACITY {
            self.rows.pop_front();
        }
        self.rows.push_back(row);
        self.recorded += 1;
    }

    /// Recorded rows still in memory, oldest first.
    pub fn rows(&self) -> impl DoubleEndedIterator<Item = &TraceRow> + ExactSizeIterator {
        self.rows.iter()
    }

    pub fn last_row(&self) -> Option<&TraceRow> {
        self.rows.back()
    }

    /// The first two cycles, kept outside the ring.
    pub fn head_rows(&self) -> &[TraceRow] {
        &self.head
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    FixedPointsExist,
    NormBlowup,
    Inconclusive,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::FixedPointsExist => "fixed_points_exist",
            VerdictKind::NormBlowup => "norm_blowup",
            VerdictKind::Inconclusive => "inconclusive",
        }
    }
}

/// Classification of a run, with the thresholds' observables attached.
#[derive(Clone, Debug)]
pub struct DichotomyVerdict {
    pub kind: VerdictKind,
    pub cycles_used: u64,
    /// Final cycle-start iterate.
    pub witness: Vector,
    pub witness_norm: f64,
    pub final_residual: f64,
    /// Mean per-recorded-cycle growth of `min_i ‖x_n^i‖` over the trailing
    /// window; positive sustained growth is the (heuristic) divergence
    /// signal.
    pub tail_growth: Option<f64>,
}

fn window_growth(window: &VecDeque<f64>) -> Option<f64> {
    if window.len() < 2 {
        return None;
    }
    let first = *window.front().unwrap();
    let last = *window.back().unwrap();
    Some((last - first) / (window.len() - 1) as f64)
}

/// Runs the configured scheme from `x0` until fixed-point residual drop,
/// confirmed norm blow-up, or the cycle budget. The returned trace holds the
/// retained rows; `on_record` sees every recorded row as it is produced.
pub fn run_streaming(
    problem: &CyclicProblem,
    x0: &Vector,
    config: &RunConfig,
    mut on_record: impl FnMut(&TraceRow) -> io::Result<()>,
) -> Result<(Trace, DichotomyVerdict), EngineError> {
    config.validate()?;
    if x0.dim() != problem.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: problem.dim(),
            got: x0.dim(),
        }
        .into());
    }
    if !x0.is_finite() {
        return Err(GeometryError::NonFiniteCoordinate.into());
    }
    let n = problem.n_sets();
    if config.scheme == Scheme::ClassicalDr && n != 2 {
        return Err(EngineError::ClassicalNeedsTwoSets(n));
    }

    let mut trace = Trace::new(config.scheme, n, problem.dim(), config.record_stride);
    // The cyclic-projection scheme starts from the nearest point of the
    // first set, so running it from any x0 matches running it from P_1 x0.
    let mut state = match config.scheme {
        Scheme::CyclicProjections => problem.sets()[0].project(x0)?,
        _ => x0.clone(),
    };
    let mut window: VecDeque<f64> = VecDeque::with_capacity(NORM_WINDOW);
    let mut kind = VerdictKind::Inconclusive;
    let mut final_row: Option<TraceRow> = None;

    for cycle in 1..=config.max_cycles {
        let row = match config.scheme {
            Scheme::CyclicDr => cyclic_dr_row(problem, cycle, &state)?,
            Scheme::CyclicProjections => cyclic_projection_row(problem, cycle, &state)?,
            Scheme::ClassicalDr => classical_dr_row(problem, cycle, &state)?,
        };
        if !row.end.is_finite() || !row.cycle_residual.is_finite() {
            return Err(EngineError::NonFiniteIterate { cycle });
        }

        if config.scheme == Scheme::CyclicDr {
            accumulate_residual_sums(&mut trace, &row);
        }

        let stop_fixed = row.cycle_residual <= config.fix_tol;
        let mut record = (cycle - 1) % config.record_stride == 0;
        if stop_fixed || cycle == config.max_cycles {
            record = true;
        }

        let mut stop_blowup = false;
        if record {
            if window.len() == NORM_WINDOW {
                window.pop_front();
            }
            window.push_back(row.min_norm());
            stop_blowup = !stop_fixed
                && window.len() == NORM_WINDOW
                && row.min_norm() >= config.blowup_norm
                && window_growth(&window).is_some_and(|g| g > 0.0);
        }

        state = row.end.clone();
        trace.total_cycles = cycle;
        if record {
            on_record(&row)?;
            trace.record(row.clone());
        }

        if stop_fixed {
            kind = VerdictKind::FixedPointsExist;
            final_row = Some(row);
            break;
        }
        if stop_blowup {
            kind = VerdictKind::NormBlowup;
            final_row = Some(row);
            break;
        }
        final_row = Some(row);
    }

    let row = final_row.expect("max_cycles >= 1 guarantees at least one cycle");
    let verdict = DichotomyVerdict {
        kind,
        cycles_used: trace.total_cycles,
        witness_norm: row.end.norm(),
        witness: row.end,
        final_residual: row.cycle_residual,
        tail_growth: window_growth(&window),
    };
    Ok((trace, verdict))
}

/// [`run_streaming`] without a sink.
pub fn run(
    problem: &CyclicProblem,
    x0: &Vector,
    config: &RunConfig,
) -> Result<(Trace, DichotomyVerdict), EngineError> {
    run_streaming(problem, x0, config, |_| Ok(()))
}

/// Deterministic re-classification of a completed trace under the given
/// thresholds. Never reports a blow-up while the residual is at or below
/// `fix_tol`.
pub fn classify_dichotomy(
    trace: &Trace,
    config: &RunConfig,
) -> Result<DichotomyVerdict, EngineError> {
    let last = trace.last_row().ok_or(EngineError::EmptyTrace)?;
    let mut window: VecDeque<f64> = trace
        .rows()
        .rev()
        .take(NORM_WINDOW)
        .map(TraceRow::min_norm)
        .collect();
    window.make_contiguous().reverse();
    let tail_growth = window_growth(&window);

    let kind = if last.cycle_residual <= config.fix_tol {
        VerdictKind::FixedPointsExist
    } else if window.len() == NORM_WINDOW
        && last.min_norm() >= config.blowup_norm
        && tail_growth.is_some_and(|g| g > 0.0)
    {
        VerdictKind::NormBlowup
    } else {
        VerdictKind::Inconclusive
    };
    Ok(DichotomyVerdict {
        kind,
        cycles_used: trace.total_cycles,
        witness: last.end.clone(),
        witness_norm: last.end.norm(),
        final_residual: last.cycle_residual,
        tail_growth,
    })
}

fn accumulate_residual_sums(trace: &mut Trace, row: &TraceRow) {
    let n = row.points.len();
    let r: Vec<Vector> = row
        .points
        .iter()
        .zip(&row.projections)
        .map(|(x, p)| x - p)
        .collect();
    let r_end = &row.end - &row.end_projection;
    if row.cycle >= 2 {
        let mut s = 0.0;
        for i in 0..n {
            let next = if i + 1 < n { &r[i + 1] } else { &r_end };
            s += (next - &r[i]).norm_squared();
        }
        if let Some(total) = trace.residual_diff_sum.as_mut() {
            *total += s;
        }
    } else {
        // ⟨x^1_2 − P_1 x^1_2, x^N_1 − P_N x^N_1⟩ bounds the whole sum.
        trace.residual_diff_bound = Some(r_end.dot(&r[n - 1]));
    }
}

fn cyclic_dr_row(
    problem: &CyclicProblem,
    cycle: u64,
    start: &Vector,
) -> Result<TraceRow, EngineError> {
    let n = problem.n_sets();
    let mut points = Vec::with_capacity(n);
    let mut projections = Vec::with_capacity(n);
    let mut reflected = Vec::with_capacity(n);
    let mut cur = start.clone();
    points.push(cur.clone());
    for i in 0..n {
        let parts = dr_step_decomposed(problem.set_cyclic(i), problem.set_cyclic(i + 1), &cur)?;
        projections.push(parts.proj_a);
        reflected.push(parts.proj_b_reflected);
        cur = parts.next;
        if i + 1 < n {
            points.push(cur.clone());
        }
    }
    let end = cur;
    let end_projection = problem.set_cyclic(0).project(&end)?;
    let shadow_residuals = (0..n)
        .map(|i| {
            let next_proj = if i + 1 < n {
                &projections[i + 1]
            } else {
                &end_projection
            };
            reflected[i].distance_to(next_proj)
        })
        .collect();
    let norms = points.iter().map(Vector::norm).collect();
    let cycle_residual = end.distance_to(&points[0]);
    Ok(TraceRow {
        cycle,
        points,
        projections,
        reflected_projections: reflected,
        composed_projections: Vec::new(),
        end,
        end_projection,
        cycle_residual,
        shadow_residuals,
        norms,
    })
}

fn cyclic_projection_row(
    problem: &CyclicProblem,
    cycle: u64,
    start: &Vector,
) -> Result<TraceRow, EngineError> {
    let n = problem.n_sets();
    let mut points = Vec::with_capacity(n);
    let mut projections = Vec::with_capacity(n);
    let mut reflected = Vec::with_capacity(n);
    // `start` lies in C_1: itself its own projection.
    points.push(start.clone());
    projections.push(start.clone());
    let mut cur = start.clone();
    for i in 0..n {
        let next = problem.set_cyclic(i + 1).project(&cur)?;
        reflected.push(next.clone());
        if i + 1 < n {
            points.push(next.clone());
            projections.push(next.clone());
        }
        cur = next;
    }
    let end = cur;
    let end_projection = end.clone();
    let shadow_residuals = (0..n)
        .map(|i| {
            let next_proj = if i + 1 < n {
                &projections[i + 1]
            } else {
                &end_projection
            };
            reflected[i].distance_to(next_proj)
        })
        .collect();
    let norms = points.iter().map(Vector::norm).collect();
    let cycle_residual = end.distance_to(&points[0]);
    Ok(TraceRow {
        cycle,
        points,
        projections,
        reflected_projections: reflected,
        composed_projections: Vec::new(),
        end,
        end_projection,
        cycle_residual,
        shadow_residuals,
        norms,
    })
}

fn classical_dr_row(
    problem: &CyclicProblem,
    cycle: u64,
    start: &Vector,
) -> Result<TraceRow, EngineError> {
    let c1 = problem.set_cyclic(0);
    let c2 = problem.set_cyclic(1);
    let parts = dr_step_decomposed(c1, c2, start)?;
    let composed = c2.project(&parts.proj_a)?;
    let end = parts.next;
    let end_projection = c1.project(&end)?;
    let cycle_residual = end.distance_to(start);
    let shadow_residuals = vec![parts.proj_b_reflected.distance_to(&composed)];
    let norms = vec![start.norm()];
    Ok(TraceRow {
        cycle,
        points: vec![start.clone()],
        projections: vec![parts.proj_a],
        reflected_projections: vec![parts.proj_b_reflected],
        composed_projections: vec![composed],
        end,
        end_projection,
        cycle_residual,
        shadow_residuals,
        norms,
    })
}

/// The three asymptotically equal step-size measurements of an averaged
/// map's orbit, evaluated over the retained trace tail.
#[derive(Clone, Copy, Debug)]
pub struct RateSample {
    pub cycle: u64,
    /// `‖x_{n+1} − x_n‖` at this cycle.
    pub consecutive: f64,
    /// `‖x_n − x_{n−k}‖ / k`.
    pub k_step_mean: f64,
    /// `‖x_n‖ / n`.
    pub norm_over_cycles: f64,
    /// Max pairwise disagreement of the three.
    pub spread: f64,
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub k: usize,
    pub samples: Vec<RateSample>,
    pub max_spread: f64,
}

impl RateReport {
    pub fn final_sample(&self) -> &RateSample {
        self.samples
            .last()
            .expect("report always holds at least one sample")
    }
}

/// Checks the asymptotic step-size identities of an averaged map over the
/// trace tail: consecutive-step norm, `(1/k)`-scaled `k`-step norm, and
/// norm-over-cycle-count all converge to the same limit, so their spread is
/// the testable consequence.
pub fn asymptotic_rate_check(trace: &Trace, k: usize) -> Result<RateReport, EngineError> {
    if k == 0 {
        return Err(EngineError::InvalidConfig("k must be positive".into()));
    }
    let rows: Vec<&TraceRow> = trace.rows().collect();
    if rows.len() < 2 * k {
        return Err(EngineError::TraceTooShort {
            needed: 2 * k,
            have: rows.len(),
        });
    }
    let mut samples = Vec::new();
    let mut max_spread: f64 = 0.0;
    for j in k..rows.len() {
        let row = rows[j];
        let base = rows[j - k];
        if row.cycle < 2 {
            continue;
        }
        let cycles_apart = (row.cycle - base.cycle) as f64;
        let consecutive = row.cycle_residual;
        let k_step_mean = row.points[0].distance_to(&base.points[0]) / cycles_apart;
        let norm_over_cycles = row.points[0].norm() / (row.cycle - 1) as f64;
        let vals = [consecutive, k_step_mean, norm_over_cycles];
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = hi - lo;
        max_spread = max_spread.max(spread);
        samples.push(RateSample {
            cycle: row.cycle,
            consecutive,
            k_step_mean,
            norm_over_cycles,
            spread,
        });
    }
    if samples.is_empty() {
        return Err(EngineError::TraceTooShort {
            needed: 2 * k,
            have: rows.len(),
        });
    }
    Ok(RateReport {
        k,
        samples,
        max_spread,
    })
}
