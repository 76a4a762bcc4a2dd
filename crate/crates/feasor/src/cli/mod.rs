//! Command-line front end: parse a JSON problem file, run a scheme while
//! streaming the trace to CSV, emit a JSON summary, compare the three
//! schemes, and render 2-D trajectory plots.
//!
//! Exit codes: `0` fixed points exist, `2` norm blow-up, `3` inconclusive,
//! `1` any error.

pub mod plot;
pub mod problem_file;
pub mod trace_csv;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    classical_dr_shadow_report, compare_methods, estimate_difference_vectors, two_set_report,
    AnalysisError,
};
use crate::engine::{
    run_streaming, DichotomyVerdict, EngineError, RunConfig, Scheme, Trace, VerdictKind,
};
use crate::geometry::Vector;
use crate::operators::CyclicProblem;
use crate::oracle::{
    check_firmly_nonexpansive, check_projection_characterization,
    check_reflection_characterization, OracleError, Sampler,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid problem file: {0}")]
    Schema(String),
    #[error("invalid trace file: {0}")]
    Trace(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("trace holds no points")]
    EmptyTrace,
    #[error("plots need a 2-D trace, got dimension {dim}")]
    UnsupportedDimension { dim: usize },
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

impl CliError {
    fn from_json(e: serde_json::Error) -> Self {
        CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Flag-level overrides applied on top of the file's config block.
#[derive(Clone, Debug, Default)]
pub struct RunOverrides {
    pub max_cycles: Option<u64>,
    pub fix_tol: Option<f64>,
    pub blowup_norm: Option<f64>,
    pub stride: Option<u64>,
    pub scheme: Option<Scheme>,
    pub self_test: bool,
}

impl RunOverrides {
    fn apply(&self, config: &mut RunConfig) {
        if let Some(v) = self.max_cycles {
            config.max_cycles = v;
        }
        if let Some(v) = self.fix_tol {
            config.fix_tol = v;
        }
        if let Some(v) = self.blowup_norm {
            config.blowup_norm = v;
        }
        if let Some(v) = self.stride {
            config.record_stride = v;
        }
        if let Some(v) = self.scheme {
            config.scheme = v;
        }
    }
}

pub fn exit_code(kind: VerdictKind) -> i32 {
    match kind {
        VerdictKind::FixedPointsExist => 0,
        VerdictKind::NormBlowup => 2,
        VerdictKind::Inconclusive => 3,
    }
}

fn load_problem(
    problem_path: &Path,
    overrides: &RunOverrides,
) -> Result<(CyclicProblem, Vector, RunConfig), CliError> {
    let text = fs::read_to_string(problem_path)?;
    let file = problem_file::parse(&text)?;
    let (problem, x0, mut config) = file.to_problem()?;
    overrides.apply(&mut config);
    Ok((problem, x0, config))
}

/// Per-run record written to `summary.json`. Every field is present;
/// estimates that do not apply (or diverged) are `null` with `diverged`
/// set.
#[derive(Debug, Serialize)]
pub struct SummaryRecord {
    pub verdict: String,
    pub scheme: String,
    pub cycles: u64,
    pub final_residual: f64,
    pub final_shadow_residuals: Vec<f64>,
    pub witness_norm: f64,
    pub tail_growth: Option<f64>,
    pub diverged: bool,
    pub difference_vectors: Option<Vec<Vec<f64>>>,
    pub estimator_spread: Option<f64>,
    pub two_set: Option<TwoSetSummary>,
    pub classical_v_estimate: Option<Vec<f64>>,
    pub wall_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct TwoSetSummary {
    pub attained: bool,
    pub e_point: Option<Vec<f64>>,
    pub f_point: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    pub gap: Option<f64>,
    pub identity_residual: Option<f64>,
}

fn build_summary(
    problem: &CyclicProblem,
    config: &RunConfig,
    trace: &Trace,
    verdict: &DichotomyVerdict,
    wall_ms: f64,
) -> Result<SummaryRecord, CliError> {
    let last = trace.last_row().ok_or(CliError::EmptyTrace)?;
    let converged = verdict.kind == VerdictKind::FixedPointsExist;
    let cyclic = config.scheme != Scheme::ClassicalDr;

    let (difference_vectors, estimator_spread) = if cyclic && converged {
        let dv = estimate_difference_vectors(trace, verdict)?;
        (
            Some(dv.d.iter().map(Vector::to_vec).collect::<Vec<_>>()),
            Some(dv.estimator_spread),
        )
    } else {
        (None, None)
    };

    let two_set = if cyclic && problem.n_sets() == 2 {
        let report = two_set_report(trace, verdict, problem)?;
        Some(TwoSetSummary {
            attained: report.attained,
            e_point: report.e_point.as_ref().map(Vector::to_vec),
            f_point: report.f_point.as_ref().map(Vector::to_vec),
            v: report.v.as_ref().map(Vector::to_vec),
            gap: report.gap,
            identity_residual: report.identity_residual,
        })
    } else {
        None
    };

    let classical_v_estimate = if config.scheme == Scheme::ClassicalDr {
        Some(classical_dr_shadow_report(trace)?.v_estimate.to_vec())
    } else {
        None
    };

    Ok(SummaryRecord {
        verdict: verdict.kind.name().to_string(),
        scheme: config.scheme.name().to_string(),
        cycles: verdict.cycles_used,
        final_residual: verdict.final_residual,
        final_shadow_residuals: last.shadow_residuals.clone(),
        witness_norm: verdict.witness_norm,
        tail_growth: verdict.tail_growth,
        diverged: !converged,
        difference_vectors,
        estimator_spread,
        two_set,
        classical_v_estimate,
        wall_ms,
    })
}

/// `feasor run`: run one scheme, streaming `trace.csv` and writing
/// `summary.json` into `out_dir`.
pub fn cmd_run(
    problem_path: &Path,
    out_dir: &Path,
    overrides: &RunOverrides,
) -> Result<i32, CliError> {
    let (problem, x0, config) = load_problem(problem_path, overrides)?;
    if overrides.self_test {
        run_self_test(&problem, &x0)?;
    }
    fs::create_dir_all(out_dir)?;

    let trace_path = out_dir.join("trace.csv");
    let file = fs::File::create(&trace_path)?;
    let mut writer = trace_csv::TraceCsvWriter::new(BufWriter::new(file), problem.dim())?;

    let started = Instant::now();
    let (trace, verdict) = run_streaming(&problem, &x0, &config, |row| writer.write_row(row))?;
    writer.flush()?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let summary = build_summary(&problem, &config, &trace, &verdict, wall_ms)?;
    let summary_path = out_dir.join("summary.json");
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summary).expect("serializable"),
    )?;

    println!(
        "{}: verdict={} cycles={} residual={:.3e} norm={:.3e} ({:.1} ms)",
        config.scheme.name(),
        verdict.kind.name(),
        verdict.cycles_used,
        verdict.final_residual,
        verdict.witness_norm,
        wall_ms
    );
    Ok(exit_code(verdict.kind))
}

/// `feasor compare`: run every applicable scheme and write `compare.csv`.
pub fn cmd_compare(
    problem_path: &Path,
    out_dir: &Path,
    overrides: &RunOverrides,
) -> Result<i32, CliError> {
    let (problem, x0, config) = load_problem(problem_path, overrides)?;
    fs::create_dir_all(out_dir)?;
    let comparison = compare_methods(&problem, &x0, &config)?;

    let path = out_dir.join("compare.csv");
    let mut out = BufWriter::new(fs::File::create(&path)?);
    writeln!(
        out,
        "scheme,verdict,cycles,final_residual,gap_estimate,wall_ms"
    )?;
    for row in &comparison.rows {
        let gap = row
            .gap_estimate
            .map(trace_csv::format_float)
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{:.3}",
            row.scheme.name(),
            row.verdict.name(),
            row.cycles,
            trace_csv::format_float(row.final_residual),
            gap,
            row.wall.as_secs_f64() * 1e3
        )?;
        println!(
            "{}: verdict={} cycles={} residual={:.3e} gap={}",
            row.scheme.name(),
            row.verdict.name(),
            row.cycles,
            row.final_residual,
            row.gap_estimate
                .map(|g| format!("{g:.6}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    out.flush()?;
    Ok(0)
}

/// `feasor plot`: render a stored trace to SVG. Boundaries are drawn when
/// the problem file is supplied; otherwise only iterates are plotted.
pub fn cmd_plot(
    trace_path: &Path,
    problem_path: Option<&Path>,
    out_svg: &Path,
) -> Result<i32, CliError> {
    let (_dim, points) = trace_csv::read_trace_points(trace_path)?;
    let problem = match problem_path {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let file = problem_file::parse(&text)?;
            let (problem, _, _) = file.to_problem()?;
            Some(problem)
        }
        None => {
            eprintln!("warning: no problem file given; plotting iterates only");
            None
        }
    };
    let svg = plot::render_svg(&points, problem.as_ref())?;
    fs::write(out_svg, svg)?;
    Ok(0)
}

/// Oracle spot checks of every descriptor in the problem, plus firm
/// nonexpansiveness of each consecutive Douglas-Rachford pair. Seeded via
/// `FEASOR_SEED` (default 40).
fn run_self_test(problem: &CyclicProblem, x0: &Vector) -> Result<(), CliError> {
    const TOL: f64 = 1e-7;
    let seed = Sampler::env_seed(40);
    let sampler = Sampler::cube(seed, problem.dim(), 3.0 + x0.norm(), 200)?;
    for (i, set) in problem.sets().iter().enumerate() {
        let proj = check_projection_characterization(set, &sampler)?;
        let refl = check_reflection_characterization(set, &sampler)?;
        let firm = check_firmly_nonexpansive(|x| Ok(set.project(x)?), &sampler)?;
        println!(
            "self-test set {} (seed {seed}): projection {proj:.2e}, reflection {refl:.2e}, firmly-nonexpansive {firm:.2e}",
            i + 1
        );
        if proj > TOL || refl > TOL || firm > TOL {
            return Err(CliError::SelfTest(format!(
                "set {} violates a projection property beyond {TOL:.0e}",
                i + 1
            )));
        }
    }
    let n = problem.n_sets();
    for i in 0..n {
        let a = problem.set_cyclic(i);
        let b = problem.set_cyclic(i + 1);
        let j = (i + 1) % n + 1;
        let firm =
            check_firmly_nonexpansive(|x| Ok(crate::operators::dr_step(a, b, x)?), &sampler)?;
        println!(
            "self-test dr pair ({}, {j}): firmly-nonexpansive {firm:.2e}",
            i + 1
        );
        if firm > TOL {
            return Err(CliError::SelfTest(format!(
                "dr step for pair ({}, next) violates firm nonexpansiveness",
                i + 1
            )));
        }
    }
    Ok(())
}
