//! The iteration operators: two-set Douglas-Rachford steps, the cyclic
//! Douglas-Rachford composite, and cyclic-projection composites, as pure
//! step functions over immutable set descriptors.
//!
//! Indexing follows the cyclic convention `C_0 := C_N`, `C_{N+1} := C_1`.
//! One "cycle" starting at index `i` applies exactly `N` two-set steps
//! (or `N` projections) and returns an iterate aligned with the same
//! starting index, together with the `N` intermediate points.

use thiserror::Error;

use crate::geometry::{ConvexSet, GeometryError, Vector};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cyclic problems need at least two sets, got {0}")]
    TooFewSets(usize),
    #[error("start index {given} out of range 1..={n}")]
    BadStartIndex { given: usize, n: usize },
}

/// An ordered list of closed convex sets sharing one ambient dimension.
#[derive(Clone, Debug)]
pub struct CyclicProblem {
    sets: Vec<ConvexSet>,
    dim: usize,
}

impl CyclicProblem {
    pub fn new(sets: Vec<ConvexSet>) -> Result<Self, OperatorError> {
        if sets.len() < 2 {
            return Err(OperatorError::TooFewSets(sets.len()));
        }
        let dim = sets[0].dim();
        for s in &sets {
            if s.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                }
                .into());
            }
        }
        Ok(Self { sets, dim })
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sets(&self) -> &[ConvexSet] {
        &self.sets
    }

    /// Zero-based accessor with cyclic wrapping.
    pub fn set_cyclic(&self, i: usize) -> &ConvexSet {
        &self.sets[i % self.sets.len()]
    }

    fn check_start(&self, start_index: usize) -> Result<(), OperatorError> {
        let n = self.sets.len();
        if start_index == 0 || start_index > n {
            return Err(OperatorError::BadStartIndex {
                given: start_index,
                n,
            });
        }
        Ok(())
    }
}

/// Averagedness constant `1 − 2^{−N}` of the `N`-set cyclic Douglas-Rachford
/// composite. Not directly observable from input-output pairs; recorded as
/// trace metadata, while tests assert its consequences (nonexpansiveness and
/// asymptotic regularity).
pub fn cyclic_dr_averagedness(n_sets: u32) -> f64 {
    1.0 - 0.5f64.powi(n_sets as i32)
}

/// One two-set Douglas-Rachford step `x ↦ (x + R_B R_A x)/2`.
pub fn dr_step(a: &ConvexSet, b: &ConvexSet, x: &Vector) -> Result<Vector, OperatorError> {
    Ok(dr_step_decomposed(a, b, x)?.next)
}

/// The pieces of a Douglas-Rachford step. They satisfy
/// `next = x + proj_b_reflected − proj_a` exactly up to rounding.
#[derive(Clone, Debug)]
pub struct DrStepParts {
    pub next: Vector,
    /// `P_A x`
    pub proj_a: Vector,
    /// `P_B (R_A x)`
    pub proj_b_reflected: Vector,
}

/// [`dr_step`] together with the two projected points the step is built
/// from, used by the engine for residual diagnostics and by the analysis
/// module's difference-vector estimators.
pub fn dr_step_decomposed(
    a: &ConvexSet,
    b: &ConvexSet,
    x: &Vector,
) -> Result<DrStepParts, OperatorError> {
    let proj_a = a.project(x)?;
    // R_A x = 2 P_A x − x
    let reflected = Vector::from_raw(
        proj_a
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .map(|(p, xi)| 2.0 * p - xi)
            .collect(),
    );
    let proj_b_reflected = b.project(&reflected)?;
    // (x + R_B R_A x)/2 with R_B w = 2 P_B w − w.
    let next = Vector::from_raw(
        x.as_slice()
            .iter()
            .zip(proj_b_reflected.as_slice().iter().zip(reflected.as_slice()))
            .map(|(xi, (pb, r))| 0.5 * (xi + 2.0 * pb - r))
            .collect(),
    );
    Ok(DrStepParts {
        next,
        proj_a,
        proj_b_reflected,
    })
}

/// The classical (non-cyclic) Douglas-Rachford iteration applies the same
/// two-set map at every step; this alias names that usage.
pub fn classical_dr_step(
    a: &ConvexSet,
    b: &ConvexSet,
    z: &Vector,
) -> Result<Vector, OperatorError> {
    dr_step(a, b, z)
}

/// Result of one cycle: the `N` intermediate iterates (the last of which is
/// `end`, the input to the next cycle).
#[derive(Clone, Debug)]
pub struct CycleOutput {
    pub end: Vector,
    pub inner: Vec<Vector>,
}

/// One cycle of the cyclic Douglas-Rachford composite starting at the
/// (1-based) index `start_index`: applies the two-set steps for the pairs
/// `(C_i, C_{i+1}), (C_{i+1}, C_{i+2}), ...`, wrapping, `N` times.
pub fn cyclic_dr_cycle(
    problem: &CyclicProblem,
    start_index: usize,
    x: &Vector,
) -> Result<CycleOutput, OperatorError> {
    problem.check_start(start_index)?;
    let n = problem.n_sets();
    let mut inner = Vec::with_capacity(n);
    let mut cur = x.clone();
    for k in 0..n {
        let a = problem.set_cyclic(start_index - 1 + k);
        let b = problem.set_cyclic(start_index + k);
        cur = dr_step(a, b, &cur)?;
        inner.push(cur.clone());
    }
    Ok(CycleOutput { end: cur, inner })
}

/// One cycle of the method of cyclic projections starting at index
/// `start_index`: `y ↦ P_{C_{i+1}} y, P_{C_{i+2}} ..., ` wrapping, `N`
/// times, so `end` is the full composite applied to `y`.
pub fn cyclic_projection_cycle(
    problem: &CyclicProblem,
    start_index: usize,
    y: &Vector,
) -> Result<CycleOutput, OperatorError> {
    problem.check_start(start_index)?;
    let n = problem.n_sets();
    let mut inner = Vec::with_capacity(n);
    let mut cur = y.clone();
    for k in 0..n {
        cur = problem.set_cyclic(start_index + k).project(&cur)?;
        inner.push(cur.clone());
    }
    Ok(CycleOutput { end: cur, inner })
}
