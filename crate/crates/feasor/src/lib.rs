//! Projection methods for convex feasibility problems in `R^d`.
//!
//! This crate implements three fixed-point schemes for the problem of
//! finding a point in the intersection of finitely many closed convex sets
//! `C_1, ..., C_N`:
//!
//! * the **method of cyclic projections** (sequential nearest-point maps),
//! * the **classical Douglas-Rachford method** `z ↦ (z + R_B R_A z)/2`
//!   for two-set problems,
//! * the **cyclic Douglas-Rachford method**, the composition of the two-set
//!   Douglas-Rachford operators around the cycle of sets.
//!
//! The interesting behaviour is in the *inconsistent* case (empty
//! intersection): each scheme either has fixed points and its iterates
//! converge, or it has none and the iterate norms diverge. The [`engine`]
//! drives a scheme, records a [`engine::Trace`], and classifies the run as
//! one of the two alternatives. The [`analysis`] module turns converged
//! traces into the limit objects that make inconsistent problems useful:
//! per-pair difference vectors, the displacement vector between two sets,
//! and best approximation pairs.
//!
//! [`geometry`] supplies exact nearest-point projectors for hyperplanes,
//! half-spaces, balls, boxes, affine subspaces, and epigraphs of scalar
//! convex functions. [`oracle`] contains derivative-free brute-force
//! verifiers used by the test suite to certify the projectors and the
//! operator properties without trusting the closed-form implementations.
//!
//! The `feasor` binary (see [`cli`]) runs problems described by JSON files,
//! streams per-cycle traces to CSV, and renders 2-D trajectory plots.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod geometry;
pub mod operators;
pub mod oracle;
