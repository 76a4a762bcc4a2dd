//! Independent brute-force verifiers used by the test suite to certify the
//! geometry and operator properties without trusting the closed-form
//! implementations.
//!
//! [`brute_force_project`] never calls [`ConvexSet::project`]: it works from
//! a direct algebraic membership indicator. Full-dimensional sets go through
//! a membership grid scan followed by boundary bisection along rays from an
//! interior anchor and a pattern-search refinement of the ray direction.
//! Measure-zero sets (hyperplanes, affine subspaces) contain no grid points,
//! so they use cyclic row-projection sweeps with per-row bisection instead;
//! boxes use per-coordinate golden-section minimization.
//!
//! The scans are data-parallel. With the `parallel` feature (default) they
//! run under rayon; [`sequential`] exposes the single-threaded fallback,
//! which is also what the whole module compiles to without the feature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{ConvexSet, GeometryError, SetKind, Vector};
use crate::operators::OperatorError;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("no grid point of the search window lies in the set (window too small?)")]
    EmptyGridIntersection,
    #[error("brute-force search supports dimension <= 3, got {dim}")]
    DimensionTooHigh { dim: usize },
    #[error("invalid sampler: {0}")]
    BadSampler(String),
}

/// Deterministic uniform sampler over an axis-aligned box.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    count: usize,
}

impl Sampler {
    pub fn new(
        seed: u64,
        lower: Vec<f64>,
        upper: Vec<f64>,
        count: usize,
    ) -> Result<Self, OracleError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(OracleError::BadSampler(
                "domain bounds must match and be nonempty".into(),
            ));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(OracleError::BadSampler(format!(
                    "domain bounds must be finite and ordered, got [{l}, {u}]"
                )));
            }
        }
        if count == 0 {
            return Err(OracleError::BadSampler("count must be positive".into()));
        }
        Ok(Self {
            seed,
            lower,
            upper,
            count,
        })
    }

    /// Cube `[-half_width, half_width]^dim` centered at the origin.
    pub fn cube(seed: u64, dim: usize, half_width: f64, count: usize) -> Result<Self, OracleError> {
        Self::new(seed, vec![-half_width; dim], vec![half_width; dim], count)
    }

    /// Seed from the `FEASOR_SEED` environment variable, falling back to
    /// `default` when unset or unparsable.
    pub fn env_seed(default: u64) -> u64 {
        std::env::var("FEASOR_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(default)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_raw(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| l + (u - l) * rng.gen::<f64>())
                .collect(),
        )
    }

    pub fn samples(&self) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count).map(|_| self.draw(&mut rng)).collect()
    }

    pub fn sample_pairs(&self) -> Vec<(Vector, Vector)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let a = self.draw(&mut rng);
                let b = self.draw(&mut rng);
                (a, b)
            })
            .collect()
    }
}

/// Direct algebraic membership test over raw coordinates; deliberately
/// independent of the projection-based [`ConvexSet::contains`].
fn member(set: &ConvexSet, coords: &[f64], tol: f64) -> bool {
    match set.kind() {
        SetKind::Hyperplane { normal, offset } => {
            let res: f64 = normal
                .as_slice()
                .iter()
                .zip(coords)
                .map(|(n, c)| n * c)
                .sum::<f64>()
                - offset;
            res.abs() <= tol * normal.norm()
        }
        SetKind::Halfspace { normal, offset } => {
            let res: f64 = normal
                .as_slice()
                .iter()
                .zip(coords)
                .map(|(n, c)| n * c)
                .sum::<f64>()
                - offset;
            res <= tol * normal.norm()
        }
        SetKind::Ball { center, radius } => {
            let d2: f64 = center
                .as_slice()
                .iter()
                .zip(coords)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2.sqrt() <= radius + tol
        }
        SetKind::Box { lower, upper } => coords
            .iter()
            .zip(lower.iter().zip(upper))
            .all(|(c, (l, u))| *c >= l - tol && *c <= u + tol),
        SetKind::AffineSubspace { rows } => rows.iter().all(|(normal, offset)| {
            let res: f64 = normal
                .as_slice()
                .iter()
                .zip(coords)
                .map(|(n, c)| n * c)
                .sum::<f64>()
                - offset;
            res.abs() <= tol * normal.norm()
        }),
        SetKind::Epigraph {
            f,
            u_index,
            v_index,
        } => {
            let u = coords[*u_index];
            let v = coords[*v_index];
            f.domain_contains(u) && v >= f.eval(u) - tol
        }
    }
}

/// Brute-force nearest point via membership scans; the slow, independent
/// counterpart of [`ConvexSet::project`]. `grid_density` is points per axis
/// for the window scan (default 401), `refine_steps` the bisection /
/// golden-section iteration count (default 60).
pub fn brute_force_project(
    set: &ConvexSet,
    x: &Vector,
    grid_density: usize,
    refine_steps: usize,
) -> Result<Vector, OracleError> {
    bf_project(
        set,
        x,
        grid_density,
        refine_steps,
        cfg!(feature = "parallel"),
    )
}

fn bf_project(
    set: &ConvexSet,
    x: &Vector,
    grid_density: usize,
    refine_steps: usize,
    parallel: bool,
) -> Result<Vector, OracleError> {
    if x.dim() != set.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: set.dim(),
            got: x.dim(),
        }
        .into());
    }
    if member(set, x.as_slice(), 0.0) {
        return Ok(x.clone());
    }
    match set.kind() {
        SetKind::Box { lower, upper } => Ok(box_coordinate_search(lower, upper, x, refine_steps)),
        SetKind::Hyperplane { normal, offset } => {
            Ok(row_sweep(&[(normal.clone(), *offset)], x, refine_steps))
        }
        SetKind::AffineSubspace { rows } => Ok(row_sweep(rows, x, refine_steps)),
        _ => bf_project_full_dimensional(set, x, grid_density, refine_steps, parallel),
    }
}

/// Accumulator for the grid scan: nearest feasible point (index-tiebroken
/// for determinism), feasible count, and fixed-point coordinate sums for the
/// interior anchor. Integer sums keep the reduction associative, so the
/// parallel and sequential paths agree bit for bit.
#[derive(Clone, Copy)]
struct ScanAcc {
    best_d2: f64,
    best_idx: usize,
    count: u64,
    sums: [i128; 3],
}

const ANCHOR_FIXED_SCALE: f64 = (1u64 << 40) as f64;

impl ScanAcc {
    fn empty() -> Self {
        Self {
            best_d2: f64::INFINITY,
            best_idx: usize::MAX,
            count: 0,
            sums: [0; 3],
        }
    }

    fn add(mut self, idx: usize, d2: f64, coords: &[f64]) -> Self {
        if d2 < self.best_d2 || (d2 == self.best_d2 && idx < self.best_idx) {
            self.best_d2 = d2;
            self.best_idx = idx;
        }
        self.count += 1;
        for (s, c) in self.sums.iter_mut().zip(coords) {
            *s += (c * ANCHOR_FIXED_SCALE).round() as i128;
        }
        self
    }

    #[cfg(feature = "parallel")]
    fn merge(mut self, other: Self) -> Self {
        if other.best_d2 < self.best_d2
            || (other.best_d2 == self.best_d2 && other.best_idx < self.best_idx)
        {
            self.best_d2 = other.best_d2;
            self.best_idx = other.best_idx;
        }
        self.count += other.count;
        for (s, o) in self.sums.iter_mut().zip(other.sums) {
            *s += o;
        }
        self
    }
}

fn bf_project_full_dimensional(
    set: &ConvexSet,
    x: &Vector,
    grid_density: usize,
    refine_steps: usize,
    parallel: bool,
) -> Result<Vector, OracleError> {
    let dim = set.dim();
    if dim > 3 {
        return Err(OracleError::DimensionTooHigh { dim });
    }
    let density = grid_density.max(3);
    let radius = 2.0 * (1.0 + x.norm());
    let decode = |idx: usize| -> [f64; 3] {
        let mut coords = [0.0f64; 3];
        let mut rest = idx;
        for (k, c) in coords.iter_mut().enumerate().take(dim) {
            let i = rest % density;
            rest /= density;
            *c = x[k] - radius + 2.0 * radius * (i as f64) / ((density - 1) as f64);
        }
        coords
    };
    let total = density.pow(dim as u32);
    let eval = |idx: usize, acc: ScanAcc| -> ScanAcc {
        let coords = decode(idx);
        if member(set, &coords[..dim], 0.0) {
            let d2: f64 = coords[..dim]
                .iter()
                .zip(x.as_slice())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            acc.add(idx, d2, &coords[..dim])
        } else {
            acc
        }
    };

    #[cfg(feature = "parallel")]
    let scan = if parallel {
        (0..total)
            .into_par_iter()
            .fold(ScanAcc::empty, |acc, idx| eval(idx, acc))
            .reduce(ScanAcc::empty, ScanAcc::merge)
    } else {
        (0..total).fold(ScanAcc::empty(), |acc, idx| eval(idx, acc))
    };
    #[cfg(not(feature = "parallel"))]
    let scan = {
        let _ = parallel;
        (0..total).fold(ScanAcc::empty(), |acc, idx| eval(idx, acc))
    };

    if scan.count == 0 {
        return Err(OracleError::EmptyGridIntersection);
    }
    let grid_best = Vector::from_raw(decode(scan.best_idx)[..dim].to_vec());

    // Interior anchor: the feasible-point centroid (feasible by convexity).
    let mut anchor = Vector::from_raw(
        scan.sums[..dim]
            .iter()
            .map(|s| (*s as f64) / ANCHOR_FIXED_SCALE / (scan.count as f64))
            .collect(),
    );
    if !member(set, anchor.as_slice(), 1e-9 * (1.0 + anchor.norm())) {
        anchor = grid_best.clone();
    }

    let t_cap = 8.0 * radius;
    let steps = refine_steps.max(60);
    let objective = |dir: &Vector| -> (f64, Vector) {
        let b = ray_boundary(set, &anchor, dir, t_cap, steps);
        (b.distance_to(x), b)
    };

    // Coarse direction sweep, then pattern-search refinement of the angle.
    let coarse = coarse_directions(dim, if dim == 2 { 512 } else { 1024 });
    let best_of = |a: (f64, Vector, usize), b: (f64, Vector, usize)| {
        if b.0 < a.0 || (b.0 == a.0 && b.2 < a.2) {
            b
        } else {
            a
        }
    };
    let seed = (f64::INFINITY, grid_best.clone(), usize::MAX);
    #[cfg(feature = "parallel")]
    let coarse_best = if parallel {
        coarse
            .par_iter()
            .enumerate()
            .map(|(i, dir)| {
                let (obj, b) = objective(dir);
                (obj, b, i)
            })
            .reduce(|| seed.clone(), best_of)
    } else {
        coarse
            .iter()
            .enumerate()
            .map(|(i, dir)| {
                let (obj, b) = objective(dir);
                (obj, b, i)
            })
            .fold(seed.clone(), best_of)
    };
    #[cfg(not(feature = "parallel"))]
    let coarse_best = coarse
        .iter()
        .enumerate()
        .map(|(i, dir)| {
            let (obj, b) = objective(dir);
            (obj, b, i)
        })
        .fold(seed.clone(), best_of);

    let mut best_dir = coarse[coarse_best.2.min(coarse.len() - 1)].clone();
    let mut best = (coarse_best.0, coarse_best.1);
    let mut step = if dim == 2 {
        2.0 * std::f64::consts::PI / 512.0
    } else {
        0.1
    };
    let mut iters = 0;
    while step > 1e-13 && iters < 2000 {
        iters += 1;
        let mut improved = false;
        for t in tangent_frame(&best_dir) {
            for sign in [1.0, -1.0] {
                let cand = normalize(&best_dir.add_scaled(sign * step, &t));
                let (obj, b) = objective(&cand);
                if obj < best.0 {
                    best = (obj, b);
                    best_dir = cand;
                    improved = true;
                    break;
                }
            }
            if improved {
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    // The refined boundary point should beat the raw grid point; keep the
    // grid point as a safety net.
    if grid_best.distance_to(x) < best.0 {
        Ok(grid_best)
    } else {
        Ok(best.1)
    }
}

/// Single boundary crossing of the ray `anchor + t·dir`, `t ∈ [0, t_cap]`,
/// located by membership bisection. Rays that stay feasible to the cap
/// return the capped point (they lose the objective comparison anyway).
fn ray_boundary(
    set: &ConvexSet,
    anchor: &Vector,
    dir: &Vector,
    t_cap: f64,
    steps: usize,
) -> Vector {
    let probe = anchor.add_scaled(t_cap, dir);
    if member(set, probe.as_slice(), 0.0) {
        return probe;
    }
    let (mut lo, mut hi) = (0.0f64, t_cap);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        let p = anchor.add_scaled(mid, dir);
        if member(set, p.as_slice(), 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    anchor.add_scaled(lo, dir)
}

fn coarse_directions(dim: usize, count: usize) -> Vec<Vector> {
    if dim == 2 {
        (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * (k as f64) / (count as f64);
                Vector::from_raw(vec![a.cos(), a.sin()])
            })
            .collect()
    } else {
        // Fibonacci sphere.
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        (0..count)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / (count as f64);
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * k as f64;
                Vector::from_raw(vec![r * phi.cos(), r * phi.sin(), z])
            })
            .collect()
    }
}

fn normalize(v: &Vector) -> Vector {
    let n = v.norm();
    if n == 0.0 {
        v.clone()
    } else {
        v.scaled(1.0 / n)
    }
}

/// Orthonormal basis of the tangent space at a unit direction.
fn tangent_frame(dir: &Vector) -> Vec<Vector> {
    match dir.dim() {
        2 => vec![Vector::from_raw(vec![-dir[1], dir[0]])],
        3 => {
            let axis = if dir[0].abs() <= dir[1].abs() && dir[0].abs() <= dir[2].abs() {
                Vector::from_raw(vec![1.0, 0.0, 0.0])
            } else if dir[1].abs() <= dir[2].abs() {
                Vector::from_raw(vec![0.0, 1.0, 0.0])
            } else {
                Vector::from_raw(vec![0.0, 0.0, 1.0])
            };
            let t1 = normalize(&axis.add_scaled(-axis.dot(dir), dir));
            let t2 = Vector::from_raw(vec![
                dir[1] * t1[2] - dir[2] * t1[1],
                dir[2] * t1[0] - dir[0] * t1[2],
                dir[0] * t1[1] - dir[1] * t1[0],
            ]);
            vec![t1, t2]
        }
        _ => unreachable!("grid path enforces dim <= 3"),
    }
}

/// Coordinate-wise golden-section minimization for boxes; independent of
/// the clamp formula and exact for degenerate (thin) boxes.
fn box_coordinate_search(lower: &[f64], upper: &[f64], x: &Vector, refine_steps: usize) -> Vector {
    let coords = x
        .as_slice()
        .iter()
        .zip(lower.iter().zip(upper))
        .map(|(xi, (l, u))| {
            let cap = 1e12 * (1.0 + xi.abs());
            let a = l.max(xi - cap);
            let b = u.min(xi + cap);
            golden_min(a, b.max(a), |t| (t - xi) * (t - xi), refine_steps.max(120))
        })
        .collect();
    Vector::from_raw(coords)
}

fn golden_min(mut a: f64, mut b: f64, obj: impl Fn(f64) -> f64, iters: usize) -> f64 {
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..iters {
        if obj(c) < obj(d) {
            b = d;
            d = c;
            c = b - phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + phi * (b - a);
        }
    }
    0.5 * (a + b)
}

/// Cyclic row-projection sweeps for measure-zero sets: project onto each
/// hyperplane row in turn (each row step by bisection on the line residual)
/// until all residuals vanish. For affine families this converges to the
/// nearest point of the intersection.
fn row_sweep(rows: &[(Vector, f64)], x: &Vector, refine_steps: usize) -> Vector {
    let mut p = x.clone();
    let steps = refine_steps.max(80);
    for _ in 0..200_000 {
        for (normal, offset) in rows {
            p = row_project_bisect(&p, normal, *offset, steps);
        }
        let worst: f64 = rows
            .iter()
            .map(|(normal, offset)| (normal.dot(&p) - offset).abs() / normal.norm())
            .fold(0.0, f64::max);
        if worst <= 1e-13 * (1.0 + p.norm()) {
            break;
        }
    }
    p
}

fn row_project_bisect(p: &Vector, normal: &Vector, offset: f64, steps: usize) -> Vector {
    let h = |t: f64| normal.dot(p) + t * normal.norm_squared() - offset;
    let res = h(0.0);
    if res == 0.0 {
        return p.clone();
    }
    // h is linear in t with positive slope; bracket the root by doubling.
    let mut far = if res > 0.0 { -1.0 } else { 1.0 };
    let scale = 1.0 + res.abs() / normal.norm_squared();
    far *= scale;
    for _ in 0..200 {
        if h(far).signum() != res.signum() {
            break;
        }
        far *= 2.0;
    }
    let (mut lo, mut hi) = if far < 0.0 { (far, 0.0) } else { (0.0, far) };
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if h(mid).signum() == h(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    p.add_scaled(0.5 * (lo + hi), normal)
}

fn check_pairs<F>(pairs: &[(Vector, Vector)], eval: F, parallel: bool) -> Result<f64, OracleError>
where
    F: Fn(&(Vector, Vector)) -> Result<f64, OracleError> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return pairs
            .par_iter()
            .map(&eval)
            .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)));
    }
    let _ = parallel;
    pairs
        .iter()
        .try_fold(f64::NEG_INFINITY, |acc, p| Ok(acc.max(eval(p)?)))
}

/// Worst violation of `‖Tx − Ty‖ ≤ ‖x − y‖` over sampled pairs.
pub fn check_nonexpansive<F>(map: F, sampler: &Sampler) -> Result<f64, OracleError>
where
    F: Fn(&Vector) -> Result<Vector, OracleError> + Sync + Send,
{
    nonexpansive_impl(map, sampler, cfg!(feature = "parallel"))
}

fn nonexpansive_impl<F>(map: F, sampler: &Sampler, parallel: bool) -> Result<f64, OracleError>
where
    F: Fn(&Vector) -> Result<Vector, OracleError> + Sync + Send,
{
    let pairs = sampler.sample_pairs();
    check_pairs(
        &pairs,
        |(x, y)| {
            let (tx, ty) = (map(x)?, map(y)?);
            Ok(tx.distance_to(&ty) - x.distance_to(y))
        },
        parallel,
    )
}

/// Worst violation of
/// `‖Tx − Ty‖² + ‖(I−T)x − (I−T)y‖² ≤ ‖x − y‖²` over sampled pairs.
pub fn check_firmly_nonexpansive<F>(map: F, sampler: &Sampler) -> Result<f64, OracleError>
where
    F: Fn(&Vector) -> Result<Vector, OracleError> + Sync + Send,
{
    firmly_nonexpansive_impl(map, sampler, cfg!(feature = "parallel"))
}

fn firmly_nonexpansive_impl<F>(
    map: F,
    sampler: &Sampler,
    parallel: bool,
) -> Result<f64, OracleError>
where
    F: Fn(&Vector) -> Result<Vector, OracleError> + Sync + Send,
{
    let pairs = sampler.sample_pairs();
    check_pairs(
        &pairs,
        |(x, y)| {
            let (tx, ty) = (map(x)?, map(y)?);
            let residual_gap = (&(x - &tx) - &(y - &ty)).norm_squared();
            Ok(tx.distance_to(&ty).powi(2) + residual_gap - x.distance_to(y).powi(2))
        },
        parallel,
    )
}

/// Worst violation of the projection's variational characterization
/// `⟨x − Px, c − Px⟩ ≤ 0`, with `c` generated by projecting box samples
/// into the set.
pub fn check_projection_characterization(
    set: &ConvexSet,
    sampler: &Sampler,
) -> Result<f64, OracleError> {
    projection_characterization_impl(set, sampler, cfg!(feature = "parallel"))
}

fn projection_characterization_impl(
    set: &ConvexSet,
    sampler: &Sampler,
    parallel: bool,
) -> Result<f64, OracleError> {
    let pairs = sampler.sample_pairs();
    check_pairs(
        &pairs,
        |(x, raw_c)| {
            let px = set.project(x)?;
            let c = set.project(raw_c)?;
            Ok((x - &px).dot(&(&c - &px)))
        },
        parallel,
    )
}

/// Worst violation of the reflection characterization: the midpoint
/// `(x + Rx)/2` lies in the set and `⟨x − Rx, c − Rx⟩ ≤ ½‖x − Rx‖²`.
pub fn check_reflection_characterization(
    set: &ConvexSet,
    sampler: &Sampler,
) -> Result<f64, OracleError> {
    reflection_characterization_impl(set, sampler, cfg!(feature = "parallel"))
}

fn reflection_characterization_impl(
    set: &ConvexSet,
    sampler: &Sampler,
    parallel: bool,
) -> Result<f64, OracleError> {
    let pairs = sampler.sample_pairs();
    check_pairs(
        &pairs,
        |(x, raw_c)| {
            let r = set.reflect(x)?;
            let c = set.project(raw_c)?;
            let midpoint = Vector::from_raw(
                x.as_slice()
                    .iter()
                    .zip(r.as_slice())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect(),
            );
            let membership = set.distance(&midpoint)?;
            let xr = x - &r;
            let inequality = xr.dot(&(&c - &r)) - 0.5 * xr.norm_squared();
            Ok(membership.max(inequality))
        },
        parallel,
    )
}

/// Always-sequential versions of the oracle entry points; the benchmark
/// suite compares these against the parallel defaults.
pub mod sequential {
    use super::*;

    pub fn brute_force_project(
        set: &ConvexSet,
        x: &Vector,
        grid_density: usize,
        refine_steps: usize,
    ) -> Result<Vector, OracleError> {
        super::bf_project(set, x, grid_density, refine_steps, false)
    }

    pub fn check_nonexpansive<F>(map: F, sampler: &Sampler) -> Result<f64, OracleError>
    where
        F: Fn(&Vector) -> Result<Vector, OracleError> + Sync + Send,
    {
        super::nonexpansive_impl(map, sampler, false)
    }

    pub fn check_firmly_nonexpansive<F>(map: F, sampler: &Sampler) -> Result<f64, OracleError>
    where
        F: Fn(&Vector) -> Result<Vector, OracleError> + Sync + Send,
    {
        super::firmly_nonexpansive_impl(map, sampler, false)
    }

    pub fn check_projection_characterization(
        set: &ConvexSet,
        sampler: &Sampler,
    ) -> Result<f64, OracleError> {
        super::projection_characterization_impl(set, sampler, false)
    }

    pub fn check_reflection_characterization(
        set: &ConvexSet,
        sampler: &Sampler,
    ) -> Result<f64, OracleError> {
        super::reflection_characterization_impl(set, sampler, false)
    }
}
