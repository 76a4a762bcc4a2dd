//! Convex set descriptors with exact nearest-point projection, reflection,
//! distance, and membership.
//!
//! Every descriptor is immutable after construction and all operations are
//! pure, so sets can be shared freely across threads. Projections satisfy
//! the variational characterization `⟨x − Px, c − Px⟩ ≤ 0` for all `c` in
//! the set, are idempotent, and are firmly nonexpansive; the test suite and
//! the [`crate::oracle`] module check all three on sampled points.

mod scalar_fn;
mod vector;

pub use scalar_fn::ScalarConvexFn;
pub use vector::Vector;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("coordinates must be finite")]
    NonFiniteCoordinate,
    #[error("normal vector must be nonzero")]
    ZeroNormal,
    #[error("ball radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("box bounds out of order or empty at coordinate {index}")]
    BadBoxBounds { index: usize },
    #[error("affine subspace needs at least one row")]
    EmptyRowSystem,
    #[error("affine row system is inconsistent (least-squares residual {residual:.3e})")]
    InconsistentSystem { residual: f64 },
    #[error("parabola leading coefficient must be nonnegative, got {0}")]
    NegativeCurvature(f64),
    #[error("hyperbola coefficient c1 must be positive, got {0}")]
    NonPositiveHyperbolaCoefficient(f64),
    #[error("epigraph embedding indices must be distinct and below dimension {dim}")]
    BadEmbedding { dim: usize },
    #[error("epigraph projector failed to bracket the stationarity root (malformed descriptor)")]
    BracketFailure,
    #[error("membership tolerance must be nonnegative, got {0}")]
    NegativeTolerance(f64),
}

/// Default relative membership tolerance, `1e-9 · (1 + ‖x‖)`.
pub fn default_membership_tol(x: &Vector) -> f64 {
    1e-9 * (1.0 + x.norm())
}

/// The shape of a [`ConvexSet`], exposed read-only for plotting and the
/// oracle's independent membership tests.
#[derive(Clone, Debug)]
pub enum SetKind {
    /// `{x : ⟨normal, x⟩ = offset}`
    Hyperplane { normal: Vector, offset: f64 },
    /// `{x : ⟨normal, x⟩ ≤ offset}`
    Halfspace { normal: Vector, offset: f64 },
    /// `{x : ‖x − center‖ ≤ radius}`
    Ball { center: Vector, radius: f64 },
    /// `{x : lower ≤ x ≤ upper}` componentwise; entries may be ±∞.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Intersection of the hyperplanes `⟨normal_k, x⟩ = offset_k`.
    AffineSubspace { rows: Vec<(Vector, f64)> },
    /// `{x : x[v_index] ≥ f(x[u_index]), x[u_index] ∈ dom f}`.
    Epigraph {
        f: ScalarConvexFn,
        u_index: usize,
        v_index: usize,
    },
}

/// A closed convex subset of `R^d` with a closed-form (or one-dimensional
/// root-finding) nearest-point projector.
#[derive(Clone, Debug)]
pub struct ConvexSet {
    kind: SetKind,
    dim: usize,
    affine: Option<AffineSolver>,
}

impl ConvexSet {
    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self, GeometryError> {
        check_normal(&normal, offset)?;
        let dim = normal.dim();
        Ok(Self {
            kind: SetKind::Hyperplane { normal, offset },
            dim,
            affine: None,
        })
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self, GeometryError> {
        check_normal(&normal, offset)?;
        let dim = normal.dim();
        Ok(Self {
            kind: SetKind::Halfspace { normal, offset },
            dim,
            affine: None,
        })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::BadRadius(radius));
        }
        let dim = center.dim();
        Ok(Self {
            kind: SetKind::Ball { center, radius },
            dim,
            affine: None,
        })
    }

    /// Axis-aligned box; `±f64::INFINITY` entries mark unbounded sides, so a
    /// box doubles as a product of half-spaces.
    pub fn box_set(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(GeometryError::BadBoxBounds { index: 0 });
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            let ordered = l <= u && *l < f64::INFINITY && *u > f64::NEG_INFINITY;
            if l.is_nan() || u.is_nan() || !ordered {
                return Err(GeometryError::BadBoxBounds { index: i });
            }
        }
        let dim = lower.len();
        Ok(Self {
            kind: SetKind::Box { lower, upper },
            dim,
            affine: None,
        })
    }

    /// Intersection of hyperplanes. Rows may be redundant but must be
    /// consistent; inconsistency is a construction-time error.
    pub fn affine_subspace(rows: Vec<(Vector, f64)>) -> Result<Self, GeometryError> {
        let first = rows.first().ok_or(GeometryError::EmptyRowSystem)?;
        let dim = first.0.dim();
        for (normal, offset) in &rows {
            check_normal(normal, *offset)?;
            if normal.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: normal.dim(),
                });
            }
        }
        let solver = AffineSolver::new(&rows)?;
        Ok(Self {
            kind: SetKind::AffineSubspace { rows },
            dim,
            affine: Some(solver),
        })
    }

    /// Epigraph of `f` in the `(u_index, v_index)` coordinate plane of `R^dim`;
    /// the remaining coordinates are unconstrained.
    pub fn epigraph(
        f: ScalarConvexFn,
        u_index: usize,
        v_index: usize,
        dim: usize,
    ) -> Result<Self, GeometryError> {
        if u_index == v_index || u_index >= dim || v_index >= dim {
            return Err(GeometryError::BadEmbedding { dim });
        }
        Ok(Self {
            kind: SetKind::Epigraph {
                f,
                u_index,
                v_index,
            },
            dim,
            affine: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    fn check_dim(&self, x: &Vector) -> Result<(), GeometryError> {
        if x.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &Vector) -> Result<Vector, GeometryError> {
        self.check_dim(x)?;
        match &self.kind {
            SetKind::Hyperplane { normal, offset } => {
                let t = (normal.dot(x) - offset) / normal.norm_squared();
                Ok(x.add_scaled(-t, normal))
            }
            SetKind::Halfspace { normal, offset } => {
                let violation = normal.dot(x) - offset;
                if violation <= 0.0 {
                    Ok(x.clone())
                } else {
                    Ok(x.add_scaled(-violation / normal.norm_squared(), normal))
                }
            }
            SetKind::Ball { center, radius } => {
                let d = x - center;
                let dist = d.norm();
                if dist <= *radius {
                    Ok(x.clone())
                } else {
                    Ok(center.add_scaled(radius / dist, &d))
                }
            }
            SetKind::Box { lower, upper } => Ok(Vector::from_raw(
                x.as_slice()
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(xi, (l, u))| xi.clamp(*l, *u))
                    .collect(),
            )),
            SetKind::AffineSubspace { .. } => {
                let solver = self.affine.as_ref().expect("solver cached at construction");
                Ok(solver.project(x))
            }
            SetKind::Epigraph {
                f,
                u_index,
                v_index,
            } => {
                let (u, v) = scalar_fn::project_onto_epigraph(f, x[*u_index], x[*v_index])?;
                let mut coords = x.to_vec();
                coords[*u_index] = u;
                coords[*v_index] = v;
                Ok(Vector::from_raw(coords))
            }
        }
    }

    /// Reflection `2·P(x) − x`; the midpoint of `x` and the result is the
    /// projection, hence lies in the set.
    pub fn reflect(&self, x: &Vector) -> Result<Vector, GeometryError> {
        let p = self.project(x)?;
        Ok(Vector::from_raw(
            p.as_slice()
                .iter()
                .zip(x.as_slice())
                .map(|(pi, xi)| 2.0 * pi - xi)
                .collect(),
        ))
    }

    /// `‖x − P(x)‖`; zero exactly when `x` is in the set.
    pub fn distance(&self, x: &Vector) -> Result<f64, GeometryError> {
        Ok(self.project(x)?.distance_to(x))
    }

    /// Membership test: `distance(x) ≤ tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool, GeometryError> {
        if tol < 0.0 {
            return Err(GeometryError::NegativeTolerance(tol));
        }
        Ok(self.distance(x)? <= tol)
    }
}

fn check_normal(normal: &Vector, offset: f64) -> Result<(), GeometryError> {
    if !offset.is_finite() {
        return Err(GeometryError::NonFiniteCoordinate);
    }
    if normal.norm_squared() == 0.0 {
        return Err(GeometryError::ZeroNormal);
    }
    Ok(())
}

/// Cached rank-revealing factorization of an affine row system.
///
/// The projection of `x` onto `{y : A y = b}` is `x − A⁺(A x − b)`: the
/// minimum-norm least-squares correction lies in the row space, so the
/// result is the nearest point, and consistency of the system makes the
/// constraint exact even when rows are redundant.
#[derive(Clone, Debug)]
struct AffineSolver {
    matrix: DMatrix<f64>,
    svd: nalgebra::linalg::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs: DVector<f64>,
    cutoff: f64,
}

impl AffineSolver {
    fn new(rows: &[(Vector, f64)]) -> Result<Self, GeometryError> {
        let m = rows.len();
        let d = rows[0].0.dim();
        let matrix = DMatrix::from_fn(m, d, |i, j| rows[i].0[j]);
        let rhs = DVector::from_fn(m, |i, _| rows[i].1);
        let svd = matrix.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let cutoff = sigma_max * 1e-12;
        let least_squares = svd
            .solve(&rhs, cutoff)
            .map_err(|_| GeometryError::InconsistentSystem { residual: f64::NAN })?;
        let residual = (&matrix * &least_squares - &rhs).norm();
        if residual > 1e-9 * (1.0 + rhs.norm()) {
            return Err(GeometryError::InconsistentSystem { residual });
        }
        Ok(Self {
            matrix,
            svd,
            rhs,
            cutoff,
        })
    }

    fn project(&self, x: &Vector) -> Vector {
        let xv = DVector::from_column_slice(x.as_slice());
        let residual = &self.matrix * &xv - &self.rhs;
        let correction = self
            .svd
            .solve(&residual, self.cutoff)
            .expect("SVD solve cannot fail once factored");
        Vector::from_raw((xv - correction).iter().copied().collect())
    }
}
