//! Scalar convex functions whose planar epigraphs serve as constraint sets,
//! and the safeguarded root-finder that projects onto those epigraphs.

use super::GeometryError;

/// Lower end of the bracket for the hyperbola branch; the projector never
/// returns a first coordinate at or below zero.
pub(crate) const HYPERBOLA_DOMAIN_FLOOR: f64 = 1e-12;

/// Absolute tolerance on the stationarity residual during Newton polish.
const STATIONARITY_TOL: f64 = 1e-13;

/// A convex, differentiable scalar function with closed-form derivatives.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarConvexFn {
    /// `u ↦ a·u² + b·u + c` with `a ≥ 0`; domain is all of `R`.
    Parabola { a: f64, b: f64, c: f64 },
    /// `u ↦ c0 + c1/u` with `c1 > 0`; domain is `u > 0`.
    HyperbolaBranch { c0: f64, c1: f64 },
}

impl ScalarConvexFn {
    pub fn parabola(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(GeometryError::NonFiniteCoordinate);
        }
        if a < 0.0 {
            return Err(GeometryError::NegativeCurvature(a));
        }
        Ok(Self::Parabola { a, b, c })
    }

    pub fn hyperbola_branch(c0: f64, c1: f64) -> Result<Self, GeometryError> {
        if !(c0.is_finite() && c1.is_finite()) {
            return Err(GeometryError::NonFiniteCoordinate);
        }
        if c1 <= 0.0 {
            return Err(GeometryError::NonPositiveHyperbolaCoefficient(c1));
        }
        Ok(Self::HyperbolaBranch { c0, c1 })
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Self::Parabola { a, b, c } => (a * u + b) * u + c,
            Self::HyperbolaBranch { c0, c1 } => c0 + c1 / u,
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        match self {
            Self::Parabola { a, b, .. } => 2.0 * a * u + b,
            Self::HyperbolaBranch { c1, .. } => -c1 / (u * u),
        }
    }

    pub fn deriv2(&self, u: f64) -> f64 {
        match self {
            Self::Parabola { a, .. } => 2.0 * a,
            Self::HyperbolaBranch { c1, .. } => 2.0 * c1 / (u * u * u),
        }
    }

    pub fn domain_contains(&self, u: f64) -> bool {
        match self {
            Self::Parabola { .. } => true,
            Self::HyperbolaBranch { .. } => u > 0.0,
        }
    }
}

/// Nearest point of `{(u, v) : v ≥ f(u), u ∈ dom f}` to `(u0, v0)`.
///
/// For query points below the graph the minimizer lies on the curve and its
/// abscissa is the unique root of the stationarity residual
///
/// `g(u) = (u − u0) + f'(u)·(f(u) − v0)`
///
/// restricted to `{u : f(u) ≥ v0}`, where `g` is strictly increasing
/// (`g' = 1 + f'² + f''·(f − v0) ≥ 1`). The restriction matters: outside it
/// `g` may pick up spurious roots. We confine the search to the connected
/// component of `{f ≥ v0}` that contains the solution (computable in closed
/// form for both families), bracket by doubling steps, bisect, then polish
/// with Newton to absolute tolerance 1e-13 on `g`.
pub(crate) fn project_onto_epigraph(
    f: &ScalarConvexFn,
    u0: f64,
    v0: f64,
) -> Result<(f64, f64), GeometryError> {
    if f.domain_contains(u0) && v0 >= f.eval(u0) {
        return Ok((u0, v0));
    }
    let (lo_limit, hi_limit) = solution_interval(f, u0, v0);
    let u = solve_stationarity(f, u0, v0, lo_limit, hi_limit)?;
    Ok((u, f.eval(u)))
}

fn stationarity(f: &ScalarConvexFn, u: f64, u0: f64, v0: f64) -> f64 {
    (u - u0) + f.deriv(u) * (f.eval(u) - v0)
}

/// Connected component of `{u ∈ dom f : f(u) ≥ v0}` containing the solution.
fn solution_interval(f: &ScalarConvexFn, u0: f64, v0: f64) -> (f64, f64) {
    match f {
        ScalarConvexFn::Parabola { a, b, c } => {
            if *a == 0.0 {
                if *b == 0.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    let w = (v0 - c) / b;
                    if *b > 0.0 {
                        (w, f64::INFINITY)
                    } else {
                        (f64::NEG_INFINITY, w)
                    }
                }
            } else {
                let disc = b * b - 4.0 * a * (c - v0);
                if disc <= 0.0 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    let sq = disc.sqrt();
                    let r_lo = (-b - sq) / (2.0 * a);
                    let r_hi = (-b + sq) / (2.0 * a);
                    // Outside queries have f(u0) > v0, so u0 sits beside the
                    // gap (r_lo, r_hi); the solution shares its side.
                    if u0 >= 0.5 * (r_lo + r_hi) {
                        (r_hi, f64::INFINITY)
                    } else {
                        (f64::NEG_INFINITY, r_lo)
                    }
                }
            }
        }
        ScalarConvexFn::HyperbolaBranch { c0, c1 } => {
            let hi = if v0 > *c0 {
                (c1 / (v0 - c0)).max(HYPERBOLA_DOMAIN_FLOOR)
            } else {
                f64::INFINITY
            };
            (HYPERBOLA_DOMAIN_FLOOR, hi)
        }
    }
}

fn solve_stationarity(
    f: &ScalarConvexFn,
    u0: f64,
    v0: f64,
    lo_limit: f64,
    hi_limit: f64,
) -> Result<f64, GeometryError> {
    let g = |u: f64| stationarity(f, u, u0, v0);
    let seed = u0.clamp(lo_limit, hi_limit);
    let g_seed = g(seed);
    if g_seed == 0.0 {
        return Ok(seed);
    }

    // Expanding bracket within the admissible interval.
    let mut step = 1.0 + 0.125 * (u0.abs() + v0.abs());
    let (mut lo, mut hi);
    if g_seed > 0.0 {
        hi = seed;
        let mut cand = seed;
        loop {
            if cand <= lo_limit {
                // g ≥ 0 down to the interval edge: the root is the edge.
                return Ok(newton_polish(f, lo_limit, u0, v0, lo_limit, hi));
            }
            cand = (cand - step).max(lo_limit);
            step *= 2.0;
            if !step.is_finite() {
                return Err(GeometryError::BracketFailure);
            }
            if g(cand) <= 0.0 {
                lo = cand;
                break;
            }
            hi = cand;
        }
    } else {
        lo = seed;
        let mut cand = seed;
        loop {
            if cand >= hi_limit {
                return Ok(newton_polish(f, hi_limit, u0, v0, lo, hi_limit));
            }
            cand = (cand + step).min(hi_limit);
            step *= 2.0;
            if !step.is_finite() {
                return Err(GeometryError::BracketFailure);
            }
            if g(cand) >= 0.0 {
                hi = cand;
                break;
            }
            lo = cand;
        }
    }

    // Bisection: invariant g(lo) ≤ 0 ≤ g(hi).
    for _ in 0..200 {
        if hi - lo <= 1e-15 * (1.0 + lo.abs() + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    Ok(newton_polish(f, 0.5 * (lo + hi), u0, v0, lo, hi))
}

fn newton_polish(f: &ScalarConvexFn, start: f64, u0: f64, v0: f64, lo: f64, hi: f64) -> f64 {
    let mut u = start;
    for _ in 0..40 {
        let gu = stationarity(f, u, u0, v0);
        if gu.abs() <= STATIONARITY_TOL {
            break;
        }
        let slope = 1.0 + f.deriv(u).powi(2) + f.deriv2(u) * (f.eval(u) - v0);
        if slope <= 0.0 || !slope.is_finite() {
            break;
        }
        let next = (u - gu / slope).clamp(lo, hi);
        if (next - u).abs() <= f64::EPSILON * (1.0 + u.abs()) {
            u = next;
            break;
        }
        u = next;
    }
    u
}
