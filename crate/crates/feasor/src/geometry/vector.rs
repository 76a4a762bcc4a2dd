//! Points of the ambient space `R^d`.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use super::GeometryError;

/// A point of `R^d`. Public constructors reject empty and non-finite input;
/// arithmetic on finite vectors may still overflow, which the engine checks
/// once per cycle rather than per operation.
#[derive(Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    /// Builds a vector, rejecting empty input and NaN/infinite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::EmptyVector);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFiniteCoordinate);
        }
        Ok(Self { coords })
    }

    /// Internal constructor for values produced by our own arithmetic.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.clone()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, rhs: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), rhs.dim());
        self.coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance_to(&self, rhs: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), rhs.dim());
        self.coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Vector {
        Vector::from_raw(self.coords.iter().map(|c| c * s).collect())
    }

    /// `self + s * dir`.
    pub fn add_scaled(&self, s: f64, dir: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), dir.dim());
        Vector::from_raw(
            self.coords
                .iter()
                .zip(&dir.coords)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector::from_raw(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector::from_raw(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector::from_raw(self.coords.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector{:?}", self.coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_bad_input() {
        assert!(Vector::new(vec![]).is_err());
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![1.0, -2.5]).is_ok());
    }

    #[test]
    fn basic_arithmetic() {
        let a = Vector::new(vec![3.0, 4.0]).unwrap();
        let b = Vector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), 7.0);
        assert_eq!((&a - &b).as_slice(), &[2.0, 3.0]);
        assert_eq!(a.add_scaled(2.0, &b).as_slice(), &[5.0, 6.0]);
        assert_eq!(a.distance_to(&b), (4.0f64 + 9.0).sqrt());
    }
}
