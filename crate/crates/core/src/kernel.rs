//! Dimension-generic vector arithmetic and the kinematic quantities shared by
//! the simulation, the ledger and the tensor audit.
//!
//! The space dimension is a runtime value. A [`Vector`] holds `n` components,
//! a [`SpaceTimeVec`] holds `1 + n` with the time component first.

use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or velocity in physical space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, rhs: f64) -> Vector {
        self.scale(rhs)
    }
}

/// A vector of spacetime `R^{1+n}`; component 0 is time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpaceTimeVec(pub Vec<f64>);

impl SpaceTimeVec {
    pub fn new(t: f64, space: &[f64]) -> Self {
        let mut c = Vec::with_capacity(space.len() + 1);
        c.push(t);
        c.extend_from_slice(space);
        SpaceTimeVec(c)
    }

    pub fn zeros(space_dim: usize) -> Self {
        SpaceTimeVec(vec![0.0; space_dim + 1])
    }

    pub fn t(&self) -> f64 {
        self.0[0]
    }

    pub fn space(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn space_dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn scale(&self, factor: f64) -> SpaceTimeVec {
        SpaceTimeVec(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn add_scaled(&mut self, other: &SpaceTimeVec, factor: f64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += factor * b;
        }
    }

    pub fn distance(&self, other: &SpaceTimeVec) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Squared exterior norm `|u ∧ w|²` as the sum of squared 2×2 minors.
///
/// Equal to the Gram determinant `|u|²|w|² − (u·w)²` but free of the
/// cancellation that drives the latter negative for near-parallel inputs.
pub(crate) fn wedge_sq(u: &[f64], w: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            let m = u[i] * w[j] - u[j] * w[i];
            acc += m * m;
        }
    }
    acc.max(0.0)
}

fn check_same(u: usize, w: usize) -> Result<()> {
    if u == w {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: u,
            found: w,
        })
    }
}

/// `|u ∧ u2| = |u|·|u2|·sin θ`.
pub fn wedge_norm(u: &Vector, u2: &Vector) -> Result<f64> {
    check_same(u.dim(), u2.dim())?;
    Ok(wedge_sq(&u.0, &u2.0).sqrt())
}

/// `|V ∧ V′|` for the lifted velocities `V = (1, v)`, `V′ = (1, v2)`,
/// i.e. `√(|v2 − v|² + |v ∧ v2|²)`.
pub fn spacetime_wedge(v: &Vector, v2: &Vector) -> Result<f64> {
    check_same(v.dim(), v2.dim())?;
    Ok(spacetime_wedge_raw(&v.0, &v2.0))
}

pub(crate) fn spacetime_wedge_raw(v: &[f64], v2: &[f64]) -> f64 {
    let jump = dist_sq(v, v2);
    (jump + wedge_sq(v, v2)).sqrt()
}

/// Spacetime direction `(1, v)` of a trajectory with velocity `v`.
pub fn lift(v: &Vector) -> SpaceTimeVec {
    SpaceTimeVec::new(1.0, &v.0)
}
