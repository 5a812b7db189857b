//! Determinantal masses of planar balanced measures and of the simple
//! higher-dimensional tensors built from them.
//!
//! A balanced angular measure `μ = Σ μ_i δ_{s_i}` on the circle is the
//! facet-length data of a convex polygon (discrete Minkowski problem).
//! [`dm_closed_formula`] evaluates the double-sine integral directly;
//! [`polygon_from_measure`] and [`enclosed_area`] build the polygon and
//! measure it. The two differ by exactly a factor 2; both are exposed.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{wedge_sq, SpaceTimeVec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularMeasure {
    pub atoms: Vec<Atom>,
}

fn normalize_angle(s: f64) -> f64 {
    let r = s.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl AngularMeasure {
    /// Validates weights and normalizes angles into `[0, 2π)`.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut out = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !(a.weight > 0.0 && a.weight.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom weight must be > 0, got {}", a.weight)));
            }
            if !a.angle.is_finite() {
                return Err(Error::InvalidArgument(format!("atom angle {} is not finite", a.angle)));
            }
            out.push(Atom {
                angle: normalize_angle(a.angle),
                weight: a.weight,
            });
        }
        let mut sorted: Vec<f64> = out.iter().map(|a| a.angle).collect();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("atom angles must be distinct mod 2π".into()));
        }
        Ok(AngularMeasure { atoms: out })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(angle, weight)| Atom { angle, weight }).collect())
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn is_balanced(&self) -> bool {
        let r = check_balance(self);
        r[0].hypot(r[1]) <= 1e-12 * self.total_weight()
    }

    /// Same measure with every angle shifted by `theta`.
    pub fn rotated(&self, theta: f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    angle: a.angle + theta,
                    weight: a.weight,
                })
                .collect(),
        )
    }
}

/// `Σ μ_i (cos s_i, sin s_i)`.
pub fn check_balance(mu: &AngularMeasure) -> [f64; 2] {
    mu.atoms.iter().fold([0.0, 0.0], |acc, a| {
        [acc[0] + a.weight * a.angle.cos(), acc[1] + a.weight * a.angle.sin()]
    })
}

fn require_balanced(mu: &AngularMeasure) -> Result<()> {
    let r = check_balance(mu);
    let residual = r[0].hypot(r[1]);
    let tolerance = 1e-12 * mu.total_weight();
    if residual > tolerance {
        return Err(Error::Unbalanced { residual, tolerance });
    }
    Ok(())
}

/// `(1/8) Σ_{i,j} μ_i μ_j sin|s_i − s_j|` over all ordered pairs, with the
/// literal sine of the absolute difference of angles in `[0, 2π)`.
pub fn dm_closed_formula(mu: &AngularMeasure) -> Result<f64> {
    require_balanced(mu)?;
    let mut sum = 0.0;
    for a in &mu.atoms {
        for b in &mu.atoms {
            sum += a.weight * b.weight * (a.angle - b.angle).abs().sin();
        }
    }
    Ok(sum / 8.0)
}

/// Vertices in counter-clockwise order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<[f64; 2]>,
}

impl ConvexPolygon {
    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|k| {
                let (p, q) = (self.vertices[k], self.vertices[(k + 1) % n]);
                (q[0] - p[0]).hypot(q[1] - p[1])
            })
            .sum()
    }
}

/// Gap between the cumulative edge sum and the starting vertex.
pub fn closure_gap(mu: &AngularMeasure) -> f64 {
    let r = check_balance(mu);
    r[0].hypot(r[1])
}

/// Solves the discrete Minkowski problem: edge `i` has outward normal
/// `(cos s_i, sin s_i)` and length `μ_i`. The polygon is translated so its
/// vertex centroid sits at the origin.
pub fn polygon_from_measure(mu: &AngularMeasure) -> Result<ConvexPolygon> {
    if mu.atoms.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} atoms cannot enclose a polygon",
            mu.atoms.len()
        )));
    }
    require_balanced(mu)?;
    let mut atoms = mu.atoms.clone();
    atoms.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let mut vertices = Vec::with_capacity(atoms.len());
    let mut p = [0.0, 0.0];
    for a in &atoms {
        vertices.push(p);
        p[0] -= a.weight * a.angle.sin();
        p[1] += a.weight * a.angle.cos();
    }
    let perimeter = mu.total_weight();
    let gap = p[0].hypot(p[1]);
    if gap > 1e-12 * perimeter {
        return Err(Error::NotClosed { gap });
    }
    let k = vertices.len() as f64;
    let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / k;
    let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / k;
    for v in &mut vertices {
        v[0] -= cx;
        v[1] -= cy;
    }
    let poly = ConvexPolygon { vertices };
    if !(shoelace(&poly.vertices) > 0.0) {
        return Err(Error::Degenerate("measure encloses no area".into()));
    }
    Ok(poly)
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|k| {
            let (p, q) = (v[k], v[(k + 1) % n]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
}

pub fn enclosed_area(poly: &ConvexPolygon) -> Result<f64> {
    if poly.vertices.len() < 3 {
        return Err(Error::Degenerate("fewer than three vertices".into()));
    }
    let area = shoelace(&poly.vertices);
    if !(area > 0.0) {
        return Err(Error::Degenerate("polygon is not positively oriented".into()));
    }
    Ok(area)
}

/// `max_k ⟨vertex_k, (cos φ, sin φ)⟩`.
pub fn support_function(poly: &ConvexPolygon, phi: f64) -> f64 {
    let (c, s) = (phi.cos(), phi.sin());
    poly.vertices
        .iter()
        .map(|v| v[0] * c + v[1] * s)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Mass of three lines meeting at a point with weighted directions
/// `V + W + Z = 0`: `(1/4)|det(V, W)|`.
///
/// All three determinants agree in exact arithmetic; they are averaged in
/// sorted order so the result does not depend on argument order.
pub fn dm_triple(v: [f64; 2], w: [f64; 2], z: [f64; 2]) -> Result<f64> {
    let norm = |x: [f64; 2]| x[0].hypot(x[1]);
    if [v, w, z].iter().any(|&x| norm(x) == 0.0) {
        return Err(Error::Degenerate("zero direction vector".into()));
    }
    let scale = norm(v) + norm(w) + norm(z);
    let residual = norm([v[0] + w[0] + z[0], v[1] + w[1] + z[1]]);
    let tolerance = 1e-12 * scale;
    if residual > tolerance {
        return Err(Error::Unbalanced { residual, tolerance });
    }
    let mut d = [det2(v, w).abs(), det2(w, z).abs(), det2(z, v).abs()];
    d.sort_by(f64::total_cmp);
    Ok((d[0] + d[1] + d[2]) / 12.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectSum {
    pub dm: f64,
    pub a_minus: f64,
    pub a_plus: f64,
}

/// Mass of `S_− ⊕ S_+` on `R^p × R^q` and the coefficients of its potential
/// `a_− θ_− + a_+ θ_+`.
pub fn dm_direct_sum(dm_minus: f64, p: usize, dm_plus: f64, q: usize) -> Result<DirectSum> {
    if !(dm_minus > 0.0 && dm_plus > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "factor masses must be positive, got {dm_minus} and {dm_plus}"
        )));
    }
    if p < 2 || q < 2 {
        return Err(Error::InvalidArgument(format!("factor dimensions must be >= 2, got p={p}, q={q}")));
    }
    let (p, q) = (p as f64, q as f64);
    let d1 = p + q - 1.0;
    Ok(DirectSum {
        dm: dm_minus.powf((p - 1.0) / d1) * dm_plus.powf((q - 1.0) / d1),
        a_minus: dm_minus.powf(-q / d1) * dm_plus.powf((q - 1.0) / d1),
        a_plus: dm_minus.powf((p - 1.0) / d1) * dm_plus.powf(-p / d1),
    })
}

/// Diagonal tensor `c Σ e_k ⊗ e_k δ_{lines}` in `R^d`: the enclosed body is
/// the cube with facet area `c`, so the mass is `c^{d/(d−1)}`.
pub fn dm_cross(d: usize, c: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {d}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("weight must be > 0, got {c}")));
    }
    let d = d as f64;
    Ok(c.powf(d / (d - 1.0)))
}

/// Normalization of the planar factor in [`dm_kink`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `A₀ = |V∧V′|/4`, the triple-line mass.
    #[default]
    Triple,
    /// `A₀ = |V∧V′|/2`, the area of the triangle with sides `V`, `V′`, `V − V′`.
    Area,
}

impl Convention {
    pub fn kappa(self) -> f64 {
        match self {
            Convention::Triple => 0.25,
            Convention::Area => 0.5,
        }
    }
}

/// Mass at a trajectory kink of the augmented tensor: the product of the
/// planar triangle spanned by `V, V′` with an `(n−1)`-cube whose facets
/// carry weight `b`. Equals `A₀^{1/n} b^{(n−1)/n}`.
pub fn dm_kink(v: &SpaceTimeVec, v2: &SpaceTimeVec, b: f64, n: usize, convention: Convention) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if v.space_dim() != n || v2.space_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: if v.space_dim() != n { v.0.len() } else { v2.0.len() },
        });
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("b must be >= 0, got {b}")));
    }
    let wedge = wedge_sq(&v.0, &v2.0).sqrt();
    if !(wedge > 0.0) {
        return Err(Error::Degenerate("V and V′ are parallel".into()));
    }
    let a0 = convention.kappa() * wedge;
    let n = n as f64;
    Ok(a0.powf(1.0 / n) * b.powf((n - 1.0) / n))
}

/// The `detmass` CLI output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub balanced: bool,
    pub residual: [f64; 2],
    pub dm_closed: Option<f64>,
    pub area: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn summarize(mu: &AngularMeasure) -> Result<MeasureSummary> {
    let residual = check_balance(mu);
    if !mu.is_balanced() {
        return Ok(MeasureSummary {
            balanced: false,
            residual,
            dm_closed: None,
            area: None,
            ratio: None,
        });
    }
    let dm = dm_closed_formula(mu)?;
    let area = if mu.atoms.len() >= 3 {
        Some(enclosed_area(&polygon_from_measure(mu)?)?)
    } else {
        None
    };
    Ok(MeasureSummary {
        balanced: true,
        residual,
        dm_closed: Some(dm),
        area,
        ratio: area.filter(|_| dm > 0.0).map(|a| a / dm),
    })
}
