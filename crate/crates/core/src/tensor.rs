//! The mass-momentum tensor of a simulated history, stored as a weighted
//! graph of straight edges in spacetime.
//!
//! Each free flight between kinks contributes an edge of weight `|V|` and
//! direction `V/|V|` with `V = (1, v)`. Each collision with `a > 0`
//! contributes a colliton: a horizontal edge joining the two centers at the
//! collision instant, weighted by the exchanged momentum `|v′ − v|`. The
//! resulting tensor `Σ a_J η_J ⊗ η_J δ_J` is divergence-free at every
//! interior vertex.

use serde::{Deserialize, Serialize};

use crate::dynamics::EventLog;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::kernel::{dot, lift, wedge_sq, SpaceTimeVec, Vector};
use crate::ledger::bulk_invariants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Trajectory,
    Colliton,
    Augmentation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEdge {
    pub kind: EdgeKind,
    #[serde(rename = "x_start")]
    pub start: SpaceTimeVec,
    #[serde(rename = "x_end")]
    pub end: SpaceTimeVec,
    pub weight: f64,
    /// Unit direction from `start` to `end`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub direction: Option<SpaceTimeVec>,
}

impl TensorEdge {
    pub fn new(kind: EdgeKind, start: SpaceTimeVec, end: SpaceTimeVec, weight: f64, direction: SpaceTimeVec) -> Self {
        TensorEdge {
            kind,
            start,
            end,
            weight,
            direction: Some(direction),
        }
    }

    /// Direction, falling back to the normalized chord for edges read from
    /// a dump.
    pub fn eta(&self) -> SpaceTimeVec {
        match &self.direction {
            Some(d) => d.clone(),
            None => {
                let chord: Vec<f64> = self.end.0.iter().zip(&self.start.0).map(|(b, a)| b - a).collect();
                let len = dot(&chord, &chord).sqrt();
                SpaceTimeVec(chord.into_iter().map(|c| c / len).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub point: SpaceTimeVec,
    /// `(edge index, true when the vertex is the edge's start)`
    pub incident: Vec<(usize, bool)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphTensor {
    pub space_dim: usize,
    pub edges: Vec<TensorEdge>,
    pub vertices: Vec<Vertex>,
    /// Vertex indices of each edge's `(start, end)`.
    pub endpoints: Vec<(usize, usize)>,
    pub window: (f64, f64),
    pub scale: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl GraphTensor {
    /// Builds the vertex set by merging endpoints closer than
    /// `1e-12 · scale`, where `scale` is the largest coordinate magnitude
    /// (at least 1).
    pub fn from_edges(space_dim: usize, edges: Vec<TensorEdge>, window: (f64, f64)) -> Self {
        let points: Vec<&SpaceTimeVec> = edges.iter().flat_map(|e| [&e.start, &e.end]).collect();
        let scale = points
            .iter()
            .flat_map(|p| p.0.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-12 * scale;

        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].t().total_cmp(&points[b].t()).then(a.cmp(&b)));
        let mut uf = UnionFind((0..points.len()).collect());
        for (k, &a) in order.iter().enumerate() {
            for &b in &order[k + 1..] {
                if points[b].t() - points[a].t() > tol {
                    break;
                }
                if points[a].distance(points[b]) <= tol {
                    uf.union(a, b);
                }
            }
        }

        let mut slot = vec![usize::MAX; points.len()];
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut endpoints = Vec::with_capacity(edges.len());
        for e in 0..edges.len() {
            let mut ends = [0usize; 2];
            for (side, end) in ends.iter_mut().enumerate() {
                let root = uf.find(2 * e + side);
                if slot[root] == usize::MAX {
                    slot[root] = vertices.len();
                    vertices.push(Vertex {
                        point: points[root].clone(),
                        incident: Vec::new(),
                    });
                }
                *end = slot[root];
                vertices[slot[root]].incident.push((e, side == 0));
            }
            endpoints.push((ends[0], ends[1]));
        }
        GraphTensor {
            space_dim,
            edges,
            vertices,
            endpoints,
            window,
            scale,
        }
    }

    pub fn is_boundary(&self, v: &Vertex) -> bool {
        let tol = 1e-12 * self.scale;
        (v.point.t() - self.window.0).abs() <= tol || (v.point.t() - self.window.1).abs() <= tol
    }

    /// The JSON dump: `[{kind, x_start, x_end, weight}]`.
    pub fn dump(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.edges
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "kind": e.kind,
                        "x_start": e.start,
                        "x_end": e.end,
                        "weight": e.weight,
                    })
                })
                .collect(),
        )
    }
}

fn check_window(log: &EventLog, window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty window ({lo}, {hi})")));
    }
    let t0 = log
        .initial
        .iter()
        .map(|s| s.last_update_time)
        .fold(f64::NEG_INFINITY, f64::max);
    if lo < t0 {
        return Err(Error::InvalidArgument(format!(
            "window starts at {lo}, before the initial time {t0}"
        )));
    }
    let tie = log.config.tolerances.time_tie.max(1e-12 * hi.abs().max(1.0));
    for t in [lo, hi] {
        if log.events.iter().any(|e| (e.t - t).abs() <= tie) {
            return Err(Error::WindowHitsCollision(t));
        }
    }
    Ok(())
}

fn trajectory_edge(t0: f64, y0: &[f64], t1: f64, y1: &[f64], v: &Vector) -> TensorEdge {
    let big_v = lift(v);
    let weight = big_v.norm();
    TensorEdge::new(
        EdgeKind::Trajectory,
        SpaceTimeVec::new(t0, y0),
        SpaceTimeVec::new(t1, y1),
        weight,
        big_v.scale(1.0 / weight),
    )
}

/// Assembles trajectory edges clipped to `window` and one colliton per
/// collision inside it.
pub fn build_tensor(log: &EventLog, window: (f64, f64)) -> Result<GraphTensor> {
    check_window(log, window)?;
    let (lo, hi) = window;
    let dim = log.dim();
    let index = log.id_index();

    // Per-particle kinks: (time, position, outgoing velocity).
    let mut chains: Vec<Vec<(f64, Vector, Vector)>> = log
        .initial
        .iter()
        .map(|s| vec![(s.last_update_time, s.position.clone(), s.velocity.clone())])
        .collect();
    let mut edges = Vec::new();
    for e in &log.events {
        chains[index[&e.i]].push((e.t, e.yi.clone(), e.vi_post.clone()));
        chains[index[&e.j]].push((e.t, e.yj.clone(), e.vj_post.clone()));
        let sep = &e.yj - &e.yi;
        let len = sep.norm();
        if e.t > lo && e.t < hi && len > 0.0 {
            let q = (&e.vi_post - &e.vi).norm();
            let dir = SpaceTimeVec::new(0.0, &sep.scale(1.0 / len).0);
            edges.push(TensorEdge::new(
                EdgeKind::Colliton,
                SpaceTimeVec::new(e.t, &e.yi.0),
                SpaceTimeVec::new(e.t, &e.yj.0),
                q,
                dir,
            ));
        }
    }

    for chain in &chains {
        for (k, (t_start, y_start, v)) in chain.iter().enumerate() {
            let t_next = chain.get(k + 1).map_or(f64::INFINITY, |c| c.0);
            let s = t_start.max(lo);
            let f = t_next.min(hi);
            if s >= f {
                continue;
            }
            let at = |t: f64| -> Vec<f64> {
                y_start.0.iter().zip(&v.0).map(|(y, v)| y + (t - t_start) * v).collect()
            };
            let p0 = if s == *t_start { y_start.0.clone() } else { at(s) };
            let p1 = if f == t_next { chain[k + 1].1 .0.clone() } else { at(f) };
            edges.push(trajectory_edge(s, &p0, f, &p1, v));
        }
    }
    Ok(GraphTensor::from_edges(dim, edges, window))
}

/// Net outward flux `m = Σ a_J η_J` at one vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexBalance {
    pub point: SpaceTimeVec,
    pub m: SpaceTimeVec,
    /// `Σ a_J` over incident edges.
    pub weight_scale: f64,
    pub degree: usize,
    pub boundary: bool,
}

impl VertexBalance {
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn relative(&self) -> f64 {
        if self.weight_scale > 0.0 {
            self.norm() / self.weight_scale
        } else {
            0.0
        }
    }
}

pub fn vertex_balances(tensor: &GraphTensor) -> Vec<VertexBalance> {
    vertex_balances_with(tensor, Execution::default())
}

pub fn vertex_balances_with(tensor: &GraphTensor, exec: Execution) -> Vec<VertexBalance> {
    exec::map(&tensor.vertices, exec, |v| {
        let mut m = SpaceTimeVec::zeros(tensor.space_dim);
        let mut weight_scale = 0.0;
        for &(e, is_start) in &v.incident {
            let edge = &tensor.edges[e];
            let sign = if is_start { 1.0 } else { -1.0 };
            m.add_scaled(&edge.eta(), sign * edge.weight);
            weight_scale += edge.weight;
        }
        VertexBalance {
            point: v.point.clone(),
            m,
            weight_scale,
            degree: v.incident.len(),
            boundary: tensor.is_boundary(v),
        }
    })
}

/// The pairing of the tensor's divergence with a scalar test function,
/// `Σ_J a_J (φ(x_start) − φ(x_end)) η_J`, which telescopes to
/// `Σ_vertices φ(x) m(x)`.
pub fn weak_divergence<F>(tensor: &GraphTensor, phi: F) -> SpaceTimeVec
where
    F: Fn(&SpaceTimeVec) -> f64,
{
    let mut acc = SpaceTimeVec::zeros(tensor.space_dim);
    for e in &tensor.edges {
        let dphi = phi(&e.start) - phi(&e.end);
        acc.add_scaled(&e.eta(), e.weight * dphi);
    }
    acc
}

/// The normal trace of the tensor on the hyperplane `t = const`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceTrace {
    pub t: f64,
    /// Crossing point and trace vector (`V` for a trajectory).
    pub crossings: Vec<(SpaceTimeVec, SpaceTimeVec)>,
    /// Time component of the net trace: the mass crossing the slice.
    pub mass: f64,
    /// Spatial components of the net trace: the momentum.
    pub momentum: Vec<f64>,
    /// `Σ |trace vector|`, i.e. `Σ √(1 + |v|²)` over the particles.
    pub total_variation: f64,
}

pub fn slice_trace(tensor: &GraphTensor, t: f64) -> Result<SliceTrace> {
    let (lo, hi) = tensor.window;
    if !(t >= lo && t <= hi) {
        return Err(Error::InvalidArgument(format!("slice t={t} outside window ({lo}, {hi})")));
    }
    let tol = 1e-12 * tensor.scale;
    let interior_vertex_hit = tensor
        .vertices
        .iter()
        .any(|v| (v.point.t() - t).abs() <= tol && !tensor.is_boundary(v));
    if interior_vertex_hit {
        return Err(Error::WindowHitsCollision(t));
    }
    let mut crossings = Vec::new();
    let mut net = SpaceTimeVec::zeros(tensor.space_dim);
    let mut total_variation = 0.0;
    for e in &tensor.edges {
        let (t0, t1) = (e.start.t().min(e.end.t()), e.start.t().max(e.end.t()));
        // Half-open so a boundary slice sees each edge once.
        let inside = if t == hi { t0 < t && t <= t1 } else { t0 <= t && t < t1 };
        if !inside || t0 == t1 {
            continue;
        }
        let eta = e.eta();
        let sign = eta.t().signum();
        let vec = eta.scale(sign * e.weight);
        let frac = (t - e.start.t()) / (e.end.t() - e.start.t());
        let point = SpaceTimeVec(
            e.start.0.iter().zip(&e.end.0).map(|(a, b)| a + frac * (b - a)).collect(),
        );
        net.add_scaled(&vec, 1.0);
        total_variation += vec.norm();
        crossings.push((point, vec));
    }
    Ok(SliceTrace {
        t,
        crossings,
        mass: net.t(),
        momentum: net.space().to_vec(),
        total_variation,
    })
}

/// Where a particle's trajectory bends.
#[derive(Clone, Debug, PartialEq)]
pub struct KinkSite {
    pub time: f64,
    pub particle: usize,
    pub point: SpaceTimeVec,
    pub v: Vector,
    pub v_post: Vector,
}

pub fn kink_sites(log: &EventLog, window: (f64, f64)) -> Vec<KinkSite> {
    log.events
        .iter()
        .filter(|e| e.t > window.0 && e.t < window.1)
        .flat_map(|e| {
            [
                KinkSite {
                    time: e.t,
                    particle: e.i,
                    point: SpaceTimeVec::new(e.t, &e.yi.0),
                    v: e.vi.clone(),
                    v_post: e.vi_post.clone(),
                },
                KinkSite {
                    time: e.t,
                    particle: e.j,
                    point: SpaceTimeVec::new(e.t, &e.yj.0),
                    v: e.vj.clone(),
                    v_post: e.vj_post.clone(),
                },
            ]
        })
        .collect()
}

/// Orthonormal basis of `Span(V, V′)^⊥` in `R^{1+n}`.
///
/// Deterministic completion: coordinate axes are orthogonalized against the
/// span and the already chosen vectors, always taking the axis with the
/// largest residual next.
pub fn complement_basis(big_v: &SpaceTimeVec, big_v2: &SpaceTimeVec) -> Result<Vec<SpaceTimeVec>> {
    let d = big_v.0.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for seed in [&big_v.0, &big_v2.0] {
        let r = orthogonalize(seed, &basis);
        let norm = dot(&r, &r).sqrt();
        if norm <= 1e-12 * dot(seed, seed).sqrt() {
            return Err(Error::Degenerate("V and V′ are linearly dependent".into()));
        }
        basis.push(r.into_iter().map(|x| x / norm).collect());
    }
    let mut out = Vec::with_capacity(d.saturating_sub(2));
    let mut used = vec![false; d];
    while basis.len() < d {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for axis in (0..d).filter(|&a| !used[a]) {
            let mut e = vec![0.0; d];
            e[axis] = 1.0;
            let r = orthogonalize(&e, &basis);
            let norm = dot(&r, &r).sqrt();
            if best.as_ref().is_none_or(|b| norm > b.2) {
                best = Some((axis, r, norm));
            }
        }
        let (axis, r, norm) = best.ok_or_else(|| Error::Degenerate("basis completion failed".into()))?;
        used[axis] = true;
        let z: Vec<f64> = r.into_iter().map(|x| x / norm).collect();
        // Second pass for numerical orthogonality.
        let z = orthogonalize(&z, &basis);
        let zn = dot(&z, &z).sqrt();
        let z: Vec<f64> = z.into_iter().map(|x| x / zn).collect();
        basis.push(z.clone());
        out.push(SpaceTimeVec(z));
    }
    Ok(out)
}

fn orthogonalize(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for b in basis {
        let c = dot(&r, b);
        for (x, y) in r.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    r
}

fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let ap: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
    let len_sq = dot(&ab, &ab);
    let s = if len_sq > 0.0 { (dot(&ap, &ab) / len_sq).clamp(0.0, 1.0) } else { 0.0 };
    ap.iter().zip(&ab).map(|(x, y)| (x - s * y).powi(2)).sum::<f64>().sqrt()
}

/// `T′ = T + Σ_K b_K S_K` together with its divergence mass.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedTensor {
    pub tensor: GraphTensor,
    /// `2(n − 1) Σ b_K`
    pub div_mass: f64,
    /// Half-length used at each kink.
    pub half_lengths: Vec<f64>,
}

/// Largest admissible half-length at a kink: the distance to the nearest
/// edge not incident to it, the nearest other vertex, or the window edge.
fn placement_limit(tensor: &GraphTensor, vertex: usize) -> f64 {
    let x = &tensor.vertices[vertex];
    let p = x.point.as_slice();
    let mut limit = (p[0] - tensor.window.0).min(tensor.window.1 - p[0]);
    for (e, edge) in tensor.edges.iter().enumerate() {
        if x.incident.iter().any(|&(k, _)| k == e) {
            continue;
        }
        limit = limit.min(point_segment_distance(p, edge.start.as_slice(), edge.end.as_slice()));
    }
    for (k, other) in tensor.vertices.iter().enumerate() {
        if k != vertex {
            limit = limit.min(x.point.distance(&other.point));
        }
    }
    limit
}

/// Adds at every kink the `n − 1` balanced segment pairs along an
/// orthonormal basis of `Span(V, V′)^⊥`, each of weight `b[k]`.
///
/// `half_lengths` defaults to `0.49 ×` the placement limit; explicit values
/// must not exceed half of it.
pub fn build_augmented(
    tensor: &GraphTensor,
    kinks: &[KinkSite],
    b: &[f64],
    half_lengths: Option<&[f64]>,
) -> Result<AugmentedTensor> {
    let n = tensor.space_dim;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "augmentation needs n >= 2 (the complement of Span(V, V′) is empty)".into(),
        ));
    }
    if b.len() != kinks.len() || half_lengths.is_some_and(|h| h.len() != kinks.len()) {
        return Err(Error::InvalidArgument("one weight and half-length per kink".into()));
    }
    if let Some(bad) = b.iter().find(|&&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument(format!("kink weight must be > 0, got {bad}")));
    }
    let tol = 1e-12 * tensor.scale;
    let mut edges = tensor.edges.clone();
    let mut used = Vec::with_capacity(kinks.len());
    for (k, site) in kinks.iter().enumerate() {
        let vertex = tensor
            .vertices
            .iter()
            .position(|v| v.point.distance(&site.point) <= tol)
            .ok_or_else(|| Error::InvalidArgument(format!("kink at t={} is not a vertex", site.time)))?;
        let limit = placement_limit(tensor, vertex);
        let eps = match half_lengths {
            None => 0.49 * limit,
            Some(h) => {
                if !(h[k] > 0.0 && h[k] <= 0.5 * limit) {
                    return Err(Error::SegmentPlacement {
                        time: site.time,
                        requested: h[k],
                        limit: 0.5 * limit,
                    });
                }
                h[k]
            }
        };
        if !(eps > 0.0) {
            return Err(Error::SegmentPlacement {
                time: site.time,
                requested: eps,
                limit,
            });
        }
        let zs = complement_basis(&lift(&site.v), &lift(&site.v_post))?;
        for z in zs {
            for sign in [1.0, -1.0] {
                let dir = z.scale(sign);
                let mut end = site.point.clone();
                end.add_scaled(&dir, eps);
                edges.push(TensorEdge::new(EdgeKind::Augmentation, site.point.clone(), end, b[k], dir));
            }
        }
        used.push(eps);
    }
    Ok(AugmentedTensor {
        tensor: GraphTensor::from_edges(n, edges, tensor.window),
        div_mass: 2.0 * (n as f64 - 1.0) * b.iter().sum::<f64>(),
        half_lengths: used,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMass {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub total_variation: f64,
}

/// The `audit.json` document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorAudit {
    pub window: (f64, f64),
    pub edge_count: usize,
    pub vertex_count: usize,
    pub interior_vertex_count: usize,
    /// Largest `|m|` over interior vertices.
    pub max_interior_balance: f64,
    /// Largest `|m| / Σ a_J` over interior vertices.
    pub max_relative_balance: f64,
    /// Largest sine of the angle between `v′ − v` and `y_j − y_i`.
    pub colliton_max_misalignment: f64,
    /// Largest `| |y_j − y_i| − 2a |`.
    pub colliton_max_length_error: f64,
    pub trace_masses: Vec<TraceMass>,
    /// `M + E` of the initial data.
    pub mass_plus_energy: f64,
    /// `Σ |m|` over interior vertices.
    pub div_mass: f64,
}

impl TensorAudit {
    /// Balances within `1e-12` of the local weight, collitons aligned within
    /// `1e-10`, slice mass and momentum constant and the trace norm at most
    /// `M + E`.
    pub fn passes(&self) -> bool {
        let aligned = self.colliton_max_misalignment <= 1e-10;
        let balanced = self.max_relative_balance <= 1e-12;
        let bounded = self
            .trace_masses
            .iter()
            .all(|m| m.total_variation <= self.mass_plus_energy + 1e-12 && m.mass <= self.mass_plus_energy + 1e-12);
        let constant = self.trace_masses.windows(2).all(|w| {
            let scale = w[0].total_variation.max(1.0);
            (w[0].mass - w[1].mass).abs() <= 1e-12 * scale
                && w[0]
                    .momentum
                    .iter()
                    .zip(&w[1].momentum)
                    .all(|(a, b)| (a - b).abs() <= 1e-12 * scale)
        });
        aligned && balanced && bounded && constant
    }
}

pub fn audit(log: &EventLog, window: (f64, f64), slice_times: &[f64]) -> Result<TensorAudit> {
    let tensor = build_tensor(log, window)?;
    let balances = vertex_balances(&tensor);
    let interior: Vec<&VertexBalance> = balances.iter().filter(|b| !b.boundary).collect();
    let inv = bulk_invariants(&log.initial)?;

    let mut misalignment: f64 = 0.0;
    let mut length_error: f64 = 0.0;
    for e in log.events.iter().filter(|e| e.t > window.0 && e.t < window.1) {
        let sep = &e.yj - &e.yi;
        let q = &e.vi_post - &e.vi;
        let denom = sep.norm() * q.norm();
        if denom > 0.0 {
            misalignment = misalignment.max(wedge_sq(&sep.0, &q.0).sqrt() / denom);
        }
        length_error = length_error.max((sep.norm() - 2.0 * log.config.radius).abs());
    }

    let trace_masses = slice_times
        .iter()
        .map(|&t| {
            slice_trace(&tensor, t).map(|s| TraceMass {
                t,
                mass: s.mass,
                momentum: s.momentum,
                total_variation: s.total_variation,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TensorAudit {
        window,
        edge_count: tensor.edges.len(),
        vertex_count: tensor.vertices.len(),
        interior_vertex_count: interior.len(),
        max_interior_balance: interior.iter().map(|b| b.norm()).fold(0.0, f64::max),
        max_relative_balance: interior.iter().map(|b| b.relative()).fold(0.0, f64::max),
        colliton_max_misalignment: misalignment,
        colliton_max_length_error: length_error,
        trace_masses,
        mass_plus_energy: inv.mass + inv.energy,
        div_mass: interior.iter().map(|b| b.norm()).sum(),
    })
}
