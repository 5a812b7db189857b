//! Collision-strength bookkeeping: one [`KinkRecord`] per particle per
//! collision, the conserved bulk quantities of the motion, hodograph
//! summaries and the normalized sums whose boundedness in `N²` is checked.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{EventLog, ParticleState};
use crate::error::{Error, Result};
use crate::kernel::{spacetime_wedge_raw, wedge_sq, Vector};

/// Mass, energy, momentum and the derived velocity scales. All are
/// constants of the motion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkInvariants {
    pub mass: f64,
    pub energy: f64,
    pub momentum: Vector,
    pub mean_velocity: Vector,
    /// Root mean square velocity `√(2E/M)`.
    pub v_bar: f64,
    /// Standard deviation `√(v̄² − |w|²)`, evaluated as the root mean square
    /// of `v − w` to avoid cancellation under large boosts.
    pub v_dev: f64,
}

impl BulkInvariants {
    pub fn from_velocities(velocities: &[Vector]) -> Result<Self> {
        let first = velocities
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty particle set".into()))?;
        let dim = first.dim();
        let mut momentum = vec![0.0; dim];
        let mut energy = 0.0;
        for v in velocities {
            v.check_dim(dim)?;
            for (q, c) in momentum.iter_mut().zip(&v.0) {
                *q += c;
            }
            energy += 0.5 * v.norm_sq();
        }
        let mass = velocities.len() as f64;
        let mean: Vec<f64> = momentum.iter().map(|q| q / mass).collect();
        let v_bar = (2.0 * energy / mass).sqrt();
        let spread: f64 = velocities
            .iter()
            .map(|v| v.0.iter().zip(&mean).map(|(c, m)| (c - m) * (c - m)).sum::<f64>())
            .sum();
        let v_dev = (spread / mass).sqrt();
        Ok(BulkInvariants {
            mass,
            energy,
            momentum: Vector(momentum),
            mean_velocity: Vector(mean),
            v_bar,
            v_dev,
        })
    }
}

pub fn bulk_invariants(states: &[ParticleState]) -> Result<BulkInvariants> {
    let v: Vec<Vector> = states.iter().map(|s| s.velocity.clone()).collect();
    BulkInvariants::from_velocities(&v)
}

/// The velocity jump of one particle at one collision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkRecord {
    pub time: f64,
    pub particle: usize,
    pub partner: usize,
    pub v: Vector,
    pub v_post: Vector,
    /// `|v′ − v|`
    pub dv_norm: f64,
    /// `|v ∧ v′|`
    pub wedge: f64,
    /// `|V ∧ V′|` of the lifted velocities.
    pub st_wedge: f64,
}

impl KinkRecord {
    fn new(time: f64, particle: usize, partner: usize, v: &Vector, v_post: &Vector) -> Self {
        let dv_sq: f64 = v.0.iter().zip(&v_post.0).map(|(a, b)| (b - a) * (b - a)).sum();
        KinkRecord {
            time,
            particle,
            partner,
            v: v.clone(),
            v_post: v_post.clone(),
            dv_norm: dv_sq.sqrt(),
            wedge: wedge_sq(&v.0, &v_post.0).sqrt(),
            st_wedge: spacetime_wedge_raw(&v.0, &v_post.0),
        }
    }
}

/// Two records per collision, `i` first.
pub fn build_ledger(log: &EventLog) -> Vec<KinkRecord> {
    log.events
        .iter()
        .flat_map(|e| {
            [
                KinkRecord::new(e.t, e.i, e.j, &e.vi, &e.vi_post),
                KinkRecord::new(e.t, e.j, e.i, &e.vj, &e.vj_post),
            ]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `Σ (v̄ |δv| + |v ∧ v′|)`
    pub s1: f64,
    /// `s1 / (N² v̄²)`, absent when `v̄ = 0`.
    pub ratio1: Option<f64>,
    /// `Σ |δv|`
    pub s2: f64,
    /// `s2 / (N² 𝐯)`, absent (infinite) when `𝐯 = 0`.
    pub ratio2: Option<f64>,
    /// `Σ |V ∧ V′|`
    pub s_st: f64,
    /// `s_st / (M + E)²`
    pub ratio_st: f64,
}

pub fn bound_report(ledger: &[KinkRecord], inv: &BulkInvariants, n: usize) -> BoundReport {
    let n_sq = (n as f64) * (n as f64);
    let s1: f64 = ledger.iter().map(|k| inv.v_bar * k.dv_norm + k.wedge).sum();
    let s2: f64 = ledger.iter().map(|k| k.dv_norm).sum();
    let s_st: f64 = ledger.iter().map(|k| k.st_wedge).sum();
    let me = inv.mass + inv.energy;
    BoundReport {
        s1,
        ratio1: (inv.v_bar > 0.0).then(|| s1 / (n_sq * inv.v_bar * inv.v_bar)),
        s2,
        ratio2: (inv.v_dev > 0.0).then(|| s2 / (n_sq * inv.v_dev)),
        s_st,
        ratio_st: s_st / (me * me),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkClassification {
    pub strong: usize,
    pub weak: usize,
    /// `Σ|δv| / (ε v̄)`, an upper bound for `strong`.
    pub markov_bound: f64,
}

/// Splits kinks into strong (`|δv| ≥ ε v̄`) and weak ones.
pub fn classify_kinks(ledger: &[KinkRecord], inv: &BulkInvariants, epsilon: f64) -> Result<KinkClassification> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
    }
    let threshold = epsilon * inv.v_bar;
    let strong = ledger.iter().filter(|k| k.dv_norm >= threshold).count();
    let s2: f64 = ledger.iter().map(|k| k.dv_norm).sum();
    Ok(KinkClassification {
        strong,
        weak: ledger.len() - strong,
        markov_bound: if threshold > 0.0 { s2 / threshold } else { f64::INFINITY },
    })
}

/// Per-particle hodograph in the frame of the mean velocity `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HodographSummary {
    pub id: usize,
    /// Length of the polygonal chain through successive velocities.
    pub length: f64,
    /// Sum of the triangle areas `½ |(v − w) ∧ (v′ − w)|` swept about the origin.
    pub area: f64,
    pub initial_velocity: Vector,
    /// Velocity on the first segment of the log.
    pub limit_minus: Vector,
    /// Velocity on the last segment of the log.
    pub limit_plus: Vector,
    /// `|v₊ − v(0)|`
    pub scatter: f64,
}

pub fn hodograph_summaries(log: &EventLog) -> Result<Vec<HodographSummary>> {
    let inv = bulk_invariants(&log.initial)?;
    let w = &inv.mean_velocity;
    let index = log.id_index();
    let mut out: Vec<HodographSummary> = log
        .initial
        .iter()
        .map(|s| HodographSummary {
            id: s.id,
            length: 0.0,
            area: 0.0,
            initial_velocity: s.velocity.clone(),
            limit_minus: s.velocity.clone(),
            limit_plus: s.velocity.clone(),
            scatter: 0.0,
        })
        .collect();
    for e in &log.events {
        for (id, v, v_post) in [(e.i, &e.vi, &e.vi_post), (e.j, &e.vj, &e.vj_post)] {
            let h = &mut out[index[&id]];
            h.length += (v_post - v).norm();
            h.area += 0.5 * wedge_sq(&(v - w).0, &(v_post - w).0).sqrt();
            h.limit_plus = v_post.clone();
        }
    }
    for h in &mut out {
        h.scatter = (&h.limit_plus - &h.initial_velocity).norm();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleReport {
    pub id: usize,
    pub ell: f64,
    pub area: f64,
    pub scatter: f64,
}

/// The `report.json` document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub w: Vector,
    pub v_bar: f64,
    pub v_dev: f64,
    #[serde(rename = "S1")]
    pub s1: f64,
    pub ratio1: Option<f64>,
    #[serde(rename = "S2")]
    pub s2: f64,
    pub ratio2: Option<f64>,
    #[serde(rename = "S_st")]
    pub s_st: f64,
    pub ratio_st: f64,
    pub epsilon: f64,
    pub strong_count: usize,
    pub weak_count: usize,
    pub markov_bound: f64,
    pub event_count: usize,
    pub per_particle: Vec<ParticleReport>,
}

pub fn report(log: &EventLog, epsilon: f64) -> Result<Report> {
    let inv = bulk_invariants(&log.initial)?;
    let ledger = build_ledger(log);
    let bounds = bound_report(&ledger, &inv, log.initial.len());
    let classes = classify_kinks(&ledger, &inv, epsilon)?;
    let per_particle = hodograph_summaries(log)?
        .into_iter()
        .map(|h| ParticleReport {
            id: h.id,
            ell: h.length,
            area: h.area,
            scatter: h.scatter,
        })
        .collect();
    Ok(Report {
        mass: inv.mass,
        energy: inv.energy,
        w: inv.mean_velocity,
        v_bar: inv.v_bar,
        v_dev: inv.v_dev,
        s1: bounds.s1,
        ratio1: bounds.ratio1,
        s2: bounds.s2,
        ratio2: bounds.ratio2,
        s_st: bounds.s_st,
        ratio_st: bounds.ratio_st,
        epsilon,
        strong_count: classes.strong,
        weak_count: classes.weak,
        markov_bound: classes.markov_bound,
        event_count: log.events.len(),
        per_particle,
    })
}

/// Writes `t,particle,partner,dv_norm,wedge,st_wedge` rows.
pub fn write_ledger_csv<W: Write>(ledger: &[KinkRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "particle", "partner", "dv_norm", "wedge", "st_wedge"])?;
    for k in ledger {
        w.write_record([
            k.time.to_string(),
            k.particle.to_string(),
            k.partner.to_string(),
            k.dv_norm.to_string(),
            k.wedge.to_string(),
            k.st_wedge.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
