//! Event-driven dynamics of identical unit-mass hard spheres in free space.
//!
//! Particles move ballistically between binary elastic collisions. The
//! engine predicts exact contact times, processes them in `(time, i, j)`
//! order and records every collision in an [`EventLog`].

mod collision;
mod engine;
mod log;

pub use collision::{predict_pair_collision, resolve_collision};
pub use engine::run_simulation;
pub use log::{read_event_log, write_event_log, CollisionEvent, EventLog, Provenance, Termination};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{dist_sq, Vector};

/// One sphere: identity, kinematic state at `last_update_time`, and the
/// number of collisions it has taken part in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub id: usize,
    pub position: Vector,
    pub velocity: Vector,
    #[serde(default)]
    pub last_update_time: f64,
    #[serde(default)]
    pub collision_counter: u64,
}

impl ParticleState {
    pub fn new(id: usize, position: Vector, velocity: Vector) -> Self {
        ParticleState {
            id,
            position,
            velocity,
            last_update_time: 0.0,
            collision_counter: 0,
        }
    }

    /// Position at time `t` along the current free flight. No bookkeeping.
    pub fn position_at(&self, t: f64) -> Vector {
        let dt = t - self.last_update_time;
        Vector(
            self.position
                .0
                .iter()
                .zip(&self.velocity.0)
                .map(|(y, v)| y + dt * v)
                .collect(),
        )
    }
}

/// Numerical tolerances of the engine.
///
/// `grazing` is relative to the squared approach rate `b²` of a pair,
/// `overlap` is multiplied by `max(a, 1)`, `time_tie` is absolute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub grazing: f64,
    pub overlap: f64,
    pub time_tie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grazing: 1e-14,
            overlap: 1e-9,
            time_tie: 1e-12,
        }
    }
}

/// Broad-phase strategy used to find collision candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Cell lists for `n ∈ {2, 3}`, all pairs otherwise.
    #[default]
    Auto,
    AllPairs,
    CellList,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dim: usize,
    pub count: usize,
    pub radius: f64,
    /// `None` runs until no further collision is possible.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub backend: Backend,
}

impl SimConfig {
    pub fn new(dim: usize, count: usize, radius: f64) -> Self {
        SimConfig {
            dim,
            count,
            radius,
            t_max: None,
            tolerances: Tolerances::default(),
            backend: Backend::Auto,
        }
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = Some(t_max);
        self
    }

    pub fn overlap_tol(&self) -> f64 {
        self.tolerances.overlap * self.radius.max(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidArgument("particle count must be >= 1".into()));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid radius {}", self.radius)));
        }
        if self.radius == 0.0 && self.dim != 1 {
            return Err(Error::InvalidArgument(
                "radius 0 is only permitted in one dimension".into(),
            ));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument(format!("t_max must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    pub(crate) fn uses_cells(&self) -> bool {
        match self.backend {
            Backend::AllPairs => false,
            Backend::CellList => matches!(self.dim, 2 | 3),
            Backend::Auto => matches!(self.dim, 2 | 3),
        }
    }
}

/// Checks the standing assumptions on an initial configuration: consistent
/// dimensions, distinct ids and strictly separated spheres.
pub fn validate_configuration(states: &[ParticleState], config: &SimConfig) -> Result<()> {
    config.validate()?;
    if states.len() != config.count {
        return Err(Error::InvalidArgument(format!(
            "config declares {} particles, {} given",
            config.count,
            states.len()
        )));
    }
    let mut ids: Vec<usize> = states.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId(w[0]));
    }
    for s in states {
        s.position.check_dim(config.dim)?;
        s.velocity.check_dim(config.dim)?;
        if !s.position.is_finite() || !s.velocity.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "particle {} has non-finite components",
                s.id
            )));
        }
    }
    let contact = 2.0 * config.radius;
    for (k, a) in states.iter().enumerate() {
        for b in &states[k + 1..] {
            let t_ref = a.last_update_time.max(b.last_update_time);
            let pa = a.position_at(t_ref);
            let pb = b.position_at(t_ref);
            let d = dist_sq(&pa.0, &pb.0).sqrt();
            if d <= contact {
                let (i, j) = if a.id < b.id { (a.id, b.id) } else { (b.id, a.id) };
                return Err(Error::Overlap {
                    i,
                    j,
                    distance: d,
                    min_distance: contact,
                });
            }
        }
    }
    Ok(())
}

/// Moves a particle along its free flight to time `t`.
pub fn advance_free(state: &ParticleState, t: f64) -> Result<ParticleState> {
    if t < state.last_update_time {
        return Err(Error::TimeReversal {
            from: state.last_update_time,
            to: t,
        });
    }
    let mut next = state.clone();
    next.position = state.position_at(t);
    next.last_update_time = t;
    Ok(next)
}
