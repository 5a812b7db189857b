use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Vector;

use super::{ParticleState, SimConfig};

/// A binary collision between particles `i < j` at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub t: f64,
    pub i: usize,
    pub j: usize,
    pub yi: Vector,
    pub yj: Vector,
    pub vi: Vector,
    pub vj: Vector,
    pub vi_post: Vector,
    pub vj_post: Vector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    QueueEmpty,
    TMaxReached,
}

/// Where an initial configuration came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    /// RNG algorithm identifier, recorded so logs can be regenerated.
    pub rng: Option<String>,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventLog {
    pub config: SimConfig,
    pub initial: Vec<ParticleState>,
    pub events: Vec<CollisionEvent>,
    pub termination: Termination,
    pub provenance: Option<Provenance>,
}

impl EventLog {
    pub fn dim(&self) -> usize {
        self.config.dim
    }

    /// Index of each particle id in `initial`.
    pub fn id_index(&self) -> std::collections::HashMap<usize, usize> {
        self.initial.iter().enumerate().map(|(k, s)| (s.id, k)).collect()
    }

    /// Velocities of all particles after the last logged event, in the
    /// order of `initial`.
    pub fn final_velocities(&self) -> Vec<Vector> {
        let index = self.id_index();
        let mut v: Vec<Vector> = self.initial.iter().map(|s| s.velocity.clone()).collect();
        for e in &self.events {
            v[index[&e.i]] = e.vi_post.clone();
            v[index[&e.j]] = e.vj_post.clone();
        }
        v
    }

    pub fn last_event_time(&self) -> Option<f64> {
        self.events.last().map(|e| e.t)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    kind: String,
    config: SimConfig,
    initial: Vec<ParticleState>,
    termination: Termination,
    event_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// Writes the JSONL form: a header line, then one collision per line.
///
/// Floats go through the shortest round-trip representation, so reading the
/// file back reproduces every bit.
pub fn write_event_log<W: Write>(log: &EventLog, mut out: W) -> Result<()> {
    let header = Header {
        kind: "header".into(),
        config: log.config.clone(),
        initial: log.initial.clone(),
        termination: log.termination,
        event_count: log.events.len(),
        provenance: log.provenance.clone(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for e in &log.events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_event_log<R: BufRead>(input: R) -> Result<EventLog> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::MalformedLog("empty input".into()))??;
    let header: Header = serde_json::from_str(&first)?;
    if header.kind != "header" {
        return Err(Error::MalformedLog(format!("unexpected header kind {:?}", header.kind)));
    }
    let mut events = Vec::with_capacity(header.event_count);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str::<CollisionEvent>(&line)?);
    }
    if events.len() != header.event_count {
        return Err(Error::MalformedLog(format!(
            "header announces {} events, found {}",
            header.event_count,
            events.len()
        )));
    }
    if events.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::MalformedLog("event times decrease".into()));
    }
    Ok(EventLog {
        config: header.config,
        initial: header.initial,
        events,
        termination: header.termination,
        provenance: header.provenance,
    })
}
