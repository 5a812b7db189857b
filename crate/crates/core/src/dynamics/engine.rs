use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::kernel::{dist_sq, Vector};

use super::collision::{contact_time, resolve_collision};
use super::{validate_configuration, CollisionEvent, EventLog, ParticleState, SimConfig, Termination};

/// Runs the event-driven simulation to completion (no further collision
/// possible) or to `t_max`.
///
/// A run is single-threaded and deterministic: both broad phases produce
/// the same log, bit for bit.
pub fn run_simulation(states: &[ParticleState], config: &SimConfig) -> Result<EventLog> {
    validate_configuration(states, config)?;
    let mut engine = Engine::new(states, config);
    let termination = engine.run()?;
    Ok(EventLog {
        config: config.clone(),
        initial: states.to_vec(),
        events: engine.events,
        termination,
        provenance: None,
    })
}

#[derive(Clone, Copy, Debug)]
struct Pending {
    time: f64,
    lo: usize,
    hi: usize,
    a: usize,
    b: usize,
    count_a: u64,
    count_b: u64,
}

impl Pending {
    fn key(&self) -> (usize, usize, usize, usize, u64, u64) {
        (self.lo, self.hi, self.a, self.b, self.count_a, self.count_b)
    }
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| self.key().cmp(&other.key()))
    }
}

#[derive(Clone, Copy, Debug)]
struct Crossing {
    time: f64,
    p: usize,
    count: u64,
    axis: usize,
    step: i64,
}

impl PartialEq for Crossing {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Crossing {}
impl PartialOrd for Crossing {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Crossing {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| (self.p, self.count, self.axis).cmp(&(other.p, other.count, other.axis)))
    }
}

type CellKey = [i64; 3];

/// Unbounded uniform grid keyed by integer cell coordinates. Cell edges are
/// at least one contact distance long, so touching spheres always sit in
/// adjacent cells.
struct CellGrid {
    dim: usize,
    size: f64,
    cells: HashMap<CellKey, Vec<usize>>,
    cell_of: Vec<CellKey>,
}

impl CellGrid {
    fn new(states: &[ParticleState], dim: usize, radius: f64) -> Self {
        let n = states.len() as f64;
        let mut volume = 1.0;
        for k in 0..dim {
            let (lo, hi) = states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.position[k]), hi.max(s.position[k]))
            });
            volume *= hi - lo + 2.0 * radius;
        }
        let spacing = (volume / n).powf(1.0 / dim as f64);
        let size = (2.0 * radius * 1.001).max(spacing);
        let mut grid = CellGrid {
            dim,
            size,
            cells: HashMap::new(),
            cell_of: Vec::with_capacity(states.len()),
        };
        for (p, s) in states.iter().enumerate() {
            let mut key = [0i64; 3];
            for k in 0..dim {
                key[k] = (s.position[k] / size).floor() as i64;
            }
            grid.cell_of.push(key);
            grid.cells.entry(key).or_default().push(p);
        }
        grid
    }

    fn neighbors(&self, p: usize, out: &mut Vec<usize>) {
        out.clear();
        let center = self.cell_of[p];
        let span = 3usize.pow(self.dim as u32);
        for code in 0..span {
            let mut key = center;
            let mut c = code;
            for k in 0..self.dim {
                key[k] += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(members) = self.cells.get(&key) {
                out.extend(members.iter().copied().filter(|&q| q != p));
            }
        }
    }

    fn shift(&mut self, p: usize, axis: usize, step: i64) {
        let old = self.cell_of[p];
        if let Some(members) = self.cells.get_mut(&old) {
            members.retain(|&q| q != p);
            if members.is_empty() {
                self.cells.remove(&old);
            }
        }
        let mut key = old;
        key[axis] += step;
        self.cell_of[p] = key;
        self.cells.entry(key).or_default().push(p);
    }
}

struct Engine<'c> {
    config: &'c SimConfig,
    states: Vec<ParticleState>,
    queue: BinaryHeap<Reverse<Pending>>,
    crossings: BinaryHeap<Reverse<Crossing>>,
    grid: Option<CellGrid>,
    now: f64,
    events: Vec<CollisionEvent>,
    scratch: Vec<usize>,
}

impl<'c> Engine<'c> {
    fn new(states: &[ParticleState], config: &'c SimConfig) -> Self {
        let grid = config
            .uses_cells()
            .then(|| CellGrid::new(states, config.dim, config.radius));
        let now = states
            .iter()
            .map(|s| s.last_update_time)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut engine = Engine {
            config,
            states: states.to_vec(),
            queue: BinaryHeap::new(),
            crossings: BinaryHeap::new(),
            grid,
            now,
            events: Vec::new(),
            scratch: Vec::new(),
        };
        if engine.grid.is_some() {
            for p in 0..engine.states.len() {
                engine.candidates(p);
                let found = std::mem::take(&mut engine.scratch);
                for &q in found.iter().filter(|&&q| q > p) {
                    engine.predict(p, q);
                }
                engine.scratch = found;
                engine.schedule_crossing(p);
            }
        } else {
            engine.predict_all_pairs();
        }
        engine
    }

    fn run(&mut self) -> Result<Termination> {
        let t_max = self.config.t_max.unwrap_or(f64::INFINITY);
        loop {
            while let Some(Reverse(top)) = self.queue.peek() {
                if self.is_current(top) {
                    break;
                }
                self.queue.pop();
            }
            while let Some(Reverse(top)) = self.crossings.peek() {
                if self.states[top.p].collision_counter == top.count {
                    break;
                }
                self.crossings.pop();
            }

            let Some(&Reverse(next)) = self.queue.peek() else {
                // The cell broad phase only sees neighbours; confirm globally
                // that nothing is left before stopping.
                if self.grid.is_some() && self.predict_all_pairs() {
                    continue;
                }
                return Ok(Termination::QueueEmpty);
            };

            if let Some(&Reverse(cross)) = self.crossings.peek() {
                if cross.time <= next.time {
                    if cross.time > t_max {
                        return Ok(Termination::TMaxReached);
                    }
                    self.crossings.pop();
                    self.cross_cell(cross);
                    continue;
                }
            }
            if next.time > t_max {
                return Ok(Termination::TMaxReached);
            }
            self.queue.pop();
            self.collide(next)?;
        }
    }

    fn is_current(&self, e: &Pending) -> bool {
        self.states[e.a].collision_counter == e.count_a
            && self.states[e.b].collision_counter == e.count_b
    }

    fn candidates(&mut self, p: usize) {
        match &self.grid {
            Some(grid) => grid.neighbors(p, &mut self.scratch),
            None => {
                self.scratch.clear();
                self.scratch.extend((0..self.states.len()).filter(|&q| q != p));
            }
        }
    }

    fn predict(&mut self, p: usize, q: usize) {
        let (sp, sq) = (&self.states[p], &self.states[q]);
        let t_ref = sp.last_update_time.max(sq.last_update_time);
        if let Some(t) = contact_time(sp, sq, self.config.radius, t_ref, self.config.tolerances.grazing) {
            let (lo, hi) = if sp.id < sq.id { (sp.id, sq.id) } else { (sq.id, sp.id) };
            self.queue.push(Reverse(Pending {
                time: t.max(self.now),
                lo,
                hi,
                a: p.min(q),
                b: p.max(q),
                count_a: self.states[p.min(q)].collision_counter,
                count_b: self.states[p.max(q)].collision_counter,
            }));
        }
    }

    fn predict_all_pairs(&mut self) -> bool {
        let before = self.queue.len();
        for p in 0..self.states.len() {
            for q in (p + 1)..self.states.len() {
                self.predict(p, q);
            }
        }
        self.queue.len() > before
    }

    fn schedule_crossing(&mut self, p: usize) {
        let Some(grid) = &self.grid else { return };
        let s = &self.states[p];
        let key = grid.cell_of[p];
        let mut best: Option<Crossing> = None;
        for axis in 0..grid.dim {
            let v = s.velocity[axis];
            if v == 0.0 {
                continue;
            }
            let (boundary, step) = if v > 0.0 {
                ((key[axis] + 1) as f64 * grid.size, 1)
            } else {
                (key[axis] as f64 * grid.size, -1)
            };
            let t = (s.last_update_time + (boundary - s.position[axis]) / v).max(self.now);
            if best.is_none_or(|b| t < b.time) {
                best = Some(Crossing {
                    time: t,
                    p,
                    count: s.collision_counter,
                    axis,
                    step,
                });
            }
        }
        if let Some(c) = best {
            self.crossings.push(Reverse(c));
        }
    }

    fn cross_cell(&mut self, c: Crossing) {
        self.now = self.now.max(c.time);
        if let Some(grid) = self.grid.as_mut() {
            grid.shift(c.p, c.axis, c.step);
        }
        self.candidates(c.p);
        let found = std::mem::take(&mut self.scratch);
        for &q in &found {
            self.predict(c.p, q);
        }
        self.scratch = found;
        self.schedule_crossing(c.p);
    }

    fn collide(&mut self, e: Pending) -> Result<()> {
        let t = e.time;
        self.now = t;
        let (pi, pj) = if self.states[e.a].id == e.lo { (e.a, e.b) } else { (e.b, e.a) };
        let dim = self.config.dim;
        let radius = self.config.radius;
        let tol = self.config.overlap_tol();

        let yi = self.states[pi].position_at(t);
        let mut yj = self.states[pj].position_at(t);
        let dist = dist_sq(&yi.0, &yj.0).sqrt();
        if dist < 2.0 * radius - tol || dist > 2.0 * radius + tol {
            return Err(Error::Overlap {
                i: e.lo,
                j: e.hi,
                distance: dist,
                min_distance: 2.0 * radius,
            });
        }
        let vi = self.states[pi].velocity.clone();
        let vj = self.states[pj].velocity.clone();
        let u_hat = if dim == 1 {
            Vector(vec![if vj[0] < vi[0] { 1.0 } else { -1.0 }])
        } else {
            Vector(yj.0.iter().zip(&yi.0).map(|(b, a)| (b - a) / dist).collect())
        };
        if dim == 1 && radius == 0.0 {
            yj = yi.clone();
        }
        let (vi_post, vj_post) = resolve_collision(&vi, &vj, &u_hat)?;

        self.check_binary(pi, pj, t, &yi, &yj)?;

        for (p, y, v) in [(pi, &yi, &vi_post), (pj, &yj, &vj_post)] {
            let s = &mut self.states[p];
            s.position = y.clone();
            s.velocity = v.clone();
            s.last_update_time = t;
            s.collision_counter += 1;
        }
        self.events.push(CollisionEvent {
            t,
            i: e.lo,
            j: e.hi,
            yi,
            yj,
            vi,
            vj,
            vi_post,
            vj_post,
        });

        for (p, partner) in [(pi, pj), (pj, pi)] {
            self.candidates(p);
            let found = std::mem::take(&mut self.scratch);
            for &q in found.iter().filter(|&&q| q != partner) {
                self.predict(p, q);
            }
            self.scratch = found;
            self.schedule_crossing(p);
        }
        Ok(())
    }

    /// Rejects a third sphere touching either participant at the collision
    /// instant (within the time-tie tolerance).
    fn check_binary(&mut self, pi: usize, pj: usize, t: f64, yi: &Vector, yj: &Vector) -> Result<()> {
        let contact = 2.0 * self.config.radius;
        let tol = self.config.overlap_tol();
        let tie = self.config.tolerances.time_tie;
        for (p, y) in [(pi, yi), (pj, yj)] {
            self.candidates(p);
            for &k in &self.scratch {
                if k == pi || k == pj {
                    continue;
                }
                let sk = &self.states[k];
                let yk = sk.position_at(t);
                let rel = dist_sq(&sk.velocity.0, &self.states[p].velocity.0).sqrt();
                if dist_sq(&yk.0, &y.0).sqrt() <= contact + tol + tie * rel {
                    let mut ids = vec![self.states[pi].id, self.states[pj].id, sk.id];
                    ids.sort_unstable();
                    return Err(Error::Genericity { time: t, ids });
                }
            }
        }
        Ok(())
    }
}
