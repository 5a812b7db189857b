//! Scenario generators, frame transformations, single experiments and
//! parameter sweeps.
//!
//! Every generator is a pure function of its parameters and seed. Random
//! draws come from ChaCha8, whose output is fixed across platforms, and the
//! generator name, seed and RNG are stored in the event log header.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    run_simulation, validate_configuration, write_event_log, Backend, EventLog, ParticleState, Provenance, SimConfig,
    Tolerances,
};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::kernel::{dist_sq, Vector};
use crate::ledger::{self, build_ledger, write_ledger_csv, Report};
use crate::tensor::{self, TensorAudit};

pub const RNG_NAME: &str = "ChaCha8";

const MAX_PLACEMENT_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SimConfig,
    pub initial: Vec<ParticleState>,
    pub provenance: Provenance,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        validate_configuration(&self.initial, &self.config)
    }

    pub fn run(&self) -> Result<EventLog> {
        let mut log = run_simulation(&self.initial, &self.config)?;
        log.provenance = Some(self.provenance.clone());
        Ok(log)
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.config.backend = backend;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocityDist {
    /// Independent `N(0, σ²)` components.
    Maxwell { sigma: f64 },
    /// Independent components uniform on `[−v0, v0]`.
    Uniform { v0: f64 },
    Explicit { velocities: Vec<Vec<f64>> },
}

impl Default for VelocityDist {
    fn default() -> Self {
        VelocityDist::Maxwell { sigma: 1.0 }
    }
}

/// Uniform non-overlapping spheres with centers in `[a, L − a]^n`.
pub fn gen_random_gas(
    dim: usize,
    count: usize,
    box_side: f64,
    radius: f64,
    velocities: &VelocityDist,
    seed: u64,
) -> Result<Scenario> {
    let config = SimConfig::new(dim, count, radius);
    config.validate()?;
    if !(box_side > 0.0 && box_side.is_finite()) {
        return Err(Error::InvalidArgument(format!("box side must be > 0, got {box_side}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (radius, box_side - radius);
    if hi < lo {
        return Err(Error::Packing {
            placed: 0,
            requested: count,
            attempts: 0,
        });
    }
    let min_sq = {
        let m = 2.0 * radius + config.overlap_tol();
        m * m
    };
    let mut positions: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut attempts = 0;
    while positions.len() < count {
        if attempts == MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::Packing {
                placed: positions.len(),
                requested: count,
                attempts,
            });
        }
        attempts += 1;
        let candidate: Vec<f64> = (0..dim)
            .map(|_| if hi > lo { rng.random_range(lo..hi) } else { lo })
            .collect();
        if positions.iter().all(|p| dist_sq(p, &candidate) > min_sq) {
            positions.push(candidate);
        }
    }

    let vels: Vec<Vec<f64>> = match velocities {
        VelocityDist::Maxwell { sigma } => {
            let normal = Normal::new(0.0, *sigma)
                .map_err(|e| Error::InvalidArgument(format!("maxwell sigma {sigma}: {e}")))?;
            (0..count).map(|_| (0..dim).map(|_| normal.sample(&mut rng)).collect()).collect()
        }
        VelocityDist::Uniform { v0 } => {
            if !(*v0 > 0.0 && v0.is_finite()) {
                return Err(Error::InvalidArgument(format!("uniform v0 must be > 0, got {v0}")));
            }
            (0..count)
                .map(|_| (0..dim).map(|_| rng.random_range(-v0..*v0)).collect())
                .collect()
        }
        VelocityDist::Explicit { velocities } => {
            if velocities.len() != count {
                return Err(Error::InvalidArgument(format!(
                    "{} explicit velocities for {count} particles",
                    velocities.len()
                )));
            }
            velocities.clone()
        }
    };

    let initial = positions
        .into_iter()
        .zip(vels)
        .enumerate()
        .map(|(id, (y, v))| ParticleState::new(id, Vector(y), Vector(v)))
        .collect();
    let scenario = Scenario {
        config,
        initial,
        provenance: Provenance {
            generator: "random_gas".into(),
            seed: Some(seed),
            rng: Some(RNG_NAME.into()),
            params: serde_json::json!({
                "dim": dim,
                "count": count,
                "box_side": box_side,
                "radius": radius,
                "velocities": velocities,
            }),
        },
    };
    scenario.validate()?;
    Ok(scenario)
}

/// `2p` point particles on a line: right-movers at `−p..−1`, left-movers at
/// `1..p`, unit speeds. Every pair crosses once, `p²` collisions in total.
pub fn gen_line_1d(p: usize) -> Result<Scenario> {
    if p == 0 {
        return Err(Error::InvalidArgument("p must be >= 1".into()));
    }
    let initial = (0..2 * p)
        .map(|k| {
            let (y, v) = if k < p {
                (-((p - k) as f64), 1.0)
            } else {
                ((k - p + 1) as f64, -1.0)
            };
            ParticleState::new(k, Vector(vec![y]), Vector(vec![v]))
        })
        .collect();
    Ok(Scenario {
        config: SimConfig::new(1, 2 * p, 0.0),
        initial,
        provenance: Provenance {
            generator: "line_1d".into(),
            seed: None,
            rng: None,
            params: serde_json::json!({ "p": p }),
        },
    })
}

fn annotate(provenance: &mut Provenance, key: &str, value: serde_json::Value) {
    if !provenance.params.is_object() {
        provenance.params = serde_json::json!({});
    }
    provenance.params[key] = value;
}

/// Galilean boost: `v ↦ v + w0` for every particle.
pub fn apply_boost(scenario: &Scenario, w0: &Vector) -> Result<Scenario> {
    w0.check_dim(scenario.config.dim)?;
    let mut out = scenario.clone();
    for s in &mut out.initial {
        s.velocity = &s.velocity + w0;
    }
    annotate(&mut out.provenance, "boost", serde_json::json!(w0));
    Ok(out)
}

/// Time rescaling `X_μ(t) = X(μt)`: velocities times `μ`, `t_max` over `μ`.
pub fn apply_time_scale(scenario: &Scenario, mu: f64) -> Result<Scenario> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!("time scale must be > 0, got {mu}")));
    }
    let mut out = scenario.clone();
    for s in &mut out.initial {
        s.velocity = s.velocity.scale(mu);
    }
    out.config.t_max = out.config.t_max.map(|t| t / mu);
    annotate(&mut out.provenance, "time_scale", serde_json::json!(mu));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpec {
    #[serde(default)]
    pub id: Option<usize>,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// How an experiment obtains its initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    RandomGas {
        dim: usize,
        count: usize,
        box_side: f64,
        radius: f64,
        #[serde(default)]
        velocities: VelocityDist,
        #[serde(default)]
        seed: u64,
    },
    #[serde(rename = "line_1d")]
    Line1d {
        p: usize,
    },
    Explicit {
        dim: usize,
        radius: f64,
        particles: Vec<ParticleSpec>,
    },
}

impl ScenarioSpec {
    pub fn build(&self) -> Result<Scenario> {
        match self {
            ScenarioSpec::RandomGas {
                dim,
                count,
                box_side,
                radius,
                velocities,
                seed,
            } => gen_random_gas(*dim, *count, *box_side, *radius, velocities, *seed),
            ScenarioSpec::Line1d { p } => gen_line_1d(*p),
            ScenarioSpec::Explicit { dim, radius, particles } => {
                let initial: Vec<ParticleState> = particles
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        ParticleState::new(p.id.unwrap_or(k), Vector(p.position.clone()), Vector(p.velocity.clone()))
                    })
                    .collect();
                Ok(Scenario {
                    config: SimConfig::new(*dim, initial.len(), *radius),
                    initial,
                    provenance: Provenance {
                        generator: "explicit".into(),
                        seed: None,
                        rng: None,
                        params: serde_json::Value::Null,
                    },
                })
            }
        }
    }
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_slices() -> usize {
    10
}

/// The `simulate` configuration document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub boost: Option<Vec<f64>>,
    #[serde(default)]
    pub time_scale: Option<f64>,
    /// Strong/weak kink threshold as a fraction of `v̄`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Number of random slice times in the tensor audit.
    #[serde(default = "default_slices")]
    pub audit_slices: usize,
}

impl ExperimentConfig {
    pub fn new(scenario: ScenarioSpec) -> Self {
        ExperimentConfig {
            scenario,
            t_max: None,
            backend: Backend::Auto,
            tolerances: Tolerances::default(),
            boost: None,
            time_scale: None,
            epsilon: default_epsilon(),
            audit_slices: default_slices(),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        let mut s = self.scenario.build()?;
        s.config.t_max = self.t_max;
        s.config.backend = self.backend;
        s.config.tolerances = self.tolerances.clone();
        if let Some(w) = &self.boost {
            s = apply_boost(&s, &Vector(w.clone()))?;
        }
        if let Some(mu) = self.time_scale {
            s = apply_time_scale(&s, mu)?;
        }
        s.validate()?;
        Ok(s)
    }
}

/// Default audit window: from the initial time to one unit past the last
/// collision.
pub fn default_window(log: &EventLog) -> (f64, f64) {
    let t0 = log
        .initial
        .iter()
        .map(|s| s.last_update_time)
        .fold(0.0f64, f64::max);
    let end = log.last_event_time().unwrap_or(t0).max(t0) + 1.0;
    (t0, end)
}

/// `k` uniform times in the open window, kept away from collision instants.
pub fn random_slice_times(log: &EventLog, window: (f64, f64), k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-9 * window.1.abs().max(1.0);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let t = rng.random_range(window.0..window.1);
        if t > window.0 && log.events.iter().all(|e| (e.t - t).abs() > tol) {
            out.push(t);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

pub fn audit_log(log: &EventLog, window: Option<(f64, f64)>, slices: usize, seed: u64) -> Result<TensorAudit> {
    let window = window.unwrap_or_else(|| default_window(log));
    let times = random_slice_times(log, window, slices, seed);
    tensor::audit(log, window, &times)
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub log: EventLog,
    pub report: Report,
    pub audit: TensorAudit,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

/// Writes `events.jsonl`, `ledger.csv`, `report.json` and `audit.json`.
pub fn write_artifacts(out_dir: &Path, log: &EventLog, report: &Report, audit: &TensorAudit) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    write_event_log(log, create(&out_dir.join("events.jsonl"))?)?;
    write_ledger_csv(&build_ledger(log), create(&out_dir.join("ledger.csv"))?)?;
    write_json(&out_dir.join("report.json"), report)?;
    write_json(&out_dir.join("audit.json"), audit)?;
    Ok(())
}

pub fn run_experiment(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentOutcome> {
    if !(config.epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {}", config.epsilon)));
    }
    let scenario = config.scenario()?;
    let log = scenario.run()?;
    let report = ledger::report(&log, config.epsilon)?;
    let audit = audit_log(&log, None, config.audit_slices, scenario.provenance.seed.unwrap_or(0))?;
    if let Some(dir) = out_dir {
        write_artifacts(dir, &log, &report, &audit)?;
    }
    Ok(ExperimentOutcome { log, report, audit })
}

/// The family a sweep draws its scenarios from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepFamily {
    /// Random gas at fixed number density: box side `(N/ρ)^{1/n}`.
    RandomGas {
        dim: usize,
        radius: f64,
        density: f64,
        #[serde(default)]
        velocities: VelocityDist,
    },
    /// Line scenarios; `N` must be even and `p = N/2`.
    #[serde(rename = "line_1d")]
    Line1d,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_values: Vec<usize>,
    pub seeds: usize,
    #[serde(default)]
    pub seed_base: u64,
    pub family: SweepFamily,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Also write every run's artifacts under `runs/N{N}_seed{s}/`.
    #[serde(default)]
    pub keep_runs: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return Err(Error::InvalidArgument("sweep N values must all be >= 2".into()));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidArgument("sweep needs at least one seed".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if let SweepFamily::Line1d = self.family {
            if let Some(n) = self.n_values.iter().find(|&&n| n % 2 == 1) {
                return Err(Error::InvalidArgument(format!("line sweep needs even N, got {n}")));
            }
        }
        Ok(())
    }

    /// The `(N, seed)` grid, sorted.
    pub fn grid(&self) -> Vec<(usize, u64)> {
        let mut ns = self.n_values.clone();
        ns.sort_unstable();
        ns.dedup();
        let seeds = match self.family {
            SweepFamily::Line1d => 1,
            SweepFamily::RandomGas { .. } => self.seeds as u64,
        };
        ns.into_iter()
            .flat_map(|n| (0..seeds).map(move |k| (n, k)))
            .map(|(n, k)| (n, self.seed_base + k))
            .collect()
    }

    pub fn scenario(&self, n: usize, seed: u64) -> Result<Scenario> {
        let mut s = match &self.family {
            SweepFamily::RandomGas {
                dim,
                radius,
                density,
                velocities,
            } => {
                if !(*density > 0.0) {
                    return Err(Error::InvalidArgument(format!("density must be > 0, got {density}")));
                }
                let side = (n as f64 / density).powf(1.0 / *dim as f64);
                gen_random_gas(*dim, n, side, *radius, velocities, seed)?
            }
            SweepFamily::Line1d => gen_line_1d(n / 2)?,
        };
        s.config.backend = self.backend;
        s.config.t_max = self.t_max;
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub events: usize,
    pub v_bar: f64,
    pub ratio1: Option<f64>,
    pub ratio2: Option<f64>,
    pub ratio_st: f64,
    pub strong_count: usize,
    pub weak_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGroup {
    #[serde(rename = "N")]
    pub n: usize,
    pub runs: usize,
    pub median_ratio1: Option<f64>,
    pub median_ratio2: Option<f64>,
    pub median_ratio_st: Option<f64>,
    pub median_events: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub groups: Vec<SweepGroup>,
    /// `max_N median(ratio₁) / min_N median(ratio₁)`.
    pub ratio1_spread: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepRun {
    pub n: usize,
    pub seed: u64,
    pub log: EventLog,
    pub report: Report,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Thread cap from `KINKBOUND_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("KINKBOUND_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every `(N, seed)` of the grid, one simulation per worker. Results
/// are in grid order whatever the execution mode.
pub fn sweep_runs(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRun>> {
    spec.validate()?;
    let grid = spec.grid();
    let results = exec::with_threads(threads_from_env(), || {
        exec::map(&grid, exec, |&(n, seed)| -> Result<SweepRun> {
            let context = |e: Error| Error::InvalidArgument(format!("run N={n} seed={seed}: {e}"));
            let log = spec.scenario(n, seed).and_then(|s| s.run()).map_err(context)?;
            let report = ledger::report(&log, spec.epsilon).map_err(context)?;
            Ok(SweepRun { n, seed, log, report })
        })
    });
    results.into_iter().collect()
}

pub fn sweep_row(run: &SweepRun) -> SweepRow {
    SweepRow {
        n: run.n,
        seed: run.seed,
        events: run.log.events.len(),
        v_bar: run.report.v_bar,
        ratio1: run.report.ratio1,
        ratio2: run.report.ratio2,
        ratio_st: run.report.ratio_st,
        strong_count: run.report.strong_count,
        weak_count: run.report.weak_count,
    }
}

pub fn summarize_sweep(rows: &[SweepRow]) -> SweepSummary {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    let groups: Vec<SweepGroup> = ns
        .into_iter()
        .map(|n| {
            let g: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
            let pick = |f: &dyn Fn(&SweepRow) -> Option<f64>| median(&g.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
            SweepGroup {
                n,
                runs: g.len(),
                median_ratio1: pick(&|r| r.ratio1),
                median_ratio2: pick(&|r| r.ratio2),
                median_ratio_st: pick(&|r| Some(r.ratio_st)),
                median_events: pick(&|r| Some(r.events as f64)),
            }
        })
        .collect();
    let medians: Vec<f64> = groups.iter().filter_map(|g| g.median_ratio1).collect();
    let ratio1_spread = if medians.len() == groups.len() && !medians.is_empty() {
        let max = medians.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = medians.iter().cloned().fold(f64::INFINITY, f64::min);
        (min > 0.0).then(|| max / min)
    } else {
        None
    };
    SweepSummary { groups, ratio1_spread }
}

pub fn write_ratios_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs a sweep and writes `ratios.csv`, `summary.json` and one
/// `report_N{N}.json` per particle count under `out_dir`.
pub fn sweep(spec: &SweepSpec, exec: Execution, out_dir: Option<&Path>) -> Result<(Vec<SweepRow>, SweepSummary)> {
    let runs = sweep_runs(spec, exec)?;
    let rows: Vec<SweepRow> = runs.iter().map(sweep_row).collect();
    let summary = summarize_sweep(&rows);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_ratios_csv(&rows, create(&dir.join("ratios.csv"))?)?;
        write_json(&dir.join("summary.json"), &summary)?;
        for g in &summary.groups {
            let reports: Vec<serde_json::Value> = runs
                .iter()
                .filter(|r| r.n == g.n)
                .map(|r| serde_json::json!({ "seed": r.seed, "report": r.report }))
                .collect();
            write_json(
                &dir.join(format!("report_N{}.json", g.n)),
                &serde_json::json!({ "summary": g, "runs": reports }),
            )?;
        }
        if spec.keep_runs {
            for r in &runs {
                let audit = audit_log(&r.log, None, default_slices(), r.seed)?;
                write_artifacts(
                    &dir.join("runs").join(format!("N{}_seed{}", r.n, r.seed)),
                    &r.log,
                    &r.report,
                    &audit,
                )?;
            }
        }
    }
    Ok((rows, summary))
}

/// Comparison of a run with its time-rescaled copy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleCheck {
    pub mu: f64,
    pub events: usize,
    pub events_scaled: usize,
    pub partners_match: bool,
    /// Largest `|μ t_μ − t| / max(t, 1)`.
    pub max_time_error: f64,
    /// Largest `| |δv_μ| − μ|δv| | / (μ|δv|)`.
    pub max_dv_error: f64,
    pub mass_ratio: f64,
    /// `E_μ / E`, expected `μ²`.
    pub energy_ratio: f64,
    pub ratio1: Option<f64>,
    pub ratio1_scaled: Option<f64>,
    pub pass: bool,
}

pub fn scale_check(scenario: &Scenario, mu: f64, epsilon: f64) -> Result<ScaleCheck> {
    let scaled = apply_time_scale(scenario, mu)?;
    let (a, b) = (scenario.run()?, scaled.run()?);
    let (ra, rb) = (ledger::report(&a, epsilon)?, ledger::report(&b, epsilon)?);
    let partners_match = a.events.len() == b.events.len()
        && a.events.iter().zip(&b.events).all(|(x, y)| (x.i, x.j) == (y.i, y.j));
    let mut max_time_error: f64 = 0.0;
    let mut max_dv_error: f64 = 0.0;
    if partners_match {
        for (x, y) in a.events.iter().zip(&b.events) {
            max_time_error = max_time_error.max((mu * y.t - x.t).abs() / x.t.abs().max(1.0));
            let dv = (&x.vi_post - &x.vi).norm();
            let dv_mu = (&y.vi_post - &y.vi).norm();
            if dv > 0.0 {
                max_dv_error = max_dv_error.max((dv_mu - mu * dv).abs() / (mu * dv));
            }
        }
    }
    let energy_ratio = if ra.energy > 0.0 { rb.energy / ra.energy } else { 1.0 };
    let rel = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => (x - y).abs() <= 1e-10 * x.abs().max(1e-300),
        (None, None) => true,
        _ => false,
    };
    let pass = partners_match
        && max_time_error <= 1e-10
        && max_dv_error <= 1e-10
        && rb.mass == ra.mass
        && (ra.energy == 0.0 || (energy_ratio - mu * mu).abs() <= 1e-10 * mu * mu)
        && rel(ra.ratio1, rb.ratio1);
    Ok(ScaleCheck {
        mu,
        events: a.events.len(),
        events_scaled: b.events.len(),
        partners_match,
        max_time_error,
        max_dv_error,
        mass_ratio: rb.mass / ra.mass,
        energy_ratio,
        ratio1: ra.ratio1,
        ratio1_scaled: rb.ratio1,
        pass,
    })
}
