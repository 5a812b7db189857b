//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so
//! the lines show up in `cargo test` output; exits non-zero on any FAIL.

mod common;

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::{Duration, Instant};

use common::*;
use kinkbound::detmass::{
    closure_gap, dm_closed_formula, dm_kink, dm_triple, enclosed_area, polygon_from_measure, support_function,
    AngularMeasure, Convention,
};
use kinkbound::dynamics::{run_simulation, write_event_log, Backend, EventLog};
use kinkbound::exec::Execution;
use kinkbound::harness::{
    apply_boost, apply_time_scale, audit_log, gen_line_1d, gen_random_gas, sweep_row, sweep_runs, summarize_sweep,
    SweepFamily, SweepRun, SweepSpec, VelocityDist,
};
use kinkbound::kernel::{SpaceTimeVec, Vector};
use kinkbound::ledger::{bound_report, build_ledger, bulk_invariants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn velocities(log: &EventLog) -> (Vec<Vector>, Vec<Vector>) {
    (log.initial.iter().map(|s| s.velocity.clone()).collect(), log.final_velocities())
}

fn conservation() -> Outcome {
    let start = Instant::now();
    let s = gen_random_gas(2, 64, 1.0, 0.01, &VelocityDist::Maxwell { sigma: 1.0 }, 0).unwrap();
    let log = s.run().unwrap();
    let elapsed = start.elapsed();
    let (v0, v1) = velocities(&log);
    let drift_e = rel(total_energy(&v0), total_energy(&v1), 1e-300);
    let vbar = rms_speed(&v0);
    let drift_p = total_momentum(&v0)
        .iter()
        .zip(total_momentum(&v1))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let bound_p = 1e-12 * 64.0 * vbar;
    outcome(
        drift_e <= 1e-9 && drift_p <= bound_p && secs(elapsed) < 10.0,
        format!(
            "events={} energy_drift={drift_e:.2e} (<=1e-9) momentum_drift={drift_p:.2e} (<={bound_p:.2e}) runtime={:.3}s (<10s)",
            log.events.len(),
            secs(elapsed)
        ),
    )
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1usize, 5, 50] {
        let log = gen_line_1d(p).unwrap().run().unwrap();
        let n = (2 * p) as f64;
        let ledger = build_ledger(&log);
        let total: f64 = ledger.iter().map(|k| k.dv_norm).sum();
        let inv = bulk_invariants(&log.initial).unwrap();
        let ratio2 = bound_report(&ledger, &inv, 2 * p).ratio2.unwrap_or(f64::NAN);
        let ok = log.events.len() == p * p && rel(total, n * n, 1e-300) <= 1e-12 && (ratio2 - 1.0).abs() <= 1e-12;
        pass &= ok;
        parts.push(format!("p={p}: collisions={} sum_ell={total} ratio2={ratio2}", log.events.len()));
    }
    let elapsed = start.elapsed();
    pass &= secs(elapsed) < 1.0;
    outcome(pass, format!("{} runtime={:.3}s (<1s)", parts.join("; "), secs(elapsed)))
}

fn sweep_spec() -> SweepSpec {
    SweepSpec {
        n_values: vec![8, 16, 32, 64, 128],
        seeds: 20,
        seed_base: 0,
        family: SweepFamily::RandomGas {
            dim: 2,
            radius: 0.01,
            density: 64.0,
            velocities: VelocityDist::Maxwell { sigma: 1.0 },
        },
        epsilon: 0.1,
        backend: Backend::Auto,
        t_max: None,
        keep_runs: false,
    }
}

fn boundedness(runs: &[SweepRun], elapsed: Duration) -> Outcome {
    let rows: Vec<_> = runs.iter().map(sweep_row).collect();
    let summary = summarize_sweep(&rows);
    let medians: Vec<String> = summary
        .groups
        .iter()
        .map(|g| format!("N={}:{:.4}", g.n, g.median_ratio1.unwrap_or(f64::NAN)))
        .collect();
    let spread = summary.ratio1_spread.unwrap_or(f64::INFINITY);
    outcome(
        spread <= 3.0 && secs(elapsed) < 300.0,
        format!(
            "median ratio1 {} max/min={spread:.3} (<=3) runs={} runtime={:.2}s (<300s)",
            medians.join(" "),
            runs.len(),
            secs(elapsed)
        ),
    )
}

fn tensor_audit(runs: &[SweepRun]) -> Outcome {
    let mut worst_balance: f64 = 0.0;
    let mut worst_align: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    let mut worst_bound: f64 = f64::NEG_INFINITY;
    let mut vertices = 0;
    for r in runs {
        let audit = audit_log(&r.log, None, 10, r.seed).unwrap();
        vertices += audit.interior_vertex_count;
        worst_balance = worst_balance.max(audit.max_relative_balance);
        worst_align = worst_align.max(audit.colliton_max_misalignment);
        let m0 = &audit.trace_masses[0];
        for m in &audit.trace_masses {
            worst_mass = worst_mass.max((m.mass - m0.mass).abs());
            for (a, b) in m.momentum.iter().zip(&m0.momentum) {
                worst_mass = worst_mass.max((a - b).abs());
            }
            worst_bound = worst_bound.max(m.total_variation.max(m.mass) - audit.mass_plus_energy);
        }
    }
    outcome(
        worst_balance <= 1e-12 && worst_align <= 1e-10 && worst_mass <= 1e-12 * 128.0 && worst_bound <= 1e-12,
        format!(
            "logs={} interior_vertices={vertices} max_balance/weight={worst_balance:.2e} (<=1e-12) \
             colliton_misalignment={worst_align:.2e} (<=1e-10) slice_mass_variation={worst_mass:.2e} \
             max(trace - (M+E))={worst_bound:.3e} (<=1e-12)",
            runs.len()
        ),
    )
}

fn determinantal_mass() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_closure: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_jump: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.random_range(3..=12);
        let draws: Vec<f64> = (0..2 * k).map(|_| rng.random::<f64>()).collect();
        let mu = AngularMeasure::from_pairs(&balanced_measure(k, &draws)).unwrap();
        let poly = polygon_from_measure(&mu).unwrap();
        worst_closure = worst_closure.max(closure_gap(&mu) / poly.perimeter());
        let area = enclosed_area(&poly).unwrap();
        let dm = dm_closed_formula(&mu).unwrap();
        worst_ratio = worst_ratio.max(rel(area, 2.0 * dm, 1e-300));
        let mut angles: Vec<f64> = mu.atoms.iter().map(|a| a.angle).collect();
        angles.sort_by(f64::total_cmp);
        let gap = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain([angles[0] + TAU - angles[k - 1]])
            .fold(f64::INFINITY, f64::min);
        let h = (1e-5f64).min(gap / 4.0);
        for a in &mu.atoms {
            let p = |phi: f64| support_function(&poly, phi);
            let s = a.angle;
            let right = (-3.0 * p(s) + 4.0 * p(s + h) - p(s + 2.0 * h)) / (2.0 * h);
            let left = (3.0 * p(s) - 4.0 * p(s - h) + p(s - 2.0 * h)) / (2.0 * h);
            worst_jump = worst_jump.max((right - left - a.weight).abs() / a.weight.max(1.0));
        }
    }
    let square = AngularMeasure::from_pairs(&[(0.0, 2.0), (FRAC_PI_2, 2.0), (2.0 * FRAC_PI_2, 2.0), (3.0 * FRAC_PI_2, 2.0)]).unwrap();
    let sq_area = enclosed_area(&polygon_from_measure(&square).unwrap()).unwrap();
    let sq_dm = dm_closed_formula(&square).unwrap();
    let u = |s: f64| [s.cos(), s.sin()];
    let tri = dm_triple(u(0.0), u(TAU / 3.0), u(2.0 * TAU / 3.0)).unwrap();
    let tri_measure = AngularMeasure::from_pairs(&[(0.0, 1.0), (TAU / 3.0, 1.0), (2.0 * TAU / 3.0, 1.0)]).unwrap();
    let tri_area = enclosed_area(&polygon_from_measure(&tri_measure).unwrap()).unwrap();
    let r3 = 3f64.sqrt();
    let elapsed = start.elapsed();
    let examples = (sq_area - 4.0).abs() <= 1e-12
        && (sq_dm - 2.0).abs() <= 1e-12
        && (tri - r3 / 8.0).abs() <= 1e-12
        && (tri_area - r3 / 4.0).abs() <= 1e-12;
    outcome(
        worst_closure <= 1e-12 && worst_ratio <= 1e-10 && worst_jump <= 1e-8 && examples && secs(elapsed) < 5.0,
        format!(
            "closure/perimeter={worst_closure:.2e} (<=1e-12) |area/2dm-1|={worst_ratio:.2e} (<=1e-10) \
             support_jump_err={worst_jump:.2e} (<=1e-8) square area={sq_area} dm={sq_dm} \
             triple dm={tri:.15} area={tri_area:.15} runtime={:.3}s (<5s)",
            secs(elapsed)
        ),
    )
}

fn kink_exponents() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [2usize, 3, 4] {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut worst_oracle: f64 = 0.0;
        for _ in 0..1000 {
            let v: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
            let w: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
            let b = (rng.random_range(-3.0..3.0f64)).exp();
            let big_v = SpaceTimeVec::new(1.0, &v);
            let big_w = SpaceTimeVec::new(1.0, &w);
            let q: Vec<f64> = big_v.0.iter().zip(&big_w.0).map(|(a, c)| a - c).collect();
            let norm = |x: &[f64]| x.iter().map(|c| c * c).sum::<f64>().sqrt();
            let triangle = heron(norm(&big_v.0), norm(&big_w.0), norm(&q));
            // |V∧V′| is twice the triangle area.
            let wedge = 2.0 * triangle;
            for (conv, kappa) in [(Convention::Triple, 0.25), (Convention::Area, 0.5)] {
                let got = dm_kink(&big_v, &big_w, b, n, conv).unwrap();
                let oracle = prism_volume(kappa * wedge, b, n);
                worst_oracle = worst_oracle.max(rel(got, oracle, 1e-300));
                if conv == Convention::Triple {
                    xs.push(vec![wedge.ln(), b.ln()]);
                    ys.push(got.ln());
                }
            }
        }
        let fit = linear_fit(&xs, &ys);
        let (e1, e2) = (fit[1], fit[2]);
        let want = (1.0 / n as f64, (n as f64 - 1.0) / n as f64);
        let ok = (e1 - want.0).abs() <= 1e-6 && (e2 - want.1).abs() <= 1e-6 && worst_oracle <= 1e-10;
        pass &= ok;
        parts.push(format!(
            "n={n}: exponents=({e1:.9},{e2:.9}) want ({:.9},{:.9}) prism_err={worst_oracle:.2e}",
            want.0, want.1
        ));
    }
    outcome(pass, format!("{} (tol 1e-6, prism 1e-10)", parts.join("; ")))
}

fn covariance() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut partners_ok = true;
    let mut events = 0;
    for dim in [1usize, 2, 3] {
        let side = [3.0, 0.5, 0.3][dim - 1];
        for seed in 0..5u64 {
            let s = gen_random_gas(dim, 24, side, 0.02, &VelocityDist::default(), seed).unwrap();
            let base = s.run().unwrap();
            events += base.events.len();
            let lb = build_ledger(&base);
            let ib = bulk_invariants(&base.initial).unwrap();
            let rb = bound_report(&lb, &ib, 24);

            let w0 = Vector((0..dim).map(|k| 0.7 - 0.4 * k as f64 + 0.1 * seed as f64).collect());
            let boosted = apply_boost(&s, &w0).unwrap().run().unwrap();
            let lw = build_ledger(&boosted);
            let iw = bulk_invariants(&boosted.initial).unwrap();
            let rw = bound_report(&lw, &iw, 24);
            partners_ok &= base.events.len() == boosted.events.len()
                && base.events.iter().zip(&boosted.events).all(|(x, y)| (x.i, x.j) == (y.i, y.j));
            for (x, y) in base.events.iter().zip(&boosted.events) {
                worst = worst.max(rel(x.t, y.t, 1e-3));
            }
            for (p, q) in lb.iter().zip(&lw) {
                worst = worst.max(rel(p.dv_norm, q.dv_norm, 1e-300));
            }
            if let (Some(a), Some(b)) = (rb.ratio2, rw.ratio2) {
                worst = worst.max(rel(a, b, 1e-300));
            }

            let mu = 1.7 + seed as f64;
            let scaled = apply_time_scale(&s, mu).unwrap().run().unwrap();
            let ls = build_ledger(&scaled);
            partners_ok &= base.events.len() == scaled.events.len()
                && base.events.iter().zip(&scaled.events).all(|(x, y)| (x.i, x.j) == (y.i, y.j));
            for (x, y) in base.events.iter().zip(&scaled.events) {
                worst = worst.max(rel(x.t / mu, y.t, 1e-300));
            }
            for (p, q) in lb.iter().zip(&ls) {
                worst = worst.max(rel(mu * p.dv_norm, q.dv_norm, 1e-300));
                worst = worst.max((mu * mu * p.wedge - q.wedge).abs() / (mu * mu * p.dv_norm * p.dv_norm).max(p.wedge).max(1e-300));
            }
        }
    }
    outcome(
        partners_ok && worst <= 1e-10,
        format!("n=1,2,3 x 5 seeds, base events={events}, partners_match={partners_ok}, worst relative deviation={worst:.2e} (<=1e-10)"),
    )
}

fn serialize(log: &EventLog) -> Vec<u8> {
    let mut buf = Vec::new();
    write_event_log(log, &mut buf).unwrap();
    buf
}

fn event_lines(bytes: &[u8]) -> &[u8] {
    let header_end = bytes.iter().position(|&b| b == b'\n').unwrap();
    &bytes[header_end + 1..]
}

fn determinism() -> Outcome {
    let mut identical = true;
    for seed in [0u64, 1, 2] {
        let a = gen_random_gas(2, 64, 1.0, 0.01, &VelocityDist::default(), seed).unwrap().run().unwrap();
        let b = gen_random_gas(2, 64, 1.0, 0.01, &VelocityDist::default(), seed).unwrap().run().unwrap();
        identical &= serialize(&a) == serialize(&b);
    }
    let mut cross = true;
    let mut events = 0;
    for seed in 100..110u64 {
        let s = gen_random_gas(2, 48, 0.6, 0.015, &VelocityDist::default(), seed).unwrap();
        let a = run_simulation(&s.initial, &s.config.clone().with_backend(Backend::AllPairs)).unwrap();
        let b = run_simulation(&s.initial, &s.config.clone().with_backend(Backend::CellList)).unwrap();
        events += a.events.len();
        cross &= a.termination == b.termination && event_lines(&serialize(&a)) == event_lines(&serialize(&b));
    }
    outcome(
        identical && cross,
        format!("same-seed byte-identical={identical}; cell vs all-pairs identical on 10 scenarios ({events} events)={cross}"),
    )
}

fn brute_force_check() -> Outcome {
    let s = converging_line(16, 0.5, 0.01, 9);
    let log = s.run().unwrap();
    let a = s.config.radius;
    let vbar = rms_speed(&s.initial.iter().map(|p| p.velocity.clone()).collect::<Vec<_>>());
    let unit = a / vbar;
    let t_end = log.events[99].t + 10.0 * unit;
    let contacts = brute_force(&s.initial, a, 1e-5 * unit, 100, t_end);
    let worst_1d = compare_with_brute_force(&log, &contacts, 100);

    let s2 = gen_random_gas(2, 16, 0.15, 0.01, &VelocityDist::default(), 1).unwrap();
    let log2 = s2.run().unwrap();
    let vbar2 = rms_speed(&s2.initial.iter().map(|p| p.velocity.clone()).collect::<Vec<_>>());
    let unit2 = 0.01 / vbar2;
    let n2 = log2.events.len();
    let contacts2 = brute_force(&s2.initial, 0.01, 1e-5 * unit2, n2 + 1, log2.events[n2 - 1].t + 50.0 * unit2);
    let worst_2d = if contacts2.len() == n2 { compare_with_brute_force(&log2, &contacts2, n2) } else { None };

    let ok = |w: Option<f64>, u: f64| w.is_some_and(|w| w <= 1e-4 * u);
    outcome(
        ok(worst_1d, unit) && ok(worst_2d, unit2),
        format!(
            "N=16 line log: 100 events, max |dt|/(a/v)={} (<=1e-4); N=16 planar log: {n2} events, max |dt|/(a/v)={} (<=1e-4)",
            worst_1d.map_or("partner mismatch".into(), |w| format!("{:.2e}", w / unit)),
            worst_2d.map_or("partner mismatch".into(), |w| format!("{:.2e}", w / unit2)),
        ),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "conservation", conservation()));
    results.push((2, "sharpness", sharpness()));
    let start = Instant::now();
    let runs = sweep_runs(&sweep_spec(), Execution::Parallel).expect("sweep runs");
    let sweep_time = start.elapsed();
    results.push((3, "boundedness", boundedness(&runs, sweep_time)));
    results.push((4, "tensor audit", tensor_audit(&runs)));
    results.push((5, "determinantal mass oracles", determinantal_mass()));
    results.push((6, "kink mass exponents", kink_exponents()));
    results.push((7, "boost and time-scale covariance", covariance()));
    results.push((8, "determinism and cross-backend", determinism()));
    results.push((9, "brute-force cross-check", brute_force_check()));

    let mut failed = 0;
    for (k, name, o) in &results {
        println!("criterion {k} [{name}]: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
