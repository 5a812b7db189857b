#![allow(clippy::needless_range_loop)]

#![allow(dead_code)]

use kinkbound::dynamics::{EventLog, ParticleState};
use kinkbound::harness::{gen_random_gas, Scenario, VelocityDist};
use kinkbound::kernel::Vector;

/// Contact found by the fixed-step integrator: `(t, lower id, higher id)`.
pub type Contact = (f64, usize, usize);

/// Fixed-timestep hard-sphere integrator. Every step advances all particles
/// by `dt` and looks for approaching pairs closer than `2a`; the earliest
/// such contact inside the step is located by bisection, everything is
/// rewound to it and the pair is reflected.
pub fn brute_force(initial: &[ParticleState], a: f64, dt: f64, max_events: usize, t_end: f64) -> Vec<Contact> {
    let n = initial[0].position.dim();
    let count = initial.len();
    let mut y: Vec<f64> = initial.iter().flat_map(|s| s.position.0.clone()).collect();
    let mut v: Vec<f64> = initial.iter().flat_map(|s| s.velocity.0.clone()).collect();
    let ids: Vec<usize> = initial.iter().map(|s| s.id).collect();
    let contact_sq = 4.0 * a * a;
    let mut t = 0.0;
    let mut out = Vec::new();

    let gap = |y: &[f64], v: &[f64], i: usize, j: usize, s: f64| -> f64 {
        (0..n)
            .map(|k| {
                let d = (y[j * n + k] + s * v[j * n + k]) - (y[i * n + k] + s * v[i * n + k]);
                d * d
            })
            .sum::<f64>()
            - contact_sq
    };

    while out.len() < max_events && t < t_end {
        let mut first: Option<(f64, usize, usize)> = None;
        for i in 0..count {
            for j in i + 1..count {
                if gap(&y, &v, i, j, dt) >= 0.0 {
                    continue;
                }
                let approaching: f64 = (0..n)
                    .map(|k| (y[j * n + k] - y[i * n + k]) * (v[j * n + k] - v[i * n + k]))
                    .sum();
                if approaching >= 0.0 || gap(&y, &v, i, j, 0.0) <= 0.0 {
                    continue;
                }
                let (mut lo, mut hi) = (0.0, dt);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if gap(&y, &v, i, j, mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if first.is_none_or(|f| lo < f.0) {
                    first = Some((lo, i, j));
                }
            }
        }
        match first {
            None => {
                for k in 0..y.len() {
                    y[k] += dt * v[k];
                }
                t += dt;
            }
            Some((s, i, j)) => {
                for k in 0..y.len() {
                    y[k] += s * v[k];
                }
                t += s;
                let sep: Vec<f64> = (0..n).map(|k| y[j * n + k] - y[i * n + k]).collect();
                let len = sep.iter().map(|x| x * x).sum::<f64>().sqrt();
                let u: Vec<f64> = sep.iter().map(|x| x / len).collect();
                let along: f64 = (0..n).map(|k| (v[j * n + k] - v[i * n + k]) * u[k]).sum();
                for k in 0..n {
                    v[i * n + k] += along * u[k];
                    v[j * n + k] -= along * u[k];
                }
                out.push((t, ids[i].min(ids[j]), ids[i].max(ids[j])));
            }
        }
    }
    out
}

/// Random 1D gas whose velocities decrease along the line, so that every
/// pair meets exactly once: `N(N−1)/2` collisions.
pub fn converging_line(count: usize, side: f64, a: f64, seed: u64) -> Scenario {
    let mut s = gen_random_gas(1, count, side, a, &VelocityDist::default(), seed).unwrap();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&p, &q| s.initial[p].position.0[0].total_cmp(&s.initial[q].position.0[0]));
    let mut speeds: Vec<f64> = s.initial.iter().map(|p| p.velocity.0[0]).collect();
    speeds.sort_by(|p, q| q.total_cmp(p));
    for (rank, &k) in order.iter().enumerate() {
        s.initial[k].velocity = Vector(vec![speeds[rank]]);
    }
    s
}

pub fn total_momentum(v: &[Vector]) -> Vec<f64> {
    let n = v[0].dim();
    (0..n).map(|k| v.iter().map(|x| x.0[k]).sum()).collect()
}

pub fn total_energy(v: &[Vector]) -> f64 {
    v.iter().map(|x| 0.5 * x.0.iter().map(|c| c * c).sum::<f64>()).sum()
}

pub fn rms_speed(v: &[Vector]) -> f64 {
    (2.0 * total_energy(v) / v.len() as f64).sqrt()
}

/// Largest deviation of the log's event times and partners from the
/// integrator's, or `None` when the partner sequences differ.
pub fn compare_with_brute_force(log: &EventLog, contacts: &[Contact], events: usize) -> Option<f64> {
    if contacts.len() < events || log.events.len() < events {
        return None;
    }
    let mut worst: f64 = 0.0;
    for (e, c) in log.events.iter().zip(contacts).take(events) {
        if (e.i, e.j) != (c.1, c.2) {
            return None;
        }
        worst = worst.max((e.t - c.0).abs());
    }
    Some(worst)
}

/// Random rotation of `R^n` as a row-major matrix (Gram–Schmidt on
/// pseudo-random columns).
pub fn rotation(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let mut c: Vec<f64> = (0..n).map(|_| next()).collect();
        for b in &cols {
            let d: f64 = c.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in c.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let len = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 {
            cols.push(c.into_iter().map(|x| x / len).collect());
        }
    }
    // Flip one column if needed so det = +1 (sign only matters for n >= 2).
    let mut m: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect();
    if n >= 2 && det(&m) < 0.0 {
        for row in &mut m {
            row[0] = -row[0];
        }
    }
    m
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

pub fn apply(m: &[Vec<f64>], x: &Vector) -> Vector {
    Vector(m.iter().map(|row| row.iter().zip(&x.0).map(|(a, b)| a * b).sum()).collect())
}

/// Relative distance `|a − b| / max(|a|, |b|, floor)`.
pub fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Least-squares fit of `y ≈ c + Σ β_k x_k` via the normal equations.
pub fn linear_fit(xs: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = xs[0].len() + 1;
    let mut ata = vec![vec![0.0; p]; p];
    let mut aty = vec![0.0; p];
    for (row, &target) in xs.iter().zip(y) {
        let full: Vec<f64> = std::iter::once(1.0).chain(row.iter().cloned()).collect();
        for r in 0..p {
            aty[r] += full[r] * target;
            for c in 0..p {
                ata[r][c] += full[r] * full[c];
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for c in 0..p {
        let piv = (c..p).max_by(|&a, &b| ata[a][c].abs().total_cmp(&ata[b][c].abs())).unwrap();
        ata.swap(c, piv);
        aty.swap(c, piv);
        for r in 0..p {
            if r != c {
                let f = ata[r][c] / ata[c][c];
                for k in c..p {
                    ata[r][k] -= f * ata[c][k];
                }
                aty[r] -= f * aty[c];
            }
        }
    }
    (0..p).map(|k| aty[k] / ata[k][k]).collect()
}

/// Triangle area from side lengths (Kahan's stable form of Heron).
pub fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).max(0.0).sqrt()
}

/// Volume of the prism `α·T × [0, s]^{n−1}` whose triangle-edge facets have
/// area equal to the edge length and whose cube facets have area `b`, for a
/// base triangle of area `a0`. Solved by bisection on `log s`.
pub fn prism_volume(a0: f64, b: f64, n: usize) -> f64 {
    let q = (n - 1) as i32;
    // Edge facets: α s^q = 1. Cube facets: α² a0 s^{q−1} = b.
    let cube_facet = |s: f64| {
        let alpha = s.powi(-q);
        alpha * alpha * a0 * s.powi(q - 1)
    };
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cube_facet(mid.exp()) > b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = (0.5 * (lo + hi)).exp();
    let alpha = s.powi(-q);
    alpha * alpha * a0 * s.powi(q)
}

/// Random balanced measure with `atoms` atoms: `atoms − 1` free atoms and a
/// closing atom opposite their resultant.
pub fn balanced_measure(atoms: usize, draws: &[f64]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = (0..atoms - 1)
        .map(|k| (draws[2 * k] * std::f64::consts::TAU, 0.2 + draws[2 * k + 1]))
        .collect();
    let (rx, ry) = out
        .iter()
        .fold((0.0, 0.0), |(x, y), &(s, w)| (x + w * s.cos(), y + w * s.sin()));
    out.push(((-ry).atan2(-rx), rx.hypot(ry)));
    out
}
