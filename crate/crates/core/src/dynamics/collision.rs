use crate::error::{Error, Result};
use crate::kernel::{dot, Vector};

use super::{ParticleState, Tolerances};

/// Earliest time `t > now` at which the two spheres touch, or `None` when
/// they never approach to distance `2a` (separating, missing, or grazing).
pub fn predict_pair_collision(
    s_i: &ParticleState,
    s_j: &ParticleState,
    a: f64,
    now: f64,
) -> Option<f64> {
    contact_time(s_i, s_j, a, now, Tolerances::default().grazing)
}

/// Contact time with both trajectories extrapolated to the reference time
/// `t_ref`. The engine passes `max(t_i, t_j)` so the answer depends only on
/// the two kink states, never on when the prediction is made.
pub(crate) fn contact_time(
    s_i: &ParticleState,
    s_j: &ParticleState,
    a: f64,
    t_ref: f64,
    grazing_tol: f64,
) -> Option<f64> {
    let yi = &s_i.position.0;
    let yj = &s_j.position.0;
    let vi = &s_i.velocity.0;
    let vj = &s_j.velocity.0;
    let dti = t_ref - s_i.last_update_time;
    let dtj = t_ref - s_j.last_update_time;

    let mut b = 0.0;
    let mut dy_sq = 0.0;
    let mut dv_sq = 0.0;
    for k in 0..yi.len() {
        let dy = (yj[k] + dtj * vj[k]) - (yi[k] + dti * vi[k]);
        let dv = vj[k] - vi[k];
        b += dy * dv;
        dy_sq += dy * dy;
        dv_sq += dv * dv;
    }
    // Approach condition (v_j − v_i)·(y_j − y_i) < 0.
    if b >= 0.0 || dv_sq == 0.0 {
        return None;
    }
    let sigma = 2.0 * a;

    if yi.len() == 1 {
        // On a line the quadratic is degenerate (zero discriminant when a = 0);
        // the gap simply closes at the relative speed.
        let gap = dy_sq.sqrt() - sigma;
        let tau = (gap / dv_sq.sqrt()).max(0.0);
        return Some(t_ref + tau);
    }

    let c = dy_sq - sigma * sigma;
    let disc = b * b - dv_sq * c;
    if disc < grazing_tol * b * b {
        return None;
    }
    // Smaller root of dv²τ² + 2bτ + c = 0 in the cancellation-free form c/q.
    let q = -b + disc.sqrt();
    let tau = (c / q).max(0.0);
    // The relative velocity at contact must still point inward.
    if b + tau * dv_sq >= 0.0 {
        return None;
    }
    Some(t_ref + tau)
}

/// Elastic, frictionless exchange of the normal velocity component between
/// two unit-mass spheres. `u_hat` is the unit vector from `i` to `j`.
pub fn resolve_collision(v_i: &Vector, v_j: &Vector, u_hat: &Vector) -> Result<(Vector, Vector)> {
    v_i.check_dim(u_hat.dim())?;
    v_j.check_dim(u_hat.dim())?;
    let rel: Vec<f64> = v_j.0.iter().zip(&v_i.0).map(|(a, b)| a - b).collect();
    let s = dot(&rel, &u_hat.0);
    if !(s < 0.0) {
        return Err(Error::NotApproaching(s));
    }
    if u_hat.dim() == 1 {
        // Equal masses on a line exchange their velocities.
        return Ok((v_j.clone(), v_i.clone()));
    }
    let vi_post = Vector(v_i.0.iter().zip(&u_hat.0).map(|(v, u)| v + s * u).collect());
    let vj_post = Vector(v_j.0.iter().zip(&u_hat.0).map(|(v, u)| v - s * u).collect());
    Ok((vi_post, vj_post))
}
