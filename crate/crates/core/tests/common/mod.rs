//! Oracles shared by the integration tests. Everything here is written
//! against plain nalgebra so it does not lean on the code under test.
#![allow(dead_code)]

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::Rng;

pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

pub fn rodrigues(xi: &Vector3<f64>) -> Matrix3<f64> {
    Rotation3::from_scaled_axis(*xi).into_inner()
}

pub fn unit(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n < 1.0 {
            return v / n;
        }
    }
}

pub fn vec3(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    rodrigues(&(unit(rng) * rng.gen_range(0.0..std::f64::consts::PI)))
}

/// Euler's equations with friction and external moment.
pub fn euler_rhs(
    j: &Vector3<f64>,
    c: f64,
    tau: &Vector3<f64>,
    w: &Vector3<f64>,
    u: &Vector3<f64>,
) -> Vector3<f64> {
    let jw = j.component_mul(w);
    (u - w.cross(&jw) - w * c + tau).component_div(j)
}

/// Body and desired attitude flow in ambient coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Flow {
    pub q: Matrix3<f64>,
    pub w: Vector3<f64>,
    pub qd: Matrix3<f64>,
    pub wd: Vector3<f64>,
}

/// Classical RK4 on `Q̇ = Q ω^×`, Euler's equations with constant `u`,
/// `Q̇_d = Q_d ω_d^×` and `ω̇_d = const`. Negative `h` integrates backwards.
pub fn rk4_flow(
    x: &Flow,
    h: f64,
    j: &Vector3<f64>,
    c: f64,
    tau: &Vector3<f64>,
    u: &Vector3<f64>,
    wd_dot: &Vector3<f64>,
) -> Flow {
    let f = |s: &Flow| Flow {
        q: s.q * skew(&s.w),
        w: euler_rhs(j, c, tau, &s.w, u),
        qd: s.qd * skew(&s.wd),
        wd: *wd_dot,
    };
    let add = |a: &Flow, k: &Flow, s: f64| Flow {
        q: a.q + k.q * s,
        w: a.w + k.w * s,
        qd: a.qd + k.qd * s,
        wd: a.wd + k.wd * s,
    };
    let k1 = f(x);
    let k2 = f(&add(x, &k1, h / 2.0));
    let k3 = f(&add(x, &k2, h / 2.0));
    let k4 = f(&add(x, &k3, h));
    Flow {
        q: x.q + (k1.q + k2.q * 2.0 + k3.q * 2.0 + k4.q) * (h / 6.0),
        w: x.w + (k1.w + k2.w * 2.0 + k3.w * 2.0 + k4.w) * (h / 6.0),
        qd: x.qd + (k1.qd + k2.qd * 2.0 + k3.qd * 2.0 + k4.qd) * (h / 6.0),
        wd: x.wd + (k1.wd + k2.wd * 2.0 + k3.wd * 2.0 + k4.wd) * (h / 6.0),
    }
}

/// `2 − √(2(1 + qᵀq_d))`, written as `2 − ‖q + q_d‖` for unit vectors.
pub fn psi(q: &Vector3<f64>, qd: &Vector3<f64>) -> f64 {
    2.0 - (q + qd).norm()
}

/// `Qᵀ(q_d × q) / ‖q + q_d‖`.
pub fn e_q(rot: &Matrix3<f64>, qd: &Vector3<f64>) -> Vector3<f64> {
    let q = rot.column(2).into_owned();
    rot.transpose() * qd.cross(&q) / (q + qd).norm()
}

pub fn e_omega(
    rot: &Matrix3<f64>,
    w: &Vector3<f64>,
    rot_d: &Matrix3<f64>,
    wd: &Vector3<f64>,
) -> Vector3<f64> {
    w - rot.transpose() * rot_d * wd
}

/// Least-squares slope of `ln v` against `t` over `[t0, t1]`.
pub fn log_slope(t: &[f64], v: &[f64], t0: f64, t1: f64) -> f64 {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(v)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    sxy / sxx
}

/// First time after which `v` stays at or below `thr`, scanning the samples
/// forwards.
pub fn settle_time(t: &[f64], v: &[f64], thr: f64) -> f64 {
    let mut last_above = None;
    for (i, x) in v.iter().enumerate() {
        if *x > thr {
            last_above = Some(i);
        }
    }
    match last_above {
        None => t[0],
        Some(i) if i + 1 < t.len() => t[i + 1],
        Some(_) => f64::INFINITY,
    }
}
