//! Error functions and error vectors on the two-sphere, and their time
//! derivatives.
//!
//! Two error functions are provided:
//!
//! * `Ψ_r = 1 − qᵀq_d` with error vector `e_r = q_d × q`, whose magnitude
//!   `sin θ` collapses back to zero at the antipode;
//! * `Ψ = 2 − √2·√(1 + qᵀq_d) = 2(1 − cos(θ/2))` with body-frame error vector
//!   `ᵇe_q = Qᵀ(q_d × q) / (√2·√(1 + qᵀq_d))`, of magnitude `sin(θ/2)`.
//!
//! The second pair is only defined away from the antipode `q = −q_d`. Inputs
//! with `1 + qᵀq_d ≤ DOMAIN_GUARD` are rejected with
//! [`Error::OutsideDomain`] instead of being clamped.

use crate::error::{Error, Result};
use crate::rigid_body::{angular_acceleration, BodyState, RigidBodyParams};
use crate::so3::{RotationMatrix, UnitVector3, Vector3};

/// Minimum admissible value of `1 + qᵀq_d`.
pub const DOMAIN_GUARD: f64 = 1e-9;

/// `Ψ` together with the body-frame error vector `ᵇe_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeError {
    pub psi: f64,
    pub e_q: Vector3,
}

impl AttitudeError {
    pub fn new(q: &UnitVector3, qd: &UnitVector3, attitude: &RotationMatrix) -> Result<Self> {
        Ok(Self {
            psi: psi(q, qd)?,
            e_q: e_q(q, qd, attitude)?,
        })
    }
}

/// Body-frame angular velocity tracking error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityError {
    pub e_omega: Vector3,
}

/// `√2·√(1 + qᵀq_d)`, after the domain check.
///
/// On the unit sphere `2(1 + qᵀq_d) = ‖q + q_d‖²`, and the norm form keeps
/// full relative accuracy near the antipode where `1 + qᵀq_d` cancels.
fn normalizer(q: &UnitVector3, qd: &UnitVector3) -> Result<f64> {
    let n = (q.as_vector() + qd.as_vector()).norm();
    let margin = 0.5 * n * n;
    if margin > DOMAIN_GUARD {
        Ok(n)
    } else {
        Err(Error::OutsideDomain { margin })
    }
}

/// `Ψ_r = 1 − qᵀq_d`.
pub fn psi_r(q: &UnitVector3, qd: &UnitVector3) -> f64 {
    1.0 - q.dot(qd)
}

/// `e_r = q_d × q` (inertial frame).
pub fn e_r(q: &UnitVector3, qd: &UnitVector3) -> Vector3 {
    qd.as_vector().cross(q.as_vector())
}

/// `Ψ = 2 − √2·√(1 + qᵀq_d)`.
pub fn psi(q: &UnitVector3, qd: &UnitVector3) -> Result<f64> {
    Ok(2.0 - normalizer(q, qd)?)
}

/// `ᵇe_q = Qᵀ(q_d × q) / (√2·√(1 + qᵀq_d))`.
pub fn e_q(q: &UnitVector3, qd: &UnitVector3, attitude: &RotationMatrix) -> Result<Vector3> {
    let n = normalizer(q, qd)?;
    Ok(attitude.transpose().apply(&e_r(q, qd)) / n)
}

/// `ᵇe_ω = ᵇω − QᵀQ_d ᵇω_d`.
pub fn e_omega(
    omega: &Vector3,
    omega_d: &Vector3,
    attitude: &RotationMatrix,
    desired_attitude: &RotationMatrix,
) -> Vector3 {
    omega - relative_desired_omega(omega_d, attitude, desired_attitude)
}

/// `QᵀQ_d ᵇω_d`, the desired angular velocity expressed in the current body
/// frame.
#[inline]
pub(crate) fn relative_desired_omega(
    omega_d: &Vector3,
    attitude: &RotationMatrix,
    desired_attitude: &RotationMatrix,
) -> Vector3 {
    attitude.transpose().apply(&desired_attitude.apply(omega_d))
}

/// `Ψ̇ = (q_d × q)·(ω − ω_d) / (√2·√(1 + qᵀq_d))` with inertial-frame
/// velocities.
pub fn psi_dot(
    q: &UnitVector3,
    qd: &UnitVector3,
    omega_spatial: &Vector3,
    omega_d_spatial: &Vector3,
) -> Result<f64> {
    let n = normalizer(q, qd)?;
    Ok(e_r(q, qd).dot(&(omega_spatial - omega_d_spatial)) / n)
}

/// Time derivative of `ᵇe_q`. Velocities `ω`, `ω_d` are inertial-frame,
/// `ᵇω` is body-frame, exactly as the three-term expression mixes them:
///
/// ```text
/// d/dt ᵇe_q = Qᵀ((ω_d × q_d) × q + q_d × (ω × q)) / (√2·√(1 + qᵀq_d))
///           − ((ω_d × q_d)ᵀq + q_dᵀ(ω × q)) / (2(1 + qᵀq_d)) · ᵇe_q
///           − ᵇω × ᵇe_q
/// ```
pub fn e_q_dot(
    q: &UnitVector3,
    qd: &UnitVector3,
    attitude: &RotationMatrix,
    omega_spatial: &Vector3,
    omega_d_spatial: &Vector3,
    omega_body: &Vector3,
) -> Result<Vector3> {
    let n = normalizer(q, qd)?;
    let qv = q.as_vector();
    let qdv = qd.as_vector();
    let e = attitude.transpose().apply(&qdv.cross(qv)) / n;

    let qd_rate = omega_d_spatial.cross(qdv);
    let q_rate = omega_spatial.cross(qv);

    let first = attitude
        .transpose()
        .apply(&(qd_rate.cross(qv) + qdv.cross(&q_rate)))
        / n;
    let second = e * ((qd_rate.dot(qv) + qdv.dot(&q_rate)) / (n * n));
    let third = omega_body.cross(&e);
    Ok(first - second - third)
}

/// Time derivative of `ᵇe_ω` under the equations of motion:
///
/// `J⁻¹(u + (Jᵇω) × ᵇω − cᵇω + τ) + ᵇω × QᵀQ_dᵇω_d − QᵀQ_dᵇω̇_d`.
pub fn e_omega_dot(
    state: &BodyState,
    u: &Vector3,
    p: &RigidBodyParams,
    desired_attitude: &RotationMatrix,
    omega_d: &Vector3,
    omega_d_dot: &Vector3,
) -> Vector3 {
    let a = angular_acceleration(&state.omega, u, p);
    a + state.omega.cross(&relative_desired_omega(
        omega_d,
        &state.attitude,
        desired_attitude,
    )) - relative_desired_omega(omega_d_dot, &state.attitude, desired_attitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{euler313, exp_map, rot_x};
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn about_e1(theta: f64) -> UnitVector3 {
        rot_x(theta).third_axis()
    }

    #[test]
    fn psi_r_cases() {
        let e3 = UnitVector3::e3();
        assert_eq!(psi_r(&e3, &e3), 0.0);
        assert_eq!(psi_r(&e3, &-e3), 2.0);
        assert_eq!(psi_r(&e3, &UnitVector3::e1()), 1.0);
    }

    #[test]
    fn e_r_cases() {
        let e3 = UnitVector3::e3();
        assert_eq!(e_r(&e3, &e3), Vector3::zeros());
        assert_eq!(e_r(&e3, &-e3).norm(), 0.0);
        let qd = about_e1(179f64.to_radians());
        let n = e_r(&e3, &qd).norm();
        assert!((n - 179f64.to_radians().sin()).abs() < 1e-12);
        assert!((n - 0.017452).abs() < 1e-6);
    }

    #[test]
    fn psi_cases() {
        let e3 = UnitVector3::e3();
        assert_eq!(psi(&e3, &e3).unwrap(), 0.0);
        let v = psi(&e3, &about_e1(FRAC_PI_2)).unwrap();
        assert!((v - (2.0 - SQRT_2)).abs() < 1e-12);
        assert!((v - 0.585786).abs() < 1e-6);
        let v = psi(&e3, &about_e1(179f64.to_radians())).unwrap();
        assert!((v - 2.0 * (1.0 - 89.5f64.to_radians().cos())).abs() < 1e-12);
        assert!((v - 1.982546).abs() < 1e-6);
    }

    #[test]
    fn antipode_is_a_domain_error() {
        let e3 = UnitVector3::e3();
        assert!(matches!(psi(&e3, &-e3), Err(Error::OutsideDomain { .. })));
        assert!(e_q(&e3, &-e3, &RotationMatrix::identity()).is_err());
        assert!(psi_dot(&e3, &-e3, &Vector3::zeros(), &Vector3::zeros()).is_err());
        let near = about_e1(PI - 1e-4);
        assert!(psi(&e3, &near).is_ok());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn e_q_cases() {
        let e3 = UnitVector3::e3();
        let r = euler313(0.3, -1.2);
        assert_eq!(e_q(&e3, &e3, &r).unwrap(), Vector3::zeros());
        let n = e_q(&e3, &about_e1(FRAC_PI_2), &r).unwrap().norm();
        assert!((n - 45f64.to_radians().sin()).abs() < 1e-12);
        assert!((n - 0.707107).abs() < 1e-6);
        let n = e_q(&e3, &about_e1(179f64.to_radians()), &r).unwrap().norm();
        assert!((n - 89.5f64.to_radians().sin()).abs() < 1e-12);
        assert!((n - 0.999962).abs() < 1e-6);
    }

    #[test]
    fn e_omega_cases() {
        let r = euler313(0.7, 0.2);
        let w = Vector3::new(0.1, -2.0, 3.0);
        assert!(e_omega(&w, &w, &r, &r).norm() < 1e-15);
        assert_eq!(e_omega(&w, &Vector3::zeros(), &r, &r), w);
        let qd = euler313(0.0, FRAC_PI_2);
        let e = e_omega(
            &Vector3::zeros(),
            &Vector3::z(),
            &RotationMatrix::identity(),
            &qd,
        );
        assert!((e - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn psi_dot_vanishing_cases() {
        let q = about_e1(0.8);
        let qd = UnitVector3::normalize(Vector3::new(0.3, 0.1, 1.0)).unwrap();
        let w = Vector3::new(0.4, -1.0, 2.0);
        assert_eq!(psi_dot(&q, &qd, &w, &w).unwrap(), 0.0);
        assert_eq!(psi_dot(&qd, &qd, &w, &Vector3::zeros()).unwrap(), 0.0);
    }

    #[test]
    fn e_q_dot_vanishing_cases() {
        let r = exp_map(&Vector3::new(0.2, 0.5, -0.1));
        let q = r.third_axis();
        let qd = about_e1(1.0);
        let z = Vector3::zeros();
        assert_eq!(e_q_dot(&q, &qd, &r, &z, &z, &z).unwrap(), Vector3::zeros());

        // Perfect tracking: same attitude, same body rate.
        let wb = Vector3::new(0.3, -0.2, 5.0);
        let w = r.apply(&wb);
        let d = e_q_dot(&q, &q, &r, &w, &w, &wb).unwrap();
        assert!(d.norm() < 1e-14);
    }

    #[test]
    fn e_omega_dot_reductions() {
        let p = RigidBodyParams::reference();
        let s = BodyState::rest();
        let z = Vector3::zeros();
        assert_eq!(
            e_omega_dot(&s, &z, &p, &RotationMatrix::identity(), &z, &z),
            z
        );

        let s = BodyState::new(euler313(0.4, 0.9), Vector3::new(1.0, -2.0, 0.5));
        let u = Vector3::new(0.1, 0.2, -0.3);
        let qd = euler313(-0.3, 2.0);
        let (_, dw) = crate::rigid_body::dynamics(&s, &u, &p);
        assert_eq!(e_omega_dot(&s, &u, &p, &qd, &z, &z), dw);
    }
}
