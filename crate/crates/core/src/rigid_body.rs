//! Attitude dynamics of a fully actuated rigid body with viscous friction,
//! and a fixed-step Lie-group Runge–Kutta integrator.

use crate::error::{Error, Result};
use crate::so3::{exp_map, RotationMatrix, UnitVector3, Vector3};

/// Inertia (principal-axis diagonal), friction coefficient and constant
/// external moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyParams {
    inertia: Vector3,
    friction: f64,
    external_moment: Vector3,
}

impl RigidBodyParams {
    pub fn new(inertia: Vector3, friction: f64, external_moment: Vector3) -> Result<Self> {
        validate_inertia(&inertia)?;
        if !(friction.is_finite() && friction >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "friction coefficient must be finite and >= 0, got {friction}"
            )));
        }
        if !external_moment.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "external moment must be finite".into(),
            ));
        }
        Ok(Self {
            inertia,
            friction,
            external_moment,
        })
    }

    /// `J = diag(0.0294, 0.0305, 0.0495)` kg·m², `c = 0.3` N·m·s/rad, `τ = 0`.
    pub fn reference() -> Self {
        Self {
            inertia: Vector3::new(0.0294, 0.0305, 0.0495),
            friction: 0.3,
            external_moment: Vector3::zeros(),
        }
    }

    /// Diagonal of the inertia matrix.
    #[inline]
    pub fn inertia(&self) -> &Vector3 {
        &self.inertia
    }

    #[inline]
    pub fn friction(&self) -> f64 {
        self.friction
    }

    #[inline]
    pub fn external_moment(&self) -> &Vector3 {
        &self.external_moment
    }

    /// `J v` for the diagonal inertia.
    #[inline]
    pub fn apply_inertia(&self, v: &Vector3) -> Vector3 {
        self.inertia.component_mul(v)
    }

    /// `J⁻¹ v` for the diagonal inertia.
    #[inline]
    pub fn apply_inverse_inertia(&self, v: &Vector3) -> Vector3 {
        v.component_div(&self.inertia)
    }

    /// Same parameters with friction and external moment removed.
    pub fn free(&self) -> Self {
        Self {
            inertia: self.inertia,
            friction: 0.0,
            external_moment: Vector3::zeros(),
        }
    }
}

pub(crate) fn validate_inertia(inertia: &Vector3) -> Result<()> {
    if inertia.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "inertia diagonal entries must be strictly positive, got [{}, {}, {}]",
            inertia.x, inertia.y, inertia.z
        )))
    }
}

/// Full attitude and body-frame angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub attitude: RotationMatrix,
    pub omega: Vector3,
}

impl BodyState {
    pub fn new(attitude: RotationMatrix, omega: Vector3) -> Self {
        Self { attitude, omega }
    }

    pub fn rest() -> Self {
        Self::new(RotationMatrix::identity(), Vector3::zeros())
    }
}

/// Integration step, `0 < h ≤ 0.01` s.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StepSize(f64);

impl StepSize {
    pub const MAX: f64 = 0.01;
    pub const DEFAULT: StepSize = StepSize(1e-3);

    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 && h <= Self::MAX {
            Ok(Self(h))
        } else {
            Err(Error::InvalidParameter(format!(
                "step size must satisfy 0 < h <= {}, got {h}",
                Self::MAX
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for StepSize {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Right-hand side of the equations of motion. Returns the kinematic rate
/// `ᵇω` (for `Q̇ = Q(ᵇω)^×`) together with
/// `ᵇω̇ = J⁻¹(u − ᵇω × Jᵇω − cᵇω + τ)`.
pub fn dynamics(state: &BodyState, u: &Vector3, p: &RigidBodyParams) -> (Vector3, Vector3) {
    (state.omega, angular_acceleration(&state.omega, u, p))
}

#[inline]
pub(crate) fn angular_acceleration(omega: &Vector3, u: &Vector3, p: &RigidBodyParams) -> Vector3 {
    let gyro = omega.cross(&p.apply_inertia(omega));
    p.apply_inverse_inertia(&(u - gyro - omega * p.friction + p.external_moment))
}

/// Inverse right-trivialized differential of `exp`, truncated after the
/// second bracket (sufficient for a fourth-order method).
#[inline]
fn dexp_inv(theta: &Vector3, omega: &Vector3) -> Vector3 {
    let c = theta.cross(omega);
    omega + c * 0.5 + theta.cross(&c) / 12.0
}

/// Advances the state by one classical four-stage Runge–Kutta–Munthe-Kaas
/// step. The control is evaluated at every stage.
pub fn step<F>(
    state: &BodyState,
    mut control: F,
    p: &RigidBodyParams,
    t: f64,
    h: StepSize,
) -> Result<BodyState>
where
    F: FnMut(f64, &BodyState) -> Result<Vector3>,
{
    let h = h.get();
    let q0 = state.attitude;
    let w0 = state.omega;

    let mut stage = |theta: Vector3, omega: Vector3, tau: f64| -> Result<(Vector3, Vector3)> {
        let s = BodyState::new(q0 * exp_map(&theta), omega);
        let u = control(tau, &s)?;
        Ok((
            dexp_inv(&theta, &omega),
            angular_acceleration(&omega, &u, p),
        ))
    };

    let (k1, a1) = stage(Vector3::zeros(), w0, t)?;
    let (k2, a2) = stage(k1 * (0.5 * h), w0 + a1 * (0.5 * h), t + 0.5 * h)?;
    let (k3, a3) = stage(k2 * (0.5 * h), w0 + a2 * (0.5 * h), t + 0.5 * h)?;
    let (k4, a4) = stage(k3 * h, w0 + a3 * h, t + h)?;

    let theta = (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
    let omega = w0 + (a1 + (a2 + a3) * 2.0 + a4) * (h / 6.0);
    Ok(BodyState::new(q0 * exp_map(&theta), omega))
}

/// Inertial-frame angular velocity `ω = Q ᵇω`.
pub fn spatial_omega(state: &BodyState) -> Vector3 {
    state.attitude.apply(&state.omega)
}

/// Pointing direction `q = Q e₃`.
pub fn pointing(state: &BodyState) -> UnitVector3 {
    state.attitude.third_axis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::euler313;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn zero_control(_: f64, _: &BodyState) -> Result<Vector3> {
        Ok(Vector3::zeros())
    }

    #[test]
    fn principal_axis_spin_has_no_gyroscopic_term() {
        let p = RigidBodyParams::reference().free();
        let s = BodyState::new(RotationMatrix::identity(), Vector3::new(0.0, 0.0, 1.0));
        let (_, dw) = dynamics(&s, &Vector3::zeros(), &p);
        assert_eq!(dw, Vector3::zeros());
    }

    #[test]
    fn gyroscopic_cross_term() {
        let p = RigidBodyParams::reference().free();
        let s = BodyState::new(RotationMatrix::identity(), Vector3::new(1.0, 1.0, 0.0));
        let (_, dw) = dynamics(&s, &Vector3::zeros(), &p);
        // ω × Jω = [0, 0, J₂₂ − J₁₁] = [0, 0, 0.0011]
        assert!(dw.x.abs() < 1e-15 && dw.y.abs() < 1e-15);
        assert!((dw.z - (-0.0011 / 0.0495)).abs() < 1e-12);
        assert!((dw.z + 0.022222).abs() < 1e-6);
    }

    #[test]
    fn friction_term() {
        let p = RigidBodyParams::reference();
        let s = BodyState::new(RotationMatrix::identity(), Vector3::new(0.0, 0.0, 10.0));
        let (_, dw) = dynamics(&s, &Vector3::zeros(), &p);
        assert!((dw.z - (-3.0 / 0.0495)).abs() < 1e-10);
        assert!((dw.z + 60.606).abs() < 1e-3);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let p = RigidBodyParams::reference();
        let s = BodyState::new(euler313(0.4, 1.1), Vector3::zeros());
        let next = step(&s, zero_control, &p, 0.0, StepSize::DEFAULT).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn spatial_omega_cases() {
        let s = BodyState::new(RotationMatrix::identity(), Vector3::new(0.0, 0.3, 0.0));
        assert_eq!(spatial_omega(&s), Vector3::new(0.0, 0.3, 0.0));
        let s = BodyState::new(euler313(0.0, FRAC_PI_2), Vector3::zeros());
        assert_eq!(spatial_omega(&s), Vector3::zeros());
        let s = BodyState::new(euler313(0.0, FRAC_PI_2), Vector3::new(0.0, 0.0, 1.0));
        assert!((spatial_omega(&s) - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pointing_cases() {
        assert_eq!(*pointing(&BodyState::rest()).as_vector(), Vector3::z());
        let s = BodyState::new(euler313(0.0, 179f64.to_radians()), Vector3::zeros());
        assert!((pointing(&s).as_vector() - Vector3::new(0.0, -0.0175, -0.9998)).amax() < 5e-5);
        let s = BodyState::new(euler313(0.0, PI), Vector3::zeros());
        assert!((pointing(&s).as_vector() - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn damped_spin_down_matches_exponential() {
        let p = RigidBodyParams::reference();
        let mut s = BodyState::new(RotationMatrix::identity(), Vector3::new(0.0, 0.0, 10.0));
        let h = StepSize::DEFAULT;
        let mut t = 0.0;
        for _ in 0..1000 {
            s = step(&s, zero_control, &p, t, h).unwrap();
            t += h.get();
        }
        let exact = 10.0 * (-p.friction() * t / p.inertia().z).exp();
        assert!(((s.omega.z - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn parameter_validation() {
        assert!(
            RigidBodyParams::new(Vector3::new(0.03, -1.0, 0.05), 0.3, Vector3::zeros()).is_err()
        );
        assert!(
            RigidBodyParams::new(Vector3::new(0.03, 0.03, 0.05), -0.1, Vector3::zeros()).is_err()
        );
        assert!(StepSize::new(0.02).is_err());
        assert!(StepSize::new(0.0).is_err());
        assert!(StepSize::new(0.01).is_ok());
    }

    #[test]
    fn control_failure_propagates() {
        let p = RigidBodyParams::reference();
        let r = step(
            &BodyState::rest(),
            |_, _| Err(Error::OutsideDomain { margin: 0.0 }),
            &p,
            0.0,
            StepSize::DEFAULT,
        );
        assert!(matches!(r, Err(Error::OutsideDomain { .. })));
    }
}
