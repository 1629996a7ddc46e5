//! Tracking and stabilization control laws.
//!
//! * [`pdav_control`]: the sliding-surface tracking law that follows a
//!   pointing direction and an angular velocity about it, using estimated
//!   inertia, friction and external moment.
//! * [`benchmark_control`]: the reduced-attitude stabilizer built on
//!   `e_r = q_d × q`, with perfect cancellation of the body dynamics.
//! * [`modified_benchmark_control`]: the same structure with `e_r` replaced
//!   by `Q ᵇe_q`.
//!
//! [`upsilon`] and [`ultimate_bound`] are diagnostics. They need the true
//! parameters, which a real controller does not have.

use crate::attitude_error::{self, relative_desired_omega};
use crate::error::{Error, Result};
use crate::rigid_body::{pointing, validate_inertia, BodyState, RigidBodyParams};
use crate::so3::{UnitVector3, Vector3};
use crate::trajectory::DesiredState;

/// Gains `Λ`, `η`, `γ` of the tracking law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdavGains {
    lambda: f64,
    eta: f64,
    gamma: f64,
}

impl PdavGains {
    pub fn new(lambda: f64, eta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("eta", eta), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(Self { lambda, eta, gamma })
    }

    /// `Λ = 144, η = 24, γ = 10`.
    pub fn reference() -> Self {
        Self {
            lambda: 144.0,
            eta: 24.0,
            gamma: 10.0,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.lambda, self.eta, gamma)
    }
}

impl Default for PdavGains {
    fn default() -> Self {
        Self::reference()
    }
}

/// Diagonal gain matrices `K_r`, `K_ω` of the stabilizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkGains {
    k_r: Vector3,
    k_omega: Vector3,
}

impl BenchmarkGains {
    pub fn new(k_r: Vector3, k_omega: Vector3) -> Result<Self> {
        for (name, v) in [("k_r", &k_r), ("k_omega", &k_omega)] {
            if !v.iter().all(|x| x.is_finite() && *x > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} diagonal entries must be strictly positive"
                )));
            }
        }
        Ok(Self { k_r, k_omega })
    }

    /// `K_r = diag(4.234, 4.392, 7.128)`, `K_ω = diag(0.7056, 0.7320, 1.188)`.
    pub fn reference() -> Self {
        Self {
            k_r: Vector3::new(4.234, 4.392, 7.128),
            k_omega: Vector3::new(0.7056, 0.7320, 1.188),
        }
    }

    pub fn k_r(&self) -> &Vector3 {
        &self.k_r
    }

    pub fn k_omega(&self) -> &Vector3 {
        &self.k_omega
    }
}

impl Default for BenchmarkGains {
    fn default() -> Self {
        Self::reference()
    }
}

/// Parameter estimates used inside the tracking law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelEstimate {
    inertia: Vector3,
    friction: f64,
    external_moment: Vector3,
}

impl ModelEstimate {
    pub fn new(inertia: Vector3, friction: f64, external_moment: Vector3) -> Result<Self> {
        let p = RigidBodyParams::new(inertia, friction, external_moment)?;
        Ok(Self::perfect(&p))
    }

    /// Estimates equal to the true parameters.
    pub fn perfect(p: &RigidBodyParams) -> Self {
        Self {
            inertia: *p.inertia(),
            friction: p.friction(),
            external_moment: *p.external_moment(),
        }
    }

    /// `Ĵ = inertia_scale · J`, `ĉ = friction_scale · c`, `τ̂ = τ`.
    pub fn scaled(p: &RigidBodyParams, inertia_scale: f64, friction_scale: f64) -> Result<Self> {
        let inertia = p.inertia() * inertia_scale;
        validate_inertia(&inertia)?;
        let friction = p.friction() * friction_scale;
        if !(friction.is_finite() && friction >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "estimated friction must be >= 0, got {friction}"
            )));
        }
        Ok(Self {
            inertia,
            friction,
            external_moment: *p.external_moment(),
        })
    }

    pub fn with_external_moment(mut self, tau_hat: Vector3) -> Self {
        self.external_moment = tau_hat;
        self
    }

    pub fn inertia(&self) -> &Vector3 {
        &self.inertia
    }

    pub fn friction(&self) -> f64 {
        self.friction
    }

    pub fn external_moment(&self) -> &Vector3 {
        &self.external_moment
    }

    fn as_params(&self) -> RigidBodyParams {
        RigidBodyParams::new(self.inertia, self.friction, self.external_moment)
            .expect("estimate invariants hold")
    }
}

/// Output of the tracking law together with the quantities it was built
/// from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDiagnostics {
    pub u: Vector3,
    pub s: Vector3,
    pub psi: f64,
    pub psi_dot: f64,
    pub e_q: Vector3,
    pub e_q_dot: Vector3,
    pub e_omega: Vector3,
    /// `½‖s‖²`.
    pub v: f64,
}

/// `s = (Λ + Ψ) ᵇe_q + η ᵇe_ω`.
pub fn sliding_surface(psi: f64, e_q: &Vector3, e_omega: &Vector3, gains: &PdavGains) -> Vector3 {
    e_q * (gains.lambda + psi) + e_omega * gains.eta
}

/// `J⁻¹((Jᵇω) × ᵇω − cᵇω + τ)` for either the true or estimated parameters.
fn drift(p: &RigidBodyParams, omega: &Vector3) -> Vector3 {
    p.apply_inverse_inertia(
        &(p.apply_inertia(omega).cross(omega) - omega * p.friction() + p.external_moment()),
    )
}

/// Intermediate terms shared by the control law and the mismatch
/// diagnostic. `f` is evaluated with whichever parameters are passed in.
struct Terms {
    psi: f64,
    psi_dot: f64,
    e_q: Vector3,
    e_q_dot: Vector3,
    e_omega: Vector3,
    d: Vector3,
    s: Vector3,
}

impl Terms {
    fn new(state: &BodyState, desired: &DesiredState, gains: &PdavGains) -> Result<Self> {
        let q = pointing(state);
        let qd = &desired.q_d;
        let omega_spatial = state.attitude.apply(&state.omega);
        let omega_d_spatial = desired.spatial_omega();

        let psi = attitude_error::psi(&q, qd)?;
        let e_q = attitude_error::e_q(&q, qd, &state.attitude)?;
        let psi_dot = attitude_error::psi_dot(&q, qd, &omega_spatial, &omega_d_spatial)?;
        let e_q_dot = attitude_error::e_q_dot(
            &q,
            qd,
            &state.attitude,
            &omega_spatial,
            &omega_d_spatial,
            &state.omega,
        )?;
        let e_omega = attitude_error::e_omega(
            &state.omega,
            &desired.omega,
            &state.attitude,
            &desired.attitude,
        );
        let d = state.omega.cross(&relative_desired_omega(
            &desired.omega,
            &state.attitude,
            &desired.attitude,
        )) - relative_desired_omega(&desired.omega_dot, &state.attitude, &desired.attitude);
        let s = sliding_surface(psi, &e_q, &e_omega, gains);
        Ok(Self {
            psi,
            psi_dot,
            e_q,
            e_q_dot,
            e_omega,
            d,
            s,
        })
    }

    /// `−(Λ + Ψ) ᵇė_q − Ψ̇ ᵇe_q`.
    fn surface_feedforward(&self, gains: &PdavGains) -> Vector3 {
        -self.e_q_dot * (gains.lambda + self.psi) - self.e_q * self.psi_dot
    }
}

/// Tracking control moment
///
/// `ᵇu = η⁻¹Ĵ(−η(f̂ + d) − (Λ + Ψ)ᵇė_q − Ψ̇ ᵇe_q − γs)`
///
/// with `d = ᵇω × QᵀQ_dᵇω_d − QᵀQ_dᵇω̇_d` and `f̂` the drift term evaluated
/// with the estimates. With perfect estimates the closed loop satisfies
/// `ṡ = −γs`.
pub fn pdav_control(
    state: &BodyState,
    desired: &DesiredState,
    gains: &PdavGains,
    est: &ModelEstimate,
) -> Result<ControlDiagnostics> {
    let terms = Terms::new(state, desired, gains)?;
    let f_hat = drift(&est.as_params(), &state.omega);
    let inner =
        -(f_hat + terms.d) * gains.eta + terms.surface_feedforward(gains) - terms.s * gains.gamma;
    let u = est.inertia.component_mul(&inner) / gains.eta;
    Ok(ControlDiagnostics {
        u,
        s: terms.s,
        psi: terms.psi,
        psi_dot: terms.psi_dot,
        e_q: terms.e_q,
        e_q_dot: terms.e_q_dot,
        e_omega: terms.e_omega,
        v: 0.5 * terms.s.norm_squared(),
    })
}

/// Model-mismatch term
///
/// `Υ = η(f − f̂) + (J⁻¹Ĵ − I)(−η(f̂ + d) − Ψ̇ ᵇe_q − (Λ + Ψ)ᵇė_q)`
///
/// so that the closed loop obeys `ṡ = −γJ⁻¹Ĵs + Υ`.
pub fn upsilon(
    state: &BodyState,
    desired: &DesiredState,
    gains: &PdavGains,
    est: &ModelEstimate,
    p_true: &RigidBodyParams,
) -> Result<Vector3> {
    let terms = Terms::new(state, desired, gains)?;
    let f = drift(p_true, &state.omega);
    let f_hat = drift(&est.as_params(), &state.omega);
    let ratio = est.inertia.component_div(p_true.inertia()) - Vector3::repeat(1.0);
    let inner = -(f_hat + terms.d) * gains.eta + terms.surface_feedforward(gains);
    Ok((f - f_hat) * gains.eta + ratio.component_mul(&inner))
}

/// Per-axis radius `|Υ_j| J_jj / (γ Ĵ_jj)` of the residual set that `s`
/// converges into.
pub fn ultimate_bound(upsilon_j: f64, j_jj: f64, j_hat_jj: f64, gamma: f64) -> f64 {
    upsilon_j.abs() * j_jj / (gamma * j_hat_jj)
}

/// The three per-axis radii for a mismatch vector.
pub fn ultimate_bounds(
    upsilon: &Vector3,
    p_true: &RigidBodyParams,
    est: &ModelEstimate,
    gains: &PdavGains,
) -> Vector3 {
    Vector3::from_fn(|j, _| {
        ultimate_bound(upsilon[j], p_true.inertia()[j], est.inertia[j], gains.gamma)
    })
}

/// `Qᵀ(−K_r a − K_ω ω) + ᵇω × Jᵇω + cᵇω − τ`, with `a` the inertial-frame
/// attitude error.
fn stabilizer(
    state: &BodyState,
    attitude_error_spatial: &Vector3,
    gains: &BenchmarkGains,
    p: &RigidBodyParams,
) -> Vector3 {
    let omega_spatial = state.attitude.apply(&state.omega);
    let feedback = -gains.k_r.component_mul(attitude_error_spatial)
        - gains.k_omega.component_mul(&omega_spatial);
    state.attitude.transpose().apply(&feedback) + cancellation(state, p)
}

/// `ᵇω × Jᵇω + cᵇω − τ`, shared by both stabilizers.
fn cancellation(state: &BodyState, p: &RigidBodyParams) -> Vector3 {
    let w = &state.omega;
    w.cross(&p.apply_inertia(w)) + w * p.friction() - p.external_moment()
}

/// Reduced-attitude stabilizer on `e_r = q_d × q`. Uses the true parameters.
pub fn benchmark_control(
    state: &BodyState,
    qd: &UnitVector3,
    gains: &BenchmarkGains,
    p: &RigidBodyParams,
) -> Vector3 {
    let e_r = attitude_error::e_r(&pointing(state), qd);
    stabilizer(state, &e_r, gains, p)
}

/// The stabilizer with `e_r` replaced by `Q ᵇe_q`. Uses the true parameters.
pub fn modified_benchmark_control(
    state: &BodyState,
    qd: &UnitVector3,
    gains: &BenchmarkGains,
    p: &RigidBodyParams,
) -> Result<Vector3> {
    let e_q = attitude_error::e_q(&pointing(state), qd, &state.attitude)?;
    Ok(stabilizer(state, &state.attitude.apply(&e_q), gains, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attitude_error::e_omega_dot;
    use crate::so3::{euler313, exp_map, rot_x, RotationMatrix};

    fn spin_state(rate: f64) -> (BodyState, DesiredState) {
        let r = euler313(0.3, 1.0);
        let w = Vector3::new(0.0, 0.0, rate);
        let state = BodyState::new(r, w);
        let desired = DesiredState::new(r.third_axis(), r, w, Vector3::zeros()).unwrap();
        (state, desired)
    }

    #[test]
    fn equilibrium_gives_zero_control() {
        let p = RigidBodyParams::reference();
        let r = euler313(0.5, 2.0);
        let state = BodyState::new(r, Vector3::zeros());
        let d = DesiredState::at_rest(r);
        let out = pdav_control(
            &state,
            &d,
            &PdavGains::reference(),
            &ModelEstimate::perfect(&p),
        )
        .unwrap();
        assert_eq!(out.u, Vector3::zeros());
        assert_eq!(out.s, Vector3::zeros());
        assert_eq!(out.v, 0.0);
    }

    #[test]
    fn pure_spin_needs_only_friction_feedforward() {
        let p = RigidBodyParams::reference();
        let (state, desired) = spin_state(10.0);
        let out = pdav_control(
            &state,
            &desired,
            &PdavGains::reference(),
            &ModelEstimate::perfect(&p),
        )
        .unwrap();
        assert!(
            (out.u - Vector3::new(0.0, 0.0, 3.0)).norm() < 1e-12,
            "{}",
            out.u
        );
        assert!(out.s.norm() < 1e-12);
    }

    #[test]
    fn flipping_desired_spin_flips_control() {
        let p = RigidBodyParams::reference();
        let est = ModelEstimate::perfect(&p);
        let g = PdavGains::reference();
        let (s1, d1) = spin_state(4.0);
        let (s2, d2) = spin_state(-4.0);
        let u1 = pdav_control(&s1, &d1, &g, &est).unwrap().u;
        let u2 = pdav_control(&s2, &d2, &g, &est).unwrap().u;
        assert!((u1 + u2).norm() < 1e-12);
        assert!(u1.norm() > 0.1);
    }

    #[test]
    fn perfect_model_lyapunov_derivative() {
        let p = RigidBodyParams::reference();
        let g = PdavGains::reference();
        let state = BodyState::new(
            exp_map(&Vector3::new(0.4, -1.1, 0.3)),
            Vector3::new(0.5, -0.2, 3.0),
        );
        let qd_att = euler313(0.9, 2.1);
        let desired = DesiredState::new(
            qd_att.third_axis(),
            qd_att,
            Vector3::new(0.3, 0.1, 6.0),
            Vector3::new(-0.2, 0.4, 1.0),
        )
        .unwrap();
        let out = pdav_control(&state, &desired, &g, &ModelEstimate::perfect(&p)).unwrap();
        let de_w = e_omega_dot(
            &state,
            &out.u,
            &p,
            &desired.attitude,
            &desired.omega,
            &desired.omega_dot,
        );
        let s_dot = out.e_q * out.psi_dot + out.e_q_dot * (g.lambda() + out.psi) + de_w * g.eta();
        let v_dot = out.s.dot(&s_dot);
        let expected = -g.gamma() * out.s.norm_squared();
        assert!(
            (v_dot - expected).abs() < 1e-8 * expected.abs().max(1.0),
            "{v_dot} vs {expected}"
        );
    }

    #[test]
    fn sliding_surface_cases() {
        let g = PdavGains::reference();
        let z = Vector3::zeros();
        assert_eq!(sliding_surface(0.0, &z, &z, &g), z);
        let s = sliding_surface(0.5, &Vector3::new(0.1, 0.0, 0.0), &z, &g);
        assert!((s - Vector3::new(14.45, 0.0, 0.0)).norm() < 1e-12);
        assert_eq!(
            sliding_surface(0.0, &z, &Vector3::z(), &g),
            Vector3::new(0.0, 0.0, 24.0)
        );
    }

    #[test]
    fn benchmark_cases() {
        let p = RigidBodyParams::reference();
        let g = BenchmarkGains::reference();
        let rest = BodyState::rest();
        let e3 = UnitVector3::e3();
        assert_eq!(benchmark_control(&rest, &e3, &g, &p), Vector3::zeros());
        assert_eq!(benchmark_control(&rest, &-e3, &g, &p).norm(), 0.0);
        // e_r = e₁ × e₃ = −e₂, so u = −K_r e_r = [0, 4.392, 0].
        assert_eq!(
            UnitVector3::e1().as_vector().cross(&Vector3::z()),
            -Vector3::y()
        );
        let u = benchmark_control(&rest, &UnitVector3::e1(), &g, &p);
        assert!((u - Vector3::new(0.0, 4.392, 0.0)).norm() < 1e-15);
        assert_eq!(
            modified_benchmark_control(&rest, &e3, &g, &p).unwrap(),
            Vector3::zeros()
        );
        assert!(modified_benchmark_control(&rest, &-e3, &g, &p).is_err());
    }

    #[test]
    fn modified_benchmark_attitude_term_ratio() {
        let p = RigidBodyParams::reference();
        let g = BenchmarkGains::reference();
        let rest = BodyState::rest();
        for (deg, ratio) in [
            (
                179.0f64,
                89.5f64.to_radians().sin() / 179f64.to_radians().sin(),
            ),
            (1e-3, 0.5),
        ] {
            let qd = rot_x(deg.to_radians()).third_axis();
            let u28 = benchmark_control(&rest, &qd, &g, &p);
            let u29 = modified_benchmark_control(&rest, &qd, &g, &p).unwrap();
            assert!((u29.norm() / u28.norm() - ratio).abs() < 1e-6 * ratio);
            assert!(u28.cross(&u29).norm() < 1e-12 * u29.norm());
        }
        let r = 89.5f64.to_radians().sin() / 179f64.to_radians().sin();
        assert!((r - 57.3).abs() < 0.05);
    }

    #[test]
    fn stabilizers_share_cancellation_terms() {
        let p = RigidBodyParams::reference();
        let g = BenchmarkGains::reference();
        let state = BodyState::new(
            exp_map(&Vector3::new(0.1, 0.7, -0.2)),
            Vector3::new(1.0, -0.5, 2.0),
        );
        let qd = euler313(0.2, 1.3).third_axis();
        let u28 = benchmark_control(&state, &qd, &g, &p);
        let u29 = modified_benchmark_control(&state, &qd, &g, &p).unwrap();
        let q = pointing(&state);
        let e_r = attitude_error::e_r(&q, &qd);
        let e_q_spatial = state
            .attitude
            .apply(&attitude_error::e_q(&q, &qd, &state.attitude).unwrap());
        let expected = state
            .attitude
            .transpose()
            .apply(&-g.k_r().component_mul(&(e_r - e_q_spatial)));
        assert!((u28 - u29 - expected).norm() < 1e-13);
    }

    #[test]
    fn upsilon_vanishes_with_perfect_estimates() {
        let p = RigidBodyParams::reference();
        let g = PdavGains::reference();
        let state = BodyState::new(
            exp_map(&Vector3::new(0.4, -1.1, 0.3)),
            Vector3::new(0.5, -0.2, 3.0),
        );
        let desired = DesiredState::at_rest(euler313(0.9, 2.1));
        let y = upsilon(&state, &desired, &g, &ModelEstimate::perfect(&p), &p).unwrap();
        assert_eq!(y, Vector3::zeros());

        let est = ModelEstimate::scaled(&p, 1.14, 1.03).unwrap();
        let r = RotationMatrix::identity();
        let y = upsilon(&BodyState::rest(), &DesiredState::at_rest(r), &g, &est, &p).unwrap();
        assert_eq!(y, Vector3::zeros());
    }

    #[test]
    fn ultimate_bound_cases() {
        assert_eq!(ultimate_bound(0.0, 0.03, 0.04, 10.0), 0.0);
        assert!((ultimate_bound(-1.0, 0.03, 0.03, 10.0) - 0.1).abs() < 1e-15);
        let a = ultimate_bound(2.5, 0.03, 0.0342, 10.0);
        let b = ultimate_bound(2.5, 0.03, 0.0342, 20.0);
        assert!((a - 2.0 * b).abs() < 1e-15);
    }

    #[test]
    fn gain_validation() {
        assert!(PdavGains::new(144.0, 0.0, 10.0).is_err());
        assert!(BenchmarkGains::new(Vector3::new(1.0, -1.0, 1.0), Vector3::repeat(1.0)).is_err());
        let p = RigidBodyParams::reference();
        assert!(ModelEstimate::scaled(&p, -1.0, 1.0).is_err());
    }
}
