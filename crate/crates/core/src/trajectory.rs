//! Desired motion: quintic profiles, the spin-rate and tilt schedules of the
//! tracking maneuver, fixed stabilization setpoints, and their assembly into
//! a kinematically consistent [`DesiredState`].

use crate::error::{Error, Result};
use crate::so3::{euler313, rot_z, RotationMatrix, UnitVector3, Vector3};

/// Quintic polynomial `Σ αᵢ tⁱ` valid on `[start, end]` (absolute time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolySegment {
    coeffs: [f64; 6],
    /// Same polynomial in `t − start`.
    local: [f64; 6],
    start: f64,
    end: f64,
}

impl PolySegment {
    pub fn new(coeffs: [f64; 6], start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end)
            || !coeffs.iter().all(|c| c.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "polynomial segment needs finite coefficients and start < end, got [{start}, {end}]"
            )));
        }
        let mut local = [0.0; 6];
        for (j, l) in local.iter_mut().enumerate() {
            *l = (j..6)
                .map(|k| coeffs[k] * binomial(k, j) * start.powi((k - j) as i32))
                .sum();
        }
        Ok(Self {
            coeffs,
            local,
            start,
            end,
        })
    }

    /// Minimum-jerk transition from `y0` at `start` to `y1` at `end`, with
    /// zero velocity and acceleration at both ends, expanded into absolute-time
    /// coefficients.
    pub fn minimum_jerk(start: f64, end: f64, y0: f64, y1: f64) -> Result<Self> {
        let span = end - start;
        // y0 + (y1 − y0)(10s³ − 15s⁴ + 6s⁵), s = (t − start) / span
        let shape = [(3usize, 10.0), (4, -15.0), (5, 6.0)];
        let mut coeffs = [0.0; 6];
        coeffs[0] = y0;
        for (k, mk) in shape {
            let scale = (y1 - y0) * mk / span.powi(k as i32);
            for (j, c) in coeffs.iter_mut().enumerate().take(k + 1) {
                *c += scale * binomial(k, j) * (-start).powi((k - j) as i32);
            }
        }
        Self::new(coeffs, start, end)
    }

    pub fn coeffs(&self) -> &[f64; 6] {
        &self.coeffs
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// Value and first two derivatives at `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        if !(t >= self.start && t <= self.end) {
            return Err(Error::OutOfSegment {
                t,
                start: self.start,
                end: self.end,
            });
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> (f64, f64, f64) {
        let a = &self.local;
        let t = t - self.start;
        let v = horner(a, t);
        let d1 = horner(&[a[1], 2.0 * a[2], 3.0 * a[3], 4.0 * a[4], 5.0 * a[5]], t);
        let d2 = horner(&[2.0 * a[2], 6.0 * a[3], 12.0 * a[4], 20.0 * a[5]], t);
        (v, d1, d2)
    }

    /// `∫_start^t p(τ) dτ`, exact for the polynomial.
    pub fn integral_from_start(&self, t: f64) -> Result<f64> {
        self.eval(t)?;
        let a = &self.local;
        let anti = [
            0.0,
            a[0],
            a[1] / 2.0,
            a[2] / 3.0,
            a[3] / 4.0,
            a[4] / 5.0,
            a[5] / 6.0,
        ];
        Ok(horner(&anti, t - self.start))
    }
}

/// Value, rate and acceleration of [`PolySegment::eval`].
pub fn poly_eval(seg: &PolySegment, t: f64) -> Result<(f64, f64, f64)> {
    seg.eval(t)
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Spin-up coefficients, valid on `[0, 5]` s (rad/s).
pub const SPIN_UP: [f64; 6] = [0.0, 0.0, 0.0, 0.8, -0.24, 0.0192];
/// Spin-down coefficients, valid on `[10, 15]` s (rad/s, absolute time).
pub const SPIN_DOWN: [f64; 6] = [5130.0, -2160.0, 360.0, -29.6, 1.2, -0.0192];
/// Rounded `φ` coefficients on `[1, 8]` s (degrees).
pub const PHI_PRINTED: [f64; 6] = [-3.2183, 10.28, -11.57, 5.19, -0.7229, 0.0321];
/// Rounded `θ` coefficients on `[1, 8]` s (degrees).
pub const THETA_PRINTED: [f64; 6] = [182.2, -10.17, 11.44, -5.137, 0.7149, -0.0318];

/// Plateau spin rate, rad/s.
pub const SPIN_PLATEAU: f64 = 10.0;
/// Tilt held before the smooth segment starts, degrees.
pub const TILT_STEP_DEG: f64 = 179.0;

const TILT_START: f64 = 1.0;
const TILT_END: f64 = 8.0;

/// Spin rate, its derivative, and accumulated spin angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSample {
    pub rate: f64,
    pub rate_dot: f64,
    pub angle: f64,
}

/// Piecewise spin schedule: ramp to 10 rad/s over `[0, 5]`, hold until 10 s,
/// ramp down over `[10, 15]`, zero afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinProfile {
    up: PolySegment,
    down: PolySegment,
    up_area: f64,
    down_area: f64,
}

impl Default for SpinProfile {
    fn default() -> Self {
        let up = PolySegment::new(SPIN_UP, 0.0, 5.0).expect("valid segment");
        let down = PolySegment::new(SPIN_DOWN, 10.0, 15.0).expect("valid segment");
        let up_area = up.integral_from_start(5.0).expect("in segment");
        let down_area = down.integral_from_start(15.0).expect("in segment");
        Self {
            up,
            down,
            up_area,
            down_area,
        }
    }
}

impl SpinProfile {
    pub fn sample(&self, t: f64) -> SpinSample {
        let t = t.max(0.0);
        let plateau_start = self.up.end();
        let plateau_end = self.down.start();
        if t <= plateau_start {
            let (rate, rate_dot, _) = self.up.eval_unchecked(t);
            let angle = self.up.integral_from_start(t).unwrap_or(0.0);
            SpinSample {
                rate,
                rate_dot,
                angle,
            }
        } else if t <= plateau_end {
            SpinSample {
                rate: SPIN_PLATEAU,
                rate_dot: 0.0,
                angle: self.up_area + SPIN_PLATEAU * (t - plateau_start),
            }
        } else if t <= self.down.end() {
            let (rate, rate_dot, _) = self.down.eval_unchecked(t);
            let angle = self.up_area
                + SPIN_PLATEAU * (plateau_end - plateau_start)
                + self.down.integral_from_start(t).unwrap_or(0.0);
            SpinSample {
                rate,
                rate_dot,
                angle,
            }
        } else {
            SpinSample {
                rate: 0.0,
                rate_dot: 0.0,
                angle: self.up_area + SPIN_PLATEAU * (plateau_end - plateau_start) + self.down_area,
            }
        }
    }
}

/// `(ω₃, ω̇₃, ∫ω₃)` of the default spin schedule.
pub fn spin_profile(t: f64) -> (f64, f64, f64) {
    let s = SpinProfile::default().sample(t);
    (s.rate, s.rate_dot, s.angle)
}

/// Which coefficient set drives the tilt angles on `[1, 8]` s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiltCoefficients {
    /// Minimum-jerk quintics `θ: 179° → 90°`, `φ: 0° → 90°`. The printed
    /// set is these coefficients rounded to a few digits.
    #[default]
    MinimumJerk,
    /// The rounded coefficients. `φ(8)` lands at ≈86.7° instead of 90°.
    Printed,
}

impl std::str::FromStr for TiltCoefficients {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimum-jerk" => Ok(Self::MinimumJerk),
            "printed" => Ok(Self::Printed),
            other => Err(Error::InvalidParameter(format!(
                "unknown tilt coefficient set `{other}` (expected `minimum-jerk` or `printed`)"
            ))),
        }
    }
}

impl std::fmt::Display for TiltCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::MinimumJerk => "minimum-jerk",
            Self::Printed => "printed",
        })
    }
}

/// Tilt angles (radians) with first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerSample {
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    pub phi: f64,
    pub phi_dot: f64,
    pub phi_ddot: f64,
}

/// Tilt schedule: step-held `θ = 179°, φ = 0` before 1 s, quintic transition
/// over `[1, 8]`, hold afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProfile {
    theta: PolySegment,
    phi: PolySegment,
}

impl EulerProfile {
    pub fn new(set: TiltCoefficients) -> Self {
        let (theta, phi) = match set {
            TiltCoefficients::MinimumJerk => (
                PolySegment::minimum_jerk(TILT_START, TILT_END, TILT_STEP_DEG, 90.0),
                PolySegment::minimum_jerk(TILT_START, TILT_END, 0.0, 90.0),
            ),
            TiltCoefficients::Printed => (
                PolySegment::new(THETA_PRINTED, TILT_START, TILT_END),
                PolySegment::new(PHI_PRINTED, TILT_START, TILT_END),
            ),
        };
        Self {
            theta: theta.expect("valid segment"),
            phi: phi.expect("valid segment"),
        }
    }

    pub fn sample(&self, t: f64) -> EulerSample {
        let deg = 1f64.to_radians();
        if t < TILT_START {
            return EulerSample {
                theta: TILT_STEP_DEG * deg,
                theta_dot: 0.0,
                theta_ddot: 0.0,
                phi: 0.0,
                phi_dot: 0.0,
                phi_ddot: 0.0,
            };
        }
        let (tc, hold) = if t > TILT_END {
            (TILT_END, true)
        } else {
            (t, false)
        };
        let (th, thd, thdd) = self.theta.eval_unchecked(tc);
        let (ph, phd, phdd) = self.phi.eval_unchecked(tc);
        let rate = if hold { 0.0 } else { deg };
        EulerSample {
            theta: th * deg,
            theta_dot: thd * rate,
            theta_ddot: thdd * rate,
            phi: ph * deg,
            phi_dot: phd * rate,
            phi_ddot: phdd * rate,
        }
    }
}

impl Default for EulerProfile {
    fn default() -> Self {
        Self::new(TiltCoefficients::default())
    }
}

/// Tilt angles of the default schedule.
pub fn euler_profile(t: f64) -> EulerSample {
    EulerProfile::default().sample(t)
}

/// Desired pointing direction, attitude, body angular velocity and
/// acceleration at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredState {
    pub q_d: UnitVector3,
    pub attitude: RotationMatrix,
    pub omega: Vector3,
    pub omega_dot: Vector3,
}

impl DesiredState {
    /// Builds a desired state, checking `Q_d e₃ = q_d` within 1e−9.
    pub fn new(
        q_d: UnitVector3,
        attitude: RotationMatrix,
        omega: Vector3,
        omega_dot: Vector3,
    ) -> Result<Self> {
        let mismatch = (attitude.third_axis().as_vector() - q_d.as_vector()).norm();
        if mismatch > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "desired attitude does not point along q_d (mismatch {mismatch:e})"
            )));
        }
        Ok(Self {
            q_d,
            attitude,
            omega,
            omega_dot,
        })
    }

    /// A motionless desired state for attitude `attitude`.
    pub fn at_rest(attitude: RotationMatrix) -> Self {
        Self {
            q_d: attitude.third_axis(),
            attitude,
            omega: Vector3::zeros(),
            omega_dot: Vector3::zeros(),
        }
    }

    /// Inertial-frame desired angular velocity `Q_d ᵇω_d`.
    pub fn spatial_omega(&self) -> Vector3 {
        self.attitude.apply(&self.omega)
    }
}

/// Anything that can produce a desired state as a function of time.
pub trait Reference {
    fn desired(&self, t: f64) -> DesiredState;
}

/// The combined tilt-and-spin tracking maneuver.
///
/// `Q_d(t) = Q₃₁₃(φ, θ) · R₃(σ)` where `σ` is the accumulated spin angle, so
/// that the commanded spin is part of `Q_d` and `Q̇_d = Q_d(ᵇω_d)^×` holds.
/// Since `Q₃₁₃(φ, θ) = R₁(θ)R₃(φ)`, the body rate is available in closed form:
///
/// ```text
/// ᵇω_d = [θ̇ cos ψ, −θ̇ sin ψ, ψ̇],   ψ = φ + σ
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PdavTrajectory {
    pub tilt: EulerProfile,
    pub spin: SpinProfile,
}

impl PdavTrajectory {
    pub fn new(tilt: TiltCoefficients) -> Self {
        Self {
            tilt: EulerProfile::new(tilt),
            spin: SpinProfile::default(),
        }
    }

    /// Desired attitude only.
    pub fn attitude(&self, t: f64) -> RotationMatrix {
        let e = self.tilt.sample(t);
        let s = self.spin.sample(t);
        euler313(e.phi, e.theta) * rot_z(s.angle)
    }
}

impl Reference for PdavTrajectory {
    fn desired(&self, t: f64) -> DesiredState {
        let e = self.tilt.sample(t);
        let s = self.spin.sample(t);
        let attitude = euler313(e.phi, e.theta) * rot_z(s.angle);

        let (sin_psi, cos_psi) = (e.phi + s.angle).sin_cos();
        let psi_dot = e.phi_dot + s.rate;
        let psi_ddot = e.phi_ddot + s.rate_dot;
        let omega = Vector3::new(e.theta_dot * cos_psi, -e.theta_dot * sin_psi, psi_dot);
        let omega_dot = Vector3::new(
            e.theta_ddot * cos_psi - e.theta_dot * psi_dot * sin_psi,
            -e.theta_ddot * sin_psi - e.theta_dot * psi_dot * cos_psi,
            psi_ddot,
        );
        DesiredState {
            q_d: attitude.third_axis(),
            attitude,
            omega,
            omega_dot,
        }
    }
}

/// Desired state of the default tracking maneuver.
pub fn desired_state(t: f64) -> DesiredState {
    PdavTrajectory::default().desired(t)
}

/// Fixed setpoints held one after another, switching at `switch_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetpointSchedule {
    targets: Vec<RotationMatrix>,
    switch_time: f64,
}

/// Default switch time between stabilization setpoints, seconds.
pub const DEFAULT_SWITCH_TIME: f64 = 10.0;

impl SetpointSchedule {
    /// The two stabilization setpoints: 179° about `E₁`, then back 89° to
    /// 90° about `E₁`.
    pub fn stabilization(switch_time: f64) -> Result<Self> {
        if !(switch_time.is_finite() && switch_time > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "switch time must be positive, got {switch_time}"
            )));
        }
        Ok(Self {
            targets: vec![
                euler313(0.0, 179f64.to_radians()),
                euler313(0.0, 90f64.to_radians()),
            ],
            switch_time,
        })
    }

    pub fn switch_time(&self) -> f64 {
        self.switch_time
    }

    pub fn leg_count(&self) -> usize {
        self.targets.len()
    }

    /// Index of the leg active at `t`.
    pub fn leg(&self, t: f64) -> usize {
        let k = (t / self.switch_time).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.targets.len() - 1)
        }
    }

    /// `[start, end)` of leg `i`; the last leg is open-ended.
    pub fn leg_bounds(&self, i: usize) -> (f64, f64) {
        let start = i as f64 * self.switch_time;
        let end = if i + 1 == self.targets.len() {
            f64::INFINITY
        } else {
            start + self.switch_time
        };
        (start, end)
    }

    /// `(q_d, switch time)` pairs, where the switch time is when each target
    /// becomes active.
    pub fn targets(&self) -> Vec<(UnitVector3, f64)> {
        self.targets
            .iter()
            .enumerate()
            .map(|(i, r)| (r.third_axis(), self.leg_bounds(i).0))
            .collect()
    }
}

impl Reference for SetpointSchedule {
    fn desired(&self, t: f64) -> DesiredState {
        DesiredState::at_rest(self.targets[self.leg(t)])
    }
}

/// The two stabilization setpoints with the default switch time.
pub fn stabilization_targets() -> Vec<(UnitVector3, f64)> {
    SetpointSchedule::stabilization(DEFAULT_SWITCH_TIME)
        .expect("default switch time is valid")
        .targets()
}
