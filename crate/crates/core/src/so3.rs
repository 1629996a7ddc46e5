//! Rotation-group and two-sphere primitives.
//!
//! Vectors and matrices are plain `nalgebra` types. The two newtypes,
//! [`UnitVector3`] and [`RotationMatrix`], carry the unit-norm and
//! orthonormality invariants so the rest of the crate can rely on them.

use std::ops::Mul;

use crate::error::{Error, Result};

pub type Vector3 = nalgebra::Vector3<f64>;
pub type Matrix3 = nalgebra::Matrix3<f64>;

/// Tolerance on `| ‖v‖ − 1 |` for [`UnitVector3`].
pub const UNIT_TOLERANCE: f64 = 1e-9;
/// Tolerance on `‖mᵀm − I‖_F` and `|det m − 1|` for [`RotationMatrix`].
pub const ROTATION_TOLERANCE: f64 = 1e-9;
/// Tolerance on the symmetric part accepted by [`vee`].
pub const SKEW_TOLERANCE: f64 = 1e-9;

/// Below this angle [`exp_map`] returns the identity.
const EXP_SMALL_ANGLE: f64 = 1e-12;

/// A point on the two-sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vector3);

impl UnitVector3 {
    /// Wraps `v`, failing if it is not unit length within [`UNIT_TOLERANCE`].
    pub fn new(v: Vector3) -> Result<Self> {
        let deviation = (v.norm() - 1.0).abs();
        if !deviation.is_finite() || deviation > UNIT_TOLERANCE {
            return Err(Error::NotUnit { deviation });
        }
        Ok(Self(v))
    }

    /// Normalizes `v`. Fails on zero or non-finite input.
    pub fn normalize(v: Vector3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotUnit {
                deviation: f64::NAN,
            });
        }
        Ok(Self(v / n))
    }

    pub fn e1() -> Self {
        Self(Vector3::x())
    }

    pub fn e2() -> Self {
        Self(Vector3::y())
    }

    pub fn e3() -> Self {
        Self(Vector3::z())
    }

    #[inline]
    pub fn as_vector(&self) -> &Vector3 {
        &self.0
    }

    #[inline]
    pub fn into_vector(self) -> Vector3 {
        self.0
    }

    #[inline]
    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.0.dot(&other.0)
    }
}

impl std::ops::Neg for UnitVector3 {
    type Output = UnitVector3;
    fn neg(self) -> Self::Output {
        Self(-self.0)
    }
}

/// An element of SO(3), mapping body-frame vectors to the inertial frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3);

impl RotationMatrix {
    /// Wraps `m`, checking orthonormality and determinant against
    /// [`ROTATION_TOLERANCE`].
    pub fn new(m: Matrix3) -> Result<Self> {
        let orthogonality = orthogonality_error(&m);
        let det = m.determinant();
        if !orthogonality.is_finite()
            || orthogonality > ROTATION_TOLERANCE
            || (det - 1.0).abs() > ROTATION_TOLERANCE
        {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix3 {
        &self.0
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Rotates a vector.
    #[inline]
    pub fn apply(&self, v: &Vector3) -> Vector3 {
        self.0 * v
    }

    /// Rotates a direction; the result is renormalized.
    pub fn apply_unit(&self, v: &UnitVector3) -> UnitVector3 {
        let w = self.0 * v.as_vector();
        UnitVector3(w / w.norm())
    }

    /// Third column, i.e. the image of the body `e₃` axis.
    pub fn third_axis(&self) -> UnitVector3 {
        let w: Vector3 = self.0.column(2).into_owned();
        UnitVector3(w / w.norm())
    }

    /// `‖mᵀm − I‖_F`.
    pub fn orthogonality_error(&self) -> f64 {
        orthogonality_error(&self.0)
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl Mul<&RotationMatrix> for &RotationMatrix {
    type Output = RotationMatrix;
    fn mul(self, rhs: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * rhs.0)
    }
}

fn orthogonality_error(m: &Matrix3) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// Skew-symmetric matrix of `r`, so that `hat(r) * w == r.cross(&w)`.
#[rustfmt::skip]
pub fn hat(r: &Vector3) -> Matrix3 {
    Matrix3::new(
        0.0, -r.z,  r.y,
        r.z,  0.0, -r.x,
       -r.y,  r.x,  0.0,
    )
}

/// Inverse of [`hat`]. The input must be skew-symmetric within
/// [`SKEW_TOLERANCE`]; the antisymmetric part is what gets read.
pub fn vee(m: &Matrix3) -> Result<Vector3> {
    let sym = m + m.transpose();
    let deviation = sym.amax();
    if !deviation.is_finite() || deviation > SKEW_TOLERANCE {
        return Err(Error::NotSkewSymmetric { deviation });
    }
    Ok(vee_antisymmetric(m))
}

/// Reads the axial vector of the antisymmetric part of `m`, without checking.
pub fn vee_antisymmetric(m: &Matrix3) -> Vector3 {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rodrigues exponential of the rotation vector `xi` (angle `‖xi‖`, axis
/// `xi / ‖xi‖`).
pub fn exp_map(xi: &Vector3) -> RotationMatrix {
    let angle = xi.norm();
    if angle < EXP_SMALL_ANGLE {
        return RotationMatrix::identity();
    }
    let k = hat(&(xi / angle));
    let m = Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos());
    RotationMatrix(m)
}

/// Elementary rotation about the first axis.
#[rustfmt::skip]
pub fn rot_x(angle: f64) -> RotationMatrix {
    let (s, c) = angle.sin_cos();
    RotationMatrix(Matrix3::new(
        1.0, 0.0, 0.0,
        0.0,   c,  -s,
        0.0,   s,   c,
    ))
}

/// Elementary rotation about the third axis.
#[rustfmt::skip]
pub fn rot_z(angle: f64) -> RotationMatrix {
    let (s, c) = angle.sin_cos();
    RotationMatrix(Matrix3::new(
          c,  -s, 0.0,
          s,   c, 0.0,
        0.0, 0.0, 1.0,
    ))
}

/// 3-1-3 Euler rotation with the last angle fixed at zero:
/// `R₁(gamma2) · R₃(gamma1)`.
pub fn euler313(gamma1: f64, gamma2: f64) -> RotationMatrix {
    rot_x(gamma2) * rot_z(gamma1)
}

/// Angle between two directions, in `[0, π]`.
pub fn sphere_angle(q: &UnitVector3, qd: &UnitVector3) -> f64 {
    let a = qd.as_vector();
    let b = q.as_vector();
    a.cross(b).norm().atan2(a.dot(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn hat_layout() {
        let m = hat(&Vector3::new(1.0, 2.0, 3.0));
        let expected = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(m, expected);
        assert_eq!(hat(&Vector3::zeros()), Matrix3::zeros());
        assert_eq!(hat(&Vector3::x()) * Vector3::y(), Vector3::z());
    }

    #[test]
    fn vee_reads_layout() {
        let m = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(vee(&m).unwrap(), Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(vee(&Matrix3::zeros()).unwrap(), Vector3::zeros());
        let r = Vector3::new(-0.3, 7.25, 1e-7);
        assert_eq!(vee(&hat(&r)).unwrap(), r);
    }

    #[test]
    fn vee_rejects_symmetric_part() {
        let mut m = hat(&Vector3::new(1.0, 2.0, 3.0));
        m[(0, 1)] += 1e-6;
        assert!(matches!(vee(&m), Err(Error::NotSkewSymmetric { .. })));
    }

    #[test]
    fn exp_map_cases() {
        assert_eq!(exp_map(&Vector3::zeros()), RotationMatrix::identity());
        assert_eq!(
            exp_map(&Vector3::new(1e-13, 0.0, 0.0)),
            RotationMatrix::identity()
        );
        let r = exp_map(&Vector3::new(0.0, 0.0, FRAC_PI_2));
        assert!((r.apply(&Vector3::x()) - Vector3::y()).norm() < 1e-12);
    }

    #[test]
    fn euler313_cases() {
        assert!((euler313(0.0, 0.0).matrix() - Matrix3::identity()).norm() == 0.0);
        let q = euler313(0.0, 179f64.to_radians()).third_axis();
        let expected = Vector3::new(0.0, -0.0175, -0.9998);
        assert!((q.as_vector() - expected).amax() < 5e-5);
        let q = euler313(FRAC_PI_2, FRAC_PI_2).third_axis();
        assert!((q.as_vector() - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sphere_angle_cases() {
        let e3 = UnitVector3::e3();
        assert_eq!(sphere_angle(&e3, &e3), 0.0);
        assert!((sphere_angle(&e3, &-e3) - PI).abs() < 1e-15);
        assert!((sphere_angle(&e3, &UnitVector3::e1()) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn newtype_validation() {
        assert!(UnitVector3::new(Vector3::new(1.0, 1e-6, 0.0)).is_ok());
        assert!(UnitVector3::new(Vector3::new(1.0, 1e-4, 0.0)).is_err());
        assert!(UnitVector3::normalize(Vector3::zeros()).is_err());
        let mut m = Matrix3::identity();
        m[(2, 2)] = -1.0;
        assert!(matches!(
            RotationMatrix::new(m),
            Err(Error::NotRotation { .. })
        ));
        assert!(RotationMatrix::new(*exp_map(&Vector3::new(0.3, -2.0, 1.0)).matrix()).is_ok());
    }
}
