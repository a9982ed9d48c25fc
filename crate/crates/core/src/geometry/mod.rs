//! Rigid-body primitives shared by the rest of the crate.
//!
//! Coordinates use column vectors throughout: a frame `(R, t)` maps a point
//! `p` expressed in the frame's local coordinates to `R * p + t`.

mod igso3;
mod kabsch;
mod so3;

pub use igso3::{igso3_angle_density, igso3_sample, Igso3Table};
pub use kabsch::{kabsch_align, rmsd, Alignment};
pub use so3::{geodesic_distance, RotationLog};

use nalgebra::{Matrix3, Vector3};
use std::ops::Mul;
use thiserror::Error;

/// A point or direction in 3D. Coordinates are in Ångström.
pub type Vec3 = Vector3<f64>;

/// Minimum vector length accepted by [`gram_schmidt_rotation`].
pub const DEFAULT_EPS_LEN: f64 = 1e-8;
/// Minimum angle (radians) between the two frame vectors.
pub const DEFAULT_EPS_ANG: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("point sets differ in size ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("empty point set")]
    EmptyInput,
    #[error("matrix is not a proper rotation (deviation {deviation:.3e})")]
    NotARotation { deviation: f64 },
    #[error("cannot project a rank-deficient matrix onto SO(3)")]
    ProjectionFailure,
    #[error("non-finite value in input")]
    NonFinite,
}

/// A proper rotation matrix (`RᵀR = I`, `det R = +1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    /// Tolerance used when validating a matrix as a rotation.
    pub const TOLERANCE: f64 = 1e-9;

    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Validates `m` against the rotation invariants.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let deviation = orthonormality_deviation(&m);
        if deviation > Self::TOLERANCE {
            return Err(GeometryError::NotARotation { deviation });
        }
        Ok(Rotation(m))
    }

    /// Wraps `m` without validation. Callers guarantee the invariants.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rotation(m)
    }

    /// Builds a rotation from three orthonormal column vectors.
    pub fn from_columns(c1: Vec3, c2: Vec3, c3: Vec3) -> Result<Self, GeometryError> {
        Self::from_matrix(Matrix3::from_columns(&[c1, c2, c3]))
    }

    /// Nearest rotation in Frobenius norm (polar decomposition).
    pub fn nearest(m: &Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let svd = m.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(GeometryError::ProjectionFailure),
        };
        let s = svd.singular_values;
        let smax = s.max();
        if !(smax > 0.0) || s.min() <= smax * 1e-12 {
            return Err(GeometryError::ProjectionFailure);
        }
        let d = (u * v_t).determinant().signum();
        let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
        Ok(Rotation(u * correction * v_t))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Matrix3<f64> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Rotation about `axis` (need not be unit length) by `angle` radians.
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        Self::exp(&(axis * (angle / n)))
    }

    /// Largest absolute entry of `RᵀR − I` combined with `|det R − 1|`.
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_deviation(&self.0)
    }
}

fn orthonormality_deviation(m: &Matrix3<f64>) -> f64 {
    let gram = m.transpose() * m - Matrix3::identity();
    let ortho = gram.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    ortho.max((m.determinant() - 1.0).abs())
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<Vec3> for Rotation {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}

/// Rotation plus translation: `p ↦ R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        RigidTransform {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Vec3::zeros())
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    /// `Rᵀ (p − t)`.
    pub fn apply_inverse(&self, p: &Vec3) -> Vec3 {
        self.rotation.matrix().transpose() * (p - self.translation)
    }

    pub fn inverse(&self) -> Self {
        let inv = self.rotation.inverse();
        Self::new(inv, -(inv.apply(&self.translation)))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> Self {
        Self::new(
            self.rotation * other.rotation,
            self.rotation.apply(&other.translation) + self.translation,
        )
    }

    pub fn apply_all(&self, points: &[Vec3]) -> Vec<Vec3> {
        points.iter().map(|p| self.apply(p)).collect()
    }
}

/// Orthonormal frame from two vectors.
///
/// Column 1 is `v1/‖v1‖`, column 2 the normalized part of `v2` orthogonal to
/// `v1`, column 3 their cross product.
pub fn gram_schmidt_rotation(v1: &Vec3, v2: &Vec3) -> Result<Rotation, GeometryError> {
    gram_schmidt_rotation_with(v1, v2, DEFAULT_EPS_LEN, DEFAULT_EPS_ANG)
}

pub fn gram_schmidt_rotation_with(
    v1: &Vec3,
    v2: &Vec3,
    eps_len: f64,
    eps_ang: f64,
) -> Result<Rotation, GeometryError> {
    if v1.iter().chain(v2.iter()).any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let n1 = v1.norm();
    let n2 = v2.norm();
    if n1 <= eps_len || n2 <= eps_len {
        return Err(GeometryError::DegenerateFrame(format!(
            "frame vector too short (|v1| = {n1:.3e}, |v2| = {n2:.3e})"
        )));
    }
    let e1 = v1 / n1;
    let cross = e1.cross(v2);
    // atan2 keeps the angle test accurate near 0 and π.
    let angle = cross.norm().atan2(e1.dot(v2));
    if angle <= eps_ang || angle >= std::f64::consts::PI - eps_ang {
        return Err(GeometryError::DegenerateFrame(format!(
            "frame vectors are parallel (angle {angle:.3e} rad)"
        )));
    }
    let u2 = v2 - e1 * e1.dot(v2);
    let e2 = u2 / u2.norm();
    let e3 = e1.cross(&e2);
    Ok(Rotation::from_matrix_unchecked(Matrix3::from_columns(&[
        e1, e2, e3,
    ])))
}

/// Dihedral angle a-b-c-d in (−π, π].
pub fn dihedral(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    let b0 = a - b;
    let b1 = c - b;
    let b2 = d - c;
    let axis = b1.normalize();
    let v = b0 - axis * b0.dot(&axis);
    let w = b2 - axis * b2.dot(&axis);
    let x = v.dot(&w);
    let y = axis.cross(&v).dot(&w);
    y.atan2(x)
}

/// Angle a-b-c at vertex `b`, in [0, π].
pub fn bond_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let u = a - b;
    let v = c - b;
    u.cross(&v).norm().atan2(u.dot(&v))
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let mut x = theta.rem_euclid(two_pi);
    if x > PI {
        x -= two_pi;
    }
    x
}
