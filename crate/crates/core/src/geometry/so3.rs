use super::{Rotation, Vec3};
use nalgebra::Matrix3;
use std::f64::consts::PI;

/// Angular distance from π below which the log's axis sign is ambiguous.
pub const NEAR_PI_THRESHOLD: f64 = 1e-6;

/// Result of the SO(3) logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationLog {
    /// Axis-angle vector; its norm is the rotation angle in [0, π].
    pub omega: Vec3,
    /// Set when the angle is within [`NEAR_PI_THRESHOLD`] of π. The axis then
    /// follows the canonical sign rule (largest-magnitude component positive).
    pub near_pi: bool,
}

fn skew(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

fn vee_antisym(m: &Matrix3<f64>) -> Vec3 {
    Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5
}

/// Rotation angle in [0, π], computed from both the trace and the skew part.
fn angle_of(m: &Matrix3<f64>) -> f64 {
    let s = vee_antisym(m).norm();
    let c = 0.5 * (m.trace() - 1.0);
    s.atan2(c)
}

impl Rotation {
    /// Exponential map (Rodrigues).
    pub fn exp(omega: &Vec3) -> Rotation {
        let theta2 = omega.norm_squared();
        let theta = theta2.sqrt();
        let k = skew(omega);
        let (a, b) = if theta < 1e-6 {
            (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
        } else {
            (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
        };
        Rotation::from_matrix_unchecked(Matrix3::identity() + k * a + k * k * b)
    }

    /// Logarithm map; see [`RotationLog`] for the near-π convention.
    pub fn log_flagged(&self) -> RotationLog {
        let m = self.matrix();
        let theta = angle_of(m);
        let v = vee_antisym(m);
        if theta < 1e-6 {
            // sin θ ≈ θ (1 − θ²/6)
            let scale = 1.0 + theta * theta / 6.0;
            return RotationLog {
                omega: v * scale,
                near_pi: false,
            };
        }
        if theta < PI - 0.1 {
            return RotationLog {
                omega: v * (theta / theta.sin()),
                near_pi: false,
            };
        }
        // Near π the skew part vanishes; read the axis from the symmetric part
        // (R + Rᵀ)/2 − cos θ I = (1 − cos θ) a aᵀ.
        let sym = (m + m.transpose()) * 0.5 - Matrix3::identity() * theta.cos();
        let (col, _) = (0..3)
            .map(|i| (i, sym[(i, i)]))
            .fold((0, f64::MIN), |best, cur| if cur.1 > best.1 { cur } else { best });
        let mut axis: Vec3 = sym.column(col).into();
        axis /= axis.norm();
        let near_pi = PI - theta < NEAR_PI_THRESHOLD;
        let flip = if near_pi {
            let dominant = axis
                .iter()
                .copied()
                .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            dominant < 0.0
        } else {
            axis.dot(&v) < 0.0
        };
        if flip {
            axis = -axis;
        }
        RotationLog {
            omega: axis * theta,
            near_pi,
        }
    }

    /// Logarithm map as an axis-angle vector.
    pub fn log(&self) -> Vec3 {
        self.log_flagged().omega
    }

    /// Rotation angle in [0, π].
    pub fn angle(&self) -> f64 {
        angle_of(self.matrix())
    }
}

/// Geodesic distance `‖log(R1ᵀ R2)‖` in radians.
pub fn geodesic_distance(r1: &Rotation, r2: &Rotation) -> f64 {
    angle_of(&(r1.matrix().transpose() * r2.matrix()))
}
