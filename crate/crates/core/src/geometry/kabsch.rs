use super::{GeometryError, RigidTransform, Rotation, Vec3};
use nalgebra::{Matrix3, Vector3};

/// Optimal superposition of one point set onto another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    /// Maps the mobile set onto the target set.
    pub transform: RigidTransform,
    /// RMSD after applying `transform`.
    pub rmsd: f64,
    /// Fewer than three points, or all points collinear: the rotation about
    /// the degenerate axis is arbitrary.
    pub degenerate: bool,
}

fn check_sizes(p: &[Vec3], q: &[Vec3]) -> Result<(), GeometryError> {
    if p.len() != q.len() {
        return Err(GeometryError::SizeMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    Ok(())
}

/// Root-mean-square distance between corresponding points, no alignment.
pub fn rmsd(p: &[Vec3], q: &[Vec3]) -> Result<f64, GeometryError> {
    check_sizes(p, q)?;
    let sum: f64 = p.iter().zip(q).map(|(a, b)| (a - b).norm_squared()).sum();
    Ok((sum / p.len() as f64).sqrt())
}

fn centroid(points: &[Vec3]) -> Vec3 {
    points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / points.len() as f64
}

/// Kabsch superposition of `p` onto `q` (correspondence by index).
pub fn kabsch_align(p: &[Vec3], q: &[Vec3]) -> Result<Alignment, GeometryError> {
    check_sizes(p, q)?;
    let cp = centroid(p);
    let cq = centroid(q);
    let mut h = Matrix3::zeros();
    for (a, b) in p.iter().zip(q) {
        h += (a - cp) * (b - cq).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(GeometryError::NonFinite),
    };
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant();
    let sign = if d < 0.0 { -1.0 } else { 1.0 };
    // Flip the direction of the smallest singular value to exclude reflections.
    let smallest = svd.singular_values.imin();
    let mut diag = Vector3::new(1.0, 1.0, 1.0);
    diag[smallest] = sign;
    let correction = Matrix3::from_diagonal(&diag);
    let r = v * correction * u.transpose();

    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let degenerate = p.len() < 3 || sv[1] <= sv[0] * 1e-10;

    let rotation = Rotation::from_matrix_unchecked(r);
    let transform = RigidTransform::new(rotation, cq - rotation.apply(&cp));
    let moved = transform.apply_all(p);
    let rmsd = rmsd(&moved, q)?;
    Ok(Alignment {
        transform,
        rmsd,
        degenerate,
    })
}
