use nalgebra::Matrix3;

use crate::{Error, Result, Vec3};

const UNIT_TOLERANCE: f64 = 1e-9;

/// Rotates `p` by `angle` about the line through `axis_point` with unit
/// direction `axis_dir` (right-hand rule).
///
/// Uses the vector form `a + u cos + (e x u) sin + e (e.u)(1 - cos)` with
/// `u = p - a`. A zero angle returns `p` unchanged.
pub fn rodrigues_rotate(p: &Vec3, axis_point: &Vec3, axis_dir: &Vec3, angle: f64) -> Result<Vec3> {
    let norm = axis_dir.norm();
    if norm.is_nan() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Numeric(format!(
            "rotation axis direction has norm {norm}, expected 1"
        )));
    }
    Ok(rotate_unchecked(p, axis_point, axis_dir, angle.cos(), angle.sin(), angle))
}

/// Same as [`rodrigues_rotate`] with the trigonometry precomputed; the
/// simulator rotates many points by one angle per step.
#[inline]
pub(crate) fn rotate_unchecked(p: &Vec3, a: &Vec3, e: &Vec3, cos: f64, sin: f64, angle: f64) -> Vec3 {
    if angle == 0.0 {
        return *p;
    }
    let u = p - a;
    a + u * cos + e.cross(&u) * sin + e * (e.dot(&u) * (1.0 - cos))
}

/// `R_Y(yaw) R_P(pitch) R_R(roll)`: yaw about z, pitch about y, roll about x.
pub fn attitude_matrix(yaw: f64, pitch: f64, roll: f64) -> Matrix3<f64> {
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sr, cr) = roll.sin_cos();
    #[rustfmt::skip]
    let r_yaw = Matrix3::new(
        cy, -sy, 0.0,
        sy,  cy, 0.0,
        0.0, 0.0, 1.0,
    );
    #[rustfmt::skip]
    let r_pitch = Matrix3::new(
         cp, 0.0, sp,
        0.0, 1.0, 0.0,
        -sp, 0.0, cp,
    );
    #[rustfmt::skip]
    let r_roll = Matrix3::new(
        1.0, 0.0, 0.0,
        0.0,  cr, -sr,
        0.0,  sr,  cr,
    );
    r_yaw * r_pitch * r_roll
}
