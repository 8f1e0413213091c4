//! Procedural stand-ins for mesh-derived calibration clouds.

use std::f64::consts::PI;

use rand::Rng;

use super::{Part, PartRole, RotationAxis, ScatteringPointCloud, TargetClass};
use crate::rng::rng_from_seed;
use crate::{Error, Result, Vec3};

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be positive, got {value}")))
    }
}

/// Multirotor on an X-frame.
///
/// Hubs sit at radius `body_diagonal / 2`. Body points are scattered along the
/// arms; each paddle is a straight blade of `points_per_part` points, centered
/// on a vertical axis through its hub and raised above the arm. Adjacent rotors
/// have opposite axis orientation, so equal frequencies give counter-rotation.
pub fn synthesize_uav_cloud(
    rotor_count: usize,
    body_diagonal: f64,
    paddle_length: f64,
    points_per_part: usize,
    seed: u64,
) -> Result<ScatteringPointCloud> {
    if !matches!(rotor_count, 4 | 6 | 8) {
        return Err(Error::config(format!(
            "rotor_count must be 4, 6 or 8, got {rotor_count}"
        )));
    }
    check_positive("body_diagonal", body_diagonal)?;
    check_positive("paddle_length", paddle_length)?;
    if points_per_part == 0 {
        return Err(Error::config("points_per_part must be at least 1"));
    }

    let mut rng = rng_from_seed(seed);
    let arm = body_diagonal / 2.0;
    let mast = 0.05 * body_diagonal;
    let hub_angle = |k: usize| PI / rotor_count as f64 + 2.0 * PI * k as f64 / rotor_count as f64;

    let body: Vec<Vec3> = (0..points_per_part)
        .map(|j| {
            let psi = hub_angle(j % rotor_count);
            let t: f64 = rng.random_range(0.0..1.0);
            let dz: f64 = rng.random_range(-0.5..0.5) * 0.01 * body_diagonal;
            Vec3::new(t * arm * psi.cos(), t * arm * psi.sin(), dz)
        })
        .collect();

    let mut parts = vec![Part::body(body)];
    for k in 0..rotor_count {
        let psi = hub_angle(k);
        let hub = Vec3::new(arm * psi.cos(), arm * psi.sin(), 0.0);
        let center = hub + Vec3::new(0.0, 0.0, mast);
        let blade_angle: f64 = rng.random_range(0.0..2.0 * PI);
        let blade = Vec3::new(blade_angle.cos(), blade_angle.sin(), 0.0);
        let points = (0..points_per_part)
            .map(|j| {
                let t = -0.5 * paddle_length + paddle_length * (j as f64 + 0.5) / points_per_part as f64;
                center + blade * t
            })
            .collect();
        let top = hub + Vec3::new(0.0, 0.0, 2.0 * mast);
        let axis = if k % 2 == 0 {
            RotationAxis { a: top, b: hub }
        } else {
            RotationAxis { a: hub, b: top }
        };
        parts.push(Part::moving(PartRole::Rotor, points, axis));
    }

    recenter(&mut parts, [true, true, true]);
    ScatteringPointCloud::new(
        TargetClass::Uav,
        format!("synthetic {rotor_count}-rotor UAV"),
        parts,
    )
}

/// Bird with the body along the x axis and two wings spread in the z = 0
/// plane. Wing 2 is the exact mirror image of wing 1 across the x–z plane,
/// axes included; both axes run along the body line (+x).
pub fn synthesize_bird_cloud(
    body_length: f64,
    wing_span: f64,
    points_per_part: usize,
    seed: u64,
) -> Result<ScatteringPointCloud> {
    check_positive("body_length", body_length)?;
    check_positive("wing_span", wing_span)?;
    if points_per_part == 0 {
        return Err(Error::config("points_per_part must be at least 1"));
    }

    let mut rng = rng_from_seed(seed);
    let half_span = 0.5 * wing_span;
    let shoulder = (0.08 * body_length).min(0.25 * half_span);
    let girth = 0.1 * body_length;

    let body: Vec<Vec3> = (0..points_per_part)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            let radius = girth * (1.0 - u * u).sqrt() * rng.random_range(0.0..1.0);
            let around: f64 = rng.random_range(0.0..2.0 * PI);
            Vec3::new(0.5 * body_length * u, radius * around.cos(), radius * around.sin())
        })
        .collect();

    let root_chord = 0.3 * body_length;
    let wing1: Vec<Vec3> = (0..points_per_part)
        .map(|_| {
            let s: f64 = rng.random_range(0.0..1.0);
            let y = shoulder + s * (half_span - shoulder);
            let chord = root_chord * (1.0 - 0.6 * s);
            let x = chord * rng.random_range(-0.5..0.5);
            Vec3::new(x, y, 0.0)
        })
        .collect();
    let mirror = |p: &Vec3| Vec3::new(p.x, -p.y, p.z);
    let wing2: Vec<Vec3> = wing1.iter().map(mirror).collect();

    let axis1 = RotationAxis {
        a: Vec3::new(0.25 * body_length, shoulder, 0.0),
        b: Vec3::new(-0.25 * body_length, shoulder, 0.0),
    };
    let axis2 = RotationAxis {
        a: mirror(&axis1.a),
        b: mirror(&axis1.b),
    };

    let mut parts = vec![
        Part::body(body),
        Part::moving(PartRole::Wing, wing1, axis1),
        Part::moving(PartRole::Wing, wing2, axis2),
    ];
    // y is left alone so the wings stay mirror images across y = 0.
    recenter(&mut parts, [true, false, true]);
    ScatteringPointCloud::new(TargetClass::Bird, "synthetic bird", parts)
}

fn recenter(parts: &mut [Part], axes: [bool; 3]) {
    let count: usize = parts.iter().map(|p| p.points.len()).sum();
    let sum: Vec3 = parts.iter().flat_map(|p| p.points.iter()).sum();
    let mut shift = sum / count as f64;
    for (k, keep) in axes.iter().enumerate() {
        if !keep {
            shift[k] = 0.0;
        }
    }
    for part in parts.iter_mut() {
        for p in &mut part.points {
            *p -= shift;
        }
        if let Some(axis) = &mut part.axis {
            axis.a -= shift;
            axis.b -= shift;
        }
    }
}
