//! Labeled multi-part scattering point clouds.
//!
//! A cloud is an ordered list of rigid parts in the target's body frame.
//! Part 0 is always the body; the remaining parts are rotor paddles (UAV) or
//! the two wings (bird), each carrying the two points that define its
//! rotation axis.

mod file;
mod synth;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

pub use file::{load_point_cloud, load_point_cloud_with, parse_point_cloud, save_point_cloud, CloudFile, PartFile};
pub use synth::{synthesize_bird_cloud, synthesize_uav_cloud};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TargetClass {
    #[serde(rename = "UAV")]
    Uav,
    Bird,
}

impl TargetClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetClass::Uav => "UAV",
            TargetClass::Bird => "Bird",
        }
    }
}

impl std::fmt::Display for TargetClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartRole {
    Body,
    Rotor,
    Wing,
}

/// Rotation axis of a moving part, given by two distinct points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAxis {
    pub a: Vec3,
    pub b: Vec3,
}

impl RotationAxis {
    /// Unit direction `(a - b) / |a - b|`.
    pub fn direction(&self) -> Vec3 {
        (self.a - self.b).normalize()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub role: PartRole,
    pub points: Vec<Vec3>,
    /// `None` for the body.
    pub axis: Option<RotationAxis>,
}

impl Part {
    pub fn body(points: Vec<Vec3>) -> Self {
        Part {
            role: PartRole::Body,
            points,
            axis: None,
        }
    }

    pub fn moving(role: PartRole, points: Vec<Vec3>, axis: RotationAxis) -> Self {
        Part {
            role,
            points,
            axis: Some(axis),
        }
    }
}

/// Checks applied on every construction path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudValidation {
    /// Maximum centroid distance from the origin, as a fraction of the
    /// bounding-box diagonal.
    pub centroid_tolerance: f64,
}

impl Default for CloudValidation {
    fn default() -> Self {
        CloudValidation {
            centroid_tolerance: 0.05,
        }
    }
}

/// Validated, immutable calibration point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPointCloud {
    target_class: TargetClass,
    target_name: String,
    parts: Vec<Part>,
}

impl ScatteringPointCloud {
    pub fn new(target_class: TargetClass, target_name: impl Into<String>, parts: Vec<Part>) -> Result<Self> {
        Self::with_validation(target_class, target_name, parts, &CloudValidation::default())
    }

    pub fn with_validation(
        target_class: TargetClass,
        target_name: impl Into<String>,
        parts: Vec<Part>,
        checks: &CloudValidation,
    ) -> Result<Self> {
        let cloud = ScatteringPointCloud {
            target_class,
            target_name: target_name.into(),
            parts,
        };
        cloud.validate(checks)?;
        Ok(cloud)
    }

    fn validate(&self, checks: &CloudValidation) -> Result<()> {
        let invalid = |msg: String| Err(Error::Validation(msg));

        let Some(body) = self.parts.first() else {
            return invalid("cloud has no parts".into());
        };
        if body.role != PartRole::Body {
            return invalid("part 0 must be the body".into());
        }
        if body.axis.is_some() {
            return invalid("the body part must not carry a rotation axis".into());
        }

        let expected_role = match self.target_class {
            TargetClass::Uav => PartRole::Rotor,
            TargetClass::Bird => PartRole::Wing,
        };
        for (i, part) in self.parts.iter().enumerate() {
            if part.points.is_empty() {
                return invalid(format!("part {i} is empty"));
            }
            if part.points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
                return invalid(format!("part {i} has a non-finite coordinate"));
            }
            if i == 0 {
                continue;
            }
            if part.role != expected_role {
                return invalid(format!(
                    "part {i} has role {:?}; a {} cloud only has {:?} moving parts",
                    part.role, self.target_class, expected_role
                ));
            }
            let Some(axis) = part.axis else {
                return invalid(format!("moving part {i} has no rotation axis"));
            };
            if !(axis.a.iter().chain(axis.b.iter()).all(|c| c.is_finite())) {
                return invalid(format!("part {i} axis has a non-finite coordinate"));
            }
            if (axis.a - axis.b).norm() == 0.0 {
                return invalid(format!("part {i} axis endpoints coincide"));
            }
        }

        let moving = self.parts.len() - 1;
        match self.target_class {
            TargetClass::Bird if moving != 2 => {
                return invalid(format!("a bird has exactly 2 wings, found {moving}"));
            }
            TargetClass::Uav if moving == 0 => {
                return invalid("a UAV needs at least one rotor".into());
            }
            _ => {}
        }

        // Points are identified by position, so the same position in two
        // parts is an overlap.
        let mut owner: HashMap<[u64; 3], usize> = HashMap::new();
        for (i, part) in self.parts.iter().enumerate() {
            for p in &part.points {
                let key = [bits(p.x), bits(p.y), bits(p.z)];
                if let Some(&j) = owner.get(&key) {
                    if j != i {
                        return invalid(format!(
                            "point ({}, {}, {}) belongs to both part {j} and part {i}",
                            p.x, p.y, p.z
                        ));
                    }
                } else {
                    owner.insert(key, i);
                }
            }
        }

        let diag = self.bounding_box_diagonal();
        let off = self.centroid().norm();
        if off > checks.centroid_tolerance * diag {
            return invalid(format!(
                "centroid is {off:.4} m from the origin, more than {} x bounding-box diagonal ({diag:.4} m)",
                checks.centroid_tolerance
            ));
        }
        Ok(())
    }

    pub fn target_class(&self) -> TargetClass {
        self.target_class
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn body(&self) -> &Part {
        &self.parts[0]
    }

    /// Rotors or wings, in part order.
    pub fn moving_parts(&self) -> &[Part] {
        &self.parts[1..]
    }

    /// Total point count L.
    pub fn num_points(&self) -> usize {
        self.parts.iter().map(|p| p.points.len()).sum()
    }

    /// All points in part order.
    pub fn points(&self) -> impl Iterator<Item = &Vec3> {
        self.parts.iter().flat_map(|p| p.points.iter())
    }

    pub fn centroid(&self) -> Vec3 {
        let sum: Vec3 = self.points().sum();
        sum / self.num_points() as f64
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in self.points() {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }
}

fn bits(x: f64) -> u64 {
    // -0.0 and 0.0 are the same position.
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}
