//! JSON cloud files.
//!
//! ```json
//! { "target_class": "UAV", "target_name": "DJI MAVIC 3",
//!   "parts": [ { "role": "body",  "points": [[x, y, z], ...] },
//!              { "role": "rotor", "points": [...], "axis_a": [x, y, z], "axis_b": [x, y, z] } ] }
//! ```
//!
//! Coordinates are meters in the body frame. The body comes first and has no
//! axis.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CloudValidation, Part, PartRole, RotationAxis, ScatteringPointCloud, TargetClass};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudFile {
    pub target_class: TargetClass,
    pub target_name: String,
    pub parts: Vec<PartFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartFile {
    pub role: PartRole,
    pub points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis_a: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis_b: Option<[f64; 3]>,
}

impl CloudFile {
    pub fn into_cloud(self, checks: &CloudValidation) -> Result<ScatteringPointCloud> {
        let mut parts = Vec::with_capacity(self.parts.len());
        for (i, pf) in self.parts.into_iter().enumerate() {
            let points: Vec<Vec3> = pf.points.iter().map(|&p| Vec3::from(p)).collect();
            let axis = match (pf.axis_a, pf.axis_b) {
                (None, None) => None,
                (Some(a), Some(b)) => Some(RotationAxis {
                    a: Vec3::from(a),
                    b: Vec3::from(b),
                }),
                _ => {
                    return Err(Error::Validation(format!(
                        "part {i} gives only one of axis_a / axis_b"
                    )))
                }
            };
            if pf.role == PartRole::Body && axis.is_some() {
                return Err(Error::Validation(format!("body part {i} must omit its axis")));
            }
            parts.push(Part {
                role: pf.role,
                points,
                axis,
            });
        }
        ScatteringPointCloud::with_validation(self.target_class, self.target_name, parts, checks)
    }
}

impl From<&ScatteringPointCloud> for CloudFile {
    fn from(cloud: &ScatteringPointCloud) -> Self {
        CloudFile {
            target_class: cloud.target_class(),
            target_name: cloud.target_name().to_owned(),
            parts: cloud
                .parts()
                .iter()
                .map(|part| PartFile {
                    role: part.role,
                    points: part.points.iter().map(|p| [p.x, p.y, p.z]).collect(),
                    axis_a: part.axis.map(|ax| [ax.a.x, ax.a.y, ax.a.z]),
                    axis_b: part.axis.map(|ax| [ax.b.x, ax.b.y, ax.b.z]),
                })
                .collect(),
        }
    }
}

pub fn parse_point_cloud(json: &str, checks: &CloudValidation) -> Result<ScatteringPointCloud> {
    let file: CloudFile = serde_json::from_str(json).map_err(|e| Error::Parse {
        what: "point cloud".into(),
        reason: e.to_string(),
    })?;
    file.into_cloud(checks)
}

pub fn load_point_cloud(path: impl AsRef<Path>) -> Result<ScatteringPointCloud> {
    load_point_cloud_with(path, &CloudValidation::default())
}

pub fn load_point_cloud_with(path: impl AsRef<Path>, checks: &CloudValidation) -> Result<ScatteringPointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_point_cloud(&text, checks).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::Parse {
            what: path.display().to_string(),
            reason,
        },
        other => other,
    })
}

pub fn save_point_cloud(cloud: &ScatteringPointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(&CloudFile::from(cloud)).expect("cloud serializes");
    fs::write(path, json).map_err(|e| Error::io(path, e))
}
