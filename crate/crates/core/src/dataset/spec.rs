use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kinematics::{sph_to_cart, Attitude, AttitudeJitter, PartMotion, Spherical, TargetMotionModel, WingBounds, WingDirection};
use crate::rng::{rng_from_seed, SimRng};
use crate::targets::{load_point_cloud, synthesize_bird_cloud, synthesize_uav_cloud, Part, ScatteringPointCloud, TargetClass};
use crate::{Error, Result, Vec3};

/// Closed interval `[lo, hi]`, written as a two-element JSON array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::config(format!("empty or non-finite interval [{lo}, {hi}]")))
        }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// Uniform draw; a degenerate interval returns its single value.
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * rng.random::<f64>()
        }
    }

    fn within(&self, lo: f64, hi: f64) -> bool {
        self.lo >= lo && self.hi <= hi
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = String;

    fn try_from([lo, hi]: [f64; 2]) -> std::result::Result<Self, String> {
        Interval::new(lo, hi).map_err(|e| e.to_string())
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Where a target's point cloud comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CloudSource {
    /// Cloud file; a relative path resolves against the spec file's folder.
    File { path: PathBuf },
    Uav {
        rotor_count: usize,
        body_diagonal: f64,
        paddle_length: f64,
        points_per_part: usize,
        seed: u64,
    },
    Bird {
        body_length: f64,
        wing_span: f64,
        points_per_part: usize,
        seed: u64,
    },
}

/// Initial spherical position box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionBox {
    pub r: Interval,
    pub theta: Interval,
    pub phi: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttitudeBox {
    pub yaw: Interval,
    pub pitch: Interval,
    pub roll: Interval,
}

impl Default for AttitudeBox {
    fn default() -> Self {
        AttitudeBox {
            yaw: Interval::point(0.0),
            pitch: Interval::point(0.0),
            roll: Interval::point(0.0),
        }
    }
}

/// Ranges for the per-symbol attitude increments, ordered yaw, pitch, roll.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitterBox {
    pub mean: [Interval; 3],
    pub variance: [Interval; 3],
}

impl Default for JitterBox {
    fn default() -> Self {
        JitterBox {
            mean: [Interval::point(0.0); 3],
            variance: [Interval::point(0.0); 3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WingBoundsBox {
    pub min: Interval,
    pub max: Interval,
}

/// One target type and the ranges its motion models are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub name: String,
    pub class: TargetClass,
    pub cloud: CloudSource,
    /// Rescales each sample's cloud to a size drawn from here: body diagonal
    /// for UAVs, body length for birds, bounding-box diagonal for files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Interval>,
    /// Paddle (revolutions/s) or wingbeat (flaps/s) frequency, Hz.
    pub frequency: Interval,
    /// `|v_x|, |v_y|, |v_z|` bounds, m/s.
    pub velocity_bound: [f64; 3],
    pub position: PositionBox,
    #[serde(default)]
    pub attitude: AttitudeBox,
    #[serde(default)]
    pub jitter: JitterBox,
    /// Birds only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wing_bounds: Option<WingBoundsBox>,
    pub samples_per_type: usize,
}

impl TargetSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::config(format!("target {:?}: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::config("target name must not be empty"));
        }
        if self.frequency.lo < 0.0 {
            return bad("frequency range must be nonnegative".into());
        }
        if self.velocity_bound.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("velocity bounds must be finite and >= 0".into());
        }
        if self.position.r.lo <= 0.0 {
            return bad("range interval must be positive".into());
        }
        if !self.position.theta.within(0.0, std::f64::consts::PI) {
            return bad("theta must lie in [0, pi]".into());
        }
        if !self.position.phi.within(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2) {
            return bad("phi must lie in [-pi/2, pi/2]".into());
        }
        if self.jitter.variance.iter().any(|v| v.lo < 0.0) {
            return bad("jitter variances must be >= 0".into());
        }
        if let Some(size) = self.size {
            if size.lo <= 0.0 {
                return bad("size must be positive".into());
            }
        }
        match (self.class, &self.wing_bounds) {
            (TargetClass::Bird, None) => return bad("birds need wing_bounds".into()),
            (TargetClass::Uav, Some(_)) => return bad("wing_bounds apply to birds only".into()),
            (TargetClass::Bird, Some(w)) if w.min.hi >= w.max.lo => {
                return bad("every wing_bounds.min draw must stay below every max draw".into())
            }
            _ => {}
        }
        match (&self.cloud, self.class) {
            (CloudSource::Uav { .. }, TargetClass::Bird) | (CloudSource::Bird { .. }, TargetClass::Uav) => {
                bad("cloud generator does not match the target class".into())
            }
            _ => Ok(()),
        }
    }

    /// Resolves a relative cloud path against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let CloudSource::File { path } = &mut self.cloud {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    /// Builds the nominal cloud.
    pub fn build_cloud(&self) -> Result<ScatteringPointCloud> {
        let cloud = match &self.cloud {
            CloudSource::File { path } => load_point_cloud(path)?,
            CloudSource::Uav {
                rotor_count,
                body_diagonal,
                paddle_length,
                points_per_part,
                seed,
            } => synthesize_uav_cloud(*rotor_count, *body_diagonal, *paddle_length, *points_per_part, *seed)?,
            CloudSource::Bird {
                body_length,
                wing_span,
                points_per_part,
                seed,
            } => synthesize_bird_cloud(*body_length, *wing_span, *points_per_part, *seed)?,
        };
        if cloud.target_class() != self.class {
            return Err(Error::config(format!(
                "target {:?} is a {} but its cloud is a {}",
                self.name,
                self.class,
                cloud.target_class()
            )));
        }
        Ok(cloud)
    }

    fn reference_size(&self, cloud: &ScatteringPointCloud) -> f64 {
        match &self.cloud {
            CloudSource::Uav { body_diagonal, .. } => *body_diagonal,
            CloudSource::Bird { body_length, .. } => *body_length,
            CloudSource::File { .. } => cloud.bounding_box_diagonal(),
        }
    }
}

/// Uniformly rescales `cloud` (points and axes) to a size drawn from
/// `spec.size`; returns it unchanged when no size range is given.
pub fn sample_cloud(spec: &TargetSpec, cloud: &ScatteringPointCloud, rng_seed: u64) -> Result<ScatteringPointCloud> {
    let Some(size) = spec.size else {
        return Ok(cloud.clone());
    };
    let reference = spec.reference_size(cloud);
    if reference.is_nan() || reference <= 0.0 {
        return Err(Error::Degenerate(format!("target {:?} has zero nominal size", spec.name)));
    }
    let scale = size.sample(&mut rng_from_seed(rng_seed)) / reference;
    let parts = cloud
        .parts()
        .iter()
        .map(|p| Part {
            role: p.role,
            points: p.points.iter().map(|q| q * scale).collect(),
            axis: p.axis.map(|mut a| {
                a.a *= scale;
                a.b *= scale;
                a
            }),
        })
        .collect();
    ScatteringPointCloud::new(cloud.target_class(), cloud.target_name(), parts)
}

/// Draws one motion model for `cloud` from the ranges in `spec`.
pub fn sample_motion_model(spec: &TargetSpec, cloud: &ScatteringPointCloud, rng_seed: u64) -> Result<TargetMotionModel> {
    spec.validate()?;
    let mut rng = rng_from_seed(rng_seed);
    let at = Spherical::new(
        spec.position.r.sample(&mut rng),
        spec.position.theta.sample(&mut rng),
        spec.position.phi.sample(&mut rng),
    );
    let initial_position = sph_to_cart(&at);
    let mut velocity = Vec3::zeros();
    for k in 0..3 {
        let b = spec.velocity_bound[k];
        velocity[k] = Interval { lo: -b, hi: b }.sample(&mut rng);
    }
    let initial_attitude = Attitude::new(
        spec.attitude.yaw.sample(&mut rng),
        spec.attitude.pitch.sample(&mut rng),
        spec.attitude.roll.sample(&mut rng),
    );
    let mut jitter = AttitudeJitter::default();
    for k in 0..3 {
        jitter.mean[k] = spec.jitter.mean[k].sample(&mut rng);
    }
    for k in 0..3 {
        jitter.variance[k] = spec.jitter.variance[k].sample(&mut rng);
    }
    let parts = match (spec.class, &spec.wing_bounds) {
        (TargetClass::Uav, _) => {
            let q = cloud.moving_parts().len();
            let mut frequency = Vec::with_capacity(q);
            let mut initial_phase = Vec::with_capacity(q);
            for _ in 0..q {
                frequency.push(spec.frequency.sample(&mut rng));
                initial_phase.push(rng.random_range(0.0..std::f64::consts::TAU));
            }
            PartMotion::Rotors { initial_phase, frequency }
        }
        (TargetClass::Bird, Some(wb)) => {
            let bounds = WingBounds::new(wb.min.sample(&mut rng), wb.max.sample(&mut rng))?;
            let frequency = spec.frequency.sample(&mut rng);
            let initial_phase = Interval::new(bounds.min, bounds.max)?.sample(&mut rng);
            let initial_direction = if rng.random::<bool>() { WingDirection::Up } else { WingDirection::Down };
            PartMotion::Wings {
                initial_phase,
                frequency,
                bounds,
                initial_direction,
            }
        }
        (TargetClass::Bird, None) => unreachable!("validated above"),
    };
    let model = TargetMotionModel {
        initial_position,
        velocity,
        initial_attitude,
        jitter,
        parts,
    };
    model.validate_for(cloud)?;
    Ok(model)
}

/// Reads a JSON array of target specs, resolving cloud paths against the
/// file's folder.
pub fn load_target_specs(path: impl AsRef<Path>) -> Result<Vec<TargetSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut specs: Vec<TargetSpec> = serde_json::from_str(&text).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    for s in &mut specs {
        s.resolve_paths(base);
        s.validate()?;
    }
    Ok(specs)
}
