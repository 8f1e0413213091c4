//! Dataset generation: motion models drawn from per-type ranges, one echo per
//! model, an SNR x repeat sweep of noisy copies, feature images on disk and a
//! JSONL manifest with stratified splits.

mod manifest;
mod spec;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{add_noise, fading_coefficients, synthesize_echo, FadingModel, Snr, SystemConfig};
use crate::features::{feature_image, save_png, FeatureConfig};
use crate::kinematics::simulate_trajectory;
use crate::rng::{derive_seed, Stream};
use crate::{Error, Result};

pub use manifest::{read_manifest, split_dataset, write_manifest, ManifestRecord, Split, SplitFractions};
pub use spec::{
    load_target_specs, sample_cloud, sample_motion_model, AttitudeBox, CloudSource, Interval, JitterBox, PositionBox,
    TargetSpec, WingBoundsBox,
};

/// Everything about a run except the target types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub features: FeatureConfig,
    pub snr_db: Vec<Snr>,
    /// Noise realizations per model and SNR.
    pub repeats: usize,
    #[serde(default)]
    pub fading: FadingModel,
    #[serde(default)]
    pub split: SplitFractions,
    pub seed: u64,
}

impl RunConfig {
    pub fn desk() -> Self {
        RunConfig {
            system: SystemConfig::desk(),
            features: FeatureConfig::desk(),
            snr_db: vec![Snr::Db(0.0), Snr::Db(10.0), Snr::Db(20.0)],
            repeats: 2,
            fading: FadingModel::RandomPhase,
            split: SplitFractions::default(),
            seed: 2024,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.features.validate()?;
        if self.system.n != self.features.g * self.features.n0 {
            return Err(Error::config(format!(
                "system has {} symbols but features expect G * N0 = {}",
                self.system.n,
                self.features.g * self.features.n0
            )));
        }
        if self.snr_db.is_empty() || self.repeats == 0 {
            return Err(Error::config("need at least one SNR level and one repeat"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    /// Worker threads; all cores when `None`.
    pub jobs: Option<usize>,
    /// Enumerate records without simulating or writing images.
    pub dry_run: bool,
}

/// A model that failed to simulate. Its samples are absent from the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub target_name: String,
    pub model_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct GenerateReport {
    /// In (type, model, SNR, repeat) order, splits unassigned.
    pub records: Vec<ManifestRecord>,
    pub skipped: Vec<SkipRecord>,
}

/// Lowercase ASCII letters and digits, other runs collapsed to `-`.
pub fn sanitize_name(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

struct ModelSeeds {
    cloud: u64,
    motion: u64,
    attitude: u64,
    fading: u64,
}

impl ModelSeeds {
    fn new(master: u64, spec: usize, model: usize) -> Self {
        let at = [spec as u64, model as u64];
        ModelSeeds {
            cloud: derive_seed(master, Stream::Cloud, &at),
            motion: derive_seed(master, Stream::Motion, &at),
            attitude: derive_seed(master, Stream::Attitude, &at),
            fading: derive_seed(master, Stream::Fading, &at),
        }
    }
}

fn noise_seed(master: u64, spec: usize, model: usize, snr: usize, repeat: usize) -> u64 {
    derive_seed(master, Stream::Noise, &[spec as u64, model as u64, snr as u64, repeat as u64])
}

struct Job<'a> {
    spec_index: usize,
    model_index: usize,
    spec: &'a TargetSpec,
    slug: &'a str,
}

impl Job<'_> {
    fn records(&self, cfg: &RunConfig) -> Vec<ManifestRecord> {
        let seeds = ModelSeeds::new(cfg.seed, self.spec_index, self.model_index);
        let mut out = Vec::with_capacity(cfg.snr_db.len() * cfg.repeats);
        for (si, &snr) in cfg.snr_db.iter().enumerate() {
            for rep in 0..cfg.repeats {
                let sample_id = format!("{}-{:05}-{:02}-{:02}", self.slug, self.model_index, si, rep);
                out.push(ManifestRecord {
                    image_path: format!("{}/{}.png", self.slug, sample_id),
                    sample_id,
                    target_name: self.spec.name.clone(),
                    class_label: self.spec.class,
                    motion_seed: seeds.motion,
                    noise_seed: noise_seed(cfg.seed, self.spec_index, self.model_index, si, rep),
                    snr_db: snr,
                    repeat_index: rep,
                    split: None,
                });
            }
        }
        out
    }

    fn run(&self, base_cloud: &crate::targets::ScatteringPointCloud, cfg: &RunConfig, out_dir: &Path) -> Result<std::result::Result<Vec<ManifestRecord>, SkipRecord>> {
        let records = self.records(cfg);
        let seeds = ModelSeeds::new(cfg.seed, self.spec_index, self.model_index);
        let simulate = || -> Result<Vec<crate::features::RgbImage>> {
            let cloud = sample_cloud(self.spec, base_cloud, seeds.cloud)?;
            let motion = sample_motion_model(self.spec, &cloud, seeds.motion)?;
            let mut system = cfg.system.clone();
            system.point_beams_at(&motion.initial_position)?;
            let trajectory = simulate_trajectory(&cloud, &motion, system.n, system.ts, seeds.attitude)?;
            let fading = fading_coefficients(cfg.fading, cloud.num_points(), seeds.fading);
            let clean = synthesize_echo(trajectory, &fading, &system)?;
            records
                .iter()
                .map(|r| feature_image(&add_noise(&clean, r.snr_db, r.noise_seed)?, &cfg.features))
                .collect()
        };
        let images = match simulate() {
            Ok(images) => images,
            Err(e) => {
                let skip = SkipRecord {
                    target_name: self.spec.name.clone(),
                    model_index: self.model_index,
                    reason: e.to_string(),
                };
                log::warn!("skipping {} model {}: {}", skip.target_name, skip.model_index, skip.reason);
                return Ok(Err(skip));
            }
        };
        for (r, img) in records.iter().zip(&images) {
            let path = out_dir.join(&r.image_path);
            save_png(img, &path)?;
        }
        Ok(Ok(records))
    }
}

/// Generates `spec.samples_per_type` models per type and, for each, one image
/// per SNR level and repeat under `out_dir/<type>/`. Models run in parallel;
/// the output depends only on the inputs, never on scheduling. Simulation
/// failures skip the model; write failures abort the run.
pub fn generate_dataset(
    specs: &[TargetSpec],
    cfg: &RunConfig,
    out_dir: impl AsRef<Path>,
    opts: &GenerateOptions,
) -> Result<GenerateReport> {
    let out_dir = out_dir.as_ref();
    cfg.validate()?;
    let slugs: Vec<String> = specs.iter().map(|s| sanitize_name(&s.name)).collect();
    for (i, s) in specs.iter().enumerate() {
        s.validate()?;
        if slugs[i].is_empty() {
            return Err(Error::config(format!("target name {:?} has no usable characters", s.name)));
        }
        if slugs[..i].contains(&slugs[i]) {
            return Err(Error::config(format!("target name {:?} collides with an earlier one", s.name)));
        }
    }
    let jobs: Vec<Job> = specs
        .iter()
        .enumerate()
        .flat_map(|(si, spec)| {
            let slug = slugs[si].as_str();
            (0..spec.samples_per_type).map(move |k| Job {
                spec_index: si,
                model_index: k,
                spec,
                slug,
            })
        })
        .collect();

    if opts.dry_run {
        return Ok(GenerateReport {
            records: jobs.iter().flat_map(|j| j.records(cfg)).collect(),
            skipped: Vec::new(),
        });
    }

    let clouds = specs.iter().map(TargetSpec::build_cloud).collect::<Result<Vec<_>>>()?;
    for slug in &slugs {
        let dir: PathBuf = out_dir.join(slug);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| Error::config(format!("thread pool: {e}")))?;
    let done = AtomicUsize::new(0);
    let outcomes = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let outcome = job.run(&clouds[job.spec_index], cfg, out_dir);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                log::info!("model {n}/{} done ({} #{})", jobs.len(), job.spec.name, job.model_index);
                outcome
            })
            .collect::<Vec<_>>()
    });
    let mut report = GenerateReport::default();
    for outcome in outcomes {
        match outcome? {
            Ok(records) => report.records.extend(records),
            Err(skip) => report.skipped.push(skip),
        }
    }
    Ok(report)
}
