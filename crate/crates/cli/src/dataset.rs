use std::path::PathBuf;

use airguard::channel::{FadingModel, Snr, SystemConfig};
use airguard::dataset::{
    generate_dataset, load_target_specs, split_dataset, write_manifest, GenerateOptions, RunConfig, Split,
    SplitFractions, TargetSpec,
};
use airguard::features::FeatureConfig;
use airguard::Error;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{create_dir, master_seed, write_text, Layer};
use crate::{emit, usage, CliResult};

pub const MANIFEST_NAME: &str = "manifest.jsonl";
pub const RUN_NAME: &str = "run.json";
pub const SKIPPED_NAME: &str = "skipped.jsonl";

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Run configuration JSON: system, features, snr_db, repeats, fading,
    /// split, seed, specs, out, jobs. Flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target spec file (JSON array).
    #[arg(long)]
    specs: Option<PathBuf>,
    /// Output folder.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated SNR levels in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<Snr>>,
    /// Noise realizations per model and SNR.
    #[arg(long)]
    repeats: Option<usize>,
    /// Train, val and test fractions, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    split: Option<Vec<f64>>,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the manifest without simulating or rendering.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    specs: Option<PathBuf>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    system: Option<SystemConfig>,
    features: Option<FeatureConfig>,
    snr_db: Option<Vec<Snr>>,
    repeats: Option<usize>,
    fading: Option<FadingModel>,
    split: Option<SplitFractions>,
    seed: Option<u64>,
}

/// Fully resolved inputs, saved next to the manifest.
#[derive(Serialize)]
struct ResolvedRun<'a> {
    run: &'a RunConfig,
    targets: &'a [TargetSpec],
}

pub fn run(args: DatasetArgs, json: bool) -> CliResult<()> {
    let layer: Layer<DatasetFile> = Layer::load(args.config.as_deref())?;
    let file = &layer.value;
    let specs_path = layer
        .path(args.specs, file.specs.as_ref())
        .ok_or_else(|| usage("dataset", "--specs <PATH> is required"))?;
    let out = layer
        .path(args.out, file.out.as_ref())
        .ok_or_else(|| usage("dataset", "--out <PATH> is required"))?;
    let desk = RunConfig::desk();
    let split = match args.split {
        Some(f) => SplitFractions::new(f[0], f[1], f[2])?,
        None => file.split.unwrap_or(desk.split),
    };
    let cfg = RunConfig {
        system: file.system.clone().unwrap_or(desk.system),
        features: file.features.clone().unwrap_or(desk.features),
        snr_db: args.snr.or_else(|| file.snr_db.clone()).unwrap_or(desk.snr_db),
        repeats: args.repeats.or(file.repeats).unwrap_or(desk.repeats),
        fading: file.fading.unwrap_or(desk.fading),
        split,
        seed: master_seed(args.seed, file.seed)?,
    };
    cfg.validate()?;
    let specs = load_target_specs(&specs_path)?;
    if specs.is_empty() {
        return Err(Error::Config(format!("{} lists no target types", specs_path.display())).into());
    }
    let opts = GenerateOptions {
        jobs: args.jobs.or(file.jobs),
        dry_run: args.dry_run,
    };
    let planned: usize = specs.iter().map(|s| s.samples_per_type).sum::<usize>() * cfg.snr_db.len() * cfg.repeats;
    log::info!(
        "{} target types, {planned} images planned, seed {}{}",
        specs.len(),
        cfg.seed,
        if opts.dry_run { " (dry run)" } else { "" }
    );

    create_dir(&out)?;
    let report = generate_dataset(&specs, &cfg, &out, &opts)?;
    let mut records = report.records;
    split_dataset(&mut records, cfg.split, cfg.seed);
    write_manifest(out.join(MANIFEST_NAME), &records)?;
    if !opts.dry_run {
        let resolved = serde_json::to_string_pretty(&ResolvedRun { run: &cfg, targets: &specs })
            .map_err(|e| Error::Config(e.to_string()))?;
        write_text(&out.join(RUN_NAME), &(resolved + "\n"))?;
        if !report.skipped.is_empty() {
            let lines: String = report
                .skipped
                .iter()
                .map(|s| serde_json::to_string(s).expect("plain record") + "\n")
                .collect();
            write_text(&out.join(SKIPPED_NAME), &lines)?;
        }
    }

    let count = |s: Split| records.iter().filter(|r| r.split == Some(s)).count();
    let (train, val, test) = (count(Split::Train), count(Split::Val), count(Split::Test));
    let summary = json!({
        "out": out,
        "records": records.len(),
        "train": train,
        "val": val,
        "test": test,
        "skipped_models": report.skipped.len(),
        "dry_run": opts.dry_run,
        "seed": cfg.seed,
    });
    let text = format!(
        "{} records in {} (train {train}, val {val}, test {test}){}",
        records.len(),
        out.join(MANIFEST_NAME).display(),
        if report.skipped.is_empty() {
            String::new()
        } else {
            format!(", {} models skipped", report.skipped.len())
        }
    );
    emit(json, &summary, &text);
    Ok(())
}
