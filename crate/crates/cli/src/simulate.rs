use std::path::PathBuf;

use airguard::channel::{
    add_noise, fading_coefficients, measure_signal_power, synthesize_echo, write_echo, EchoDtype, FadingModel, Snr,
    SystemConfig,
};
use airguard::kinematics::{simulate_trajectory, write_trajectory, TargetMotionModel};
use airguard::rng::{derive_seed, Stream};
use airguard::targets::load_point_cloud;
use clap::Args;
use serde::Deserialize;
use serde_json::json;

use crate::config::{master_seed, parse_word, read_json, Layer};
use crate::{emit, usage, CliResult};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Point cloud JSON.
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Motion model JSON.
    #[arg(long)]
    motion: Option<PathBuf>,
    /// System configuration JSON (desk defaults otherwise).
    #[arg(long)]
    system: Option<PathBuf>,
    /// Output echo file.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// SNR in dB, or `noiseless`.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<Snr>,
    /// Master seed for attitude jitter, fading and noise.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample type: c64 or c128.
    #[arg(long)]
    dtype: Option<EchoDtype>,
    /// constant or random_phase.
    #[arg(long, value_parser = parse_word::<FadingModel>)]
    fading: Option<FadingModel>,
    /// Also dump the trajectory to this file.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Keep the beam directions from the system config instead of steering
    /// at the target's initial position.
    #[arg(long)]
    keep_beams: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateFile {
    cloud: Option<PathBuf>,
    motion: Option<PathBuf>,
    system: Option<SystemConfig>,
    out: Option<PathBuf>,
    snr: Option<Snr>,
    seed: Option<u64>,
    dtype: Option<String>,
    fading: Option<FadingModel>,
    trajectory: Option<PathBuf>,
    keep_beams: Option<bool>,
}

pub fn run(args: SimulateArgs, json: bool) -> CliResult<()> {
    let layer: Layer<SimulateFile> = Layer::load(args.config.as_deref())?;
    let file = &layer.value;
    let cloud_path = layer
        .path(args.cloud, file.cloud.as_ref())
        .ok_or_else(|| usage("simulate", "--cloud <PATH> is required"))?;
    let motion_path = layer
        .path(args.motion, file.motion.as_ref())
        .ok_or_else(|| usage("simulate", "--motion <PATH> is required"))?;
    let out = layer
        .path(args.out, file.out.as_ref())
        .ok_or_else(|| usage("simulate", "--out <PATH> is required"))?;
    let mut system = match args.system {
        Some(p) => read_json(&p)?,
        None => file.system.clone().unwrap_or_else(SystemConfig::desk),
    };
    system.validate()?;
    let snr = args.snr.or(file.snr).unwrap_or(Snr::Noiseless);
    let dtype = match (args.dtype, &file.dtype) {
        (Some(d), _) => d,
        (None, Some(s)) => s.parse().map_err(airguard::Error::Config)?,
        (None, None) => EchoDtype::C64,
    };
    let fading_model = args.fading.or(file.fading).unwrap_or_default();
    let seed = master_seed(args.seed, file.seed)?;
    let trajectory_out = layer.path(args.trajectory, file.trajectory.as_ref());

    let cloud = load_point_cloud(&cloud_path)?;
    let motion: TargetMotionModel = read_json(&motion_path)?;
    if !(args.keep_beams || file.keep_beams.unwrap_or(false)) {
        system.point_beams_at(&motion.initial_position)?;
    }
    let attitude_seed = derive_seed(seed, Stream::Attitude, &[]);
    if let Some(path) = &trajectory_out {
        log::info!("writing trajectory to {}", path.display());
        let sim = simulate_trajectory(&cloud, &motion, system.n, system.ts, attitude_seed)?;
        write_trajectory(path, system.n, cloud.num_points(), sim)?;
    }
    log::info!("synthesizing {} x {} echo for {} points", system.n, system.m, cloud.num_points());
    let sim = simulate_trajectory(&cloud, &motion, system.n, system.ts, attitude_seed)?;
    let fading = fading_coefficients(fading_model, cloud.num_points(), derive_seed(seed, Stream::Fading, &[]));
    let clean = synthesize_echo(sim, &fading, &system)?;
    let power = measure_signal_power(&clean);
    let echo = match snr {
        Snr::Noiseless => clean,
        Snr::Db(_) => add_noise(&clean, snr, derive_seed(seed, Stream::Noise, &[]))?,
    };
    write_echo(&out, &echo, dtype)?;

    let summary = json!({
        "out": out,
        "points": cloud.num_points(),
        "symbols": echo.n_symbols(),
        "subcarriers": echo.n_subcarriers(),
        "signal_power": power,
        "snr_db": echo.meta.snr,
        "noise_variance": echo.meta.noise_variance,
        "seed": seed,
    });
    let text = format!(
        "wrote {}: L = {}, N = {}, M = {}, signal power {:.6e}, SNR {}",
        out.display(),
        cloud.num_points(),
        echo.n_symbols(),
        echo.n_subcarriers(),
        power,
        echo.meta.snr
    );
    emit(json, &summary, &text);
    Ok(())
}
