use std::path::PathBuf;

use airguard::channel::{read_echo, EchoMatrix, SystemConfig};
use airguard::features::{
    aggregate_images, cmd_spectrum, hrrp_spectrum, render_feature_image, save_png, write_feature, FeatureConfig, FeatureKind,
};
use airguard::Error;
use clap::Args;
use serde::Deserialize;
use serde_json::json;

use crate::config::{create_dir, read_json, Layer};
use crate::{emit, usage, CliResult};

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Echo file.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// System configuration the echo was recorded with (desk defaults otherwise).
    #[arg(long)]
    system: Option<PathBuf>,
    /// Feature configuration JSON (desk defaults otherwise).
    #[arg(long)]
    features: Option<PathBuf>,
    /// Symbols per group; must divide the echo's symbol count.
    #[arg(long)]
    n0: Option<usize>,
    /// Number of groups; defaults to N / N0.
    #[arg(long)]
    g: Option<usize>,
    /// Output folder for cmd.png, hrrp.png and aggregate.png.
    #[arg(long, short)]
    out_dir: Option<PathBuf>,
    /// Also write the raw matrices as cmd.agft and hrrp.agft.
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtractFile {
    input: Option<PathBuf>,
    system: Option<SystemConfig>,
    features: Option<FeatureConfig>,
    n0: Option<usize>,
    g: Option<usize>,
    out_dir: Option<PathBuf>,
    raw: Option<bool>,
}

pub fn run(args: ExtractArgs, json: bool) -> CliResult<()> {
    let layer: Layer<ExtractFile> = Layer::load(args.config.as_deref())?;
    let file = &layer.value;
    let input = layer
        .path(args.input, file.input.as_ref())
        .ok_or_else(|| usage("extract", "--input <PATH> is required"))?;
    let out_dir = layer
        .path(args.out_dir, file.out_dir.as_ref())
        .ok_or_else(|| usage("extract", "--out-dir <PATH> is required"))?;
    let system: SystemConfig = match args.system {
        Some(p) => read_json(&p)?,
        None => file.system.clone().unwrap_or_else(SystemConfig::desk),
    };
    let mut features: FeatureConfig = match args.features {
        Some(p) => read_json(&p)?,
        None => file.features.clone().unwrap_or_else(FeatureConfig::desk),
    };
    let raw = args.raw || file.raw.unwrap_or(false);

    let echo = EchoMatrix::from_file(read_echo(&input)?, &system)?;
    let n = echo.n_symbols();
    if let Some(n0) = args.n0.or(file.n0) {
        features.n0 = n0;
    }
    if features.n0 == 0 || n % features.n0 != 0 {
        return Err(Error::Config(format!("N0 = {} does not divide the echo's {n} symbols", features.n0)).into());
    }
    features.g = match args.g.or(file.g) {
        Some(g) if g * features.n0 != n => {
            return Err(Error::Config(format!("G * N0 = {g} * {} does not equal N = {n}", features.n0)).into())
        }
        Some(g) => g,
        None => n / features.n0,
    };
    features.validate()?;

    log::info!("extracting features from {} ({n} x {})", input.display(), echo.n_subcarriers());
    let cmd = cmd_spectrum(&echo, &features)?;
    let hrrp = hrrp_spectrum(&echo, &features)?;
    let cmd_img = render_feature_image(&cmd.matrix, &features.cmd_render())?;
    let hrrp_img = render_feature_image(&hrrp.matrix, &features.hrrp_render())?;
    let aggregate = aggregate_images(&cmd_img, &hrrp_img)?;

    create_dir(&out_dir)?;
    save_png(&cmd_img, out_dir.join("cmd.png"))?;
    save_png(&hrrp_img, out_dir.join("hrrp.png"))?;
    save_png(&aggregate, out_dir.join("aggregate.png"))?;
    if raw {
        write_feature(out_dir.join("cmd.agft"), &cmd.matrix, FeatureKind::Cmd)?;
        write_feature(out_dir.join("hrrp.agft"), &hrrp.matrix, FeatureKind::Hrrp)?;
    }

    let summary = json!({
        "input": input,
        "out_dir": out_dir,
        "n0": features.n0,
        "g": features.g,
        "cmd_shape": cmd.matrix.dim(),
        "hrrp_shape": hrrp.matrix.dim(),
        "cmd_center_bin": cmd.center_bin,
        "coarse_ranges": hrrp.coarse_ranges,
        "aggregate_size": aggregate.dimensions(),
    });
    let text = format!(
        "wrote {}: cmD {}x{}, HRRP {}x{}, aggregate {}x{}",
        out_dir.display(),
        cmd.matrix.nrows(),
        cmd.matrix.ncols(),
        hrrp.matrix.nrows(),
        hrrp.matrix.ncols(),
        aggregate.width(),
        aggregate.height()
    );
    emit(json, &summary, &text);
    Ok(())
}
