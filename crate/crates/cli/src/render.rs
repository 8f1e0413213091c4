use std::path::PathBuf;

use airguard::features::{read_feature, render_feature_image, save_png, Colormap, FeatureConfig, FeatureKind, Scaling};
use airguard::Error;
use clap::Args;
use serde::Deserialize;
use serde_json::json;

use crate::config::{parse_word, Layer};
use crate::{emit, usage, CliResult};

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// JSON file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature matrix file.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output PNG.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    /// viridis or gray.
    #[arg(long, value_parser = parse_word::<Colormap>)]
    colormap: Option<Colormap>,
    /// Display in dB, clipped at this (negative) floor.
    #[arg(long, allow_hyphen_values = true)]
    log_floor: Option<f64>,
    /// Divide by the maximum first (always on for HRRP matrices).
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RenderFile {
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    width: Option<u32>,
    height: Option<u32>,
    colormap: Option<Colormap>,
    log_floor: Option<f64>,
    normalize: Option<bool>,
}

pub fn run(args: RenderArgs, json: bool) -> CliResult<()> {
    let layer: Layer<RenderFile> = Layer::load(args.config.as_deref())?;
    let file = &layer.value;
    let input = layer
        .path(args.input, file.input.as_ref())
        .ok_or_else(|| usage("render", "--input <PATH> is required"))?;
    let out = layer
        .path(args.out, file.out.as_ref())
        .ok_or_else(|| usage("render", "--out <PATH> is required"))?;
    let (header, matrix) = read_feature(&input)?;
    let defaults = FeatureConfig::desk();
    let mut opts = match header.kind {
        FeatureKind::Cmd => defaults.cmd_render(),
        FeatureKind::Hrrp => defaults.hrrp_render(),
    };
    opts.width = args.width.or(file.width).unwrap_or(opts.width);
    opts.height = args.height.or(file.height).unwrap_or(opts.height);
    opts.colormap = args.colormap.or(file.colormap).unwrap_or(opts.colormap);
    opts.normalize |= args.normalize || file.normalize.unwrap_or(false);
    if let Some(floor_db) = args.log_floor.or(file.log_floor) {
        if !(floor_db < 0.0 && floor_db.is_finite()) {
            return Err(Error::Config(format!("log floor must be negative, got {floor_db}")).into());
        }
        opts.scaling = Scaling::LogDb { floor_db };
    }
    let img = render_feature_image(&matrix, &opts)?;
    save_png(&img, &out)?;
    let summary = json!({
        "input": input,
        "out": out,
        "kind": header.kind.to_string(),
        "rows": header.rows,
        "cols": header.cols,
        "size": img.dimensions(),
    });
    let text = format!(
        "wrote {} ({} {}x{} -> {}x{})",
        out.display(),
        header.kind,
        header.rows,
        header.cols,
        img.width(),
        img.height()
    );
    emit(json, &summary, &text);
    Ok(())
}
