//! Feature extraction: the centralized micro-Doppler (cmD) spectrum, the HRRP
//! sequence spectrum, and their rendering to RGB images.

mod cmd;
pub mod colormap;
mod file;
mod hrrp;
mod render;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use cmd::{cmd_spectrum, CmdSpectrum};
pub use colormap::Colormap;
pub use file::{read_feature, read_feature_header, write_feature, FeatureHeader, FeatureKind, FEATURE_MAGIC};
pub use hrrp::{hrrp_coarse_range, hrrp_spectrum, HrrpSpectrum};
pub use image::RgbImage;
pub use render::{aggregate_images, render_feature_image, split_aggregate, RenderOptions};

/// Amplitude scaling applied before color mapping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scaling {
    #[default]
    Linear,
    /// `20 log10(v)` clipped at `floor_db` (< 0) and mapped to [0, 1].
    LogDb { floor_db: f64 },
}

/// What the HRRP dictionary is correlated against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HrrpMatch {
    /// The frequency-domain echo row: a true matched filter.
    #[default]
    Frequency,
    /// The range-domain (IDFT) row, as the formula is literally written.
    RangeProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    /// Symbols per group.
    pub n0: usize,
    /// Number of groups.
    pub g: usize,
    /// HRRP window below the coarse range estimate, m.
    pub r_min: f64,
    /// HRRP window above the coarse range estimate, m.
    pub r_max: f64,
    /// HRRP grid step, m.
    pub delta_r: f64,
    #[serde(default = "default_image_side")]
    pub image_width: u32,
    #[serde(default = "default_image_side")]
    pub image_height: u32,
    #[serde(default)]
    pub colormap: Colormap,
    #[serde(default)]
    pub cmd_scaling: Scaling,
    #[serde(default)]
    pub hrrp_scaling: Scaling,
    #[serde(default)]
    pub hrrp_match: HrrpMatch,
}

fn default_image_side() -> u32 {
    256
}

impl FeatureConfig {
    /// 20 groups of 128 symbols, +-3 m window at 1 cm.
    pub fn desk() -> Self {
        FeatureConfig {
            n0: 128,
            g: 20,
            r_min: 3.0,
            r_max: 3.0,
            delta_r: 0.01,
            image_width: 256,
            image_height: 256,
            colormap: Colormap::Viridis,
            cmd_scaling: Scaling::Linear,
            hrrp_scaling: Scaling::Linear,
            hrrp_match: HrrpMatch::Frequency,
        }
    }

    /// 100 groups of 128 symbols.
    pub fn full() -> Self {
        FeatureConfig { g: 100, ..Self::desk() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 || self.g == 0 {
            return Err(Error::config("n0 and g must be at least 1"));
        }
        if self.image_width == 0 || self.image_height == 0 {
            return Err(Error::config("image size must be at least 1x1"));
        }
        for s in [self.cmd_scaling, self.hrrp_scaling] {
            if let Scaling::LogDb { floor_db } = s {
                if !(floor_db < 0.0 && floor_db.is_finite()) {
                    return Err(Error::config(format!("log floor must be negative, got {floor_db}")));
                }
            }
        }
        self.grid_len().map(|_| ())
    }

    /// HRRP grid length `I = (r_max + r_min + delta_r) / delta_r`, which must
    /// be a positive integer.
    pub fn grid_len(&self) -> Result<usize> {
        if !(self.delta_r > 0.0 && self.delta_r.is_finite()) {
            return Err(Error::config(format!("delta_r must be positive, got {}", self.delta_r)));
        }
        if !(self.r_min.is_finite() && self.r_max.is_finite()) {
            return Err(Error::config("HRRP window bounds must be finite"));
        }
        let i = (self.r_max + self.r_min + self.delta_r) / self.delta_r;
        let rounded = i.round();
        if rounded < 1.0 || (i - rounded).abs() > 1e-6 * rounded.max(1.0) {
            return Err(Error::config(format!(
                "HRRP window ({} + {}) m is not a whole number of {} m steps (I = {i})",
                self.r_min, self.r_max, self.delta_r
            )));
        }
        Ok(rounded as usize)
    }

    pub fn cmd_render(&self) -> RenderOptions {
        RenderOptions {
            width: self.image_width,
            height: self.image_height,
            colormap: self.colormap,
            scaling: self.cmd_scaling,
            normalize: false,
        }
    }

    pub fn hrrp_render(&self) -> RenderOptions {
        RenderOptions {
            scaling: self.hrrp_scaling,
            normalize: true,
            ..self.cmd_render()
        }
    }
}

/// Writes `img` as an 8-bit RGB PNG.
pub fn save_png(img: &RgbImage, path: impl AsRef<std::path::Path>) -> Result<()> {
    let path = path.as_ref();
    img.save_with_format(path, image::ImageFormat::Png).map_err(|e| match e {
        image::ImageError::IoError(source) => Error::io(path, source),
        other => Error::io(path, std::io::Error::other(other)),
    })
}

/// Both spectra of `echo`, rendered and stacked: cmD on top, HRRP below.
pub fn feature_image(echo: &crate::channel::EchoMatrix, cfg: &FeatureConfig) -> Result<RgbImage> {
    let cmd = cmd_spectrum(echo, cfg)?;
    let hrrp = hrrp_spectrum(echo, cfg)?;
    aggregate_images(
        &render_feature_image(&cmd.matrix, &cfg.cmd_render())?,
        &render_feature_image(&hrrp.matrix, &cfg.hrrp_render())?,
    )
}
