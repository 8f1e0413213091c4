use image::RgbImage;
use ndarray::Array2;

use crate::{Error, Result};

use super::{Colormap, Scaling};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    pub colormap: Colormap,
    pub scaling: Scaling,
    /// Divide by the matrix maximum first.
    pub normalize: bool,
}

fn scale_value(v: f64, scaling: Scaling) -> f64 {
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    match scaling {
        Scaling::Linear => v,
        Scaling::LogDb { floor_db } => {
            if v <= 0.0 {
                0.0
            } else {
                let db = (20.0 * v.log10()).max(floor_db);
                (db - floor_db) / -floor_db
            }
        }
    }
}

/// Sample position in the source for output pixel `i`, pixel centers aligned.
fn source_coord(i: u32, out_len: u32, src_len: usize) -> (usize, usize, f64) {
    let s = ((i as f64 + 0.5) * src_len as f64 / out_len as f64 - 0.5).clamp(0.0, (src_len - 1) as f64);
    let lo = s.floor() as usize;
    let hi = (lo + 1).min(src_len - 1);
    (lo, hi, s - lo as f64)
}

/// Renders a feature matrix: optional normalization, scaling, bilinear
/// resize (matrix rows run down the image) and color mapping. An all-zero
/// matrix renders as the colormap's floor color.
pub fn render_feature_image(matrix: &Array2<f64>, opts: &RenderOptions) -> Result<RgbImage> {
    let (rows, cols) = matrix.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::dimension("cannot render an empty matrix"));
    }
    if opts.width == 0 || opts.height == 0 {
        return Err(Error::config("image size must be at least 1x1"));
    }
    let peak = matrix.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let norm = if opts.normalize && peak > 0.0 { 1.0 / peak } else { 1.0 };
    let scaled = matrix.mapv(|v| scale_value(v * norm, opts.scaling));

    let xs: Vec<_> = (0..opts.width).map(|x| source_coord(x, opts.width, cols)).collect();
    let mut img = RgbImage::new(opts.width, opts.height);
    for y in 0..opts.height {
        let (r0, r1, ty) = source_coord(y, opts.height, rows);
        for (x, &(c0, c1, tx)) in xs.iter().enumerate() {
            let top = scaled[[r0, c0]] * (1.0 - tx) + scaled[[r0, c1]] * tx;
            let bottom = scaled[[r1, c0]] * (1.0 - tx) + scaled[[r1, c1]] * tx;
            let v = top * (1.0 - ty) + bottom * ty;
            img.put_pixel(x as u32, y, image::Rgb(opts.colormap.map(v)));
        }
    }
    Ok(img)
}

/// Stacks the cmD image above the HRRP image.
pub fn aggregate_images(cmd_img: &RgbImage, hrrp_img: &RgbImage) -> Result<RgbImage> {
    if cmd_img.dimensions() != hrrp_img.dimensions() {
        return Err(Error::dimension(format!(
            "cannot stack {:?} on {:?}",
            cmd_img.dimensions(),
            hrrp_img.dimensions()
        )));
    }
    let (w, h) = cmd_img.dimensions();
    let mut raw = Vec::with_capacity(2 * cmd_img.as_raw().len());
    raw.extend_from_slice(cmd_img.as_raw());
    raw.extend_from_slice(hrrp_img.as_raw());
    Ok(RgbImage::from_raw(w, 2 * h, raw).expect("buffer sized for the stacked image"))
}

/// Inverse of [`aggregate_images`].
pub fn split_aggregate(img: &RgbImage) -> Result<(RgbImage, RgbImage)> {
    let (w, h) = img.dimensions();
    if h % 2 != 0 || h == 0 {
        return Err(Error::dimension(format!("aggregate height {h} is not even")));
    }
    let half = img.as_raw().len() / 2;
    let top = RgbImage::from_raw(w, h / 2, img.as_raw()[..half].to_vec()).expect("half buffer");
    let bottom = RgbImage::from_raw(w, h / 2, img.as_raw()[half..].to_vec()).expect("half buffer");
    Ok((top, bottom))
}
