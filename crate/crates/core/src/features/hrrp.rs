use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::channel::EchoMatrix;
use crate::{Error, Result, SPEED_OF_LIGHT};

use super::cmd::argmax;
use super::{FeatureConfig, HrrpMatch};

/// Dictionary correlations before the recurrence is re-anchored.
const REANCHOR_EVERY: usize = 128;

/// HRRP sequence spectrum (`I x G`).
#[derive(Debug, Clone, PartialEq)]
pub struct HrrpSpectrum {
    pub matrix: Array2<f64>,
    /// Coarse range estimate of each group, m.
    pub coarse_ranges: Vec<f64>,
}

fn range_profile(row: &[Complex64]) -> Vec<Complex64> {
    let mut buf = row.to_vec();
    if buf.is_empty() {
        return buf;
    }
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let scale = 1.0 / row.len() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

/// Range profile `|IDFT(row)|` (with `1 / M`) and the coarse range
/// `c k / (2 W)` of its first maximum `k`.
pub fn hrrp_coarse_range(echo_row: &[Complex64], bandwidth: f64) -> (Vec<f64>, f64) {
    let profile: Vec<f64> = range_profile(echo_row).iter().map(|z| z.norm()).collect();
    let k = argmax(profile.iter().copied());
    (profile, SPEED_OF_LIGHT * k as f64 / (2.0 * bandwidth))
}

/// `|sum_m e^{j 4 pi m delta_f r / c} y[m]|`: the dictionary correlation with
/// the common `e^{j 4 pi f0 r / c}` factor dropped, which leaves the modulus
/// unchanged.
fn match_value(y: &[Complex64], r: f64, delta_f: f64) -> f64 {
    let step = 2.0 * delta_f * r / SPEED_OF_LIGHT;
    let ratio = Complex64::cis(std::f64::consts::TAU * step.fract());
    let mut z = Complex64::new(0.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, v) in y.iter().enumerate() {
        if m % REANCHOR_EVERY == 0 {
            z = Complex64::cis(std::f64::consts::TAU * (m as f64 * step).fract());
        }
        acc += z * v;
        z *= ratio;
    }
    acc.norm()
}

/// HRRP sequence spectrum: for each group, the first symbol's coarse range
/// `r_g` and dictionary matches on the grid `r_g - r_min + i delta_r`,
/// `i = 0..I`.
pub fn hrrp_spectrum(echo: &EchoMatrix, cfg: &FeatureConfig) -> Result<HrrpSpectrum> {
    let grid = cfg.grid_len()?;
    if cfg.n0 == 0 || cfg.g == 0 {
        return Err(Error::config("n0 and g must be at least 1"));
    }
    let (n, m) = echo.data.dim();
    let needed = (cfg.g - 1) * cfg.n0 + 1;
    if n < needed || m == 0 {
        return Err(Error::dimension(format!(
            "echo of {n} x {m} is too small for {} groups of {} symbols",
            cfg.g, cfg.n0
        )));
    }
    let system = &echo.meta.system;
    let bandwidth = m as f64 * system.delta_f;
    let columns: Vec<(Vec<f64>, f64)> = (0..cfg.g)
        .into_par_iter()
        .map(|g| {
            let row = echo.data.row(g * cfg.n0).to_vec();
            let profile = range_profile(&row);
            let k = argmax(profile.iter().map(|z| z.norm()));
            let coarse = SPEED_OF_LIGHT * k as f64 / (2.0 * bandwidth);
            let target = match cfg.hrrp_match {
                HrrpMatch::Frequency => &row,
                HrrpMatch::RangeProfile => &profile,
            };
            let values = (0..grid)
                .map(|i| match_value(target, coarse - cfg.r_min + i as f64 * cfg.delta_r, system.delta_f))
                .collect();
            (values, coarse)
        })
        .collect();
    let matrix = Array2::from_shape_fn((grid, cfg.g), |(i, g)| columns[g].0[i]);
    let coarse_ranges = columns.into_iter().map(|(_, r)| r).collect();
    Ok(HrrpSpectrum { matrix, coarse_ranges })
}
