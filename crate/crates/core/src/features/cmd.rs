use std::sync::Arc;

use ndarray::{s, Array2, ArrayView2};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::channel::EchoMatrix;
use crate::{Error, Result};

use super::FeatureConfig;

/// Centered, max-normalized micro-Doppler matrix (`N0 x G`).
#[derive(Debug, Clone, PartialEq)]
pub struct CmdSpectrum {
    /// Row `N0 / 2` holds the bulk-velocity Doppler bin.
    pub matrix: Array2<f64>,
    /// Slices before centering and normalization; zero Doppler sits at row
    /// `N0 - floor(N0 / 2)` (`N0 / 2` for even `N0`).
    pub uncentered: Array2<f64>,
    /// Row of `uncentered` moved to the center.
    pub center_bin: usize,
}

/// Column-wise `N0`-point DFT of a group block (`N0 x M`).
pub(crate) fn doppler_dft(block: ArrayView2<Complex64>, fft: &Arc<dyn Fft<f64>>) -> Array2<Complex64> {
    let (n0, m) = block.dim();
    let mut out = Array2::zeros((n0, m));
    let mut col = vec![Complex64::new(0.0, 0.0); n0];
    for j in 0..m {
        for (c, v) in col.iter_mut().zip(block.column(j)) {
            *c = *v;
        }
        fft.process(&mut col);
        for (o, c) in out.column_mut(j).iter_mut().zip(&col) {
            *o = *c;
        }
    }
    out
}

/// Row `i` of the result is row `(i + N0 / 2) mod N0` of the input.
pub(crate) fn center_zero_frequency<T: Clone>(a: &Array2<T>) -> Array2<T> {
    let n0 = a.nrows();
    let half = n0 / 2;
    Array2::from_shape_fn(a.dim(), |(i, j)| a[[(i + half) % n0, j]].clone())
}

/// Row-wise `M`-point inverse DFT with the `1 / M` factor.
pub(crate) fn range_idft(a: &Array2<Complex64>, ifft: &Arc<dyn Fft<f64>>) -> Array2<Complex64> {
    let m = a.ncols();
    let mut out = a.clone();
    let scale = 1.0 / m as f64;
    for mut row in out.rows_mut() {
        let buf = row.as_slice_mut().expect("fresh arrays are contiguous");
        ifft.process(buf);
        buf.iter_mut().for_each(|z| *z *= scale);
    }
    out
}

fn group_slice(block: ArrayView2<Complex64>, fft: &Arc<dyn Fft<f64>>, ifft: &Arc<dyn Fft<f64>>) -> Vec<f64> {
    let spectrum = range_idft(&center_zero_frequency(&doppler_dft(block, fft)), ifft);
    spectrum.rows().into_iter().map(|row| row.iter().map(|z| z.norm()).sum()).collect()
}

/// Lowest index of the largest value.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Moves the row with the largest sum to row `N0 / 2`, zero-filling rows that
/// fall outside the original matrix, and divides by the global maximum.
fn center_and_normalize(uncentered: &Array2<f64>) -> (Array2<f64>, usize) {
    let (n0, g) = uncentered.dim();
    let center = argmax(uncentered.rows().into_iter().map(|r| r.sum()));
    let peak = uncentered.iter().copied().fold(0.0, f64::max);
    let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };
    let offset = center as isize - (n0 / 2) as isize;
    let mut out = Array2::zeros((n0, g));
    for i in 0..n0 {
        let src = i as isize + offset;
        if (0..n0 as isize).contains(&src) {
            out.row_mut(i).assign(&uncentered.row(src as usize).mapv(|v| v * scale));
        }
    }
    (out, center)
}

/// cmD spectrum of an `N x M` echo split into `G` groups of `N0` symbols.
///
/// Per group: Doppler DFT down each column, zero frequency moved to row
/// `N0 / 2`, range IDFT along each row, modulus, and a sum over range bins.
/// An all-zero echo yields an all-zero matrix.
pub fn cmd_spectrum(echo: &EchoMatrix, cfg: &FeatureConfig) -> Result<CmdSpectrum> {
    if cfg.n0 == 0 || cfg.g == 0 {
        return Err(Error::config("n0 and g must be at least 1"));
    }
    let (n, m) = echo.data.dim();
    if n != cfg.g * cfg.n0 {
        return Err(Error::dimension(format!(
            "echo has {n} symbols, expected G * N0 = {} * {} = {}",
            cfg.g,
            cfg.n0,
            cfg.g * cfg.n0
        )));
    }
    if m == 0 {
        return Err(Error::dimension("echo has no subcarriers"));
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(cfg.n0);
    let ifft = planner.plan_fft_inverse(m);
    let slices: Vec<Vec<f64>> = (0..cfg.g)
        .into_par_iter()
        .map(|g| group_slice(echo.data.slice(s![g * cfg.n0..(g + 1) * cfg.n0, ..]), &fft, &ifft))
        .collect();
    let uncentered = Array2::from_shape_fn((cfg.n0, cfg.g), |(i, g)| slices[g][i]);
    let (matrix, center_bin) = center_and_normalize(&uncentered);
    Ok(CmdSpectrum {
        matrix,
        uncentered,
        center_bin,
    })
}
