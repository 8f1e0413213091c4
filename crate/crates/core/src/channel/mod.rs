//! Beamformed OFDM echo synthesis.
//!
//! For scatterer `l` at symbol `n` the receiver sees
//!
//! ```text
//! alpha_l e^{-j 4 pi f_m r / c} (w^H a_R(Psi, Omega)) (a_H^T(Psi, Omega) x^*)
//! ```
//!
//! with `x = sqrt(rho_s P_t / N_H) a_H(Psi_t, Omega_t) s` and
//! `w = sqrt(1 / N_R) a_R(Psi_r, Omega_r)`. The conjugate acts on the steering
//! vector only, so dividing by the pilot `s` leaves a pilot-free matrix. Both
//! beamforming gains factor into a pair of 1-D array factors, and the range
//! phase over subcarriers is a geometric sequence, so one symbol costs
//! `O(L (N_x + N_z) + L M)`.

mod config;
mod file;

use ndarray::{Array2, ArrayViewMut1};
use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kinematics::TrajectorySnapshot;
use crate::rng::{derive_seed, rng_from_seed, Stream};
use crate::{Error, Result, SPEED_OF_LIGHT};

pub use config::{ArrayDims, Beam, PilotScheme, SystemConfig};
pub use file::{read_echo, read_echo_header, write_echo, EchoDtype, EchoFile, EchoHeader, ECHO_MAGIC, ECHO_VERSION};

/// Subcarriers advanced by the phase recurrence before it is re-anchored to
/// an exactly computed phase.
const REANCHOR_EVERY: usize = 128;

/// Array response `a_x(Psi) (x) a_z(Omega)`, entry `ix * nz + iz` equal to
/// `e^{j 2 pi f0 d (Psi ix + Omega iz) / c}`.
pub fn steering_vector(psi: f64, omega: f64, dims: ArrayDims, f0: f64, d: f64) -> Vec<Complex64> {
    let kappa = 2.0 * std::f64::consts::PI * f0 * d / SPEED_OF_LIGHT;
    let mut out = Vec::with_capacity(dims.len());
    for ix in 0..dims.nx {
        for iz in 0..dims.nz {
            out.push(Complex64::cis(kappa * (psi * ix as f64 + omega * iz as f64)));
        }
    }
    out
}

/// `sum_{k < n} e^{j x k}`.
fn array_factor(x: f64, n: usize) -> Complex64 {
    let step = Complex64::cis(x);
    let mut z = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        sum += z;
        z *= step;
    }
    sum
}

/// Precomputed beamforming constants of one configuration.
#[derive(Debug, Clone, Copy)]
struct Beamformer {
    kappa: f64,
    rx: (ArrayDims, Beam, f64),
    tx: (ArrayDims, Beam, f64),
}

impl Beamformer {
    fn new(cfg: &SystemConfig) -> Self {
        let kappa = 2.0 * std::f64::consts::PI * cfg.f0 * cfg.element_spacing() / SPEED_OF_LIGHT;
        let rx_scale = (1.0 / cfg.rx_array.len() as f64).sqrt();
        let tx_scale = (cfg.sensing_fraction * cfg.tx_power / cfg.tx_array.len() as f64).sqrt();
        Beamformer {
            kappa,
            rx: (cfg.rx_array, cfg.rx_beam, rx_scale),
            tx: (cfg.tx_array, cfg.tx_beam, tx_scale),
        }
    }

    fn gain(&self, (dims, beam, scale): (ArrayDims, Beam, f64), psi: f64, omega: f64) -> Complex64 {
        scale
            * array_factor(self.kappa * (psi - beam.psi), dims.nx)
            * array_factor(self.kappa * (omega - beam.omega), dims.nz)
    }

    /// `w^H a_R(Psi, Omega)`.
    fn receive(&self, psi: f64, omega: f64) -> Complex64 {
        self.gain(self.rx, psi, omega)
    }

    /// `a_H^T(Psi, Omega) conj(sqrt(rho_s P_t / N_H) a_H(Psi_t, Omega_t))`.
    fn transmit(&self, psi: f64, omega: f64) -> Complex64 {
        self.gain(self.tx, psi, omega)
    }
}

/// `w^H a_R(Psi, Omega)` for the receive beam of `cfg`.
pub fn receive_gain(cfg: &SystemConfig, psi: f64, omega: f64) -> Complex64 {
    Beamformer::new(cfg).receive(psi, omega)
}

/// Pilot symbol `s[n, m]`.
pub fn pilot(scheme: PilotScheme, n: usize, m: usize) -> Complex64 {
    match scheme {
        PilotScheme::UnitConstant => Complex64::new(1.0, 0.0),
        PilotScheme::RandomUnitModulus { seed } => {
            let k = derive_seed(seed, Stream::Pilot, &[n as u64, m as u64]) & 3;
            let angle = std::f64::consts::FRAC_PI_4 + k as f64 * std::f64::consts::FRAC_PI_2;
            Complex64::cis(angle)
        }
    }
}

/// Per-point fading convention.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingModel {
    /// `alpha_l = 1`.
    Constant,
    /// `alpha_l = A / sqrt(L)`, `A` unit modulus with a uniform random phase
    /// shared by all points.
    #[default]
    RandomPhase,
}

pub fn fading_coefficients(model: FadingModel, n_points: usize, seed: u64) -> Vec<Complex64> {
    match model {
        FadingModel::Constant => vec![Complex64::new(1.0, 0.0); n_points],
        FadingModel::RandomPhase => {
            use rand::Rng;
            let phase = rng_from_seed(seed).random_range(0.0..std::f64::consts::TAU);
            let a = Complex64::from_polar(1.0 / (n_points.max(1) as f64).sqrt(), phase);
            vec![a; n_points]
        }
    }
}

/// Noise level of an echo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SnrRepr", into = "SnrRepr")]
pub enum Snr {
    Noiseless,
    Db(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SnrRepr {
    Db(f64),
    Word(String),
}

impl TryFrom<SnrRepr> for Snr {
    type Error = String;

    fn try_from(r: SnrRepr) -> std::result::Result<Self, String> {
        match r {
            SnrRepr::Db(v) if v.is_finite() => Ok(Snr::Db(v)),
            SnrRepr::Db(v) => Err(format!("SNR must be finite, got {v}")),
            SnrRepr::Word(w) => w.parse(),
        }
    }
}

impl From<Snr> for SnrRepr {
    fn from(s: Snr) -> Self {
        match s {
            Snr::Noiseless => SnrRepr::Word("noiseless".into()),
            Snr::Db(v) => SnrRepr::Db(v),
        }
    }
}

impl std::str::FromStr for Snr {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "noiseless" | "inf" | "+inf" => Ok(Snr::Noiseless),
            t => match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Snr::Db(v)),
                _ => Err(format!("expected an SNR in dB or \"noiseless\", got {s:?}")),
            },
        }
    }
}

impl std::fmt::Display for Snr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Snr::Noiseless => f.write_str("noiseless"),
            Snr::Db(v) => write!(f, "{v} dB"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoMeta {
    pub system: SystemConfig,
    /// `None` when read back from a file.
    pub fading: Option<FadingModel>,
    pub snr: Snr,
    pub noise_seed: Option<u64>,
    /// Per-entry noise variance, 0 when noiseless.
    pub noise_variance: f64,
}

/// Echo matrix `Y`, `N` symbols by `M` subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoMatrix {
    pub data: Array2<Complex64>,
    pub meta: EchoMeta,
}

impl EchoMatrix {
    pub fn n_symbols(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.data.ncols()
    }

    /// Rebuilds an echo read from disk under the band it was recorded with.
    pub fn from_file(file: EchoFile, system: &SystemConfig) -> Result<Self> {
        system.validate()?;
        let (n, m) = file.data.dim();
        if m != system.m {
            return Err(Error::dimension(format!(
                "echo has {m} subcarriers, configuration expects {}",
                system.m
            )));
        }
        let mut system = system.clone();
        system.n = n;
        Ok(EchoMatrix {
            data: file.data,
            meta: EchoMeta {
                system,
                fading: None,
                snr: file.header.snr,
                noise_seed: None,
                noise_variance: 0.0,
            },
        })
    }
}

/// Adds one scatterer's contribution `coeff e^{-j 4 pi f_m r / c}` to a row.
fn accumulate_point(row: &mut ArrayViewMut1<Complex64>, coeff: Complex64, r: f64, f0: f64, delta_f: f64) {
    // phases tracked in cycles; the fractional part keeps them precise at
    // ranges where 4 pi f0 r / c runs to 1e5 rad
    let base = 2.0 * f0 * r / SPEED_OF_LIGHT;
    let step = 2.0 * delta_f * r / SPEED_OF_LIGHT;
    let ratio = Complex64::cis(-std::f64::consts::TAU * step.fract());
    let mut z = Complex64::new(0.0, 0.0);
    for (m, y) in row.iter_mut().enumerate() {
        if m % REANCHOR_EVERY == 0 {
            let cycles = base + m as f64 * step;
            z = coeff * Complex64::cis(-std::f64::consts::TAU * cycles.fract());
        }
        *y += z;
        z *= ratio;
    }
}

/// Noiseless echo matrix of a trajectory under `config`.
///
/// `trajectory` must yield exactly `config.n` snapshots of `fading.len()`
/// points each.
pub fn synthesize_echo<I>(trajectory: I, fading: &[Complex64], config: &SystemConfig) -> Result<EchoMatrix>
where
    I: IntoIterator<Item = Result<TrajectorySnapshot>>,
{
    config.validate()?;
    let bf = Beamformer::new(config);
    let mut data = Array2::<Complex64>::zeros((config.n, config.m));
    let mut count = 0usize;
    for snap in trajectory {
        let snap = snap?;
        if count >= config.n {
            return Err(Error::dimension(format!(
                "trajectory has more than {} snapshots",
                config.n
            )));
        }
        if snap.points.len() != fading.len() {
            return Err(Error::dimension(format!(
                "snapshot {} has {} points but {} fading coefficients were given",
                snap.symbol_index,
                snap.points.len(),
                fading.len()
            )));
        }
        let mut row = data.row_mut(count);
        for (p, &alpha) in snap.points.iter().zip(fading) {
            let (psi, omega) = p.spatial_direction();
            let coeff = alpha * bf.receive(psi, omega) * bf.transmit(psi, omega);
            if coeff != Complex64::new(0.0, 0.0) {
                accumulate_point(&mut row, coeff, p.r, config.f0, config.delta_f);
            }
        }
        if config.store_raw && config.pilot != PilotScheme::UnitConstant {
            for (m, y) in row.iter_mut().enumerate() {
                *y *= pilot(config.pilot, count, m);
            }
        }
        count += 1;
    }
    if count != config.n {
        return Err(Error::dimension(format!(
            "trajectory has {count} snapshots, configuration expects {}",
            config.n
        )));
    }
    Ok(EchoMatrix {
        data,
        meta: EchoMeta {
            system: config.clone(),
            fading: None,
            snr: Snr::Noiseless,
            noise_seed: None,
            noise_variance: 0.0,
        },
    })
}

/// Mean of `|y|^2` over all entries.
pub fn measure_signal_power(echo: &EchoMatrix) -> f64 {
    if echo.data.is_empty() {
        return 0.0;
    }
    echo.data.iter().map(|y| y.norm_sqr()).sum::<f64>() / echo.data.len() as f64
}

/// Adds circular complex Gaussian noise of variance
/// `measured power / 10^(snr / 10)`. Row `n` draws from its own seed derived
/// from `(rng_seed, n)`, so the result does not depend on thread scheduling.
pub fn add_noise(echo: &EchoMatrix, snr: Snr, rng_seed: u64) -> Result<EchoMatrix> {
    if echo.meta.snr != Snr::Noiseless {
        return Err(Error::config(format!("echo already carries noise at {}", echo.meta.snr)));
    }
    let snr_db = match snr {
        Snr::Noiseless => return Ok(echo.clone()),
        Snr::Db(v) => v,
    };
    let power = measure_signal_power(echo);
    if power.is_nan() || power <= 0.0 {
        return Err(Error::Degenerate("cannot calibrate noise against a zero-power echo".into()));
    }
    let variance = power / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, (variance / 2.0).sqrt()).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut out = echo.clone();
    let m = out.data.ncols().max(1);
    out.data
        .as_slice_mut()
        .expect("echo matrices are kept in standard layout")
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(n, row)| {
            let mut rng = rng_from_seed(derive_seed(rng_seed, Stream::Noise, &[n as u64]));
            for y in row.iter_mut() {
                let re = normal.sample(&mut rng);
                let im = normal.sample(&mut rng);
                *y += Complex64::new(re, im);
            }
        });
    out.meta.snr = snr;
    out.meta.noise_seed = Some(rng_seed);
    out.meta.noise_variance = variance;
    Ok(out)
}
