//! Simulation and feature extraction for telling UAVs from birds with an
//! OFDM sensing base station.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! ```text
//! targets     labeled multi-part scattering point clouds (body + rotors/wings)
//!   │
//! kinematics  per-symbol rotor rotation / wing flapping, attitude jitter,
//!   │         translation, Cartesian -> spherical
//! channel     beamformed UPA/OFDM echo matrix Y (N symbols x M subcarriers),
//!   │         SNR-calibrated noise
//! features    centralized micro-Doppler (cmD) and HRRP sequence spectra,
//!   │         rendered to RGB images
//! dataset     seeded motion-model sampling, SNR sweeps, manifest + splits
//! ```
//!
//! Every random draw goes through [`rng`], so a run is reproducible from its
//! seeds alone.

mod binio;
pub mod channel;
pub mod dataset;
pub mod error;
pub mod features;
pub mod kinematics;
pub mod rng;
pub mod targets;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Cartesian 3-vector in meters (or m/s for velocities).
pub type Vec3 = nalgebra::Vector3<f64>;
