use serde::{Deserialize, Serialize};

use crate::kinematics::cart_to_sph;
use crate::{Error, Result, Vec3, SPEED_OF_LIGHT};

/// Uniform planar array size, `nx` columns along x by `nz` rows along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayDims {
    pub nx: usize,
    pub nz: usize,
}

impl ArrayDims {
    pub fn new(nx: usize, nz: usize) -> Self {
        ArrayDims { nx, nz }
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Spatial-domain direction `(Psi, Omega)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub psi: f64,
    pub omega: f64,
}

impl Beam {
    pub fn new(psi: f64, omega: f64) -> Self {
        Beam { psi, omega }
    }

    /// Direction of a point seen from the base station.
    pub fn towards(p: &Vec3) -> Result<Self> {
        let (psi, omega) = cart_to_sph(p)?.spatial_direction();
        Ok(Beam { psi, omega })
    }
}

/// Sensing symbols `s[n, m]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PilotScheme {
    /// `s = 1` everywhere.
    #[default]
    UnitConstant,
    /// QPSK symbols `e^{j(pi/4 + k pi/2)}` drawn per entry from `seed`.
    RandomUnitModulus { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Lowest subcarrier frequency, Hz.
    pub f0: f64,
    /// Subcarrier spacing, Hz.
    pub delta_f: f64,
    /// Subcarriers per symbol.
    pub m: usize,
    /// Symbol interval including guard, s.
    pub ts: f64,
    /// Symbols per recognition frame.
    pub n: usize,
    pub tx_array: ArrayDims,
    pub rx_array: ArrayDims,
    /// Element spacing in meters; half a wavelength at `f0` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    /// Transmit power, W.
    pub tx_power: f64,
    /// Fraction of the transmit power steered at the target, in (0, 1].
    pub sensing_fraction: f64,
    #[serde(default)]
    pub tx_beam: Beam,
    #[serde(default)]
    pub rx_beam: Beam,
    #[serde(default)]
    pub pilot: PilotScheme,
    /// Keep `y` instead of the pilot-free `y / s`.
    #[serde(default)]
    pub store_raw: bool,
}

impl SystemConfig {
    /// Laptop-scale frame: 256 subcarriers, 2560 symbols.
    pub fn desk() -> Self {
        SystemConfig {
            f0: 26e9,
            delta_f: 480e3,
            m: 256,
            ts: 1e-5,
            n: 2560,
            tx_array: ArrayDims::new(8, 8),
            rx_array: ArrayDims::new(8, 8),
            spacing: None,
            tx_power: 1.0,
            sensing_fraction: 1.0,
            tx_beam: Beam::default(),
            rx_beam: Beam::default(),
            pilot: PilotScheme::UnitConstant,
            store_raw: false,
        }
    }

    /// Full-size frame: 4096 subcarriers, 12800 symbols.
    pub fn full() -> Self {
        SystemConfig {
            m: 4096,
            n: 12800,
            ..Self::desk()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("f0", self.f0)?;
        positive("delta_f", self.delta_f)?;
        positive("ts", self.ts)?;
        positive("tx_power", self.tx_power)?;
        positive("element spacing", self.element_spacing())?;
        if !(self.sensing_fraction > 0.0 && self.sensing_fraction <= 1.0) {
            return Err(Error::config(format!(
                "sensing_fraction must lie in (0, 1], got {}",
                self.sensing_fraction
            )));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::config("m and n must be at least 1"));
        }
        for (name, a) in [("tx_array", self.tx_array), ("rx_array", self.rx_array)] {
            if a.nx == 0 || a.nz == 0 {
                return Err(Error::config(format!("{name} dimensions must be at least 1")));
            }
        }
        for (name, b) in [("tx_beam", self.tx_beam), ("rx_beam", self.rx_beam)] {
            if !(b.psi.abs() <= 1.0 && b.omega.abs() <= 1.0) {
                return Err(Error::config(format!(
                    "{name} direction ({}, {}) must lie in [-1, 1]",
                    b.psi, b.omega
                )));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f0
    }

    pub fn element_spacing(&self) -> f64 {
        self.spacing.unwrap_or(0.5 * self.wavelength())
    }

    /// Occupied bandwidth `W = M delta_f`.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.delta_f
    }

    pub fn subcarrier(&self, m: usize) -> f64 {
        self.f0 + m as f64 * self.delta_f
    }

    /// Points both beams at `p`.
    pub fn point_beams_at(&mut self, p: &Vec3) -> Result<()> {
        let beam = Beam::towards(p)?;
        self.tx_beam = beam;
        self.rx_beam = beam;
        Ok(())
    }
}
