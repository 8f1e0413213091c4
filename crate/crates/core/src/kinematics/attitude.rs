use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result};

/// Yaw, pitch, roll in radians.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Attitude {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl Attitude {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Attitude { yaw, pitch, roll }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.yaw, self.pitch, self.roll]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Attitude::new(a[0], a[1], a[2])
    }
}

/// Per-symbol Gaussian attitude increments, ordered yaw, pitch, roll.
/// `mean` is in radians, `variance` in rad².
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AttitudeJitter {
    pub mean: [f64; 3],
    pub variance: [f64; 3],
}

impl AttitudeJitter {
    /// From the 3x2 jitter matrix: column 0 means, column 1 variances.
    pub fn from_matrix(j: [[f64; 2]; 3]) -> Self {
        AttitudeJitter {
            mean: [j[0][0], j[1][0], j[2][0]],
            variance: [j[0][1], j[1][1], j[2][1]],
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        for k in 0..3 {
            if !self.mean[k].is_finite() {
                return Err(Error::config(format!("jitter mean {k} is not finite")));
            }
            if !(self.variance[k].is_finite() && self.variance[k] >= 0.0) {
                return Err(Error::config(format!(
                    "jitter variance {k} must be finite and >= 0, got {}",
                    self.variance[k]
                )));
            }
        }
        Ok(())
    }
}

/// Random-walk attitude: the value at symbol `n` is the initial attitude plus
/// `n + 1` independent increment triples (symbols `0..=n`).
#[derive(Debug, Clone)]
pub struct AttitudeWalk {
    current: [f64; 3],
    increments: [Normal<f64>; 3],
    rng: SimRng,
}

impl AttitudeWalk {
    pub fn new(initial: Attitude, jitter: &AttitudeJitter, seed: u64) -> Result<Self> {
        jitter.check()?;
        let normal = |k: usize| {
            Normal::new(jitter.mean[k], jitter.variance[k].sqrt())
                .map_err(|e| Error::config(format!("jitter {k}: {e}")))
        };
        Ok(AttitudeWalk {
            current: initial.as_array(),
            increments: [normal(0)?, normal(1)?, normal(2)?],
            rng: rng_from_seed(seed),
        })
    }

    /// Attitude at the next symbol.
    pub fn advance(&mut self) -> Attitude {
        for k in 0..3 {
            self.current[k] += self.increments[k].sample(&mut self.rng);
        }
        Attitude::from_array(self.current)
    }
}

impl Iterator for AttitudeWalk {
    type Item = Attitude;

    fn next(&mut self) -> Option<Attitude> {
        Some(self.advance())
    }
}

/// Attitudes for symbols `0..n_symbols`.
pub fn attitude_walk(initial: Attitude, jitter: &AttitudeJitter, n_symbols: usize, seed: u64) -> Result<Vec<Attitude>> {
    Ok(AttitudeWalk::new(initial, jitter, seed)?.take(n_symbols).collect())
}
