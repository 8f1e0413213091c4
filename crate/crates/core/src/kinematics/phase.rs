//! Per-symbol phase increments for rotor paddles and flapping wings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rotation applied to a paddle at symbol `n`: the initial phase at `n = 0`,
/// then a constant `2 pi F Ts` per symbol.
pub fn uav_phase_step(n: usize, frequency: f64, initial_phase: f64, ts: f64) -> f64 {
    if n == 0 {
        initial_phase
    } else {
        2.0 * PI * frequency * ts
    }
}

/// Flapping range `(min, max)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WingBounds {
    pub min: f64,
    pub max: f64,
}

impl WingBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        let b = WingBounds { min, max };
        b.check()?;
        Ok(b)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.min.is_finite() && self.max.is_finite() && self.min < self.max {
            Ok(())
        } else {
            Err(Error::config(format!(
                "wing bounds must satisfy min < max, got ({}, {})",
                self.min, self.max
            )))
        }
    }

    /// `max - min`.
    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    /// Magnitude of one flapping increment, `2 (max - min) F Ts`.
    pub fn step(&self, frequency: f64, ts: f64) -> f64 {
        2.0 * self.span() * frequency * ts
    }
}

/// Wing phase and the increment that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingPhaseState {
    pub delta: f64,
    pub beta: f64,
}

/// Advances the flapping oscillator by one symbol.
///
/// The direction of the new increment follows the six-row reversal table:
/// keep the previous direction while `min <= beta_prev <= max`, go negative
/// once `beta_prev > max`, go positive once `beta_prev < min`. A boundary value
/// counts as inside. The returned phase is `beta_prev + delta`, i.e. the wing
/// angle after this step's rotation.
pub fn wing_phase_step(state: WingPhaseState, bounds: WingBounds, frequency: f64, ts: f64) -> Result<WingPhaseState> {
    bounds.check()?;
    if frequency.is_nan() || frequency <= 0.0 {
        return Err(Error::config(format!(
            "flapping frequency must be positive, got {frequency}"
        )));
    }
    let step = bounds.step(frequency, ts);
    let upward = if state.beta > bounds.max {
        false
    } else if state.beta < bounds.min {
        true
    } else {
        state.delta >= 0.0
    };
    let delta = if upward { step } else { -step };
    Ok(WingPhaseState {
        delta,
        beta: state.beta + delta,
    })
}
