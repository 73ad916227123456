//! Linear cycle-time model of compute devices: the per-partial-sum constant,
//! stop-state behavior of controllers, constant calibration from measured
//! samples, and the workload ramp simulation.
//!
//! All internal times are microseconds in f64; ramp records are exported in
//! milliseconds to match how cycle times are usually plotted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeviceError {
    /// No usable calibration sample (empty input or all n = 0).
    #[error("insufficient data: need at least one sample with n > 0")]
    InsufficientData,
    #[error("invalid ramp range: n_start {n_start} > n_end {n_end}")]
    InvalidRange { n_start: u64, n_end: u64 },
    #[error("invalid ramp step: step must be >= 1")]
    ZeroStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceRole {
    Controller,
    Edge,
}

/// A compute device under the linear model `delta_t_cycle(n) = c * n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    pub id: String,
    /// Cycle-time increment per partial sum, microseconds per unit n.
    pub c_us_per_n: f64,
    /// Workload limit; exceeding it trips a controller into its stop state.
    /// Edge devices have none.
    pub n_max: Option<u64>,
    pub role: DeviceRole,
}

impl DeviceProfile {
    /// Cycle-time increment for workload `n`, in microseconds.
    pub fn delta_cycle_us(&self, n: u64) -> f64 {
        self.c_us_per_n * n as f64
    }

    /// True when `n` is strictly above the stop limit. The boundary
    /// `n == n_max` still runs; devices without a limit never stop.
    pub fn check_stop(&self, n: u64) -> bool {
        self.n_max.is_some_and(|limit| n > limit)
    }
}

/// Least-squares slope through the origin over `(n, delta_cycle_ms)` samples;
/// with a single sample this reduces to `t / n`. Returns ms per unit n.
pub fn fit_constant_ms(samples: &[(u64, f64)]) -> Result<f64, DeviceError> {
    let (num, den) = samples.iter().fold((0.0, 0.0), |(num, den), &(n, t_ms)| {
        let n = n as f64;
        (num + n * t_ms, den + n * n)
    });
    if den == 0.0 {
        return Err(DeviceError::InsufficientData);
    }
    Ok(num / den)
}

/// One step of a workload ramp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampRecord {
    pub n: u64,
    pub delta_cycle_ms: f64,
    pub stopped: bool,
}

/// Ramp the workload from `n_start` to `n_end` in increments of `n_step`,
/// recording the cycle-time increment at each point. The first point past
/// the device's stop limit is emitted with `stopped = true` and the ramp
/// ends there.
pub fn simulate_ramp(
    device: &DeviceProfile,
    n_start: u64,
    n_step: u64,
    n_end: u64,
) -> Result<Vec<RampRecord>, DeviceError> {
    let points = ramp_points(device, n_start, n_step, n_end)?;
    let record = |&n: &u64| RampRecord {
        n,
        delta_cycle_ms: device.delta_cycle_us(n) / 1_000.0,
        stopped: device.check_stop(n),
    };
    #[cfg(feature = "parallel")]
    {
        Ok(points.par_iter().map(record).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(points.iter().map(record).collect())
    }
}

/// Sequential form of [`simulate_ramp`]; output is identical.
pub fn simulate_ramp_seq(
    device: &DeviceProfile,
    n_start: u64,
    n_step: u64,
    n_end: u64,
) -> Result<Vec<RampRecord>, DeviceError> {
    let points = ramp_points(device, n_start, n_step, n_end)?;
    Ok(points
        .iter()
        .map(|&n| RampRecord {
            n,
            delta_cycle_ms: device.delta_cycle_us(n) / 1_000.0,
            stopped: device.check_stop(n),
        })
        .collect())
}

/// Workload values visited by the ramp, truncated one past the stop limit.
fn ramp_points(
    device: &DeviceProfile,
    n_start: u64,
    n_step: u64,
    n_end: u64,
) -> Result<Vec<u64>, DeviceError> {
    if n_step == 0 {
        return Err(DeviceError::ZeroStep);
    }
    if n_start > n_end {
        return Err(DeviceError::InvalidRange { n_start, n_end });
    }
    let mut points = Vec::new();
    let mut n = n_start;
    loop {
        points.push(n);
        if device.check_stop(n) {
            break;
        }
        match n.checked_add(n_step) {
            Some(next) if next <= n_end => n = next,
            _ => break,
        }
    }
    Ok(points)
}
