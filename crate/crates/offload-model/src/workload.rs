//! Synthetic load generator model: partial sums of the Leibniz series for pi
//! and the FLOP accounting that goes with them.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorkloadError {
    /// FLOP count does not fit in 64 bits.
    #[error("FLOP count overflows for n = {n}")]
    FlopOverflow { n: u64 },
    /// Requested digit count is outside the tabulated range.
    #[error("unsupported precision: {digits} digits (table covers 1..=6)")]
    UnsupportedPrecision { digits: u32 },
}

/// Workload handed to the load generator: the number of partial sums
/// evaluated in one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkloadSpec {
    pub n: u64,
}

impl WorkloadSpec {
    pub fn new(n: u64) -> Self {
        Self { n }
    }

    /// Estimate of pi from the first `n + 1` terms of the alternating series,
    /// accumulated strictly left to right in f64, matching the per-cycle
    /// incremental evaluation of the simulated controller program.
    pub fn leibniz_estimate(&self) -> f64 {
        let mut sum = 0.0_f64;
        for k in 0..=self.n {
            let term = 1.0 / (2 * k + 1) as f64;
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        4.0 * sum
    }

    /// Floating-point operations for `n` partial sums: `n * (n + 3) + 1`.
    pub fn flop_count(&self) -> Result<u64, WorkloadError> {
        self.n
            .checked_add(3)
            .and_then(|m| self.n.checked_mul(m))
            .and_then(|v| v.checked_add(1))
            .ok_or(WorkloadError::FlopOverflow { n: self.n })
    }
}

/// One row of the digits-to-workload table: the pi prefix produced, the
/// partial sums required, and the order of magnitude of FLOP spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitsEntry {
    pub digits_shown: &'static str,
    pub n: u64,
    pub flop_magnitude: u32,
}

/// Stored as data rather than re-derived: the "3.141" prefix appears twice
/// (n = 10^4 and n = 10^5) and no interpretation is imposed on that.
pub const DIGITS_TABLE: [DigitsEntry; 6] = [
    DigitsEntry { digits_shown: "3", n: 2, flop_magnitude: 1 },
    DigitsEntry { digits_shown: "3.1", n: 32, flop_magnitude: 3 },
    DigitsEntry { digits_shown: "3.14", n: 1_000, flop_magnitude: 6 },
    DigitsEntry { digits_shown: "3.141", n: 10_000, flop_magnitude: 8 },
    DigitsEntry { digits_shown: "3.141", n: 100_000, flop_magnitude: 10 },
    DigitsEntry { digits_shown: "3.14159", n: 1_000_000, flop_magnitude: 12 },
];

/// Partial sums needed for the first `digits` digits of pi, per the table.
pub fn required_n_for_digits(digits: u32) -> Result<u64, WorkloadError> {
    if !(1..=6).contains(&digits) {
        return Err(WorkloadError::UnsupportedPrecision { digits });
    }
    Ok(DIGITS_TABLE[(digits - 1) as usize].n)
}
