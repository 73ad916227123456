//! Factory-network delay composition, virtualization overhead, and RTT
//! profiles for the communication systems that can carry offloaded data.
//!
//! Times are microseconds internally; RTTs in profiles are milliseconds as
//! they are usually reported.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("{system} ({load}) has no {statistic} RTT statistic")]
    MissingStatistic {
        system: CommSystem,
        load: LoadCondition,
        statistic: RttStatistic,
    },
    #[error("no data: zero delivered samples")]
    NoData,
}

string_enum! {
    CommSystem {
        Ethernet => "ethernet",
        WiFi => "wifi",
        Cellular4g => "4g",
        Cellular5g => "5g",
    }
}

string_enum! {
    LoadCondition {
        WithoutLoad => "without_load",
        WithLoad => "with_load",
        Unspecified => "unspecified",
    }
}

string_enum! {
    RttSource {
        Measured => "measured",
        Paper => "paper",
        Assumed => "assumed",
    }
}

string_enum! {
    /// Which RTT order statistic enters the delay budget.
    RttStatistic {
        Median => "median",
        Max => "max",
    }
}

/// Wired factory network: hop count, per-hop forwarding delay, and line
/// propagation, all aggregated into one delay budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoryNetworkSpec {
    pub line_length_m: f64,
    pub hop_count: u32,
    pub per_hop_one_way_us: f64,
    pub propagation_speed_m_per_s: f64,
}

impl FactoryNetworkSpec {
    /// Total wired delay budget in microseconds: hop forwarding plus line
    /// propagation.
    pub fn wired_network_delay_us(&self) -> f64 {
        self.hop_count as f64 * self.per_hop_one_way_us
            + self.line_length_m / self.propagation_speed_m_per_s * 1e6
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.line_length_m > 0.0) {
            return Err("line_length_m must be > 0".into());
        }
        if self.hop_count == 0 {
            return Err("hop_count must be > 0".into());
        }
        if !(self.per_hop_one_way_us > 0.0) {
            return Err("per_hop_one_way_us must be > 0".into());
        }
        if !(self.propagation_speed_m_per_s > 0.0) {
            return Err("propagation_speed_m_per_s must be > 0".into());
        }
        Ok(())
    }
}

/// Latency added by running the offloaded task in a container instead of
/// bare metal: the network interface is crossed twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualizationOverheadSpec {
    pub t_co_us: f64,
    pub t_nio_us: f64,
}

impl VirtualizationOverheadSpec {
    pub fn total_us(&self) -> f64 {
        2.0 * self.t_nio_us + self.t_co_us
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.t_co_us < 0.0 || self.t_nio_us < 0.0 {
            return Err("virtualization overheads must be >= 0".into());
        }
        Ok(())
    }
}

/// RTT summary of one communication system under one load condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommSystemProfile {
    pub system: CommSystem,
    pub load: LoadCondition,
    pub rtt_median_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtt_max_ms: Option<f64>,
    pub source: RttSource,
}

impl CommSystemProfile {
    pub fn rtt_ms(&self, statistic: RttStatistic) -> Result<f64, NetworkError> {
        match statistic {
            RttStatistic::Median => Ok(self.rtt_median_ms),
            RttStatistic::Max => self.rtt_max_ms.ok_or(NetworkError::MissingStatistic {
                system: self.system,
                load: self.load,
                statistic,
            }),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.rtt_median_ms > 0.0) {
            return Err(format!("{}/{}: rtt_median_ms must be > 0", self.system, self.load));
        }
        if let Some(max) = self.rtt_max_ms {
            if max < self.rtt_median_ms {
                return Err(format!("{}/{}: rtt_max_ms below median", self.system, self.load));
            }
        }
        Ok(())
    }
}

/// Wired factory budget plus the selected RTT statistic, in microseconds.
pub fn total_network_delay_us(
    wired: &FactoryNetworkSpec,
    comm: &CommSystemProfile,
    statistic: RttStatistic,
) -> Result<f64, NetworkError> {
    Ok(wired.wired_network_delay_us() + comm.rtt_ms(statistic)? * 1_000.0)
}

/// Order statistics of one RTT measurement run. All values in milliseconds;
/// lost samples are excluded from the statistics and only counted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RttStats {
    pub count: u64,
    pub median_ms: f64,
    pub max_ms: f64,
    pub min_ms: f64,
    pub p95_ms: f64,
    pub lost: u64,
}

/// Summarize delivered RTT samples (microseconds). Median of an even count
/// is the mean of the two central values; p95 is the order statistic at
/// index `ceil(0.95 * count) - 1`.
pub fn summarize_rtt(samples_us: &[f64], lost: u64) -> Result<RttStats, NetworkError> {
    let mut sorted = samples_us.to_vec();
    #[cfg(feature = "parallel")]
    sorted.par_sort_unstable_by(f64::total_cmp);
    #[cfg(not(feature = "parallel"))]
    sorted.sort_unstable_by(f64::total_cmp);
    stats_from_sorted(&sorted, lost)
}

/// Sequential form of [`summarize_rtt`]; output is identical.
pub fn summarize_rtt_seq(samples_us: &[f64], lost: u64) -> Result<RttStats, NetworkError> {
    let mut sorted = samples_us.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    stats_from_sorted(&sorted, lost)
}

fn stats_from_sorted(sorted: &[f64], lost: u64) -> Result<RttStats, NetworkError> {
    if sorted.is_empty() {
        return Err(NetworkError::NoData);
    }
    let count = sorted.len();
    let median_us = if count % 2 == 1 {
        sorted[count / 2]
    } else {
        (sorted[count / 2 - 1] + sorted[count / 2]) / 2.0
    };
    let p95_idx = ((0.95 * count as f64).ceil() as usize).max(1) - 1;
    Ok(RttStats {
        count: count as u64,
        median_ms: median_us / 1_000.0,
        max_ms: sorted[count - 1] / 1_000.0,
        min_ms: sorted[0] / 1_000.0,
        p95_ms: sorted[p95_idx] / 1_000.0,
        lost,
    })
}
