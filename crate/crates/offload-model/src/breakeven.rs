//! The analytical core: offload-time model, benefit criterion, and the
//! break-even solver.
//!
//! Offloading a workload of complexity `n` costs
//! `t_ro(n) = t_proc(n) + t_network + t_update + t_overhead` with
//! `t_proc(n) = c_edge * n`, while local processing costs `c_plc * n`.
//! Offloading pays off once `t_ro(n) < delta_t_cycle(n)`, and the two sides
//! meet at
//! `n_be = (t_network + t_update + t_overhead) / (c_plc - c_edge)`.
//! All arithmetic is carried out in microseconds (f64).

use thiserror::Error;

use crate::catalog::{CatalogError, InterfaceKey, UpdateTimeCatalog};
use crate::device::DeviceProfile;
use crate::network::{
    total_network_delay_us, CommSystemProfile, FactoryNetworkSpec, NetworkError, RttStatistic,
    VirtualizationOverheadSpec,
};

#[derive(Debug, Error, PartialEq)]
pub enum BreakEvenError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    /// Offloading never pays off on processing time.
    #[error("no break-even point: c_plc ({c_plc_us_per_n} us/n) <= c_edge ({c_edge_us_per_n} us/n)")]
    NoBreakEven {
        c_plc_us_per_n: f64,
        c_edge_us_per_n: f64,
    },
    #[error("interface key addresses {key_device}, scenario controller is {plc}")]
    DeviceMismatch { key_device: String, plc: String },
}

/// Everything one break-even question needs: the two devices, the interface
/// used to move the data, and the network the data crosses.
#[derive(Debug, Clone, PartialEq)]
pub struct OffloadScenario {
    pub plc: DeviceProfile,
    pub edge: DeviceProfile,
    pub interface_key: InterfaceKey,
    pub comm: CommSystemProfile,
    pub wired: FactoryNetworkSpec,
    pub overhead: VirtualizationOverheadSpec,
    pub rtt_statistic: RttStatistic,
}

/// Scenario reduced to the quantities the solver works with, all in
/// microseconds. This is the resolved form of an [`OffloadScenario`] but can
/// also be constructed directly, e.g. for randomized consistency checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakEvenInputs {
    pub t_update_us: f64,
    pub t_network_us: f64,
    pub t_overhead_us: f64,
    pub c_plc_us_per_n: f64,
    pub c_edge_us_per_n: f64,
}

/// Solved break-even point with the ledger of inputs it was computed from,
/// so the value can be recomputed from the result alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakEvenResult {
    /// `n_be_exact` rounded half-up to an integer workload.
    pub n_be: u64,
    pub n_be_exact: f64,
    pub t_network_us: f64,
    pub t_update_us: f64,
    pub t_overhead_us: f64,
    pub c_plc_us_per_n: f64,
    pub c_edge_us_per_n: f64,
    /// `c_plc - c_edge`.
    pub denominator_us_per_n: f64,
}

impl BreakEvenInputs {
    /// Fixed costs paid once per offloaded exchange, independent of `n`.
    pub fn fixed_costs_us(&self) -> f64 {
        self.t_network_us + self.t_update_us + self.t_overhead_us
    }

    /// Offload time at (possibly fractional) workload `n`.
    pub fn offload_time_us(&self, n: f64) -> f64 {
        self.c_edge_us_per_n * n + self.fixed_costs_us()
    }

    /// Local cycle-time increment at (possibly fractional) workload `n`.
    pub fn local_time_us(&self, n: f64) -> f64 {
        self.c_plc_us_per_n * n
    }

    /// Strict benefit criterion at integer workload `n`.
    pub fn is_beneficial(&self, n: u64) -> bool {
        self.offload_time_us(n as f64) < self.local_time_us(n as f64)
    }

    pub fn break_even(&self) -> Result<BreakEvenResult, BreakEvenError> {
        let denominator = self.c_plc_us_per_n - self.c_edge_us_per_n;
        if denominator <= 0.0 {
            return Err(BreakEvenError::NoBreakEven {
                c_plc_us_per_n: self.c_plc_us_per_n,
                c_edge_us_per_n: self.c_edge_us_per_n,
            });
        }
        let n_be_exact = self.fixed_costs_us() / denominator;
        Ok(BreakEvenResult {
            n_be: n_be_exact.round() as u64,
            n_be_exact,
            t_network_us: self.t_network_us,
            t_update_us: self.t_update_us,
            t_overhead_us: self.t_overhead_us,
            c_plc_us_per_n: self.c_plc_us_per_n,
            c_edge_us_per_n: self.c_edge_us_per_n,
            denominator_us_per_n: denominator,
        })
    }
}

impl OffloadScenario {
    /// Resolve the interface key against the catalog and collapse the
    /// network legs into solver inputs.
    pub fn resolve(&self, catalog: &UpdateTimeCatalog) -> Result<BreakEvenInputs, BreakEvenError> {
        if self.interface_key.device_id != self.plc.id {
            return Err(BreakEvenError::DeviceMismatch {
                key_device: self.interface_key.device_id.clone(),
                plc: self.plc.id.clone(),
            });
        }
        let entry = catalog.lookup_update_time(&self.interface_key)?;
        let t_network_us = total_network_delay_us(&self.wired, &self.comm, self.rtt_statistic)?;
        Ok(BreakEvenInputs {
            t_update_us: entry.t_update_us(),
            t_network_us,
            t_overhead_us: self.overhead.total_us(),
            c_plc_us_per_n: self.plc.c_us_per_n,
            c_edge_us_per_n: self.edge.c_us_per_n,
        })
    }

    /// Total offload time at workload `n`, in microseconds.
    pub fn offload_time_us(
        &self,
        catalog: &UpdateTimeCatalog,
        n: u64,
    ) -> Result<f64, BreakEvenError> {
        Ok(self.resolve(catalog)?.offload_time_us(n as f64))
    }

    /// True iff offloading workload `n` beats local processing, strictly.
    pub fn is_beneficial(&self, catalog: &UpdateTimeCatalog, n: u64) -> Result<bool, BreakEvenError> {
        Ok(self.resolve(catalog)?.is_beneficial(n))
    }

    pub fn break_even(&self, catalog: &UpdateTimeCatalog) -> Result<BreakEvenResult, BreakEvenError> {
        self.resolve(catalog)?.break_even()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{PayloadClass, ProtocolVariant};
    use crate::data::DataSet;
    use crate::network::{CommSystem, LoadCondition};
    use proptest::prelude::*;

    fn scenario(
        data: &DataSet,
        plc: &str,
        variant: ProtocolVariant,
        class: u32,
        system: CommSystem,
        load: LoadCondition,
    ) -> OffloadScenario {
        OffloadScenario {
            plc: data.device(plc).unwrap().clone(),
            edge: data.device("mini-pc").unwrap().clone(),
            interface_key: InterfaceKey::new(
                plc,
                variant.interface(),
                variant,
                PayloadClass::try_from(class).unwrap(),
            ),
            comm: data.comm_profile(system, load).unwrap().clone(),
            wired: data.factory,
            overhead: data.overhead,
            rtt_statistic: RttStatistic::Median,
        }
    }

    #[test]
    fn offload_time_ledger_arithmetic() {
        let data = DataSet::shipped();
        let s = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::Ethernet,
            LoadCondition::WithoutLoad,
        );
        // 80 + 490 + 1000 + 4
        let t0 = s.offload_time_us(&data.catalog, 0).unwrap();
        assert!((t0 - 1_574.0).abs() < 1e-9);
        let t78 = s.offload_time_us(&data.catalog, 78).unwrap();
        assert!((t78 - (1_574.0 + 78.0 * 0.034_9)).abs() < 1e-9);
    }

    #[test]
    fn missing_statistic_propagates() {
        let data = DataSet::shipped();
        let mut s = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::Cellular5g,
            LoadCondition::Unspecified,
        );
        s.rtt_statistic = RttStatistic::Max;
        assert!(matches!(
            s.offload_time_us(&data.catalog, 0),
            Err(BreakEvenError::Network(NetworkError::MissingStatistic { .. }))
        ));
    }

    #[test]
    fn benefit_flips_around_break_even() {
        let data = DataSet::shipped();
        let s = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::Ethernet,
            LoadCondition::WithoutLoad,
        );
        assert!(!s.is_beneficial(&data.catalog, 77).unwrap());
        assert!(s.is_beneficial(&data.catalog, 79).unwrap());
        assert!(!s.is_beneficial(&data.catalog, 0).unwrap());
    }

    #[test]
    fn break_even_reproduces_reported_points() {
        let data = DataSet::shipped();

        let r = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::Ethernet,
            LoadCondition::WithoutLoad,
        )
        .break_even(&data.catalog)
        .unwrap();
        assert_eq!(r.n_be, 78);
        assert!((r.n_be_exact - 78.055_650_604_261_83).abs() < 1e-9);

        let r = scenario(
            &data,
            "S7-1512",
            ProtocolVariant::Uadp,
            1,
            CommSystem::Cellular5g,
            LoadCondition::Unspecified,
        )
        .break_even(&data.catalog)
        .unwrap();
        assert_eq!(r.n_be, 85);
        assert!((r.n_be_exact - 85.122_486_980_702_09).abs() < 1e-9);

        let r = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::WiFi,
            LoadCondition::WithLoad,
        )
        .break_even(&data.catalog)
        .unwrap();
        assert_eq!(r.n_be, 5_241);
    }

    #[test]
    fn equal_constants_have_no_break_even() {
        let data = DataSet::shipped();
        let mut s = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::Ethernet,
            LoadCondition::WithoutLoad,
        );
        s.edge.c_us_per_n = s.plc.c_us_per_n;
        assert!(matches!(
            s.break_even(&data.catalog),
            Err(BreakEvenError::NoBreakEven { .. })
        ));
    }

    #[test]
    fn mismatched_key_device_is_rejected() {
        let data = DataSet::shipped();
        let mut s = scenario(
            &data,
            "S7-314",
            ProtocolVariant::Udp,
            1,
            CommSystem::Ethernet,
            LoadCondition::WithoutLoad,
        );
        s.interface_key.device_id = "S7-1512".into();
        assert!(matches!(
            s.break_even(&data.catalog),
            Err(BreakEvenError::DeviceMismatch { .. })
        ));
    }

    #[test]
    fn ledger_recomputes_exact_point() {
        let data = DataSet::shipped();
        let r = scenario(
            &data,
            "S7-1512",
            ProtocolVariant::UatcpRead,
            100,
            CommSystem::Cellular4g,
            LoadCondition::WithLoad,
        )
        .break_even(&data.catalog)
        .unwrap();
        let recomputed =
            (r.t_network_us + r.t_update_us + r.t_overhead_us) / r.denominator_us_per_n;
        assert_eq!(recomputed, r.n_be_exact);
        assert_eq!(r.n_be, r.n_be_exact.round() as u64);
    }

    fn inputs_strategy() -> impl Strategy<Value = BreakEvenInputs> {
        (
            1.0f64..1e6,     // t_update_us
            1.0f64..1e7,     // t_network_us
            0.0f64..1e3,     // t_overhead_us
            1.0f64..1e3,     // c_plc
            0.0001f64..0.9,  // edge fraction of plc
        )
            .prop_map(|(tu, tn, to, c_plc, frac)| BreakEvenInputs {
                t_update_us: tu,
                t_network_us: tn,
                t_overhead_us: to,
                c_plc_us_per_n: c_plc,
                c_edge_us_per_n: c_plc * frac,
            })
    }

    proptest! {
        #[test]
        fn benefit_flips_across_exact_point(inputs in inputs_strategy()) {
            let r = inputs.break_even().unwrap();
            prop_assume!((r.n_be_exact - r.n_be_exact.round()).abs() > 1e-9);
            prop_assert!(!inputs.is_beneficial(r.n_be_exact.floor() as u64));
            prop_assert!(inputs.is_beneficial(r.n_be_exact.ceil() as u64 + 1));
        }

        #[test]
        fn crossing_identity_holds_at_exact_point(inputs in inputs_strategy()) {
            let r = inputs.break_even().unwrap();
            let gap = inputs.offload_time_us(r.n_be_exact) - inputs.local_time_us(r.n_be_exact);
            prop_assert!(gap.abs() < 1e-6, "gap = {gap}");
        }

        #[test]
        fn exact_point_monotone_in_costs(inputs in inputs_strategy(), bump in 1.01f64..4.0) {
            let base = inputs.break_even().unwrap().n_be_exact;

            let mut more_update = inputs;
            more_update.t_update_us *= bump;
            prop_assert!(more_update.break_even().unwrap().n_be_exact > base);

            let mut more_network = inputs;
            more_network.t_network_us *= bump;
            prop_assert!(more_network.break_even().unwrap().n_be_exact > base);

            // widening the processing-speed gap lowers the break-even point
            let mut wider_gap = inputs;
            wider_gap.c_plc_us_per_n *= bump;
            prop_assert!(wider_gap.break_even().unwrap().n_be_exact < base);
        }

        #[test]
        fn exact_point_is_scale_invariant(inputs in inputs_strategy(), k in 0.001f64..1e3) {
            let base = inputs.break_even().unwrap().n_be_exact;
            let scaled = BreakEvenInputs {
                t_update_us: inputs.t_update_us * k,
                t_network_us: inputs.t_network_us * k,
                t_overhead_us: inputs.t_overhead_us * k,
                c_plc_us_per_n: inputs.c_plc_us_per_n * k,
                c_edge_us_per_n: inputs.c_edge_us_per_n * k,
            }
            .break_even()
            .unwrap()
            .n_be_exact;
            prop_assert!((scaled - base).abs() <= 1e-12 * base.abs());
        }
    }
}
