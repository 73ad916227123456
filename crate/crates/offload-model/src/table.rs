//! Break-even grid over every (communication system, payload class) row and
//! every (interface variant, controller) column, and its CSV renderings.

use crate::breakeven::{BreakEvenInputs, BreakEvenResult};
use crate::catalog::{Interface, InterfaceKey, PayloadClass, ProtocolVariant, UpdateTimeCatalog};
use crate::device::DeviceProfile;
use crate::network::{
    total_network_delay_us, CommSystem, CommSystemProfile, FactoryNetworkSpec, LoadCondition,
    RttStatistic, VirtualizationOverheadSpec,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One column of the grid: a protocol variant on a specific controller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnKey {
    pub interface: Interface,
    pub variant: ProtocolVariant,
    pub device_id: String,
}

impl ColumnKey {
    pub fn label(&self) -> String {
        format!("{}_{}_{}", self.interface, self.variant, self.device_id)
    }
}

/// Cell outcome; errors are recorded in place instead of failing the run.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Computed(BreakEvenResult),
    Unavailable { reason: String },
}

impl Cell {
    pub fn result(&self) -> Option<&BreakEvenResult> {
        match self {
            Cell::Computed(r) => Some(r),
            Cell::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub system: CommSystem,
    pub load: LoadCondition,
    pub payload_class: PayloadClass,
    pub cells: Vec<Cell>,
}

impl TableRow {
    pub fn label(&self) -> String {
        format!("{}_{}_{}", self.system, self.load, self.payload_class)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakEvenTable {
    pub columns: Vec<ColumnKey>,
    pub rows: Vec<TableRow>,
}

/// Inputs for one grid run. Row blocks follow `comm_systems` order with the
/// three payload classes nested inside; columns follow protocol-variant
/// order with `controllers` order nested inside, skipping combinations the
/// catalog has no readings for.
#[derive(Debug, Clone, Copy)]
pub struct TableRequest<'a> {
    pub controllers: &'a [DeviceProfile],
    pub edge: &'a DeviceProfile,
    pub catalog: &'a UpdateTimeCatalog,
    pub comm_systems: &'a [CommSystemProfile],
    pub wired: &'a FactoryNetworkSpec,
    pub overhead: &'a VirtualizationOverheadSpec,
    pub statistic: RttStatistic,
}

pub fn generate_table(req: &TableRequest) -> BreakEvenTable {
    let (columns, plcs) = column_layout(req);
    #[cfg(feature = "parallel")]
    let rows = row_specs(req)
        .par_iter()
        .map(|&(comm, class)| compute_row(req, &columns, &plcs, comm, class))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let rows = row_specs(req)
        .iter()
        .map(|&(comm, class)| compute_row(req, &columns, &plcs, comm, class))
        .collect();
    BreakEvenTable { columns, rows }
}

/// Sequential form of [`generate_table`]; output is identical.
pub fn generate_table_seq(req: &TableRequest) -> BreakEvenTable {
    let (columns, plcs) = column_layout(req);
    let rows = row_specs(req)
        .iter()
        .map(|&(comm, class)| compute_row(req, &columns, &plcs, comm, class))
        .collect();
    BreakEvenTable { columns, rows }
}

fn column_layout<'a>(req: &TableRequest<'a>) -> (Vec<ColumnKey>, Vec<&'a DeviceProfile>) {
    let mut columns = Vec::new();
    let mut plcs = Vec::new();
    for &variant in ProtocolVariant::ALL {
        for plc in req.controllers {
            if req.catalog.supports_variant(&plc.id, variant) {
                columns.push(ColumnKey {
                    interface: variant.interface(),
                    variant,
                    device_id: plc.id.clone(),
                });
                plcs.push(plc);
            }
        }
    }
    (columns, plcs)
}

fn row_specs<'a>(req: &TableRequest<'a>) -> Vec<(&'a CommSystemProfile, PayloadClass)> {
    req.comm_systems
        .iter()
        .flat_map(|comm| PayloadClass::ALL.iter().map(move |&class| (comm, class)))
        .collect()
}

fn compute_row(
    req: &TableRequest,
    columns: &[ColumnKey],
    plcs: &[&DeviceProfile],
    comm: &CommSystemProfile,
    class: PayloadClass,
) -> TableRow {
    let cells = columns
        .iter()
        .zip(plcs)
        .map(|(col, plc)| compute_cell(req, col, plc, comm, class))
        .collect();
    TableRow {
        system: comm.system,
        load: comm.load,
        payload_class: class,
        cells,
    }
}

fn compute_cell(
    req: &TableRequest,
    col: &ColumnKey,
    plc: &DeviceProfile,
    comm: &CommSystemProfile,
    class: PayloadClass,
) -> Cell {
    let key = InterfaceKey::new(col.device_id.clone(), col.interface, col.variant, class);
    let entry = match req.catalog.lookup_update_time(&key) {
        Ok(entry) => entry,
        Err(e) => return Cell::Unavailable { reason: e.to_string() },
    };
    let t_network_us = match total_network_delay_us(req.wired, comm, req.statistic) {
        Ok(v) => v,
        Err(e) => return Cell::Unavailable { reason: e.to_string() },
    };
    let inputs = BreakEvenInputs {
        t_update_us: entry.t_update_us(),
        t_network_us,
        t_overhead_us: req.overhead.total_us(),
        c_plc_us_per_n: plc.c_us_per_n,
        c_edge_us_per_n: req.edge.c_us_per_n,
    };
    match inputs.break_even() {
        Ok(r) => Cell::Computed(r),
        Err(e) => Cell::Unavailable { reason: e.to_string() },
    }
}

impl BreakEvenTable {
    /// Number of cells that hold a computed break-even point.
    pub fn computed_cell_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.cells.iter().filter(|c| c.result().is_some()).count())
            .sum()
    }

    fn header(&self) -> String {
        let mut line = String::from("comm_system,load,payload_class");
        for col in &self.columns {
            line.push(',');
            line.push_str(&col.label());
        }
        line
    }

    /// Rounded integer grid; unavailable cells are left empty.
    pub fn to_rounded_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{},{},{}", row.system, row.load, row.payload_class));
            for cell in &row.cells {
                out.push(',');
                if let Some(r) = cell.result() {
                    out.push_str(&r.n_be.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// Unrounded grid at fixed six fractional digits.
    pub fn to_exact_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{},{},{}", row.system, row.load, row.payload_class));
            for cell in &row.cells {
                out.push(',');
                if let Some(r) = cell.result() {
                    out.push_str(&format!("{:.6}", r.n_be_exact));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Long form, one line per computed cell.
    pub fn to_heatmap_csv(&self) -> String {
        let mut out = String::from("row_label,col_label,n_be\n");
        for row in &self.rows {
            for (col, cell) in self.columns.iter().zip(&row.cells) {
                if let Some(r) = cell.result() {
                    out.push_str(&format!("{},{},{}\n", row.label(), col.label(), r.n_be));
                }
            }
        }
        out
    }
}
