//! Reference energies for the three comparison tables.

use pslet_core::{PotentialModel, StateSpec};
use serde::Deserialize;

const DATA: &str = include_str!("../data/reference_tables.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// Raw partial sum through eighth order.
    Pslet,
    /// [4,4] Pade approximant.
    Pade,
    /// Direct numerical integration.
    Exact,
    /// An earlier expansion, quoted for comparison only.
    Slnt,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Pslet => "pslet",
            Quantity::Pade => "pade",
            Quantity::Exact => "exact",
            Quantity::Slnt => "slnt",
        }
    }

    /// Absolute tolerance for a reproduced cell, absorbing the last printed
    /// digit.
    pub fn tolerance(self) -> Option<f64> {
        match self {
            Quantity::Pslet | Quantity::Pade => Some(1e-9),
            Quantity::Exact => Some(5e-8),
            Quantity::Slnt => None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
struct Record {
    table: u8,
    potential: String,
    alpha: f64,
    state: String,
    quantity: Quantity,
    value: Option<f64>,
    provenance: String,
    note: String,
}

#[derive(Clone, Debug)]
pub struct GoldenCell {
    pub table: u8,
    pub potential: PotentialModel,
    pub state: StateSpec,
    pub quantity: Quantity,
    /// The energy itself (the file stores the printed magnitude).
    pub energy: Option<f64>,
    pub provenance: String,
    pub note: String,
}

impl GoldenCell {
    pub fn alpha(&self) -> f64 {
        self.potential.alpha()
    }

    /// Cells whose printed value is believed wrong.
    pub fn is_known_typo(&self) -> bool {
        !self.note.is_empty() && self.energy.is_some()
    }
}

pub fn cells() -> Vec<GoldenCell> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(DATA.as_bytes());
    rdr.deserialize::<Record>()
        .map(|r| {
            let r = r.expect("embedded golden data is well formed");
            let spec = format!("{}:{}", r.potential, r.alpha);
            GoldenCell {
                table: r.table,
                potential: spec.parse().expect("golden potential"),
                state: r.state.parse().expect("golden state"),
                quantity: r.quantity,
                energy: r.value.map(|v| -v),
                provenance: r.provenance,
                note: r.note,
            }
        })
        .collect()
}

pub fn table_cells(table: u8) -> Vec<GoldenCell> {
    cells().into_iter().filter(|c| c.table == table).collect()
}

/// The distinct `(alpha, state)` points of a table, alpha ascending.
pub fn table_grid(table: u8) -> Vec<(PotentialModel, StateSpec)> {
    let mut grid: Vec<(PotentialModel, StateSpec)> = Vec::new();
    for c in table_cells(table) {
        if !grid.iter().any(|(p, s)| *p == c.potential && *s == c.state) {
            grid.push((c.potential, c.state));
        }
    }
    grid.sort_by(|a, b| a.0.alpha().total_cmp(&b.0.alpha()).then(a.1.cmp(&b.1)));
    grid
}

/// Reference energy of one cell, if printed.
pub fn lookup(table: u8, p: &PotentialModel, s: StateSpec, q: Quantity) -> Option<f64> {
    table_cells(table)
        .into_iter()
        .find(|c| c.potential == *p && c.state == s && c.quantity == q)
        .and_then(|c| c.energy)
}
