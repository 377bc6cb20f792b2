//! Column-oriented reports rendered as CSV, JSON or a markdown table.

use std::io::{self, Write};

use serde_json::{Map, Number, Value};

use crate::config::{Format, RunConfig};

pub const ENERGY_DIGITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// Rendered with [`ENERGY_DIGITS`] significant digits.
    Energy(f64),
    /// Rendered in scientific notation with 3 significant digits.
    Small(f64),
    /// Shortest round-trip decimal, for inputs such as alpha.
    Plain(f64),
    Int(i64),
    Text(String),
    Null,
}

impl Cell {
    pub fn energy(x: Option<f64>) -> Cell {
        x.map_or(Cell::Null, Cell::Energy)
    }

    fn render(&self) -> String {
        match self {
            Cell::Energy(x) => significant(*x, ENERGY_DIGITS),
            Cell::Small(x) => {
                if x.is_finite() {
                    format!("{x:.2e}")
                } else {
                    x.to_string()
                }
            }
            Cell::Plain(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Energy(_) | Cell::Small(_) => self
                .render()
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Plain(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

/// Plain decimal with `digits` significant digits; scientific notation
/// outside `[1e-5, 1e10)`.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..10).contains(&mag) {
        // rounding can carry into the next decade, so format then re-check
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let carried = s.parse::<f64>().map(|v| v.abs().log10().floor() as i32 > mag).unwrap_or(false);
        if carried && decimals > 0 {
            format!("{x:.prec$}", prec = decimals - 1)
        } else {
            s
        }
    } else {
        format!("{x:.prec$e}", prec = digits - 1)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, cfg: &RunConfig, out: &mut dyn Write) -> io::Result<()> {
        match cfg.format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(cfg, out),
            Format::Md => self.write_markdown(out),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    pub fn to_json(&self, cfg: &RunConfig) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "meta": {
                "version": env!("CARGO_PKG_VERSION"),
                "config": cfg,
            },
            "rows": Value::Array(rows),
        })
    }

    pub fn write_json(&self, cfg: &RunConfig, out: &mut dyn Write) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json(cfg))?;
        writeln!(out)
    }

    pub fn write_markdown(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "| {} |", self.columns.join(" | "))?;
        writeln!(out, "|{}", "---|".repeat(self.columns.len()))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.render().replace('|', "\\|")).collect();
            writeln!(out, "| {} |", cells.join(" | "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(significant(-0.180406651205, 10), "-0.1804066512");
        assert_eq!(significant(4.5, 10), "4.500000000");
        assert_eq!(significant(-0.0036531760004, 10), "-0.003653176000");
        assert_eq!(significant(0.99999999999, 10), "1.000000000");
        assert_eq!(significant(1.5e-7, 3), "1.50e-7");
        assert_eq!(significant(0.0, 10), "0");
    }

    #[test]
    fn markdown_escapes_pipes() {
        let mut r = Report::new(&["a", "b"]);
        r.push(vec![Cell::Text("x|y".into()), Cell::Null]);
        let mut buf = Vec::new();
        r.write_markdown(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "| a | b |\n|---|---|\n| x\\|y |  |\n");
    }
}
