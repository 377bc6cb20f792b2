//! The four run modes. Each point is evaluated independently (in parallel
//! when `jobs > 1`) and the report is assembled in the configured order.

use pslet_core::numerov::{oracle_eigenvalue, OracleResult};
use pslet_core::pade::energy_pade;
use pslet_core::{compute_expansion, energy_partial_sum, residual_norm, with_digits, PotentialModel, StateSpec};
use rayon::prelude::*;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::golden::{self, Quantity};
use crate::report::{Cell, Report};

pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    Computation = 2,
    Mismatch = 3,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit: Exit,
    /// Human-readable digest for stderr.
    pub summary: Option<String>,
}

/// Everything derived from one expansion.
#[derive(Clone, Debug)]
pub struct ExpansionSummary {
    pub r0: f64,
    pub omega: f64,
    pub beta: f64,
    pub lbar: f64,
    pub e_leading: f64,
    pub e_pslet: f64,
    pub e_pade: Result<f64, String>,
    pub residual: f64,
    /// `E^(-2), E^(-1), E^(0), ..., E^(order)`.
    pub coefficients: Vec<f64>,
    /// Partial sums through `k = -2, 0, 1, ..., order`; the `k = -1` sum
    /// equals the `k = -2` one and is omitted.
    pub partial_sums: Vec<(i32, f64)>,
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub potential: PotentialModel,
    pub state: StateSpec,
    pub expansion: Option<Result<ExpansionSummary, String>>,
    pub oracle: Option<Result<OracleResult, String>>,
}

pub fn summarize(p: &PotentialModel, s: StateSpec, order: usize, pade: (usize, usize)) -> Result<ExpansionSummary, String> {
    let e = compute_expansion(p, s, order).map_err(|e| e.to_string())?;
    let sol = &e.solution;
    let mut coefficients = vec![sol.e_minus2.to_f64(), e.e_minus1.to_f64()];
    coefficients.extend(e.energies.iter().map(|c| c.to_f64()));
    let partial = |k: i32| energy_partial_sum(&e, k).map(|v| v.to_f64()).map_err(|e| e.to_string());
    let mut partial_sums = vec![(-2, partial(-2)?)];
    for k in 0..=order as i32 {
        partial_sums.push((k, partial(k)?));
    }
    Ok(ExpansionSummary {
        r0: sol.r0.to_f64(),
        omega: sol.omega.to_f64(),
        beta: sol.beta.to_f64(),
        lbar: sol.lbar.to_f64(),
        e_leading: sol.leading_energy().to_f64(),
        e_pslet: partial(order as i32)?,
        e_pade: energy_pade(&e, pade.0, pade.1).map(|v| v.to_f64()).map_err(|e| e.to_string()),
        residual: residual_norm(&e, p).map_err(|e| e.to_string())?.to_f64(),
        coefficients,
        partial_sums,
    })
}

fn evaluate_points(
    cfg: &RunConfig,
    points: Vec<(PotentialModel, StateSpec)>,
    jobs: usize,
    expansion: bool,
    oracle: bool,
) -> Vec<PointResult> {
    let work = |(p, s): &(PotentialModel, StateSpec)| PointResult {
        potential: p.clone(),
        state: *s,
        expansion: expansion.then(|| with_digits(cfg.precision, || summarize(p, *s, cfg.order, cfg.pade))),
        oracle: oracle.then(|| oracle_eigenvalue(p, *s, ORACLE_TOL).map_err(|e| e.to_string())),
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| points.par_iter().map(work).collect()),
        Err(_) => points.iter().map(work).collect(),
    }
}

fn grid(cfg: &RunConfig) -> Result<Vec<(PotentialModel, StateSpec)>, ConfigError> {
    Ok(cfg
        .models()?
        .into_iter()
        .flat_map(|m| cfg.states.iter().map(move |&s| (m.clone(), s)))
        .collect())
}

fn point_cells(p: &PotentialModel, s: StateSpec) -> Vec<Cell> {
    vec![
        Cell::Text(p.kind_name()),
        Cell::Plain(p.alpha()),
        Cell::Int(s.l.into()),
        Cell::Int(s.nr.into()),
        Cell::Text(s.to_string()),
    ]
}

pub fn run(cfg: &RunConfig, jobs: usize) -> Result<Outcome, ConfigError> {
    match cfg.mode {
        Mode::Compute => cmd_compute(cfg, jobs),
        Mode::Table => Ok(cmd_table(cfg, jobs)),
        Mode::Converge => cmd_converge(cfg, jobs),
        Mode::Oracle => cmd_oracle(cfg, jobs),
    }
}

pub const COMPUTE_COLUMNS: [&str; 15] = [
    "potential", "alpha", "l", "nr", "label", "r0", "omega", "beta", "lbar", "e_leading", "e_pslet", "e_pade",
    "e_oracle", "residual", "status",
];

pub fn cmd_compute(cfg: &RunConfig, jobs: usize) -> Result<Outcome, ConfigError> {
    let mut columns: Vec<String> = COMPUTE_COLUMNS.iter().map(|c| c.to_string()).collect();
    columns.push("e_m2".into());
    columns.push("e_m1".into());
    columns.extend((0..=cfg.order).map(|n| format!("e_{n}")));
    let mut report = Report {
        columns,
        rows: Vec::new(),
    };
    let mut exit = Exit::Success;
    for r in evaluate_points(cfg, grid(cfg)?, jobs, true, true) {
        let mut row = point_cells(&r.potential, r.state);
        let oracle = r.oracle.expect("oracle requested");
        let mut problems = Vec::new();
        match r.expansion.expect("expansion requested") {
            Ok(e) => {
                row.extend([e.r0, e.omega, e.beta, e.lbar, e.e_leading, e.e_pslet].map(Cell::Energy));
                match &e.e_pade {
                    Ok(v) => row.push(Cell::Energy(*v)),
                    Err(msg) => {
                        row.push(Cell::Null);
                        problems.push(format!("pade: {msg}"));
                    }
                }
                row.push(oracle_cell(&oracle, &mut problems));
                row.push(Cell::Small(e.residual));
                row.push(status_cell(&problems));
                row.extend(e.coefficients.iter().map(|&c| Cell::Energy(c)));
            }
            Err(msg) => {
                row.extend(std::iter::repeat_n(Cell::Null, 7));
                row.push(oracle_cell(&oracle, &mut problems));
                row.push(Cell::Null);
                problems.insert(0, msg);
                row.push(status_cell(&problems));
                row.extend(std::iter::repeat_n(Cell::Null, cfg.order + 3));
            }
        }
        if !problems.is_empty() {
            exit = Exit::Computation;
        }
        report.push(row);
    }
    Ok(Outcome {
        report,
        exit,
        summary: None,
    })
}

fn oracle_cell(oracle: &Result<OracleResult, String>, problems: &mut Vec<String>) -> Cell {
    match oracle {
        Ok(o) => Cell::Energy(o.energy),
        Err(msg) => {
            problems.push(format!("oracle: {msg}"));
            Cell::Null
        }
    }
}

fn status_cell(problems: &[String]) -> Cell {
    if problems.is_empty() {
        Cell::Text("ok".into())
    } else {
        Cell::Text(format!("error: {}", problems.join("; ")))
    }
}

/// Per-cell verdict of a table reproduction.
#[derive(Clone, Debug, PartialEq)]
pub struct CellCheck {
    pub potential: PotentialModel,
    pub state: StateSpec,
    pub quantity: Quantity,
    pub computed: Option<f64>,
    pub reference: Option<f64>,
    pub status: CellStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    Mismatch,
    /// The printed value is annotated as a typo and the computed value
    /// agrees instead with the table's own expansion column.
    KnownTypo,
    /// Quoted for comparison only; nothing is computed.
    Quoted,
    Error(String),
}

impl CellCheck {
    pub fn diff(&self) -> Option<f64> {
        Some((self.computed? - self.reference?).abs())
    }
}

pub fn check_table(cfg: &RunConfig, table: u8, jobs: usize) -> Vec<CellCheck> {
    let points = golden::table_grid(table);
    let results = evaluate_points(cfg, points, jobs, true, true);
    let mut checks = Vec::new();
    for r in &results {
        for q in [Quantity::Pslet, Quantity::Pade, Quantity::Exact, Quantity::Slnt] {
            let Some(cell) = golden::table_cells(table)
                .into_iter()
                .find(|c| c.potential == r.potential && c.state == r.state && c.quantity == q)
            else {
                continue;
            };
            let exp = r.expansion.as_ref().expect("expansion requested");
            let computed: Result<Option<f64>, String> = match q {
                Quantity::Pslet => exp.as_ref().map(|e| Some(e.e_pslet)).map_err(Clone::clone),
                Quantity::Pade => exp.as_ref().map_err(Clone::clone).and_then(|e| e.e_pade.clone().map(Some)),
                Quantity::Exact => r
                    .oracle
                    .as_ref()
                    .expect("oracle requested")
                    .as_ref()
                    .map(|o| Some(o.energy))
                    .map_err(Clone::clone),
                Quantity::Slnt => Ok(None),
            };
            let reference = cell.energy;
            let status = match (&computed, q.tolerance()) {
                (Err(msg), _) => CellStatus::Error(msg.clone()),
                (Ok(_), None) => CellStatus::Quoted,
                (Ok(v), Some(tol)) => {
                    let v = v.expect("computed value");
                    if cell.is_known_typo() {
                        let alt = golden::lookup(table, &r.potential, r.state, Quantity::Pslet);
                        match alt {
                            Some(a) if (v - a).abs() <= tol => CellStatus::KnownTypo,
                            _ => CellStatus::Mismatch,
                        }
                    } else {
                        match reference {
                            Some(pv) if (v - pv).abs() <= tol => CellStatus::Ok,
                            _ => CellStatus::Mismatch,
                        }
                    }
                }
            };
            checks.push(CellCheck {
                potential: r.potential.clone(),
                state: r.state,
                quantity: q,
                computed: computed.ok().flatten(),
                reference,
                status,
            });
        }
    }
    checks
}

pub fn cmd_table(cfg: &RunConfig, jobs: usize) -> Outcome {
    let table = cfg.table.expect("table mode carries its table");
    let checks = check_table(cfg, table, jobs);
    let mut report = Report::new(&[
        "table", "potential", "alpha", "l", "nr", "label", "quantity", "computed", "reference", "diff", "tolerance", "status",
    ]);
    let (mut mismatches, mut errors, mut typos) = (0, 0, 0);
    let mut worst = [0.0f64; 3];
    for c in &checks {
        let status = match &c.status {
            CellStatus::Ok => "ok".to_string(),
            CellStatus::Mismatch => {
                mismatches += 1;
                "mismatch".to_string()
            }
            CellStatus::KnownTypo => {
                typos += 1;
                "known-typo".to_string()
            }
            CellStatus::Quoted => "quoted".to_string(),
            CellStatus::Error(m) => {
                errors += 1;
                format!("error: {m}")
            }
        };
        if let (Some(d), Some(slot)) = (c.diff(), [Quantity::Pslet, Quantity::Pade, Quantity::Exact].iter().position(|q| *q == c.quantity)) {
            if c.status != CellStatus::KnownTypo {
                worst[slot] = worst[slot].max(d);
            }
        }
        let mut row = vec![Cell::Int(table.into())];
        row.extend(point_cells(&c.potential, c.state));
        row.extend([
            Cell::Text(c.quantity.name().into()),
            Cell::energy(c.computed),
            Cell::energy(c.reference),
            c.diff().map_or(Cell::Null, Cell::Small),
            c.quantity.tolerance().map_or(Cell::Null, Cell::Small),
            Cell::Text(status),
        ]);
        report.push(row);
    }
    let summary = format!(
        "table {table}: {} cells, {mismatches} mismatches, {errors} errors, {typos} known typos; \
         max |diff| pslet {:.2e}, pade {:.2e}, exact {:.2e}",
        checks.len(),
        worst[0],
        worst[1],
        worst[2]
    );
    let exit = if errors > 0 {
        Exit::Computation
    } else if mismatches > 0 {
        Exit::Mismatch
    } else {
        Exit::Success
    };
    Outcome {
        report,
        exit,
        summary: Some(summary),
    }
}

pub fn cmd_converge(cfg: &RunConfig, jobs: usize) -> Result<Outcome, ConfigError> {
    let mut report = Report::new(&[
        "potential", "alpha", "l", "nr", "label", "k", "e_partial", "e_pade", "e_oracle", "abs_error",
    ]);
    let mut exit = Exit::Success;
    for r in evaluate_points(cfg, grid(cfg)?, jobs, true, true) {
        let oracle = r.oracle.expect("oracle requested").ok().map(|o| o.energy);
        match r.expansion.expect("expansion requested") {
            Ok(e) => {
                let pade = e.e_pade.as_ref().ok().copied();
                if pade.is_none() || oracle.is_none() {
                    exit = Exit::Computation;
                }
                for (k, sum) in &e.partial_sums {
                    let mut row = point_cells(&r.potential, r.state);
                    row.extend([
                        Cell::Int((*k).into()),
                        Cell::Energy(*sum),
                        Cell::energy(pade),
                        Cell::energy(oracle),
                        oracle.map_or(Cell::Null, |o| Cell::Small((sum - o).abs())),
                    ]);
                    report.push(row);
                }
            }
            Err(_) => exit = Exit::Computation,
        }
    }
    Ok(Outcome {
        report,
        exit,
        summary: None,
    })
}

pub fn cmd_oracle(cfg: &RunConfig, jobs: usize) -> Result<Outcome, ConfigError> {
    let mut report = Report::new(&[
        "potential", "alpha", "l", "nr", "label", "e_oracle", "nodes_found", "richardson_error", "points", "status",
    ]);
    let mut exit = Exit::Success;
    for r in evaluate_points(cfg, grid(cfg)?, jobs, false, true) {
        let mut row = point_cells(&r.potential, r.state);
        match r.oracle.expect("oracle requested") {
            Ok(o) => {
                let converged = o.richardson_error < ORACLE_TOL;
                if !converged {
                    exit = Exit::Computation;
                }
                row.extend([
                    Cell::Energy(o.energy),
                    Cell::Int(o.nodes_found.into()),
                    Cell::Small(o.richardson_error),
                    Cell::Int(o.grid.points as i64),
                    Cell::Text(if converged { "ok" } else { "error: grid refinement did not converge" }.into()),
                ]);
            }
            Err(msg) => {
                exit = Exit::Computation;
                row.extend([Cell::Null, Cell::Null, Cell::Null, Cell::Null, Cell::Text(format!("error: {msg}"))]);
            }
        }
        report.push(row);
    }
    Ok(Outcome {
        report,
        exit,
        summary: None,
    })
}
