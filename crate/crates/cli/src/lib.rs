//! Batch driver for the shifted-l expansion: single points, reproduction of
//! the reference comparison tables, convergence data and reference runs.

pub mod commands;
pub mod config;
pub mod golden;
pub mod report;
