//! CSV and JSON renderings of experiment output.

use std::fmt::Write as _;

use serde::Serialize;

use crate::gini::LorenzCurve;
use crate::montecarlo::{ExperimentResult, ResultRow};

pub const EXPERIMENT_CSV_HEADER: &str = "model,m,n,R,metric,mean,stderr,seed";
pub const LORENZ_CSV_HEADER: &str = "population_share,wealth_share";

/// Experiment rows as CSV. Floats use Rust's shortest round-trip formatting.
pub fn experiment_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str(EXPERIMENT_CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let ResultRow {
            model,
            m,
            n,
            replications,
            metric,
            mean,
            stderr,
        } = row;
        writeln!(
            out,
            "{model},{m},{n},{replications},{metric},{mean},{stderr},{}",
            result.base_seed
        )
        .expect("writing to a String");
    }
    out
}

pub fn lorenz_csv(curve: &LorenzCurve) -> String {
    let mut out = String::new();
    out.push_str(LORENZ_CSV_HEADER);
    out.push('\n');
    for (p, w) in &curve.points {
        writeln!(out, "{p},{w}").expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct ResultDocument<'a> {
    software: &'static str,
    version: &'static str,
    base_seed: u64,
    rows: &'a [ResultRow],
    notes: &'a [&'a str],
}

/// Experiment rows plus provenance as pretty JSON.
pub fn experiment_json(result: &ExperimentResult, notes: &[&str]) -> String {
    serde_json::to_string_pretty(&ResultDocument {
        software: env!("CARGO_PKG_NAME"),
        version: result.version,
        base_seed: result.base_seed,
        rows: &result.rows,
        notes,
    })
    .expect("result document serializes")
}
