//! Subcommand execution. Each command returns its rendered output; writing
//! it out and choosing the exit status is left to the caller.

use serde_json::json;
use spinmr::analysis::{
    find_threshold_with, reproduce_table1, reproduce_table2, reproduce_table3, reproduce_table3_exact_gamma,
    sweep_gamma, Condition, MagnitudeCell, SweepRow, ThresholdCell, DEFAULT_TOL,
};
use spinmr::closed_form::{anchor_points, cross_validate, oracle_grid, GRID_SEED};
use spinmr::format::g17;
use spinmr::{MeasurementParams, Simulator, SpinSystem};

use crate::config::{CommandKind, Format, RunConfig, TableSelection};
use crate::error::{CliError, ErrorKind};
use crate::render;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub body: String,
    /// One-line diagnostics for stderr, such as out-of-tolerance cells.
    pub warnings: Vec<String>,
    /// Set when the report was produced but the run must still fail.
    pub failure: Option<CliError>,
}

impl RunOutput {
    fn ok(body: String) -> Self {
        Self { body, warnings: Vec::new(), failure: None }
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    match cfg.command {
        CommandKind::Evaluate => cmd_evaluate(cfg),
        CommandKind::Threshold => cmd_threshold(cfg),
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Reproduce => cmd_reproduce(cfg),
        CommandKind::ValidateFormulas => cmd_validate_formulas(cfg),
    }
}

fn spin(cfg: &RunConfig) -> SpinSystem {
    SpinSystem::new(cfg.two_j.expect("spin-dependent command carries two_j"))
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sys = spin(cfg);
    let params = MeasurementParams::new(cfg.lambda.unwrap_or(0.0), cfg.gamma.unwrap_or(0.0));
    let scores = Simulator::new(sys).evaluate(params)?;
    let row = SweepRow::new(sys, params, &scores);
    Ok(RunOutput::ok(match cfg.format {
        Format::Text => render::evaluate_text(&row),
        Format::Csv => render::sweep_csv(&[row]),
        Format::Json => render::to_json(&row),
    }))
}

pub fn cmd_threshold(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sim = Simulator::new(spin(cfg));
    let gamma = cfg.gamma.unwrap_or(0.0);
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let conditions = match cfg.condition {
        Some(c) => vec![c],
        None => Condition::ALL.to_vec(),
    };
    let results = conditions
        .into_iter()
        .map(|c| find_threshold_with(&sim, gamma, c, tol))
        .collect::<spinmr::Result<Vec<_>>>()?;
    Ok(RunOutput::ok(match cfg.format {
        Format::Text => render::threshold_text(&results),
        Format::Csv => render::threshold_csv(&results),
        Format::Json => render::to_json(&results),
    }))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let grid = cfg.gamma_grid.as_ref().map(|g| g.values()).unwrap_or_default();
    let rows = sweep_gamma(spin(cfg), cfg.lambda.unwrap_or(0.0), &grid)?;
    Ok(RunOutput::ok(match cfg.format {
        Format::Text => render::sweep_text(&rows),
        Format::Csv => render::sweep_csv(&rows),
        Format::Json => render::to_json(&rows),
    }))
}

fn threshold_warning(c: &ThresholdCell) -> String {
    let computed = c.computed.map(g17).unwrap_or_else(|| "none".into());
    format!(
        "warning[out-of-tolerance]: table {} two_j={} gamma={} {}: computed {} (persists_to_zero={}) vs reference {}",
        c.table,
        c.two_j,
        g17(c.gamma),
        c.condition,
        computed,
        c.persists_to_zero,
        g17(c.reference)
    )
}

fn magnitude_warning(label: &str, c: &MagnitudeCell) -> String {
    format!(
        "warning[out-of-tolerance]: table {} two_j={} lambda={} gamma={} {}: computed {} vs reference {} (deviation {})",
        label,
        c.two_j,
        g17(c.lambda),
        g17(c.gamma),
        c.condition,
        g17(c.computed),
        g17(c.reference),
        g17(c.deviation)
    )
}

pub fn cmd_reproduce(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sel = cfg.table.unwrap_or(TableSelection::All);
    let want = |t: TableSelection| sel == t || sel == TableSelection::All;

    let mut thresholds = Vec::new();
    if want(TableSelection::One) {
        thresholds.extend(reproduce_table1()?);
    }
    if want(TableSelection::Two) {
        thresholds.extend(reproduce_table2()?);
    }
    let table3 = if want(TableSelection::Three) { reproduce_table3()? } else { Vec::new() };
    let exact = if want(TableSelection::Three) && cfg.exact_gamma {
        reproduce_table3_exact_gamma()?
    } else {
        Vec::new()
    };
    let mut magnitudes: Vec<(&str, &[MagnitudeCell])> = Vec::new();
    if !table3.is_empty() {
        magnitudes.push(("3", &table3));
    }
    if !exact.is_empty() {
        magnitudes.push(("3-exact-gamma", &exact));
    }

    // The exact-γ variant is informational and never warns.
    let mut warnings: Vec<String> =
        thresholds.iter().filter(|c| !c.within_tol).map(threshold_warning).collect();
    warnings.extend(table3.iter().filter(|c| !c.within_tol).map(|c| magnitude_warning("3", c)));

    let body = match cfg.format {
        Format::Text => render::reproduce_text(&thresholds, &magnitudes),
        Format::Csv => render::reproduce_csv(&thresholds, &magnitudes),
        Format::Json => {
            let mut obj = serde_json::Map::new();
            let t1: Vec<_> = thresholds.iter().filter(|c| c.table == 1).collect();
            let t2: Vec<_> = thresholds.iter().filter(|c| c.table == 2).collect();
            if want(TableSelection::One) {
                obj.insert("table1".into(), json!(t1));
            }
            if want(TableSelection::Two) {
                obj.insert("table2".into(), json!(t2));
            }
            if want(TableSelection::Three) {
                obj.insert("table3".into(), json!(table3));
            }
            if !exact.is_empty() {
                obj.insert("table3_exact_gamma".into(), json!(exact));
            }
            render::to_json(&obj)
        }
    };
    Ok(RunOutput { body, warnings, failure: None })
}

pub fn cmd_validate_formulas(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let grid = oracle_grid(cfg.per_spin.unwrap_or(20), cfg.seed.unwrap_or(GRID_SEED));
    let cv = cross_validate(&grid, &anchor_points())?;
    let body = match cfg.format {
        Format::Text => render::formulas_text(&cv),
        Format::Csv => render::formulas_csv(&cv),
        Format::Json => render::to_json(&cv),
    };
    let mismatches = cv.rows.iter().filter(|r| r.verdict != spinmr::closed_form::Verdict::Match).count();
    let failure = (cfg.strict && mismatches > 0).then(|| {
        let detail: Vec<String> =
            cv.diagnoses.iter().map(|d| format!("{}: {}", d.formula, d.describe())).collect();
        CliError::new(
            ErrorKind::FormulaMismatch,
            format!("{mismatches} of {} points mismatch ({})", cv.rows.len(), detail.join("; ")),
        )
    });
    Ok(RunOutput { body, warnings: Vec::new(), failure })
}
