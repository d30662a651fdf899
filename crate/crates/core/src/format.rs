//! Text output shared by the CLI and downstream consumers.
//!
//! The sweep CSV layout is frozen: the plotting script reads it by header.

use std::io::{self, Write};

use crate::analysis::SweepRow;

pub const SWEEP_CSV_HEADER: &str = "two_j,lambda,gamma,k_lgi,lgi_violation,k_wlgi,k_nsit";

/// Formats `x` like C's `%.17g`: 17 significant digits, positional notation
/// for decimal exponents in `[-5, 17)`, trailing zeros removed.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn sweep_csv_line(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.two_j,
        g17(row.lambda),
        g17(row.gamma),
        g17(row.k_lgi),
        g17(row.lgi_violation),
        g17(row.k_wlgi),
        g17(row.k_nsit)
    )
}

/// Header plus one line per row, `\n` terminated.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", sweep_csv_line(row))?;
    }
    Ok(())
}
