//! Table emission: CSV (default) and JSON renderings of the same rows.
//!
//! Contract shared by every subcommand:
//! * CSV always starts with a header line, fields are never quoted, reals are
//!   printed with 12 significant digits, rows end with `\n`.
//! * JSON output is a single top-level list of objects whose keys equal the
//!   CSV column names.
//! * Row order is deterministic, so identical invocations produce identical
//!   bytes.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A printable table row. `HEADER` lists the CSV columns; `csv_fields` must
/// return one string per column, in the same order, and the `Serialize` impl
/// must expose the same names as JSON keys.
pub trait TableRow: Serialize {
    const HEADER: &'static str;

    fn csv_fields(&self) -> Vec<String>;
}

/// Format a real number with 12 significant digits, trimming trailing zeros.
///
/// Positional notation is used for decimal exponents in [-4, 12), scientific
/// notation outside, mirroring `%g` so thresholds like 1e-9 stay readable.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_positional(format!("{x:.decimals$}"))
    } else {
        trim_scientific(format!("{x:.11e}"))
    }
}

fn trim_positional(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn trim_scientific(s: String) -> String {
    match s.split_once('e') {
        Some((mantissa, exponent)) => {
            format!("{}e{}", trim_positional(mantissa.to_string()), exponent)
        }
        None => s,
    }
}

pub fn emit<R: TableRow>(rows: &[R], format: OutputFormat, out: &mut dyn Write) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", R::HEADER)?;
            for row in rows {
                writeln!(out, "{}", row.csv_fields().join(","))?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_short_decimals_stay_short() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(0.7), "0.7");
        assert_eq!(fmt_real(-2.5), "-2.5");
        assert_eq!(fmt_real(100.0), "100");
    }

    #[test]
    fn twelve_significant_digits_are_kept() {
        assert_eq!(fmt_real(0.259_802_996_416_317_1), "0.259802996416");
        assert_eq!(fmt_real(0.31425008796909367), "0.314250087969");
        assert_eq!(fmt_real(0.645_043_180_114_141_7), "0.645043180114");
        assert_eq!(fmt_real(2.3333333333333335), "2.33333333333");
    }

    #[test]
    fn small_magnitudes_switch_to_scientific_like_percent_g() {
        // floor(log10(x)) = -4 still prints positionally, -5 does not.
        assert_eq!(fmt_real(1e-4), "0.0001");
        assert_eq!(fmt_real(8.446_679_324_583_004e-4), "0.000844667932458");
        assert_eq!(fmt_real(9.9e-5), "9.9e-5");
        assert_eq!(fmt_real(1e-9), "1e-9");
        assert_eq!(fmt_real(1.5e15), "1.5e15");
    }

    #[test]
    fn rounding_happens_at_the_twelfth_digit() {
        assert_eq!(fmt_real(0.9999999999999), "1");
        assert_eq!(fmt_real(0.12345678901251), "0.123456789013");
    }
}
