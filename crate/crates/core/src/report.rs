//! Emission of measurement reports as CSV and JSON.
//!
//! CSV is RFC-4180 style with a header row; every frequency row carries its
//! numerator and denominator, never only the ratio, and reals are printed
//! with 12 significant digits. Identical inputs produce byte-identical
//! output.

use crate::estimators::{CorrelationReport, DensityReport, LocalAverageReport};
use crate::{Error, Result};
use serde::Serialize;
use std::io::Write;

/// 12-significant-digit rendering used for every real in CSV output.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x:.11e}")
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub const DENSITY_HEADER: &str = "label,lo,hi,stride,numerator,denominator,frequency,context";

pub fn density_row(r: &DensityReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        quote(&r.label),
        r.lo,
        r.hi,
        r.stride,
        r.numerator,
        r.denominator,
        fmt_real(r.frequency),
        quote(&r.context)
    )
}

/// Write density rows as a CSV document with one header row. `timestamp`
/// adds a leading comment line and is the only non-reproducible output.
pub fn write_density_csv<W: Write>(
    mut w: W,
    rows: &[DensityReport],
    timestamp: Option<&str>,
) -> Result<()> {
    let io = |e: std::io::Error| Error::Serialization(e.to_string());
    if let Some(ts) = timestamp {
        writeln!(w, "# generated {ts}").map_err(io)?;
    }
    writeln!(w, "{DENSITY_HEADER}").map_err(io)?;
    for r in rows {
        writeln!(w, "{}", density_row(r)).map_err(io)?;
    }
    Ok(())
}

pub const CORRELATION_HEADER: &str = "label,lo,hi,stride,sum,samples,value";

pub fn correlation_row(label: &str, r: &CorrelationReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        quote(label),
        r.lo,
        r.hi,
        r.stride,
        r.sum,
        r.samples,
        fmt_real(r.value)
    )
}

pub const LOCAL_AVERAGE_HEADER: &str = "label,h,lo,hi,stride,abs_sum_total,samples,value";

pub fn local_average_row(label: &str, r: &LocalAverageReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        quote(label),
        r.h,
        r.lo,
        r.hi,
        r.stride,
        r.abs_sum_total,
        r.samples,
        fmt_real(r.value)
    )
}

/// JSON document with full context for any serializable report bundle.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::density;

    #[test]
    fn csv_is_deterministic_and_quoted() {
        let r = density(&|n: u64| n.is_multiple_of(2), 1, 11, 1).unwrap();
        let mut rows = vec![r];
        rows[0].context = "a,b \"c\"".into();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_density_csv(&mut a, &rows, None).unwrap();
        write_density_csv(&mut b, &rows, None).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(DENSITY_HEADER));
        assert!(text.contains("\"a,b \"\"c\"\"\""));
        assert!(text.contains(",5,10,"));
    }

    #[test]
    fn reals_carry_twelve_significant_digits() {
        assert_eq!(fmt_real(0.0), "0");
        assert_eq!(fmt_real(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_real(1.0 / 16.0), "6.25000000000e-2");
    }
}
