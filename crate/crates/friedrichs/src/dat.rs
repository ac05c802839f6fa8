//! Two-column `.dat` tables for plotting convergence histories.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const HEADER: &str = "meshsize H1TypeError";

/// Text of a table with the given header line and `(x, y)` rows, in full
/// double precision.
pub fn format_dat(header: &str, rows: &[(f64, f64)]) -> String {
    let mut s = String::with_capacity(32 * (rows.len() + 1));
    s.push_str(header);
    s.push('\n');
    for (x, y) in rows {
        let _ = writeln!(s, "{x:.16e} {y:.16e}");
    }
    s
}

/// Parse a table written by [`format_dat`], returning the header and rows.
pub fn parse_dat(text: &str) -> Result<(String, Vec<(f64, f64)>)> {
    let mut lines = text.lines();
    let header = lines.next().context("empty table")?.trim().to_string();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let cols: Vec<&str> = t.split_whitespace().collect();
        if cols.len() != 2 {
            bail!("line {}: expected two columns, found {}", i + 2, cols.len());
        }
        let x = cols[0].parse().with_context(|| format!("line {}", i + 2))?;
        let y = cols[1].parse().with_context(|| format!("line {}", i + 2))?;
        rows.push((x, y));
    }
    Ok((header, rows))
}

pub fn emit_dat(path: &Path, header: &str, rows: &[(f64, f64)]) -> Result<()> {
    if rows.is_empty() {
        bail!("refusing to write an empty table to {}", path.display());
    }
    fs::write(path, format_dat(header, rows)).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_table() {
        let s = format_dat(HEADER, &[(0.5, 0.25)]);
        assert_eq!(s.lines().count(), 2);
        assert_eq!(s.lines().next(), Some(HEADER));
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = [(0.1, 1.0 / 3.0), (f64::MIN_POSITIVE, 1e300), (std::f64::consts::FRAC_1_SQRT_2, 2.0f64.sqrt())];
        let (h, back) = parse_dat(&format_dat(HEADER, &rows)).unwrap();
        assert_eq!(h, HEADER);
        assert_eq!(back, rows);
    }
}
