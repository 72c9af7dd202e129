use std::io::Write;

use super::Table;
use crate::error::{Error, Result};

/// Version of the table and report layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// `x` rounded to 12 significant digits in its shortest form.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let exponent = rounded.abs().log10().floor();
    if (-5.0..15.0).contains(&exponent) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Writes `table` as CSV with a leading `schema_version` column.
pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Domain(format!("CSV output: {e}"));
    let header = std::iter::once("schema_version").chain(table.columns.iter().map(String::as_str));
    w.write_record(header).map_err(csv_err)?;
    let version = SCHEMA_VERSION.to_string();
    for row in &table.rows {
        let cells = std::iter::once(version.clone()).chain(row.iter().map(|c| c.to_string()));
        w.write_record(cells).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Cell;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(2.0 / 3.0 * 1e-8), "6.66666666667e-9");
        assert_eq!(format_float(-1234.5), "-1234.5");
        assert_eq!(format_float(1e20), "1e20");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_has_schema_column() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec![Cell::from(1usize), Cell::from("x,y")]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "schema_version,a,b\n1,1,\"x,y\"\n");
    }
}
