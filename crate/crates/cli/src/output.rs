use std::io::{self, Write};

/// Significant digits in CSV cells.
pub const DIGITS: usize = 12;

/// Rounds to [`DIGITS`] significant digits and prints the shortest decimal
/// that reads back to the rounded value. Never uses exponent notation, and
/// `-0` prints as `0`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", DIGITS - 1, x)
        .parse()
        .expect("formatted float");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

/// A CSV document: `#` metadata lines, a header, numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (key, value) in &self.meta {
            writeln!(out, "# {key}: {value}")?;
        }
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|&x| format_number(x)))?;
        }
        csv.flush()
    }
}
