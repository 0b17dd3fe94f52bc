//! Deterministic artifact rendering.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

/// Twelve significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // fold −0 into one spelling
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

/// JSON number rounded to twelve significant digits; non-finite values
/// become `null`.
pub fn json_float(x: f64) -> Value {
    let rounded: f64 = fmt_float(x).parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

/// Comma-separated rows with LF line endings.
#[derive(Debug, Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv::default();
        csv.row(header.iter().map(|s| s.to_string()));
        csv
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&f);
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.0), fmt_float(0.0));
        assert_eq!(fmt_float(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_float(6.02214076e23), "6.02214076000e23");
    }

    #[test]
    fn json_rounding() {
        assert_eq!(json_float(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(json_float(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_rows_end_with_lf() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(["1".to_string(), "2".to_string()]);
        assert_eq!(c.into_string(), "a,b\n1,2\n");
    }
}
