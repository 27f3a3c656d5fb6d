//! Deterministic text encodings for reports.
//!
//! Every float is written in scientific notation with 12 significant
//! digits; JSON field order follows struct declaration order. Non-finite
//! values become `null` in JSON and `nan`/`inf` in CSV.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

/// Format a float with 12 significant digits.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else if v == 0.0 {
        // collapse -0.0 so repeated runs cannot differ in sign of zero
        "0.00000000000e0".to_string()
    } else {
        format!("{v:.11e}")
    }
}

struct FixedDigits<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(num(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(num(value as f64).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Pretty JSON with fixed 12-significant-digit floats.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = FixedDigits { inner: PrettyFormatter::with_indent(b"  ") };
    let mut ser = Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("serializing report structs cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Join already-formatted fields into a CSV line, quoting where needed.
pub fn csv_line<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = String::new();
    for (i, f) in fields.into_iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        let f = f.as_ref();
        if f.contains([',', '"', '\n']) {
            line.push('"');
            line.push_str(&f.replace('"', "\"\""));
            line.push('"');
        } else {
            line.push_str(f);
        }
    }
    line.push('\n');
    line
}

/// Parse a numeric CSV table, skipping blank lines, `#` comments and a
/// non-numeric header row. Returns rows of floats with their 1-based line numbers.
pub fn parse_numeric_csv(text: &str) -> crate::Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => rows.push((idx + 1, v)),
            Err(_) if rows.is_empty() => continue, // header
            Err(e) => {
                return Err(crate::LabError::Parse { line: idx + 1, msg: format!("malformed number: {e}") });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        id: &'static str,
        value: f64,
        missing: f64,
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(num(-0.0), num(0.0));
        let s = to_json(&Sample { id: "a", value: 0.1, missing: f64::NAN });
        assert!(s.contains("\"value\": 1.00000000000e-1"));
        assert!(s.contains("\"missing\": null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["value"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_quoting_and_parsing() {
        assert_eq!(csv_line(["a", "b,c"]), "a,\"b,c\"\n");
        let rows = parse_numeric_csv("k,a,b\n0, 1.0, 0\n# note\n1,0.3,0\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1], (4, vec![1.0, 0.3, 0.0]));
        assert!(parse_numeric_csv("1,2\n1,x\n").is_err());
    }
}
