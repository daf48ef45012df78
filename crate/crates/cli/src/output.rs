//! Tabular output as CSV or JSON.
//!
//! Reals are written with 17 significant digits so every value re-parses to
//! the same `f64`. The same text is used in both formats.

use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

impl Value {
    fn text(&self) -> String {
        match self {
            Value::Real(x) => format_real(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Real(x) if x.is_finite() => format_real(*x),
            Value::Real(_) | Value::Empty => "null".to_string(),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => serde_json::Value::from(s.as_str()).to_string(),
        }
    }
}

/// `x` with exactly 17 significant digits, positional for exponents in
/// `[-5, 17)`, scientific otherwise.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let out = if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{digits}{}", "0".repeat(split - digits.len()))
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    };
    format!("{sign}{out}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Value::text))?;
    }
    w.flush()
}

pub fn write_json<W: Write>(table: &Table, mut out: W) -> io::Result<()> {
    out.write_all(b"[")?;
    for (i, row) in table.rows.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        out.write_all(b"\n  {")?;
        for (j, (key, value)) in table.columns.iter().zip(row).enumerate() {
            if j > 0 {
                out.write_all(b", ")?;
            }
            write!(out, "\"{key}\": {}", value.json())?;
        }
        out.write_all(b"}")?;
    }
    if !table.rows.is_empty() {
        out.write_all(b"\n")?;
    }
    out.write_all(b"]\n")?;
    out.flush()
}

pub fn write_table<W: Write>(table: &Table, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(table, out),
        Format::Json => write_json(table, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_have_seventeen_digits() {
        assert_eq!(format_real(0.866_025_403_784_438_6), "0.86602540378443860");
        assert_eq!(format_real(1.732_050_807_568_877_2), "1.7320508075688772");
        assert_eq!(format_real(-2.5), "-2.5000000000000000");
        assert_eq!(format_real(0.0), "0.0000000000000000");
        assert_eq!(format_real(123456.0), "123456.00000000000");
        assert_eq!(format_real(1e-7), "9.9999999999999995e-8");
        assert_eq!(format_real(1.5e20), "1.5000000000000000e20");
        assert_eq!(format_real(3.2e-5), "0.000031999999999999999");
        assert_eq!(format_real(f64::NAN), "nan");
    }

    #[test]
    fn formatted_reals_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            2f64.sqrt(),
            1e-300,
            6.02e23,
            -4.4e-6,
            12345.678901234567,
        ] {
            assert_eq!(format_real(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new(&["p", "method", "ok", "note"]);
        t.push(vec![2.0.into(), "fixed_point".into(), true.into(), Value::Empty]);
        t.push(vec![3.0.into(), "a,b".into(), false.into(), Some(1usize).into()]);
        let mut csv = Vec::new();
        write_csv(&t, &mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "p,method,ok,note\n2.0000000000000000,fixed_point,true,\n3.0000000000000000,\"a,b\",false,1\n"
        );
        let mut json = Vec::new();
        write_json(&t, &mut json).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(parsed[0]["method"], "fixed_point");
        assert_eq!(parsed[0]["note"], serde_json::Value::Null);
        assert_eq!(parsed[1]["p"].as_f64(), Some(3.0));
    }

    #[test]
    fn empty_table_still_has_header() {
        let t = Table::new(&["p0", "bracket_lo"]);
        let mut csv = Vec::new();
        write_csv(&t, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "p0,bracket_lo\n");
        let mut json = Vec::new();
        write_json(&t, &mut json).unwrap();
        assert_eq!(String::from_utf8(json).unwrap(), "[]\n");
    }
}
