//! Number formatting, grid lists and the scan table format.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::Value;

use crate::error::{Error, Result};

/// Fixed-width scientific notation with `digits` significant digits.
pub fn fmt_float(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", digits.saturating_sub(1), x)
}

/// Rounds every number in a JSON document to `digits` significant digits.
pub fn round_json(v: Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = fmt_float(x, digits).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_json(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_json(x, digits))).collect()),
        other => other,
    }
}

/// Parses a comma-separated list of finite numbers, or `start:stop:count`
/// for `count` evenly spaced values including both ends.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    let parse = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| Error::Config(format!("not a number: {:?}", s.trim())))?;
        if !v.is_finite() {
            return Err(Error::Config(format!("grid values must be finite, got {v}")));
        }
        Ok(v)
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => text.split(',').map(parse).collect(),
        3 => {
            let (a, b) = (parse(parts[0])?, parse(parts[1])?);
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("not a count: {:?}", parts[2].trim())))?;
            if !(1..=100_000).contains(&n) {
                return Err(Error::Config(format!("grid count must be in 1..=100000, got {n}")));
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(Error::Config(format!("cannot parse grid {text:?}"))),
    }
}

/// Column names of the scan table.
pub const SCAN_COLUMNS: [&str; 8] = ["eta", "n_bar_c", "fidelity", "purity", "f_cor", "dim_c", "dim_r", "status"];

/// One scan row as text, exactly as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRecord {
    pub fields: Vec<String>,
}

impl ScanRecord {
    pub fn key(&self) -> (String, String) {
        (self.fields[0].clone(), self.fields[1].clone())
    }

    pub fn is_ok(&self) -> bool {
        self.fields[7] == "ok"
    }
}

/// Parsed scan file: `# key = value` metadata and the data rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanTable {
    pub meta: BTreeMap<String, String>,
    pub records: Vec<ScanRecord>,
}

/// Reads a scan table. Comment lines start with `#`; the first other line
/// must be the column header.
pub fn parse_scan_csv(text: &str) -> Result<ScanTable> {
    let mut table = ScanTable::default();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                table.meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Config(format!("bad scan header: {e}")))?.clone();
    if header.iter().ne(SCAN_COLUMNS.iter().copied()) {
        return Err(Error::Config(format!("unexpected scan columns {:?}", header.iter().collect::<Vec<_>>())));
    }
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Config(format!("bad scan row: {e}")))?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        for (i, name) in SCAN_COLUMNS.iter().enumerate().take(2) {
            let v: f64 = fields[i]
                .parse()
                .map_err(|_| Error::Config(format!("column {name} is not a number: {:?}", fields[i])))?;
            if !v.is_finite() {
                return Err(Error::Config(format!("column {name} must be finite")));
            }
        }
        table.records.push(ScanRecord { fields });
    }
    Ok(table)
}

/// Writes `# key = value` lines, a header and the rows.
pub fn write_table<W: Write>(
    out: W,
    meta: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = out;
    for (k, v) in meta {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(columns).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
