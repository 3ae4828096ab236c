//! Output shaping: JSON or CSV, full-precision decimal serialization,
//! atomic file writes.

use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::CliError;

/// Decimal digits carried by `bits` of significand (⌊bits·log10 2⌋).
pub fn digits_for(bits: u32) -> usize {
    kleintrace::prec::decimal_digits(bits)
}

pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = x.to_string_radix(10, Some(digits.max(2)));
    // trim trailing zeros of the mantissa only, never exponent digits
    match s.split_once('e') {
        Some((mant, exp)) => {
            let m = if mant.contains('.') {
                mant.trim_end_matches('0').trim_end_matches('.')
            } else {
                mant
            };
            format!("{m}e{exp}")
        }
        None => {
            if s.contains('.') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            }
        }
    }
}

pub fn fmt_complex(z: &Complex, digits: usize) -> (String, String) {
    (fmt_float(z.real(), digits), fmt_float(z.imag(), digits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Json,
    Csv,
}

impl OutFormat {
    pub fn parse(flag: Option<&str>, spec_default: Option<&str>) -> Result<Self, CliError> {
        let chosen = flag.or(spec_default).unwrap_or("json");
        match chosen {
            "json" => Ok(OutFormat::Json),
            "csv" => Ok(OutFormat::Csv),
            other => Err(CliError::validation(format!("unknown format {other:?}"))),
        }
    }
}

/// A table with named columns, rendered as JSON records or CSV lines.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, meta: Value) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (c, v) in self.columns.iter().zip(row.iter()) {
                    obj.insert((*c).to_string(), Value::String(v.clone()));
                }
                Value::Object(obj)
            })
            .collect();
        json!({ "meta": meta, "rows": rows })
    }
}

/// Write to `--out` atomically (temp file + rename), or to stdout.
pub fn emit(content: &str, out: Option<&str>) -> Result<(), CliError> {
    match out {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(path) => {
            let tmp = format!("{path}.tmp");
            std::fs::write(&tmp, content)
                .map_err(|e| CliError::validation(format!("cannot write {tmp}: {e}")))?;
            std::fs::rename(&tmp, path)
                .map_err(|e| CliError::validation(format!("cannot move into place: {e}")))?;
            Ok(())
        }
    }
}

pub fn render(table: &Table, fmt: OutFormat, meta: Value, out: Option<&str>) -> Result<(), CliError> {
    let content = match fmt {
        OutFormat::Csv => table.to_csv(),
        OutFormat::Json => serde_json::to_string_pretty(&table.to_json(meta)).unwrap(),
    };
    emit(&content, out)
}
