//! Deterministic CSV / JSON emission.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

/// 12 significant digits; scientific below 1e-3 and from 1e6 up.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let a = v.abs();
    if !(1e-3..1e6).contains(&a) {
        return format!("{v:.11e}");
    }
    let exp = a.log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let digits = s.bytes().filter(u8::is_ascii_digit).skip_while(|&b| b == b'0').count();
    if digits > 12 {
        // rounding carried into a new leading digit
        if decimals == 0 || a >= 999_999.5 {
            return format!("{v:.11e}");
        }
        return format!("{v:.prec$}", prec = decimals - 1);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// CSV table: header plus rows of preformatted cells.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
