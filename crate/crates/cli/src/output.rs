use std::fmt::Write as _;
use std::io::Write as _;

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Common, Format};
use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV cell in shortest round-trip form.
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip digits; exponent form outside `[1e-5, 1e16)`.
pub fn write_float(buf: &mut String, v: f64) -> std::fmt::Result {
    let mag = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&mag) {
        write!(buf, "{v}")
    } else {
        write!(buf, "{v:e}")
    }
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut buf = String::new();
        let names: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
        buf.push_str(&names.join(","));
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match c {
                Cell::Num(v) => write_float(&mut self.buf, *v),
                Cell::Int(v) => write!(self.buf, "{v}"),
                Cell::Bool(v) => write!(self.buf, "{v}"),
                Cell::Text(s) => write!(self.buf, "{s}"),
            }
            .expect("writing to a String");
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// JSON envelope with schema version, library version and resolved config.
pub fn json_report<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> Result<String, Failure> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "library_version": wignerlab::VERSION,
        "command": command,
        "config": to_value(config)?,
        "result": to_value(result)?,
    });
    let mut text = serde_json::to_string_pretty(&doc).context("serializing report")?;
    text.push('\n');
    Ok(text)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    Ok(serde_json::to_value(v).context("serializing report")?)
}

/// Picks CSV or JSON per `--format` and writes it to `--out` or stdout.
pub fn emit<C: Serialize, R: Serialize>(
    command: &str,
    common: &Common,
    config: &C,
    result: &R,
    csv: impl FnOnce() -> Csv,
) -> Result<(), Failure> {
    let text = match common.format {
        Format::Csv => csv().finish(),
        Format::Json => json_report(command, config, result)?,
    };
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing to stdout")?;
            out.flush().context("writing to stdout")?;
        }
    }
    Ok(())
}
