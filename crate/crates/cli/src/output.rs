//! Deterministic table output: CSV with a `# key = value` metadata header,
//! or a JSON mirror of the same schema. Floats carry 17 significant digits
//! so byte-identical reruns are checkable.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::{CliError, CliResult};

/// 17 significant digits, scientific notation, negative zero normalized.
pub fn fmt_float(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(text: &str) -> CliResult<Self> {
        match text {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(CliError::Usage(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Float(f64),
    Str(String),
    Bool(bool),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Self::Float(v) => fmt_float(*v),
            Self::Str(v) => v.clone(),
            Self::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Self::Float(v) => fmt_float(*v),
            Self::Str(v) => json_string(v),
            Self::Bool(v) => v.to_string(),
        }
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One result table: a resolved-config echo plus column-ordered rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub meta: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            meta: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key, value.into()));
        self
    }

    pub fn meta_float(&mut self, key: &'static str, value: f64) -> &mut Self {
        self.meta.push((key, fmt_float(value)));
        self
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> CliResult<()> {
        match out {
            Some(path) => {
                let file = File::create(path).map_err(|e| {
                    CliError::Failure(format!("cannot write {}: {e}", path.display()))
                })?;
                let mut w = BufWriter::new(file);
                self.write_to(format, &mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                self.write_to(format, &mut w)?;
            }
        }
        Ok(())
    }

    fn write_to(&self, format: Format, w: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# generator = modspec {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# command = {}", self.command)?;
        for (key, value) in &self.meta {
            writeln!(w, "# {key} = {value}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{{")?;
        writeln!(
            w,
            "  \"generator\": {},",
            json_string(&format!("modspec {}", env!("CARGO_PKG_VERSION")))
        )?;
        writeln!(w, "  \"command\": {},", json_string(self.command))?;
        writeln!(w, "  \"config\": {{")?;
        for (i, (key, value)) in self.meta.iter().enumerate() {
            let comma = if i + 1 < self.meta.len() { "," } else { "" };
            writeln!(w, "    {}: {}{comma}", json_string(key), json_string(value))?;
        }
        writeln!(w, "  }},")?;
        let columns: Vec<String> = self.columns.iter().map(|c| json_string(c)).collect();
        writeln!(w, "  \"columns\": [{}],", columns.join(", "))?;
        writeln!(w, "  \"rows\": [")?;
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(Value::json).collect();
            let comma = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(w, "    [{}]{comma}", cells.join(", "))?;
        }
        writeln!(w, "  ]")?;
        writeln!(w, "}}")?;
        Ok(())
    }
}
