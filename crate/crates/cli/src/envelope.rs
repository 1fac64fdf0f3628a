//! Result envelopes and their CSV / JSON-lines encodings.

use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliResult;

pub const TOOL: &str = "limsup";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rows and summary produced by one command.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Payload {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    /// Human-readable summary line.
    pub line: String,
}

impl Payload {
    pub fn new(columns: &[&'static str]) -> Self {
        Payload { columns: columns.to_vec(), ..Payload::default() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultEnvelope {
    pub config: ExperimentConfig,
    pub wall_clock_seconds: f64,
    pub payload: Payload,
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl ResultEnvelope {
    fn header_json(&self) -> String {
        serde_json::to_string(&Header { tool: TOOL, version: VERSION, config: &self.config })
            .expect("config serializes")
    }

    pub fn write<W: Write>(&self, format: Format, w: W) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Jsonl => self.write_jsonl(w),
        }
    }

    /// Comment lines carry the config and summary; the wall-clock line comes last.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.header_json())?;
        {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&self.payload.columns)?;
            for row in &self.payload.rows {
                csv.write_record(row.iter().map(cell))?;
            }
            csv.flush()?;
        }
        writeln!(w, "# summary: {}", Value::Object(self.payload.summary.clone()))?;
        writeln!(w, "# wall_clock_seconds: {}", self.wall_clock_seconds)
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.header_json())?;
        for row in &self.payload.rows {
            let obj: Map<String, Value> =
                self.payload.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
            writeln!(w, "{}", Value::Object(obj))?;
        }
        writeln!(w, "{}", serde_json::json!({ "summary": self.payload.summary }))?;
        writeln!(w, "{}", serde_json::json!({ "wall_clock_seconds": self.wall_clock_seconds }))
    }
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// A JSON number, or a string for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, OutputConfig, Params};

    fn envelope(rows: usize) -> ResultEnvelope {
        let mut p = Payload::new(&["n", "value"]);
        for i in 0..rows {
            p.push(vec![Value::from(i as u64), num(i as f64 / 3.0)]);
        }
        p.summarize("rows", rows as u64);
        ResultEnvelope {
            config: ExperimentConfig {
                command: Command::Cf,
                seed: 1,
                output: OutputConfig::default(),
                params: Params::default(),
            },
            wall_clock_seconds: 0.5,
            payload: p,
        }
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        envelope(2).write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {\"tool\":\"limsup\""));
        assert_eq!(lines[1], "n,value");
        assert_eq!(lines[2], "0,0.0");
        assert_eq!(lines[4], "# summary: {\"rows\":2}");
        assert_eq!(lines[5], "# wall_clock_seconds: 0.5");
    }

    #[test]
    fn jsonl_layout() {
        let mut out = Vec::new();
        envelope(1).write_jsonl(&mut out).unwrap();
        let lines: Vec<Value> =
            String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0]["config"]["command"], "cf");
        assert_eq!(lines[1]["n"], 0);
        assert_eq!(lines[2]["summary"]["rows"], 1);
    }

    #[test]
    fn atomic_write_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        write_atomic(&path, |w| w.write_all(b"one")).unwrap();
        write_atomic(&path, |w| w.write_all(b"two")).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
