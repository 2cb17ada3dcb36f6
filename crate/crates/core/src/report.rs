//! Structured command output with table, CSV and JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::atomic_data::IonSpecies;
use crate::error::{Error, Result};

/// A table cell. Non-finite numbers are stored as text so that reports
/// survive a JSON round trip unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Empty,
    Integer(i64),
    Number(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Cell::Number(x)
        } else {
            Cell::Text(format!("{x}"))
        }
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::num)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn plain(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Number(x) => {
                // shortest round-trip form, with an exponent when that is shorter
                if *x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
                    format!("{x}")
                } else {
                    format!("{x:e}")
                }
            }
            Cell::Integer(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn pretty(&self) -> String {
        match self {
            Cell::Number(x) => {
                let a = x.abs();
                if *x == 0.0 {
                    "0".into()
                } else if (1e-3..1e6).contains(&a) {
                    format!("{x:.6}")
                } else {
                    format!("{x:.6e}")
                }
            }
            other => other.plain(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Integer(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    /// Column names carry their units as a suffix (`_m`, `_W`, `_Hz`, `_rad_s`).
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns of `{}`", self.name);
        self.rows.push(row);
    }

    /// Two-column name/value table.
    pub fn key_values(name: &str, pairs: Vec<(&str, Cell)>) -> Self {
        let mut t = Self::new(name, &["quantity", "value"]);
        for (k, v) in pairs {
            t.push(vec![Cell::text(k), v]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// Citations of every line in the species data used.
    pub citations: Vec<String>,
    /// Seconds since the Unix epoch; left out unless requested so that
    /// repeated runs produce identical output.
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(species: &[&IonSpecies]) -> Self {
        let mut citations: Vec<String> = species
            .iter()
            .flat_map(|s| s.transitions.iter().map(move |l| format!("{}: {}", s.name, l.source_citation)))
            .collect();
        citations.sort();
        citations.dedup();
        Self { tool: "acstark".into(), version: env!("CARGO_PKG_VERSION").into(), citations, timestamp: None }
    }

    pub fn stamped(mut self) -> Self {
        self.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Echo of the resolved inputs.
    pub scenario: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl Report {
    pub fn new(command: &str, provenance: Provenance) -> Self {
        Self {
            command: command.into(),
            scenario: Vec::new(),
            tables: Vec::new(),
            verdicts: Vec::new(),
            warnings: Vec::new(),
            provenance,
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Into<Cell>) {
        self.scenario.push((key.into(), value.into()));
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), pass, detail: detail.into() });
    }

    /// Append warnings verbatim, skipping exact repeats.
    pub fn warn_all<I: IntoIterator<Item = String>>(&mut self, warnings: I) {
        for w in warnings {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { key: "report".into(), message: e.to_string() })
    }

    /// CSV of every table; with more than one table each is introduced by a
    /// `# name` line and separated by a blank line.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let many = self.tables.len() > 1;
        for (k, table) in self.tables.iter().enumerate() {
            if many {
                if k > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "# {}", table.name);
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(&table.columns).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::plain)).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
        }
        Ok(out)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("acstark {}\n", self.command);
        if !self.scenario.is_empty() {
            out.push_str("\nscenario\n");
            let width = self.scenario.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &self.scenario {
                let _ = writeln!(out, "  {k:<width$}  {}", v.pretty());
            }
        }
        for table in &self.tables {
            let _ = write!(out, "\n{}\n", table.name);
            let cells: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().map(Cell::pretty).collect()).collect();
            let widths: Vec<usize> = (0..table.columns.len())
                .map(|c| cells.iter().map(|r| r[c].len()).chain([table.columns[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |items: &[String]| {
                let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
                format!("  {}\n", parts.join("  ").trim_end())
            };
            out.push_str(&line(&table.columns));
            for row in &cells {
                out.push_str(&line(row));
            }
        }
        if !self.verdicts.is_empty() {
            out.push_str("\nverdicts\n");
            for v in &self.verdicts {
                let _ = writeln!(out, "  {} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  - {w}");
            }
        }
        let _ = write!(out, "\n{} {}", self.provenance.tool, self.provenance.version);
        if let Some(t) = self.provenance.timestamp {
            let _ = write!(out, " at {t}");
        }
        out.push('\n');
        out
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Table => Ok(self.to_table()),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json().map(|mut s| {
                s.push('\n');
                s
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_species;

    fn sample() -> Report {
        let s = builtin_species("Ca40+").unwrap();
        let mut r = Report::new("test", Provenance::new(&[&s]));
        r.echo("species", "Ca40+");
        r.echo("omega_z_rad_s", Cell::num(6.283185307179586e6));
        let mut t = Table::new("points", &["x_m", "y_W", "note"]);
        t.push(vec![Cell::num(0.1 + 0.2), Cell::num(f64::INFINITY), Cell::text("a,b")]);
        t.push(vec![Cell::num(-1e-30), Cell::Empty, 3usize.into()]);
        r.tables.push(t);
        r.tables.push(Table::key_values("summary", vec![("ok", true.into())]));
        r.verdict("feasible", true, "margin ok");
        r.warn_all(vec!["w1".to_string(), "w1".to_string()]);
        r
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
    }

    #[test]
    fn csv_quotes_and_sections() {
        let csv = sample().to_csv().unwrap();
        assert!(csv.starts_with("# points\nx_m,y_W,note\n0.30000000000000004,inf,\"a,b\"\n"));
        assert!(csv.contains("\n# summary\nquantity,value\nok,true\n"));
    }

    #[test]
    fn table_rendering() {
        let r = sample();
        let text = r.to_table();
        assert!(text.contains("PASS feasible"));
        assert_eq!(r.warnings, vec!["w1".to_string()]);
        assert!(text.contains("-1.000000e-30"));
        assert!(!r.provenance.citations.is_empty());
        assert!(r.provenance.timestamp.is_none());
    }
}
