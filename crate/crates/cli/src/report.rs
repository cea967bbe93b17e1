use std::io::Write;
use std::str::FromStr;

use rug::Float;
use serde_json::{json, Number, Value};

use crate::config::{Format, RunConfig};

pub const TOOL: &str = "hardedge";
pub const SCHEMA_VERSION: &str = "0.1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Grid coordinate, printed in shortest round-trip form.
    Input(f64),
    /// Extended-precision value, printed to the report's digit count.
    Real(Float),
    /// Double-precision value, printed in shortest round-trip form.
    Double(f64),
    /// A route that failed or does not apply to this row.
    Missing,
    Int(u64),
    Flag(bool),
    Text(String),
}

/// One grid point: inputs, route values, discrepancies, budgets and flags,
/// as named columns in a fixed order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportRow {
    pub cells: Vec<(String, Cell)>,
    pub errors: Vec<String>,
}

impl ReportRow {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, name: &str, cell: Cell) -> &mut Self {
        self.cells.push((name.to_string(), cell));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.cells.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn real(&self, name: &str) -> Option<Float> {
        match self.get(name) {
            Some(Cell::Real(v)) => Some(v.clone()),
            Some(Cell::Double(v) | Cell::Input(v)) => Some(Float::with_val(53, *v)),
            _ => None,
        }
    }

    pub fn input(&mut self, name: &str, v: f64) -> &mut Self {
        self.push(name, Cell::Input(v))
    }

    pub fn int(&mut self, name: &str, v: u64) -> &mut Self {
        self.push(name, Cell::Int(v))
    }

    pub fn value(&mut self, name: &str, v: Float) -> &mut Self {
        let cell = if v.is_finite() { Cell::Real(v) } else { Cell::Missing };
        self.push(name, cell)
    }

    pub fn float(&mut self, name: &str, v: f64) -> &mut Self {
        let cell = if v.is_finite() { Cell::Double(v) } else { Cell::Missing };
        self.push(name, cell)
    }

    /// Records a route result; a failure leaves the column empty and marks the row failed.
    pub fn route<E: std::fmt::Display>(&mut self, name: &str, v: Result<Float, E>) -> &mut Self {
        match v {
            Ok(v) => self.value(name, v),
            Err(e) => {
                self.errors.push(format!("{name}: {e}"));
                self.push(name, Cell::Missing)
            }
        }
    }

    pub fn missing(&mut self, name: &str) -> &mut Self {
        self.push(name, Cell::Missing)
    }

    /// `a - b` from two value columns already in the row.
    pub fn diff(&mut self, name: &str, a: &str, b: &str) -> &mut Self {
        let d = match (self.real(a), self.real(b)) {
            (Some(x), Some(y)) => {
                let p = x.prec().max(y.prec());
                Some(Float::with_val(p, &x - &y))
            }
            _ => None,
        };
        match d {
            Some(d) => self.push(name, Cell::Real(d)),
            None => self.push(name, Cell::Missing),
        }
    }

    /// Flag column; a missing input counts as a failure.
    pub fn check(&mut self, name: &str, ok: Option<bool>) -> &mut Self {
        self.push(name, Cell::Flag(ok.unwrap_or(false)))
    }

    pub fn text(&mut self, name: &str, v: impl Into<String>) -> &mut Self {
        self.push(name, Cell::Text(v.into()))
    }

    pub fn error(&mut self, msg: impl Into<String>) -> &mut Self {
        self.errors.push(msg.into());
        self
    }

    /// True when every flag holds and no route failed.
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.cells.iter().all(|(_, c)| !matches!(c, Cell::Flag(false)))
    }

    /// `|a - b| / max(|b|, floor)` for two value columns.
    pub fn relative(&self, a: &str, b: &str, floor: f64) -> Option<f64> {
        let (x, y) = (self.real(a)?, self.real(b)?);
        let d = Float::with_val(x.prec().max(y.prec()), &x - &y).abs().to_f64();
        Some(d / y.to_f64().abs().max(floor))
    }

    pub fn abs(&self, name: &str) -> Option<f64> {
        self.real(name).map(|v| v.to_f64().abs())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    /// Significant digits for real columns.
    pub digits: usize,
    pub rows: Vec<ReportRow>,
}

fn format_real(v: &Float, digits: usize) -> String {
    if v.is_zero() {
        return "0".into();
    }
    // rug counts significant digits, not digits after the point
    format!("{:.*e}", digits.max(1), v)
}

fn format_cell(c: &Cell, digits: usize) -> String {
    match c {
        Cell::Input(v) => v.to_string(),
        Cell::Real(v) => format_real(v, digits),
        Cell::Double(v) => format!("{v:e}"),
        Cell::Missing => String::new(),
        Cell::Int(v) => v.to_string(),
        Cell::Flag(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(c: &Cell, digits: usize) -> Value {
    match c {
        Cell::Input(v) | Cell::Double(v) => json!(v),
        Cell::Real(v) => Number::from_str(&format_real(v, digits)).map(Value::Number).unwrap_or(Value::Null),
        Cell::Missing => Value::Null,
        Cell::Int(v) => json!(v),
        Cell::Flag(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ReportRow::passed)
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.rows.first().map(|r| r.cells.iter().map(|(n, _)| n.clone()).collect()).unwrap_or_default();
        cols.push("pass".into());
        cols.push("error".into());
        cols
    }

    fn header_line(&self) -> String {
        format!("# {TOOL} v{SCHEMA_VERSION} config={}", self.config.canonical_json())
    }

    fn row_fields(&self, r: &ReportRow) -> Vec<String> {
        let mut f: Vec<String> = r.cells.iter().map(|(_, c)| format_cell(c, self.digits)).collect();
        f.push(r.passed().to_string());
        f.push(r.errors.join("; "));
        f
    }

    /// Header with the config, a separate timestamp line, column names and rows.
    pub fn write_csv<W: Write>(&self, w: W, generated: u64) -> std::io::Result<()> {
        let mut w = w;
        writeln!(w, "{}", self.header_line())?;
        writeln!(w, "# generated_unix={generated}")?;
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(self.columns())?;
        for r in &self.rows {
            out.write_record(self.row_fields(r))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self, generated: u64) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                for (n, c) in &r.cells {
                    obj.insert(n.clone(), json_cell(c, self.digits));
                }
                obj.insert("pass".into(), json!(r.passed()));
                obj.insert("error".into(), if r.errors.is_empty() { Value::Null } else { json!(r.errors.join("; ")) });
                Value::Object(obj)
            })
            .collect();
        json!({
            "tool": TOOL,
            "version": SCHEMA_VERSION,
            "config": self.config,
            "generated_unix": generated,
            "columns": self.columns(),
            "rows": rows,
        })
    }

    pub fn write<W: Write>(&self, w: W, generated: u64) -> std::io::Result<()> {
        match self.config.format {
            Format::Csv => self.write_csv(w, generated),
            Format::Json => {
                let mut w = w;
                serde_json::to_writer_pretty(&mut w, &self.to_json(generated))?;
                writeln!(w)?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    fn sample() -> Report {
        let mut r = ReportRow::new();
        r.input("t", 0.5).value("a", Float::with_val(128, 2) / 3u32).float("b", 0.5).diff("d_a_b", "a", "b");
        let ok = r.abs("d_a_b").map(|d| d < 1.0);
        r.check("ok", ok);
        let mut bad = ReportRow::new();
        bad.input("t", 0.7).route::<String>("a", Err("no convergence, retry".into())).float("b", 1.0).diff("d_a_b", "a", "b");
        bad.check("ok", None);
        Report { config: RunConfig::new(Command::Finite), digits: 20, rows: vec![r, bad] }
    }

    #[test]
    fn discrepancy_is_the_difference_of_its_columns() {
        let rep = sample();
        let r = &rep.rows[0];
        let d = r.real("d_a_b").unwrap().to_f64();
        assert!((d - (2.0 / 3.0 - 0.5)).abs() < 1e-16);
        assert!(r.passed());
        assert!(!rep.rows[1].passed());
        assert_eq!(rep.rows[1].get("d_a_b"), Some(&Cell::Missing));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf, 7).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# hardedge v0.1 config={\"command\":\"finite\""));
        assert_eq!(lines[1], "# generated_unix=7");
        assert_eq!(lines[2], "t,a,b,d_a_b,ok,pass,error");
        assert!(lines[3].starts_with("0.5,6.6666666666666666667e-1,5e-1,1.6666666666666666667e-1,"));
        assert!(lines[3].ends_with(",true,true,"));
        assert!(lines[4].ends_with(",,false,false,\"a: no convergence, retry\""));
    }

    #[test]
    fn json_layout() {
        let v = sample().to_json(7);
        assert_eq!(v["version"], "0.1");
        assert_eq!(v["rows"][0]["pass"], true);
        assert!(v["rows"][1]["a"].is_null());
        let a = v["rows"][0]["a"].to_string();
        assert_eq!(a, "6.6666666666666666667e-1");
    }
}
