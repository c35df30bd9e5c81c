//! Rows, reports and the CSV / JSON-lines writers.

use std::fmt;
use std::io::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(v) => Some(v as f64),
            Value::Float(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i128> {
        match *self {
            Value::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
            Value::Missing => Ok(()),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(v) => s.serialize_i128(*v),
            Value::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Value::Float(_) | Value::Missing => s.serialize_none(),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Text(t) => s.serialize_str(t),
        }
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(v: $t) -> Self {
                Value::Int(v as i128)
            }
        }
    )*};
}
int_value!(u8, u32, u64, usize, i64, i128, u128);

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// One output row with named columns in a fixed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row {
    cells: Vec<(&'static str, Value)>,
}

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &'static str, v: impl Into<Value>) -> Self {
        self.cells.push((name, v.into()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.cells.iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    pub fn columns(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.cells.iter().map(|(n, _)| *n)
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.cells.iter().map(|(_, v)| v)
    }

    /// Boolean verdict columns: `pass` and anything ending in `_pass`.
    pub fn checks(&self) -> impl Iterator<Item = (&'static str, bool)> + '_ {
        self.cells
            .iter()
            .filter(|(n, _)| *n == "pass" || n.ends_with("_pass"))
            .filter_map(|(n, v)| v.as_bool().map(|b| (*n, b)))
    }

    pub fn failed(&self) -> bool {
        self.checks().any(|(_, ok)| !ok)
    }
}

impl Serialize for Row {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.cells.len()))?;
        for (k, v) in &self.cells {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub rows: Vec<Row>,
}

impl ScenarioReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }

    pub fn checked_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.checks().next().is_some()).count()
    }

    /// Values of a numeric column, skipping blanks.
    pub fn column_f64(&self, name: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.get(name).and_then(Value::as_f64))
            .collect()
    }

    pub fn min_ratio(&self) -> Option<f64> {
        self.column_f64("ratio").into_iter().reduce(f64::min)
    }

    pub fn header(&self) -> Vec<&'static str> {
        self.rows.first().map(|r| r.columns().collect()).unwrap_or_default()
    }

    pub fn summary(&self) -> String {
        let min = self.min_ratio().map_or_else(|| "-".to_string(), |r| format!("{r:.6}"));
        format!(
            "{}: {} rows, {} checked, {} failures, min ratio {}",
            self.scenario,
            self.rows.len(),
            self.checked_rows(),
            self.failures(),
            min
        )
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let header = self.header();
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&header)?;
        for r in &self.rows {
            debug_assert!(
                r.columns().eq(header.iter().copied()),
                "ragged row in {}",
                self.scenario
            );
            out.write_record(r.values().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json_lines<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.rows {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_render() {
        let r = Row::new()
            .with("scenario", "x")
            .with("size", 3u64)
            .with("ratio", 0.5)
            .with("k", None::<u64>)
            .with("pass", true);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"scenario":"x","size":3,"ratio":0.5,"k":null,"pass":true}"#
        );
        let rep = ScenarioReport {
            scenario: Scenario::Freiman,
            seed: 1,
            rows: vec![r.clone(), r.with("route_pass", false)],
        };
        assert_eq!(rep.failures(), 1);
        assert_eq!(rep.min_ratio(), Some(0.5));
    }

    #[test]
    fn csv_layout() {
        let rep = ScenarioReport {
            scenario: Scenario::Freiman,
            seed: 1,
            rows: vec![Row::new().with("a", 1u64).with("b", "x,y").with("c", None::<f64>)],
        };
        assert_eq!(rep.to_csv_string(), "a,b,c\n1,\"x,y\",\n");
    }
}
