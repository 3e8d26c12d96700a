//! Tabular documents and their CSV, JSON and plain renderings.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    /// 17 significant digits for floats so values round-trip.
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn plain(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.6e}"),
            Cell::Empty => "-".into(),
            other => other.csv(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    /// JSON key: `rows`, `intervals` or a command-specific name.
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    pub meta: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
}

impl Document {
    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn render(&self, format: Format, timestamp: Option<&str>, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Csv => self.render_csv(timestamp, out),
            Format::Json => self.render_json(timestamp, out),
            Format::Plain => self.render_plain(timestamp, out),
        }
    }

    /// Meta lines are `#` comments above each table's header row; tables are
    /// separated by a blank line.
    fn render_csv(&self, timestamp: Option<&str>, out: &mut dyn Write) -> CliResult<()> {
        if let Some(t) = timestamp {
            writeln!(out, "# generated_at={t}")?;
        }
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={}", v.csv())?;
        }
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(vec![]);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            out.write_all(&w.into_inner().map_err(|e| e.into_error())?)?;
        }
        Ok(())
    }

    fn render_json(&self, timestamp: Option<&str>, out: &mut dyn Write) -> CliResult<()> {
        let mut meta = Map::new();
        if let Some(t) = timestamp {
            meta.insert("generated_at".into(), Value::String(t.into()));
        }
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.json());
        }
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        for table in &self.tables {
            let rows = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            doc.insert(table.name.into(), Value::Array(rows));
        }
        serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
        writeln!(out)?;
        Ok(())
    }

    fn render_plain(&self, timestamp: Option<&str>, out: &mut dyn Write) -> CliResult<()> {
        if let Some(t) = timestamp {
            writeln!(out, "generated_at: {t}")?;
        }
        for (k, v) in &self.meta {
            writeln!(out, "{k}: {}", v.plain())?;
        }
        for table in &self.tables {
            writeln!(out)?;
            let cells: Vec<Vec<String>> = table.rows.iter().map(|r| r.iter().map(Cell::plain).collect()).collect();
            let widths: Vec<usize> = table
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].len()).fold(c.len(), usize::max))
                .collect();
            let line = |items: Vec<&str>| {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(table.columns.clone()))?;
            for r in &cells {
                writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> Document {
        let mut d = Document::default();
        d.meta("q", 0.5);
        let mut t = Table::new("rows", &["m", "value", "note"]);
        t.push(vec![1i64.into(), 0.1.into(), Cell::Empty]);
        t.push(vec![2i64.into(), (-3.0).into(), "a,b".into()]);
        d.tables.push(t);
        d
    }

    fn render(format: Format) -> String {
        let mut buf = Vec::new();
        doc().render(format, None, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_floats_round_trip() {
        let s = render(Format::Csv);
        assert_eq!(
            s,
            "# q=5.0000000000000000e-1\nm,value,note\n1,1.0000000000000001e-1,\n2,-3.0000000000000000e0,\"a,b\"\n"
        );
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn json_has_meta_and_named_rows() {
        let v: Value = serde_json::from_str(&render(Format::Json)).unwrap();
        assert_eq!(v["meta"]["q"], 0.5);
        assert_eq!(v["rows"][1]["note"], "a,b");
        assert_eq!(v["rows"][0]["note"], Value::Null);
    }

    #[test]
    fn header_only_when_empty() {
        let mut d = Document::default();
        d.tables.push(Table::new("rows", &["a", "b"]));
        let mut buf = Vec::new();
        d.render(Format::Csv, None, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n");
    }
}
