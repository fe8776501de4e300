//! Column-oriented result sets and their serializers.
//!
//! Every dataset carries a metadata block (tool version, command, config
//! echo), a header naming the columns, and one `error` column so failed rows
//! stay visible instead of being dropped. Floats print in scientific
//! notation with 17 significant digits, which round-trips f64 exactly and
//! keeps output files byte-identical across runs.

use std::io::{self, Write};

/// One cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => fmt_float(*x),
            Value::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(i) => serde_json::json!(i),
            Value::Float(x) if x.is_finite() => serde_json::json!(x),
            // JSON has no NaN/inf; fall back to the string form.
            Value::Float(x) => serde_json::json!(fmt_float(*x)),
            Value::Text(s) => serde_json::json!(s),
        }
    }
}

/// 17 significant digits, lowercase scientific, gnuplot-readable specials.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub values: Vec<Value>,
    pub error: Option<String>,
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Dataset {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, values: Vec<Value>, error: Option<String>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(Row { values, error });
    }

    pub fn write(&self, w: &mut impl Write, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
            Format::Table => self.write_table(w),
        }
    }

    /// RFC-4180 quoting with a leading `#` metadata block.
    fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut header: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        header.push("error");
        writeln!(w, "{}", header.join(","))?;
        for row in &self.rows {
            let mut fields: Vec<String> = row.values.iter().map(|v| csv_field(&v.render())).collect();
            fields.push(csv_field(row.error.as_deref().unwrap_or("")));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// Whitespace-aligned table; `#` metadata and header lines.
    fn write_table(&self, w: &mut impl Write) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut header: Vec<String> = self.columns.clone();
        header.push("error".to_string());
        let mut grid: Vec<Vec<String>> = vec![header];
        for row in &self.rows {
            let mut cells: Vec<String> = row
                .values
                .iter()
                .map(|v| table_field(&v.render()))
                .collect();
            cells.push(table_field(row.error.as_deref().unwrap_or("")));
            grid.push(cells);
        }
        let ncols = grid[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|c| grid.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for (i, row) in grid.iter().enumerate() {
            let prefix = if i == 0 { "# " } else { "  " };
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            writeln!(w, "{prefix}{}", line.join("  ").trim_end())?;
        }
        Ok(())
    }

    fn write_json(&self, w: &mut impl Write) -> io::Result<()> {
        let mut meta = serde_json::Map::new();
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), serde_json::json!(v));
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, val) in self.columns.iter().zip(&row.values) {
                    obj.insert(col.clone(), val.to_json());
                }
                obj.insert(
                    "error".to_string(),
                    row.error
                        .as_ref()
                        .map(|e| serde_json::json!(e))
                        .unwrap_or(serde_json::Value::Null),
                );
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "metadata": serde_json::Value::Object(meta),
            "columns": self.columns,
            "rows": rows,
        });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn table_field(s: &str) -> String {
    if s.is_empty() {
        "-".to_string()
    } else {
        s.replace(char::is_whitespace, "_")
    }
}
