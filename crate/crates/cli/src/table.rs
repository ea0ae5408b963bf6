use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) => json!(x),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }
}

/// Column data with `key=value` metadata before and after the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub trailer: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            trailer: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn trailer(&mut self, key: &str, value: impl ToString) {
        self.trailer.push((key.to_string(), value.to_string()));
    }

    /// Values of the named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for (k, v) in &self.trailer {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    /// Inverse of [`Table::to_csv`]. Comment lines before the header are
    /// metadata, those after it the trailer.
    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut table = Table::new(&[]);
        let mut header_seen = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("malformed metadata line: {line}")))?;
                let target = if header_seen { &mut table.trailer } else { &mut table.meta };
                target.push((k.to_string(), v.to_string()));
            } else if !header_seen {
                table.columns = line.split(',').map(str::to_string).collect();
                header_seen = true;
            } else {
                let row = line
                    .split(',')
                    .map(|c| {
                        if c.contains(['.', 'e', 'n', 'N']) {
                            c.parse().map(Cell::Real)
                        } else {
                            c.parse().map(Cell::Int).or_else(|_| c.parse().map(Cell::Real))
                        }
                        .map_err(|_| CliError::Usage(format!("malformed cell: {c}")))
                    })
                    .collect::<Result<Vec<Cell>, CliError>>()?;
                table.rows.push(row);
            }
        }
        Ok(table)
    }

    pub fn to_json(&self, command: &str) -> Value {
        let params: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let metadata: Map<String, Value> = self.trailer.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({
            "schema": 1,
            "command": command,
            "params": params,
            "columns": self.columns,
            "rows": rows,
            "metadata": metadata,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = Table::new(&["index", "value"]);
        t.meta("nu", 0.5);
        t.rows.push(vec![Cell::Int(0), Cell::Real(1.0 / 3.0)]);
        t.rows.push(vec![Cell::Int(1), Cell::Real(-2.5e-300)]);
        t.trailer("tail_bound", "1e-9");
        let text = t.to_csv();
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), text);
        assert!(text.contains("3.3333333333333331e-1"));
    }
}
