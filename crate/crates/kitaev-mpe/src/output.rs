//! Plot-ready tabular output: self-describing CSV (comments prefixed `#`,
//! numbers printed with 17 significant digits so emit/parse round-trips
//! exactly) and an equivalent JSON form.

use crate::error::{Error, Result};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits: lossless for f64
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            // commas would break the row structure
            Cell::Text(s) => s.replace(',', ";"),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) => s.serialize_f64(*x),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// A column-labeled table with provenance comments.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    #[serde(serialize_with = "rows_as_seq")]
    pub rows: Vec<Vec<Cell>>,
}

fn rows_as_seq<S: Serializer>(
    rows: &[Vec<Cell>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        seq.serialize_element(r)?;
    }
    seq.end()
}

impl Table {
    /// New table whose first comment is the standard version header.
    pub fn new(columns: &[&str]) -> Self {
        Self {
            comments: vec![format!("kitaev-mpe v{}", crate::VERSION)],
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// Parses CSV produced by [`Table::to_csv`] back into a table (comments kept
/// without the `# ` prefix). Numeric cells re-parse exactly.
pub fn parse_csv(text: &str) -> Result<Table> {
    let mut comments = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            comments.push(rest.trim_start().to_string());
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &columns {
            None => columns = Some(fields.iter().map(|s| s.to_string()).collect()),
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(Error::InvalidParams(format!(
                        "csv row has {} fields, expected {}",
                        fields.len(),
                        cols.len()
                    )));
                }
                let row = fields
                    .iter()
                    .map(|f| {
                        if let Ok(i) = f.parse::<i64>() {
                            Cell::Int(i)
                        } else if let Ok(x) = f.parse::<f64>() {
                            Cell::Num(x)
                        } else {
                            Cell::Text(f.to_string())
                        }
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    let columns = columns.ok_or_else(|| Error::InvalidParams("csv has no header row".into()))?;
    Ok(Table { comments, columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = Table::new(&["x", "y", "status"]);
        t.comment("fixed mu=0.5");
        t.push_row(vec![Cell::Num(0.1 + 0.2), Cell::Int(-3), Cell::Text("ok".into())]);
        t.push_row(vec![Cell::Num(1.0 / 3.0), Cell::Int(512), Cell::Text("ok".into())]);
        t.push_row(vec![Cell::Num(-2.5e-300), Cell::Int(0), Cell::Text("degenerate mode".into())]);
        let parsed = parse_csv(&t.to_csv()).unwrap();
        assert_eq!(parsed.columns, t.columns);
        assert_eq!(parsed.rows, t.rows);
        assert!(parsed.comments[0].starts_with("kitaev-mpe v"));
    }

    #[test]
    fn text_cells_cannot_break_rows() {
        let mut t = Table::new(&["v", "status"]);
        t.push_row(vec![Cell::Num(1.0), Cell::Text("bad, very bad".into())]);
        let parsed = parse_csv(&t.to_csv()).unwrap();
        assert_eq!(parsed.rows[0].len(), 2);
    }

    #[test]
    fn json_has_numbers_not_strings() {
        let mut t = Table::new(&["v"]);
        t.push_row(vec![Cell::Num(0.5)]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert!(v["rows"][0][0].is_f64());
    }
}
