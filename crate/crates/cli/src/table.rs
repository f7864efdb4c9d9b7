//! Column tables written as CSV or JSON, and a strict numeric CSV reader.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use perforated::Error;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    F(f64),
    U(u64),
    /// A label; only used in the first column of metric tables.
    S(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::F(v) => format!("{v:.16e}"),
            Cell::U(v) => v.to_string(),
            Cell::S(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::F(v) => Value::from(v),
            Cell::U(v) => Value::from(v),
            Cell::S(v) => Value::from(v),
        }
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_labelled(&mut self, label: &'static str, value: f64) {
        self.push(vec![Cell::S(label), Cell::F(value)]);
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// An array of records keyed by column name.
    pub fn write_json<W: Write>(&self, out: &mut W) -> serde_json::Result<()> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(m)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *out, &records)?;
        writeln!(out).map_err(serde_json::Error::io)
    }
}

/// A parsed numeric CSV with a header row.
pub struct Columns {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Columns {
    pub fn column(&self, name: &str) -> Result<Vec<f64>, Error> {
        let j = self.header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            path: self.path.clone(),
            line: 1,
            message: format!("missing column {name:?} (have {})", self.header.join(",")),
        })?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn read_csv(path: &Path) -> Result<Columns, Error> {
    let text = fs::read_to_string(path)?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let header: Vec<String> = head.split(',').map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(err(
                i + 1,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        let row = fields
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| err(i + 1, format!("not a number: {:?}", f.trim())))
            })
            .collect::<Result<Vec<f64>, Error>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(1, "no data rows".into()));
    }
    Ok(Columns {
        path: path.to_path_buf(),
        header,
        rows,
    })
}
