//! CSV emission. Every file starts with `# key=value` provenance lines,
//! followed by a header row whose column names carry units in brackets.
//! Numbers use the shortest round-trip exponent form, so identical inputs
//! give identical bytes.

use std::path::{Path, PathBuf};

use fowt_core::sim::TimeSeries;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::TOOL_VERSION;

/// Deterministic float text: `1.5e0`, `-2.9e-3`, `nan`, `inf`.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    /// Tool version, config hash, parameter set, seed and command.
    pub fn new(cfg: &RunConfig, command: &str) -> Self {
        Header {
            entries: vec![
                ("tool".into(), TOOL_VERSION.into()),
                ("config_hash".into(), cfg.config_hash.clone()),
                ("parameter_set".into(), cfg.parameter_set.clone()),
                ("seed".into(), cfg.seed.map_or_else(|| "none".into(), |s| s.to_string())),
                ("command".into(), command.into()),
            ],
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }
}

/// Rows of already formatted fields under `name [unit]` columns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[(S, S)]) -> Self {
        Table {
            columns: columns
                .iter()
                .map(|(n, u)| format!("{} [{}]", n.as_ref(), u.as_ref()))
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn write(&self, path: &Path, header: &Header) -> Result<()> {
        let csv_err = |e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        };
        let mut w = csv::WriterBuilder::new().from_writer(header.render().into_bytes());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }
}

/// Time column plus one column per channel.
pub fn series_table(ts: &TimeSeries) -> Table {
    let mut cols = vec![("t".to_string(), "s".to_string())];
    cols.extend(ts.channels().iter().map(|c| (c.name.clone(), c.unit.clone())));
    let mut table = Table::new(&cols);
    for i in 0..ts.len() {
        let mut row = vec![num(ts.time(i))];
        row.extend(ts.channels().iter().map(|c| num(c.values[i])));
        table.push(row);
    }
    table
}

/// Creates the output directory and returns it.
pub fn prepare_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.to_path_buf())
}

/// A CSV written by this tool: header entries and named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadTable {
    pub header: Vec<(String, String)>,
    /// Column names with the unit suffix removed.
    pub names: Vec<String>,
    /// Bracketed units, empty when absent.
    pub units: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl ReadTable {
    pub fn unit(&self, name: &str) -> Option<&str> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.units[i].as_str())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }
}

pub fn read_table(path: &Path) -> Result<ReadTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let csv_err = |e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let (names, units): (Vec<String>, Vec<String>) = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| match h.split_once(" [") {
            Some((n, u)) => (n.to_string(), u.trim_end_matches(']').to_string()),
            None => (h.to_string(), String::new()),
        })
        .unzip();
    let mut columns = vec![Vec::new(); names.len()];
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let v = field.parse::<f64>().map_err(|_| Error::Input {
                path: path.to_path_buf(),
                message: format!("data row {}: `{field}` is not a number", line + 1),
            })?;
            col.push(v);
        }
    }
    Ok(ReadTable {
        header,
        names,
        units,
        columns,
    })
}
