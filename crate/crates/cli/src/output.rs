//! CSV, JSON and gnuplot emission.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{OutputFormat, RunConfig, FORMAT_VERSION};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Empty,
}

/// Shortest decimal string that parses back to `x`.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(x) => json!(x),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn write_csv<W: Write>(mut out: W, config: &RunConfig, table: &Table) -> io::Result<()> {
    writeln!(out, "# format: {FORMAT_VERSION}")?;
    writeln!(out, "# config: {}", config.to_json())?;
    writeln!(out, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn to_json(config: &RunConfig, table: &Table) -> String {
    let mut columns = Map::new();
    for (j, name) in table.columns.iter().enumerate() {
        let values: Vec<Value> = table.rows.iter().map(|r| r[j].json()).collect();
        columns.insert(name.to_string(), Value::Array(values));
    }
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "config": config,
        "columns": Value::Object(columns),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
    s.push('\n');
    s
}

/// A gnuplot script over the CSV columns.
#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub xlabel: &'static str,
    pub ylabel: String,
    /// `(1-based column, legend, style)`; the x axis is column 1.
    pub series: Vec<(usize, &'static str, &'static str)>,
}

impl Plot {
    pub fn script(&self, csv_name: &str, image_name: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!("# {FORMAT_VERSION} plot script; run from the directory holding {csv_name}\n"));
        s.push_str("set datafile separator \",\"\n");
        s.push_str("set key autotitle columnhead\n");
        s.push_str("set terminal svg size 900,600\n");
        s.push_str(&format!("set output \"{image_name}\"\n"));
        s.push_str(&format!("set title \"{}\"\n", self.title));
        s.push_str(&format!("set xlabel \"{}\"\n", self.xlabel));
        s.push_str(&format!("set ylabel \"{}\"\n", self.ylabel));
        s.push_str("set grid\n");
        let parts: Vec<String> = self
            .series
            .iter()
            .map(|(col, legend, style)| format!("\"{csv_name}\" using 1:{col} with {style} title \"{legend}\""))
            .collect();
        s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
        s
    }
}

/// Writes the table to `config.output` (or stdout) in the configured format,
/// plus a sibling `.gp` script when a CSV file is written.
pub fn emit(config: &RunConfig, table: &Table, plot: Option<&Plot>) -> Result<(), CliError> {
    let io_err = |path: &Path, e: io::Error| CliError::usage(format!("cannot write {}: {e}", path.display()));
    match (&config.output, config.format) {
        (None, OutputFormat::Csv) => {
            let stdout = io::stdout();
            write_csv(stdout.lock(), config, table).map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
        (None, OutputFormat::Json) => {
            print!("{}", to_json(config, table));
            Ok(())
        }
        (Some(path), OutputFormat::Json) => fs::write(path, to_json(config, table)).map_err(|e| io_err(path, e)),
        (Some(path), OutputFormat::Csv) => {
            let mut buf = Vec::new();
            write_csv(&mut buf, config, table).expect("writing to memory");
            fs::write(path, buf).map_err(|e| io_err(path, e))?;
            if let Some(plot) = plot {
                let csv_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let image = path.with_extension("svg");
                let image_name = image.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let gp = path.with_extension("gp");
                fs::write(&gp, plot.script(&csv_name, &image_name)).map_err(|e| io_err(&gp, e))?;
            }
            Ok(())
        }
    }
}

/// Data rows of a CSV results file, without the comment lines.
pub fn csv_data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Subcommand;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0, 0.0, 1e-300, 2.5e20, 0.07996928, 1.0 / 3.0, -4.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(1e-300), "1e-300");
    }

    #[test]
    fn csv_and_json_layout() {
        let config = RunConfig::new(Subcommand::Oracle);
        let mut t = Table::new(&["r", "n", "p"]);
        t.push(vec![Cell::Num(0.1), Cell::Int(5), Cell::Empty]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &config, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(csv_data_lines(&text), vec!["r,n,p", "0.1,5,"]);
        assert!(text.starts_with("# format: betti-curves/1\n# config: {"));
        let v: Value = serde_json::from_str(&to_json(&config, &t)).unwrap();
        assert_eq!(v["columns"]["n"], json!([5]));
        assert_eq!(v["columns"]["p"], json!([null]));
        assert_eq!(v["format_version"], json!(FORMAT_VERSION));
    }

    #[test]
    fn plot_script_reads_csv_header() {
        let p = Plot {
            title: "x".into(),
            xlabel: "t",
            ylabel: "b1".into(),
            series: vec![(4, "mean", "lines"), (7, "oracle", "lines")],
        };
        let s = p.script("a.csv", "a.svg");
        assert!(s.contains("set datafile separator \",\""));
        assert!(s.contains("set key autotitle columnhead"));
        assert!(s.contains("\"a.csv\" using 1:7"));
    }
}
