//! CSV and Markdown serialization of reports and grid dumps.
//!
//! Errors print as `{:.3e}` and orders as `{:.4}`, the published table
//! format. Grid dumps use shortest round-trip decimals so nothing is lost.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::analysis::{ConvergenceReport, ReportRow};
use crate::error::{Error, Result};
use crate::tables::TableReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Md,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(Error::Validation(format!("unknown format '{other}' (expected csv or md)"))),
        }
    }
}

/// One row of a `solve` dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub t: f64,
    pub u: f64,
    pub y_recovered: f64,
    /// Absent when no closed form is available for the problem.
    pub y_exact: Option<f64>,
    pub error: Option<f64>,
}

pub fn fmt_error(e: f64) -> String {
    format!("{e:.3e}")
}

pub fn fmt_order(o: Option<f64>) -> String {
    o.map(|o| format!("{o:.4}")).unwrap_or_default()
}

fn emit(header: Vec<String>, rows: Vec<Vec<String>>, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
            w.write_record(&header).map_err(io_err)?;
            for r in &rows {
                w.write_record(r).map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Validation(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Validation(e.to_string()))
        }
        Format::Md => {
            let mut s = String::new();
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            s.push_str(&line(&header));
            s.push_str(&line(&vec!["---".to_string(); header.len()]));
            for r in &rows {
                s.push_str(&line(r));
            }
            Ok(s)
        }
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Validation(format!("csv output failed: {e}"))
}

/// A published-style table: one h column, then an Error/Order pair per
/// parameter set. Only rows with an order estimate are printed.
pub fn render_table(report: &TableReport, format: Format) -> Result<String> {
    let mut header = vec!["h".to_string()];
    for c in &report.spec.columns {
        let label = c.label();
        header.push(format!("{label} error"));
        header.push(format!("{label} order"));
    }
    let printed: Vec<Vec<&ReportRow>> = report.columns.iter().map(|c| c.ordered_rows().collect()).collect();
    let n_rows = printed.first().map_or(0, Vec::len);
    let rows = (0..n_rows)
        .map(|i| {
            let mut r = vec![printed[0][i].h.to_string()];
            for col in &printed {
                r.push(fmt_error(col[i].max_error));
                r.push(fmt_order(col[i].observed_order));
            }
            r
        })
        .collect();
    let body = emit(header, rows, format)?;
    Ok(match format {
        Format::Csv => body,
        Format::Md => format!("Table {}: {}\n\n{body}", report.spec.id, report.spec.title),
    })
}

/// A single study, every ladder level included.
pub fn render_report(report: &ConvergenceReport, format: Format) -> Result<String> {
    let header = ["h", "error", "order"].map(String::from).to_vec();
    let rows = report
        .rows
        .iter()
        .map(|r| vec![r.h.to_string(), fmt_error(r.max_error), fmt_order(r.observed_order)])
        .collect();
    let body = emit(header, rows, format)?;
    Ok(match format {
        Format::Csv => body,
        Format::Md => {
            let mut title = format!("{}({}) {}", report.solver, report.scheme.tag(), report.problem);
            if let Some(m) = report.m {
                let _ = write!(title, " m={m}");
            }
            let _ = write!(title, ", expected order {:.4}", report.theoretical_order);
            format!("{title}\n\n{body}")
        }
    })
}

pub fn render_grid(rows: &[GridRow], format: Format) -> Result<String> {
    let header = ["t", "u", "y_recovered", "y_exact", "error"].map(String::from).to_vec();
    let body = rows
        .iter()
        .map(|r| {
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            vec![r.t.to_string(), r.u.to_string(), r.y_recovered.to_string(), opt(r.y_exact), opt(r.error)]
        })
        .collect();
    emit(header, body, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(fmt_error(0.03344), "3.344e-2");
        assert_eq!(fmt_error(0.8051e-4), "8.051e-5");
        assert_eq!(fmt_order(Some(1.96476)), "1.9648");
        assert_eq!(fmt_order(None), "");
    }

    #[test]
    fn grid_csv_and_md() {
        let rows = [
            GridRow { t: 0.0, u: 0.0, y_recovered: 1.0, y_exact: Some(1.0), error: Some(0.0) },
            GridRow { t: 0.5, u: 0.25, y_recovered: 1.5, y_exact: None, error: None },
        ];
        let csv = render_grid(&rows, Format::Csv).unwrap();
        assert_eq!(csv, "t,u,y_recovered,y_exact,error\n0,0,1,1,0\n0.5,0.25,1.5,,\n");
        let md = render_grid(&rows, Format::Md).unwrap();
        assert_eq!(md, "| t | u | y_recovered | y_exact | error |\n| --- | --- | --- | --- | --- |\n| 0 | 0 | 1 | 1 | 0 |\n| 0.5 | 0.25 | 1.5 |  |  |\n");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!("md".parse::<Format>().unwrap(), Format::Md);
        assert!("tsv".parse::<Format>().is_err());
    }
}
