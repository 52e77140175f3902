//! Tabular export to CSV or JSON.
//!
//! Complex cells become two CSV columns `name_re,name_im` and a
//! `{"re": .., "im": ..}` object in JSON. CSV numbers carry 17 significant
//! digits, enough to round-trip any f64.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::api::ClassicalResponse;
use crate::error::{Error, Result};
use crate::retardation::{Analysis, RetardationReport, SweepAxis, SweepPoint};
use crate::scattering::ScatteringSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Invariant {
                invariant: "format",
                message: format!("unknown export format `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Real,
    Complex,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Complex(Complex64),
    Text(String),
    Missing,
}

impl Cell {
    fn kind(&self) -> Option<ColumnKind> {
        match self {
            Cell::Real(_) => Some(ColumnKind::Real),
            Cell::Complex(_) => Some(ColumnKind::Complex),
            Cell::Text(_) => Some(ColumnKind::Text),
            Cell::Missing => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

/// Rectangular table of typed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportTable {
    columns: Vec<(String, ColumnKind)>,
    rows: Vec<Vec<Cell>>,
}

pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl ExportTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = (S, ColumnKind)>) -> Self {
        Self {
            columns: columns.into_iter().map(|(n, k)| (n.into(), k)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[(String, ColumnKind)] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        for (cell, (name, kind)) in row.iter().zip(&self.columns) {
            if let Some(k) = cell.kind() {
                if k != *kind {
                    return Err(Error::Invariant {
                        invariant: "export.column_kind",
                        message: format!("column `{name}` expects {kind:?}, got {k:?}"),
                    });
                }
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = self
            .columns
            .iter()
            .flat_map(|(name, kind)| match kind {
                ColumnKind::Complex => vec![format!("{name}_re"), format!("{name}_im")],
                _ => vec![name.clone()],
            })
            .collect();
        out.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let mut record = Vec::with_capacity(header.len());
            for (cell, (_, kind)) in row.iter().zip(&self.columns) {
                match cell {
                    Cell::Real(v) => record.push(format_real(*v)),
                    Cell::Complex(z) => {
                        record.push(format_real(z.re));
                        record.push(format_real(z.im));
                    }
                    Cell::Text(s) => record.push(s.clone()),
                    Cell::Missing => {
                        record.push(String::new());
                        if *kind == ColumnKind::Complex {
                            record.push(String::new());
                        }
                    }
                }
            }
            out.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("flush")).expect("utf-8 csv")
    }

    pub fn to_json(&self) -> Value {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|(name, kind)| {
                let kind = match kind {
                    ColumnKind::Real => "real",
                    ColumnKind::Complex => "complex",
                    ColumnKind::Text => "text",
                };
                json!({ "name": name, "kind": kind })
            })
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|cell| match cell {
                            Cell::Real(v) => json!(v),
                            Cell::Complex(z) => json!({ "re": z.re, "im": z.im }),
                            Cell::Text(s) => json!(s),
                            Cell::Missing => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "columns": columns, "rows": rows })
    }

    pub fn render(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Csv => self.to_csv(),
            ExportFormat::Json => self.to_json().to_string() + "\n",
        }
    }
}

/// Per-k coefficients, amplitudes and residuals.
pub fn coef_table(solutions: &[impl AsRef<ScatteringSolution>]) -> ExportTable {
    let n = solutions.first().map_or(0, |s| s.as_ref().coefs.len());
    let mut columns = vec![
        ("k".to_string(), ColumnKind::Real),
        ("R".to_string(), ColumnKind::Complex),
        ("T".to_string(), ColumnKind::Complex),
        ("abs_R2".to_string(), ColumnKind::Real),
        ("abs_T2".to_string(), ColumnKind::Real),
        ("residual".to_string(), ColumnKind::Real),
    ];
    columns.extend((0..n).map(|a| (format!("coef_{a}"), ColumnKind::Complex)));
    let mut table = ExportTable::new(columns);
    for s in solutions {
        let s = s.as_ref();
        let mut row = vec![
            Cell::Real(s.k),
            Cell::Complex(s.reflection),
            Cell::Complex(s.transmission),
            Cell::Real(s.abs_r2()),
            Cell::Real(s.abs_t2()),
            Cell::Real(s.residual),
        ];
        row.extend(s.coefs.iter().map(|&c| Cell::Complex(c)));
        table.push_row(row).expect("coef rows are rectangular");
    }
    table
}

pub fn field_table(analysis: &Analysis) -> ExportTable {
    density_table(
        &analysis.free.grid.points(),
        &analysis.free.values,
        &analysis.nonfree.values,
    )
    .expect("analysis densities share one grid")
}

/// Free and non-free densities side by side, one row per grid point.
pub fn density_table(x: &[f64], free: &[f64], nonfree: &[f64]) -> Result<ExportTable> {
    let mut table = ExportTable::new([
        ("x", ColumnKind::Real),
        ("free_density", ColumnKind::Real),
        ("nonfree_density", ColumnKind::Real),
    ]);
    if free.len() != x.len() || nonfree.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: free.len().min(nonfree.len()),
        });
    }
    for i in 0..x.len() {
        table.push_row(vec![
            Cell::Real(x[i]),
            Cell::Real(free[i]),
            Cell::Real(nonfree[i]),
        ])?;
    }
    Ok(table)
}

const REPORT_COLUMNS: [&str; 7] = [
    "corr_lag",
    "phase_delay",
    "fwhm",
    "scatterer_span",
    "mean_spacing",
    "peak_prominence",
    "detected",
];

fn report_cells(r: Option<&RetardationReport>) -> Vec<Cell> {
    match r {
        Some(r) => vec![
            Cell::Real(r.corr_lag),
            Cell::Real(r.phase_delay),
            r.fwhm.into(),
            Cell::Real(r.scatterer_span),
            Cell::Real(r.mean_spacing),
            Cell::Real(r.peak_prominence),
            Cell::Real(if r.detected { 1.0 } else { 0.0 }),
        ],
        None => vec![Cell::Missing; REPORT_COLUMNS.len()],
    }
}

pub fn report_table(report: &RetardationReport) -> ExportTable {
    let mut table = ExportTable::new(REPORT_COLUMNS.map(|c| (c, ColumnKind::Real)));
    table
        .push_row(report_cells(Some(report)))
        .expect("report row is rectangular");
    table
}

pub fn sweep_table(axis: SweepAxis, points: &[SweepPoint]) -> ExportTable {
    let mut columns = vec![(axis.name(), ColumnKind::Real)];
    columns.extend(REPORT_COLUMNS.map(|c| (c, ColumnKind::Real)));
    columns.push(("error", ColumnKind::Text));
    let mut table = ExportTable::new(columns);
    for p in points {
        let mut row = vec![Cell::Real(p.value)];
        row.extend(report_cells(p.report.as_ref()));
        row.push(p.error.clone().map_or(Cell::Missing, Cell::Text));
        table.push_row(row).expect("sweep rows are rectangular");
    }
    table
}

pub fn classical_table(result: &ClassicalResponse) -> ExportTable {
    let mut table = ExportTable::new([
        ("traversal_time", ColumnKind::Real),
        ("free_time", ColumnKind::Real),
        ("retardation", ColumnKind::Real),
    ]);
    table
        .push_row(vec![
            Cell::Real(result.traversal_time),
            Cell::Real(result.free_time),
            Cell::Real(result.retardation),
        ])
        .expect("classical row is rectangular");
    table
}
