//! CSV and JSON serialization of samples.
//!
//! CSV holds grid samples only: the first line is `t,<t1>,...,<tM>` and each
//! following line is `<curve label>,<v1>,...,<vM>`. JSON holds either kind:
//!
//! ```text
//! {"kind": "grid" | "basis", "domain": [a, b],
//!  "grid": [...] | null, "values": [[...]] | null,
//!  "basis": {"kind", "n_basis", "order", "knots", "period"} | null,
//!  "coefficients": [[...]] | null,
//!  "names": {"dataset", "argument", "coordinate", "curves"}}
//! ```

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{FdaError, Result};
use crate::repr::{BasisKind, BasisSample, BasisSpec, Grid, GridSample, SampleNames};

/// Formats a float so that parsing it back gives the same bits.
pub fn format_f64(v: f64) -> String {
    let magnitude = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&magnitude) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn parse_error(row: usize, column: usize, message: impl Into<String>) -> FdaError {
    FdaError::Parse {
        row,
        column,
        message: message.into(),
    }
}

fn parse_number(field: &str, row: usize, column: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_error(row, column, format!("{field:?} is not a number")))
}

/// Parses CSV text. Rows and columns in errors are 1-based.
pub fn parse_csv(text: &str) -> Result<GridSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_error(1, 1, e.to_string()))?,
        None => return Err(parse_error(1, 1, "empty input")),
    };
    if header.len() < 2 {
        return Err(parse_error(1, 1, "header needs a label and at least one grid point"));
    }
    let points = header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(c, f)| parse_number(f, 1, c + 1))
        .collect::<Result<Vec<f64>>>()?;
    let width = header.len();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (k, record) in records.enumerate() {
        let row = k + 2;
        let record = record.map_err(|e| parse_error(row, 1, e.to_string()))?;
        if record.len() != width {
            return Err(parse_error(
                row,
                record.len().min(width) + 1,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        labels.push(record[0].to_string());
        rows.push(
            record
                .iter()
                .enumerate()
                .skip(1)
                .map(|(c, f)| parse_number(f, row, c + 1))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    if rows.is_empty() {
        return Err(parse_error(2, 1, "no data rows"));
    }
    let sample = GridSample::new(points, rows)?;
    let names = SampleNames {
        curves: labels,
        ..sample.names().clone()
    };
    sample.with_names(names)
}

pub fn to_csv_string(sample: &GridSample) -> String {
    let mut out = String::from("t");
    for t in sample.points() {
        out.push(',');
        out.push_str(&format_f64(*t));
    }
    out.push('\n');
    for (i, label) in sample.names().curves.iter().enumerate() {
        out.push_str(&csv_field(label));
        for v in sample.values().row(i).iter() {
            out.push(',');
            out.push_str(&format_f64(*v));
        }
        out.push('\n');
    }
    out
}

fn csv_field(label: &str) -> String {
    if label.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", label.replace('"', "\"\""))
    } else {
        label.to_string()
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<GridSample> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn write_csv(sample: &GridSample, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_csv_string(sample))?;
    Ok(())
}

/// A sample in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Grid(GridSample),
    Basis(BasisSample),
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        match self {
            Dataset::Grid(s) => s.n_samples(),
            Dataset::Basis(s) => s.n_samples(),
        }
    }

    pub fn names(&self) -> &SampleNames {
        match self {
            Dataset::Grid(s) => s.names(),
            Dataset::Basis(s) => s.names(),
        }
    }

    pub fn domain_range(&self) -> (f64, f64) {
        match self {
            Dataset::Grid(s) => s.domain_range(),
            Dataset::Basis(s) => s.domain_range(),
        }
    }

    /// The sample on a grid: itself for grid samples, otherwise evaluated on
    /// `points` (or 101 equally spaced points when `None`).
    pub fn to_grid(&self, points: Option<&[f64]>) -> Result<GridSample> {
        match self {
            Dataset::Grid(s) => match points {
                None => Ok(s.clone()),
                Some(p) => {
                    let values = s.evaluate(p)?;
                    GridSample::from_matrix(Grid::with_domain(p.to_vec(), s.domain_range())?, values)?
                        .with_names(s.names().clone())
                }
            },
            Dataset::Basis(s) => {
                let (a, b) = s.domain_range();
                let default = crate::repr::grid::linspace(a, b, 101);
                s.to_grid(points.unwrap_or(&default))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BasisDocument {
    kind: String,
    n_basis: usize,
    #[serde(default)]
    order: Option<usize>,
    #[serde(default)]
    knots: Option<Vec<f64>>,
    #[serde(default)]
    period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
struct NamesDocument {
    #[serde(default)]
    dataset: String,
    #[serde(default)]
    argument: String,
    #[serde(default)]
    coordinate: String,
    #[serde(default)]
    curves: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Document {
    kind: String,
    domain: [f64; 2],
    #[serde(default)]
    grid: Option<Vec<f64>>,
    #[serde(default)]
    values: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    basis: Option<BasisDocument>,
    #[serde(default)]
    coefficients: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    names: NamesDocument,
}

fn names_document(names: &SampleNames) -> NamesDocument {
    NamesDocument {
        dataset: names.dataset.clone(),
        argument: names.argument.clone(),
        coordinate: names.coordinate.clone(),
        curves: Some(names.curves.clone()),
    }
}

fn rows_of(matrix: &DMatrix<f64>) -> Vec<Vec<f64>> {
    matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix_of(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(FdaError::Schema(format!("{what} has no rows")));
    }
    let m = rows[0].len();
    if rows.iter().any(|r| r.len() != m) {
        return Err(FdaError::Schema(format!("{what} rows have different lengths")));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn document_of(dataset: &Dataset) -> Document {
    match dataset {
        Dataset::Grid(s) => {
            let (a, b) = s.domain_range();
            Document {
                kind: "grid".into(),
                domain: [a, b],
                grid: Some(s.points().to_vec()),
                values: Some(rows_of(s.values())),
                basis: None,
                coefficients: None,
                names: names_document(s.names()),
            }
        }
        Dataset::Basis(s) => {
            let (a, b) = s.domain_range();
            let spec = s.basis();
            let (order, knots, period) = match spec.kind() {
                BasisKind::BSpline { order, knots } => (Some(*order), Some(knots.clone()), None),
                BasisKind::Fourier { period } => (None, None, Some(*period)),
                _ => (None, None, None),
            };
            Document {
                kind: "basis".into(),
                domain: [a, b],
                grid: None,
                values: None,
                basis: Some(BasisDocument {
                    kind: spec.kind_name().into(),
                    n_basis: spec.n_basis(),
                    order,
                    knots,
                    period,
                }),
                coefficients: Some(rows_of(s.coefficients())),
                names: names_document(s.names()),
            }
        }
    }
}

fn basis_spec_of(doc: &BasisDocument, domain: (f64, f64)) -> Result<BasisSpec> {
    let kind = match doc.kind.as_str() {
        "constant" => BasisKind::Constant,
        "monomial" => BasisKind::Monomial,
        "bspline" => {
            let order = doc.order.unwrap_or(4);
            let knots = match &doc.knots {
                Some(k) => k.clone(),
                None => crate::repr::grid::linspace(domain.0, domain.1, (doc.n_basis + 2).saturating_sub(order).max(2)),
            };
            BasisKind::BSpline { order, knots }
        }
        "fourier" => BasisKind::Fourier {
            period: doc.period.unwrap_or(domain.1 - domain.0),
        },
        other => return Err(FdaError::Schema(format!("unknown basis kind {other:?}"))),
    };
    BasisSpec::new(kind, doc.n_basis, domain).map_err(|e| FdaError::Schema(e.to_string()))
}

fn names_of(doc: &NamesDocument, n: usize) -> Result<SampleNames> {
    let curves = match &doc.curves {
        Some(c) if c.len() != n => {
            return Err(FdaError::Schema(format!("{} curve names for {n} curves", c.len())))
        }
        Some(c) => c.clone(),
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    Ok(SampleNames {
        dataset: doc.dataset.clone(),
        argument: doc.argument.clone(),
        coordinate: doc.coordinate.clone(),
        curves,
    })
}

fn dataset_of(doc: Document) -> Result<Dataset> {
    let domain = (doc.domain[0], doc.domain[1]);
    match doc.kind.as_str() {
        "grid" => {
            if doc.basis.is_some() || doc.coefficients.is_some() {
                return Err(FdaError::Schema("grid datasets must not carry basis fields".into()));
            }
            let grid = doc.grid.ok_or_else(|| FdaError::Schema("missing grid".into()))?;
            let values = doc.values.ok_or_else(|| FdaError::Schema("missing values".into()))?;
            let values = matrix_of(&values, "values")?;
            let grid = Grid::with_domain(grid, domain)?;
            let sample = GridSample::from_matrix(grid, values)?;
            let names = names_of(&doc.names, sample.n_samples())?;
            Ok(Dataset::Grid(sample.with_names(names)?))
        }
        "basis" => {
            if doc.grid.is_some() || doc.values.is_some() {
                return Err(FdaError::Schema("basis datasets must not carry grid fields".into()));
            }
            let basis = doc.basis.ok_or_else(|| FdaError::Schema("missing basis".into()))?;
            let coefficients = doc
                .coefficients
                .ok_or_else(|| FdaError::Schema("missing coefficients".into()))?;
            let spec = basis_spec_of(&basis, domain)?;
            let sample = BasisSample::new(spec, matrix_of(&coefficients, "coefficients")?)?;
            let names = names_of(&doc.names, sample.n_samples())?;
            Ok(Dataset::Basis(sample.with_names(names)?))
        }
        other => Err(FdaError::Schema(format!("unknown dataset kind {other:?}"))),
    }
}

pub fn to_json_value(dataset: &Dataset) -> serde_json::Value {
    serde_json::to_value(document_of(dataset)).expect("documents serialize")
}

pub fn from_json_value(value: serde_json::Value) -> Result<Dataset> {
    let doc: Document = serde_json::from_value(value).map_err(|e| FdaError::Schema(e.to_string()))?;
    dataset_of(doc)
}

pub fn to_json_string(dataset: &Dataset) -> String {
    serde_json::to_string(&document_of(dataset)).expect("documents serialize")
}

pub fn parse_json(text: &str) -> Result<Dataset> {
    let doc: Document = serde_json::from_str(text).map_err(|e| FdaError::Schema(e.to_string()))?;
    dataset_of(doc)
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_json(&fs::read_to_string(path)?)
}

pub fn write_json(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json_string(dataset))?;
    Ok(())
}

/// Reads CSV or JSON, chosen by the file extension (JSON for `.json`).
pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        read_json(path)
    } else {
        read_csv(path).map(Dataset::Grid)
    }
}
