use nalgebra::DMatrix;

use super::basis::BasisSpec;
use super::bspline;
use super::grid::Grid;
use crate::error::{FdaError, Result};

/// How values between grid points are reconstructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    /// Interpolating spline of the given polynomial degree (2 to 5).
    Spline { degree: usize },
}

/// How values outside the domain are produced.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Extrapolation {
    /// Clamp the argument to the nearest domain bound.
    #[default]
    BoundaryConstant,
    FixedValue(f64),
    /// Wrap the argument by the domain length.
    Periodic,
    Error,
    /// Evaluate the basis formulas directly. Basis samples only.
    BasisExtension,
}

/// Descriptive labels carried along with a sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleNames {
    pub dataset: String,
    pub argument: String,
    pub coordinate: String,
    /// One label per curve.
    pub curves: Vec<String>,
}

impl SampleNames {
    fn numbered(n: usize) -> Self {
        Self {
            curves: (0..n).map(|i| i.to_string()).collect(),
            ..Default::default()
        }
    }
}

/// Where a query ends up after extrapolation rules are applied.
enum Resolved {
    At(f64),
    Value(f64),
}

fn resolve(extrapolation: Extrapolation, domain: (f64, f64), t: f64) -> Result<Resolved> {
    let (a, b) = domain;
    if !t.is_finite() {
        return Err(FdaError::InvalidParameter(format!("query point {t} is not finite")));
    }
    if (a..=b).contains(&t) {
        return Ok(Resolved::At(t));
    }
    match extrapolation {
        Extrapolation::BoundaryConstant => Ok(Resolved::At(t.clamp(a, b))),
        Extrapolation::FixedValue(v) => Ok(Resolved::Value(v)),
        Extrapolation::Periodic => {
            let length = b - a;
            let wrapped = a + (t - a).rem_euclid(length);
            // rem_euclid may round up to the full period
            Ok(Resolved::At(if wrapped >= b { a } else { wrapped }))
        }
        Extrapolation::Error => Err(FdaError::OutsideDomain {
            point: t,
            lower: a,
            upper: b,
        }),
        Extrapolation::BasisExtension => Ok(Resolved::At(t)),
    }
}

/// Per-curve evaluator built once from a grid sample.
pub(crate) enum Interpolator<'a> {
    Linear {
        grid: &'a Grid,
        values: &'a DMatrix<f64>,
    },
    Spline {
        grid: &'a Grid,
        values: &'a DMatrix<f64>,
        knots: Vec<f64>,
        order: usize,
        coefficients: DMatrix<f64>,
    },
}

impl<'a> Interpolator<'a> {
    fn new(sample: &'a GridSample) -> Result<Self> {
        let grid = &sample.grid;
        let values = &sample.values;
        match sample.interpolation {
            Interpolation::Linear => Ok(Interpolator::Linear { grid, values }),
            Interpolation::Spline { degree } => {
                let order = degree + 1;
                let knots = bspline::interpolation_knot_vector(grid.points(), order);
                let m = grid.len();
                let mut collocation = DMatrix::zeros(m, m);
                for (r, &t) in grid.points().iter().enumerate() {
                    for (c, v) in bspline::basis_values(&knots, order, t).into_iter().enumerate() {
                        collocation[(r, c)] = v;
                    }
                }
                let lu = collocation.lu();
                // coefficients: n x M, solve collocation * c^T = values^T
                let solved = lu
                    .solve(&values.transpose())
                    .ok_or(FdaError::SingularSystem)?;
                Ok(Interpolator::Spline {
                    grid,
                    values,
                    knots,
                    order,
                    coefficients: solved.transpose(),
                })
            }
        }
    }

    /// Curve `i` at arbitrary points, with `extrapolation` outside `domain`.
    pub(crate) fn curve_at(
        &self,
        i: usize,
        points: &[f64],
        extrapolation: Extrapolation,
        domain: (f64, f64),
    ) -> Result<Vec<f64>> {
        points
            .iter()
            .map(|&t| {
                Ok(match resolve(extrapolation, domain, t)? {
                    Resolved::At(t) => self.value(i, t),
                    Resolved::Value(v) => v,
                })
            })
            .collect()
    }

    /// Value of curve `i` at a point inside the grid span.
    pub(crate) fn value(&self, i: usize, t: f64) -> f64 {
        match self {
            Interpolator::Linear { grid, values } => {
                let pts = grid.points();
                let m = pts.len();
                let t = t.clamp(pts[0], pts[m - 1]);
                if t == pts[m - 1] {
                    return values[(i, m - 1)];
                }
                let j = pts.partition_point(|p| *p <= t).saturating_sub(1).min(m - 2);
                let (t0, t1) = (pts[j], pts[j + 1]);
                let (v0, v1) = (values[(i, j)], values[(i, j + 1)]);
                v0 + (t - t0) * (v1 - v0) / (t1 - t0)
            }
            Interpolator::Spline {
                grid,
                values,
                knots,
                order,
                coefficients,
            } => {
                let t = t.clamp(grid.first(), grid.last());
                if let Some(j) = grid.index_of(t) {
                    return values[(i, j)];
                }
                bspline::basis_values(knots, *order, t)
                    .iter()
                    .zip(coefficients.row(i).iter())
                    .map(|(b, c)| b * c)
                    .sum()
            }
        }
    }
}

/// `n` curves observed on a common grid (`n x M` values).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    grid: Grid,
    values: DMatrix<f64>,
    names: SampleNames,
    interpolation: Interpolation,
    extrapolation: Extrapolation,
}

impl GridSample {
    /// Builds a sample from grid points and one row of values per curve,
    /// with linear interpolation and boundary-constant extrapolation.
    pub fn new(points: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let grid = Grid::new(points)?;
        let m = grid.len();
        if rows.is_empty() {
            return Err(FdaError::ShapeMismatch("sample needs at least one curve".into()));
        }
        let mut values = DMatrix::zeros(rows.len(), m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(FdaError::ShapeMismatch(format!(
                    "curve {i} has {} values but the grid has {m} points",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                values[(i, j)] = *v;
            }
        }
        Self::from_matrix(grid, values)
    }

    pub fn from_matrix(grid: Grid, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 {
            return Err(FdaError::ShapeMismatch("sample needs at least one curve".into()));
        }
        if values.ncols() != grid.len() {
            return Err(FdaError::ShapeMismatch(format!(
                "values have {} columns but the grid has {} points",
                values.ncols(),
                grid.len()
            )));
        }
        for i in 0..values.nrows() {
            for j in 0..values.ncols() {
                if !values[(i, j)].is_finite() {
                    return Err(FdaError::NonFiniteValue { row: i, column: j });
                }
            }
        }
        let n = values.nrows();
        Ok(Self {
            grid,
            values,
            names: SampleNames::numbered(n),
            interpolation: Interpolation::Linear,
            extrapolation: Extrapolation::BoundaryConstant,
        })
    }

    pub fn with_names(mut self, names: SampleNames) -> Result<Self> {
        if names.curves.len() != self.n_samples() {
            return Err(FdaError::ShapeMismatch(format!(
                "{} curve labels for {} curves",
                names.curves.len(),
                self.n_samples()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Result<Self> {
        if let Interpolation::Spline { degree } = interpolation {
            if !(2..=5).contains(&degree) {
                return Err(FdaError::InvalidParameter(format!(
                    "spline interpolation degree must be in 2..=5, got {degree}"
                )));
            }
            if self.grid.len() < degree + 1 {
                return Err(FdaError::InsufficientPoints {
                    required: degree + 1,
                    available: self.grid.len(),
                });
            }
        }
        self.interpolation = interpolation;
        Ok(self)
    }

    pub fn with_extrapolation(mut self, extrapolation: Extrapolation) -> Result<Self> {
        check_grid_extrapolation(extrapolation)?;
        self.extrapolation = extrapolation;
        Ok(self)
    }

    /// Same metadata and grid, new values.
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Self> {
        let mut out = Self::from_matrix(self.grid.clone(), values)?;
        out.interpolation = self.interpolation;
        out.extrapolation = self.extrapolation;
        if out.n_samples() == self.n_samples() {
            out.names = self.names.clone();
        } else {
            out.names = SampleNames {
                curves: out.names.curves,
                ..self.names.clone()
            };
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn points(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn names(&self) -> &SampleNames {
        &self.names
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_points(&self) -> usize {
        self.values.ncols()
    }

    pub fn domain_range(&self) -> (f64, f64) {
        self.grid.domain_range()
    }

    pub fn curve(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    /// Sub-sample holding the given curves, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let m = self.n_points();
        let mut values = DMatrix::zeros(indices.len(), m);
        for (r, &i) in indices.iter().enumerate() {
            if i >= self.n_samples() {
                return Err(FdaError::InvalidParameter(format!("curve index {i} out of range")));
            }
            values.set_row(r, &self.values.row(i));
        }
        let mut out = self.with_values(values)?;
        out.names.curves = indices.iter().map(|&i| self.names.curves[i].clone()).collect();
        Ok(out)
    }

    pub(crate) fn interpolator(&self) -> Result<Interpolator<'_>> {
        Interpolator::new(self)
    }

    /// `n x m` values at the query points using the sample's own
    /// extrapolation rule.
    pub fn evaluate(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        self.evaluate_with(points, self.extrapolation)
    }

    pub fn evaluate_with(&self, points: &[f64], extrapolation: Extrapolation) -> Result<DMatrix<f64>> {
        check_grid_extrapolation(extrapolation)?;
        let interp = self.interpolator()?;
        let domain = self.domain_range();
        let mut out = DMatrix::zeros(self.n_samples(), points.len());
        for (j, &t) in points.iter().enumerate() {
            match resolve(extrapolation, domain, t)? {
                Resolved::At(t) => {
                    for i in 0..self.n_samples() {
                        out[(i, j)] = interp.value(i, t);
                    }
                }
                Resolved::Value(v) => out.column_mut(j).fill(v),
            }
        }
        Ok(out)
    }

    /// Evaluates curve `i` of the sample at `points[i][..]`; each curve gets
    /// its own query points (used for shifts and warps).
    pub fn evaluate_per_curve(
        &self,
        points: &[Vec<f64>],
        extrapolation: Extrapolation,
    ) -> Result<DMatrix<f64>> {
        check_grid_extrapolation(extrapolation)?;
        if points.len() != self.n_samples() {
            return Err(FdaError::ShapeMismatch(format!(
                "{} query rows for {} curves",
                points.len(),
                self.n_samples()
            )));
        }
        let m = points.first().map_or(0, Vec::len);
        let interp = self.interpolator()?;
        let domain = self.domain_range();
        let mut out = DMatrix::zeros(self.n_samples(), m);
        for (i, row) in points.iter().enumerate() {
            if row.len() != m {
                return Err(FdaError::ShapeMismatch("ragged query rows".into()));
            }
            for (j, v) in interp.curve_at(i, row, extrapolation, domain)?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Derivative of the given order by finite differences: central in the
    /// interior, one-sided three-point stencils at the ends.
    pub fn derivative(&self, order: usize) -> Result<Self> {
        if order == 0 {
            return Ok(self.clone());
        }
        if self.n_points() < order + 1 {
            return Err(FdaError::InsufficientPoints {
                required: order + 1,
                available: self.n_points(),
            });
        }
        let pts = self.points();
        let mut values = self.values.clone();
        for _ in 0..order {
            let mut next = DMatrix::zeros(values.nrows(), values.ncols());
            for i in 0..values.nrows() {
                let row: Vec<f64> = values.row(i).iter().copied().collect();
                for (j, d) in differentiate(pts, &row).into_iter().enumerate() {
                    next[(i, j)] = d;
                }
            }
            values = next;
        }
        self.with_values(values)
    }
}

pub(crate) fn check_grid_extrapolation(extrapolation: Extrapolation) -> Result<()> {
    match extrapolation {
        Extrapolation::BasisExtension => Err(FdaError::InvalidParameter(
            "basis extension extrapolation requires a basis sample".into(),
        )),
        Extrapolation::FixedValue(v) if !v.is_finite() => Err(FdaError::InvalidParameter(
            "fixed extrapolation value must be finite".into(),
        )),
        _ => Ok(()),
    }
}

/// First derivative of one discretized curve.
pub(crate) fn differentiate(t: &[f64], v: &[f64]) -> Vec<f64> {
    let m = t.len();
    if m == 2 {
        let d = (v[1] - v[0]) / (t[1] - t[0]);
        return vec![d, d];
    }
    let mut out = vec![0.0; m];
    for i in 1..m - 1 {
        let h1 = t[i] - t[i - 1];
        let h2 = t[i + 1] - t[i];
        out[i] = (h1 * h1 * (v[i + 1] - v[i]) + h2 * h2 * (v[i] - v[i - 1]))
            / (h1 * h2 * (h1 + h2));
    }
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    out[0] = ((h1 + h2) * (h1 + h2) * (v[1] - v[0]) - h1 * h1 * (v[2] - v[0]))
        / (h1 * h2 * (h1 + h2));
    let (h1, h2) = (t[m - 2] - t[m - 3], t[m - 1] - t[m - 2]);
    out[m - 1] = ((h1 + h2) * (h1 + h2) * (v[m - 1] - v[m - 2])
        - h2 * h2 * (v[m - 1] - v[m - 3]))
        / (h1 * h2 * (h1 + h2));
    out
}

/// `n` curves given by coefficient rows over a common basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSample {
    basis: BasisSpec,
    coefficients: DMatrix<f64>,
    names: SampleNames,
    extrapolation: Extrapolation,
}

impl BasisSample {
    pub fn new(basis: BasisSpec, coefficients: DMatrix<f64>) -> Result<Self> {
        if coefficients.nrows() == 0 {
            return Err(FdaError::ShapeMismatch("sample needs at least one curve".into()));
        }
        if coefficients.ncols() != basis.n_basis() {
            return Err(FdaError::ShapeMismatch(format!(
                "coefficient rows have length {} but the basis has {} elements",
                coefficients.ncols(),
                basis.n_basis()
            )));
        }
        for i in 0..coefficients.nrows() {
            for j in 0..coefficients.ncols() {
                if !coefficients[(i, j)].is_finite() {
                    return Err(FdaError::NonFiniteValue { row: i, column: j });
                }
            }
        }
        let n = coefficients.nrows();
        Ok(Self {
            basis,
            coefficients,
            names: SampleNames::numbered(n),
            extrapolation: Extrapolation::BasisExtension,
        })
    }

    pub fn with_names(mut self, names: SampleNames) -> Result<Self> {
        if names.curves.len() != self.n_samples() {
            return Err(FdaError::ShapeMismatch(format!(
                "{} curve labels for {} curves",
                names.curves.len(),
                self.n_samples()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn with_extrapolation(mut self, extrapolation: Extrapolation) -> Self {
        self.extrapolation = extrapolation;
        self
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn names(&self) -> &SampleNames {
        &self.names
    }

    pub fn extrapolation(&self) -> Extrapolation {
        self.extrapolation
    }

    pub fn n_samples(&self) -> usize {
        self.coefficients.nrows()
    }

    pub fn domain_range(&self) -> (f64, f64) {
        self.basis.domain_range()
    }

    pub fn evaluate(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        self.evaluate_with(points, self.extrapolation)
    }

    pub fn evaluate_with(&self, points: &[f64], extrapolation: Extrapolation) -> Result<DMatrix<f64>> {
        let domain = self.domain_range();
        let mut resolved = Vec::with_capacity(points.len());
        let mut fixed = Vec::new();
        for (j, &t) in points.iter().enumerate() {
            match resolve(extrapolation, domain, t)? {
                Resolved::At(t) => resolved.push(t),
                Resolved::Value(v) => {
                    resolved.push(domain.0);
                    fixed.push((j, v));
                }
            }
        }
        let mut out = &self.coefficients * self.basis.evaluate(&resolved);
        for (j, v) in fixed {
            out.column_mut(j).fill(v);
        }
        Ok(out)
    }

    /// Synthesizes the expansions on a grid.
    pub fn to_grid(&self, points: &[f64]) -> Result<GridSample> {
        let values = self.evaluate(points)?;
        let grid = Grid::new(points.to_vec())?;
        let extrapolation = match self.extrapolation {
            Extrapolation::BasisExtension => Extrapolation::BoundaryConstant,
            other => other,
        };
        let out = GridSample::from_matrix(grid, values)?
            .with_names(self.names.clone())?
            .with_extrapolation(extrapolation)?;
        Ok(out)
    }

    /// Exact derivative expressed in the derived basis.
    pub fn derivative(&self, order: usize) -> Result<Self> {
        let mut basis = self.basis.clone();
        let mut coefficients = self.coefficients.clone();
        for _ in 0..order {
            let (next, map) = basis.derivative_map();
            coefficients *= map;
            basis = next;
        }
        Ok(Self {
            basis,
            coefficients,
            names: self.names.clone(),
            extrapolation: self.extrapolation,
        })
    }
}

/// Operations shared by both representations.
pub trait FunctionalData: Sized {
    fn n_samples(&self) -> usize;
    fn domain_range(&self) -> (f64, f64);
    fn evaluate(&self, points: &[f64]) -> Result<DMatrix<f64>>;
    fn derivative(&self, order: usize) -> Result<Self>;
    /// `a * f + b * g`; `g` may hold one curve, broadcast to every curve of `f`.
    fn linear_combine(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self>;
}

fn combine_matrices(a: f64, f: &DMatrix<f64>, b: f64, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if f.ncols() != g.ncols() {
        return Err(FdaError::ShapeMismatch("column counts differ".into()));
    }
    if g.nrows() == f.nrows() {
        Ok(f * a + g * b)
    } else if g.nrows() == 1 {
        let mut out = f * a;
        for mut row in out.row_iter_mut() {
            row.zip_apply(&g.row(0), |x, y| *x += b * y);
        }
        Ok(out)
    } else {
        Err(FdaError::ShapeMismatch(format!(
            "cannot combine {} curves with {} curves",
            f.nrows(),
            g.nrows()
        )))
    }
}

impl FunctionalData for GridSample {
    fn n_samples(&self) -> usize {
        GridSample::n_samples(self)
    }

    fn domain_range(&self) -> (f64, f64) {
        GridSample::domain_range(self)
    }

    fn evaluate(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        GridSample::evaluate(self, points)
    }

    fn derivative(&self, order: usize) -> Result<Self> {
        GridSample::derivative(self, order)
    }

    fn linear_combine(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self> {
        if !f.grid.same_as(&g.grid) {
            return Err(FdaError::GridMismatch);
        }
        f.with_values(combine_matrices(a, &f.values, b, &g.values)?)
    }
}

impl FunctionalData for BasisSample {
    fn n_samples(&self) -> usize {
        BasisSample::n_samples(self)
    }

    fn domain_range(&self) -> (f64, f64) {
        BasisSample::domain_range(self)
    }

    fn evaluate(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        BasisSample::evaluate(self, points)
    }

    fn derivative(&self, order: usize) -> Result<Self> {
        BasisSample::derivative(self, order)
    }

    fn linear_combine(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self> {
        if f.basis != g.basis {
            return Err(FdaError::BasisMismatch);
        }
        let coefficients = combine_matrices(a, &f.coefficients, b, &g.coefficients)?;
        let mut out = BasisSample::new(f.basis.clone(), coefficients)?;
        if out.n_samples() == f.n_samples() {
            out.names = f.names.clone();
        }
        out.extrapolation = f.extrapolation;
        Ok(out)
    }
}

pub fn linear_combine<F: FunctionalData>(a: f64, f: &F, b: f64, g: &F) -> Result<F> {
    F::linear_combine(a, f, b, g)
}

/// Trapezoidal `<f_i, g_i>` for every curve pair (`g` may broadcast one curve).
pub fn inner_product_l2(f: &GridSample, g: &GridSample) -> Result<Vec<f64>> {
    if !f.grid().same_as(g.grid()) {
        return Err(FdaError::GridMismatch);
    }
    if g.n_samples() != f.n_samples() && g.n_samples() != 1 {
        return Err(FdaError::ShapeMismatch(format!(
            "cannot pair {} curves with {} curves",
            f.n_samples(),
            g.n_samples()
        )));
    }
    let w = f.grid().trapezoid_weights();
    Ok((0..f.n_samples())
        .map(|i| {
            let gi = if g.n_samples() == 1 { 0 } else { i };
            w.iter()
                .enumerate()
                .map(|(j, wj)| wj * f.values()[(i, j)] * g.values()[(gi, j)])
                .sum()
        })
        .collect())
}

pub fn norm_l2(f: &GridSample) -> Vec<f64> {
    inner_product_l2(f, f)
        .expect("a sample always matches its own grid")
        .into_iter()
        .map(f64::sqrt)
        .collect()
}
