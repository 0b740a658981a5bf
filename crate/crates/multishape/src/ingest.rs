//! Smoothing of raw discretized contours.
//!
//! Input contours are ordered point lists in image units. Each contour is
//! reparametrized by normalized arc length of the closed polygon, oriented
//! counter-clockwise, and projected on the Fourier basis by ordinary least
//! squares. Uniform-index parametrization would distort shapes when the
//! sampling is uneven, hence the arc-length grid.

use crate::basis::BasisSpec;
use crate::curve::{ComponentCoefficients, MultiCurve};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix2xX, Vector2};
use rayon::prelude::*;

/// One raw discretized contour: an ordered list of (x, y) points.
///
/// The polygon is treated as closed (the last-to-first edge counts) whether
/// or not the first point is repeated at the end.
#[derive(Debug, Clone)]
pub struct RawContour {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl RawContour {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(
                "contour contains non-finite coordinates".to_string(),
            ));
        }
        if points.len() < 3 {
            return Err(Error::DegenerateInput(format!(
                "contour needs at least 3 points, got {}",
                points.len()
            )));
        }
        Ok(RawContour { points, closed: true })
    }

    /// Points with exact consecutive duplicates removed (and a repeated
    /// closing point dropped), preserving the starting point.
    fn deduplicated(&self) -> Vec<[f64; 2]> {
        let mut pts: Vec<[f64; 2]> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if pts.last() != Some(p) {
                pts.push(*p);
            }
        }
        if pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        pts
    }

    /// Twice the signed area of the closed polygon (shoelace).
    fn signed_area2(points: &[[f64; 2]]) -> f64 {
        let n = points.len();
        let mut acc = 0.0;
        for i in 0..n {
            let [x0, y0] = points[i];
            let [x1, y1] = points[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        acc
    }

    /// Deduplicated points in counter-clockwise orientation (positive signed
    /// area), starting point preserved, together with their normalized
    /// arc-length grid.
    pub fn normalized_points(&self) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
        let mut pts = self.deduplicated();
        if pts.len() < 3 {
            return Err(Error::DegenerateInput(
                "contour degenerates to fewer than 3 distinct points".to_string(),
            ));
        }
        if Self::signed_area2(&pts) < 0.0 {
            pts[1..].reverse();
        }
        let grid = arclength_grid_of(&pts)?;
        Ok((pts, grid))
    }
}

fn arclength_grid_of(points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let n = points.len();
    let mut cumulative = Vec::with_capacity(n);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for i in 1..n {
        let dx = points[i][0] - points[i - 1][0];
        let dy = points[i][1] - points[i - 1][1];
        acc += dx.hypot(dy);
        cumulative.push(acc);
    }
    let dx = points[0][0] - points[n - 1][0];
    let dy = points[0][1] - points[n - 1][1];
    let perimeter = acc + dx.hypot(dy);
    if perimeter <= 0.0 {
        return Err(Error::DegenerateInput(
            "contour has zero perimeter".to_string(),
        ));
    }
    Ok(cumulative.into_iter().map(|s| s / perimeter).collect())
}

/// Normalized cumulative arc-length grid of a closed contour: values in
/// [0, 1), starting at 0, strictly increasing after duplicate points are
/// dropped.
pub fn arclength_grid(rc: &RawContour) -> Result<Vec<f64>> {
    let pts = rc.deduplicated();
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(
            "contour degenerates to fewer than 3 distinct points".to_string(),
        ));
    }
    arclength_grid_of(&pts)
}

/// A multivariate observation: p contours, optional binary label, optional id.
#[derive(Debug, Clone)]
pub struct RawMultiContour {
    pub id: String,
    pub label: Option<u8>,
    pub contours: Vec<RawContour>,
}

impl RawMultiContour {
    pub fn num_components(&self) -> usize {
        self.contours.len()
    }
}

/// Least-squares fit of one coordinate array against [1, phi_1..phi_M].
/// Returns (intercept, coefficient row).
fn ols_fit(design: &DMatrix<f64>, values: &DVector<f64>, component: usize) -> Result<(f64, Vec<f64>)> {
    let svd = design.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let cols = design.ncols();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * max_sv).count();
    if rank < cols {
        return Err(Error::Fit {
            component,
            reason: format!(
                "rank-deficient design ({rank} of {cols}); grid too small or degenerate"
            ),
        });
    }
    let sol = svd
        .solve(values, 1e-10 * max_sv)
        .map_err(|e| Error::Fit { component, reason: e.to_string() })?;
    Ok((sol[0], sol.as_slice()[1..].to_vec()))
}

/// Least-squares fit of one component on a caller-supplied grid:
/// each coordinate is regressed on [1, phi_1(t), ..., phi_M(t)].
pub fn fit_component_on_grid(
    points: &[[f64; 2]],
    grid: &[f64],
    spec: BasisSpec,
    component: usize,
) -> Result<ComponentCoefficients> {
    let k = points.len();
    if grid.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} grid values for {} points",
            grid.len(),
            k
        )));
    }
    let m = spec.size();
    if k < 2 * m + 1 {
        return Err(Error::Fit {
            component,
            reason: format!("{k} points is fewer than the 2M+1 = {} required", 2 * m + 1),
        });
    }
    let mut design = DMatrix::zeros(k, m + 1);
    for (row, &t) in grid.iter().enumerate() {
        design[(row, 0)] = 1.0;
        let phi = spec.evaluate(t)?;
        for (col, &v) in phi.iter().enumerate() {
            design[(row, col + 1)] = v;
        }
    }
    let xs = DVector::from_iterator(k, points.iter().map(|p| p[0]));
    let ys = DVector::from_iterator(k, points.iter().map(|p| p[1]));
    let (bx, ax) = ols_fit(&design, &xs, component)?;
    let (by, ay) = ols_fit(&design, &ys, component)?;
    let mut a = Matrix2xX::zeros(m);
    for c in 0..m {
        a[(0, c)] = ax[c];
        a[(1, c)] = ay[c];
    }
    ComponentCoefficients::new(Vector2::new(bx, by), a)
}

/// Fit Fourier coefficients to a raw multivariate contour ("smoothing").
///
/// Every contour is normalized to counter-clockwise orientation and
/// parametrized by arc length, then each coordinate is regressed on
/// [1, phi_1(t), ..., phi_M(t)]. Requires at least 2M+1 distinct points per
/// contour.
pub fn fit_curve(rmc: &RawMultiContour, spec: BasisSpec) -> Result<MultiCurve> {
    if rmc.contours.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "record '{}' has no contours",
            rmc.id
        )));
    }
    let mut components = Vec::with_capacity(rmc.contours.len());
    for (j, rc) in rmc.contours.iter().enumerate() {
        if !rc.closed {
            return Err(Error::DegenerateInput(format!(
                "component {j} of '{}' is an open contour; only closed curves are supported",
                rmc.id
            )));
        }
        let (pts, grid) = rc.normalized_points().map_err(|e| e.with_curve_id(&rmc.id))?;
        let fitted =
            fit_component_on_grid(&pts, &grid, spec, j).map_err(|e| e.with_curve_id(&rmc.id))?;
        components.push(fitted);
    }
    MultiCurve::new(components)
}

/// Fit a whole dataset in parallel, keeping record order.
pub fn fit_dataset(records: &[RawMultiContour], spec: BasisSpec) -> Result<Vec<MultiCurve>> {
    records
        .par_iter()
        .map(|r| fit_curve(r, spec))
        .collect::<Result<Vec<_>>>()
}
