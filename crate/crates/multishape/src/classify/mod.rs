//! Supervised classification of shapes from tangent-space predictors.
//!
//! Aligned shapes are log-mapped at the estimated mean and their
//! coefficients flattened into a design matrix; four linear classifiers run
//! on top: group-lasso logistic regression with groups per component (GL1)
//! or per coordinate function (GL2), and linear discriminants whose
//! coefficient function is estimated by partial least squares (PLS) or
//! principal component regression (PCR). Hyperparameters are selected by
//! nested cross-validation inside each training fold.

pub mod group_lasso;
pub mod pcr;
pub mod pls;

use crate::curve::MultiCurve;
use crate::deformation::{PreShape, Shape};
use crate::error::{Error, Result};
use crate::pipeline::{estimate_pipeline_from_curves, PipelineConfig};
use crate::seeding::{substream, tag};
use crate::sphere::log_map;
use nalgebra::{DMatrix, DVector, RowDVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

/// Classification method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gl1,
    Gl2,
    Pls,
    Pcr,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Gl1 => "gl1",
            Method::Gl2 => "gl2",
            Method::Pls => "pls",
            Method::Pcr => "pcr",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl1" => Ok(Method::Gl1),
            "gl2" => Ok(Method::Gl2),
            "pls" => Ok(Method::Pls),
            "pcr" => Ok(Method::Pcr),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected gl1|gl2|pls|pcr)"
            ))),
        }
    }
}

/// How predictors are built from the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignScheme {
    /// Joint multivariate shapes, log-mapped at the common mean.
    Multi,
    /// Each component aligned on its own (p univariate pipelines).
    Uni,
    /// Smoothed curves as-is, no alignment.
    Raw,
}

impl fmt::Display for DesignScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DesignScheme::Multi => "multi",
            DesignScheme::Uni => "uni",
            DesignScheme::Raw => "raw",
        };
        f.write_str(s)
    }
}

impl FromStr for DesignScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "multi" => Ok(DesignScheme::Multi),
            "uni" => Ok(DesignScheme::Uni),
            "raw" => Ok(DesignScheme::Raw),
            other => Err(Error::Config(format!(
                "unknown design scheme '{other}' (expected multi|uni|raw)"
            ))),
        }
    }
}

/// A named contiguous block of feature indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureGroup {
    pub name: String,
    pub range: Range<usize>,
}

impl FeatureGroup {
    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }
}

/// Partition styles of the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingKind {
    /// One group per component (both coordinates together).
    ByComponent,
    /// One group per coordinate function.
    ByCoordinate,
}

impl GroupingKind {
    pub fn for_method(method: Method) -> GroupingKind {
        match method {
            Method::Gl2 => GroupingKind::ByCoordinate,
            _ => GroupingKind::ByComponent,
        }
    }
}

/// Design matrix of flattened coefficient features with labels and a
/// grouping. Feature layout per curve: for component j, the x-coordinate
/// block [B_jx, A_jx1..A_jxM] then the y-coordinate block, so each curve
/// contributes p(2M+2) features.
#[derive(Debug, Clone)]
pub struct TangentDesign {
    pub x: DMatrix<f64>,
    pub labels: Vec<u8>,
    pub p: usize,
    pub m: usize,
    pub groups: Vec<FeatureGroup>,
}

impl TangentDesign {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn feature_groups(p: usize, m: usize, kind: GroupingKind) -> Vec<FeatureGroup> {
        let per_coord = m + 1;
        match kind {
            GroupingKind::ByComponent => (0..p)
                .map(|j| FeatureGroup {
                    name: format!("component-{}", j + 1),
                    range: 2 * per_coord * j..2 * per_coord * (j + 1),
                })
                .collect(),
            GroupingKind::ByCoordinate => (0..p)
                .flat_map(|j| {
                    ["x", "y"].into_iter().enumerate().map(move |(r, axis)| FeatureGroup {
                        name: format!("component-{}-{axis}", j + 1),
                        range: per_coord * (2 * j + r)..per_coord * (2 * j + r + 1),
                    })
                })
                .collect(),
        }
    }

    /// Replace the grouping (same features).
    pub fn with_grouping(mut self, kind: GroupingKind) -> TangentDesign {
        self.groups = Self::feature_groups(self.p, self.m, kind);
        self
    }

    /// Rows at the given indices, keeping grouping and layout.
    pub fn subset(&self, idx: &[usize]) -> TangentDesign {
        let mut x = DMatrix::zeros(idx.len(), self.dim());
        let mut labels = Vec::with_capacity(idx.len());
        for (r, &i) in idx.iter().enumerate() {
            x.set_row(r, &self.x.row(i));
            labels.push(self.labels[i]);
        }
        TangentDesign {
            x,
            labels,
            p: self.p,
            m: self.m,
            groups: self.groups.clone(),
        }
    }
}

fn check_labels(labels: &[u8], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} observations",
            labels.len(),
            n
        )));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Domain("labels must be 0 or 1".to_string()));
    }
    Ok(())
}

fn flatten_curve(mc: &MultiCurve) -> Vec<f64> {
    let m = mc.basis().size();
    let mut row = Vec::with_capacity(mc.num_components() * 2 * (m + 1));
    for c in mc.components() {
        for r in 0..2 {
            row.push(c.b[r]);
            for k in 0..m {
                row.push(c.a[(r, k)]);
            }
        }
    }
    row
}

fn design_from_rows(
    rows: Vec<Vec<f64>>,
    labels: &[u8],
    p: usize,
    m: usize,
    kind: GroupingKind,
) -> Result<TangentDesign> {
    let n = rows.len();
    check_labels(labels, n)?;
    let d = p * 2 * (m + 1);
    let mut x = DMatrix::zeros(n, d);
    for (r, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), d);
        x.set_row(r, &RowDVector::from_row_slice(row));
    }
    Ok(TangentDesign {
        x,
        labels: labels.to_vec(),
        p,
        m,
        groups: TangentDesign::feature_groups(p, m, kind),
    })
}

/// Design from aligned multivariate shapes: each shape is log-mapped at the
/// mean and its tangent coefficients flattened.
pub fn tangent_design_multi(
    shapes: &[Shape],
    mu: &PreShape,
    labels: &[u8],
    kind: GroupingKind,
) -> Result<TangentDesign> {
    if shapes.is_empty() {
        return Err(Error::DegenerateInput("no shapes".to_string()));
    }
    let p = mu.num_components();
    let m = mu.curve().basis().size();
    let rows = shapes
        .iter()
        .map(|s| {
            if s.preshape.num_components() != p || s.preshape.curve().basis().size() != m {
                return Err(Error::DimensionMismatch(
                    "shape and mean have different layouts".to_string(),
                ));
            }
            Ok(flatten_curve(log_map(&s.preshape, mu)?.coefficients()))
        })
        .collect::<Result<Vec<_>>>()?;
    design_from_rows(rows, labels, p, m, kind)
}

/// Design from smoothed curves as-is (no alignment, no centering).
pub fn raw_design(curves: &[MultiCurve], labels: &[u8], kind: GroupingKind) -> Result<TangentDesign> {
    if curves.is_empty() {
        return Err(Error::DegenerateInput("no curves".to_string()));
    }
    let p = curves[0].num_components();
    let m = curves[0].basis().size();
    let rows = curves.iter().map(flatten_curve).collect();
    design_from_rows(rows, labels, p, m, kind)
}

/// Design from p univariate analyses: each component is centered, scaled
/// and aligned on its own (p = 1 pipelines), log-mapped at its own mean,
/// and the per-component tangent projections concatenated.
pub fn univariate_design(
    curves: &[MultiCurve],
    labels: &[u8],
    cfg: &PipelineConfig,
    kind: GroupingKind,
) -> Result<TangentDesign> {
    if curves.is_empty() {
        return Err(Error::DegenerateInput("no curves".to_string()));
    }
    let p = curves[0].num_components();
    let m = curves[0].basis().size();
    let n = curves.len();
    check_labels(labels, n)?;
    let ids: Vec<String> = (0..n).map(|i| format!("curve-{i}")).collect();

    let per_component: Vec<Vec<Vec<f64>>> = (0..p)
        .map(|j| {
            let singles: Vec<MultiCurve> = curves
                .iter()
                .map(|c| MultiCurve::new(vec![c.component(j).clone()]))
                .collect::<Result<Vec<_>>>()?;
            let mut sub_cfg = cfg.clone();
            sub_cfg.seed = substream(cfg.seed, tag::UNI_PIPELINE, j as u64).random();
            let out = estimate_pipeline_from_curves(&singles, &ids, &sub_cfg)?;
            out.shapes
                .iter()
                .map(|s| Ok(flatten_curve(log_map(&s.preshape, &out.mean.mean)?.coefficients())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = Vec::with_capacity(p * 2 * (m + 1));
            for block in per_component.iter() {
                row.extend_from_slice(&block[i]);
            }
            row
        })
        .collect();
    design_from_rows(rows, labels, p, m, kind)
}

/// Build the design for a scheme from smoothed curves. MULTI runs the full
/// joint pipeline first; UNI runs one pipeline per component; RAW flattens
/// the curves untouched.
pub fn build_design(
    curves: &[MultiCurve],
    labels: &[u8],
    scheme: DesignScheme,
    cfg: &PipelineConfig,
    kind: GroupingKind,
) -> Result<TangentDesign> {
    match scheme {
        DesignScheme::Raw => raw_design(curves, labels, kind),
        DesignScheme::Uni => univariate_design(curves, labels, cfg, kind),
        DesignScheme::Multi => {
            let ids: Vec<String> = (0..curves.len()).map(|i| format!("curve-{i}")).collect();
            let out = estimate_pipeline_from_curves(curves, &ids, cfg)?;
            tangent_design_multi(&out.shapes, &out.mean.mean, labels, kind)
        }
    }
}

/// Selected hyperparameter of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyper {
    Lambda(f64),
    Components(usize),
}

impl fmt::Display for Hyper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyper::Lambda(l) => write!(f, "lambda={l:.6e}"),
            Hyper::Components(c) => write!(f, "components={c}"),
        }
    }
}

/// A fitted linear classifier: `predict(x) = 1` iff
/// `orientation * (beta0 + <x, beta>) > 0`.
#[derive(Debug, Clone)]
pub struct ClassifierModel {
    pub method: Method,
    pub beta0: f64,
    pub beta: DVector<f64>,
    pub hyper: Hyper,
    pub groups: Option<Vec<FeatureGroup>>,
    pub orientation: f64,
    /// Non-convergence or component truncation happened during the fit.
    pub flagged: bool,
}

impl ClassifierModel {
    pub fn score_slice(&self, row: &[f64]) -> f64 {
        self.beta0 + row.iter().zip(self.beta.iter()).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn score(&self, row: &RowDVector<f64>) -> f64 {
        self.score_slice(row.as_slice())
    }

    pub fn predict_slice(&self, row: &[f64]) -> u8 {
        u8::from(self.orientation * self.score_slice(row) > 0.0)
    }

    pub fn predict(&self, row: &RowDVector<f64>) -> u8 {
        self.predict_slice(row.as_slice())
    }

    pub fn accuracy(&self, design: &TangentDesign) -> f64 {
        let hits = (0..design.n())
            .filter(|&i| self.predict(&design.x.row(i).into_owned()) == design.labels[i])
            .count();
        100.0 * hits as f64 / design.n() as f64
    }

    /// Names of groups with nonzero coefficients (group-lasso fits).
    pub fn active_groups(&self) -> Vec<String> {
        match &self.groups {
            None => Vec::new(),
            Some(groups) => groups
                .iter()
                .filter(|g| self.beta.rows(g.range.start, g.len()).norm() > 0.0)
                .map(|g| g.name.clone())
                .collect(),
        }
    }
}

/// A grid of candidate hyperparameters, ordered by preference (ties in
/// cross-validated error go to the earlier entry).
#[derive(Debug, Clone)]
pub enum HyperGrid {
    Lambdas(Vec<f64>),
    Components(Vec<usize>),
}

impl HyperGrid {
    pub fn len(&self) -> usize {
        match self {
            HyperGrid::Lambdas(v) => v.len(),
            HyperGrid::Components(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component counts `1..=2pM-1` capped by the sample size, the grid
    /// used with the discriminant methods.
    pub fn default_components(design: &TangentDesign) -> HyperGrid {
        let max = (2 * design.p * design.m)
            .saturating_sub(1)
            .min(design.n().saturating_sub(2))
            .max(1);
        HyperGrid::Components((1..=max).collect())
    }
}

/// Fit one model per grid entry (warm-started / path-shared where the
/// method allows it).
fn fit_grid(design: &TangentDesign, method: Method, grid: &HyperGrid) -> Result<Vec<ClassifierModel>> {
    match (method, grid) {
        (Method::Gl1 | Method::Gl2, HyperGrid::Lambdas(lambdas)) => Ok(group_lasso::fit_path(
            design,
            method,
            lambdas,
            &group_lasso::GroupLassoConfig::path(),
        )),
        (Method::Pls, HyperGrid::Components(counts)) => pls::fit_path(design, counts),
        (Method::Pcr, HyperGrid::Components(counts)) => pcr::fit_path(design, counts),
        _ => Err(Error::Config(format!(
            "hyperparameter grid type does not match method {method}"
        ))),
    }
}

/// Fit a single model at one hyperparameter value.
pub fn fit_model(design: &TangentDesign, method: Method, hyper: Hyper) -> Result<ClassifierModel> {
    match (method, hyper) {
        (Method::Gl1 | Method::Gl2, Hyper::Lambda(l)) => {
            Ok(group_lasso::fit(design, method, l, &group_lasso::GroupLassoConfig::default()))
        }
        (Method::Pls, Hyper::Components(c)) => pls::fit_pls_discriminant(design, c),
        (Method::Pcr, Hyper::Components(c)) => pcr::fit_pcr_discriminant(design, c),
        _ => Err(Error::Config(format!(
            "hyperparameter type does not match method {method}"
        ))),
    }
}

/// Cross-validation report: per-fold test accuracies (percent), their mean,
/// and the hyperparameter selected inside each training fold.
#[derive(Debug, Clone)]
pub struct CvReport {
    pub method: Method,
    pub design: String,
    pub scenario: String,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub selected: Vec<Hyper>,
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    pub folds: usize,
    pub inner_folds: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 10, inner_folds: 5, seed: 0 }
    }
}

/// Stratified fold assignment: shuffled class indices dealt round-robin.
/// Every fold receives both classes or the split fails.
fn stratified_folds(labels: &[u8], k: usize, rng: &mut impl Rng) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    let mut class0: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 0)
        .map(|(i, _)| i)
        .collect();
    let mut class1: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 1)
        .map(|(i, _)| i)
        .collect();
    if class0.len() < k || class1.len() < k {
        return Err(Error::DegenerateInput(format!(
            "stratification impossible: class sizes {} / {} with {k} folds",
            class0.len(),
            class1.len()
        )));
    }
    class0.shuffle(rng);
    class1.shuffle(rng);
    let mut folds = vec![Vec::new(); k];
    for (i, idx) in class0.into_iter().enumerate() {
        folds[i % k].push(idx);
    }
    for (i, idx) in class1.into_iter().enumerate() {
        folds[i % k].push(idx);
    }
    Ok(folds)
}

fn grid_hyper(grid: &HyperGrid, index: usize) -> Hyper {
    match grid {
        HyperGrid::Lambdas(v) => Hyper::Lambda(v[index]),
        HyperGrid::Components(v) => Hyper::Components(v[index]),
    }
}

/// Stratified k-fold cross-validation with nested hyperparameter selection:
/// inside each training fold, an inner stratified split picks the grid entry
/// with the lowest mean inner test error; the model is refitted on the full
/// training fold and scored on the held-out fold.
pub fn cross_validate(
    design: &TangentDesign,
    method: Method,
    grid: &HyperGrid,
    cfg: &CvConfig,
) -> Result<CvReport> {
    if grid.is_empty() {
        return Err(Error::Config("empty hyperparameter grid".to_string()));
    }
    let design = match method {
        Method::Gl1 | Method::Gl2 => {
            design.clone().with_grouping(GroupingKind::for_method(method))
        }
        _ => design.clone(),
    };
    let mut outer_rng = substream(cfg.seed, tag::CV_OUTER, 0);
    let folds = stratified_folds(&design.labels, cfg.folds, &mut outer_rng)?;

    let per_fold: Vec<(f64, Hyper)> = folds
        .par_iter()
        .enumerate()
        .map(|(fi, test_idx)| -> Result<(f64, Hyper)> {
            let mut in_test = vec![false; design.n()];
            for &i in test_idx {
                in_test[i] = true;
            }
            let train_idx: Vec<usize> = (0..design.n()).filter(|&i| !in_test[i]).collect();
            let train = design.subset(&train_idx);
            let test = design.subset(test_idx);

            let mut inner_rng = substream(cfg.seed, tag::CV_INNER, fi as u64);
            let inner = stratified_folds(&train.labels, cfg.inner_folds, &mut inner_rng)?;
            let mut errors = vec![0usize; grid.len()];
            for inner_test in &inner {
                let mut in_inner_test = vec![false; train.n()];
                for &i in inner_test {
                    in_inner_test[i] = true;
                }
                let inner_train_idx: Vec<usize> =
                    (0..train.n()).filter(|&i| !in_inner_test[i]).collect();
                let inner_train = train.subset(&inner_train_idx);
                let inner_eval = train.subset(inner_test);
                let models = fit_grid(&inner_train, method, grid)?;
                for (gi, model) in models.iter().enumerate() {
                    for (r, &label) in inner_eval.labels.iter().enumerate() {
                        if model.predict(&inner_eval.x.row(r).into_owned()) != label {
                            errors[gi] += 1;
                        }
                    }
                }
            }
            let best = errors
                .iter()
                .enumerate()
                .min_by_key(|(_, &e)| e)
                .map(|(i, _)| i)
                .expect("non-empty grid");
            let hyper = grid_hyper(grid, best);
            let model = fit_model(&train, method, hyper)?;
            Ok((model.accuracy(&test), hyper))
        })
        .collect::<Result<Vec<_>>>()?;

    let fold_accuracies: Vec<f64> = per_fold.iter().map(|(a, _)| *a).collect();
    let selected: Vec<Hyper> = per_fold.iter().map(|(_, h)| *h).collect();
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
    Ok(CvReport {
        method,
        design: String::new(),
        scenario: String::new(),
        fold_accuracies,
        mean_accuracy,
        selected,
    })
}
