//! Linear discriminant with coefficients estimated by PLS1 (NIPALS).
//!
//! Features and labels are centered; components are extracted by the
//! NIPALS recursion and the regression vector mapped back to the original
//! feature space. The discriminant threshold sits at the midpoint of the
//! class score means on the training data.

use super::{ClassifierModel, Hyper, Method, TangentDesign};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

struct PlsPath {
    /// weight, loading, response loading per extracted component
    w: Vec<DVector<f64>>,
    p: Vec<DVector<f64>>,
    q: Vec<f64>,
    x_mean: DVector<f64>,
    y_mean: f64,
    truncated: bool,
}

fn nipals(x: &DMatrix<f64>, y: &[f64], max_components: usize) -> PlsPath {
    let n = x.nrows();
    let d = x.ncols();
    let x_mean = DVector::from_iterator(d, (0..d).map(|c| x.column(c).sum() / n as f64));
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut xc = x.clone();
    for r in 0..n {
        for c in 0..d {
            xc[(r, c)] -= x_mean[c];
        }
    }
    let mut yc = DVector::from_iterator(n, y.iter().map(|&v| v - y_mean));

    let scale = xc.norm().max(1e-300);
    let mut path = PlsPath {
        w: Vec::new(),
        p: Vec::new(),
        q: Vec::new(),
        x_mean,
        y_mean,
        truncated: false,
    };
    for _ in 0..max_components {
        let mut w = xc.transpose() * &yc;
        let wnorm = w.norm();
        if wnorm <= 1e-12 * scale {
            path.truncated = true;
            break;
        }
        w /= wnorm;
        let t = &xc * &w;
        let tt = t.dot(&t);
        if tt <= 1e-24 * scale * scale {
            path.truncated = true;
            break;
        }
        let p = xc.transpose() * &t / tt;
        let q = yc.dot(&t) / tt;
        xc -= &t * p.transpose();
        yc -= &t * q;
        path.w.push(w);
        path.p.push(p);
        path.q.push(q);
    }
    path
}

/// Regression vector using the first `a` components:
/// `beta = W (P^T W)^{-1} q`.
fn beta_for(path: &PlsPath, a: usize) -> Option<(f64, DVector<f64>)> {
    let a = a.min(path.w.len());
    if a == 0 {
        return None;
    }
    let d = path.w[0].len();
    let mut wmat = DMatrix::zeros(d, a);
    let mut pmat = DMatrix::zeros(d, a);
    let mut q = DVector::zeros(a);
    for i in 0..a {
        wmat.set_column(i, &path.w[i]);
        pmat.set_column(i, &path.p[i]);
        q[i] = path.q[i];
    }
    let ptw = pmat.transpose() * &wmat;
    let solved = ptw.lu().solve(&q)?;
    let beta = wmat * solved;
    let beta0 = path.y_mean - path.x_mean.dot(&beta);
    Some((beta0, beta))
}

/// Shift the intercept so the decision threshold is the midpoint of the
/// class score means; orientation makes `score > 0` mean class 1.
pub(super) fn discriminant(
    design: &TangentDesign,
    method: Method,
    beta0: f64,
    beta: DVector<f64>,
    hyper: Hyper,
    flagged: bool,
) -> ClassifierModel {
    let scores: Vec<f64> = (0..design.n())
        .map(|i| beta0 + design.x.row(i).iter().zip(beta.iter()).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let (mut s1, mut n1, mut s0, mut n0) = (0.0, 0usize, 0.0, 0usize);
    for (s, &l) in scores.iter().zip(&design.labels) {
        if l == 1 {
            s1 += s;
            n1 += 1;
        } else {
            s0 += s;
            n0 += 1;
        }
    }
    let m1 = s1 / n1.max(1) as f64;
    let m0 = s0 / n0.max(1) as f64;
    let midpoint = 0.5 * (m0 + m1);
    let orientation = if m1 >= m0 { 1.0 } else { -1.0 };
    ClassifierModel {
        method,
        beta0: beta0 - midpoint,
        beta,
        hyper,
        groups: None,
        orientation,
        flagged,
    }
}

/// Fit discriminants for every component count in `counts` from a single
/// NIPALS pass (counts beyond the extractable rank are truncated and
/// flagged).
pub fn fit_path(design: &TangentDesign, counts: &[usize]) -> Result<Vec<ClassifierModel>> {
    if counts.is_empty() {
        return Err(Error::Config("empty component grid".to_string()));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::Config("component counts must be positive".to_string()));
    }
    let max = *counts.iter().max().unwrap();
    let y: Vec<f64> = design.labels.iter().map(|&l| l as f64).collect();
    let path = nipals(&design.x, &y, max.min(design.n().saturating_sub(1)).max(1));
    counts
        .iter()
        .map(|&a| {
            let avail = a.min(path.w.len());
            match beta_for(&path, avail) {
                Some((beta0, beta)) => Ok(discriminant(
                    design,
                    Method::Pls,
                    beta0,
                    beta,
                    Hyper::Components(a),
                    avail < a || path.truncated && avail == path.w.len(),
                )),
                None => Err(Error::Numerical(
                    "PLS could not extract any component (constant features?)".to_string(),
                )),
            }
        })
        .collect()
}

/// Fit the PLS discriminant with a fixed number of components.
pub fn fit_pls_discriminant(design: &TangentDesign, n_components: usize) -> Result<ClassifierModel> {
    Ok(fit_path(design, &[n_components])?.pop().expect("one model"))
}
