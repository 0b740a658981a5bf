//! Linear discriminant with coefficients estimated by principal component
//! regression: centered labels regressed on the leading principal component
//! scores of the centered feature matrix, mapped back to feature space.
//! Thresholding matches the PLS discriminant (class score-mean midpoint).

use super::{ClassifierModel, Hyper, Method, TangentDesign};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

struct PcrBasis {
    /// right singular vectors, one column per retained component
    v: DMatrix<f64>,
    /// regression coefficient of centered y on each unit-variance score
    gamma: Vec<f64>,
    x_mean: DVector<f64>,
    y_mean: f64,
    rank: usize,
}

fn pcr_decompose(x: &DMatrix<f64>, y: &[f64]) -> PcrBasis {
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
    let yc = DVector::from_iterator(n, y.iter().map(|&v| v - y_mean));

    let svd = xc.clone().svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax.max(1e-300))
        .count();

    let mut v = DMatrix::zeros(d, rank);
    let mut gamma = Vec::with_capacity(rank);
    for k in 0..rank {
        v.set_column(k, &v_t.row(k).transpose());
        // score t_k = sigma_k u_k; OLS coefficient of yc on t_k
        let sigma = svd.singular_values[k];
        let t_dot_y = sigma * u.column(k).dot(&yc);
        let t_dot_t = sigma * sigma;
        gamma.push(t_dot_y / t_dot_t);
    }
    PcrBasis { v, gamma, x_mean, y_mean, rank }
}

/// Fit discriminants for every component count in `counts` from a single
/// singular value decomposition (counts beyond the rank are truncated and
/// flagged).
pub fn fit_path(design: &TangentDesign, counts: &[usize]) -> Result<Vec<ClassifierModel>> {
    if counts.is_empty() {
        return Err(Error::Config("empty component grid".to_string()));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::Config("component counts must be positive".to_string()));
    }
    let y: Vec<f64> = design.labels.iter().map(|&l| l as f64).collect();
    let basis = pcr_decompose(&design.x, &y);
    if basis.rank == 0 {
        return Err(Error::Numerical(
            "PCR found no principal component (constant features?)".to_string(),
        ));
    }
    Ok(counts
        .iter()
        .map(|&a| {
            let avail = a.min(basis.rank);
            let mut beta = DVector::zeros(design.dim());
            for k in 0..avail {
                beta += basis.v.column(k) * basis.gamma[k];
            }
            let beta0 = basis.y_mean - basis.x_mean.dot(&beta);
            super::pls::discriminant(design, Method::Pcr, beta0, beta, Hyper::Components(a), avail < a)
        })
        .collect())
}

/// Fit the PCR discriminant with a fixed number of components.
pub fn fit_pcr_discriminant(design: &TangentDesign, n_components: usize) -> Result<ClassifierModel> {
    Ok(fit_path(design, &[n_components])?.pop().expect("one model"))
}

#[cfg(test)]
mod tests {
    use super::super::tests::toy_design;
    use super::super::GroupingKind;
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_rank_pcr_equals_ols_discriminant() {
        let mut rng = ChaCha8Rng::seed_from_u64(95);
        let n = 30;
        let d = 6;
        let x = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random_range(0.0..1.0) < 0.5)).collect();
        let design = TangentDesign {
            x: x.clone(),
            labels: labels.clone(),
            p: 1,
            m: 2,
            groups: TangentDesign::feature_groups(1, 2, GroupingKind::ByComponent),
        };
        let model = fit_pcr_discriminant(&design, d).unwrap();

        let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let ybar = y.iter().sum::<f64>() / n as f64;
        let xbar = DVector::from_iterator(d, (0..d).map(|c| x.column(c).sum() / n as f64));
        let mut xc = x.clone();
        for r in 0..n {
            for c in 0..d {
                xc[(r, c)] -= xbar[c];
            }
        }
        let yc = DVector::from_iterator(n, y.iter().map(|&v| v - ybar));
        let beta_ols = (xc.transpose() * &xc).lu().solve(&(xc.transpose() * &yc)).unwrap();
        assert!(
            (&model.beta - &beta_ols).norm() < 1e-8,
            "beta gap {}",
            (&model.beta - &beta_ols).norm()
        );
    }

    #[test]
    fn one_component_follows_high_variance_informative_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(96);
        let n = 80;
        let d = 6;
        let mut x = DMatrix::from_fn(n, d, |_, _| rng.random_range(-0.1..0.1));
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let y = u8::from(i % 2 == 0);
            labels.push(y);
            // informative direction carries most of the variance
            x[(i, 2)] = if y == 1 { 3.0 } else { -3.0 } + rng.random_range(-0.3..0.3);
        }
        let design = TangentDesign {
            x,
            labels,
            p: 1,
            m: 2,
            groups: TangentDesign::feature_groups(1, 2, GroupingKind::ByComponent),
        };
        let model = fit_pcr_discriminant(&design, 1).unwrap();
        assert!(model.accuracy(&design) == 100.0);
        let dominant = model.beta.iter().map(|b| b.abs()).fold(0.0, f64::max);
        assert!(model.beta[2].abs() > 0.9 * dominant);
    }

    #[test]
    fn duplicate_rows_score_identically() {
        let mut design = toy_design(20, 8, true, 97);
        let first = design.x.row(0).into_owned();
        design.x.set_row(5, &first);
        design.labels[5] = design.labels[0];
        let model = fit_pcr_discriminant(&design, 3).unwrap();
        let s0 = model.score(&design.x.row(0).into_owned());
        let s5 = model.score(&design.x.row(5).into_owned());
        assert_eq!(s0, s5);
    }

    #[test]
    fn prediction_invariance_under_column_shift() {
        let design = toy_design(50, 8, true, 99);
        let mut shifted = design.clone();
        for r in 0..shifted.n() {
            for c in 0..shifted.dim() {
                shifted.x[(r, c)] += -2.3;
            }
        }
        let m0 = fit_pcr_discriminant(&design, 3).unwrap();
        let m1 = fit_pcr_discriminant(&shifted, 3).unwrap();
        assert!((&m0.beta - &m1.beta).norm() < 1e-8);
        for i in 0..design.n() {
            assert_eq!(
                m0.predict(&design.x.row(i).into_owned()),
                m1.predict(&shifted.x.row(i).into_owned())
            );
        }
    }

    #[test]
    fn excess_components_truncate_with_flag() {
        let design = toy_design(10, 8, true, 98);
        let model = fit_pcr_discriminant(&design, 50).unwrap();
        assert!(model.flagged);
        assert!(model.beta.iter().all(|b| b.is_finite()));
    }
}
