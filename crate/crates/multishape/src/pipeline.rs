//! End-to-end estimation: smoothing, centering, and the interlaced
//! alignment / intrinsic-mean loop.
//!
//! The template for alignment is the running mean estimate; the mean in
//! turn is computed from the aligned shapes. Starting from a randomly
//! chosen pre-shape, the loop alternates (a) ICF alignment of every
//! pre-shape against the current mean and (b) mean re-estimation, until
//! the distance-based variance `eta` stabilizes.

use crate::basis::BasisSpec;
use crate::deformation::{
    center_and_scale, icf_align, AlignmentWarnings, DeformationParams, IcfConfig, PreShape, Shape,
};
use crate::error::{Error, Result};
use crate::ingest::{fit_dataset, RawMultiContour};
use crate::curve::MultiCurve;
use crate::seeding::{substream, tag};
use crate::sphere::{frechet_mean, FrechetMeanResult};
use rand::Rng;
use rayon::prelude::*;

/// Identifier recorded on shapes aligned against the estimated mean.
pub const MEAN_TEMPLATE_ID: &str = "frechet-mean";

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub basis: BasisSpec,
    /// Stopping threshold: stop when `eta <= xi` or when the relative
    /// change of `eta` between consecutive outer iterations drops below
    /// `xi` (data with irreducible shape variance never reaches small
    /// `eta` itself).
    pub xi: f64,
    pub max_outer: usize,
    pub icf: IcfConfig,
    pub karcher_tol: f64,
    pub karcher_max_iter: usize,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(basis: BasisSpec) -> Self {
        PipelineConfig {
            basis,
            xi: 1e-4,
            max_outer: 50,
            icf: IcfConfig::default(),
            karcher_tol: 1e-10,
            karcher_max_iter: 200,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub ids: Vec<String>,
    pub shapes: Vec<Shape>,
    pub mean: FrechetMeanResult,
    pub deformations: Vec<DeformationParams>,
    /// Variance `eta` after each outer iteration.
    pub eta_log: Vec<f64>,
    pub converged: bool,
    /// Set if `eta` increased beyond roundoff between outer iterations
    /// (the loop stops immediately in that case).
    pub eta_violation: bool,
    pub warnings: AlignmentWarnings,
}

/// Run the full pipeline from raw contours: least-squares smoothing,
/// centering and normalization, then the interlaced alignment loop.
pub fn estimate_pipeline(
    dataset: &[RawMultiContour],
    cfg: &PipelineConfig,
) -> Result<PipelineResult> {
    if dataset.is_empty() {
        return Err(Error::DegenerateInput("empty dataset".to_string()));
    }
    let curves = fit_dataset(dataset, cfg.basis)?;
    let ids: Vec<String> = dataset.iter().map(|r| r.id.clone()).collect();
    estimate_pipeline_from_curves(&curves, &ids, cfg)
}

/// Run the centering and alignment stages on already-smoothed curves.
pub fn estimate_pipeline_from_curves(
    curves: &[MultiCurve],
    ids: &[String],
    cfg: &PipelineConfig,
) -> Result<PipelineResult> {
    if curves.is_empty() {
        return Err(Error::DegenerateInput("empty dataset".to_string()));
    }
    if ids.len() != curves.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} ids for {} curves",
            ids.len(),
            curves.len()
        )));
    }
    let n = curves.len();

    let mut preshapes = Vec::with_capacity(n);
    let mut translations = Vec::with_capacity(n);
    for (curve, id) in curves.iter().zip(ids) {
        let (ps, t, rho) = center_and_scale(curve).map_err(|e| e.with_curve_id(id))?;
        preshapes.push(ps);
        translations.push((t, rho));
    }

    let template_idx = substream(cfg.seed, tag::PIPELINE_TEMPLATE, 0).random_range(0..n);
    let mut mu = preshapes[template_idx].clone();

    let mut eta_log = Vec::new();
    let mut converged = false;
    let mut eta_violation = false;
    let mut outcome: Option<(Vec<crate::deformation::IcfAlignment>, FrechetMeanResult)> = None;

    for outer in 0..cfg.max_outer {
        let alignments = preshapes
            .par_iter()
            .enumerate()
            .map(|(i, ps)| {
                let mut rng = substream(cfg.seed, tag::PIPELINE_ALIGN, (outer * n + i) as u64);
                icf_align(ps, &mu, &cfg.icf, &mut rng)
                    .map_err(|e| e.with_curve_id(&ids[i]))
            })
            .collect::<Result<Vec<_>>>()?;
        let aligned: Vec<PreShape> = alignments.iter().map(|a| a.aligned.clone()).collect();
        let fm = frechet_mean(&aligned, cfg.karcher_tol, cfg.karcher_max_iter)?;
        let eta = fm.variance;

        let prev = eta_log.last().copied();
        eta_log.push(eta);
        outcome = Some((alignments, fm));

        if let Some(prev) = prev {
            if eta > prev + 1e-10 {
                eta_violation = true;
                break;
            }
            let rel_change = (prev - eta).abs() / prev.max(1e-12);
            if eta <= cfg.xi || rel_change < cfg.xi {
                converged = true;
                break;
            }
        } else if eta <= cfg.xi {
            converged = true;
            break;
        }
        mu = outcome.as_ref().unwrap().1.mean.clone();
    }

    let (alignments, mean) = outcome.expect("max_outer >= 1");
    let mut warnings = AlignmentWarnings::default();
    let mut shapes = Vec::with_capacity(n);
    let mut deformations = Vec::with_capacity(n);
    for (alignment, (t, rho)) in alignments.iter().zip(&translations) {
        warnings.rotation_indeterminate |= alignment.warnings.rotation_indeterminate;
        warnings.reparam_degenerate |= alignment.warnings.reparam_degenerate;
        warnings.non_monotone |= alignment.warnings.non_monotone;
        shapes.push(Shape {
            preshape: alignment.aligned.clone(),
            template_id: MEAN_TEMPLATE_ID.to_string(),
        });
        deformations.push(DeformationParams::new(
            *t,
            *rho,
            alignment.theta,
            alignment.delta.clone(),
        )?);
    }

    Ok(PipelineResult {
        ids: ids.to_vec(),
        shapes,
        mean,
        deformations,
        eta_log,
        converged,
        eta_violation,
        warnings,
    })
}
