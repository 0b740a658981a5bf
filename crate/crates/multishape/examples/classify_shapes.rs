//! Shape classification: enlarged central component vs baseline, under
//! random rotations and starting-point shifts.
//!
//! Builds two synthetic classes (the second scales the central component
//! by 1.3), deforms every curve, and compares aligned-shape predictors
//! against raw unaligned coefficients with PLS and group-lasso classifiers.
//!
//! Run with: cargo run --release --example classify_shapes

use multishape::classify::{
    build_design, cross_validate, group_lasso, CvConfig, DesignScheme, GroupingKind, HyperGrid,
    Method,
};
use multishape::curve::{ComponentCoefficients, MultiCurve};
use multishape::pipeline::PipelineConfig;
use multishape::synth::{builtin_template, scenario2_deform};
use multishape::BasisSpec;
use nalgebra::Matrix2xX;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn two_class_curves(n: usize, seed: u64) -> multishape::Result<(Vec<MultiCurve>, Vec<u8>)> {
    let template = builtin_template();
    let mut enlarged = template.components().to_vec();
    enlarged[2] = ComponentCoefficients { b: enlarged[2].b, a: &enlarged[2].a * 1.3 };
    let enlarged = MultiCurve::new(enlarged)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curves = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i % 2 == 0);
        let base = if label == 1 { &enlarged } else { &template };
        let noisy: Vec<ComponentCoefficients> = base
            .components()
            .iter()
            .map(|c| ComponentCoefficients {
                b: c.b,
                a: Matrix2xX::from_fn(c.a.ncols(), |r, k| {
                    c.a[(r, k)] + 0.5 * rng.sample::<f64, _>(rand_distr::StandardNormal)
                }),
            })
            .collect();
        curves.push(MultiCurve::new(noisy)?);
        labels.push(label);
    }
    Ok((scenario2_deform(&curves, seed ^ 0xabcd)?, labels))
}

fn main() -> multishape::Result<()> {
    let (curves, labels) = two_class_curves(80, 17)?;
    let cfg = PipelineConfig::new(BasisSpec::new(22)?).with_seed(17);
    let cv = CvConfig { folds: 5, inner_folds: 3, seed: 17 };

    println!("{:>7} {:>7} {:>10}", "design", "method", "accuracy");
    for scheme in [DesignScheme::Multi, DesignScheme::Raw] {
        let design = build_design(&curves, &labels, scheme, &cfg, GroupingKind::ByComponent)?;
        for method in [Method::Pls, Method::Gl1] {
            let grid = match method {
                Method::Gl1 | Method::Gl2 => {
                    HyperGrid::Lambdas(group_lasso::lambda_grid(&design))
                }
                _ => HyperGrid::Components((1..=15).collect()),
            };
            let report = cross_validate(&design, method, &grid, &cv)?;
            println!("{:>7} {:>7} {:>9.2}%", scheme.to_string(), method.to_string(), report.mean_accuracy);
        }
    }
    println!("\naligned multivariate shapes keep the class signal; raw deformed");
    println!("coefficients scatter it across the basis and fall to chance.");
    Ok(())
}
