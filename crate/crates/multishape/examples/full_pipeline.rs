//! The complete estimation pipeline on a toy dataset: smoothing raw
//! contours, centering, and the interlaced alignment / mean loop.
//!
//! Run with: cargo run --release --example full_pipeline

use multishape::pipeline::{estimate_pipeline, PipelineConfig};
use multishape::synth::builtin_template;
use multishape::{BasisSpec, RawContour, RawMultiContour};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> multishape::Result<()> {
    // toy dataset: rotated/shifted/scaled/translated copies of one shape,
    // sampled to discrete contours like a segmentation mask boundary
    let template = builtin_template();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut records = Vec::new();
    for i in 0..10 {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let delta: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
        let scale = rng.random_range(0.8..1.4);
        let shift =
            nalgebra::Vector2::new(rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0));
        let curve = template.reparametrize(&delta)?.rotate(theta).scale(scale).translate(shift);
        let contours = (0..curve.num_components())
            .map(|j| {
                let points: Vec<[f64; 2]> = (0..160)
                    .map(|k| {
                        let t = k as f64 / 160.0;
                        let v = curve.evaluate(t).unwrap()[j];
                        [v.x, v.y]
                    })
                    .collect();
                RawContour::new(points)
            })
            .collect::<multishape::Result<Vec<_>>>()?;
        records.push(RawMultiContour { id: format!("img-{i:02}"), label: None, contours });
    }

    let cfg = PipelineConfig::new(BasisSpec::new(22)?).with_seed(5);
    let result = estimate_pipeline(&records, &cfg)?;

    println!("variance per outer iteration:");
    for (it, eta) in result.eta_log.iter().enumerate() {
        println!("  {:>2}  eta = {eta:.6e}", it + 1);
    }
    println!("converged: {}", result.converged);
    println!("\nper-curve deformation estimates:");
    println!("{:>8} {:>9} {:>9} {:>8} {:>8}", "id", "T_x", "T_y", "rho", "theta");
    for (id, d) in result.ids.iter().zip(&result.deformations) {
        println!(
            "{id:>8} {:>9.2} {:>9.2} {:>8.3} {:>8.3}",
            d.translation.x, d.translation.y, d.rho, d.theta
        );
    }
    Ok(())
}
