//! Sphere geometry: geodesic distances, log/exp maps and the intrinsic
//! mean of a cloud of shapes.
//!
//! Builds a concentrated cloud by exponentiating random tangent vectors at
//! a base shape, then recovers the base as the intrinsic (Karcher) mean.
//!
//! Run with: cargo run --release --example tangent_mean

use multishape::deformation::center_and_scale;
use multishape::sphere::{exp_map, frechet_mean, geodesic_distance, log_map, TangentVector};
use multishape::synth::builtin_template;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> multishape::Result<()> {
    let (base, _, _) = center_and_scale(&builtin_template())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // cloud: exp-map of random tangent directions, radius up to 0.4
    let mut cloud = Vec::new();
    for _ in 0..60 {
        let probe = {
            let c = base.curve().components().to_vec();
            let noisy: Vec<_> = c
                .iter()
                .map(|comp| multishape::ComponentCoefficients {
                    b: comp.b,
                    a: nalgebra::Matrix2xX::from_fn(comp.a.ncols(), |r, k| {
                        comp.a[(r, k)] + 0.3 * rng.random_range(-1.0..1.0)
                    }),
                })
                .collect();
            center_and_scale(&multishape::MultiCurve::new(noisy)?)?.0
        };
        let direction = log_map(&probe, &base)?;
        let radius = rng.random_range(0.0..0.4);
        let step = direction.scale(radius / direction.norm().max(1e-12));
        cloud.push(exp_map(&step, &base)?);
    }

    let fm = frechet_mean(&cloud, 1e-10, 200)?;
    println!(
        "intrinsic mean of {} shapes: variance {:.4e}, {} iterations, converged={}",
        cloud.len(),
        fm.variance,
        fm.iterations,
        fm.converged
    );
    println!(
        "distance from the mean to the cloud's base point: {:.4e}",
        geodesic_distance(&fm.mean, &base)?
    );

    // log/exp roundtrip through the tangent space at the mean
    let first = &cloud[0];
    let d = geodesic_distance(first, &fm.mean)?;
    let v = log_map(first, &fm.mean)?;
    println!("first shape: geodesic distance {d:.4}, tangent norm {:.4}", v.norm());
    let back = exp_map(&v, &fm.mean)?;
    let roundtrip = back.curve().axpy(-1.0, first.curve())?.norm();
    println!("exp(log(.)) roundtrip error: {roundtrip:.3e}");

    // the tangent-space sample mean vanishes at the Karcher mean
    let mut acc = TangentVector::zero_like(&fm.mean);
    for s in &cloud {
        acc = acc.add(&log_map(s, &fm.mean)?)?;
    }
    println!(
        "norm of the tangent-space sample mean: {:.3e}",
        acc.norm() / cloud.len() as f64
    );
    Ok(())
}
