//! Smooth a raw discretized contour into Fourier coefficients.
//!
//! Samples a wavy closed curve at uneven density, fits coefficient
//! matrices by least squares on the arc-length grid, and reports the
//! pointwise residual.
//!
//! Run with: cargo run --release --example fit_contours

use multishape::{fit_curve, BasisSpec, RawContour, RawMultiContour};

fn main() -> multishape::Result<()> {
    // a closed "blob": unit circle with two bumps, denser points on one side
    let mut points = Vec::new();
    let k = 300;
    for i in 0..k {
        let u = i as f64 / k as f64;
        // uneven sampling: quadratic warp of the parameter
        let t = std::f64::consts::TAU * (0.7 * u + 0.3 * u * u);
        let radius = 100.0 + 12.0 * (2.0 * t).cos() + 6.0 * (3.0 * t).sin();
        points.push([radius * t.cos() + 400.0, radius * t.sin() + 300.0]);
    }
    let record = RawMultiContour {
        id: "blob".into(),
        label: None,
        contours: vec![RawContour::new(points)?],
    };

    let spec = BasisSpec::new(22)?;
    let curve = fit_curve(&record, spec)?;
    let component = curve.component(0);
    println!("fitted p={} components with M={}", curve.num_components(), spec.size());
    println!(
        "constant term B = ({:.2}, {:.2})  (the contour's fitted center)",
        component.b.x, component.b.y
    );
    let energy: f64 = component.a.iter().map(|v| v * v).sum();
    println!("coefficient energy ||A||_F = {:.3}", energy.sqrt());

    // residual against the sampled points on the fit's own grid
    let (pts, grid) = record.contours[0].normalized_points()?;
    let mut max_residual: f64 = 0.0;
    for (&t, p) in grid.iter().zip(&pts) {
        let v = curve.evaluate(t)?[0];
        max_residual = max_residual.max((v.x - p[0]).hypot(v.y - p[1]));
    }
    println!("max pointwise residual: {max_residual:.4} image units");
    Ok(())
}
