//! Geometry of the unit sphere in coefficient space.
//!
//! Pre-shapes live on the centered unit sphere of the product space; the
//! geodesic distance is the arc length `arccos <f, g>`. The logarithm map
//! sends a point to the tangent space at a reference where linear statistics
//! apply, the exponential map sends it back, and the intrinsic (Karcher)
//! mean is the minimizer of the mean squared geodesic distance, computed by
//! iterative tangent averaging.

use crate::curve::{ComponentCoefficients, MultiCurve};
use crate::deformation::PreShape;
use crate::error::{Error, Result};

/// Angles closer to pi than this are treated as antipodal.
pub const ANTIPODAL_GUARD: f64 = 1e-6;
/// Angles smaller than this collapse to the zero tangent vector.
pub const SMALL_ANGLE: f64 = 1e-8;
/// Shapes farther than pi minus this from the running mean are left out of
/// a Karcher averaging round.
pub const MEAN_EXCLUSION_GUARD: f64 = 1e-3;

/// Geodesic distance `arccos <f, g>`, the inner product clamped to [-1, 1]
/// against roundoff.
pub fn geodesic_distance(f: &PreShape, g: &PreShape) -> Result<f64> {
    Ok(f.inner_product(g)?.clamp(-1.0, 1.0).acos())
}

/// An element of the tangent space at some pre-shape: coefficient blocks
/// orthogonal to the base point.
#[derive(Debug, Clone)]
pub struct TangentVector {
    coefficients: MultiCurve,
}

impl TangentVector {
    /// Wrap coefficients, checking tangency `<v, mu> = 0` (within 1e-9,
    /// relative to the vector length).
    pub fn new(coefficients: MultiCurve, base: &PreShape) -> Result<Self> {
        let dot = coefficients.inner_product(base.curve())?;
        if dot.abs() > 1e-9 * (1.0 + coefficients.norm()) {
            return Err(Error::Domain(format!(
                "coefficients are not tangent at the base point: <v, mu> = {dot}"
            )));
        }
        Ok(TangentVector { coefficients })
    }

    pub fn zero_like(mu: &PreShape) -> Self {
        let m = mu.curve().basis().size();
        let components = (0..mu.num_components())
            .map(|_| ComponentCoefficients::zeros(m))
            .collect();
        TangentVector {
            coefficients: MultiCurve::new(components).expect("valid zero curve"),
        }
    }

    pub fn coefficients(&self) -> &MultiCurve {
        &self.coefficients
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        TangentVector { coefficients: self.coefficients.scale(s) }
    }

    pub fn add(&self, other: &TangentVector) -> Result<TangentVector> {
        Ok(TangentVector {
            coefficients: self.coefficients.axpy(1.0, &other.coefficients)?,
        })
    }

    pub fn inner_product(&self, other: &TangentVector) -> Result<f64> {
        self.coefficients.inner_product(&other.coefficients)
    }
}

/// Logarithm map at `mu`: `(w / sin w)(f - cos(w) mu)` with
/// `w = d(f, mu)`. Satisfies `||log(f)|| = d(f, mu)` and `<log(f), mu> = 0`.
///
/// Near-zero angles return the zero vector (the limit); near-antipodal
/// points are rejected.
pub fn log_map(f: &PreShape, mu: &PreShape) -> Result<TangentVector> {
    let omega = geodesic_distance(f, mu)?;
    if omega > std::f64::consts::PI - ANTIPODAL_GUARD {
        return Err(Error::Antipodal { distance: omega });
    }
    if omega < SMALL_ANGLE {
        return Ok(TangentVector::zero_like(mu));
    }
    let coefficients = f
        .curve()
        .axpy(-omega.cos(), mu.curve())?
        .scale(omega / omega.sin());
    Ok(TangentVector { coefficients })
}

/// Exponential map at `mu`: `cos(||v||) mu + sin(||v||) v / ||v||`,
/// renormalized to the sphere. The zero vector returns `mu` itself.
pub fn exp_map(v: &TangentVector, mu: &PreShape) -> Result<PreShape> {
    let dot = v.coefficients.inner_product(mu.curve())?;
    if dot.abs() > 1e-6 * (1.0 + v.norm()) {
        return Err(Error::Domain(format!(
            "exp_map requires a tangent vector at mu; <v, mu> = {dot}"
        )));
    }
    let r = v.norm();
    if r == 0.0 {
        return Ok(mu.clone());
    }
    let point = mu
        .curve()
        .scale(r.cos())
        .axpy(r.sin() / r, &v.coefficients)?;
    let norm = point.norm();
    PreShape::new(point.scale(1.0 / norm))
}

/// Result of the intrinsic mean computation.
#[derive(Debug, Clone)]
pub struct FrechetMeanResult {
    pub mean: PreShape,
    /// Distance-based variance `(1/n) sum_i d(shape_i, mean)^2`.
    pub variance: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Shapes left out of the final averaging round by the antipodal guard.
    pub excluded_antipodal: usize,
}

/// Intrinsic (Karcher) mean by iterative tangent averaging:
/// `mu <- exp_mu(mean_i log_mu(shape_i))` until the tangent mean norm drops
/// below `tol`. Iterates stay on the sphere by construction; the minimized
/// objective is the mean squared geodesic distance.
pub fn frechet_mean(shapes: &[PreShape], tol: f64, max_iter: usize) -> Result<FrechetMeanResult> {
    if shapes.is_empty() {
        return Err(Error::DegenerateInput(
            "cannot average an empty set of shapes".to_string(),
        ));
    }
    let mut mu = shapes[0].clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut excluded = 0;
    let mut variance = 0.0;
    for it in 0..=max_iter {
        iterations = it;
        let mut sum = TangentVector::zero_like(&mu);
        let mut used = 0usize;
        excluded = 0;
        variance = 0.0;
        for s in shapes {
            let d = geodesic_distance(s, &mu)?;
            variance += d * d;
            if d > std::f64::consts::PI - MEAN_EXCLUSION_GUARD {
                excluded += 1;
                continue;
            }
            sum = sum.add(&log_map(s, &mu)?)?;
            used += 1;
        }
        variance /= shapes.len() as f64;
        if used == 0 {
            return Err(Error::Numerical(
                "every shape is antipodal to the running mean".to_string(),
            ));
        }
        let tangent_mean = sum.scale(1.0 / used as f64);
        if tangent_mean.norm() < tol {
            converged = true;
            break;
        }
        if it == max_iter {
            break;
        }
        mu = exp_map(&tangent_mean, &mu)?;
    }
    Ok(FrechetMeanResult {
        mean: mu,
        variance,
        iterations,
        converged,
        excluded_antipodal: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::center_and_scale;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix2xX, Vector2};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_preshape(rng: &mut impl Rng, p: usize, m: usize) -> PreShape {
        let components = (0..p)
            .map(|_| ComponentCoefficients {
                b: Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                a: Matrix2xX::from_fn(m, |_, _| rng.random_range(-1.0..1.0)),
            })
            .collect::<Vec<_>>();
        center_and_scale(&MultiCurve::new(components).unwrap()).unwrap().0
    }

    #[test]
    fn distance_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let f = random_preshape(&mut rng, 2, 6);
        // arccos near +-1 is ill conditioned: sqrt(eps) ~ 1.5e-8 is the
        // attainable floor for the self-distance.
        assert_abs_diff_eq!(geodesic_distance(&f, &f).unwrap(), 0.0, epsilon = 1e-7);
        let minus = PreShape::new(f.curve().scale(-1.0)).unwrap();
        assert_abs_diff_eq!(
            geodesic_distance(&f, &minus).unwrap(),
            std::f64::consts::PI,
            epsilon = 1e-7
        );
    }

    #[test]
    fn distance_orthogonal_pair() {
        // two unit curves with disjoint coefficient support
        let mut a1 = Matrix2xX::zeros(4);
        a1[(0, 0)] = 1.0;
        let mut a2 = Matrix2xX::zeros(4);
        a2[(1, 2)] = 1.0;
        let f = PreShape::new(
            MultiCurve::new(vec![ComponentCoefficients { b: Vector2::zeros(), a: a1 }]).unwrap(),
        )
        .unwrap();
        let g = PreShape::new(
            MultiCurve::new(vec![ComponentCoefficients { b: Vector2::zeros(), a: a2 }]).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            geodesic_distance(&f, &g).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_map_at_base_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mu = random_preshape(&mut rng, 2, 6);
        let v = log_map(&mu, &mu).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn log_map_norm_and_tangency() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let f = random_preshape(&mut rng, 2, 8);
            let mu = random_preshape(&mut rng, 2, 8);
            let v = log_map(&f, &mu).unwrap();
            let d = geodesic_distance(&f, &mu).unwrap();
            assert_abs_diff_eq!(v.norm(), d, epsilon = 1e-10);
            let dot = v.coefficients().inner_product(mu.curve()).unwrap();
            assert_abs_diff_eq!(dot, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn antipodal_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mu = random_preshape(&mut rng, 2, 6);
        let minus = PreShape::new(mu.curve().scale(-1.0)).unwrap();
        assert!(matches!(log_map(&minus, &mu), Err(Error::Antipodal { .. })));
    }

    #[test]
    fn exp_of_zero_is_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mu = random_preshape(&mut rng, 2, 6);
        let z = TangentVector::zero_like(&mu);
        let out = exp_map(&z, &mu).unwrap();
        assert_eq!(out.curve(), mu.curve());
    }

    #[test]
    fn exp_log_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..20 {
            let f = random_preshape(&mut rng, 2, 8);
            let mu = random_preshape(&mut rng, 2, 8);
            let v = log_map(&f, &mu).unwrap();
            let back = exp_map(&v, &mu).unwrap();
            let diff = back.curve().axpy(-1.0, f.curve()).unwrap().norm();
            assert!(diff < 1e-9, "exp(log(f)) missed f by {diff}");
            let v2 = log_map(&back, &mu).unwrap();
            let vdiff = v2.coefficients().axpy(-1.0, v.coefficients()).unwrap().norm();
            assert!(vdiff < 1e-9, "log(exp(v)) missed v by {vdiff}");
        }
    }

    #[test]
    fn exp_quarter_turn_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let mu = random_preshape(&mut rng, 2, 8);
        let f = random_preshape(&mut rng, 2, 8);
        let dir = log_map(&f, &mu).unwrap();
        let half_pi = dir.scale(std::f64::consts::FRAC_PI_2 / dir.norm());
        let out = exp_map(&half_pi, &mu).unwrap();
        assert_abs_diff_eq!(out.inner_product(&mu).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn mean_of_identical_shapes_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let s = random_preshape(&mut rng, 2, 6);
        let shapes = vec![s.clone(), s.clone(), s.clone()];
        let fm = frechet_mean(&shapes, 1e-10, 200).unwrap();
        assert!(fm.converged);
        assert_eq!(fm.mean.curve(), s.curve());
        assert_eq!(fm.variance, 0.0);
    }

    #[test]
    fn two_point_mean_is_geodesic_midpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        for _ in 0..5 {
            let f = random_preshape(&mut rng, 2, 8);
            let g = random_preshape(&mut rng, 2, 8);
            let fm = frechet_mean(&[f.clone(), g.clone()], 1e-12, 500).unwrap();
            assert!(fm.converged);
            // slerp oracle: midpoint = (sin(w/2) f + sin(w/2) g) / sin(w)
            let w = geodesic_distance(&f, &g).unwrap();
            let mid = f
                .curve()
                .axpy(1.0, g.curve())
                .unwrap()
                .scale((0.5 * w).sin() / w.sin());
            let diff = fm.mean.curve().axpy(-1.0, &mid).unwrap().norm();
            assert!(diff < 1e-8, "midpoint missed by {diff}");
        }
    }

    #[test]
    fn empty_input_errors() {
        assert!(frechet_mean(&[], 1e-10, 100).is_err());
    }

    // The Karcher solution is a local minimizer of the mean squared
    // geodesic distance: nudging the mean in random tangent directions
    // cannot decrease the objective.
    #[test]
    fn mean_is_local_minimizer_of_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let base = random_preshape(&mut rng, 2, 8);
        let shapes: Vec<PreShape> = (0..10)
            .map(|_| {
                let other = random_preshape(&mut rng, 2, 8);
                let v = log_map(&other, &base).unwrap().scale(0.1);
                exp_map(&v, &base).unwrap()
            })
            .collect();
        let fm = frechet_mean(&shapes, 1e-12, 500).unwrap();
        let objective = |mu: &PreShape| -> f64 {
            shapes
                .iter()
                .map(|s| geodesic_distance(s, mu).unwrap().powi(2))
                .sum::<f64>()
                / shapes.len() as f64
        };
        let at_mean = objective(&fm.mean);
        for _ in 0..5 {
            let probe = random_preshape(&mut rng, 2, 8);
            let dir = log_map(&probe, &fm.mean).unwrap();
            let step = dir.scale(1e-3 / dir.norm());
            let moved = exp_map(&step, &fm.mean).unwrap();
            assert!(objective(&moved) >= at_mean - 1e-12);
        }
    }
}
