//! Deformation estimation and removal.
//!
//! A curve is modeled as a deformed latent shape: shared translation, scale
//! and rotation across components, plus one starting-point shift per
//! component. Translation and scale have closed forms in coefficient space
//! ([`center_and_scale`]). Rotation and shifts are estimated jointly by the
//! iterative closest function (ICF) alignment: alternation of an orthogonal
//! Procrustes step for the angle and p independent trigonometric
//! root-finding problems for the shifts.

use crate::curve::{rotation_matrix, ComponentCoefficients, MultiCurve};
use crate::error::{Error, Result};
use nalgebra::Vector2;
use rand::Rng;
use std::f64::consts::{PI, TAU};

/// Tolerance for the pre-shape invariants (unit norm, joint centering).
pub const PRESHAPE_TOL: f64 = 1e-10;

/// The deformation variables of the joint model: translation `T`, scale
/// `rho`, rotation angle `theta` (mod 2 pi) and per-component shifts
/// `delta` (each mod 1).
#[derive(Debug, Clone)]
pub struct DeformationParams {
    pub translation: Vector2<f64>,
    pub rho: f64,
    pub theta: f64,
    pub delta: Vec<f64>,
}

impl DeformationParams {
    pub fn new(translation: Vector2<f64>, rho: f64, theta: f64, delta: Vec<f64>) -> Result<Self> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "scale parameter must be positive, got {rho}"
            )));
        }
        Ok(DeformationParams {
            translation,
            rho,
            theta: theta.rem_euclid(TAU),
            delta: delta.iter().map(|d| d.rem_euclid(1.0)).collect(),
        })
    }
}

/// A centered, unit-norm multivariate curve: a point of the pre-shape
/// sphere. `(1/p) sum_j B_j = 0` and `<c, c> = 1`, both within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct PreShape(MultiCurve);

impl PreShape {
    pub fn new(curve: MultiCurve) -> Result<Self> {
        let norm2 = curve.norm_squared();
        if (norm2 - 1.0).abs() > PRESHAPE_TOL {
            return Err(Error::DegenerateInput(format!(
                "pre-shape must have unit norm; squared norm is {norm2}"
            )));
        }
        let mean_b = curve.mean_constant();
        if mean_b.norm() > PRESHAPE_TOL {
            return Err(Error::DegenerateInput(format!(
                "pre-shape must be jointly centered; mean constant is ({}, {})",
                mean_b.x, mean_b.y
            )));
        }
        Ok(PreShape(curve))
    }

    pub fn curve(&self) -> &MultiCurve {
        &self.0
    }

    pub fn into_curve(self) -> MultiCurve {
        self.0
    }

    pub fn num_components(&self) -> usize {
        self.0.num_components()
    }

    /// Rotation keeps the sphere invariant (isometry).
    pub fn rotate(&self, theta: f64) -> PreShape {
        PreShape(self.0.rotate(theta))
    }

    /// Starting-point shifts keep the sphere invariant (isometry).
    pub fn reparametrize(&self, delta: &[f64]) -> Result<PreShape> {
        Ok(PreShape(self.0.reparametrize(delta)?))
    }

    pub fn inner_product(&self, other: &PreShape) -> Result<f64> {
        self.0.inner_product(&other.0)
    }
}

/// A pre-shape aligned to a template; the concrete representative of a
/// shape equivalence class.
#[derive(Debug, Clone)]
pub struct Shape {
    pub preshape: PreShape,
    pub template_id: String,
}

/// Remove translation and scale: returns the pre-shape together with the
/// translation `T = (1/p) sum_j B_j` and the scale
/// `rho = sqrt(||A||_F^2 + ||B - 1_p (x) T||^2)`.
pub fn center_and_scale(c: &MultiCurve) -> Result<(PreShape, Vector2<f64>, f64)> {
    let t = c.mean_constant();
    let centered = c.translate(-t);
    let rho = centered.norm();
    if rho <= 1e-12 * (1.0 + c.norm()) {
        return Err(Error::DegenerateInput(
            "curve has zero scale after centering (all components constant and equal)".to_string(),
        ));
    }
    let preshape = PreShape::new(centered.scale(1.0 / rho))?;
    Ok((preshape, t, rho))
}

/// Alignment objective `sum_j || O_theta template_j o gamma_{delta_j} - preshape_j ||^2`.
pub fn alignment_objective(
    preshape: &PreShape,
    template: &PreShape,
    theta: f64,
    delta: &[f64],
) -> Result<f64> {
    let deformed = template.curve().reparametrize(delta)?.rotate(theta);
    Ok(deformed.axpy(-1.0, preshape.curve())?.norm_squared())
}

/// Outcome of the Procrustes rotation step.
#[derive(Debug, Clone, Copy)]
pub struct RotationEstimate {
    pub theta: f64,
    /// Set when all rotation cross-terms vanish and the angle is arbitrary.
    pub indeterminate: bool,
}

/// Estimate the rotation angle aligning `template o gamma_delta` to
/// `preshape`, with the shifts held fixed.
///
/// The objective is `const - 2 (a cos theta + b sin theta)` with `a` the
/// plain inner product and `b` the skew cross-term; the two stationary
/// angles are evaluated and the minimizer returned.
pub fn estimate_rotation(
    preshape: &PreShape,
    template: &PreShape,
    delta: &[f64],
) -> Result<RotationEstimate> {
    let deformed = template.curve().reparametrize(delta)?;
    let target = preshape.curve();
    let a = deformed.inner_product(target)?;
    let mut b = 0.0;
    for (d, c) in deformed.components().iter().zip(target.components()) {
        // <J u, v> with J the quarter turn: x-row of u against y-row of v
        // minus y-row of u against x-row of v.
        b += d.b.x * c.b.y - d.b.y * c.b.x;
        for (u, v) in d.a.column_iter().zip(c.a.column_iter()) {
            b += u.x * v.y - u.y * v.x;
        }
    }
    if a.abs() < 1e-14 && b.abs() < 1e-14 {
        return Ok(RotationEstimate { theta: 0.0, indeterminate: true });
    }
    let theta1 = b.atan2(a).rem_euclid(TAU);
    let theta2 = (theta1 + PI).rem_euclid(TAU);
    // objective difference reduces to the sign of (a cos + b sin)
    let score = |th: f64| a * th.cos() + b * th.sin();
    let (s1, s2) = (score(theta1), score(theta2));
    let theta = if (s1 - s2).abs() < 1e-14 {
        theta1.min(theta2)
    } else if s1 > s2 {
        theta1
    } else {
        theta2
    };
    Ok(RotationEstimate { theta, indeterminate: false })
}

/// Outcome of the per-component shift step.
#[derive(Debug, Clone, Copy)]
pub struct ReparamEstimate {
    pub delta: f64,
    /// Set when the stationarity function vanishes identically (no shift
    /// information, e.g. zero coefficients).
    pub degenerate: bool,
}

/// Frequency-pair cross moments of `(O_theta template_a)^T preshape_a`:
/// the trace `tau_l` and skew `sigma_l` of each 2x2 diagonal block.
fn block_moments(
    preshape_a: &nalgebra::Matrix2xX<f64>,
    template_a: &nalgebra::Matrix2xX<f64>,
    theta: f64,
) -> Vec<(f64, f64)> {
    let rotated = rotation_matrix(theta) * template_a;
    let pairs = preshape_a.ncols() / 2;
    let mut out = Vec::with_capacity(pairs);
    for l in 0..pairs {
        let ts = rotated.column(2 * l);
        let tc = rotated.column(2 * l + 1);
        let ps = preshape_a.column(2 * l);
        let pc = preshape_a.column(2 * l + 1);
        let g11 = ts.dot(&ps);
        let g12 = ts.dot(&pc);
        let g21 = tc.dot(&ps);
        let g22 = tc.dot(&pc);
        out.push((g11 + g22, g12 - g21));
    }
    out
}

/// Estimate the starting-point shift of one component with the rotation
/// held fixed.
///
/// Stationary shifts solve a trigonometric equation whose coefficients come
/// from the frequency-pair blocks of the rotated-template/pre-shape cross
/// moments. All roots in [0,1) are bracketed on a uniform scan of 4(M+1)
/// subintervals (the stationarity function has at most M sign changes) and
/// refined by bisection; the objective is evaluated at every root and the
/// global minimizer returned.
pub fn solve_reparam(
    preshape_component: &ComponentCoefficients,
    template_component: &ComponentCoefficients,
    theta: f64,
) -> Result<ReparamEstimate> {
    let m = preshape_component.basis_size();
    if template_component.basis_size() != m {
        return Err(Error::DimensionMismatch(format!(
            "basis sizes differ: {} vs {}",
            m,
            template_component.basis_size()
        )));
    }
    let moments = block_moments(&preshape_component.a, &template_component.a, theta);

    // g(d) ~ d/dd of the objective; cross(d) is the part of -objective/2
    // that depends on d.
    let g = |d: f64| -> f64 {
        moments
            .iter()
            .enumerate()
            .map(|(i, &(tau, sigma))| {
                let l = (i + 1) as f64;
                let (s, c) = (TAU * l * d).sin_cos();
                2.0 * l * (tau * s - sigma * c)
            })
            .sum()
    };
    let cross = |d: f64| -> f64 {
        moments
            .iter()
            .enumerate()
            .map(|(i, &(tau, sigma))| {
                let l = (i + 1) as f64;
                let (s, c) = (TAU * l * d).sin_cos();
                tau * c + sigma * s
            })
            .sum()
    };

    let coeff_scale: f64 = moments
        .iter()
        .map(|&(tau, sigma)| tau.abs().max(sigma.abs()))
        .fold(0.0, f64::max);
    if coeff_scale < 1e-14 {
        return Ok(ReparamEstimate { delta: 0.0, degenerate: true });
    }

    let subintervals = 4 * (m + 1);
    let grid: Vec<f64> = (0..=subintervals)
        .map(|i| i as f64 / subintervals as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&d| g(d)).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..subintervals {
        let (ga, gb) = (values[i], values[i + 1]);
        if ga == 0.0 {
            roots.push(grid[i]);
        } else if ga * gb < 0.0 {
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            let mut glo = ga;
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if glo * gm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }

    if roots.is_empty() {
        // g kept one sign on the scan; fall back to the best scanned shift.
        let best = grid[..subintervals]
            .iter()
            .copied()
            .max_by(|x, y| cross(*x).partial_cmp(&cross(*y)).unwrap())
            .unwrap_or(0.0);
        return Ok(ReparamEstimate { delta: best, degenerate: false });
    }

    let delta = roots
        .iter()
        .copied()
        .max_by(|x, y| cross(*x).partial_cmp(&cross(*y)).unwrap())
        .unwrap()
        .rem_euclid(1.0);
    Ok(ReparamEstimate { delta, degenerate: false })
}

/// ICF settings: random restarts, stopping tolerance on the objective
/// decrease, and the iteration cap.
#[derive(Debug, Clone)]
pub struct IcfConfig {
    pub n_starts: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IcfConfig {
    fn default() -> Self {
        IcfConfig { n_starts: 5, tol: 1e-10, max_iter: 100 }
    }
}

/// Flags surfaced by an alignment; the pipeline keeps going on all of them.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlignmentWarnings {
    pub rotation_indeterminate: bool,
    pub reparam_degenerate: bool,
    pub non_monotone: bool,
}

impl AlignmentWarnings {
    pub fn any(&self) -> bool {
        self.rotation_indeterminate || self.reparam_degenerate || self.non_monotone
    }
}

/// Result of aligning one pre-shape to a template.
#[derive(Debug, Clone)]
pub struct IcfAlignment {
    /// `(I_p (x) O_theta^T) preshape o gamma_{1-delta}`: the pre-shape with
    /// the estimated rotation and shifts removed.
    pub aligned: PreShape,
    pub theta: f64,
    pub delta: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub warnings: AlignmentWarnings,
}

/// Align a pre-shape to a template by the ICF alternation.
///
/// Each start draws the initial shifts uniformly, then alternates the
/// rotation and shift steps until the objective decrease drops below
/// `tol`; the best start wins. The objective never increases across an
/// alternation sweep (each step is an exact block minimizer); violations
/// beyond roundoff are flagged.
pub fn icf_align<R: Rng + ?Sized>(
    preshape: &PreShape,
    template: &PreShape,
    cfg: &IcfConfig,
    rng: &mut R,
) -> Result<IcfAlignment> {
    if preshape.num_components() != template.num_components() {
        return Err(Error::DimensionMismatch(format!(
            "component counts differ: {} vs {}",
            preshape.num_components(),
            template.num_components()
        )));
    }
    if preshape.curve().basis().size() != template.curve().basis().size() {
        return Err(Error::DimensionMismatch(format!(
            "basis sizes differ: {} vs {}",
            preshape.curve().basis().size(),
            template.curve().basis().size()
        )));
    }
    if cfg.n_starts == 0 {
        return Err(Error::Config("n_starts must be at least 1".to_string()));
    }
    let p = preshape.num_components();

    let mut best: Option<(f64, f64, Vec<f64>, usize, AlignmentWarnings)> = None;
    for _ in 0..cfg.n_starts {
        let mut delta: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut theta = 0.0;
        let mut warnings = AlignmentWarnings::default();
        let mut prev = f64::INFINITY;
        let mut iterations = 0;
        for it in 0..cfg.max_iter {
            iterations = it + 1;
            let rot = estimate_rotation(preshape, template, &delta)?;
            warnings.rotation_indeterminate |= rot.indeterminate;
            theta = rot.theta;
            let mut degenerate = false;
            for j in 0..p {
                let est = solve_reparam(
                    preshape.curve().component(j),
                    template.curve().component(j),
                    theta,
                )?;
                degenerate |= est.degenerate;
                delta[j] = est.delta;
            }
            warnings.reparam_degenerate |= degenerate;
            let objective = alignment_objective(preshape, template, theta, &delta)?;
            if objective > prev + 1e-10 {
                warnings.non_monotone = true;
                prev = objective;
                break;
            }
            if prev - objective < cfg.tol {
                prev = objective;
                break;
            }
            prev = objective;
        }
        let candidate = (prev, theta, delta, iterations, warnings);
        best = Some(match best.take() {
            None => candidate,
            Some(current) => {
                if candidate.0 < current.0 {
                    candidate
                } else {
                    current
                }
            }
        });
    }

    let (objective, theta, delta, iterations, warnings) = best.expect("n_starts >= 1");
    let inverse_delta: Vec<f64> = delta.iter().map(|d| (1.0 - d).rem_euclid(1.0)).collect();
    let aligned = preshape.rotate(-theta).reparametrize(&inverse_delta)?;
    Ok(IcfAlignment {
        aligned,
        theta: theta.rem_euclid(TAU),
        delta,
        objective,
        iterations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix2xX;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_preshape(rng: &mut impl Rng, p: usize, m: usize) -> PreShape {
        let components = (0..p)
            .map(|_| ComponentCoefficients {
                b: Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                a: Matrix2xX::from_fn(m, |_, _| rng.random_range(-1.0..1.0)),
            })
            .collect::<Vec<_>>();
        let curve = MultiCurve::new(components).unwrap();
        center_and_scale(&curve).unwrap().0
    }

    fn cyclic_dist(a: f64, b: f64, period: f64) -> f64 {
        let d = (a - b).rem_euclid(period);
        d.min(period - d)
    }

    #[test]
    fn center_and_scale_identity_on_preshape() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let ps = random_preshape(&mut rng, 3, 6);
        let (again, t, rho) = center_and_scale(ps.curve()).unwrap();
        assert_abs_diff_eq!(t.norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho, 1.0, epsilon = 1e-12);
        let diff = again.curve().axpy(-1.0, ps.curve()).unwrap().norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn center_recovers_translation_and_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ps = random_preshape(&mut rng, 3, 6);
        let moved = ps.curve().scale(2.5).translate(Vector2::new(3.0, -2.0));
        let (_, t, rho) = center_and_scale(&moved).unwrap();
        assert_abs_diff_eq!(t.x, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t.y, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho, 2.5, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_scale_errors() {
        let c = MultiCurve::new(vec![
            ComponentCoefficients { b: Vector2::new(1.0, 1.0), a: Matrix2xX::zeros(4) },
            ComponentCoefficients { b: Vector2::new(1.0, 1.0), a: Matrix2xX::zeros(4) },
        ])
        .unwrap();
        assert!(center_and_scale(&c).is_err());
    }

    #[test]
    fn rotation_recovered_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let template = random_preshape(&mut rng, 3, 8);
        let delta = [0.21, 0.55, 0.9];
        let preshape = template.reparametrize(&delta).unwrap().rotate(1.234);
        let est = estimate_rotation(&preshape, &template, &delta).unwrap();
        assert!(!est.indeterminate);
        assert_abs_diff_eq!(est.theta, 1.234, epsilon = 1e-8);
    }

    #[test]
    fn rotation_zero_for_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let template = random_preshape(&mut rng, 2, 6);
        let est = estimate_rotation(&template, &template, &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(cyclic_dist(est.theta, 0.0, TAU), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn rotation_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..5 {
            let template = random_preshape(&mut rng, 2, 8);
            let preshape = random_preshape(&mut rng, 2, 8);
            let delta = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let est = estimate_rotation(&preshape, &template, &delta).unwrap();
            let n = 100_000;
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..n {
                let th = TAU * i as f64 / n as f64;
                let obj = alignment_objective(&preshape, &template, th, &delta).unwrap();
                if obj < best.0 {
                    best = (obj, th);
                }
            }
            let ours = alignment_objective(&preshape, &template, est.theta, &delta).unwrap();
            assert!(ours <= best.0 + 1e-12);
            assert!(cyclic_dist(est.theta, best.1, TAU) < 1e-4);
        }
    }

    #[test]
    fn reparam_recovers_known_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let template = random_preshape(&mut rng, 1, 10);
        let shifted = template.reparametrize(&[0.37]).unwrap();
        let est = solve_reparam(shifted.curve().component(0), template.curve().component(0), 0.0)
            .unwrap();
        assert!(!est.degenerate);
        assert_abs_diff_eq!(cyclic_dist(est.delta, 0.37, 1.0), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn reparam_identity_when_aligned() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let template = random_preshape(&mut rng, 1, 8);
        let est = solve_reparam(template.curve().component(0), template.curve().component(0), 0.0)
            .unwrap();
        assert_abs_diff_eq!(cyclic_dist(est.delta, 0.0, 1.0), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn reparam_degenerate_on_zero_coefficients() {
        let m = 6;
        let zero = ComponentCoefficients::zeros(m);
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let template = random_preshape(&mut rng, 1, m);
        let est = solve_reparam(&zero, template.curve().component(0), 0.0).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.delta, 0.0);
    }

    #[test]
    fn reparam_matches_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..10 {
            let template = random_preshape(&mut rng, 1, 8);
            let preshape = random_preshape(&mut rng, 1, 8);
            let theta = rng.random_range(0.0..TAU);
            let est = solve_reparam(preshape.curve().component(0), template.curve().component(0), theta)
                .unwrap();
            let objective = |d: f64| {
                let deformed = template.curve().reparametrize(&[d]).unwrap().rotate(theta);
                deformed.axpy(-1.0, preshape.curve()).unwrap().norm_squared()
            };
            let n = 100_000;
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..n {
                let d = i as f64 / n as f64;
                let obj = objective(d);
                if obj < best.0 {
                    best = (obj, d);
                }
            }
            assert!(objective(est.delta) <= best.0 + 1e-10);
            assert!(cyclic_dist(est.delta, best.1, 1.0) < 1e-4, "est {} grid {}", est.delta, best.1);
        }
    }

    #[test]
    fn icf_recovers_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let template = random_preshape(&mut rng, 3, 10);
        let theta0 = 2.2;
        let delta0 = [0.15, 0.62, 0.84];
        let preshape = template.reparametrize(&delta0).unwrap().rotate(theta0);
        let out = icf_align(&preshape, &template, &IcfConfig::default(), &mut rng).unwrap();
        assert!(out.objective < 1e-12, "objective {}", out.objective);
        assert!(cyclic_dist(out.theta, theta0, TAU) < 1e-6);
        for (d, d0) in out.delta.iter().zip(&delta0) {
            assert!(cyclic_dist(*d, *d0, 1.0) < 1e-6);
        }
        // the aligned shape matches the template
        let diff = out.aligned.curve().axpy(-1.0, template.curve()).unwrap().norm();
        assert!(diff < 1e-6, "aligned-template distance {diff}");
    }

    #[test]
    fn icf_on_template_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let template = random_preshape(&mut rng, 2, 8);
        let out = icf_align(&template, &template, &IcfConfig::default(), &mut rng).unwrap();
        assert!(out.objective < 1e-12, "objective {}", out.objective);
        assert!(cyclic_dist(out.theta, 0.0, TAU) < 1e-6);
        for d in &out.delta {
            assert!(cyclic_dist(*d, 0.0, 1.0) < 1e-6);
        }
    }

    // Shape invariance: aligning any deformation of a pre-shape gives the
    // same representative as aligning the pre-shape itself.
    #[test]
    fn alignment_is_orbit_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let template = random_preshape(&mut rng, 2, 8);
        let subject = random_preshape(&mut rng, 2, 8);
        let out1 = icf_align(&subject, &template, &IcfConfig::default(), &mut rng).unwrap();
        let deformed = subject.reparametrize(&[0.4, 0.7]).unwrap().rotate(0.9);
        let out2 = icf_align(&deformed, &template, &IcfConfig::default(), &mut rng).unwrap();
        let diff = out1.aligned.curve().axpy(-1.0, out2.aligned.curve()).unwrap().norm();
        assert!(diff < 1e-6, "orbit representatives differ by {diff}");
    }

    // Each block step weakly decreases the joint objective.
    #[test]
    fn block_steps_decrease_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let template = random_preshape(&mut rng, 2, 8);
        let preshape = random_preshape(&mut rng, 2, 8);
        let delta = [0.3, 0.8];
        let before = alignment_objective(&preshape, &template, 0.5, &delta).unwrap();
        let rot = estimate_rotation(&preshape, &template, &delta).unwrap();
        let after_rot = alignment_objective(&preshape, &template, rot.theta, &delta).unwrap();
        assert!(after_rot <= before + 1e-12);
        let mut delta2 = delta;
        for j in 0..2 {
            let est = solve_reparam(
                preshape.curve().component(j),
                template.curve().component(j),
                rot.theta,
            )
            .unwrap();
            delta2[j] = est.delta;
        }
        let after_delta = alignment_objective(&preshape, &template, rot.theta, &delta2).unwrap();
        assert!(after_delta <= after_rot + 1e-12);
    }
}
