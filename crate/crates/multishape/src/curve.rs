//! Coefficient algebra for multivariate closed planar curves.
//!
//! A component curve is `C_j(t) = B_j + A_j phi(t)` with `B_j` a 2-vector
//! (constant term, image units) and `A_j` a 2 x M matrix of Fourier
//! coefficients. A [`MultiCurve`] stacks p such components sharing one
//! [`BasisSpec`].
//!
//! Everything here is exact arithmetic on coefficients: inner products,
//! rotations and starting-point shifts never touch a quadrature grid.
//! Quadrature appears only in test oracles.

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix2xX, Vector2};
use std::f64::consts::PI;

/// Counter-clockwise plane rotation by `theta` radians.
pub fn rotation_matrix(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Fourier coefficients of one planar component: constant term `b` and a
/// 2 x M coefficient matrix `a` (row 0 = x coordinate, row 1 = y).
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCoefficients {
    pub b: Vector2<f64>,
    pub a: Matrix2xX<f64>,
}

impl ComponentCoefficients {
    pub fn new(b: Vector2<f64>, a: Matrix2xX<f64>) -> Result<Self> {
        if a.ncols() < 2 || a.ncols() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix must have an even number >= 2 of columns, got {}",
                a.ncols()
            )));
        }
        if !b.iter().all(|v| v.is_finite()) || !a.iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateInput(
                "non-finite coefficient entry".to_string(),
            ));
        }
        Ok(ComponentCoefficients { b, a })
    }

    /// All-zero coefficients for basis size `m`.
    pub fn zeros(m: usize) -> Self {
        ComponentCoefficients {
            b: Vector2::zeros(),
            a: Matrix2xX::zeros(m),
        }
    }

    pub fn basis_size(&self) -> usize {
        self.a.ncols()
    }

    /// Evaluate `B + A phi(t)`.
    pub fn evaluate(&self, t: f64, spec: BasisSpec) -> Result<Vector2<f64>> {
        let phi = spec.evaluate(t)?;
        let mut out = self.b;
        for (k, w) in phi.iter().enumerate() {
            out += self.a.column(k) * *w;
        }
        Ok(out)
    }

    /// Squared H-norm of the component: ||A||_F^2 + ||B||^2.
    pub fn norm_squared(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>() + self.b.norm_squared()
    }
}

/// A p-component closed planar curve stored as Fourier coefficient blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCurve {
    components: Vec<ComponentCoefficients>,
}

impl MultiCurve {
    pub fn new(components: Vec<ComponentCoefficients>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch(
                "a multivariate curve needs at least one component".to_string(),
            ));
        }
        let m = components[0].basis_size();
        if components.iter().any(|c| c.basis_size() != m) {
            return Err(Error::DimensionMismatch(
                "all components must share one basis size".to_string(),
            ));
        }
        Ok(MultiCurve { components })
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn basis(&self) -> BasisSpec {
        // Validated even and >= 2 at construction.
        BasisSpec::new(self.components[0].basis_size()).expect("valid basis size")
    }

    pub fn components(&self) -> &[ComponentCoefficients] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ComponentCoefficients {
        &self.components[j]
    }

    fn check_compatible(&self, other: &MultiCurve) -> Result<()> {
        if self.num_components() != other.num_components() {
            return Err(Error::DimensionMismatch(format!(
                "component counts differ: {} vs {}",
                self.num_components(),
                other.num_components()
            )));
        }
        if self.basis().size() != other.basis().size() {
            return Err(Error::DimensionMismatch(format!(
                "basis sizes differ: {} vs {}",
                self.basis().size(),
                other.basis().size()
            )));
        }
        Ok(())
    }

    /// Evaluate every component at `t`, returning the stacked 2p values.
    pub fn evaluate(&self, t: f64) -> Result<Vec<Vector2<f64>>> {
        let spec = self.basis();
        self.components.iter().map(|c| c.evaluate(t, spec)).collect()
    }

    /// Product-space inner product, exact in coefficient space:
    /// `sum_j (<A_j, A'_j>_F + <B_j, B'_j>)`.
    pub fn inner_product(&self, other: &MultiCurve) -> Result<f64> {
        self.check_compatible(other)?;
        let mut acc = 0.0;
        for (f, g) in self.components.iter().zip(&other.components) {
            acc += f.b.dot(&g.b);
            acc += f.a.iter().zip(g.a.iter()).map(|(x, y)| x * y).sum::<f64>();
        }
        Ok(acc)
    }

    pub fn norm_squared(&self) -> f64 {
        self.components.iter().map(|c| c.norm_squared()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rotate every component in the image plane: B and A are left-multiplied
    /// by the rotation of angle `theta`. Norm preserving.
    pub fn rotate(&self, theta: f64) -> MultiCurve {
        let o = rotation_matrix(theta);
        let components = self
            .components
            .iter()
            .map(|c| ComponentCoefficients {
                b: o * c.b,
                a: &o * &c.a,
            })
            .collect();
        MultiCurve { components }
    }

    /// Shift the traversal starting point of component j by `delta[j]`:
    /// `A_j <- A_j P_{delta_j}` with B unchanged. The reparametrized curve
    /// evaluated at t equals the original evaluated at `mod(t + delta_j, 1)`.
    /// Arguments are reduced modulo 1 (the shifts form a cyclic group).
    pub fn reparametrize(&self, delta: &[f64]) -> Result<MultiCurve> {
        if delta.len() != self.num_components() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} shift parameters, got {}",
                self.num_components(),
                delta.len()
            )));
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::Domain("non-finite shift parameter".to_string()));
        }
        let m = self.basis().size();
        let components = self
            .components
            .iter()
            .zip(delta)
            .map(|(c, &d)| ComponentCoefficients {
                b: c.b,
                a: ReparamMatrix::new(d, m).apply_right(&c.a),
            })
            .collect();
        Ok(MultiCurve { components })
    }

    /// Multiply every coefficient by `s`.
    pub fn scale(&self, s: f64) -> MultiCurve {
        let components = self
            .components
            .iter()
            .map(|c| ComponentCoefficients {
                b: c.b * s,
                a: &c.a * s,
            })
            .collect();
        MultiCurve { components }
    }

    /// Subtract `t` from every constant term (shift all components).
    pub fn translate(&self, t: Vector2<f64>) -> MultiCurve {
        let components = self
            .components
            .iter()
            .map(|c| ComponentCoefficients {
                b: c.b + t,
                a: c.a.clone(),
            })
            .collect();
        MultiCurve { components }
    }

    /// Mean of the component constant terms, `(1/p) sum_j B_j`.
    pub fn mean_constant(&self) -> Vector2<f64> {
        let sum: Vector2<f64> = self.components.iter().map(|c| c.b).sum();
        sum / self.num_components() as f64
    }

    /// Coefficient-wise linear combination `self + s * other`.
    pub fn axpy(&self, s: f64, other: &MultiCurve) -> Result<MultiCurve> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(f, g)| ComponentCoefficients {
                b: f.b + g.b * s,
                a: &f.a + &g.a * s,
            })
            .collect();
        Ok(MultiCurve { components })
    }
}

/// The block-diagonal orthogonal matrix `P_delta` realizing a starting-point
/// shift on Fourier coefficients. Block `l` (l = 1..M/2) is the 2x2 rotation
/// of angle `2 pi l delta` acting on the (sin_l, cos_l) coefficient pair:
///
/// ```text
/// [ cos(2 pi l d)   sin(2 pi l d) ]
/// [ -sin(2 pi l d)  cos(2 pi l d) ]
/// ```
///
/// so that `(A P_delta) phi(t) = A phi(mod(t + delta, 1))`. The map
/// `delta -> P_delta` is a group homomorphism with period 1; in particular
/// `P_{1-delta}` is the inverse (transpose) of `P_delta`.
#[derive(Debug, Clone)]
pub struct ReparamMatrix {
    delta: f64,
    m: usize,
}

impl ReparamMatrix {
    /// `delta` is reduced modulo 1; `m` is the basis size (even).
    pub fn new(delta: f64, m: usize) -> Self {
        ReparamMatrix {
            delta: delta.rem_euclid(1.0),
            m,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The 2x2 block for frequency pair `l` (1-based).
    pub fn block(&self, l: usize) -> Matrix2<f64> {
        let (s, c) = (2.0 * PI * l as f64 * self.delta).sin_cos();
        Matrix2::new(c, s, -s, c)
    }

    /// Right-multiply a 2 x M coefficient matrix by `P_delta`, block-wise.
    pub fn apply_right(&self, a: &Matrix2xX<f64>) -> Matrix2xX<f64> {
        debug_assert_eq!(a.ncols(), self.m);
        let mut out = Matrix2xX::zeros(self.m);
        for l in 1..=self.m / 2 {
            let (s, c) = (2.0 * PI * l as f64 * self.delta).sin_cos();
            let u = a.column(2 * l - 2);
            let v = a.column(2 * l - 1);
            // new_sin = u c - v s ; new_cos = u s + v c
            out.set_column(2 * l - 2, &(u * c - v * s));
            out.set_column(2 * l - 1, &(u * s + v * c));
        }
        out
    }

    /// Dense M x M matrix (test and inspection use).
    pub fn to_matrix(&self) -> nalgebra::DMatrix<f64> {
        let mut p = nalgebra::DMatrix::zeros(self.m, self.m);
        for l in 1..=self.m / 2 {
            let blk = self.block(l);
            p.view_mut((2 * l - 2, 2 * l - 2), (2, 2)).copy_from(&blk);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_curve(rng: &mut impl Rng, p: usize, m: usize) -> MultiCurve {
        let components = (0..p)
            .map(|_| ComponentCoefficients {
                b: Vector2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                a: Matrix2xX::from_fn(m, |_, _| rng.random_range(-1.0..1.0)),
            })
            .collect();
        MultiCurve::new(components).unwrap()
    }

    #[test]
    fn constant_curve_evaluates_to_b() {
        let c = ComponentCoefficients {
            b: Vector2::new(3.0, -1.5),
            a: Matrix2xX::zeros(6),
        };
        let mc = MultiCurve::new(vec![c]).unwrap();
        for t in [0.0, 0.3, 0.77, 1.0] {
            let v = mc.evaluate(t).unwrap();
            assert_abs_diff_eq!(v[0].x, 3.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v[0].y, -1.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_curve_equal_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mc = random_curve(&mut rng, 3, 8);
        let v0 = mc.evaluate(0.0).unwrap();
        let v1 = mc.evaluate(1.0).unwrap();
        for (a, b) in v0.iter().zip(&v1) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_frequency_cosine_coefficient() {
        // Single component, B = 0, coefficient 1 on phi_2 (x row), t = 0.
        let mut a = Matrix2xX::zeros(2);
        a[(0, 1)] = 1.0;
        let mc = MultiCurve::new(vec![ComponentCoefficients { b: Vector2::zeros(), a }]).unwrap();
        let v = mc.evaluate(0.0).unwrap();
        assert_abs_diff_eq!(v[0].x, std::f64::consts::SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v[0].y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_product_of_unit_coefficients() {
        let mut a = Matrix2xX::zeros(4);
        a[(0, 0)] = 0.6;
        a[(1, 2)] = 0.8;
        let mc = MultiCurve::new(vec![ComponentCoefficients { b: Vector2::zeros(), a }]).unwrap();
        assert_abs_diff_eq!(mc.inner_product(&mc).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_product_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_curve(&mut rng, 2, 6);
        let g = f.scale(2.0);
        let ff = f.inner_product(&f).unwrap();
        let fg = f.inner_product(&g).unwrap();
        assert_abs_diff_eq!(fg, 2.0 * ff, epsilon = 1e-12);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_curve(&mut rng, 2, 6);
        let g = random_curve(&mut rng, 3, 6);
        let h = random_curve(&mut rng, 2, 8);
        assert!(f.inner_product(&g).is_err());
        assert!(f.inner_product(&h).is_err());
    }

    // Quadrature oracle: coefficient-space inner product equals the
    // integral inner product sum_j int f_j . g_j on random coefficients.
    #[test]
    fn inner_product_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_curve(&mut rng, 2, 8);
        let g = random_curve(&mut rng, 2, 8);
        let n = 10_000;
        let mut quad = 0.0;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let fv = f.evaluate(t).unwrap();
            let gv = g.evaluate(t).unwrap();
            let dot: f64 = fv.iter().zip(&gv).map(|(x, y)| x.dot(y)).sum();
            quad += w * dot / n as f64;
        }
        let exact = f.inner_product(&g).unwrap();
        assert_abs_diff_eq!(exact, quad, epsilon = 1e-6);
    }

    #[test]
    fn rotate_identity_and_half_turn() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_curve(&mut rng, 2, 6);
        let same = c.rotate(0.0);
        let negated = c.rotate(std::f64::consts::PI);
        for (orig, (id, neg)) in c
            .components()
            .iter()
            .zip(same.components().iter().zip(negated.components()))
        {
            assert_abs_diff_eq!((orig.b - id.b).norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!((orig.b + neg.b).norm(), 0.0, epsilon = 1e-12);
            for (x, (y, z)) in orig.a.iter().zip(id.a.iter().zip(neg.a.iter())) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-15);
                assert_abs_diff_eq!(*x, -*z, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn reparametrize_identity_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = random_curve(&mut rng, 3, 8);
        let r = c.reparametrize(&[0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            c.axpy(-1.0, &r).unwrap().norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    // Pointwise-evaluation oracle fixing the shift orientation: the
    // reparametrized curve at t equals the original at mod(t - (1-d), 1).
    #[test]
    fn reparametrize_shifts_the_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = random_curve(&mut rng, 2, 10);
        let d = [0.3, 0.815];
        let r = c.reparametrize(&d).unwrap();
        for i in 0..100 {
            let t = i as f64 / 100.0;
            let shifted = r.evaluate(t).unwrap();
            for (j, &dj) in d.iter().enumerate() {
                let orig = c.evaluate((t - (1.0 - dj)).rem_euclid(1.0)).unwrap();
                assert_abs_diff_eq!((shifted[j] - orig[j]).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn reparametrize_group_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random_curve(&mut rng, 2, 8);
        let d = [0.37, 0.91];
        let inv = [1.0 - 0.37, 1.0 - 0.91];
        let back = c.reparametrize(&d).unwrap().reparametrize(&inv).unwrap();
        assert_abs_diff_eq!(c.axpy(-1.0, &back).unwrap().norm(), 0.0, epsilon = 1e-12);
    }

    proptest! {
        // Isometry: rotations and shifts preserve the H-norm.
        #[test]
        fn isometry_property(theta in 0.0..std::f64::consts::TAU,
                             d1 in 0.0..1.0f64, d2 in 0.0..1.0f64, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_curve(&mut rng, 2, 8);
            let moved = c.reparametrize(&[d1, d2]).unwrap().rotate(theta);
            prop_assert!((moved.norm() - c.norm()).abs() < 1e-12);
        }

        // Group structure of the shifts: P_d P_d' = P_{mod(d+d',1)}.
        #[test]
        fn reparam_blocks_compose(d1 in 0.0..1.0f64, d2 in 0.0..1.0f64) {
            let m = 8;
            let lhs = ReparamMatrix::new(d1, m).to_matrix() * ReparamMatrix::new(d2, m).to_matrix();
            let rhs = ReparamMatrix::new((d1 + d2).rem_euclid(1.0), m).to_matrix();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn inner_product_symmetric(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_curve(&mut rng, 2, 6);
            let g = random_curve(&mut rng, 2, 6);
            let fg = f.inner_product(&g).unwrap();
            let gf = g.inner_product(&f).unwrap();
            prop_assert!((fg - gf).abs() < 1e-14);
            // positive definite on nonzero coefficient sets
            prop_assert!(f.inner_product(&f).unwrap() > 0.0);
        }
    }
}
