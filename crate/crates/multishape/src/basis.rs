//! Fourier basis on [0,1] used to represent closed planar curves.
//!
//! The basis is indexed from 1 and pairs a sine with a cosine of the same
//! frequency: for k odd, `phi_k(t) = sqrt(2) sin((k+1) pi t)`, and for k
//! even, `phi_k(t) = sqrt(2) cos(k pi t)`. Pair `l = 1..M/2` therefore
//! oscillates with frequency `l` (cycles per unit interval):
//!
//! ```text
//! phi_1 = sqrt(2) sin(2 pi t)    phi_2 = sqrt(2) cos(2 pi t)
//! phi_3 = sqrt(2) sin(4 pi t)    phi_4 = sqrt(2) cos(4 pi t)
//! ...
//! phi_{M-1} = sqrt(2) sin(M pi t)    phi_M = sqrt(2) cos(M pi t)
//! ```
//!
//! All functions are 1-periodic, have zero mean, and are orthonormal in
//! L2([0,1]); the constant function is deliberately not part of the basis
//! (constant terms are stored separately as the `B` block of a curve).

use crate::error::{Error, Result};
use std::f64::consts::PI;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Number of Fourier basis functions; must be even and at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    m: usize,
}

impl BasisSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::Config(format!(
                "basis size must be a positive even integer >= 2, got {m}"
            )));
        }
        Ok(BasisSpec { m })
    }

    /// Number of basis functions M.
    pub fn size(&self) -> usize {
        self.m
    }

    /// Number of sine/cosine pairs M/2.
    pub fn pairs(&self) -> usize {
        self.m / 2
    }

    /// Evaluate all M basis functions at `t` in [0,1].
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!(
                "basis argument t = {t} outside [0, 1]"
            )));
        }
        let mut out = vec![0.0; self.m];
        for l in 1..=self.pairs() {
            let angle = 2.0 * PI * l as f64 * t;
            out[2 * l - 2] = SQRT_2 * angle.sin();
            out[2 * l - 1] = SQRT_2 * angle.cos();
        }
        Ok(out)
    }
}

/// Evaluate the first M Fourier basis functions at `t`.
pub fn eval_basis(t: f64, spec: BasisSpec) -> Result<Vec<f64>> {
    spec.evaluate(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_odd_or_small_m() {
        assert!(BasisSpec::new(0).is_err());
        assert!(BasisSpec::new(3).is_err());
        assert!(BasisSpec::new(2).is_ok());
        assert!(BasisSpec::new(22).is_ok());
    }

    #[test]
    fn values_at_zero() {
        let spec = BasisSpec::new(2).unwrap();
        let v = spec.evaluate(0.0).unwrap();
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn values_at_half() {
        let spec = BasisSpec::new(2).unwrap();
        let v = spec.evaluate(0.5).unwrap();
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], -SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn domain_error_outside_unit_interval() {
        let spec = BasisSpec::new(4).unwrap();
        assert!(spec.evaluate(-0.01).is_err());
        assert!(spec.evaluate(1.01).is_err());
    }

    #[test]
    fn periodic_endpoints_match() {
        let spec = BasisSpec::new(8).unwrap();
        let a = spec.evaluate(0.0).unwrap();
        let b = spec.evaluate(1.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    // Trapezoid-rule quadrature oracle: the Gram matrix of phi_1..phi_4 over
    // a 10^4-point grid must be the identity to 1e-6.
    #[test]
    fn gram_matrix_is_identity() {
        let spec = BasisSpec::new(4).unwrap();
        let n = 10_000;
        let mut gram = [[0.0f64; 4]; 4];
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let v = spec.evaluate(t).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    gram[r][c] += w * v[r] * v[c] / n as f64;
                }
            }
        }
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[r][c], expect, epsilon = 1e-6);
            }
        }
    }
}
