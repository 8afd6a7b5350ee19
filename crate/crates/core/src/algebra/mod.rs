//! Exact arithmetic over a prime field: scalars, square matrices, sparse multivariate
//! polynomials with scalar or matrix coefficients, and rank/determinant kernels.

pub mod field;
pub mod linalg;
pub mod matpoly;
pub mod matrix;
pub mod monomial;
pub mod poly;
pub mod unipoly;

pub use field::{is_prime, primes, Field, DEFAULT_MODULUS};
pub use linalg::{det, det_poly, inverse, rank_over_field, Echelon};
pub use matpoly::{poly_mul, MatPoly};
pub use matrix::Mat;
pub use monomial::{all_exponents, ExponentVector};
pub use poly::ScalarPoly;
pub use unipoly::UniPoly;

use crate::error::Result;

/// Anything that evaluates at a point of the ambient space.
pub trait Evaluate {
    type Output;
    fn evaluate_at(&self, point: &[u64]) -> Result<Self::Output>;
}

impl Evaluate for ScalarPoly {
    type Output = u64;
    fn evaluate_at(&self, point: &[u64]) -> Result<u64> {
        self.eval(point)
    }
}

impl Evaluate for MatPoly {
    type Output = Mat;
    fn evaluate_at(&self, point: &[u64]) -> Result<Mat> {
        self.eval(point)
    }
}

/// Evaluates a scalar or matrix polynomial by per-term power products.
pub fn eval_poly<P: Evaluate>(p: &P, point: &[u64]) -> Result<P::Output> {
    p.evaluate_at(point)
}
