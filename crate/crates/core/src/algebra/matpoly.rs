//! Sparse multivariate polynomials with `w x w` matrix coefficients.

use std::collections::BTreeMap;

use super::field::Field;
use super::matrix::Mat;
use super::monomial::ExponentVector;
use super::poly::{check_compatible, check_point, monomial_value, shifted_monomial, ScalarPoly};
use crate::error::{PitError, Result};

/// `D(x) = sum_e D_e x^e` with `D_e` a `w x w` matrix. All-zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatPoly {
    field: Field,
    n: usize,
    w: usize,
    terms: BTreeMap<ExponentVector, Mat>,
}

impl MatPoly {
    pub fn zero(field: Field, n: usize, w: usize) -> Self {
        MatPoly { field, n, w, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, n: usize, m: Mat) -> Self {
        Self::monomial(field, ExponentVector::zeros(n), m)
    }

    pub fn identity(field: Field, n: usize, w: usize) -> Self {
        Self::constant(field, n, Mat::identity(w))
    }

    pub fn monomial(field: Field, e: ExponentVector, m: Mat) -> Self {
        let mut p = Self::zero(field, e.len(), m.width());
        p.add_term(e, m);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (ExponentVector, Mat)>>(field: Field, n: usize, w: usize, it: I) -> Result<Self> {
        let mut p = Self::zero(field, n, w);
        for (e, m) in it {
            if e.len() != n {
                return Err(PitError::Structural(format!("exponent vector of length {} in ambient {n}", e.len())));
            }
            if m.width() != w {
                return Err(PitError::Structural(format!("coefficient of width {} in a width-{w} polynomial", m.width())));
            }
            p.add_term(e, m);
        }
        Ok(p)
    }

    /// Assembles from a `w x w` grid of scalar polynomials.
    pub fn from_entries(grid: &[Vec<ScalarPoly>]) -> Result<Self> {
        let w = grid.len();
        if w == 0 {
            return Err(PitError::Structural("empty entry grid".into()));
        }
        let field = grid[0][0].field();
        let n = grid[0][0].n();
        let mut p = Self::zero(field, n, w);
        for (i, row) in grid.iter().enumerate() {
            if row.len() != w {
                return Err(PitError::Structural("entry grid is not square".into()));
            }
            for (j, q) in row.iter().enumerate() {
                check_compatible(&field, n, &q.field(), q.n())?;
                for (e, c) in q.terms() {
                    let mut m = Mat::zero(w);
                    m.set(i, j, c);
                    p.add_term(e.clone(), m);
                }
            }
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, m: Mat) {
        if m.is_zero() {
            return;
        }
        let f = self.field;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(m);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&m, &f);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Mat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExponentVector) -> Mat {
        self.terms.get(e).cloned().unwrap_or_else(|| Mat::zero(self.w))
    }

    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mu(&self) -> usize {
        self.terms.keys().map(|e| e.supp_size()).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.max_degree()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for e in self.terms.keys() {
            for i in e.support() {
                seen[i] = true;
            }
        }
        (0..self.n).filter(|&i| seen[i]).collect()
    }

    /// Entry `(i, j)` as a scalar polynomial.
    pub fn entry(&self, i: usize, j: usize) -> ScalarPoly {
        let it = self.terms.iter().map(|(e, m)| (e.clone(), m.get(i, j)));
        ScalarPoly::from_terms(self.field, self.n, it).expect("lengths agree by construction")
    }

    fn check(&self, other: &Self) -> Result<()> {
        check_compatible(&self.field, self.n, &other.field, other.n)?;
        if self.w != other.w {
            return Err(PitError::Structural(format!("width mismatch: {} vs {}", self.w, other.w)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, m) in &other.terms {
            out.add_term(e.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.field;
        let mut out = Self::zero(f, self.n, self.w);
        for (e, m) in &self.terms {
            out.add_term(e.clone(), m.scale(c, &f));
        }
        out
    }

    /// Multiplies every coefficient by a scalar polynomial.
    pub fn scale_poly(&self, q: &ScalarPoly) -> Result<Self> {
        check_compatible(&self.field, self.n, &q.field(), q.n())?;
        let f = self.field;
        let mut out = Self::zero(f, self.n, self.w);
        for (e1, m) in &self.terms {
            for (e2, c) in q.terms() {
                out.add_term(e1.add(e2), m.scale(c, &f));
            }
        }
        Ok(out)
    }

    /// Full convolution product; see [`poly_mul`].
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = self.field;
        let mut out = Self::zero(f, self.n, self.w);
        for (e1, m1) in &self.terms {
            for (e2, m2) in &other.terms {
                out.add_term(e1.add(e2), m1.mul(m2, &f));
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[u64]) -> Result<Mat> {
        check_point(self.n, point)?;
        let f = self.field;
        let mut acc = Mat::zero(self.w);
        for (e, m) in &self.terms {
            let v = monomial_value(&f, e, point);
            if v != 0 {
                acc.add_assign(&m.scale(v, &f), &f);
            }
        }
        Ok(acc)
    }

    /// `D(x + c)`.
    pub fn shift(&self, c: &[u64]) -> Result<Self> {
        check_point(self.n, c)?;
        let f = self.field;
        let mut out = Self::zero(f, self.n, self.w);
        for (e, m) in &self.terms {
            for (e2, k) in shifted_monomial(&f, e, c) {
                out.add_term(e2, m.scale(k, &f));
            }
        }
        Ok(out)
    }

    /// Views a width-1 polynomial as a scalar one.
    pub fn to_scalar(&self) -> Result<ScalarPoly> {
        if self.w != 1 {
            return Err(PitError::Structural(format!("to_scalar needs width 1, got {}", self.w)));
        }
        Ok(self.entry(0, 0))
    }

    /// Wraps a scalar polynomial as a width-1 matrix polynomial.
    pub fn from_scalar(p: &ScalarPoly) -> Self {
        let mut out = Self::zero(p.field(), p.n(), 1);
        for (e, c) in p.terms() {
            out.add_term(e.clone(), Mat::from_flat(1, vec![c]));
        }
        out
    }
}

/// Product of two matrix polynomials: the coefficient at `e` is the sum over `e1 + e2 = e`
/// of `a_{e1} b_{e2}`.
pub fn poly_mul(a: &MatPoly, b: &MatPoly) -> Result<MatPoly> {
    a.mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_times_vars() {
        let f = Field::new(101).unwrap();
        let a = MatPoly::monomial(f, ExponentVector::unit(2, 0, 1), Mat::identity(2));
        let b = MatPoly::monomial(f, ExponentVector::unit(2, 1, 1), Mat::identity(2));
        let c = poly_mul(&a, &b).unwrap();
        assert_eq!(c.sparsity(), 1);
        assert_eq!(c.coeff(&ExponentVector::new(vec![1, 1])), Mat::identity(2));
        let z = MatPoly::zero(f, 2, 2);
        assert!(poly_mul(&z, &b).unwrap().is_zero());
    }

    #[test]
    fn width_mismatch() {
        let f = Field::new(101).unwrap();
        let a = MatPoly::identity(f, 1, 2);
        let b = MatPoly::identity(f, 1, 3);
        assert!(matches!(poly_mul(&a, &b), Err(PitError::Structural(_))));
    }

    #[test]
    fn entries_roundtrip() {
        let f = Field::new(101).unwrap();
        let x = ScalarPoly::var(f, 1, 0);
        let one = ScalarPoly::constant(f, 1, 1);
        let grid = vec![vec![x.clone(), one.clone()], vec![one.clone(), x.clone()]];
        let m = MatPoly::from_entries(&grid).unwrap();
        assert_eq!(m.entry(0, 0), x);
        assert_eq!(m.entry(1, 0), one);
        assert_eq!(m.eval(&[5]).unwrap(), Mat::from_rows(&[vec![5, 1], vec![1, 5]]));
    }
}
