//! Sparse multivariate polynomials with scalar coefficients.

use std::collections::BTreeMap;

use super::field::Field;
use super::monomial::ExponentVector;
use crate::error::{PitError, Result};

/// Sparse polynomial over GF(p) in `n` ambient variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarPoly {
    field: Field,
    n: usize,
    terms: BTreeMap<ExponentVector, u64>,
}

pub(crate) fn check_compatible(f1: &Field, n1: usize, f2: &Field, n2: usize) -> Result<()> {
    if f1 != f2 {
        return Err(PitError::Structural(format!(
            "modulus mismatch: {} vs {}",
            f1.modulus(),
            f2.modulus()
        )));
    }
    if n1 != n2 {
        return Err(PitError::Structural(format!("ambient size mismatch: {n1} vs {n2}")));
    }
    Ok(())
}

pub(crate) fn check_point(n: usize, point: &[u64]) -> Result<()> {
    if point.len() != n {
        return Err(PitError::Structural(format!(
            "point has length {} but the ambient size is {n}",
            point.len()
        )));
    }
    Ok(())
}

/// `x^e` evaluated at `point`.
pub(crate) fn monomial_value(f: &Field, e: &ExponentVector, point: &[u64]) -> u64 {
    let mut v = 1;
    for (i, &k) in e.as_slice().iter().enumerate() {
        if k > 0 {
            v = f.mul(v, f.pow(point[i], k as u64));
            if v == 0 {
                break;
            }
        }
    }
    v
}

/// Terms of `prod_i (x_i + c_i)^{e_i}`.
pub(crate) fn shifted_monomial(f: &Field, e: &ExponentVector, c: &[u64]) -> Vec<(ExponentVector, u64)> {
    let mut acc = vec![(ExponentVector::zeros(e.len()), 1u64)];
    for (i, &k) in e.as_slice().iter().enumerate() {
        if k == 0 {
            continue;
        }
        // binomial row k mod p
        let mut binom = vec![1u64];
        for _ in 0..k {
            let mut row = vec![1u64; binom.len() + 1];
            for t in 1..binom.len() {
                row[t] = f.add(binom[t - 1], binom[t]);
            }
            binom = row;
        }
        let mut next = Vec::with_capacity(acc.len() * (k as usize + 1));
        for (m, coef) in &acc {
            for j in 0..=k {
                let cj = f.mul(binom[j as usize], f.pow(c[i], (k - j) as u64));
                if cj == 0 {
                    continue;
                }
                let mut m2 = m.clone();
                m2.set(i, j);
                next.push((m2, f.mul(*coef, cj)));
            }
        }
        acc = next;
    }
    acc
}

impl ScalarPoly {
    pub fn zero(field: Field, n: usize) -> Self {
        ScalarPoly { field, n, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, n: usize, c: u64) -> Self {
        Self::monomial(field, ExponentVector::zeros(n), c)
    }

    pub fn monomial(field: Field, e: ExponentVector, c: u64) -> Self {
        let n = e.len();
        let mut terms = BTreeMap::new();
        let c = field.reduce(c);
        if c != 0 {
            terms.insert(e, c);
        }
        ScalarPoly { field, n, terms }
    }

    /// The variable `x_i` (0-based).
    pub fn var(field: Field, n: usize, i: usize) -> Self {
        Self::monomial(field, ExponentVector::unit(n, i, 1), 1)
    }

    /// Sums duplicate keys; drops zeros. Fails on a key of the wrong length.
    pub fn from_terms<I: IntoIterator<Item = (ExponentVector, u64)>>(field: Field, n: usize, it: I) -> Result<Self> {
        let mut p = Self::zero(field, n);
        for (e, c) in it {
            if e.len() != n {
                return Err(PitError::Structural(format!(
                    "exponent vector of length {} in ambient {n}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: ExponentVector, c: u64) {
        let c = self.field.reduce(c);
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
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

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, e: &ExponentVector) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest support size over the terms.
    pub fn mu(&self) -> usize {
        self.terms.keys().map(|e| e.supp_size()).max().unwrap_or(0)
    }

    /// Largest individual degree.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.max_degree()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.total_degree()).max().unwrap_or(0)
    }

    /// Sorted indices of all variables that occur.
    pub fn vars(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for e in self.terms.keys() {
            for i in e.support() {
                seen[i] = true;
            }
        }
        (0..self.n).filter(|&i| seen[i]).collect()
    }

    pub fn is_multilinear(&self) -> bool {
        self.max_degree() <= 1
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_compatible(&self.field, self.n, &other.field, other.n)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let f = self.field;
        ScalarPoly { field: f, n: self.n, terms: self.terms.iter().map(|(e, &c)| (e.clone(), f.neg(c))).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.field;
        let c = f.reduce(c);
        if c == 0 {
            return Self::zero(f, self.n);
        }
        ScalarPoly { field: f, n: self.n, terms: self.terms.iter().map(|(e, &v)| (e.clone(), f.mul(v, c))).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_compatible(&self.field, self.n, &other.field, other.n)?;
        let f = self.field;
        let mut out = Self::zero(f, self.n);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                out.add_term(e1.add(e2), f.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[u64]) -> Result<u64> {
        check_point(self.n, point)?;
        let f = self.field;
        Ok(self.terms.iter().fold(0, |acc, (e, &c)| f.add(acc, f.mul(c, monomial_value(&f, e, point)))))
    }

    /// `p(x + c)`.
    pub fn shift(&self, c: &[u64]) -> Result<Self> {
        check_point(self.n, c)?;
        let f = self.field;
        let mut out = Self::zero(f, self.n);
        for (e, &v) in &self.terms {
            for (m, k) in shifted_monomial(&f, e, c) {
                out.add_term(m, f.mul(v, k));
            }
        }
        Ok(out)
    }

    /// Substitutes `x_v = val` for every listed pair, keeping the ambient size.
    pub fn partial_eval(&self, assignment: &[(usize, u64)]) -> Self {
        let f = self.field;
        let mut out = Self::zero(f, self.n);
        for (e, &c) in &self.terms {
            let mut e2 = e.clone();
            let mut c2 = c;
            for &(v, val) in assignment {
                let k = e.get(v);
                if k > 0 {
                    c2 = f.mul(c2, f.pow(val, k as u64));
                    e2.set(v, 0);
                }
            }
            out.add_term(e2, c2);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::new(7).unwrap()
    }

    #[test]
    fn eval_example() {
        // x1*x2 + 3 at (2,3) over GF(7) is 6 + 3 = 2
        let f = f7();
        let p = ScalarPoly::var(f, 2, 0).mul(&ScalarPoly::var(f, 2, 1)).unwrap();
        let p = p.add(&ScalarPoly::constant(f, 2, 3)).unwrap();
        assert_eq!(p.eval(&[2, 3]).unwrap(), 2);
        assert_eq!(ScalarPoly::zero(f, 2).eval(&[5, 1]).unwrap(), 0);
        assert!(p.eval(&[1]).is_err());
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = f7();
        let x = ScalarPoly::var(f, 1, 0);
        assert!(x.sub(&x).unwrap().is_zero());
    }

    #[test]
    fn shift_matches_evaluation() {
        let f = Field::new(101).unwrap();
        let p = ScalarPoly::from_terms(
            f,
            2,
            vec![(ExponentVector::new(vec![3, 1]), 5), (ExponentVector::new(vec![0, 2]), 7), (ExponentVector::new(vec![1, 0]), 1)],
        )
        .unwrap();
        let c = [4, 9];
        let q = p.shift(&c).unwrap();
        for a in 0..10 {
            for b in 0..10 {
                assert_eq!(q.eval(&[a, b]).unwrap(), p.eval(&[a + 4, b + 9]).unwrap());
            }
        }
    }

    #[test]
    fn mismatched_modulus_is_structural() {
        let a = ScalarPoly::var(f7(), 1, 0);
        let b = ScalarPoly::var(Field::new(11).unwrap(), 1, 0);
        assert!(matches!(a.mul(&b), Err(PitError::Structural(_))));
    }
}
