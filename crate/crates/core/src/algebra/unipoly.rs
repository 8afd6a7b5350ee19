//! Univariate polynomials in a formal variable `t`, stored sparsely.
//!
//! Weighted substitution produces degrees far beyond anything a dense vector could hold,
//! so only the nonzero terms are kept, in ascending degree.

use std::collections::BTreeMap;

use super::field::Field;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    field: Field,
    /// `(degree, coefficient)`, strictly ascending degrees, no zero coefficients.
    terms: Vec<(u64, u64)>,
}

impl UniPoly {
    pub fn zero(field: Field) -> Self {
        UniPoly { field, terms: Vec::new() }
    }

    pub fn monomial(field: Field, deg: u64, c: u64) -> Self {
        let c = field.reduce(c);
        UniPoly { field, terms: if c == 0 { vec![] } else { vec![(deg, c)] } }
    }

    /// From dense ascending coefficients.
    pub fn from_dense(field: Field, coeffs: &[u64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(d, &c)| (d as u64, field.reduce(c)))
            .filter(|&(_, c)| c != 0)
            .collect();
        UniPoly { field, terms }
    }

    fn from_map(field: Field, m: BTreeMap<u64, u64>) -> Self {
        UniPoly { field, terms: m.into_iter().filter(|&(_, c)| c != 0).collect() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> &[(u64, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.last().map(|&(d, _)| d)
    }

    /// Lowest-degree nonzero term.
    pub fn lowest_term(&self) -> Option<(u64, u64)> {
        self.terms.first().copied()
    }

    pub fn coeff(&self, d: u64) -> u64 {
        match self.terms.binary_search_by_key(&d, |&(k, _)| k) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    /// Dense ascending coefficient list; only sensible for small degrees.
    pub fn to_dense(&self) -> Vec<u64> {
        let mut v = vec![0; self.degree().map_or(0, |d| d as usize + 1)];
        for &(d, c) in &self.terms {
            v[d as usize] = c;
        }
        v
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.field;
        let mut m: BTreeMap<u64, u64> = self.terms.iter().copied().collect();
        for &(d, c) in &other.terms {
            let e = m.entry(d).or_insert(0);
            *e = f.add(*e, c);
        }
        Self::from_map(f, m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = self.field;
        let mut m: BTreeMap<u64, u64> = BTreeMap::new();
        for &(d1, c1) in &self.terms {
            for &(d2, c2) in &other.terms {
                let e = m.entry(d1 + d2).or_insert(0);
                *e = f.add(*e, f.mul(c1, c2));
            }
        }
        Self::from_map(f, m)
    }

    pub fn eval(&self, t: u64) -> u64 {
        let f = self.field;
        self.terms.iter().fold(0, |acc, &(d, c)| f.add(acc, f.mul(c, f.pow(t, d))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_roundtrip_and_trim() {
        let f = Field::new(7).unwrap();
        let p = UniPoly::from_dense(f, &[0, 3, 0, 7]);
        assert_eq!(p.terms(), &[(1, 3)]);
        assert_eq!(p.to_dense(), vec![0, 3]);
        assert!(UniPoly::from_dense(f, &[0, 0]).is_zero());
    }

    #[test]
    fn product_and_eval() {
        let f = Field::new(101).unwrap();
        let a = UniPoly::from_dense(f, &[1, 1]);
        let b = UniPoly::from_dense(f, &[100, 1]);
        let c = a.mul(&b);
        assert_eq!(c.to_dense(), vec![100, 0, 1]);
        assert_eq!(c.eval(10), 99);
        assert_eq!(c.lowest_term(), Some((0, 100)));
    }

    #[test]
    fn huge_degrees_stay_sparse() {
        let f = Field::new(101).unwrap();
        let a = UniPoly::monomial(f, 1 << 40, 2);
        let b = a.mul(&a);
        assert_eq!(b.terms(), &[(1 << 41, 4)]);
    }
}
