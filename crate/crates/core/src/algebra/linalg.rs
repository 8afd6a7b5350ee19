//! Exact linear algebra over GF(p): incremental echelon bases, rank, determinants.

use super::field::Field;
use super::matrix::Mat;
use super::poly::ScalarPoly;
use crate::error::{Limits, PitError, Result};

/// An incrementally built basis in echelon form. Vectors have a fixed length `k`.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    k: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: Field, k: usize) -> Self {
        Echelon { field, k, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    /// Residue of `v` after elimination against the current rows.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.k, "vector length must match the echelon dimension");
        let f = &self.field;
        let mut r: Vec<u64> = v.iter().map(|&x| f.reduce(x)).collect();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = r[piv];
            if c == 0 {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(row) {
                if y != 0 {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let r = self.reduce(v);
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(r[piv]).expect("nonzero pivot");
        let r: Vec<u64> = r.iter().map(|&x| self.field.mul(x, inv)).collect();
        self.rows.push(r);
        self.pivots.push(piv);
        true
    }
}

/// Dimension of the span of `vectors` over GF(p).
pub fn rank_over_field(field: &Field, vectors: &[Vec<u64>]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let k = first.len();
    if let Some(bad) = vectors.iter().position(|v| v.len() != k) {
        return Err(PitError::Structural(format!(
            "ragged input: vector {bad} has length {} but vector 0 has length {k}",
            vectors[bad].len()
        )));
    }
    let mut ech = Echelon::new(*field, k);
    for v in vectors {
        ech.insert(v);
        if ech.rank() == k {
            break;
        }
    }
    Ok(ech.rank())
}

/// Numeric determinant by Gaussian elimination.
pub fn det(field: &Field, m: &Mat) -> u64 {
    let w = m.width();
    let f = field;
    let mut a: Vec<Vec<u64>> = (0..w).map(|i| (0..w).map(|j| m.get(i, j)).collect()).collect();
    let mut d = 1u64;
    for col in 0..w {
        let Some(piv) = (col..w).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            d = f.neg(d);
        }
        d = f.mul(d, a[col][col]);
        let inv = f.inv(a[col][col]).expect("nonzero pivot");
        for r in col + 1..w {
            let c = f.mul(a[r][col], inv);
            if c == 0 {
                continue;
            }
            for j in col..w {
                let v = f.mul(c, a[col][j]);
                a[r][j] = f.sub(a[r][j], v);
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan; `None` if singular.
pub fn inverse(field: &Field, m: &Mat) -> Option<Mat> {
    let w = m.width();
    let f = field;
    let mut a: Vec<Vec<u64>> = (0..w)
        .map(|i| {
            let mut row: Vec<u64> = (0..w).map(|j| m.get(i, j)).collect();
            row.extend((0..w).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for col in 0..w {
        let piv = (col..w).find(|&r| a[r][col] != 0)?;
        a.swap(piv, col);
        let inv = f.inv(a[col][col])?;
        for x in a[col].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..w {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let c = a[r][col];
            for j in 0..2 * w {
                let v = f.mul(c, a[col][j]);
                a[r][j] = f.sub(a[r][j], v);
            }
        }
    }
    let rows: Vec<Vec<u64>> = a.into_iter().map(|r| r[w..].to_vec()).collect();
    Some(Mat::from_rows(&rows))
}

/// Symbolic determinant of a square grid of scalar polynomials by cofactor expansion.
///
/// Refuses widths above `limits.det_width` and intermediate results with more than
/// `limits.det_terms` terms.
pub fn det_poly(grid: &[Vec<ScalarPoly>], limits: &Limits) -> Result<ScalarPoly> {
    let w = grid.len();
    if w == 0 {
        return Err(PitError::Structural("determinant of an empty grid".into()));
    }
    if w > limits.det_width {
        return Err(PitError::Capability(format!(
            "symbolic determinant width {w} exceeds the configured limit {}",
            limits.det_width
        )));
    }
    if grid.iter().any(|r| r.len() != w) {
        return Err(PitError::Structural("determinant grid is not square".into()));
    }
    let field = grid[0][0].field();
    let n = grid[0][0].n();
    for row in grid {
        for q in row {
            super::poly::check_compatible(&field, n, &q.field(), q.n())?;
        }
    }
    let cols: Vec<usize> = (0..w).collect();
    cofactor(grid, 0, &cols, limits)
}

fn cofactor(grid: &[Vec<ScalarPoly>], row: usize, cols: &[usize], limits: &Limits) -> Result<ScalarPoly> {
    let field = grid[0][0].field();
    let n = grid[0][0].n();
    if cols.len() == 1 {
        return Ok(grid[row][cols[0]].clone());
    }
    let mut acc = ScalarPoly::zero(field, n);
    for (idx, &c) in cols.iter().enumerate() {
        let entry = &grid[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor(grid, row + 1, &rest, limits)?;
        let est = entry.sparsity() as u64 * minor.sparsity() as u64;
        if est > limits.det_terms {
            return Err(PitError::Capability(format!(
                "symbolic determinant would accumulate {est} terms, above the ceiling {}",
                limits.det_terms
            )));
        }
        let term = entry.mul(&minor)?;
        acc = if idx % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
        if acc.sparsity() as u64 > limits.det_terms {
            return Err(PitError::Capability(format!(
                "symbolic determinant exceeded {} terms",
                limits.det_terms
            )));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::monomial::ExponentVector;

    #[test]
    fn rank_examples() {
        let f = Field::new(7).unwrap();
        assert_eq!(rank_over_field(&f, &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap(), 2);
        assert_eq!(rank_over_field(&f, &[]).unwrap(), 0);
        assert!(rank_over_field(&f, &[vec![1, 0], vec![1]]).is_err());
        assert_eq!(rank_over_field(&f, &[vec![0, 0]]).unwrap(), 0);
    }

    #[test]
    fn det_examples() {
        let f = Field::new(7).unwrap();
        assert_eq!(det(&f, &Mat::from_rows(&[vec![1, 2], vec![3, 6]])), 0);
        assert_eq!(det(&f, &Mat::from_rows(&[vec![0, 1], vec![1, 0]])), 6);
        let m = Mat::from_rows(&[vec![2, 1], vec![5, 3]]);
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(m.mul(&inv, &f), Mat::identity(2));
        assert!(inverse(&f, &Mat::from_rows(&[vec![1, 2], vec![3, 6]])).is_none());
    }

    #[test]
    fn det_poly_examples() {
        let f = Field::new(101).unwrap();
        let x = ScalarPoly::var(f, 1, 0);
        let one = ScalarPoly::constant(f, 1, 1);
        let d = det_poly(&[vec![x.clone(), one.clone()], vec![one.clone(), x.clone()]], &Limits::default()).unwrap();
        let expect = ScalarPoly::from_terms(f, 1, vec![(ExponentVector::new(vec![2]), 1), (ExponentVector::new(vec![0]), 100)]).unwrap();
        assert_eq!(d, expect);
        let zero = ScalarPoly::zero(f, 1);
        let id = vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]];
        assert_eq!(det_poly(&id, &Limits::default()).unwrap(), one);
    }

    #[test]
    fn det_poly_width_limit() {
        let f = Field::new(101).unwrap();
        let one = ScalarPoly::constant(f, 1, 1);
        let grid = vec![vec![one.clone(); 5]; 5];
        match det_poly(&grid, &Limits::default()) {
            Err(PitError::Capability(msg)) => assert!(msg.contains('4')),
            other => panic!("expected capability error, got {other:?}"),
        }
    }
}
