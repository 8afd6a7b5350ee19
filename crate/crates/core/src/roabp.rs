//! Read-once oblivious ABPs with sparse matrix-polynomial layers.
//!
//! `C(x) = D0(x0)^T * D1(x1) * ... * Dd(xd) * D_{d+1}(x_{d+1})` where the blocks are
//! disjoint. Constant boundaries are the degree-0 special case.

use crate::algebra::{Field, Mat, MatPoly, ScalarPoly, UniPoly};
use crate::error::{Limits, PitError, Result};
use crate::kron::WeightFn;

pub use crate::points::{PointSet, PointSource, Provenance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roabp {
    field: Field,
    n: usize,
    w: usize,
    blocks: Vec<Vec<usize>>,
    layers: Vec<MatPoly>,
    left_block: Vec<usize>,
    right_block: Vec<usize>,
    left: Vec<ScalarPoly>,
    right: Vec<ScalarPoly>,
}

/// Full expansion: the matrix product `D(x)` and the contracted scalar polynomial `C(x)`.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub matrix_part: MatPoly,
    pub scalar_part: ScalarPoly,
}

/// The layers with non-constant boundaries lifted into `w x w` factors.
///
/// `C = s^T (prod factors) t`. A lifted left boundary becomes a factor whose first row is the
/// boundary vector (and `s = e_0`); a lifted right boundary becomes a factor whose first
/// column is the boundary vector (and `t = e_0`).
#[derive(Clone, Debug)]
pub struct FactorChain {
    pub factors: Vec<MatPoly>,
    /// Variable block of each factor.
    pub blocks: Vec<Vec<usize>>,
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    pub left_lifted: bool,
    pub right_lifted: bool,
}

impl FactorChain {
    /// `s^T M t`.
    pub fn contract(&self, m: &Mat, f: &Field) -> u64 {
        m.bilinear(&self.s, &self.t, f)
    }
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl Roabp {
    /// Validates every structural invariant and builds the program.
    ///
    /// `left`/`right` must have length `w`; their variables must lie in `left_block` /
    /// `right_block`, which may be empty for constant boundaries.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        field: Field,
        n: usize,
        w: usize,
        blocks: Vec<Vec<usize>>,
        layers: Vec<MatPoly>,
        left_block: Vec<usize>,
        left: Vec<ScalarPoly>,
        right_block: Vec<usize>,
        right: Vec<ScalarPoly>,
    ) -> Result<Self> {
        if blocks.len() != layers.len() {
            return Err(PitError::Structural(format!("{} blocks but {} layers", blocks.len(), layers.len())));
        }
        if left.len() != w || right.len() != w {
            return Err(PitError::Structural(format!(
                "boundary vectors have lengths {} and {} but the width is {w}",
                left.len(),
                right.len()
            )));
        }
        let mut owner: Vec<Option<String>> = vec![None; n];
        let mut claim = |vars: &[usize], name: String| -> Result<()> {
            for &v in vars {
                if v >= n {
                    return Err(PitError::Structural(format!("variable x{} outside ambient size {n}", v + 1)));
                }
                if let Some(prev) = &owner[v] {
                    return Err(PitError::Invariant(format!("blocks not disjoint: x{} in {prev} and {name}", v + 1)));
                }
                owner[v] = Some(name.clone());
            }
            Ok(())
        };
        claim(&left_block, "left boundary block".into())?;
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(PitError::Invariant(format!("block {} is empty", i + 1)));
            }
            claim(b, format!("block {}", i + 1))?;
        }
        claim(&right_block, "right boundary block".into())?;
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| sorted_unique(b)).collect();
        let left_block = sorted_unique(&left_block);
        let right_block = sorted_unique(&right_block);
        for (i, (layer, b)) in layers.iter().zip(&blocks).enumerate() {
            if layer.field() != field || layer.n() != n || layer.width() != w {
                return Err(PitError::Structural(format!("layer {} has mismatched field, ambient size or width", i + 1)));
            }
            if let Some((e, _)) = layer.terms().find(|(e, _)| !e.within(b)) {
                return Err(PitError::Invariant(format!("layer {} uses {e:?} outside its block", i + 1)));
            }
        }
        for (side, vec, b) in [("left", &left, &left_block), ("right", &right, &right_block)] {
            for (a, q) in vec.iter().enumerate() {
                if q.field() != field || q.n() != n {
                    return Err(PitError::Structural(format!("{side} boundary entry {a} has mismatched field or ambient size")));
                }
                if let Some((e, _)) = q.terms().find(|(e, _)| !e.within(b)) {
                    return Err(PitError::Invariant(format!("{side} boundary entry {a} uses {e:?} outside its block")));
                }
            }
        }
        Ok(Roabp { field, n, w, blocks, layers, left_block, right_block, left, right })
    }

    /// Program with constant boundary vectors `s`, `t`.
    pub fn with_constant_boundaries(
        field: Field,
        n: usize,
        blocks: Vec<Vec<usize>>,
        layers: Vec<MatPoly>,
        s: &[u64],
        t: &[u64],
    ) -> Result<Self> {
        let w = s.len();
        let left = s.iter().map(|&c| ScalarPoly::constant(field, n, c)).collect();
        let right = t.iter().map(|&c| ScalarPoly::constant(field, n, c)).collect();
        Self::new(field, n, w, blocks, layers, vec![], left, vec![], right)
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
    /// Number of interior layers `d`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
    pub fn layers(&self) -> &[MatPoly] {
        &self.layers
    }
    pub fn left_block(&self) -> &[usize] {
        &self.left_block
    }
    pub fn right_block(&self) -> &[usize] {
        &self.right_block
    }
    pub fn left(&self) -> &[ScalarPoly] {
        &self.left
    }
    pub fn right(&self) -> &[ScalarPoly] {
        &self.right
    }

    fn boundary_polys(&self) -> impl Iterator<Item = &ScalarPoly> {
        self.left.iter().chain(self.right.iter())
    }

    /// Largest individual degree over layers and boundaries.
    pub fn delta(&self) -> u32 {
        let a = self.layers.iter().map(|l| l.max_degree()).max().unwrap_or(0);
        let b = self.boundary_polys().map(|q| q.max_degree()).max().unwrap_or(0);
        a.max(b)
    }

    /// Largest layer sparsity.
    pub fn sparsity(&self) -> usize {
        self.layers.iter().map(|l| l.sparsity()).max().unwrap_or(0)
    }

    /// Largest support size of a layer or boundary monomial.
    pub fn mu(&self) -> usize {
        let a = self.layers.iter().map(|l| l.mu()).max().unwrap_or(0);
        let b = self.boundary_polys().map(|q| q.mu()).max().unwrap_or(0);
        a.max(b)
    }

    pub fn left_is_constant(&self) -> bool {
        self.left.iter().all(|q| q.total_degree() == 0)
    }

    pub fn right_is_constant(&self) -> bool {
        self.right.iter().all(|q| q.total_degree() == 0)
    }

    /// Block list including non-constant boundary blocks, in program order.
    pub fn all_blocks(&self) -> Vec<Vec<usize>> {
        let mut v = Vec::new();
        if !self.left_block.is_empty() {
            v.push(self.left_block.clone());
        }
        v.extend(self.blocks.iter().cloned());
        if !self.right_block.is_empty() {
            v.push(self.right_block.clone());
        }
        v
    }

    /// Program order of the variables: left boundary, each block, right boundary, then
    /// any variables no block mentions.
    pub fn variable_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::with_capacity(self.n);
        for b in self.all_blocks() {
            for v in b {
                seen[v] = true;
                out.push(v);
            }
        }
        out.extend((0..self.n).filter(|&v| !seen[v]));
        out
    }

    /// Evaluates layer by layer: `O(d w^2 s)` field operations.
    pub fn evaluate(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.n {
            return Err(PitError::Structural(format!(
                "point has length {} but the ambient size is {}",
                point.len(),
                self.n
            )));
        }
        if self.w == 0 {
            return Ok(0);
        }
        let f = &self.field;
        let mut u: Vec<u64> = self.left.iter().map(|q| q.eval(point)).collect::<Result<_>>()?;
        for layer in &self.layers {
            if u.iter().all(|&x| x == 0) {
                return Ok(0);
            }
            let m = layer.eval(point)?;
            u = m.left_mul_vec(&u, f);
        }
        let mut acc = 0;
        for (a, q) in u.iter().zip(&self.right) {
            if *a != 0 {
                acc = f.add(acc, f.mul(*a, q.eval(point)?));
            }
        }
        Ok(acc)
    }

    /// Upper estimate of the expansion's term count.
    pub fn expansion_estimate(&self) -> u128 {
        let mut est: u128 = self.layers.iter().map(|l| l.sparsity().max(1) as u128).product();
        let ls: usize = self.left.iter().map(|q| q.sparsity()).sum();
        let rs: usize = self.right.iter().map(|q| q.sparsity()).sum();
        est = est.saturating_mul(ls.max(1) as u128).saturating_mul(rs.max(1) as u128);
        est
    }

    /// Brute-force expansion; the reference oracle.
    pub fn expand(&self, limits: &Limits) -> Result<Expansion> {
        let est = self.expansion_estimate();
        if est > limits.expand_ceiling as u128 {
            return Err(PitError::Capability(format!(
                "expansion estimated at {est} terms, above the ceiling {}",
                limits.expand_ceiling
            )));
        }
        let f = self.field;
        let mut d = MatPoly::identity(f, self.n, self.w);
        for layer in &self.layers {
            d = d.mul(layer)?;
        }
        let scalar = contract_vectors(&self.left, &d, &self.right)?;
        Ok(Expansion { matrix_part: d, scalar_part: scalar })
    }

    /// Layers plus lifted boundaries; see [`FactorChain`].
    pub fn factor_chain(&self) -> FactorChain {
        let f = self.field;
        let (n, w) = (self.n, self.w);
        let e0: Vec<u64> = (0..w).map(|i| u64::from(i == 0)).collect();
        let mut factors = Vec::new();
        let mut blocks = Vec::new();
        let left_lifted = !self.left_is_constant();
        let right_lifted = !self.right_is_constant();
        let s = if left_lifted {
            let mut m = MatPoly::zero(f, n, w);
            for (j, q) in self.left.iter().enumerate() {
                for (e, c) in q.terms() {
                    let mut k = Mat::zero(w);
                    k.set(0, j, c);
                    m.add_term(e.clone(), k);
                }
            }
            factors.push(m);
            blocks.push(self.left_block.clone());
            e0.clone()
        } else {
            self.left.iter().map(|q| q.coeff(&crate::algebra::ExponentVector::zeros(n))).collect()
        };
        factors.extend(self.layers.iter().cloned());
        blocks.extend(self.blocks.iter().cloned());
        let t = if right_lifted {
            let mut m = MatPoly::zero(f, n, w);
            for (i, q) in self.right.iter().enumerate() {
                for (e, c) in q.terms() {
                    let mut k = Mat::zero(w);
                    k.set(i, 0, c);
                    m.add_term(e.clone(), k);
                }
            }
            factors.push(m);
            blocks.push(self.right_block.clone());
            e0
        } else {
            self.right.iter().map(|q| q.coeff(&crate::algebra::ExponentVector::zeros(n))).collect()
        };
        FactorChain { factors, blocks, s, t, left_lifted, right_lifted }
    }

    /// `C(x + c)` as a program of the same shape.
    pub fn shift(&self, c: &[u64]) -> Result<Roabp> {
        let layers = self.layers.iter().map(|l| l.shift(c)).collect::<Result<Vec<_>>>()?;
        let left = self.left.iter().map(|q| q.shift(c)).collect::<Result<Vec<_>>>()?;
        let right = self.right.iter().map(|q| q.shift(c)).collect::<Result<Vec<_>>>()?;
        Roabp::new(
            self.field,
            self.n,
            self.w,
            self.blocks.clone(),
            layers,
            self.left_block.clone(),
            left,
            self.right_block.clone(),
            right,
        )
    }

    /// Returns a copy with the layers reordered by `perm` (new position `i` holds old layer `perm[i]`).
    pub fn permute_layers(&self, perm: &[usize]) -> Result<Roabp> {
        if sorted_unique(perm) != (0..self.depth()).collect::<Vec<_>>() || perm.len() != self.depth() {
            return Err(PitError::Precondition("layer permutation is not a permutation".into()));
        }
        Roabp::new(
            self.field,
            self.n,
            self.w,
            perm.iter().map(|&i| self.blocks[i].clone()).collect(),
            perm.iter().map(|&i| self.layers[i].clone()).collect(),
            self.left_block.clone(),
            self.left.clone(),
            self.right_block.clone(),
            self.right.clone(),
        )
    }
}

/// `left^T D right` for vectors of scalar polynomials.
pub fn contract_vectors(left: &[ScalarPoly], d: &MatPoly, right: &[ScalarPoly]) -> Result<ScalarPoly> {
    let f = d.field();
    let n = d.n();
    let w = d.width();
    let mut acc = ScalarPoly::zero(f, n);
    for b in 0..w {
        if right[b].is_zero() {
            continue;
        }
        let mut col = ScalarPoly::zero(f, n);
        for a in 0..w {
            if left[a].is_zero() {
                continue;
            }
            let entry = d.entry(a, b);
            if entry.is_zero() {
                continue;
            }
            col = col.add(&left[a].mul(&entry)?)?;
        }
        acc = acc.add(&col.mul(&right[b])?)?;
    }
    Ok(acc)
}

fn substitute_scalar(q: &ScalarPoly, wfn: &WeightFn) -> Result<UniPoly> {
    let f = q.field();
    let mut acc = UniPoly::zero(f);
    for (e, c) in q.terms() {
        acc = acc.add(&UniPoly::monomial(f, weight_to_degree(wfn.weight(e))?, c));
    }
    Ok(acc)
}

fn weight_to_degree(w: u128) -> Result<u64> {
    u64::try_from(w).map_err(|_| PitError::Capability(format!("monomial weight {w} does not fit in 64 bits")))
}

/// `C(t^{w(x_1)}, ..., t^{w(x_n)})`, computed exactly by substituting layer by layer.
///
/// Each layer becomes a matrix of sparse univariate polynomials and the product is taken
/// symbolically, so no field-size condition applies.
pub fn weighted_substitute(r: &Roabp, wfn: &WeightFn) -> Result<UniPoly> {
    if wfn.n() != r.n() {
        return Err(PitError::Structural(format!("weight function over {} variables, program over {}", wfn.n(), r.n())));
    }
    let f = r.field();
    let w = r.width();
    let mut u: Vec<UniPoly> = r.left().iter().map(|q| substitute_scalar(q, wfn)).collect::<Result<_>>()?;
    for layer in r.layers() {
        let mut m: Vec<UniPoly> = vec![UniPoly::zero(f); w * w];
        for (e, mat) in layer.terms() {
            let deg = weight_to_degree(wfn.weight(e))?;
            for i in 0..w {
                for j in 0..w {
                    let c = mat.get(i, j);
                    if c != 0 {
                        m[i * w + j] = m[i * w + j].add(&UniPoly::monomial(f, deg, c));
                    }
                }
            }
        }
        let mut next = vec![UniPoly::zero(f); w];
        for i in 0..w {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..w {
                if !m[i * w + j].is_zero() {
                    next[j] = next[j].add(&u[i].mul(&m[i * w + j]));
                }
            }
        }
        u = next;
    }
    let mut acc = UniPoly::zero(f);
    for (a, q) in u.iter().zip(r.right()) {
        if !a.is_zero() {
            acc = acc.add(&a.mul(&substitute_scalar(q, wfn)?));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExponentVector;

    fn f() -> Field {
        Field::new(10007).unwrap()
    }

    fn var_layer(field: Field, n: usize, i: usize) -> MatPoly {
        MatPoly::monomial(field, ExponentVector::unit(n, i, 1), Mat::identity(1))
    }

    #[test]
    fn width_one_product() {
        let field = f();
        let r = Roabp::with_constant_boundaries(field, 2, vec![vec![0], vec![1]], vec![var_layer(field, 2, 0), var_layer(field, 2, 1)], &[1], &[1]).unwrap();
        assert_eq!(r.evaluate(&[2, 3]).unwrap(), 6);
        let ex = r.expand(&Limits::default()).unwrap();
        assert_eq!(ex.scalar_part.sparsity(), 1);
        assert!(r.evaluate(&[2]).is_err());
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let field = f();
        let r = Roabp::with_constant_boundaries(field, 2, vec![vec![0], vec![0]], vec![var_layer(field, 2, 0), var_layer(field, 2, 0)], &[1], &[1]);
        match r {
            Err(PitError::Invariant(m)) => assert!(m.contains("x1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn layer_outside_block_rejected() {
        let field = f();
        let r = Roabp::with_constant_boundaries(field, 2, vec![vec![0]], vec![var_layer(field, 2, 1)], &[1], &[1]);
        assert!(matches!(r, Err(PitError::Invariant(_))));
    }

    #[test]
    fn substitute_sum() {
        // x1 + x2 = (1,1) diag(x1, 1) diag(1, x2) (1,1)^T
        let field = f();
        let n = 2;
        let l1 = MatPoly::from_terms(
            field,
            n,
            2,
            vec![
                (ExponentVector::unit(n, 0, 1), Mat::from_rows(&[vec![1, 0], vec![0, 0]])),
                (ExponentVector::zeros(n), Mat::from_rows(&[vec![0, 0], vec![0, 1]])),
            ],
        )
        .unwrap();
        let l2 = MatPoly::from_terms(
            field,
            n,
            2,
            vec![
                (ExponentVector::unit(n, 1, 1), Mat::from_rows(&[vec![0, 0], vec![0, 1]])),
                (ExponentVector::zeros(n), Mat::from_rows(&[vec![1, 0], vec![0, 0]])),
            ],
        )
        .unwrap();
        let r = Roabp::with_constant_boundaries(field, n, vec![vec![0], vec![1]], vec![l1, l2], &[1, 1], &[1, 1]).unwrap();
        assert_eq!(r.evaluate(&[3, 4]).unwrap(), 7);
        let u = weighted_substitute(&r, &WeightFn::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(u.to_dense(), vec![0, 1, 1]);
    }

    #[test]
    fn zero_program_substitutes_to_zero() {
        let field = f();
        let r = Roabp::with_constant_boundaries(field, 1, vec![vec![0]], vec![var_layer(field, 1, 0)], &[0], &[1]).unwrap();
        assert!(weighted_substitute(&r, &WeightFn::new(vec![3]).unwrap()).unwrap().is_zero());
        assert_eq!(r.evaluate(&[5]).unwrap(), 0);
    }
}
