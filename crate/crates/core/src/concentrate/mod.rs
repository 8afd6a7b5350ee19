//! Low-support rank concentration for ROABPs with invertible factors, the shifts that
//! induce it, and the hitting sets built on top (including width 2 without invertibility).

mod shift;
mod width2;

use std::collections::BTreeMap;

pub use shift::{
    find_concentrating_shift, invertible_hitting_set, invertible_hitting_set_blackbox, low_support_hitting_set,
    ConcentratingShift, InvertibleParams, ShiftMap,
};
pub use width2::{
    factorize_width2, lagrange_curve, width2_delta, width2_hitting_set, width2_hitting_set_blackbox, LagrangeCurve,
    Width2Factorization,
};

use crate::algebra::{Echelon, ExponentVector, Field, MatPoly, ScalarPoly, UniPoly};
use crate::error::{PitError, Result};
use crate::kron::ceil_log2;
use crate::roabp::Roabp;

/// `1 + 2 min(ceil(log2(w^2 s)), mu)`; `mu = None` means unbounded.
pub fn support_parameter(w: usize, s: usize, mu: Option<usize>) -> usize {
    let lg = ceil_log2(((w * w) as u64).saturating_mul(s as u64).max(1)) as usize;
    1 + 2 * mu.map_or(lg, |m| lg.min(m))
}

/// `(L - 1)(l' - 1) + 1`: support bound obtained from block bound `L` and per-factor bound `l'`.
pub fn composed_support_bound(block_bound: usize, factor_bound: usize) -> usize {
    (block_bound.saturating_sub(1)) * (factor_bound.saturating_sub(1)) + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcMode {
    /// Count variables in the support.
    Support,
    /// Count blocks touched.
    Block,
}

/// Indices of the blocks `e` touches.
pub fn block_support(e: &ExponentVector, blocks: &[Vec<usize>]) -> Vec<usize> {
    blocks.iter().enumerate().filter(|(_, b)| b.iter().any(|&v| e.get(v) != 0)).map(|(i, _)| i).collect()
}

/// Coefficients of a vector-valued polynomial, one flat vector per monomial.
pub type CoeffVectors = Vec<(ExponentVector, Vec<u64>)>;

pub fn matpoly_coeffs(d: &MatPoly) -> CoeffVectors {
    d.terms().map(|(e, m)| (e.clone(), m.flat().to_vec())).collect()
}

pub fn scalar_coeffs(p: &ScalarPoly) -> CoeffVectors {
    p.terms().map(|(e, c)| (e.clone(), vec![c])).collect()
}

/// Coefficient vectors of a boundary `(q_1, ..., q_w)`.
pub fn boundary_coeffs(v: &[ScalarPoly]) -> CoeffVectors {
    let w = v.len();
    let mut map: BTreeMap<ExponentVector, Vec<u64>> = BTreeMap::new();
    for (a, q) in v.iter().enumerate() {
        for (e, c) in q.terms() {
            map.entry(e.clone()).or_insert_with(|| vec![0; w])[a] = c;
        }
    }
    map.into_iter().collect()
}

/// `(low_rank, full_rank)` over coefficient vectors; see [`concentration_rank`].
pub fn concentration_rank_vectors(
    field: &Field,
    coeffs: &[(ExponentVector, Vec<u64>)],
    blocks: Option<&[Vec<usize>]>,
    bound: usize,
    mode: ConcMode,
) -> Result<(usize, usize)> {
    let dim = coeffs.first().map_or(0, |(_, v)| v.len());
    if mode == ConcMode::Block && blocks.is_none() {
        return Err(PitError::Precondition("block mode needs the block structure".into()));
    }
    let mut low = Echelon::new(*field, dim);
    let mut full = Echelon::new(*field, dim);
    for (e, v) in coeffs {
        if v.len() != dim {
            return Err(PitError::Structural("coefficient vectors differ in length".into()));
        }
        let size = match mode {
            ConcMode::Support => e.supp_size(),
            ConcMode::Block => block_support(e, blocks.unwrap()).len(),
        };
        if size < bound {
            low.insert(v);
        }
        full.insert(v);
    }
    Ok((low.rank(), full.rank()))
}

/// Rank of the coefficients with support (or block-support) below `bound`, and the rank of
/// all coefficients. `D` is `bound`-concentrated iff the two agree.
pub fn concentration_rank(d: &MatPoly, blocks: Option<&[Vec<usize>]>, bound: usize, mode: ConcMode) -> Result<(usize, usize)> {
    concentration_rank_vectors(&d.field(), &matpoly_coeffs(d), blocks, bound, mode)
}

/// Smallest bound at which the coefficients concentrate.
pub fn minimal_concentration_bound(
    field: &Field,
    coeffs: &[(ExponentVector, Vec<u64>)],
    blocks: Option<&[Vec<usize>]>,
    mode: ConcMode,
) -> Result<usize> {
    let top = match mode {
        ConcMode::Support => coeffs.iter().map(|(e, _)| e.supp_size()).max().unwrap_or(0),
        ConcMode::Block => blocks.map_or(0, |b| b.len()),
    };
    for bound in 1..=top + 1 {
        let (lo, hi) = concentration_rank_vectors(field, coeffs, blocks, bound, mode)?;
        if lo == hi {
            return Ok(bound);
        }
    }
    Ok(top + 1)
}

/// Outcome of the rank-fact checks on the coefficients of an interior product.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankFacts {
    /// Parent/child pairs where the child depends on its descendants.
    pub lifts_checked: usize,
    /// Of those, parents that fail to depend on their descendants.
    pub lift_failures: usize,
    /// Coefficients with block-support exactly `w^2`.
    pub full_chain_checked: usize,
    pub full_chain_failures: usize,
}

impl RankFacts {
    pub fn holds(&self) -> bool {
        self.lift_failures == 0 && self.full_chain_failures == 0
    }
}

/// Checks, on `D = prod_i D_i` over all tuples of layer monomials, that dependence on
/// descendants lifts from child to parent, and that every coefficient of block-support `w^2`
/// depends on its descendants. Every `D_i(0)` must be invertible.
pub fn check_rank_facts(layers: &[MatPoly], ceiling: u64) -> Result<RankFacts> {
    let Some(first) = layers.first() else {
        return Ok(RankFacts::default());
    };
    let (f, n, w) = (first.field(), first.n(), first.width());
    for (i, l) in layers.iter().enumerate() {
        if crate::algebra::det(&f, &l.coeff(&ExponentVector::zeros(n))) == 0 {
            return Err(PitError::Precondition(format!("layer {} has a singular constant term", i + 1)));
        }
    }
    if layers.len() > 20 {
        return Err(PitError::Capability("rank facts are enumerated over at most 20 layers".into()));
    }
    let d = layers.len();
    // per layer: index 0 is the constant monomial
    let options: Vec<Vec<(ExponentVector, crate::algebra::Mat)>> = layers
        .iter()
        .map(|l| {
            let zero = ExponentVector::zeros(n);
            let mut v = vec![(zero.clone(), l.coeff(&zero))];
            v.extend(l.terms().filter(|(e, _)| !e.is_one()).map(|(e, m)| (e.clone(), m.clone())));
            v
        })
        .collect();
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    if total > ceiling as u128 {
        return Err(PitError::Capability(format!("{total} coefficient tuples exceed the ceiling {ceiling}")));
    }
    let radices: Vec<u128> = options.iter().map(|o| o.len() as u128).collect();
    let tuples: Vec<Vec<usize>> =
        (0..total).map(|i| crate::points::mixed_radix(i, &radices).into_iter().map(|x| x as usize).collect()).collect();
    let mask_of = |t: &[usize]| t.iter().enumerate().filter(|(_, &x)| x != 0).fold(0usize, |m, (i, _)| m | 1 << i);
    let coeff_of = |t: &[usize]| {
        let mut m = crate::algebra::Mat::identity(w);
        for (i, &x) in t.iter().enumerate() {
            m = m.mul(&options[i][x].1, &f);
        }
        m
    };
    let coeffs: Vec<(usize, crate::algebra::Mat)> = tuples.iter().map(|t| (mask_of(t), coeff_of(t))).collect();
    // span of all coefficients whose block support is a strict subset of each mask
    let mut spans: BTreeMap<usize, Echelon> = BTreeMap::new();
    let mut span_for = |mask: usize| -> Echelon {
        spans
            .entry(mask)
            .or_insert_with(|| {
                let mut e = Echelon::new(f, w * w);
                for (m, c) in &coeffs {
                    if m & mask == *m && *m != mask {
                        e.insert(c.flat());
                    }
                }
                e
            })
            .clone()
    };
    let mut facts = RankFacts::default();
    let index_of = |t: &[usize]| t.iter().zip(&radices).fold(0u128, |acc, (&x, &r)| acc * r + x as u128) as usize;
    for (ti, t) in tuples.iter().enumerate() {
        let (mask, c) = &coeffs[ti];
        let dep = span_for(*mask).contains(c.flat());
        if mask.count_ones() as usize == w * w {
            facts.full_chain_checked += 1;
            if !dep {
                facts.full_chain_failures += 1;
            }
        }
        if !dep {
            continue;
        }
        let (lo, hi) = if *mask == 0 { (d, 0) } else { (mask.trailing_zeros() as usize, (usize::BITS - 1 - mask.leading_zeros()) as usize) };
        for j in 0..d {
            let outside = *mask == 0 || j < lo || j > hi;
            if !outside {
                continue;
            }
            for x in 1..options[j].len() {
                let mut parent = t.clone();
                parent[j] = x;
                let pi = index_of(&parent);
                let (pmask, pc) = &coeffs[pi];
                facts.lifts_checked += 1;
                if !span_for(*pmask).contains(pc.flat()) {
                    facts.lift_failures += 1;
                }
            }
        }
    }
    Ok(facts)
}

/// Rank over `F(t)` of vectors with univariate polynomial entries, by specializing `t` at
/// `D + 1` distinct points where `D` bounds the degree of every minor, and taking the largest
/// specialized rank.
pub fn rank_over_function_field(field: &Field, vectors: &[Vec<UniPoly>]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let dim = first.len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(PitError::Structural("vectors differ in length".into()));
    }
    let maxdeg = vectors.iter().flatten().filter_map(|p| p.degree()).max().unwrap_or(0);
    let cap = vectors.len().min(dim);
    let bound = maxdeg.saturating_mul(cap as u64);
    field.require_points(bound as u128 + 1, false, "specialization points for a rank over F(t)")?;
    let mut best = 0;
    for t in 0..=bound {
        let rows: Vec<Vec<u64>> = vectors.iter().map(|v| v.iter().map(|p| p.eval(t)).collect()).collect();
        best = best.max(crate::algebra::rank_over_field(field, &rows)?);
        if best == cap {
            break;
        }
    }
    Ok(best)
}

/// The factors of a program as coefficient vectors, boundaries included (in block order).
pub(crate) fn program_factor_coeffs(r: &Roabp) -> Vec<CoeffVectors> {
    let mut out = Vec::new();
    if !r.left_is_constant() {
        out.push(boundary_coeffs(r.left()));
    }
    out.extend(r.layers().iter().map(matpoly_coeffs));
    if !r.right_is_constant() {
        out.push(boundary_coeffs(r.right()));
    }
    out
}
