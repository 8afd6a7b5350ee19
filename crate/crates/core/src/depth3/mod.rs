//! Multilinear depth-3 circuits `C = sum_i a_i prod_j l_ij`: gate partitions, distance,
//! the reduction to ROABPs, base-set decompositions and the whitebox test for sums of
//! set-multilinear circuits.

mod bases;
mod partition;
mod reduce;
mod sumsml;

use std::collections::BTreeMap;

pub use bases::{base_set_cap, decompose_base_sets, BaseSet, BaseSetDecomposition};
pub use partition::{compute_distance, friendly_neighborhoods, Neighborhood, Partition};
pub use reduce::{
    best_gate_order, circuit_to_roabp, circuit_to_roabp_with, gate_order_distance, sparse_to_roabp, width_bound,
    DistanceCertificate,
};
pub use sumsml::{sum_sml_whitebox_test, SumSmlOptions, SumSmlReport, Verdict};

use crate::algebra::{ExponentVector, Field, ScalarPoly};
use crate::error::{Limits, PitError, Result};

/// `b0 + sum_r b_r x_r`, stored sparsely (zero coefficients are dropped).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub constant: u64,
    pub coeffs: BTreeMap<usize, u64>,
}

impl LinearForm {
    pub fn new(f: &Field, constant: u64, coeffs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, c) in coeffs {
            let e = map.entry(v).or_insert(0);
            *e = f.add(*e, f.reduce(c));
        }
        map.retain(|_, c| *c != 0);
        LinearForm { constant: f.reduce(constant), coeffs: map }
    }

    pub fn constant(f: &Field, c: u64) -> Self {
        Self::new(f, c, [])
    }

    pub fn vars(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: usize) -> u64 {
        self.coeffs.get(&v).copied().unwrap_or(0)
    }

    pub fn sparsity(&self) -> usize {
        self.coeffs.len() + usize::from(self.constant != 0)
    }

    pub fn eval(&self, f: &Field, point: &[u64]) -> u64 {
        self.coeffs.iter().fold(self.constant, |acc, (&v, &c)| f.add(acc, f.mul(c, point[v])))
    }

    pub fn to_poly(&self, f: Field, n: usize) -> ScalarPoly {
        let mut terms = vec![(ExponentVector::zeros(n), self.constant)];
        terms.extend(self.coeffs.iter().map(|(&v, &c)| (ExponentVector::unit(n, v, 1), c)));
        ScalarPoly::from_terms(f, n, terms).expect("form variables checked against n")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub scale: u64,
    pub forms: Vec<LinearForm>,
}

impl Gate {
    pub fn new(scale: u64, forms: Vec<LinearForm>) -> Self {
        Gate { scale, forms }
    }

    /// Forms mention pairwise disjoint variables.
    pub fn is_multilinear(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.forms.iter().flat_map(|l| l.coeffs.keys()).all(|v| seen.insert(*v))
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.forms.iter().flat_map(|l| l.coeffs.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Depth3Circuit {
    field: Field,
    n: usize,
    gates: Vec<Gate>,
    multilinear: bool,
}

impl Depth3Circuit {
    /// Reduces scalars into the field; variables must be below `n`.
    pub fn new(field: Field, n: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut gates = gates;
        for (i, g) in gates.iter_mut().enumerate() {
            g.scale = field.reduce(g.scale);
            for l in &mut g.forms {
                *l = LinearForm::new(&field, l.constant, std::mem::take(&mut l.coeffs));
                if let Some(&v) = l.coeffs.keys().find(|&&v| v >= n) {
                    return Err(PitError::Structural(format!("gate {} uses x{} beyond n = {n}", i + 1, v + 1)));
                }
            }
        }
        let multilinear = gates.iter().all(Gate::is_multilinear);
        Ok(Depth3Circuit { field, n, gates, multilinear })
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
    /// Top fan-in `k`.
    pub fn k(&self) -> usize {
        self.gates.len()
    }
    pub fn is_multilinear(&self) -> bool {
        self.multilinear
    }

    pub fn require_multilinear(&self) -> Result<()> {
        match self.gates.iter().position(|g| !g.is_multilinear()) {
            Some(i) => Err(PitError::Precondition(format!("gate {} repeats a variable across its forms", i + 1))),
            None => Ok(()),
        }
    }

    /// Partition induced by gate `i`, padded with singletons.
    pub fn gate_partition(&self, i: usize) -> Result<Partition> {
        Partition::from_gate(&self.gates[i], self.n)
    }

    pub fn evaluate(&self, point: &[u64]) -> Result<u64> {
        crate::algebra::poly::check_point(self.n, point)?;
        let f = &self.field;
        let mut acc = 0;
        for g in &self.gates {
            let mut prod = g.scale;
            for l in &g.forms {
                if prod == 0 {
                    break;
                }
                prod = f.mul(prod, l.eval(f, point));
            }
            acc = f.add(acc, prod);
        }
        Ok(acc)
    }

    /// Product of form sparsities per gate, summed; an upper bound on the expansion size.
    pub fn expansion_estimate(&self) -> u128 {
        self.gates
            .iter()
            .map(|g| g.forms.iter().map(|l| l.sparsity().max(1) as u128).fold(1u128, |a, b| a.saturating_mul(b)))
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    /// Direct expansion of every gate; the reference oracle.
    pub fn expand(&self, limits: &Limits) -> Result<ScalarPoly> {
        let est = self.expansion_estimate();
        if est > limits.expand_ceiling as u128 {
            return Err(PitError::Capability(format!(
                "circuit expansion estimated at {est} terms, above the ceiling {}",
                limits.expand_ceiling
            )));
        }
        let (f, n) = (self.field, self.n);
        let mut acc = ScalarPoly::zero(f, n);
        for g in &self.gates {
            let mut prod = ScalarPoly::constant(f, n, g.scale);
            for l in &g.forms {
                if prod.is_zero() {
                    break;
                }
                prod = prod.mul(&l.to_poly(f, n))?;
            }
            acc = acc.add(&prod)?;
        }
        Ok(acc)
    }
}
