//! Kronecker weight machinery: the naive exponential map and the family of
//! prime-reduced maps, one of which separates any given set of monomial pairs.

use crate::algebra::{field::primes, ExponentVector};
use crate::error::{PitError, Result};

/// Default constant in the candidate-count bound `N = c0 * n * |A| * ceil(log2(delta + 2))`.
pub const DEFAULT_C0: u64 = 4;

/// Positive integer weights on the variables, extended additively to monomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeightFn {
    weights: Vec<u64>,
}

impl WeightFn {
    /// Fails if any weight is zero.
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(PitError::Precondition(format!("weight of x{} must be positive", i + 1)));
        }
        Ok(WeightFn { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> u64 {
        self.weights[i]
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    /// `w(x^e) = sum_i e_i w(x_i)`.
    pub fn weight(&self, e: &ExponentVector) -> u128 {
        e.as_slice().iter().zip(&self.weights).map(|(&k, &w)| k as u128 * w as u128).sum()
    }
}

/// Distinct unordered monomial pairs that must receive distinct weights.
#[derive(Clone, Debug)]
pub struct PairSet {
    n: usize,
    delta: u32,
    pairs: Vec<(ExponentVector, ExponentVector)>,
}

impl PairSet {
    /// Rejects equal pairs, wrong ambient sizes, and exponents above `delta`.
    pub fn new(n: usize, delta: u32, pairs: Vec<(ExponentVector, ExponentVector)>) -> Result<Self> {
        for (i, (a, b)) in pairs.iter().enumerate() {
            if a.len() != n || b.len() != n {
                return Err(PitError::Structural(format!("pair {i} is not over {n} variables")));
            }
            if a == b {
                return Err(PitError::Precondition(format!("pair {i} repeats the monomial {a:?}")));
            }
            if a.max_degree() > delta || b.max_degree() > delta {
                return Err(PitError::Precondition(format!("pair {i} exceeds individual degree {delta}")));
            }
        }
        Ok(PairSet { n, delta, pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(ExponentVector, ExponentVector)] {
        &self.pairs
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// True when `w` gives every pair distinct weights.
    pub fn separated_by(&self, w: &WeightFn) -> bool {
        self.pairs.iter().all(|(a, b)| w.weight(a) != w.weight(b))
    }
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// `x_i -> (delta+1)^(i-1)`. Overflow of `u64` is a capability error.
pub fn naive_kronecker(n: usize, delta: u32) -> Result<WeightFn> {
    let base = delta as u64 + 1;
    let mut weights = Vec::with_capacity(n);
    let mut cur: u64 = 1;
    for i in 0..n {
        weights.push(cur);
        if i + 1 < n {
            cur = cur.checked_mul(base).ok_or_else(|| {
                PitError::Capability(format!("naive Kronecker weights overflow u64 at x{} for delta {delta}", i + 2))
            })?;
        }
    }
    WeightFn::new(weights)
}

/// `x_i -> (delta+1)^(i-1) mod p`, with a zero residue replaced by `p` so every weight stays positive.
pub fn prime_weights(n: usize, delta: u32, p: u64) -> WeightFn {
    let base = (delta as u64 + 1) % p;
    let mut weights = Vec::with_capacity(n);
    let mut cur = 1 % p;
    for _ in 0..n {
        weights.push(if cur == 0 { p } else { cur });
        cur = ((cur as u128 * base as u128) % p as u128) as u64;
    }
    WeightFn { weights }
}

/// The candidate count `N` and the prime cutoff `N * ceil(log2 N)` for `pairs` pairs.
/// `N` is clamped to at least 4 so the cutoff always reaches the `N`-th prime.
pub fn kron_bounds(n: usize, delta: u32, pairs: u64, c0: u64) -> (u64, u64) {
    let big_n = c0
        .saturating_mul(n as u64)
        .saturating_mul(pairs)
        .saturating_mul(ceil_log2(delta as u64 + 2))
        .max(4);
    (big_n, big_n.saturating_mul(ceil_log2(big_n)))
}

/// Result of the prime search.
#[derive(Clone, Debug)]
pub struct Separation {
    pub n: usize,
    pub delta: u32,
    /// `N` from the counting bound on bad primes.
    pub big_n: u64,
    /// Largest prime considered.
    pub cutoff: u64,
    /// First prime whose reduced map separates every pair.
    pub prime: u64,
    /// Position of `prime` in the candidate list.
    pub index: usize,
    pub weights: WeightFn,
}

impl Separation {
    /// Every candidate map within the cutoff, in increasing prime order.
    pub fn candidates(&self) -> impl Iterator<Item = (u64, WeightFn)> + '_ {
        candidate_primes(self.cutoff).map(move |p| (p, prime_weights(self.n, self.delta, p)))
    }
}

/// Primes up to and including `cutoff`.
pub fn candidate_primes(cutoff: u64) -> impl Iterator<Item = u64> {
    primes().take_while(move |&p| p <= cutoff)
}

/// Scans primes `2, 3, 5, ...` up to the cutoff and returns the first one whose reduced
/// Kronecker map separates all pairs. Failure contradicts the counting bound and is reported
/// as an internal inconsistency.
pub fn separating_weights(pairs: &PairSet, c0: u64) -> Result<Separation> {
    if pairs.is_empty() {
        return Err(PitError::Precondition("separating_weights needs at least one pair".into()));
    }
    let (n, delta) = (pairs.n(), pairs.delta());
    let (big_n, cutoff) = kron_bounds(n, delta, pairs.len() as u64, c0);
    for (index, p) in candidate_primes(cutoff).enumerate() {
        let w = prime_weights(n, delta, p);
        if pairs.separated_by(&w) {
            return Ok(Separation { n, delta, big_n, cutoff, prime: p, index, weights: w });
        }
    }
    Err(PitError::Internal(format!(
        "no prime up to the cutoff {cutoff} separates the {} pairs (N = {big_n})",
        pairs.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::all_exponents;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    #[test]
    fn naive_examples() {
        let w = naive_kronecker(2, 1).unwrap();
        assert_eq!(w.weights(), &[1, 2]);
        assert_eq!(w.weight(&ev(&[1, 1])), 3);
        assert_eq!(naive_kronecker(1, 7).unwrap().weights(), &[1]);
        assert_eq!(naive_kronecker(3, 2).unwrap().weights(), &[1, 3, 9]);
        assert!(matches!(naive_kronecker(80, 1), Err(PitError::Capability(_))));
    }

    #[test]
    fn naive_is_injective_on_small_grids() {
        let w = naive_kronecker(3, 2).unwrap();
        let all = all_exponents(3, &[0, 1, 2], 2);
        let mut ws: Vec<u128> = all.iter().map(|e| w.weight(e)).collect();
        ws.sort();
        ws.dedup();
        assert_eq!(ws.len(), 27);
    }

    #[test]
    fn zero_residue_rule() {
        // (1+1)^1 mod 2 = 0 -> 2, and (1+1)^2 mod 2 = 0 -> 2
        let w = prime_weights(3, 1, 2);
        assert_eq!(w.weights(), &[1, 2, 2]);
        assert_eq!(w.weight(&ev(&[1, 1, 0])), 3);
        assert_eq!(w.weight(&ev(&[0, 0, 1])), 2);
        let a = PairSet::new(3, 1, vec![(ev(&[1, 1, 0]), ev(&[0, 0, 1]))]).unwrap();
        let s = separating_weights(&a, DEFAULT_C0).unwrap();
        assert_eq!(s.prime, 2);
    }

    #[test]
    fn equal_pair_rejected() {
        assert!(PairSet::new(2, 1, vec![(ev(&[1, 0]), ev(&[1, 0]))]).is_err());
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(17), 5);
    }
}
