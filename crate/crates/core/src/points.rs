//! Lazily generated point sets and the witness sweep over them.
//!
//! Hitting sets are often far larger than what is worth materializing, so a point set is a
//! length plus an index-to-point map. Sweeps stop at the first witness.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{PitError, Result};

/// Index-addressable source of points of a fixed ambient length.
pub trait PointSource: Send + Sync {
    fn ambient(&self) -> usize;
    fn len(&self) -> u128;
    /// Point number `idx`; callers keep `idx < len()`.
    fn point(&self, idx: u128) -> Vec<u64>;
}

/// Which generator produced a point set, and with what parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub generator: String,
    pub params: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(generator: &str) -> Self {
        Provenance { generator: generator.to_string(), params: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// A hitting-set candidate: a lazily indexed list of points plus provenance.
#[derive(Clone)]
pub struct PointSet {
    source: Arc<dyn PointSource>,
    provenance: Provenance,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointSet")
            .field("ambient", &self.ambient())
            .field("len", &self.len())
            .field("provenance", &self.provenance)
            .finish()
    }
}

struct Explicit {
    n: usize,
    points: Vec<Vec<u64>>,
}

impl PointSource for Explicit {
    fn ambient(&self) -> usize {
        self.n
    }
    fn len(&self) -> u128 {
        self.points.len() as u128
    }
    fn point(&self, idx: u128) -> Vec<u64> {
        self.points[idx as usize].clone()
    }
}

struct Concat {
    n: usize,
    parts: Vec<PointSet>,
}

impl PointSource for Concat {
    fn ambient(&self) -> usize {
        self.n
    }
    fn len(&self) -> u128 {
        self.parts.iter().map(|p| p.len()).sum()
    }
    fn point(&self, mut idx: u128) -> Vec<u64> {
        for p in &self.parts {
            if idx < p.len() {
                return p.point(idx);
            }
            idx -= p.len();
        }
        panic!("point index out of range")
    }
}

/// Points per parallel work unit.
const CHUNK: u128 = 512;

impl PointSet {
    pub fn from_source(source: Arc<dyn PointSource>, provenance: Provenance) -> Self {
        PointSet { source, provenance }
    }

    /// Fails if some point has the wrong length.
    pub fn explicit(n: usize, points: Vec<Vec<u64>>, provenance: Provenance) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| p.len() != n) {
            return Err(PitError::Structural(format!(
                "point {i} has length {} but the ambient size is {n}",
                points[i].len()
            )));
        }
        Ok(PointSet { source: Arc::new(Explicit { n, points }), provenance })
    }

    /// Concatenation in the given order.
    pub fn concat(n: usize, parts: Vec<PointSet>, provenance: Provenance) -> Result<Self> {
        if parts.iter().any(|p| p.ambient() != n) {
            return Err(PitError::Structural("concatenated point sets differ in ambient size".into()));
        }
        Ok(PointSet { source: Arc::new(Concat { n, parts }), provenance })
    }

    pub fn ambient(&self) -> usize {
        self.source.ambient()
    }

    pub fn len(&self) -> u128 {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: u128) -> Vec<u64> {
        assert!(idx < self.len(), "point index {idx} out of range");
        self.source.point(idx)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.len()).map(move |i| self.source.point(i))
    }

    /// All points, refusing sets longer than `ceiling`.
    pub fn materialize(&self, ceiling: u64) -> Result<Vec<Vec<u64>>> {
        if self.len() > ceiling as u128 {
            return Err(PitError::Capability(format!(
                "point set has {} points, above the ceiling {ceiling}",
                self.len()
            )));
        }
        Ok(self.iter().collect())
    }

    /// First index whose point satisfies `pred`, scanning at most `ceiling` points.
    ///
    /// With `jobs > 1` chunks are tested in parallel on the current rayon pool; the lowest
    /// matching index still wins, so the answer does not depend on `jobs`. If nothing matches
    /// and the set was cut short by the ceiling, a capability error is returned.
    pub fn find_witness<F>(&self, pred: F, jobs: usize, ceiling: u64) -> Result<Option<(u128, Vec<u64>)>>
    where
        F: Fn(&[u64]) -> Result<bool> + Sync,
    {
        let total = self.len();
        let limit = total.min(ceiling as u128);
        let scan = |lo: u128, hi: u128| -> Result<Option<u128>> {
            for i in lo..hi {
                if pred(&self.source.point(i))? {
                    return Ok(Some(i));
                }
            }
            Ok(None)
        };
        let mut start = 0u128;
        if jobs <= 1 {
            if let Some(i) = scan(0, limit)? {
                return Ok(Some((i, self.source.point(i))));
            }
            start = limit;
        }
        let batch = CHUNK * jobs.max(1) as u128 * 4;
        while start < limit {
            let end = (start + batch).min(limit);
            let chunks: Vec<(u128, u128)> = {
                let mut v = Vec::new();
                let mut lo = start;
                while lo < end {
                    let hi = (lo + CHUNK).min(end);
                    v.push((lo, hi));
                    lo = hi;
                }
                v
            };
            let hits: Vec<Result<Option<u128>>> = chunks.par_iter().map(|&(lo, hi)| scan(lo, hi)).collect();
            for h in hits {
                if let Some(i) = h? {
                    return Ok(Some((i, self.source.point(i))));
                }
            }
            start = end;
        }
        if total > limit {
            return Err(PitError::Capability(format!(
                "swept {limit} of {total} points without a witness; raise the ceiling to continue"
            )));
        }
        Ok(None)
    }
}

/// Mixed-radix decomposition of `idx` with the last digit varying fastest.
pub(crate) fn mixed_radix(mut idx: u128, radices: &[u128]) -> Vec<u128> {
    let mut digits = vec![0u128; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = idx % r;
        idx /= r;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: Vec<Vec<u64>>) -> PointSet {
        PointSet::explicit(2, points, Provenance::new("test")).unwrap()
    }

    #[test]
    fn explicit_and_concat() {
        let a = set(vec![vec![1, 2], vec![3, 4]]);
        let b = set(vec![vec![5, 6]]);
        let c = PointSet::concat(2, vec![a, b], Provenance::new("cat")).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.point(2), vec![5, 6]);
        assert!(PointSet::explicit(2, vec![vec![1]], Provenance::new("bad")).is_err());
    }

    #[test]
    fn witness_independent_of_jobs() {
        let pts: Vec<Vec<u64>> = (0..5000).map(|i| vec![i, i % 7]).collect();
        let s = set(pts);
        let pred = |p: &[u64]| Ok(p[0] > 1234 && p[1] == 3);
        let a = s.find_witness(pred, 1, u64::MAX).unwrap();
        let b = s.find_witness(pred, 8, u64::MAX).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.unwrap().0, 1235);
    }

    #[test]
    fn ceiling_cut_is_reported() {
        let s = set((0..100).map(|i| vec![i, 0]).collect());
        let r = s.find_witness(|_| Ok(false), 1, 10);
        assert!(matches!(r, Err(PitError::Capability(_))));
        assert_eq!(s.find_witness(|_| Ok(false), 1, 1000).unwrap(), None);
    }

    #[test]
    fn radix() {
        assert_eq!(mixed_radix(7, &[2, 3, 2]), vec![1, 0, 1]);
    }
}
