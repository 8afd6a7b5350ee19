//! Dense exponent vectors, the key type for every sparse polynomial.

use std::fmt;

/// Exponents of `x_1..x_n`, one entry per ambient variable. Orders lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn new(exps: Vec<u32>) -> Self {
        ExponentVector(exps)
    }

    /// `x_i^e` in ambient `n`.
    pub fn unit(n: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = e;
        ExponentVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, e: u32) {
        self.0[i] = e;
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Indices with nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i).collect()
    }

    pub fn supp_size(&self) -> usize {
        self.0.iter().filter(|&&e| e > 0).count()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Monomial product; both sides must share the ambient size.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Keeps only the listed variables, zeroing the rest.
    pub fn mask(&self, vars: &[usize]) -> Self {
        let mut out = vec![0; self.len()];
        for &v in vars {
            out[v] = self.0[v];
        }
        ExponentVector(out)
    }

    /// True when every nonzero exponent sits on one of `vars`.
    pub fn within(&self, vars: &[usize]) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| e == 0 || vars.contains(&i))
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Every exponent vector over `vars` (ambient `n`) with entries in `0..=delta`, in lex order.
pub fn all_exponents(n: usize, vars: &[usize], delta: u32) -> Vec<ExponentVector> {
    let mut out = vec![ExponentVector::zeros(n)];
    for &v in vars {
        let mut next = Vec::with_capacity(out.len() * (delta as usize + 1));
        for e in &out {
            for k in 0..=delta {
                let mut e2 = e.clone();
                e2.set(v, k);
                next.push(e2);
            }
        }
        out = next;
    }
    out.sort();
    out
}
