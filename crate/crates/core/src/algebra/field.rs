//! Prime field GF(p) with canonical residues in `[0, p)`.

use crate::error::{PitError, Result};

/// Largest modulus accepted. Keeps `a + b` inside `u64` and products inside `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Default modulus used by test harnesses and the CLI.
pub const DEFAULT_MODULUS: u64 = 10007;

/// A prime field context. Elements are plain `u64` residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
}

impl Field {
    /// Builds GF(p); rejects composites, 2, and moduli above [`MAX_MODULUS`].
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 {
            return Err(PitError::Precondition(format!("modulus {p} must be an odd prime")));
        }
        if p > MAX_MODULUS {
            return Err(PitError::Precondition(format!("modulus {p} exceeds 2^62")));
        }
        if !is_prime(p) {
            return Err(PitError::Precondition(format!("modulus {p} is not prime")));
        }
        Ok(Field { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    /// Maps a signed integer to its canonical residue.
    pub fn from_i64(&self, a: i64) -> u64 {
        let r = (a as i128).rem_euclid(self.p as i128);
        r as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by extended Euclid; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(t0.rem_euclid(self.p as i128) as u64)
    }

    /// `a / b`; panics on a zero divisor, callers check first.
    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b).expect("division by zero in GF(p)"))
    }

    /// Fails with `ModulusTooSmall` unless the field has at least `count` elements
    /// (or `count` nonzero elements when `nonzero` is set).
    pub fn require_points(&self, count: u128, nonzero: bool, what: &str) -> Result<()> {
        let avail = if nonzero { self.p as u128 - 1 } else { self.p as u128 };
        if count > avail {
            return Err(PitError::ModulusTooSmall(format!(
                "{what} needs {count} distinct{} field elements but GF({}) has {avail}",
                if nonzero { " nonzero" } else { "" },
                self.p
            )));
        }
        Ok(())
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Iterator over the primes `2, 3, 5, ...` in increasing order.
pub fn primes() -> impl Iterator<Item = u64> {
    std::iter::once(2).chain((3u64..).step_by(2).filter(|&k| is_prime(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(is_prime((1 << 61) - 1));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Field::new(2).is_err());
        assert!(Field::new(15).is_err());
        assert!(Field::new(10007).is_ok());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Field::new(10007).unwrap();
        for a in 1..200 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.from_i64(-1), 10006);
    }

    #[test]
    fn first_primes() {
        let v: Vec<u64> = primes().take(8).collect();
        assert_eq!(v, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
