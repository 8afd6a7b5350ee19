//! Square matrices over GF(p), row-major.

use super::field::Field;

/// A `w x w` matrix of canonical residues. Width 0 is allowed and behaves as the empty map.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat {
    w: usize,
    a: Vec<u64>,
}

impl Mat {
    pub fn zero(w: usize) -> Self {
        Mat { w, a: vec![0; w * w] }
    }

    pub fn identity(w: usize) -> Self {
        let mut m = Mat::zero(w);
        for i in 0..w {
            m.a[i * w + i] = 1;
        }
        m
    }

    /// Builds from rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let w = rows.len();
        let mut a = Vec::with_capacity(w * w);
        for r in rows {
            assert_eq!(r.len(), w, "matrix rows must be square");
            a.extend_from_slice(r);
        }
        Mat { w, a }
    }

    pub fn from_flat(w: usize, a: Vec<u64>) -> Self {
        assert_eq!(a.len(), w * w);
        Mat { w, a }
    }

    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.w + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.a[i * self.w + j] = v;
    }

    /// The `w^2` entries, row-major. This is the vector used for every span test.
    pub fn flat(&self) -> &[u64] {
        &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Mat, f: &Field) -> Mat {
        assert_eq!(self.w, other.w);
        let w = self.w;
        let p = f.modulus() as u128;
        let mut out = vec![0u64; w * w];
        for i in 0..w {
            for j in 0..w {
                let mut acc: u128 = 0;
                for k in 0..w {
                    acc += self.a[i * w + k] as u128 * other.a[k * w + j] as u128;
                    if acc >= 1 << 125 {
                        acc %= p;
                    }
                }
                out[i * w + j] = (acc % p) as u64;
            }
        }
        Mat { w, a: out }
    }

    pub fn add(&self, other: &Mat, f: &Field) -> Mat {
        assert_eq!(self.w, other.w);
        Mat { w: self.w, a: self.a.iter().zip(&other.a).map(|(&x, &y)| f.add(x, y)).collect() }
    }

    pub fn add_assign(&mut self, other: &Mat, f: &Field) {
        for (x, &y) in self.a.iter_mut().zip(&other.a) {
            *x = f.add(*x, y);
        }
    }

    pub fn scale(&self, c: u64, f: &Field) -> Mat {
        Mat { w: self.w, a: self.a.iter().map(|&x| f.mul(x, c)).collect() }
    }

    /// `u^T M v` for vectors of length `w`.
    pub fn bilinear(&self, u: &[u64], v: &[u64], f: &Field) -> u64 {
        let mut acc = 0;
        for i in 0..self.w {
            if u[i] == 0 {
                continue;
            }
            let mut row = 0;
            for j in 0..self.w {
                row = f.add(row, f.mul(self.get(i, j), v[j]));
            }
            acc = f.add(acc, f.mul(u[i], row));
        }
        acc
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, u: &[u64], f: &Field) -> Vec<u64> {
        let mut out = vec![0; self.w];
        for i in 0..self.w {
            if u[i] == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(u[i], self.get(i, j)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let f = Field::new(7).unwrap();
        let m = Mat::from_rows(&[vec![1, 2], vec![3, 6]]);
        assert_eq!(m.mul(&Mat::identity(2), &f), m);
        assert_eq!(Mat::identity(2).mul(&m, &f), m);
    }

    #[test]
    fn bilinear_form() {
        let f = Field::new(7).unwrap();
        let m = Mat::from_rows(&[vec![1, 2], vec![3, 4]]);
        // [1 1] M [1 0]^T = 1 + 3
        assert_eq!(m.bilinear(&[1, 1], &[1, 0], &f), 4);
        assert_eq!(m.left_mul_vec(&[1, 1], &f), vec![4, 6]);
    }
}
