//! Splitting the variables into base sets on which some ordering of the partitions has
//! distance 1.

use super::partition::{compute_distance, Partition};
use crate::error::{PitError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSet {
    pub vars: Vec<usize>,
    /// Partition indices in the order that certifies the distance.
    pub order: Vec<usize>,
    /// Distance of the restricted sequence under `order` (always 1 when produced here).
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseSetDecomposition {
    pub sets: Vec<BaseSet>,
    pub c: usize,
    pub n: usize,
    /// `1 / 2^(c-1)`.
    pub epsilon: f64,
    /// `2^(c-1) n^(1 - epsilon)`.
    pub cap: f64,
}

impl BaseSetDecomposition {
    pub fn m(&self) -> usize {
        self.sets.len()
    }

    /// `m` strictly below the cap for `c >= 2`; a single partition always gives one set.
    pub fn within_cap(&self) -> bool {
        if self.c == 1 {
            self.m() <= 1
        } else {
            (self.m() as f64) < self.cap
        }
    }
}

pub fn base_set_cap(c: usize, n: usize) -> f64 {
    let e = 1.0 / 2f64.powi(c as i32 - 1);
    2f64.powi(c as i32 - 1) * (n as f64).powf(1.0 - e)
}

fn split(parts: &[Partition], set: Vec<usize>, idx: &[usize], out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
    if idx.len() == 1 {
        out.push((set, vec![idx[0]]));
        return;
    }
    let (head, rest) = (idx[0], &idx[1..]);
    let p = parts[head].restrict(&set);
    let size = set.len();
    let (big, small): (Vec<&Vec<usize>>, Vec<&Vec<usize>>) = p.colors().iter().partition(|x| x.len() * x.len() >= size);
    // a color that is whole in the set: P_head has one color there, so it goes last
    for x in big {
        let mut sub = Vec::new();
        split(parts, x.clone(), rest, &mut sub);
        out.extend(sub.into_iter().map(|(b, mut ord)| {
            ord.push(head);
            (b, ord)
        }));
    }
    // transversals: one element per small color, so P_head is all singletons there and goes first
    let depth = small.iter().map(|y| y.len()).max().unwrap_or(0);
    for a in 0..depth {
        let mut b: Vec<usize> = small.iter().filter_map(|y| y.get(a).copied()).collect();
        b.sort_unstable();
        let mut sub = Vec::new();
        split(parts, b, rest, &mut sub);
        out.extend(sub.into_iter().map(|(b, ord)| {
            let mut o = vec![head];
            o.extend(ord);
            (b, o)
        }));
    }
}

/// Recursive big/small split on the first partition, then on the rest within each piece.
/// Every base set's certificate is checked with [`compute_distance`].
pub fn decompose_base_sets(partitions: &[Partition]) -> Result<BaseSetDecomposition> {
    let Some(first) = partitions.first() else {
        return Err(PitError::Precondition("need at least one partition".into()));
    };
    let universe = first.universe();
    if let Some(i) = partitions.iter().position(|p| p.universe() != universe) {
        return Err(PitError::Structural(format!("partition {i} covers a different variable set")));
    }
    let c = partitions.len();
    let idx: Vec<usize> = (0..c).collect();
    let mut raw = Vec::new();
    if !universe.is_empty() {
        split(partitions, universe.clone(), &idx, &mut raw);
    }
    let mut sets = Vec::with_capacity(raw.len());
    for (vars, order) in raw {
        let seq: Vec<Partition> = order.iter().map(|&i| partitions[i].restrict(&vars)).collect();
        let distance = compute_distance(&seq)?;
        if distance != 1 {
            return Err(PitError::Internal(format!("base set {vars:?} has distance {distance} under its certificate")));
        }
        sets.push(BaseSet { vars, order, distance });
    }
    let n = universe.len();
    Ok(BaseSetDecomposition { sets, c, n, epsilon: 1.0 / 2f64.powi(c as i32 - 1), cap: base_set_cap(c, n) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: usize) -> Partition {
        Partition::new((0..r).map(|i| (i * r..(i + 1) * r).collect()).collect()).unwrap()
    }

    fn residues(r: usize) -> Partition {
        Partition::new((0..r).map(|i| (0..r).map(|k| k * r + i).collect()).collect()).unwrap()
    }

    #[test]
    fn one_partition_one_set() {
        let d = decompose_base_sets(&[rows(3)]).unwrap();
        assert_eq!(d.m(), 1);
        assert_eq!(d.sets[0].vars, (0..9).collect::<Vec<_>>());
        assert!(d.within_cap());
    }

    #[test]
    fn rows_and_residues() {
        let d = decompose_base_sets(&[rows(3), residues(3)]).unwrap();
        assert_eq!(d.m(), 3);
        for (i, s) in d.sets.iter().enumerate() {
            assert_eq!(s.vars, (3 * i..3 * i + 3).collect::<Vec<_>>());
            assert_eq!(s.order, vec![1, 0]);
        }
        assert!(d.within_cap());
        assert_eq!(d.cap, 6.0);
    }

    #[test]
    fn residues_then_rows_is_symmetric() {
        let d = decompose_base_sets(&[residues(4), rows(4)]).unwrap();
        assert_eq!(d.m(), 4);
        assert!(d.within_cap());
    }

    #[test]
    fn small_colors_make_transversals() {
        // pairs on 16 variables: every color is small
        let p1 = Partition::new((0..8).map(|i| vec![2 * i, 2 * i + 1]).collect()).unwrap();
        let d = decompose_base_sets(&[p1, rows(4)]).unwrap();
        assert_eq!(d.m(), 2);
        assert!(d.sets.iter().all(|s| s.order == vec![0, 1]));
    }
}
