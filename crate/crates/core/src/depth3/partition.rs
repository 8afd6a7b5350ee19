//! Variable partitions, friendly neighborhoods and the distance of a partition sequence.

use std::collections::BTreeSet;

use super::Gate;
use crate::error::{PitError, Result};

/// Disjoint nonempty colors. Normalized: each color sorted, colors ordered by smallest variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    colors: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(colors: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(colors.len());
        for (i, mut c) in colors.into_iter().enumerate() {
            if c.is_empty() {
                return Err(PitError::Structural(format!("color {i} is empty")));
            }
            c.sort_unstable();
            for &v in &c {
                if !seen.insert(v) {
                    return Err(PitError::Structural(format!("x{} appears in two colors", v + 1)));
                }
            }
            out.push(c);
        }
        out.sort_by_key(|c| c[0]);
        Ok(Partition { colors: out })
    }

    /// All singletons over `0..n`.
    pub fn singletons(n: usize) -> Self {
        Partition { colors: (0..n).map(|v| vec![v]).collect() }
    }

    /// One color per non-constant form; variables of `0..n` the gate omits become singletons.
    pub fn from_gate(g: &Gate, n: usize) -> Result<Self> {
        if !g.is_multilinear() {
            return Err(PitError::Precondition("gate forms share a variable".into()));
        }
        let mut colors: Vec<Vec<usize>> = g.forms.iter().filter(|l| !l.is_constant()).map(|l| l.vars()).collect();
        let used: BTreeSet<usize> = colors.iter().flatten().copied().collect();
        colors.extend((0..n).filter(|v| !used.contains(v)).map(|v| vec![v]));
        Partition::new(colors)
    }

    pub fn colors(&self) -> &[Vec<usize>] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Sorted union of the colors.
    pub fn universe(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.colors.iter().flatten().copied().collect();
        u.sort_unstable();
        u
    }

    /// Color index of `v`, if covered.
    pub fn color_of(&self, v: usize) -> Option<usize> {
        self.colors.iter().position(|c| c.binary_search(&v).is_ok())
    }

    /// Restriction to `b`; colors that become empty are dropped.
    pub fn restrict(&self, b: &[usize]) -> Partition {
        let keep: BTreeSet<usize> = b.iter().copied().collect();
        let colors = self
            .colors
            .iter()
            .map(|c| c.iter().copied().filter(|v| keep.contains(v)).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();
        Partition::new(colors).expect("restriction of a partition is a partition")
    }

    /// Renames variable `v` to `map(v)`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Partition {
        Partition::new(self.colors.iter().map(|c| c.iter().map(|&v| map(v)).collect()).collect())
            .expect("relabeling by an injection keeps a partition")
    }
}

/// A class of colors of `P_j` closed under sharing variables with upper colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    /// Color indices in `P_j`, ascending.
    pub colors: Vec<usize>,
    /// Union of those colors, sorted.
    pub vars: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn check_universe(seq: &[Partition]) -> Result<()> {
    if let Some(first) = seq.first() {
        let u = first.universe();
        if let Some(i) = seq.iter().position(|p| p.universe() != u) {
            return Err(PitError::Structural(format!("partition {i} covers a different variable set than partition 0")));
        }
    }
    Ok(())
}

/// Neighborhoods of `seq[j]` (0-based) with respect to `seq[..j]`.
///
/// Two colors of `P_j` are linked when some upper color meets both; the classes are the
/// connected components, ordered by smallest variable. Each class's variable set is a union
/// of whole colors of every upper partition.
pub fn friendly_neighborhoods(seq: &[Partition], j: usize) -> Result<Vec<Neighborhood>> {
    if j >= seq.len() {
        return Err(PitError::Precondition(format!("index {j} outside a sequence of {} partitions", seq.len())));
    }
    check_universe(seq)?;
    let pj = &seq[j];
    let owner: std::collections::BTreeMap<usize, usize> =
        pj.colors.iter().enumerate().flat_map(|(ci, c)| c.iter().map(move |&v| (v, ci))).collect();
    let mut parent: Vec<usize> = (0..pj.len()).collect();
    for upper in &seq[..j] {
        for x in &upper.colors {
            let first = find(&mut parent, owner[&x[0]]);
            for v in &x[1..] {
                let r = find(&mut parent, owner[v]);
                if r != first {
                    // keep the smaller index as root so classes come out in color order
                    let (lo, hi) = if r < first { (r, first) } else { (first, r) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for ci in 0..pj.len() {
        let root = find(&mut parent, ci);
        classes.entry(root).or_default().push(ci);
    }
    let out: Vec<Neighborhood> = classes
        .into_values()
        .map(|colors| {
            let mut vars: Vec<usize> = colors.iter().flat_map(|&c| pj.colors[c].iter().copied()).collect();
            vars.sort_unstable();
            Neighborhood { colors, vars }
        })
        .collect();
    debug_assert!(out.iter().all(|nb| seq[..j].iter().all(|p| is_union_of_colors(p, &nb.vars))));
    Ok(out)
}

/// True iff `vars` is exactly a union of colors of `p`.
pub(crate) fn is_union_of_colors(p: &Partition, vars: &[usize]) -> bool {
    let set: BTreeSet<usize> = vars.iter().copied().collect();
    p.colors.iter().all(|c| {
        let inside = c.iter().filter(|v| set.contains(v)).count();
        inside == 0 || inside == c.len()
    })
}

/// Largest neighborhood size (in colors) over all non-top partitions; 1 for a single partition.
pub fn compute_distance(seq: &[Partition]) -> Result<usize> {
    if seq.is_empty() {
        return Err(PitError::Precondition("distance of an empty sequence".into()));
    }
    let mut delta = 1;
    for j in 1..seq.len() {
        for nb in friendly_neighborhoods(seq, j)? {
            delta = delta.max(nb.colors.len());
        }
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn rows(r: usize) -> Partition {
        Partition::new((0..r).map(|i| (i * r..(i + 1) * r).collect()).collect()).unwrap()
    }

    pub(crate) fn residues(r: usize) -> Partition {
        Partition::new((0..r).map(|i| (0..r).map(|k| k * r + i).collect()).collect()).unwrap()
    }

    fn pairs(n: usize) -> Partition {
        Partition::new((0..n / 2).map(|i| vec![2 * i, 2 * i + 1]).collect()).unwrap()
    }

    #[test]
    fn top_partition_classes_are_colors() {
        let seq = [rows(3), residues(3)];
        let nb = friendly_neighborhoods(&seq, 0).unwrap();
        assert_eq!(nb.len(), 3);
        assert!(nb.iter().all(|c| c.colors.len() == 1));
    }

    #[test]
    fn singletons_then_pairs() {
        let seq = [Partition::singletons(6), pairs(6)];
        let nb = friendly_neighborhoods(&seq, 1).unwrap();
        assert_eq!(nb.len(), 3);
        assert!(nb.iter().all(|c| c.colors.len() == 1));
        assert_eq!(compute_distance(&seq).unwrap(), 1);
    }

    #[test]
    fn rows_then_residues() {
        let seq = [rows(3), residues(3)];
        let nb = friendly_neighborhoods(&seq, 1).unwrap();
        assert_eq!(nb.len(), 1);
        assert_eq!(nb[0].colors, vec![0, 1, 2]);
        assert_eq!(compute_distance(&seq).unwrap(), 3);
        assert_eq!(compute_distance(&[residues(3), rows(3)]).unwrap(), 3);
    }

    #[test]
    fn repeated_partition_has_distance_one() {
        assert_eq!(compute_distance(&[rows(4), rows(4), rows(4)]).unwrap(), 1);
        assert_eq!(compute_distance(&[rows(4)]).unwrap(), 1);
    }

    #[test]
    fn mismatched_universe() {
        let seq = [rows(2), Partition::singletons(3)];
        assert!(friendly_neighborhoods(&seq, 1).is_err());
    }

    #[test]
    fn restriction_drops_empty_colors() {
        let p = Partition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let r = p.restrict(&[0, 2, 3]);
        assert_eq!(r.colors(), &[vec![0], vec![2, 3]]);
    }
}
