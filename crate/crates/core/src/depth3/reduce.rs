//! Small-distance circuits to ROABPs: per-monomial lanes for sparse polynomials, chained
//! across friendly neighborhoods and direct-summed over the gates.

use std::collections::BTreeMap;

use super::partition::{compute_distance, friendly_neighborhoods, Partition};
use super::Depth3Circuit;
use crate::algebra::{ExponentVector, Field, Mat, MatPoly, ScalarPoly};
use crate::error::{PitError, Result};
use crate::roabp::Roabp;

/// A gate ordering together with the distance it achieves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceCertificate {
    pub order: Vec<usize>,
    pub delta: usize,
}

/// Reported width bound `k (n+1)^delta`: each neighborhood product has at most `delta`
/// forms of at most `n + 1` terms each.
pub fn width_bound(k: usize, n: usize, delta: usize) -> u128 {
    (k as u128).saturating_mul((n as u128 + 1).saturating_pow(delta as u32))
}

fn single_var_layers(
    field: Field,
    n: usize,
    w: usize,
    order: &[usize],
    mut build: impl FnMut(usize, usize, &mut Mat, &mut Mat),
) -> (Vec<Vec<usize>>, Vec<MatPoly>) {
    let mut blocks = Vec::with_capacity(order.len());
    let mut layers = Vec::with_capacity(order.len());
    for (pos, &v) in order.iter().enumerate() {
        let mut m0 = Mat::zero(w);
        let mut m1 = Mat::zero(w);
        build(pos, v, &mut m0, &mut m1);
        let mut terms = Vec::with_capacity(2);
        if !m0.is_zero() {
            terms.push((ExponentVector::zeros(n), m0));
        }
        if !m1.is_zero() {
            terms.push((ExponentVector::unit(n, v, 1), m1));
        }
        blocks.push(vec![v]);
        layers.push(MatPoly::from_terms(field, n, w, terms).expect("single-variable layer"));
    }
    (blocks, layers)
}

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(PitError::Precondition(format!("variable order repeats or exceeds x{}", v + 1)));
        }
    }
    Ok(())
}

/// Width-`sp(f)` program for a multilinear `f`, one single-variable layer per entry of
/// `order`. Lane `m` carries monomial `m`: its edge at `x_v` is `x_v` if `v` divides `m`,
/// else 1; the left boundary holds the coefficients.
pub fn sparse_to_roabp(f: &ScalarPoly, order: &[usize]) -> Result<Roabp> {
    if !f.is_multilinear() {
        return Err(PitError::Precondition("sparse_to_roabp needs a multilinear polynomial".into()));
    }
    let (field, n) = (f.field(), f.n());
    check_order(n, order)?;
    if let Some(v) = f.vars().into_iter().find(|v| !order.contains(v)) {
        return Err(PitError::Precondition(format!("x{} is missing from the variable order", v + 1)));
    }
    let terms: Vec<(&ExponentVector, u64)> = f.terms().collect();
    let w = terms.len();
    let (blocks, layers) = single_var_layers(field, n, w, order, |_, v, m0, m1| {
        for (lane, (e, _)) in terms.iter().enumerate() {
            if e.get(v) == 1 {
                m1.set(lane, lane, 1);
            } else {
                m0.set(lane, lane, 1);
            }
        }
    });
    let s: Vec<u64> = terms.iter().map(|(_, c)| *c).collect();
    Roabp::with_constant_boundaries(field, n, blocks, layers, &s, &vec![1; w])
}

/// Distance of the gate-induced partitions taken in `order`.
pub fn gate_order_distance(c: &Depth3Circuit, order: &[usize]) -> Result<usize> {
    if order.is_empty() {
        return Ok(1);
    }
    let seq = order.iter().map(|&g| c.gate_partition(g)).collect::<Result<Vec<_>>>()?;
    compute_distance(&seq)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Lexicographically first gate ordering of minimum distance, trying all `k!` orderings.
/// Beyond six gates the caller must supply an order.
pub fn best_gate_order(c: &Depth3Circuit) -> Result<DistanceCertificate> {
    let k = c.k();
    if k > 6 {
        return Err(PitError::Capability(format!("{k} gates: searching all orderings stops at 6, supply an order")));
    }
    let parts = (0..k).map(|g| c.gate_partition(g)).collect::<Result<Vec<_>>>()?;
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: Option<DistanceCertificate> = None;
    loop {
        let seq: Vec<Partition> = perm.iter().map(|&g| parts[g].clone()).collect();
        let d = if seq.is_empty() { 1 } else { compute_distance(&seq)? };
        if best.as_ref().is_none_or(|b| d < b.delta) {
            best = Some(DistanceCertificate { order: perm.clone(), delta: d });
            if d == 1 {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one ordering"))
}

/// Reduction along a certified gate ordering, using the gate-induced partitions.
pub fn circuit_to_roabp(c: &Depth3Circuit, cert: &DistanceCertificate) -> Result<Roabp> {
    let actual = gate_order_distance(c, &cert.order)?;
    if actual > cert.delta {
        return Err(PitError::Precondition(format!(
            "the gate ordering has distance {actual}, not the certified {}",
            cert.delta
        )));
    }
    let parts = (0..c.k()).map(|g| c.gate_partition(g)).collect::<Result<Vec<_>>>()?;
    circuit_to_roabp_with(c, &cert.order, &parts)
}

/// Reduction with explicit per-gate partitions (indexed by gate). Every non-constant form
/// must lie inside one color of its gate's partition, and all partitions must cover the
/// same variables; the program reads exactly those variables, one per layer.
///
/// Each gate's neighborhoods are merged into the coarser partitions `P'_i`; a total order in
/// which every `P'_i` color is contiguous is read off by sorting on `(color in P'_k, ...,
/// color in P'_1, variable)`. Per gate, the product of the forms in each neighborhood is
/// laid out as lanes, consecutive neighborhoods are fully connected, and the gates are
/// direct-summed with left weights `a_i` times the first neighborhood's coefficients.
pub fn circuit_to_roabp_with(c: &Depth3Circuit, order: &[usize], parts: &[Partition]) -> Result<Roabp> {
    c.require_multilinear()?;
    let (field, n, k) = (c.field(), c.n(), c.k());
    if parts.len() != k {
        return Err(PitError::Structural(format!("{} partitions for {k} gates", parts.len())));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..k).collect::<Vec<_>>() {
        return Err(PitError::Precondition("gate order is not a permutation of the gates".into()));
    }
    let universe = if k == 0 { (0..n).collect() } else { parts[order[0]].universe() };
    let seq: Vec<Partition> = order.iter().map(|&g| parts[g].clone()).collect();
    // form -> color check
    for &g in order {
        for l in c.gates()[g].forms.iter().filter(|l| !l.is_constant()) {
            let vars = l.vars();
            let col = parts[g].color_of(vars[0]);
            if col.is_none() || vars.iter().any(|&v| parts[g].color_of(v) != col) {
                return Err(PitError::Precondition(format!(
                    "a form of gate {} is not inside one color of its partition",
                    g + 1
                )));
            }
        }
    }
    // merged partitions P'_i, by position in `order`
    let mut merged: Vec<Vec<Vec<usize>>> = Vec::with_capacity(k);
    for j in 0..k {
        merged.push(friendly_neighborhoods(&seq, j)?.into_iter().map(|nb| nb.vars).collect());
    }
    let mut rank: BTreeMap<usize, Vec<usize>> = universe.iter().map(|&v| (v, Vec::with_capacity(k + 1))).collect();
    for colors in merged.iter().rev() {
        for (ci, col) in colors.iter().enumerate() {
            for v in col {
                rank.get_mut(v).expect("merged colors stay inside the universe").push(ci);
            }
        }
    }
    let mut var_order: Vec<usize> = universe.clone();
    var_order.sort_by_key(|v| (rank[v].clone(), *v));
    let pos: BTreeMap<usize, usize> = var_order.iter().enumerate().map(|(p, &v)| (v, p)).collect();
    for colors in &merged {
        for col in colors {
            let ps: Vec<usize> = col.iter().map(|v| pos[v]).collect();
            let (lo, hi) = (*ps.iter().min().unwrap(), *ps.iter().max().unwrap());
            if hi - lo + 1 != col.len() {
                return Err(PitError::Internal("merged partitions do not refine each other".into()));
            }
        }
    }

    struct Lane {
        start: usize,
        monomials: Vec<(ExponentVector, u64)>,
    }
    struct GateLanes {
        scale: u64,
        segments: Vec<Lane>,
        width: usize,
    }
    let mut gate_lanes = Vec::new();
    for (i, &g) in order.iter().enumerate() {
        let gate = &c.gates()[g];
        let mut scale = gate.scale;
        for l in gate.forms.iter().filter(|l| l.is_constant()) {
            scale = field.mul(scale, l.constant);
        }
        if scale == 0 {
            continue;
        }
        let mut segs: Vec<&Vec<usize>> = merged[i].iter().collect();
        segs.sort_by_key(|col| col.iter().map(|v| pos[v]).min().unwrap());
        let mut segments = Vec::with_capacity(segs.len());
        let mut dead = false;
        for col in segs {
            let mut q = ScalarPoly::constant(field, n, 1);
            for l in gate.forms.iter().filter(|l| !l.is_constant() && col.binary_search(&l.vars()[0]).is_ok()) {
                q = q.mul(&l.to_poly(field, n))?;
            }
            if q.is_zero() {
                dead = true;
                break;
            }
            let start = col.iter().map(|v| pos[v]).min().unwrap();
            segments.push(Lane { start, monomials: q.terms().map(|(e, c)| (e.clone(), c)).collect() });
        }
        if dead {
            continue;
        }
        let width = segments.iter().map(|s| s.monomials.len()).max().unwrap_or(1);
        gate_lanes.push(GateLanes { scale, segments, width });
    }

    let w: usize = gate_lanes.iter().map(|g| g.width).sum();
    let mut left = vec![0u64; w];
    let mut offset = 0;
    let mut offsets = Vec::with_capacity(gate_lanes.len());
    for g in &gate_lanes {
        offsets.push(offset);
        if let Some(first) = g.segments.first() {
            for (m, (_, coef)) in first.monomials.iter().enumerate() {
                left[offset + m] = field.mul(g.scale, *coef);
            }
        }
        offset += g.width;
    }
    let (blocks, layers) = single_var_layers(field, n, w, &var_order, |p, v, m0, m1| {
        for (g, &o) in gate_lanes.iter().zip(&offsets) {
            let si = g.segments.iter().rposition(|s| s.start <= p).expect("first segment starts at 0");
            let seg = &g.segments[si];
            let lab = |e: &ExponentVector| e.get(v) == 1;
            if seg.start == p && si > 0 {
                let prev = g.segments[si - 1].monomials.len();
                for a in 0..prev {
                    for (b, (e, coef)) in seg.monomials.iter().enumerate() {
                        let target = if lab(e) { &mut *m1 } else { &mut *m0 };
                        target.set(o + a, o + b, *coef);
                    }
                }
            } else {
                for (b, (e, _)) in seg.monomials.iter().enumerate() {
                    let target = if lab(e) { &mut *m1 } else { &mut *m0 };
                    target.set(o + b, o + b, 1);
                }
            }
        }
    });
    Roabp::with_constant_boundaries(field, n, blocks, layers, &left, &vec![1; w])
}

#[cfg(test)]
mod tests {
    use super::super::{Gate, LinearForm};
    use super::*;
    use crate::error::Limits;

    fn f() -> Field {
        Field::new(10007).unwrap()
    }

    #[test]
    fn sparse_lanes() {
        let field = f();
        let x = |i| ScalarPoly::var(field, 3, i);
        let p = x(0).mul(&x(1)).unwrap();
        let r = sparse_to_roabp(&p, &[0, 1, 2]).unwrap();
        assert_eq!(r.width(), 1);
        let q = p.add(&x(2).scale(5)).unwrap().add(&ScalarPoly::constant(field, 3, 7)).unwrap();
        let r = sparse_to_roabp(&q, &[2, 1, 0]).unwrap();
        assert_eq!(r.width(), 3);
        assert_eq!(r.expand(&Limits::default()).unwrap().scalar_part, q);
        let z = sparse_to_roabp(&ScalarPoly::zero(field, 3), &[0, 1, 2]).unwrap();
        assert_eq!(z.width(), 0);
        assert_eq!(z.evaluate(&[1, 2, 3]).unwrap(), 0);
        assert!(sparse_to_roabp(&x(0).mul(&x(0)).unwrap(), &[0]).is_err());
    }

    #[test]
    fn singletons_and_pairs() {
        let field = f();
        let n = 4;
        let lf = |c: u64, v: &[(usize, u64)]| LinearForm::new(&field, c, v.iter().copied());
        let g1 = Gate::new(2, (0..n).map(|v| lf(v as u64 + 1, &[(v, 1)])).collect());
        let g2 = Gate::new(3, vec![lf(1, &[(0, 1), (1, 2)]), lf(0, &[(2, 1), (3, 4)])]);
        let c = Depth3Circuit::new(field, n, vec![g1, g2]).unwrap();
        let cert = best_gate_order(&c).unwrap();
        assert_eq!(cert.delta, 1);
        let r = circuit_to_roabp(&c, &cert).unwrap();
        assert!(r.width() <= 2 * 4);
        let lim = Limits::default();
        assert_eq!(r.expand(&lim).unwrap().scalar_part, c.expand(&lim).unwrap());
    }

    #[test]
    fn distance_three_still_exact() {
        let field = f();
        let lf = |v: &[(usize, u64)]| LinearForm::new(&field, 1, v.iter().copied());
        // rows then residues on 4 variables: one neighborhood of two colors
        let g1 = Gate::new(1, vec![lf(&[(0, 1), (1, 1)]), lf(&[(2, 1), (3, 1)])]);
        let g2 = Gate::new(5, vec![lf(&[(0, 2), (2, 1)]), lf(&[(1, 3), (3, 1)])]);
        let c = Depth3Circuit::new(field, 4, vec![g1, g2]).unwrap();
        let cert = DistanceCertificate { order: vec![0, 1], delta: 2 };
        let r = circuit_to_roabp(&c, &cert).unwrap();
        let lim = Limits::default();
        assert_eq!(r.expand(&lim).unwrap().scalar_part, c.expand(&lim).unwrap());
        assert!((r.width() as u128) <= width_bound(2, 4, 2));
        let bad = DistanceCertificate { order: vec![0, 1], delta: 1 };
        assert!(matches!(circuit_to_roabp(&c, &bad), Err(PitError::Precondition(_))));
    }

    #[test]
    fn permutations_enumerated() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
