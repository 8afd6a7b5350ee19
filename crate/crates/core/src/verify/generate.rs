//! Seeded generators for every instance class.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{oracle_is_zero, ClassTag, Instance, InstanceSpec, Target};
use crate::algebra::{det, det_poly, ExponentVector, Field, Mat, MatPoly, ScalarPoly};
use crate::depth3::{compute_distance, Depth3Circuit, Gate, LinearForm, Partition};
use crate::error::{Limits, PitError, Result};
use crate::roabp::Roabp;

/// Attempts per rejection loop before giving up.
const BUDGET: usize = 400;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn elem(rng: &mut ChaCha8Rng, f: &Field) -> u64 {
    rng.gen_range(0..f.modulus())
}

fn nonzero(rng: &mut ChaCha8Rng, f: &Field) -> u64 {
    rng.gen_range(1..f.modulus())
}

fn random_mat(rng: &mut ChaCha8Rng, f: &Field, w: usize) -> Mat {
    loop {
        let m = Mat::from_flat(w, (0..w * w).map(|_| elem(rng, f)).collect());
        if !m.is_zero() {
            return m;
        }
    }
}

fn invertible_mat(rng: &mut ChaCha8Rng, f: &Field, w: usize) -> Mat {
    loop {
        let m = random_mat(rng, f, w);
        if det(f, &m) != 0 {
            return m;
        }
    }
}

/// Random monomial on `block`: support in `lo..=mu`, exponents in `1..=delta`.
fn random_monomial(rng: &mut ChaCha8Rng, n: usize, block: &[usize], delta: u32, lo: usize, mu: usize) -> ExponentVector {
    let hi = mu.min(block.len()).max(lo);
    let k = rng.gen_range(lo..=hi);
    let mut e = ExponentVector::zeros(n);
    for &v in block.choose_multiple(rng, k) {
        e.set(v, rng.gen_range(1..=delta.max(1)));
    }
    e
}

/// Up to `count` distinct monomials (fewer when the block is too small to supply them).
fn distinct_monomials(rng: &mut ChaCha8Rng, n: usize, block: &[usize], delta: u32, lo: usize, mu: usize, count: usize) -> Vec<ExponentVector> {
    let mut seen = BTreeSet::new();
    for _ in 0..count * 8 {
        if seen.len() == count {
            break;
        }
        seen.insert(random_monomial(rng, n, block, delta, lo, mu));
    }
    seen.into_iter().collect()
}

fn random_layer(rng: &mut ChaCha8Rng, f: &Field, n: usize, w: usize, block: &[usize], spec: &InstanceSpec, mu: usize) -> Result<MatPoly> {
    let s = spec.s.max(1);
    let count = rng.gen_range(1..=s);
    let mut terms = Vec::with_capacity(count);
    if spec.invertible_constant {
        terms.push((ExponentVector::zeros(n), invertible_mat(rng, f, w)));
        for e in distinct_monomials(rng, n, block, spec.delta, 1, mu, count - 1) {
            terms.push((e, random_mat(rng, f, w)));
        }
    } else {
        for e in distinct_monomials(rng, n, block, spec.delta, 0, mu, count) {
            terms.push((e, random_mat(rng, f, w)));
        }
    }
    MatPoly::from_terms(*f, n, w, terms)
}

fn random_poly(rng: &mut ChaCha8Rng, f: &Field, n: usize, block: &[usize], spec: &InstanceSpec, mu: usize) -> Result<ScalarPoly> {
    let count = rng.gen_range(1..=spec.s.max(1));
    let terms: Vec<(ExponentVector, u64)> =
        distinct_monomials(rng, n, block, spec.delta, 0, mu, count).into_iter().map(|e| (e, nonzero(rng, f))).collect();
    ScalarPoly::from_terms(*f, n, terms)
}

/// Rank-1 layer `u(x) c^T` or `c u(x)^T` with `u` polynomial and `c` constant.
fn singular_layer(rng: &mut ChaCha8Rng, f: &Field, n: usize, block: &[usize], spec: &InstanceSpec, mu: usize) -> Result<MatPoly> {
    let u = [random_poly(rng, f, n, block, spec, mu)?, random_poly(rng, f, n, block, spec, mu)?];
    let c = [nonzero(rng, f), elem(rng, f)];
    let column = rng.gen_bool(0.5);
    let grid: Vec<Vec<ScalarPoly>> = (0..2)
        .map(|a| (0..2).map(|b| if column { u[a].scale(c[b]) } else { u[b].scale(c[a]) }).collect())
        .collect();
    MatPoly::from_entries(&grid)
}

/// Shuffles `vars` and cuts them into `parts` nonempty chunks.
fn split_blocks(rng: &mut ChaCha8Rng, mut vars: Vec<usize>, parts: usize) -> Vec<Vec<usize>> {
    vars.shuffle(rng);
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, vars.len() - 1, parts - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.push(vars.len());
    let mut out = Vec::with_capacity(parts);
    let mut lo = 0;
    for hi in cuts {
        out.push(vars[lo..hi].to_vec());
        lo = hi;
    }
    out
}

fn roabp_once(rng: &mut ChaCha8Rng, spec: &InstanceSpec, limits: &Limits) -> Result<Roabp> {
    let f = spec.field()?;
    let (n, d) = (spec.n, spec.d.max(1));
    let w = if spec.class == ClassTag::Width2Roabp { 2 } else { spec.w.max(1) };
    let extra = if spec.boundaries { 2 } else { 0 };
    if n < d + extra {
        return Err(PitError::Precondition(format!("{n} variables cannot fill {} blocks", d + extra)));
    }
    let mut blocks = split_blocks(rng, (0..n).collect(), d + extra);
    let (left_block, right_block) = if spec.boundaries {
        let r = blocks.pop().unwrap();
        (blocks.remove(0), r)
    } else {
        (vec![], vec![])
    };
    let mu_of = |b: &[usize]| if spec.mu == 0 { b.len() } else { spec.mu.min(b.len()) };
    let singular = if spec.class == ClassTag::Width2Roabp && spec.force_singular { Some(rng.gen_range(0..d)) } else { None };
    let mut layers = Vec::with_capacity(d);
    for (i, b) in blocks.iter().enumerate() {
        let mu = mu_of(b);
        let layer = if singular == Some(i) {
            singular_layer(rng, &f, n, b, spec, mu)?
        } else if spec.class == ClassTag::InvertibleRoabp {
            let mut tries = 0;
            loop {
                let l = random_layer(rng, &f, n, w, b, spec, mu)?;
                let grid: Vec<Vec<ScalarPoly>> = (0..w).map(|a| (0..w).map(|c| l.entry(a, c)).collect()).collect();
                if !det_poly(&grid, limits)?.is_zero() {
                    break l;
                }
                tries += 1;
                if tries == BUDGET {
                    return Err(PitError::Capability("no invertible layer within the sampling budget".into()));
                }
            }
        } else {
            random_layer(rng, &f, n, w, b, spec, mu)?
        };
        layers.push(layer);
    }
    if spec.boundaries {
        let lmu = mu_of(&left_block);
        let rmu = mu_of(&right_block);
        let left = (0..w).map(|_| random_poly(rng, &f, n, &left_block, spec, lmu)).collect::<Result<Vec<_>>>()?;
        let right = (0..w).map(|_| random_poly(rng, &f, n, &right_block, spec, rmu)).collect::<Result<Vec<_>>>()?;
        Roabp::new(f, n, w, blocks, layers, left_block, left, right_block, right)
    } else {
        let s: Vec<u64> = (0..w).map(|_| elem(rng, &f)).collect();
        let t: Vec<u64> = (0..w).map(|_| elem(rng, &f)).collect();
        Roabp::with_constant_boundaries(f, n, blocks, layers, &s, &t)
    }
}

/// Random partition of `0..n` into at most `max_colors` colors.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, max_colors: usize) -> Partition {
    let m = rng.gen_range(1..=max_colors.clamp(1, n.max(1)));
    let mut colors = vec![Vec::new(); m];
    for v in 0..n {
        colors[rng.gen_range(0..m)].push(v);
    }
    colors.retain(|c| !c.is_empty());
    Partition::new(colors).expect("colors are disjoint")
}

/// Components of the union of the colors of `parts` (the finest common coarsening).
fn join(parts: &[Partition], n: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for p in parts {
        for c in p.colors() {
            for &v in &c[1..] {
                let (a, b) = (root(&mut parent, c[0]), root(&mut parent, v));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for v in 0..n {
        let r = root(&mut parent, v);
        comps.entry(r).or_default().push(v);
    }
    comps.into_values().collect()
}

/// Partitions in an order of distance at most `delta`: each one splits every component of
/// the join of its predecessors into at most `delta` colors.
fn distance_partitions(rng: &mut ChaCha8Rng, n: usize, count: usize, delta: usize) -> Result<Vec<Partition>> {
    let mut seq = vec![random_partition(rng, n, n)];
    while seq.len() < count {
        let mut colors = Vec::new();
        for comp in join(&seq, n) {
            let r = rng.gen_range(1..=delta.max(1).min(comp.len()));
            let mut parts = vec![Vec::new(); r];
            for v in comp {
                parts[rng.gen_range(0..r)].push(v);
            }
            colors.extend(parts.into_iter().filter(|p| !p.is_empty()));
        }
        seq.push(Partition::new(colors)?);
    }
    let got = compute_distance(&seq)?;
    if got > delta.max(1) {
        return Err(PitError::Internal(format!("generated partitions have distance {got} > {delta}")));
    }
    Ok(seq)
}

fn forms_for(rng: &mut ChaCha8Rng, f: &Field, p: &Partition) -> Vec<LinearForm> {
    p.colors()
        .iter()
        .map(|c| {
            let k = elem(rng, f);
            let coeffs: Vec<(usize, u64)> = c.iter().map(|&v| (v, nonzero(rng, f))).collect();
            LinearForm::new(f, k, coeffs)
        })
        .collect()
}

/// Sizes of the cancelling groups: pairs, with one triple when `k` is odd.
fn group_sizes(k: usize) -> Vec<usize> {
    if k < 2 {
        return vec![k];
    }
    let mut g = vec![2; k / 2];
    if k % 2 == 1 {
        g[0] = 3;
    }
    g
}

/// Gates on the given partitions (one per entry). With `groups`, consecutive gates share a
/// product and have scales summing to zero, each member's forms rescaled.
fn gates_on(rng: &mut ChaCha8Rng, f: &Field, parts: &[Partition], groups: Option<&[usize]>) -> Result<Vec<Gate>> {
    let Some(groups) = groups else {
        return Ok(parts.iter().map(|p| Gate::new(nonzero(rng, f), forms_for(rng, f, p))).collect());
    };
    if parts.len() < 2 {
        return Err(PitError::Precondition("a cancelling circuit needs at least two gates".into()));
    }
    let mut gates = Vec::with_capacity(parts.len());
    let mut at = 0;
    for &g in groups {
        let base = forms_for(rng, f, &parts[at]);
        let scales: Vec<u64> = loop {
            let mut v: Vec<u64> = (0..g - 1).map(|_| nonzero(rng, f)).collect();
            let total = v.iter().fold(0, |a, &x| f.add(a, x));
            if total != 0 {
                v.push(f.neg(total));
                break v;
            }
        };
        for a in scales {
            let mut scale = a;
            let forms = base
                .iter()
                .map(|l| {
                    let lam = nonzero(rng, f);
                    scale = f.div(scale, lam);
                    LinearForm::new(f, f.mul(lam, l.constant), l.coeffs.iter().map(|(&v, &c)| (v, f.mul(lam, c))))
                })
                .collect();
            gates.push(Gate::new(scale, forms));
        }
        at += g;
    }
    Ok(gates)
}

/// One partition per gate, repeating `distinct[i]` over the `i`-th group.
fn expand_groups(distinct: &[Partition], groups: &[usize]) -> Vec<Partition> {
    groups.iter().enumerate().flat_map(|(i, &g)| std::iter::repeat_n(distinct[i % distinct.len()].clone(), g)).collect()
}

fn depth3_once(rng: &mut ChaCha8Rng, spec: &InstanceSpec) -> Result<Depth3Circuit> {
    let f = spec.field()?;
    let (n, k) = (spec.n, spec.k.max(1));
    let groups = (spec.target == Target::Zero).then(|| group_sizes(k));
    let parts: Vec<Partition> = match spec.class {
        ClassTag::Depth3Distance => {
            // cancelling groups share a partition, so one partition per group suffices
            let count = groups.as_ref().map_or(k, |g| g.len());
            let seq = distance_partitions(rng, n, count, spec.delta as usize)?;
            match &groups {
                Some(g) => expand_groups(&seq, g),
                None => seq,
            }
        }
        _ => {
            let c = spec.c.max(1);
            let mut distinct: Vec<Partition> = Vec::with_capacity(c);
            let mut tries = 0;
            while distinct.len() < c {
                let p = random_partition(rng, n, n);
                if !distinct.contains(&p) {
                    distinct.push(p);
                }
                tries += 1;
                if tries == BUDGET {
                    return Err(PitError::Capability(format!("could not draw {c} distinct partitions of {n} variables")));
                }
            }
            match &groups {
                Some(g) => expand_groups(&distinct, g),
                None => (0..k).map(|g| distinct[g % c].clone()).collect(),
            }
        }
    };
    let mut gates = gates_on(rng, &f, &parts, groups.as_deref())?;
    gates.shuffle(rng);
    Depth3Circuit::new(f, n, gates)
}

/// Draws the instance `spec` describes. Nonzero targets are rejection-sampled against the
/// expansion oracle; invertible layers are rejection-sampled against the symbolic determinant.
pub fn generate_instance(spec: &InstanceSpec, limits: &Limits) -> Result<Instance> {
    let mut rng = rng_for(spec.seed, spec.stream);
    let depth3 = matches!(spec.class, ClassTag::Depth3Distance | ClassTag::SumSml);
    if spec.target == Target::Zero && !depth3 {
        return Err(PitError::Precondition(format!("zero targets are only built for depth-3 classes, not {}", spec.class.as_str())));
    }
    for _ in 0..BUDGET {
        let inst = if depth3 {
            Instance::Depth3(depth3_once(&mut rng, spec)?)
        } else {
            Instance::Roabp(roabp_once(&mut rng, spec, limits)?)
        };
        if spec.target != Target::Nonzero || !oracle_is_zero(&inst, limits)? {
            return Ok(inst);
        }
    }
    Err(PitError::Capability(format!("no nonzero {} instance within the sampling budget", spec.class.as_str())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        for class in ClassTag::ALL {
            let spec = InstanceSpec { target: Target::Nonzero, ..InstanceSpec::new(class, 17) };
            let a = generate_instance(&spec, &Limits::default()).unwrap();
            let b = generate_instance(&spec, &Limits::default()).unwrap();
            assert_eq!(a, b, "{class:?}");
            let c = generate_instance(&spec.with_stream(1), &Limits::default()).unwrap();
            assert_ne!(a, c, "{class:?}");
        }
    }

    #[test]
    fn invertible_layers_have_nonzero_det() {
        let limits = Limits::default();
        for seed in 0..10 {
            let spec = InstanceSpec { n: 5, d: 4, s: 3, delta: 2, ..InstanceSpec::new(ClassTag::InvertibleRoabp, seed) };
            let r = generate_instance(&spec, &limits).unwrap().as_roabp().unwrap().clone();
            for l in r.layers() {
                let grid: Vec<Vec<ScalarPoly>> = (0..2).map(|a| (0..2).map(|b| l.entry(a, b)).collect()).collect();
                assert!(!det_poly(&grid, &limits).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn width2_has_a_singular_layer() {
        let limits = Limits::default();
        for seed in 0..10 {
            let r = generate_instance(&InstanceSpec::new(ClassTag::Width2Roabp, seed), &limits).unwrap().as_roabp().unwrap().clone();
            let singular = r.layers().iter().any(|l| {
                let grid: Vec<Vec<ScalarPoly>> = (0..2).map(|a| (0..2).map(|b| l.entry(a, b)).collect()).collect();
                det_poly(&grid, &limits).unwrap().is_zero()
            });
            assert!(singular);
        }
    }

    #[test]
    fn sum_sml_partition_count() {
        let limits = Limits::default();
        for seed in 0..10 {
            for target in [Target::Any, Target::Zero] {
                let spec = InstanceSpec { n: 6, k: 3, c: 2, target, ..InstanceSpec::new(ClassTag::SumSml, seed) };
                let c = generate_instance(&spec, &limits).unwrap().as_depth3().unwrap().clone();
                assert!(c.is_multilinear());
                let mut parts: Vec<Partition> = (0..c.k()).map(|g| c.gate_partition(g).unwrap()).collect();
                parts.dedup();
                parts.sort_by(|a, b| a.colors().cmp(b.colors()));
                parts.dedup();
                assert!(parts.len() <= 2);
                if target == Target::Zero {
                    assert!(c.expand(&limits).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn distance_instances_respect_delta() {
        let limits = Limits::default();
        for seed in 0..20 {
            for target in [Target::Nonzero, Target::Zero] {
                let spec = InstanceSpec { n: 7, k: 3, delta: 2, target, ..InstanceSpec::new(ClassTag::Depth3Distance, seed) };
                let c = generate_instance(&spec, &limits).unwrap().as_depth3().unwrap().clone();
                assert_eq!(c.k(), 3);
                assert!(crate::depth3::best_gate_order(&c).unwrap().delta <= 2);
                assert_eq!(c.expand(&limits).unwrap().is_zero(), target == Target::Zero);
            }
        }
    }
}
