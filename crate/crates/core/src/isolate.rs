//! Basis isolation: greedy minimum-weight bases over the `w x w` matrix algebra, the
//! multi-round construction of an isolating weight assignment, an independent brute-force
//! checker, and the resulting hitting sets for ROABPs.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Echelon, ExponentVector, Field, Mat, MatPoly};
use crate::error::{Limits, PitError, Result};
use crate::kron::{self, candidate_primes, kron_bounds, prime_weights, PairSet, WeightFn};
use crate::points::{mixed_radix, PointSet, PointSource, Provenance};
use crate::roabp::Roabp;

/// Round weights `w_0..w_R` combined as `sum_r w_r * B^(R-r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredWeight {
    rounds: Vec<WeightFn>,
    base: u64,
    combined: WeightFn,
}

impl LayeredWeight {
    /// `B = 1 + n * delta * (largest weight over all rounds)`, which exceeds every monomial
    /// weight any single round can produce for individual degree `delta`.
    pub fn new(rounds: Vec<WeightFn>, delta: u32) -> Result<Self> {
        let Some(first) = rounds.first() else {
            return Err(PitError::Precondition("a layered weight needs at least one round".into()));
        };
        let n = first.n();
        if rounds.iter().any(|r| r.n() != n) {
            return Err(PitError::Structural("round weights differ in variable count".into()));
        }
        let maxw = rounds.iter().map(|r| r.max_weight()).max().unwrap_or(1);
        let overflow = || PitError::Capability("combined weight overflows u64".into());
        let base = (n as u64)
            .checked_mul(delta as u64)
            .and_then(|x| x.checked_mul(maxw))
            .and_then(|x| x.checked_add(1))
            .ok_or_else(overflow)?;
        let r = rounds.len();
        let mut combined = vec![0u64; n];
        for (i, c) in combined.iter_mut().enumerate() {
            let mut acc: u64 = 0;
            for (k, round) in rounds.iter().enumerate() {
                let scale = base.checked_pow((r - 1 - k) as u32).ok_or_else(overflow)?;
                acc = round.get(i).checked_mul(scale).and_then(|v| acc.checked_add(v)).ok_or_else(overflow)?;
            }
            *c = acc;
        }
        Ok(LayeredWeight { rounds, base, combined: WeightFn::new(combined)? })
    }

    pub fn rounds(&self) -> &[WeightFn] {
        &self.rounds
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn combined(&self) -> &WeightFn {
        &self.combined
    }

    /// `(w_0(m), ..., w_R(m))`; compares the same way the combined weight does.
    pub fn tuple(&self, e: &ExponentVector) -> Vec<u128> {
        self.rounds.iter().map(|r| r.weight(e)).collect()
    }
}

/// One block of one round: the monomials considered and the surviving basis.
#[derive(Clone, Debug)]
pub struct BlockRecord {
    /// Indices of the original factors whose product this block represents.
    pub factors: Vec<usize>,
    pub monomials: Vec<ExponentVector>,
    pub basis: Vec<(ExponentVector, Mat)>,
}

#[derive(Clone, Debug)]
pub struct RoundRecord {
    pub round: usize,
    /// Prime behind this round's weight (2 when the round had nothing to separate).
    pub prime: u64,
    pub pairs: usize,
    pub blocks: Vec<BlockRecord>,
}

/// Everything the construction did, round by round.
#[derive(Clone, Debug)]
pub struct IsolationTrace {
    pub rounds: Vec<RoundRecord>,
    /// The isolated basis `S` of the full product, in ascending combined weight.
    pub basis: Vec<(ExponentVector, Mat)>,
    /// Whether the brute-force checker ran (only when the product was expandable).
    pub verified: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct IsolateOptions {
    pub c0: u64,
    pub limits: Limits,
    /// Run the expansion-based self-check when the product fits under the ceiling.
    pub self_check: bool,
}

impl Default for IsolateOptions {
    fn default() -> Self {
        IsolateOptions { c0: kron::DEFAULT_C0, limits: Limits::default(), self_check: true }
    }
}

/// Greedy basis by ascending weight: keeps an item iff its coefficient is independent of
/// those already kept. Returns indices into `items`, in ascending weight.
///
/// Equal weights are a precondition error since they signal a failed separator upstream.
pub fn greedy_basis(field: &Field, items: &[(u128, ExponentVector, Mat)]) -> Result<Vec<usize>> {
    let keyed: Vec<(Vec<u128>, &Mat)> = items.iter().map(|(w, _, m)| (vec![*w], m)).collect();
    greedy_by_key(field, &keyed)
}

fn greedy_by_key(field: &Field, items: &[(Vec<u128>, &Mat)]) -> Result<Vec<usize>> {
    let Some((_, first)) = items.first() else {
        return Ok(Vec::new());
    };
    let w = first.width();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].0.cmp(&items[b].0));
    for pair in order.windows(2) {
        if items[pair[0]].0 == items[pair[1]].0 {
            return Err(PitError::Precondition(format!(
                "items {} and {} share the weight {:?}",
                pair[0], pair[1], items[pair[0]].0
            )));
        }
    }
    let mut ech = Echelon::new(*field, w * w);
    let mut kept = Vec::new();
    for i in order {
        if ech.rank() == w * w {
            break;
        }
        if ech.insert(items[i].1.flat()) {
            kept.push(i);
        }
    }
    Ok(kept)
}

fn check_factors(factors: &[MatPoly]) -> Result<(Field, usize, usize)> {
    let Some(first) = factors.first() else {
        return Err(PitError::Precondition("need at least one factor".into()));
    };
    let (f, n, w) = (first.field(), first.n(), first.width());
    let mut owner = vec![usize::MAX; n];
    for (i, fac) in factors.iter().enumerate() {
        if fac.field() != f || fac.n() != n || fac.width() != w {
            return Err(PitError::Structural(format!("factor {i} differs in field, ambient size or width")));
        }
        for v in fac.vars() {
            if owner[v] != usize::MAX {
                return Err(PitError::Precondition(format!("factors {} and {i} share x{}", owner[v], v + 1)));
            }
            owner[v] = i;
        }
    }
    Ok((f, n, w))
}

fn round_weight(n: usize, delta: u32, pairs: Vec<(ExponentVector, ExponentVector)>, c0: u64) -> Result<(WeightFn, u64, usize)> {
    let count = pairs.len();
    if count == 0 {
        return Ok((prime_weights(n, delta, 2), 2, 0));
    }
    let sep = kron::separating_weights(&PairSet::new(n, delta, pairs)?, c0)?;
    Ok((sep.weights, sep.prime, count))
}

fn block_pairs(blocks: &[Vec<(ExponentVector, Mat)>]) -> Vec<(ExponentVector, ExponentVector)> {
    let mut pairs = Vec::new();
    for b in blocks {
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                pairs.push((b[i].0.clone(), b[j].0.clone()));
            }
        }
    }
    pairs
}

/// Builds a basis-isolating weight assignment for `prod factors` by the pairing iteration:
/// round 0 separates the monomials inside each factor and keeps a greedy basis of each; every
/// later round multiplies adjacent survivor blocks (an odd block count is padded with the
/// identity), separates inside each product block and keeps a greedy basis under the
/// lexicographic round-weight order. After `ceil(log2 d)` pairings one block remains.
pub fn construct_isolating_weights(factors: &[MatPoly], opts: &IsolateOptions) -> Result<(LayeredWeight, IsolationTrace)> {
    let (field, n, w) = check_factors(factors)?;
    let delta = factors.iter().map(|f| f.max_degree()).max().unwrap_or(0);
    let mut rounds: Vec<WeightFn> = Vec::new();
    let mut records = Vec::new();

    // current blocks as (factor indices, items)
    let mut blocks: Vec<(Vec<usize>, Vec<(ExponentVector, Mat)>)> = factors
        .iter()
        .enumerate()
        .map(|(i, f)| (vec![i], f.terms().map(|(e, m)| (e.clone(), m.clone())).collect()))
        .collect();
    let mut round = 0usize;
    loop {
        if round > 0 {
            let mut next = Vec::with_capacity(blocks.len().div_ceil(2));
            let mut it = blocks.into_iter();
            while let Some((fa, a)) = it.next() {
                let (fb, b) = it.next().unwrap_or((vec![], vec![(ExponentVector::zeros(n), Mat::identity(w))]));
                let mut items = Vec::with_capacity(a.len() * b.len());
                for (ea, ma) in &a {
                    for (eb, mb) in &b {
                        items.push((ea.add(eb), ma.mul(mb, &field)));
                    }
                }
                let mut idx = fa;
                idx.extend(fb);
                next.push((idx, items));
            }
            blocks = next;
        }
        let item_lists: Vec<Vec<(ExponentVector, Mat)>> = blocks.iter().map(|(_, b)| b.clone()).collect();
        let (wr, prime, pair_count) = round_weight(n, delta, block_pairs(&item_lists), opts.c0)?;
        rounds.push(wr);
        let mut recs = Vec::with_capacity(blocks.len());
        let mut survivors = Vec::with_capacity(blocks.len());
        for (idx, items) in &blocks {
            let keyed: Vec<(Vec<u128>, &Mat)> =
                items.iter().map(|(e, m)| (rounds.iter().map(|r| r.weight(e)).collect(), m)).collect();
            let kept = greedy_by_key(&field, &keyed)?;
            let basis: Vec<(ExponentVector, Mat)> = kept.iter().map(|&i| items[i].clone()).collect();
            recs.push(BlockRecord {
                factors: idx.clone(),
                monomials: items.iter().map(|(e, _)| e.clone()).collect(),
                basis: basis.clone(),
            });
            survivors.push((idx.clone(), basis));
        }
        records.push(RoundRecord { round, prime, pairs: pair_count, blocks: recs });
        blocks = survivors;
        if blocks.len() == 1 {
            break;
        }
        round += 1;
    }
    let lw = LayeredWeight::new(rounds, delta)?;
    let basis = blocks.pop().map(|(_, b)| b).unwrap_or_default();
    let mut trace = IsolationTrace { rounds: records, basis, verified: false };

    if opts.self_check {
        let est: u128 = factors.iter().map(|f| f.sparsity().max(1) as u128).product();
        if est <= opts.limits.expand_ceiling as u128 {
            let mut d = MatPoly::identity(field, n, w);
            for f in factors {
                d = d.mul(f)?;
            }
            if !trace_isolates(&lw, &trace.basis, &d) || !is_basis_isolating(lw.combined(), &d) {
                return Err(PitError::Internal("constructed weight assignment failed the isolation check".into()));
            }
            trace.verified = true;
        }
    }
    Ok((lw, trace))
}

/// Checks the two clauses for a given candidate `S` against the expanded `D`.
fn trace_isolates(lw: &LayeredWeight, s: &[(ExponentVector, Mat)], d: &MatPoly) -> bool {
    let f = d.field();
    let w = d.width();
    let cw = lw.combined();
    let mut weights: Vec<u128> = s.iter().map(|(e, _)| cw.weight(e)).collect();
    weights.sort_unstable();
    if weights.windows(2).any(|p| p[0] == p[1]) {
        return false;
    }
    for (e, m) in s {
        if d.coeff(e) != *m {
            return false;
        }
    }
    for (e, m) in d.terms() {
        if s.iter().any(|(se, _)| se == e) {
            continue;
        }
        let we = cw.weight(e);
        let mut ech = Echelon::new(f, w * w);
        for (se, sm) in s {
            if cw.weight(se) < we {
                ech.insert(sm.flat());
            }
        }
        if !ech.contains(m.flat()) {
            return false;
        }
    }
    true
}

/// Recomputes the isolated basis from scratch: groups coefficients by weight in ascending
/// order; each group may contain at most one coefficient outside the span of all strictly
/// lighter coefficients. Returns that basis, or `None` when the assignment is not isolating.
pub fn isolating_basis(wfn: &WeightFn, d: &MatPoly) -> Option<Vec<ExponentVector>> {
    let w = d.width();
    let mut groups: BTreeMap<u128, Vec<(&ExponentVector, &Mat)>> = BTreeMap::new();
    for (e, m) in d.terms() {
        groups.entry(wfn.weight(e)).or_default().push((e, m));
    }
    let mut ech = Echelon::new(d.field(), w * w);
    let mut basis = Vec::new();
    for (_, group) in groups {
        let fresh: Vec<&ExponentVector> = group.iter().filter(|(_, m)| !ech.contains(m.flat())).map(|(e, _)| *e).collect();
        if fresh.len() > 1 {
            return None;
        }
        basis.extend(fresh.into_iter().cloned());
        for (_, m) in &group {
            ech.insert(m.flat());
        }
    }
    Some(basis)
}

/// True iff `wfn` is basis isolating for the (expanded) polynomial `d`.
pub fn is_basis_isolating(wfn: &WeightFn, d: &MatPoly) -> bool {
    isolating_basis(wfn, d).is_some()
}

/// The monomial the isolation argument singles out: the lightest `m` in `S` with
/// `s^T D_m t != 0`. `None` when every such contraction vanishes (so `C` is zero).
pub fn isolated_witness_monomial(
    wfn: &WeightFn,
    d: &MatPoly,
    basis: &[ExponentVector],
    s: &[u64],
    t: &[u64],
) -> Option<ExponentVector> {
    let f = d.field();
    basis
        .iter()
        .filter(|e| d.coeff(e).bilinear(s, t, &f) != 0)
        .min_by_key(|e| wfn.weight(e))
        .cloned()
}

/// Zero test from the trace alone: `C` vanishes iff `s^T D_m t = 0` for every `m` in `S`.
pub fn trace_says_zero(trace: &IsolationTrace, s: &[u64], t: &[u64], field: &Field) -> bool {
    trace.basis.iter().all(|(_, m)| m.bilinear(s, t, field) == 0)
}

/// Whitebox zero test for a program: builds the isolating weights of its factor chain and
/// checks `s^T D_m t` on the isolated basis. Degenerate programs are evaluated directly.
pub fn whitebox_is_zero(r: &Roabp, opts: &IsolateOptions) -> Result<bool> {
    let chain = r.factor_chain();
    if r.width() == 0 {
        return Ok(true);
    }
    if chain.factors.is_empty() {
        return Ok(r.evaluate(&vec![0; r.n()])? == 0);
    }
    let (_, trace) = construct_isolating_weights(&chain.factors, opts)?;
    Ok(trace_says_zero(&trace, &chain.s, &chain.t, &r.field()))
}

/// Parameters a blackbox generator may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlackboxParams {
    pub n: usize,
    /// Number of factors, counting non-constant boundaries.
    pub d: usize,
    pub s: usize,
    pub w: usize,
    pub delta: u32,
}

impl BlackboxParams {
    /// Parameters read off a program (its factor chain).
    pub fn of(r: &Roabp) -> Self {
        let chain = r.factor_chain();
        BlackboxParams {
            n: r.n(),
            d: chain.factors.len().max(1),
            s: chain.factors.iter().map(|f| f.sparsity()).max().unwrap_or(1).max(1),
            w: r.width(),
            delta: r.delta(),
        }
    }

    /// Number of rounds, `ceil(log2 d) + 1`.
    pub fn rounds(&self) -> usize {
        kron::ceil_log2(self.d as u64) as usize + 1
    }

    /// Prime cutoff for a round: `d s^2` pairs for round 0, `d w^8` afterwards.
    pub fn cutoff(&self, round: usize, c0: u64) -> u64 {
        let pairs = if round == 0 {
            (self.d as u64).saturating_mul((self.s as u64).saturating_pow(2))
        } else {
            (self.d as u64).saturating_mul((self.w as u64).saturating_pow(8))
        };
        kron_bounds(self.n, self.delta, pairs.max(1), c0).1
    }
}

/// The blackbox family: every combination of per-round candidate maps.
#[derive(Clone, Debug)]
pub struct CandidateWeights {
    params: BlackboxParams,
    lists: Vec<Vec<u64>>,
}

impl CandidateWeights {
    pub fn len(&self) -> u128 {
        self.lists.iter().map(|l| l.len() as u128).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Primes considered in each round.
    pub fn primes(&self) -> &[Vec<u64>] {
        &self.lists
    }

    /// Member `idx` in lexicographic order of the per-round prime choices.
    pub fn get(&self, idx: u128) -> Result<LayeredWeight> {
        let radices: Vec<u128> = self.lists.iter().map(|l| l.len() as u128).collect();
        let digits = mixed_radix(idx, &radices);
        let rounds = digits
            .iter()
            .zip(&self.lists)
            .map(|(&d, l)| prime_weights(self.params.n, self.params.delta, l[d as usize]))
            .collect();
        LayeredWeight::new(rounds, self.params.delta)
    }

    pub fn iter(&self) -> impl Iterator<Item = Result<LayeredWeight>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Lazy cartesian product of per-round candidate lists; has `ceil(log2 d) + 1` factors.
pub fn enumerate_candidate_weights(params: BlackboxParams, c0: u64) -> CandidateWeights {
    let lists = (0..params.rounds()).map(|r| candidate_primes(params.cutoff(r, c0)).collect()).collect();
    CandidateWeights { params, lists }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HitMode {
    Whitebox,
    Blackbox,
}

/// Round-layered weight grid.
///
/// For each round `r` a list of candidate weight maps, each paired with `1 + n delta maxw`
/// values of its own formal variable `t_r`; a point is `x_i = prod_r t_r^{w_r(x_i)}`.
struct WeightGrid {
    field: Field,
    n: usize,
    /// per round: (weights, number of t values)
    rounds: Vec<Vec<(Vec<u64>, u128)>>,
    /// per round: prefix sums of the t counts
    prefix: Vec<Vec<u128>>,
}

impl WeightGrid {
    fn new(field: Field, n: usize, rounds: Vec<Vec<(Vec<u64>, u128)>>) -> Self {
        let prefix = rounds
            .iter()
            .map(|r| {
                let mut acc = 0u128;
                let mut v = vec![0u128];
                for (_, c) in r {
                    acc += c;
                    v.push(acc);
                }
                v
            })
            .collect();
        WeightGrid { field, n, rounds, prefix }
    }

    fn radices(&self) -> Vec<u128> {
        self.prefix.iter().map(|p| *p.last().unwrap()).collect()
    }
}

impl PointSource for WeightGrid {
    fn ambient(&self) -> usize {
        self.n
    }
    fn len(&self) -> u128 {
        self.radices().iter().product()
    }
    fn point(&self, idx: u128) -> Vec<u64> {
        let digits = mixed_radix(idx, &self.radices());
        let f = &self.field;
        let mut x = vec![1u64; self.n];
        for (r, &d) in digits.iter().enumerate() {
            let pre = &self.prefix[r];
            let c = pre.partition_point(|&v| v <= d) - 1;
            let t = (d - pre[c] + 1) as u64;
            let weights = &self.rounds[r][c].0;
            for (xi, &wi) in x.iter_mut().zip(weights) {
                *xi = f.mul(*xi, f.pow(t, wi));
            }
        }
        x
    }
}

fn t_count(n: usize, delta: u32, maxw: u64) -> u128 {
    1 + n as u128 * delta as u128 * maxw as u128
}

/// Hitting set for a width-`w` ROABP.
///
/// Whitebox mode uses the single constructed assignment, blackbox mode every candidate of
/// [`enumerate_candidate_weights`] for the program's parameters. Either way, for each
/// assignment the points are `x_i = prod_r t_r^{w_r(x_i)}` with `t_r` ranging over
/// `1..=1 + n delta max_i w_r(x_i)`. Size: sum over assignments of `prod_r (1 + n delta maxw_r)`.
pub fn roabp_hitting_set(r: &Roabp, mode: HitMode, opts: &IsolateOptions) -> Result<PointSet> {
    let f = r.field();
    let n = r.n();
    match mode {
        HitMode::Whitebox => {
            let chain = r.factor_chain();
            let delta = r.delta();
            let (lw, trace) = if chain.factors.is_empty() || r.width() == 0 {
                (LayeredWeight::new(vec![prime_weights(n, delta, 2)], delta)?, None)
            } else {
                let (lw, tr) = construct_isolating_weights(&chain.factors, opts)?;
                (lw, Some(tr))
            };
            let rounds: Vec<Vec<(Vec<u64>, u128)>> = lw
                .rounds()
                .iter()
                .map(|wr| vec![(wr.weights().to_vec(), t_count(n, delta, wr.max_weight()))])
                .collect();
            for (k, rd) in rounds.iter().enumerate() {
                f.require_points(rd[0].1, true, &format!("round {k} of the weight grid"))?;
            }
            let grid = WeightGrid::new(f, n, rounds);
            let mut prov = Provenance::new("roabp-whitebox")
                .with("n", n)
                .with("w", r.width())
                .with("delta", delta)
                .with("rounds", lw.rounds().len())
                .with("base", lw.base())
                .with("assignments", 1)
                .with("per_round_t", grid.radices().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x"));
            if let Some(tr) = trace {
                prov = prov.with("primes", tr.rounds.iter().map(|r| r.prime.to_string()).collect::<Vec<_>>().join(","));
            }
            prov = prov.with("size", grid.len());
            Ok(PointSet::from_source(Arc::new(grid), prov))
        }
        HitMode::Blackbox => blackbox_hitting_set(f, BlackboxParams::of(r), opts.c0),
    }
}

/// Parameter-only hitting set; see [`roabp_hitting_set`].
pub fn blackbox_hitting_set(f: Field, params: BlackboxParams, c0: u64) -> Result<PointSet> {
    let cands = enumerate_candidate_weights(params, c0);
    let mut rounds = Vec::new();
    for (k, primes) in cands.primes().iter().enumerate() {
        let list: Vec<(Vec<u64>, u128)> = primes
            .iter()
            .map(|&p| {
                let wf = prime_weights(params.n, params.delta, p);
                let c = t_count(params.n, params.delta, wf.max_weight());
                (wf.weights().to_vec(), c)
            })
            .collect();
        let worst = list.iter().map(|(_, c)| *c).max().unwrap_or(1);
        f.require_points(worst, true, &format!("round {k} of the blackbox grid"))?;
        rounds.push(list);
    }
    let grid = WeightGrid::new(f, params.n, rounds);
    let prov = Provenance::new("roabp-blackbox")
        .with("n", params.n)
        .with("d", params.d)
        .with("s", params.s)
        .with("w", params.w)
        .with("delta", params.delta)
        .with("assignments", cands.len())
        .with("size", grid.len());
    Ok(PointSet::from_source(Arc::new(grid), prov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ScalarPoly;

    fn f7() -> Field {
        Field::new(7).unwrap()
    }

    fn scalar(c: u64) -> Mat {
        Mat::from_flat(1, vec![c])
    }

    #[test]
    fn greedy_scalar_example() {
        let f = f7();
        let items = vec![
            (1, ExponentVector::unit(3, 0, 1), scalar(3)),
            (2, ExponentVector::unit(3, 1, 1), scalar(5)),
            (3, ExponentVector::unit(3, 2, 1), scalar(0)),
        ];
        assert_eq!(greedy_basis(&f, &items).unwrap(), vec![0]);
        let zeros = vec![(1, ExponentVector::zeros(1), scalar(0)), (2, ExponentVector::unit(1, 0, 1), scalar(0))];
        assert!(greedy_basis(&f, &zeros).unwrap().is_empty());
        let dup = vec![(1, ExponentVector::zeros(1), scalar(1)), (1, ExponentVector::unit(1, 0, 1), scalar(2))];
        assert!(matches!(greedy_basis(&f, &dup), Err(PitError::Precondition(_))));
    }

    #[test]
    fn single_monomial_is_isolated() {
        let f = Field::new(101).unwrap();
        let d = MatPoly::monomial(f, ExponentVector::new(vec![1, 1]), Mat::identity(2));
        assert!(is_basis_isolating(&WeightFn::new(vec![3, 5]).unwrap(), &d));
    }

    #[test]
    fn tie_is_rejected() {
        let f = Field::new(101).unwrap();
        let d = MatPoly::from_terms(
            f,
            2,
            2,
            vec![(ExponentVector::unit(2, 0, 1), Mat::identity(2)), (ExponentVector::unit(2, 1, 1), Mat::identity(2))],
        )
        .unwrap();
        assert!(!is_basis_isolating(&WeightFn::new(vec![1, 1]).unwrap(), &d));
        assert!(is_basis_isolating(&WeightFn::new(vec![1, 2]).unwrap(), &d));
    }

    #[test]
    fn diagonal_pair_example() {
        let f = Field::new(101).unwrap();
        let n = 2;
        let diag = |v: usize| {
            let x = ScalarPoly::var(f, n, v);
            let one = ScalarPoly::constant(f, n, 1);
            let zero = ScalarPoly::zero(f, n);
            MatPoly::from_entries(&[vec![one, zero.clone()], vec![zero, x]]).unwrap()
        };
        let (lw, trace) = construct_isolating_weights(&[diag(0), diag(1)], &IsolateOptions::default()).unwrap();
        assert!(trace.verified);
        assert!(trace.basis.len() <= 4);
        assert_eq!(lw.rounds().len(), 2);
        let d = diag(0).mul(&diag(1)).unwrap();
        assert!(is_basis_isolating(lw.combined(), &d));
    }

    #[test]
    fn single_factor_single_round() {
        let f = Field::new(101).unwrap();
        let d = MatPoly::from_terms(
            f,
            1,
            2,
            vec![
                (ExponentVector::zeros(1), Mat::identity(2)),
                (ExponentVector::unit(1, 0, 1), Mat::from_rows(&[vec![0, 1], vec![0, 0]])),
                (ExponentVector::unit(1, 0, 2), Mat::from_rows(&[vec![0, 2], vec![0, 0]])),
            ],
        )
        .unwrap();
        let (lw, trace) = construct_isolating_weights(std::slice::from_ref(&d), &IsolateOptions::default()).unwrap();
        assert_eq!(lw.rounds().len(), 1);
        assert_eq!(lw.combined(), &lw.rounds()[0]);
        assert_eq!(trace.basis.len(), 2);
        assert_eq!(trace.basis[0].0, ExponentVector::zeros(1));
    }

    #[test]
    fn candidate_family_shapes() {
        let p = BlackboxParams { n: 2, d: 1, s: 2, w: 1, delta: 1 };
        let c = enumerate_candidate_weights(p, 4);
        assert_eq!(c.primes().len(), 1);
        let p2 = BlackboxParams { n: 2, d: 2, s: 2, w: 1, delta: 1 };
        let c2 = enumerate_candidate_weights(p2, 4);
        assert_eq!(c2.primes().len(), 2);
        assert_eq!(c2.len(), c2.primes()[0].len() as u128 * c2.primes()[1].len() as u128);
        for lw in c2.iter().take(50) {
            let lw = lw.unwrap();
            assert!(lw.combined().weights().iter().all(|&x| x >= 1));
        }
    }

    #[test]
    fn layered_base_and_order() {
        let r0 = WeightFn::new(vec![1, 2]).unwrap();
        let r1 = WeightFn::new(vec![3, 1]).unwrap();
        let lw = LayeredWeight::new(vec![r0, r1], 2).unwrap();
        // B = 1 + 2*2*3
        assert_eq!(lw.base(), 13);
        assert_eq!(lw.combined().weights(), &[16, 27]);
    }
}
