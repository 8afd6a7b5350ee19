//! Concentration-inducing shifts `x_i -> x_i + t^{a_i}` and the hitting sets built from them.

use std::collections::HashSet;
use std::sync::Arc;

use super::{concentration_rank_vectors, program_factor_coeffs, rank_over_function_field, scalar_coeffs, support_parameter, ConcMode};
use crate::algebra::{det_poly, ExponentVector, Field, ScalarPoly, UniPoly};
use crate::error::{Limits, PitError, Result};
use crate::kron::{candidate_primes, kron_bounds, prime_weights};
use crate::points::{mixed_radix, PointSet, PointSource, Provenance};
use crate::roabp::Roabp;

/// `x_i -> x_i + t^{a_i}`, with the prime whose reduced Kronecker map produced the `a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftMap {
    pub exponents: Vec<u64>,
    pub prime: u64,
}

impl ShiftMap {
    /// The translation vector `(t^{a_1}, ..., t^{a_n})` at a concrete `t`.
    pub fn at(&self, f: &Field, t: u64) -> Vec<u64> {
        self.exponents.iter().map(|&a| f.pow(t, a)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ConcentratingShift {
    pub map: ShiftMap,
    pub t0: u64,
    /// Per-factor support parameter `l`.
    pub ell: usize,
    /// `l (w^2 + 2)`: the support bound verified for the shifted program.
    pub bound: usize,
    /// Primes examined before the verified one, inclusive.
    pub primes_tried: usize,
    /// Whether every shifted factor is `l`-concentrated over `F(t)` (checked by
    /// specialization); `None` when the field is too small for that check.
    pub factors_concentrated_over_ft: Option<bool>,
}

/// Parameters for the parameter-only mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvertibleParams {
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub delta: u32,
    pub s: usize,
    pub mu: usize,
}

impl InvertibleParams {
    pub fn of(r: &Roabp) -> Self {
        let chain = r.factor_chain();
        InvertibleParams {
            n: r.n(),
            d: r.depth(),
            w: r.width(),
            delta: r.delta(),
            s: chain.factors.iter().map(|f| f.sparsity()).max().unwrap_or(1).max(1),
            mu: r.mu().max(1),
        }
    }
}

fn binom_small(n: u32, k: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Exponent vectors over `vars` with support at most `ell` and individual degree at most `delta`.
fn low_support_monomials(n: usize, vars: &[usize], delta: u32, ell: usize, ceiling: u64) -> Result<Vec<ExponentVector>> {
    let mut count: u128 = 0;
    for j in 0..=ell.min(vars.len()) {
        count += binom_small(vars.len() as u32, j as u32) * (delta as u128).pow(j as u32);
    }
    if count > ceiling as u128 {
        return Err(PitError::Capability(format!("{count} low-support monomials exceed the ceiling {ceiling}")));
    }
    let mut out = vec![ExponentVector::zeros(n)];
    for &v in vars {
        let mut next = Vec::with_capacity(out.len() * (delta as usize + 1));
        for e in &out {
            next.push(e.clone());
            if e.supp_size() < ell {
                for k in 1..=delta {
                    let mut x = e.clone();
                    x.set(v, k);
                    next.push(x);
                }
            }
        }
        out = next;
    }
    Ok(out)
}

fn distinct_weights(group: &[ExponentVector], a: &[u64]) -> bool {
    let mut seen = HashSet::with_capacity(group.len());
    group.iter().all(|e| seen.insert(e.as_slice().iter().zip(a).map(|(&k, &w)| k as u128 * w as u128).sum::<u128>()))
}

fn binom_mod(f: &Field, n: u32, k: u32) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = f.mul(acc, f.reduce((n - i) as u64));
        acc = f.div(acc, f.reduce((i + 1) as u64));
    }
    acc
}

/// Coefficients of `D(x + t^a)` in `x`, with entries in `F[t]`.
fn shifted_over_t(f: &Field, coeffs: &[(ExponentVector, Vec<u64>)], a: &[u64]) -> Vec<(ExponentVector, Vec<UniPoly>)> {
    let mut map: std::collections::BTreeMap<ExponentVector, Vec<UniPoly>> = std::collections::BTreeMap::new();
    for (m, v) in coeffs {
        let supp = m.support();
        let radices: Vec<u128> = supp.iter().map(|&i| m.get(i) as u128 + 1).collect();
        let total: u128 = radices.iter().product();
        for idx in 0..total {
            let digits = mixed_radix(idx, &radices);
            let mut e = ExponentVector::zeros(m.len());
            let mut c = 1u64;
            let mut deg = 0u64;
            for (&i, &k) in supp.iter().zip(&digits) {
                let k = k as u32;
                e.set(i, k);
                c = f.mul(c, binom_mod(f, m.get(i), k));
                deg += (m.get(i) - k) as u64 * a[i];
            }
            let entry = map.entry(e).or_insert_with(|| vec![UniPoly::zero(*f); v.len()]);
            for (slot, &x) in entry.iter_mut().zip(v) {
                if x != 0 {
                    *slot = slot.add(&UniPoly::monomial(*f, deg, f.mul(c, x)));
                }
            }
        }
    }
    map.into_iter().collect()
}

fn ft_concentrated(f: &Field, coeffs: &[(ExponentVector, Vec<u64>)], a: &[u64], ell: usize) -> Result<bool> {
    let shifted = shifted_over_t(f, coeffs, a);
    let all: Vec<Vec<UniPoly>> = shifted.iter().map(|(_, v)| v.clone()).collect();
    let low: Vec<Vec<UniPoly>> = shifted.iter().filter(|(e, _)| e.supp_size() < ell).map(|(_, v)| v.clone()).collect();
    Ok(rank_over_function_field(f, &low)? == rank_over_function_field(f, &all)?)
}

/// Searches prime-reduced Kronecker maps `a` that separate the monomials of every `det(D_i)`
/// and all monomials of support at most `l` and individual degree at most `delta`, then the
/// first `t0 = 1, 2, ...` at which every `det(D_i)` survives the shift, every shifted factor
/// is `l`-support concentrated and the shifted program is `l (w^2 + 2)`-support concentrated.
/// Each condition is verified by rank computations; the first verified pair is returned.
pub fn find_concentrating_shift(r: &Roabp, limits: &Limits, c0: u64) -> Result<ConcentratingShift> {
    let f = r.field();
    let (n, w) = (r.n(), r.width());
    let delta = r.delta();
    let chain = r.factor_chain();
    let s = chain.factors.iter().map(|m| m.sparsity()).max().unwrap_or(1).max(1);
    let mu = r.mu();
    let ell = support_parameter(w, s, Some(mu));
    let bound = ell * (w * w + 2);

    let mut dets: Vec<ScalarPoly> = Vec::with_capacity(r.depth());
    for (i, layer) in r.layers().iter().enumerate() {
        let grid: Vec<Vec<ScalarPoly>> = (0..w).map(|a| (0..w).map(|b| layer.entry(a, b)).collect()).collect();
        let det = det_poly(&grid, limits)?;
        if det.is_zero() {
            return Err(PitError::Precondition(format!(
                "layer {} is singular (det = 0); width-2 programs can be factorized first",
                i + 1
            )));
        }
        dets.push(det);
    }
    let vars: Vec<usize> = r.all_blocks().into_iter().flatten().collect();
    let mut groups: Vec<Vec<ExponentVector>> = dets.iter().map(|d| d.terms().map(|(e, _)| e.clone()).collect()).collect();
    groups.push(low_support_monomials(n, &vars, delta, ell, limits.expand_ceiling)?);
    let pairs: u64 = groups.iter().map(|g| (g.len() as u64).saturating_mul(g.len().saturating_sub(1) as u64) / 2).sum();
    let delta_a = (w as u32).saturating_mul(delta).max(1);
    let (_, cutoff) = kron_bounds(n, delta_a, pairs.max(1), c0);
    let factors = program_factor_coeffs(r);
    let max_t0 = f.modulus().saturating_sub(1).min(4096);

    for (tried, p) in candidate_primes(cutoff).enumerate() {
        let a = prime_weights(n, delta_a, p).weights().to_vec();
        if !groups.iter().all(|g| distinct_weights(g, &a)) {
            continue;
        }
        let map = ShiftMap { exponents: a.clone(), prime: p };
        for t0 in 1..=max_t0 {
            let c = map.at(&f, t0);
            if dets.iter().map(|d| d.eval(&c)).collect::<Result<Vec<_>>>()?.contains(&0) {
                continue;
            }
            let shifted = r.shift(&c)?;
            let ok_factors = program_factor_coeffs(&shifted).iter().try_fold(true, |ok, fc| {
                let (lo, hi) = concentration_rank_vectors(&f, fc, None, ell, ConcMode::Support)?;
                Ok::<bool, PitError>(ok && lo == hi)
            })?;
            if !ok_factors {
                continue;
            }
            let cprime = shifted.expand(limits)?.scalar_part;
            let (lo, hi) = concentration_rank_vectors(&f, &scalar_coeffs(&cprime), None, bound, ConcMode::Support)?;
            if lo != hi {
                continue;
            }
            let over_ft = factors.iter().try_fold(Some(true), |acc, fc| match ft_concentrated(&f, fc, &a, ell) {
                Ok(b) => Ok(acc.map(|x| x && b)),
                Err(PitError::ModulusTooSmall(_)) => Ok(None),
                Err(e) => Err(e),
            })?;
            return Ok(ConcentratingShift { map, t0, ell, bound, primes_tried: tried + 1, factors_concentrated_over_ft: over_ft });
        }
    }
    Err(PitError::Internal(format!("no verified concentrating shift among the primes up to {cutoff}")))
}

/// Points vanishing outside some `min(l - 1, |vars|)`-subset of `vars`, with values in
/// `{1, ..., delta + 1}` on it. Lexicographic subsets, then grid values (last variable fastest).
struct LowSupport {
    n: usize,
    vars: Vec<usize>,
    k: usize,
    base: u128,
}

impl LowSupport {
    fn subsets(&self) -> u128 {
        binom_small(self.vars.len() as u32, self.k as u32)
    }

    fn unrank(&self, mut r: u128) -> Vec<usize> {
        let m = self.vars.len();
        let mut out = Vec::with_capacity(self.k);
        let mut start = 0;
        for slot in 0..self.k {
            for c in start..m {
                let rest = binom_small((m - c - 1) as u32, (self.k - slot - 1) as u32);
                if r < rest {
                    out.push(c);
                    start = c + 1;
                    break;
                }
                r -= rest;
            }
        }
        out
    }
}

impl PointSource for LowSupport {
    fn ambient(&self) -> usize {
        self.n
    }
    fn len(&self) -> u128 {
        self.subsets() * self.base.pow(self.k as u32)
    }
    fn point(&self, idx: u128) -> Vec<u64> {
        let cells = self.base.pow(self.k as u32);
        let subset = self.unrank(idx / cells);
        let digits = mixed_radix(idx % cells, &vec![self.base; self.k]);
        let mut x = vec![0u64; self.n];
        for (pos, d) in subset.into_iter().zip(digits) {
            x[self.vars[pos]] = d as u64 + 1;
        }
        x
    }
}

fn low_support_over(f: &Field, n: usize, vars: Vec<usize>, delta: u32, ell: usize) -> Result<PointSet> {
    if ell == 0 {
        return Err(PitError::Precondition("support bound must be at least 1".into()));
    }
    f.require_points(delta as u128 + 1, true, "low-support grid values")?;
    let k = (ell - 1).min(vars.len());
    let src = LowSupport { n, vars, k, base: delta as u128 + 1 };
    let prov = Provenance::new("low-support")
        .with("n", n)
        .with("delta", delta)
        .with("ell", ell)
        .with("subset_size", k)
        .with("size", src.len());
    Ok(PointSet::from_source(Arc::new(src), prov))
}

/// Size `C(n, l-1) (delta+1)^(l-1)` (with `l - 1` capped at `n`).
pub fn low_support_hitting_set(f: &Field, n: usize, delta: u32, ell: usize) -> Result<PointSet> {
    low_support_over(f, n, (0..n).collect(), delta, ell)
}

/// `h + (t^{a_1}, ..., t^{a_n})` for every map, grid point `h` and `t` in `1..=tsweep`
/// (`t` fastest).
struct ShiftedGrid {
    field: Field,
    grid: PointSet,
    maps: Vec<Vec<u64>>,
    tsweep: u128,
}

impl PointSource for ShiftedGrid {
    fn ambient(&self) -> usize {
        self.grid.ambient()
    }
    fn len(&self) -> u128 {
        self.maps.len() as u128 * self.grid.len() * self.tsweep
    }
    fn point(&self, idx: u128) -> Vec<u64> {
        let d = mixed_radix(idx, &[self.maps.len() as u128, self.grid.len(), self.tsweep]);
        let t = d[2] as u64 + 1;
        let mut x = self.grid.point(d[1]);
        for (xi, &a) in x.iter_mut().zip(&self.maps[d[0] as usize]) {
            *xi = self.field.add(*xi, self.field.pow(t, a));
        }
        x
    }
}

/// Whitebox: the verified shift composed with the low-support grid for `l (w^2 + 2)`, over
/// the variables the program reads, and `t` swept over `1 + delta sum_i a_i` values (enough
/// to pass the `t`-degree of `C(h + t^a)`). Size `|grid| |t-sweep|`.
pub fn invertible_hitting_set(r: &Roabp, limits: &Limits, c0: u64) -> Result<PointSet> {
    let f = r.field();
    let shift = find_concentrating_shift(r, limits, c0)?;
    let vars: Vec<usize> = r.all_blocks().into_iter().flatten().collect();
    let delta = r.delta();
    let grid = low_support_over(&f, r.n(), vars.clone(), delta, shift.bound)?;
    let tsweep: u128 = 1 + delta as u128 * vars.iter().map(|&v| shift.map.exponents[v] as u128).sum::<u128>();
    f.require_points(tsweep, true, "shift parameter sweep")?;
    let prov = Provenance::new("invertible-whitebox")
        .with("prime", shift.map.prime)
        .with("t0", shift.t0)
        .with("ell", shift.ell)
        .with("bound", shift.bound)
        .with("grid", grid.len())
        .with("tsweep", tsweep)
        .with("maps", 1)
        .with("size", grid.len() * tsweep);
    let src = ShiftedGrid { field: f, grid, maps: vec![shift.map.exponents], tsweep };
    Ok(PointSet::from_source(Arc::new(src), prov))
}

/// Parameter-only: every candidate map up to the prime cutoff for `d s^(2w)` determinant
/// pairs plus all low-support pairs, each with the uniform sweep `1 + delta n p_max`.
pub fn invertible_hitting_set_blackbox(f: &Field, params: InvertibleParams, c0: u64, limits: &Limits) -> Result<PointSet> {
    let InvertibleParams { n, d, w, delta, s, mu } = params;
    let ell = support_parameter(w, s, Some(mu));
    let bound = ell * (w * w + 2);
    let vars: Vec<usize> = (0..n).collect();
    let low = low_support_monomials(n, &vars, delta, ell, limits.expand_ceiling)?.len() as u64;
    let det_pairs = (d as u64).saturating_mul((s as u64).saturating_pow(2 * w as u32));
    let pairs = det_pairs.saturating_add(low.saturating_mul(low.saturating_sub(1)) / 2);
    let delta_a = (w as u32).saturating_mul(delta).max(1);
    let (_, cutoff) = kron_bounds(n, delta_a, pairs.max(1), c0);
    let primes: Vec<u64> = candidate_primes(cutoff).collect();
    let pmax = primes.last().copied().unwrap_or(2);
    let tsweep = 1 + delta as u128 * n as u128 * pmax as u128;
    f.require_points(tsweep, true, "shift parameter sweep")?;
    let grid = low_support_over(f, n, vars, delta, bound)?;
    let maps: Vec<Vec<u64>> = primes.iter().map(|&p| prime_weights(n, delta_a, p).weights().to_vec()).collect();
    let prov = Provenance::new("invertible-blackbox")
        .with("ell", ell)
        .with("bound", bound)
        .with("grid", grid.len())
        .with("tsweep", tsweep)
        .with("maps", maps.len())
        .with("size", grid.len() * tsweep * maps.len() as u128);
    Ok(PointSet::from_source(Arc::new(ShiftedGrid { field: *f, grid, maps, tsweep }), prov))
}
