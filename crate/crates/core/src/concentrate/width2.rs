//! Width-2 programs: splitting at singular layers, and the interpolated hitting set that
//! covers every piece of the split at once.

use std::sync::{Arc, OnceLock};

use super::shift::{invertible_hitting_set, invertible_hitting_set_blackbox, InvertibleParams};
use crate::algebra::{det_poly, Field, ScalarPoly};
use crate::error::{Limits, PitError, Result};
use crate::points::{PointSet, PointSource, Provenance};
use crate::roabp::Roabp;

/// `alpha * C = prod_j C_j` with every interior layer of every `C_j` symbolically invertible.
/// When `zero` is set some layer vanishes identically, `C = 0`, and the chain is empty.
#[derive(Clone, Debug)]
pub struct Width2Factorization {
    pub alpha: ScalarPoly,
    pub chain: Vec<Roabp>,
    pub zero: bool,
}

impl Width2Factorization {
    /// Number of singular layers split out.
    pub fn splits(&self) -> usize {
        self.chain.len().saturating_sub(1)
    }

    /// `prod_j C_j(point)` (0 for the zero certificate).
    pub fn eval_chain(&self, point: &[u64]) -> Result<u64> {
        if self.zero {
            return Ok(0);
        }
        let f = self.alpha.field();
        self.chain.iter().try_fold(1u64, |acc, c| Ok(f.mul(acc, c.evaluate(point)?)))
    }

    /// Whether `alpha(point) C(point) = prod_j C_j(point)`.
    pub fn identity_holds_at(&self, r: &Roabp, point: &[u64]) -> Result<bool> {
        let f = r.field();
        let lhs = f.mul(self.alpha.eval(point)?, r.evaluate(point)?);
        Ok(lhs == self.eval_chain(point)?)
    }
}

/// Splits a width-2 program at each singular layer `D = (1/D_rk) D[:, k] D[r, :]`, taking
/// `(r, k)` as the first nonzero entry in the order `a, b, c, d`.
pub fn factorize_width2(r: &Roabp, limits: &Limits) -> Result<Width2Factorization> {
    if r.width() != 2 {
        return Err(PitError::Precondition(format!("width-2 factorization needs w = 2, got {}", r.width())));
    }
    let (f, n) = (r.field(), r.n());
    let mut alpha = ScalarPoly::constant(f, n, 1);
    let mut chain = Vec::new();
    let mut left_block = r.left_block().to_vec();
    let mut left = r.left().to_vec();
    let mut blocks = Vec::new();
    let mut layers = Vec::new();
    for (i, layer) in r.layers().iter().enumerate() {
        let grid: Vec<Vec<ScalarPoly>> = (0..2).map(|a| (0..2).map(|b| layer.entry(a, b)).collect()).collect();
        if !det_poly(&grid, limits)?.is_zero() {
            blocks.push(r.blocks()[i].clone());
            layers.push(layer.clone());
            continue;
        }
        let Some((row, col)) = [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().find(|&(a, b)| !grid[a][b].is_zero()) else {
            return Ok(Width2Factorization { alpha: ScalarPoly::constant(f, n, 1), chain: Vec::new(), zero: true });
        };
        alpha = alpha.mul(&grid[row][col])?;
        let column = vec![grid[0][col].clone(), grid[1][col].clone()];
        let next_left = grid[row].clone();
        let block = r.blocks()[i].clone();
        chain.push(Roabp::new(
            f,
            n,
            2,
            std::mem::take(&mut blocks),
            std::mem::take(&mut layers),
            std::mem::replace(&mut left_block, block.clone()),
            std::mem::replace(&mut left, next_left),
            block,
            column,
        )?);
    }
    chain.push(Roabp::new(f, n, 2, blocks, layers, left_block, left, r.right_block().to_vec(), r.right().to_vec())?);
    Ok(Width2Factorization { alpha, chain, zero: false })
}

/// The vector interpolant through `anchors` at `nodes`, in barycentric form.
#[derive(Clone, Debug)]
pub struct LagrangeCurve {
    field: Field,
    anchors: Vec<Vec<u64>>,
    nodes: Vec<u64>,
    weights: Vec<u64>,
}

impl LagrangeCurve {
    pub fn anchors(&self) -> &[Vec<u64>] {
        &self.anchors
    }

    pub fn nodes(&self) -> &[u64] {
        &self.nodes
    }

    /// Degree of the curve in `u` (at most `h - 1`).
    pub fn degree_bound(&self) -> usize {
        self.anchors.len().saturating_sub(1)
    }

    pub fn eval(&self, u: u64) -> Vec<u64> {
        let f = &self.field;
        let u = f.reduce(u);
        if let Some(i) = self.nodes.iter().position(|&b| b == u) {
            return self.anchors[i].clone();
        }
        let diffs: Vec<u64> = self.nodes.iter().map(|&b| f.sub(u, b)).collect();
        let ell = diffs.iter().fold(1u64, |acc, &d| f.mul(acc, d));
        let n = self.anchors.first().map_or(0, |a| a.len());
        let mut out = vec![0u64; n];
        for ((a, &w), &d) in self.anchors.iter().zip(&self.weights).zip(&diffs) {
            let c = f.mul(ell, f.div(w, d));
            for (o, &x) in out.iter_mut().zip(a) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }
}

fn barycentric_weights(f: &Field, nodes: &[u64]) -> Vec<u64> {
    let h = nodes.len();
    let consecutive = nodes.iter().enumerate().all(|(i, &b)| b == i as u64);
    if consecutive {
        // 1 / prod_{j != i} (i - j) = (-1)^(h-1-i) / (i! (h-1-i)!)
        let mut fact = vec![1u64; h.max(1)];
        for i in 1..h {
            fact[i] = f.mul(fact[i - 1], f.reduce(i as u64));
        }
        return (0..h)
            .map(|i| {
                let w = f.div(1, f.mul(fact[i], fact[h - 1 - i]));
                if (h - 1 - i) % 2 == 1 {
                    f.neg(w)
                } else {
                    w
                }
            })
            .collect();
    }
    (0..h)
        .map(|i| {
            let prod = (0..h).filter(|&j| j != i).fold(1u64, |acc, j| f.mul(acc, f.sub(nodes[i], nodes[j])));
            f.div(1, prod)
        })
        .collect()
}

/// Interpolates the points of `h` (materialized under `ceiling`) at `nodes`.
pub fn lagrange_curve(field: &Field, h: &PointSet, nodes: &[u64], ceiling: u64) -> Result<LagrangeCurve> {
    if h.len() != nodes.len() as u128 {
        return Err(PitError::Precondition(format!("{} anchors but {} nodes", h.len(), nodes.len())));
    }
    field.require_points(h.len(), false, "interpolation nodes")?;
    let nodes: Vec<u64> = nodes.iter().map(|&b| field.reduce(b)).collect();
    let mut sorted = nodes.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(PitError::Precondition("interpolation nodes repeat".into()));
    }
    let anchors = h.materialize(ceiling)?;
    let weights = barycentric_weights(field, &nodes);
    Ok(LagrangeCurve { field: *field, anchors, nodes, weights })
}

/// `(d + 2) delta mu`: a bound on the total degree of every piece of the split.
pub fn width2_delta(d: usize, delta: u32, mu: usize) -> u64 {
    (d as u64 + 2) * delta as u64 * mu.max(1) as u64
}

/// `u = 0, 1, ..., N - 1` on the curve through `H` at nodes `0..h`; the first `h` points are
/// `H` itself.
struct CurveSweep {
    field: Field,
    h: PointSet,
    len: u128,
    ceiling: u64,
    curve: OnceLock<LagrangeCurve>,
}

impl PointSource for CurveSweep {
    fn ambient(&self) -> usize {
        self.h.ambient()
    }
    fn len(&self) -> u128 {
        self.len
    }
    fn point(&self, idx: u128) -> Vec<u64> {
        if idx < self.h.len() {
            return self.h.point(idx);
        }
        let curve = self.curve.get_or_init(|| {
            let nodes: Vec<u64> = (0..self.h.len() as u64).collect();
            lagrange_curve(&self.field, &self.h, &nodes, self.ceiling).expect("anchor count checked at construction")
        });
        curve.eval(idx as u64)
    }
}

fn curve_sweep(f: &Field, h: PointSet, d: usize, delta: u64, limits: &Limits, prov: Provenance) -> Result<PointSet> {
    let hl = h.len();
    if hl == 0 {
        return Err(PitError::Internal("empty anchor set".into()));
    }
    if hl > limits.sweep_ceiling as u128 {
        return Err(PitError::Capability(format!("{hl} anchor points exceed the sweep ceiling {}", limits.sweep_ceiling)));
    }
    let len = 1 + (d as u128 + 2) * delta as u128 * hl;
    f.require_points(len.max(hl), false, "curve parameter sweep")?;
    let prov = prov.with("anchors", hl).with("Delta", delta).with("size", len);
    let src = CurveSweep { field: *f, h, len, ceiling: limits.sweep_ceiling, curve: OnceLock::new() };
    Ok(PointSet::from_source(Arc::new(src), prov))
}

/// Whitebox: `H` is the concatenation of the invertible-class sets of the pieces of the
/// split, and the sweep runs over `1 + (d + 2) Delta |H|` curve parameters.
pub fn width2_hitting_set(r: &Roabp, limits: &Limits, c0: u64) -> Result<PointSet> {
    let f = r.field();
    let fac = factorize_width2(r, limits)?;
    if fac.zero {
        let prov = Provenance::new("width2-whitebox").with("zero", true).with("size", 1);
        return PointSet::explicit(r.n(), vec![vec![0; r.n()]], prov);
    }
    let parts = fac.chain.iter().map(|c| invertible_hitting_set(c, limits, c0)).collect::<Result<Vec<_>>>()?;
    let h = PointSet::concat(r.n(), parts, Provenance::new("width2-anchors"))?;
    let delta = width2_delta(r.depth(), r.delta(), r.mu());
    let prov = Provenance::new("width2-whitebox").with("pieces", fac.chain.len()).with("d", r.depth());
    curve_sweep(&f, h, r.depth(), delta, limits, prov)
}

/// Parameter-only: `H` is the blackbox invertible-class set for the same parameters.
pub fn width2_hitting_set_blackbox(f: &Field, params: InvertibleParams, c0: u64, limits: &Limits) -> Result<PointSet> {
    if params.w != 2 {
        return Err(PitError::Precondition(format!("width-2 hitting set needs w = 2, got {}", params.w)));
    }
    let h = invertible_hitting_set_blackbox(f, params, c0, limits)?;
    let delta = width2_delta(params.d, params.delta, params.mu);
    let prov = Provenance::new("width2-blackbox").with("d", params.d);
    curve_sweep(f, h, params.d, delta, limits, prov)
}
