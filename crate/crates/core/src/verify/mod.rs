//! Ground-truth oracles, seeded instance generators and hitting-property campaigns.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)` on stream `stream`; a
//! campaign draws sample `i` from stream `i`. Nothing reads the clock or OS entropy.

mod campaign;
mod generate;

use serde::{Deserialize, Serialize};

pub use campaign::{hitting_set_for, run_campaign, CampaignConfig, CampaignReport, SampleOutcome, SampleRecord};
pub use generate::{generate_instance, random_partition, rng_for};

use crate::algebra::{Field, ScalarPoly};
use crate::depth3::Depth3Circuit;
use crate::error::{Limits, PitError, Result};
use crate::points::PointSet;
use crate::roabp::Roabp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    Roabp,
    InvertibleRoabp,
    Width2Roabp,
    Depth3Distance,
    SumSml,
}

impl ClassTag {
    pub const ALL: [ClassTag; 5] =
        [ClassTag::Roabp, ClassTag::InvertibleRoabp, ClassTag::Width2Roabp, ClassTag::Depth3Distance, ClassTag::SumSml];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Roabp => "roabp",
            ClassTag::InvertibleRoabp => "invertible-roabp",
            ClassTag::Width2Roabp => "width2-roabp",
            ClassTag::Depth3Distance => "depth3-distance",
            ClassTag::SumSml => "sum-sml",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| PitError::Parse(format!("unknown class {s:?}")))
    }
}

/// Zero/nonzero requirement on a generated instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Whatever the sampler produces.
    Any,
    /// Rejection-sampled against [`oracle_is_zero`].
    Nonzero,
    /// Built to cancel (depth-3 classes only).
    Zero,
}

/// Everything that determines an instance.
///
/// ROABP classes read `n, d, w, delta, s, mu`; depth-3 classes read `n, k, delta` (distance)
/// or `n, k, c` (distinct partitions).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub class: ClassTag,
    pub n: usize,
    pub d: usize,
    pub w: usize,
    pub delta: u32,
    pub s: usize,
    /// Largest support of a layer monomial; 0 means the whole block.
    pub mu: usize,
    pub k: usize,
    pub c: usize,
    pub seed: u64,
    pub stream: u64,
    pub modulus: u64,
    pub target: Target,
    /// Width 2: make at least one layer singular.
    pub force_singular: bool,
    /// ROABP classes: give every layer an invertible constant term.
    pub invertible_constant: bool,
    /// ROABP classes: polynomial boundary vectors on blocks of their own.
    pub boundaries: bool,
}

impl InstanceSpec {
    /// Small defaults for `class`.
    pub fn new(class: ClassTag, seed: u64) -> Self {
        InstanceSpec {
            class,
            n: 4,
            d: 3,
            w: if matches!(class, ClassTag::Roabp) { 3 } else { 2 },
            delta: if matches!(class, ClassTag::Depth3Distance) { 2 } else { 1 },
            s: 2,
            mu: 0,
            k: 2,
            c: 2,
            seed,
            stream: 0,
            modulus: if matches!(class, ClassTag::Width2Roabp) { 1_000_000_007 } else { 10007 },
            target: Target::Any,
            force_singular: matches!(class, ClassTag::Width2Roabp),
            invertible_constant: false,
            boundaries: false,
        }
    }

    pub fn field(&self) -> Result<Field> {
        Field::new(self.modulus)
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        InstanceSpec { stream, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Roabp(Roabp),
    Depth3(Depth3Circuit),
}

impl Instance {
    pub fn field(&self) -> Field {
        match self {
            Instance::Roabp(r) => r.field(),
            Instance::Depth3(c) => c.field(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Roabp(r) => r.n(),
            Instance::Depth3(c) => c.n(),
        }
    }

    pub fn evaluate(&self, point: &[u64]) -> Result<u64> {
        match self {
            Instance::Roabp(r) => r.evaluate(point),
            Instance::Depth3(c) => c.evaluate(point),
        }
    }

    pub fn expand(&self, limits: &Limits) -> Result<ScalarPoly> {
        match self {
            Instance::Roabp(r) => Ok(r.expand(limits)?.scalar_part),
            Instance::Depth3(c) => c.expand(limits),
        }
    }

    pub fn as_roabp(&self) -> Option<&Roabp> {
        match self {
            Instance::Roabp(r) => Some(r),
            Instance::Depth3(_) => None,
        }
    }

    pub fn as_depth3(&self) -> Option<&Depth3Circuit> {
        match self {
            Instance::Depth3(c) => Some(c),
            Instance::Roabp(_) => None,
        }
    }
}

/// True iff every coefficient of the full expansion vanishes.
pub fn oracle_is_zero(inst: &Instance, limits: &Limits) -> Result<bool> {
    Ok(inst.expand(limits)?.is_zero())
}

/// Second oracle: evaluation on the full grid `{0..=D}^n` with `D` the total degree.
/// A nonzero polynomial of total degree `D` cannot vanish on it.
pub fn grid_is_zero(inst: &Instance, total_degree: u64, ceiling: u64) -> Result<bool> {
    let n = inst.n();
    let side = total_degree as u128 + 1;
    inst.field().require_points(side, false, "grid oracle values")?;
    let cells = side.checked_pow(n as u32).filter(|&c| c <= ceiling as u128).ok_or_else(|| {
        PitError::Capability(format!("grid of side {side} in {n} variables exceeds the ceiling {ceiling}"))
    })?;
    for idx in 0..cells {
        let p: Vec<u64> = crate::points::mixed_radix(idx, &vec![side; n]).into_iter().map(|x| x as u64).collect();
        if inst.evaluate(&p)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HitVerdict {
    /// The instance is zero, so any set passes.
    VacuousPass,
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitReport {
    pub verdict: HitVerdict,
    pub witness_index: Option<u128>,
    pub set_size: u128,
    /// The size the generator claims through its provenance, if any.
    pub formula_size: Option<u128>,
}

impl HitReport {
    pub fn size_matches_formula(&self) -> Option<bool> {
        self.formula_size.map(|f| f == self.set_size)
    }
}

/// Checks that `points` contains a nonzero of `inst`, sweeping at most `ceiling` points.
pub fn verify_hitting_property(inst: &Instance, points: &PointSet, limits: &Limits, jobs: usize) -> Result<HitReport> {
    let formula_size = points.provenance().param("size").and_then(|s| s.parse().ok());
    let set_size = points.len();
    if oracle_is_zero(inst, limits)? {
        return Ok(HitReport { verdict: HitVerdict::VacuousPass, witness_index: None, set_size, formula_size });
    }
    let hit = points.find_witness(|p| Ok(inst.evaluate(p)? != 0), jobs, limits.sweep_ceiling)?;
    Ok(HitReport {
        verdict: if hit.is_some() { HitVerdict::Pass } else { HitVerdict::Fail },
        witness_index: hit.map(|(i, _)| i),
        set_size,
        formula_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ExponentVector, Mat, MatPoly};
    use crate::depth3::{Gate, LinearForm};
    use crate::points::Provenance;

    fn gate_pair(f: Field) -> Depth3Circuit {
        let forms = vec![LinearForm::new(&f, 1, [(0, 2)]), LinearForm::new(&f, 0, [(1, 1), (2, 3)])];
        Depth3Circuit::new(f, 3, vec![Gate::new(4, forms.clone()), Gate::new(f.neg(4), forms)]).unwrap()
    }

    #[test]
    fn class_tags_round_trip() {
        for c in ClassTag::ALL {
            assert_eq!(ClassTag::parse(c.as_str()).unwrap(), c);
        }
        assert!(ClassTag::parse("abp").is_err());
    }

    #[test]
    fn cancelling_gates_are_zero() {
        let f = Field::new(10007).unwrap();
        let inst = Instance::Depth3(gate_pair(f));
        assert!(oracle_is_zero(&inst, &Limits::default()).unwrap());
        assert!(grid_is_zero(&inst, 2, 1000).unwrap());
        let empty = PointSet::explicit(3, vec![], Provenance::new("empty")).unwrap();
        let rep = verify_hitting_property(&inst, &empty, &Limits::default(), 1).unwrap();
        assert_eq!(rep.verdict, HitVerdict::VacuousPass);
    }

    #[test]
    fn monomial_is_nonzero() {
        let f = Field::new(10007).unwrap();
        let l = MatPoly::from_terms(f, 2, 1, vec![(ExponentVector::new(vec![1, 0]), Mat::identity(1))]).unwrap();
        let r = MatPoly::from_terms(f, 2, 1, vec![(ExponentVector::new(vec![0, 1]), Mat::identity(1))]).unwrap();
        let prog = Roabp::with_constant_boundaries(f, 2, vec![vec![0], vec![1]], vec![l, r], &[1], &[1]).unwrap();
        assert_eq!(prog.evaluate(&[2, 3]).unwrap(), 6);
        let inst = Instance::Roabp(prog);
        assert!(!oracle_is_zero(&inst, &Limits::default()).unwrap());
        assert!(!grid_is_zero(&inst, 2, 1000).unwrap());
        let empty = PointSet::explicit(2, vec![], Provenance::new("empty")).unwrap();
        let rep = verify_hitting_property(&inst, &empty, &Limits::default(), 1).unwrap();
        assert_eq!(rep.verdict, HitVerdict::Fail);
        let one = PointSet::explicit(2, vec![vec![0, 5], vec![1, 1]], Provenance::new("two").with("size", 2)).unwrap();
        let rep = verify_hitting_property(&inst, &one, &Limits::default(), 1).unwrap();
        assert_eq!((rep.verdict, rep.witness_index, rep.size_matches_formula()), (HitVerdict::Pass, Some(1), Some(true)));
    }
}
