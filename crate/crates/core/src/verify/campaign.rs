//! Hitting-property campaigns over seeded instances, with deterministic reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_instance, oracle_is_zero, verify_hitting_property, ClassTag, HitVerdict, Instance, InstanceSpec, Target};
use crate::concentrate::{invertible_hitting_set, invertible_hitting_set_blackbox, width2_hitting_set, width2_hitting_set_blackbox, InvertibleParams};
use crate::depth3::{best_gate_order, circuit_to_roabp, sum_sml_whitebox_test, SumSmlOptions, Verdict};
use crate::error::{PitError, Result};
use crate::isolate::{blackbox_hitting_set, roabp_hitting_set, BlackboxParams, HitMode, IsolateOptions};
use crate::points::PointSet;
use crate::roabp::Roabp;

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    /// Template; sample `i` uses stream `i`.
    pub spec: InstanceSpec,
    pub samples: u64,
    pub mode: HitMode,
    pub isolate: IsolateOptions,
    /// Depth-3 classes: even samples are built to cancel, odd ones are nonzero.
    pub mix_zero: bool,
    /// Worker threads across samples.
    pub jobs: usize,
}

impl CampaignConfig {
    pub fn new(spec: InstanceSpec, samples: u64) -> Self {
        CampaignConfig { spec, samples, mode: HitMode::Whitebox, isolate: IsolateOptions::default(), mix_zero: false, jobs: 1 }
    }

    fn sample_spec(&self, i: u64) -> InstanceSpec {
        let mut s = self.spec.with_stream(i);
        if self.mix_zero {
            s.target = if i.is_multiple_of(2) { Target::Zero } else { Target::Nonzero };
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleOutcome {
    Pass,
    VacuousPass,
    Fail,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub stream: u64,
    pub outcome: SampleOutcome,
    pub oracle_zero: Option<bool>,
    pub set_size: Option<u128>,
    pub formula_size: Option<u128>,
    pub witness_index: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub spec: InstanceSpec,
    pub mode: String,
    pub samples: Vec<SampleRecord>,
    pub passed: u64,
    pub vacuous: u64,
    pub failed: u64,
    pub errors: u64,
    /// Samples whose emitted size equals the generator's formula.
    pub size_matches: u64,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }

    /// One line per sample, then a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# campaign class={} seed={} mode={}\n", self.spec.class.as_str(), self.spec.seed, self.mode));
        for s in &self.samples {
            let outcome = match &s.outcome {
                SampleOutcome::Pass => "pass".to_string(),
                SampleOutcome::VacuousPass => "vacuous-pass".to_string(),
                SampleOutcome::Fail => "FAIL".to_string(),
                SampleOutcome::Error(e) => format!("ERROR {e}"),
            };
            let opt = |v: Option<u128>| v.map_or("-".to_string(), |x| x.to_string());
            out.push_str(&format!(
                "sample {} {} zero={} size={} formula={} witness={}\n",
                s.stream,
                outcome,
                s.oracle_zero.map_or("-".to_string(), |z| z.to_string()),
                opt(s.set_size),
                opt(s.formula_size),
                opt(s.witness_index)
            ));
        }
        out.push_str(&format!(
            "summary passed={} vacuous={} failed={} errors={} size_matches={} total={}\n",
            self.passed,
            self.vacuous,
            self.failed,
            self.errors,
            self.size_matches,
            self.samples.len()
        ));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The generator's hitting set for the instance's class.
pub fn hitting_set_for(class: ClassTag, inst: &Instance, mode: HitMode, iso: &IsolateOptions) -> Result<PointSet> {
    let roabp = |i: &Instance| -> Result<Roabp> {
        i.as_roabp().cloned().ok_or_else(|| PitError::Precondition(format!("{} expects a program", class.as_str())))
    };
    match (class, mode) {
        (ClassTag::Roabp, HitMode::Whitebox) => roabp_hitting_set(&roabp(inst)?, HitMode::Whitebox, iso),
        (ClassTag::Roabp, HitMode::Blackbox) => {
            let r = roabp(inst)?;
            blackbox_hitting_set(r.field(), BlackboxParams::of(&r), iso.c0)
        }
        (ClassTag::InvertibleRoabp, HitMode::Whitebox) => invertible_hitting_set(&roabp(inst)?, &iso.limits, iso.c0),
        (ClassTag::InvertibleRoabp, HitMode::Blackbox) => {
            let r = roabp(inst)?;
            invertible_hitting_set_blackbox(&r.field(), InvertibleParams::of(&r), iso.c0, &iso.limits)
        }
        (ClassTag::Width2Roabp, HitMode::Whitebox) => width2_hitting_set(&roabp(inst)?, &iso.limits, iso.c0),
        (ClassTag::Width2Roabp, HitMode::Blackbox) => {
            let r = roabp(inst)?;
            width2_hitting_set_blackbox(&r.field(), InvertibleParams::of(&r), iso.c0, &iso.limits)
        }
        (ClassTag::Depth3Distance, _) => {
            let c = inst.as_depth3().ok_or_else(|| PitError::Precondition("depth3-distance expects a circuit".into()))?;
            let r = circuit_to_roabp(c, &best_gate_order(c)?)?;
            match mode {
                HitMode::Whitebox => roabp_hitting_set(&r, HitMode::Whitebox, iso),
                HitMode::Blackbox => blackbox_hitting_set(r.field(), BlackboxParams::of(&r), iso.c0),
            }
        }
        (ClassTag::SumSml, _) => Err(PitError::Precondition("sum-sml is decided by the whitebox test, not a point set".into())),
    }
}

fn run_sample(cfg: &CampaignConfig, i: u64) -> SampleRecord {
    let spec = cfg.sample_spec(i);
    let mut rec =
        SampleRecord { stream: i, outcome: SampleOutcome::Fail, oracle_zero: None, set_size: None, formula_size: None, witness_index: None };
    let res = (|| -> Result<()> {
        let inst = generate_instance(&spec, &cfg.isolate.limits)?;
        if spec.class == ClassTag::SumSml {
            let c = inst.as_depth3().expect("sum-sml generates circuits");
            let zero = oracle_is_zero(&inst, &cfg.isolate.limits)?;
            rec.oracle_zero = Some(zero);
            let opts = SumSmlOptions { isolate: cfg.isolate, ceiling: cfg.isolate.limits.sweep_ceiling, jobs: 1 };
            let rep = sum_sml_whitebox_test(c, &opts)?;
            rec.set_size = Some(rep.set_sizes.iter().sum());
            let agrees = match rep.verdict {
                Verdict::Zero => zero,
                Verdict::Nonzero => !zero && c.evaluate(rep.witness.as_deref().unwrap_or(&[]))? != 0,
            };
            rec.outcome = if agrees { SampleOutcome::Pass } else { SampleOutcome::Fail };
            return Ok(());
        }
        let points = hitting_set_for(spec.class, &inst, cfg.mode, &cfg.isolate)?;
        let rep = verify_hitting_property(&inst, &points, &cfg.isolate.limits, 1)?;
        rec.oracle_zero = Some(rep.verdict == HitVerdict::VacuousPass);
        rec.set_size = Some(rep.set_size);
        rec.formula_size = rep.formula_size;
        rec.witness_index = rep.witness_index;
        rec.outcome = match rep.verdict {
            HitVerdict::Pass => SampleOutcome::Pass,
            HitVerdict::VacuousPass => SampleOutcome::VacuousPass,
            HitVerdict::Fail => SampleOutcome::Fail,
        };
        Ok(())
    })();
    if let Err(e) = res {
        rec.outcome = SampleOutcome::Error(e.to_string());
    }
    rec
}

/// Runs every sample (in parallel when `jobs > 1`) and merges the records in stream order.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let samples: Vec<SampleRecord> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| PitError::Internal(format!("thread pool: {e}")))?;
        pool.install(|| (0..cfg.samples).into_par_iter().map(|i| run_sample(cfg, i)).collect())
    } else {
        (0..cfg.samples).map(|i| run_sample(cfg, i)).collect()
    };
    let count = |p: fn(&SampleOutcome) -> bool| samples.iter().filter(|s| p(&s.outcome)).count() as u64;
    Ok(CampaignReport {
        spec: cfg.spec.clone(),
        mode: match cfg.mode {
            HitMode::Whitebox => "whitebox".into(),
            HitMode::Blackbox => "blackbox".into(),
        },
        passed: count(|o| *o == SampleOutcome::Pass),
        vacuous: count(|o| *o == SampleOutcome::VacuousPass),
        failed: count(|o| *o == SampleOutcome::Fail),
        errors: count(|o| matches!(o, SampleOutcome::Error(_))),
        size_matches: samples.iter().filter(|s| s.formula_size.is_some() && s.formula_size == s.set_size).count() as u64,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaigns_pass_and_repeat() {
        for class in ClassTag::ALL {
            let spec = InstanceSpec { n: 4, d: 2, target: Target::Nonzero, ..InstanceSpec::new(class, 5) };
            let mut cfg = CampaignConfig::new(spec, 4);
            cfg.mix_zero = class == ClassTag::SumSml;
            let a = run_campaign(&cfg).unwrap();
            assert!(a.all_passed(), "{}", a.to_text());
            cfg.jobs = 2;
            let b = run_campaign(&cfg).unwrap();
            assert_eq!(a.to_text(), b.to_text());
            assert_eq!(a.to_json(), b.to_json());
        }
    }
}
