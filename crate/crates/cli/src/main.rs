//! `pit`: hitting sets, zero tests and verification campaigns from the command line.
//!
//! Exit codes: 0 success, 1 verdict failure (a miss or a failed campaign), 2 usage, parse or
//! invalid input, 3 capability (a ceiling or the modulus is too small).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pitkit::concentrate::{invertible_hitting_set, invertible_hitting_set_blackbox, width2_hitting_set, width2_hitting_set_blackbox, InvertibleParams};
use pitkit::depth3::{best_gate_order, decompose_base_sets, sum_sml_whitebox_test, width_bound, Partition, SumSmlOptions, Verdict};
use pitkit::io::{load_instance, load_points, save_points, write_points, DecompositionDoc};
use pitkit::isolate::{blackbox_hitting_set, roabp_hitting_set, BlackboxParams, HitMode, IsolateOptions};
use pitkit::kron::DEFAULT_C0;
use pitkit::points::PointSet;
use pitkit::verify::{run_campaign, verify_hitting_property, CampaignConfig, ClassTag, HitVerdict, Instance, InstanceSpec, Target};
use pitkit::{Limits, PitError, Result};

#[derive(Parser, Debug)]
#[command(name = "pit", version, about = "Deterministic polynomial identity testing over prime fields")]
struct Cli {
    /// Override the modulus stored in the input document.
    #[arg(long, global = true)]
    modulus: Option<u64>,
    /// Ceiling for expansions and point sweeps.
    #[arg(long, global = true)]
    ceiling: Option<u64>,
    /// Worker threads for sweeps and campaigns (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HsClass {
    Roabp,
    Invertible,
    Width2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Whitebox,
    Blackbox,
}

impl From<Mode> for HitMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Whitebox => HitMode::Whitebox,
            Mode::Blackbox => HitMode::Blackbox,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WhiteboxTarget {
    SumSml,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a hitting set for a program and write it as a point file.
    Hs {
        class: HsClass,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Whitebox)]
        mode: Mode,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a point file contains a nonzero of the circuit.
    Test {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Whitebox zero test.
    Whitebox {
        target: WhiteboxTarget,
        #[arg(long)]
        input: PathBuf,
    },
    /// Best gate ordering and its distance for a depth-3 circuit.
    Distance {
        #[arg(long)]
        input: PathBuf,
    },
    /// Base-set decomposition of the gate partitions of a depth-3 circuit.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the full expansion, one term per line.
    Expand {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seeded hitting-property campaign.
    Verify {
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 20)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Whitebox)]
        mode: Mode,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        delta: Option<u32>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        mu: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        /// Depth-3 classes: alternate cancelling and nonzero samples.
        #[arg(long)]
        mix_zero: bool,
        /// Also write the machine-readable summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn exit_code(e: &PitError) -> u8 {
    match e {
        PitError::Capability(_) | PitError::ModulusTooSmall(_) => 3,
        PitError::Internal(_) => 1,
        _ => 2,
    }
}

fn limits(cli: &Cli) -> Limits {
    let mut l = Limits::default();
    if let Some(c) = cli.ceiling {
        l.expand_ceiling = c;
        l.sweep_ceiling = c;
    }
    l
}

fn roabp_of(inst: Instance) -> Result<pitkit::roabp::Roabp> {
    match inst {
        Instance::Roabp(r) => Ok(r),
        Instance::Depth3(_) => Err(PitError::Precondition("expected a roabp document, got depth3".into())),
    }
}

fn depth3_of(inst: Instance) -> Result<pitkit::depth3::Depth3Circuit> {
    match inst {
        Instance::Depth3(c) => Ok(c),
        Instance::Roabp(_) => Err(PitError::Precondition("expected a depth3 document, got roabp".into())),
    }
}

fn emit_points(points: &PointSet, out: Option<&PathBuf>, ceiling: u64) -> Result<()> {
    match out {
        Some(p) => save_points(points, p, ceiling),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_points(points, &mut lock, ceiling)?;
            lock.flush().map_err(|e| PitError::Io(e.to_string()))
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let limits = limits(cli);
    let iso = IsolateOptions { limits, ..IsolateOptions::default() };
    match &cli.cmd {
        Cmd::Hs { class, input, mode, out } => {
            let r = roabp_of(load_instance(input, cli.modulus)?.0)?;
            let f = r.field();
            let points = match (class, mode) {
                (HsClass::Roabp, Mode::Whitebox) => roabp_hitting_set(&r, HitMode::Whitebox, &iso)?,
                (HsClass::Roabp, Mode::Blackbox) => blackbox_hitting_set(f, BlackboxParams::of(&r), DEFAULT_C0)?,
                (HsClass::Invertible, Mode::Whitebox) => invertible_hitting_set(&r, &limits, DEFAULT_C0)?,
                (HsClass::Invertible, Mode::Blackbox) => {
                    invertible_hitting_set_blackbox(&f, InvertibleParams::of(&r), DEFAULT_C0, &limits)?
                }
                (HsClass::Width2, Mode::Whitebox) => width2_hitting_set(&r, &limits, DEFAULT_C0)?,
                (HsClass::Width2, Mode::Blackbox) => width2_hitting_set_blackbox(&f, InvertibleParams::of(&r), DEFAULT_C0, &limits)?,
            };
            eprintln!("{} points from {}", points.len(), points.provenance().generator);
            emit_points(&points, out.as_ref(), limits.sweep_ceiling)?;
            Ok(0)
        }
        Cmd::Test { input, points } => {
            let inst = load_instance(input, cli.modulus)?.0;
            let pts = load_points(points)?;
            if pts.ambient() != inst.n() && !pts.is_empty() {
                return Err(PitError::Structural(format!("points have {} coordinates, circuit has {}", pts.ambient(), inst.n())));
            }
            let rep = verify_hitting_property(&inst, &pts, &limits, cli.jobs)?;
            match rep.verdict {
                HitVerdict::VacuousPass => println!("vacuous-pass: the circuit is zero ({} points)", rep.set_size),
                HitVerdict::Pass => println!("pass: witness at index {} of {}", rep.witness_index.unwrap(), rep.set_size),
                HitVerdict::Fail => println!("fail: no witness among {} points", rep.set_size),
            }
            Ok(if rep.verdict == HitVerdict::Fail { 1 } else { 0 })
        }
        Cmd::Whitebox { target: WhiteboxTarget::SumSml, input } => {
            let (inst, names) = load_instance(input, cli.modulus)?;
            let c = depth3_of(inst)?;
            let opts = SumSmlOptions { isolate: iso, ceiling: limits.sweep_ceiling, jobs: cli.jobs };
            let rep = sum_sml_whitebox_test(&c, &opts)?;
            println!("partitions {}", rep.partitions.len());
            println!("base sets {}", rep.decomposition.m());
            println!("coefficient tests {}", rep.coefficient_tests);
            match rep.verdict {
                Verdict::Zero => println!("verdict zero"),
                Verdict::Nonzero => {
                    println!("verdict nonzero");
                    let w = rep.witness.as_ref().expect("nonzero verdicts carry a witness");
                    let coords: Vec<String> = names.iter().zip(w).map(|(n, v)| format!("{n}={v}")).collect();
                    println!("witness {}", coords.join(" "));
                }
            }
            Ok(0)
        }
        Cmd::Distance { input } => {
            let c = depth3_of(load_instance(input, cli.modulus)?.0)?;
            let cert = best_gate_order(&c)?;
            let order: Vec<String> = cert.order.iter().map(|g| (g + 1).to_string()).collect();
            println!("order {}", order.join(" "));
            println!("distance {}", cert.delta);
            println!("width bound {}", width_bound(c.k(), c.n(), cert.delta));
            Ok(0)
        }
        Cmd::Decompose { input, out } => {
            let (inst, names) = load_instance(input, cli.modulus)?;
            let c = depth3_of(inst)?;
            let mut parts: Vec<Partition> = Vec::new();
            for g in 0..c.k() {
                let p = c.gate_partition(g)?;
                if !parts.contains(&p) {
                    parts.push(p);
                }
            }
            if parts.is_empty() {
                parts.push(Partition::singletons(c.n()));
            }
            let doc = DecompositionDoc::new(&decompose_base_sets(&parts)?, &names);
            let text = serde_json::to_string_pretty(&doc).expect("decomposition serializes") + "\n";
            match out {
                Some(p) => std::fs::write(p, text).map_err(|e| PitError::Io(format!("{}: {e}", p.display())))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Expand { input } => {
            let (inst, names) = load_instance(input, cli.modulus)?;
            let p = inst.expand(&limits)?;
            if p.is_zero() {
                println!("0");
            }
            for (e, c) in p.terms() {
                let mono: Vec<String> = e
                    .support()
                    .into_iter()
                    .map(|v| if e.get(v) == 1 { names[v].clone() } else { format!("{}^{}", names[v], e.get(v)) })
                    .collect();
                if mono.is_empty() {
                    println!("{c}");
                } else {
                    println!("{c} {}", mono.join("*"));
                }
            }
            Ok(0)
        }
        Cmd::Verify { class, samples, seed, mode, n, d, w, delta, s, mu, k, c, mix_zero, summary } => {
            let class = ClassTag::parse(class)?;
            let mut spec = InstanceSpec::new(class, *seed);
            spec.target = Target::Nonzero;
            if let Some(m) = cli.modulus {
                spec.modulus = m;
            }
            macro_rules! set {
                ($($f:ident),*) => { $( if let Some(v) = $f { spec.$f = *v; } )* };
            }
            set!(n, d, w, delta, s, mu, k, c);
            let cfg = CampaignConfig { spec, samples: *samples, mode: (*mode).into(), isolate: iso, mix_zero: *mix_zero, jobs: cli.jobs };
            let rep = run_campaign(&cfg)?;
            print!("{}", rep.to_text());
            if let Some(p) = summary {
                std::fs::write(p, rep.to_json() + "\n").map_err(|e| PitError::Io(format!("{}: {e}", p.display())))?;
            }
            Ok(if rep.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build_global();
    if let Err(e) = pool {
        eprintln!("warning: {e}");
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
