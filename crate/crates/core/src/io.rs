//! Circuit documents (JSON) and point-set files.
//!
//! A circuit document names its variables once and refers to them by name everywhere else:
//!
//! ```json
//! { "format": 1, "modulus": 10007, "kind": "roabp", "variables": ["x1", "x2"],
//!   "width": 1, "blocks": [["x1"], ["x2"]],
//!   "layers": [[{"exponents": {"x1": 1}, "matrix": [[1]]}], [{"exponents": {"x2": 1}, "matrix": [[1]]}]],
//!   "left": {"block": [], "entries": [[{"exponents": {}, "coeff": 1}]]},
//!   "right": {"block": [], "entries": [[{"exponents": {}, "coeff": 1}]]} }
//! ```
//!
//! Depth-3 documents carry `"gates": [{"scale": a, "forms": [{"const": b0, "coeffs": {"x1": b1}}]}]`
//! instead. Saving canonicalizes: residues reduced, zero terms dropped, terms in monomial
//! order, object keys sorted.
//!
//! Point files are `#`-prefixed header lines (`# generator ...`, `# param key=value`,
//! `# ambient n`, `# size N`) followed by one comma-separated point per line.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{ExponentVector, Field, Mat, MatPoly, ScalarPoly};
use crate::depth3::{BaseSetDecomposition, Depth3Circuit, Gate, LinearForm};
use crate::error::{PitError, Result};
use crate::points::{PointSet, Provenance};
use crate::roabp::Roabp;
use crate::verify::Instance;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatTerm {
    pub exponents: BTreeMap<String, u32>,
    pub matrix: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarTerm {
    pub exponents: BTreeMap<String, u32>,
    pub coeff: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub block: Vec<String>,
    /// One polynomial per lane.
    pub entries: Vec<Vec<ScalarTerm>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDoc {
    #[serde(rename = "const")]
    pub constant: u64,
    pub coeffs: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDoc {
    pub scale: u64,
    pub forms: Vec<FormDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Body {
    Roabp { width: usize, blocks: Vec<Vec<String>>, layers: Vec<Vec<MatTerm>>, left: Boundary, right: Boundary },
    Depth3 { gates: Vec<GateDoc> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub format: u32,
    pub modulus: u64,
    pub variables: Vec<String>,
    #[serde(flatten)]
    pub body: Body,
}

struct Names<'a> {
    index: HashMap<&'a str, usize>,
    n: usize,
}

impl<'a> Names<'a> {
    fn new(vars: &'a [String]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() {
                return Err(PitError::Parse(format!("variables[{i}]: empty name")));
            }
            if index.insert(v.as_str(), i).is_some() {
                return Err(PitError::Invariant(format!("variable {v} declared twice")));
            }
        }
        Ok(Names { index, n: vars.len() })
    }

    fn var(&self, name: &str, at: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| PitError::Parse(format!("{at}: undeclared variable {name:?}")))
    }

    fn exponents(&self, e: &BTreeMap<String, u32>, at: &str) -> Result<ExponentVector> {
        let mut x = ExponentVector::zeros(self.n);
        for (name, &k) in e {
            x.set(self.var(name, at)?, k);
        }
        Ok(x)
    }

    fn block(&self, b: &[String], at: &str) -> Result<Vec<usize>> {
        b.iter().map(|name| self.var(name, at)).collect()
    }
}

fn scalar_poly(f: Field, names: &Names, terms: &[ScalarTerm], at: &str) -> Result<ScalarPoly> {
    let ts = terms
        .iter()
        .enumerate()
        .map(|(i, t)| Ok((names.exponents(&t.exponents, &format!("{at}[{i}].exponents"))?, t.coeff)))
        .collect::<Result<Vec<_>>>()?;
    ScalarPoly::from_terms(f, names.n, ts)
}

impl CircuitFile {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: CircuitFile = serde_json::from_str(text)
            .map_err(|e| PitError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        if doc.format != FORMAT_VERSION {
            return Err(PitError::Parse(format!("format: unsupported version {} (expected {FORMAT_VERSION})", doc.format)));
        }
        Ok(doc)
    }

    /// Validates everything and builds the instance. `modulus` overrides the document's.
    pub fn to_instance(&self, modulus: Option<u64>) -> Result<Instance> {
        let f = Field::new(modulus.unwrap_or(self.modulus))?;
        let names = Names::new(&self.variables)?;
        let n = names.n;
        match &self.body {
            Body::Roabp { width, blocks, layers, left, right } => {
                let w = *width;
                if w == 0 {
                    return Err(PitError::Structural("width: must be at least 1".into()));
                }
                let blocks =
                    blocks.iter().enumerate().map(|(i, b)| names.block(b, &format!("blocks[{i}]"))).collect::<Result<Vec<_>>>()?;
                let lb = names.block(&left.block, "left.block")?;
                let rb = names.block(&right.block, "right.block")?;
                let mut owner: HashMap<usize, String> = HashMap::new();
                let labelled = std::iter::once(("the left boundary".to_string(), &lb))
                    .chain(blocks.iter().enumerate().map(|(i, b)| (format!("block {}", i + 1), b)))
                    .chain(std::iter::once(("the right boundary".to_string(), &rb)));
                for (label, b) in labelled {
                    for &v in b {
                        if let Some(prev) = owner.insert(v, label.clone()) {
                            return Err(PitError::Invariant(format!(
                                "blocks not disjoint: {} in {prev} and {label}",
                                self.variables[v]
                            )));
                        }
                    }
                }
                if layers.len() != blocks.len() {
                    return Err(PitError::Structural(format!("layers: {} layers for {} blocks", layers.len(), blocks.len())));
                }
                let mut mats = Vec::with_capacity(layers.len());
                for (i, terms) in layers.iter().enumerate() {
                    let mut ts = Vec::with_capacity(terms.len());
                    for (j, t) in terms.iter().enumerate() {
                        let at = format!("layers[{i}][{j}]");
                        if t.matrix.len() != w || t.matrix.iter().any(|r| r.len() != w) {
                            return Err(PitError::Structural(format!("{at}.matrix: expected {w}x{w}")));
                        }
                        let rows: Vec<Vec<u64>> = t.matrix.iter().map(|r| r.iter().map(|&x| f.reduce(x)).collect()).collect();
                        ts.push((names.exponents(&t.exponents, &format!("{at}.exponents"))?, Mat::from_rows(&rows)));
                    }
                    mats.push(MatPoly::from_terms(f, n, w, ts)?);
                }
                let vecs = |b: &Boundary, side: &str| -> Result<Vec<ScalarPoly>> {
                    if b.entries.len() != w {
                        return Err(PitError::Structural(format!("{side}.entries: {} entries for width {w}", b.entries.len())));
                    }
                    b.entries.iter().enumerate().map(|(a, t)| scalar_poly(f, &names, t, &format!("{side}.entries[{a}]"))).collect()
                };
                let (lv, rv) = (vecs(left, "left")?, vecs(right, "right")?);
                Ok(Instance::Roabp(Roabp::new(f, n, w, blocks, mats, lb, lv, rb, rv)?))
            }
            Body::Depth3 { gates } => {
                let mut gs = Vec::with_capacity(gates.len());
                for (i, g) in gates.iter().enumerate() {
                    let forms = g
                        .forms
                        .iter()
                        .enumerate()
                        .map(|(j, l)| {
                            let at = format!("gates[{i}].forms[{j}].coeffs");
                            let coeffs = l.coeffs.iter().map(|(name, &c)| Ok((names.var(name, &at)?, c))).collect::<Result<Vec<_>>>()?;
                            Ok(LinearForm::new(&f, l.constant, coeffs))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    gs.push(Gate::new(g.scale, forms));
                }
                Ok(Instance::Depth3(Depth3Circuit::new(f, n, gs)?))
            }
        }
    }

    /// Canonical document for an instance; variables are named `x1..xn` unless `names` is given.
    pub fn from_instance(inst: &Instance, names: Option<&[String]>) -> Result<Self> {
        let n = inst.n();
        let variables: Vec<String> = match names {
            Some(v) if v.len() == n => v.to_vec(),
            Some(v) => return Err(PitError::Structural(format!("{} names for {n} variables", v.len()))),
            None => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        let name_block = |b: &[usize]| b.iter().map(|&v| variables[v].clone()).collect::<Vec<_>>();
        let exps = |e: &ExponentVector| e.support().into_iter().map(|v| (variables[v].clone(), e.get(v))).collect::<BTreeMap<_, _>>();
        let body = match inst {
            Instance::Roabp(r) => {
                let w = r.width();
                let boundary = |block: &[usize], v: &[ScalarPoly]| Boundary {
                    block: name_block(block),
                    entries: v.iter().map(|q| q.terms().map(|(e, c)| ScalarTerm { exponents: exps(e), coeff: c }).collect()).collect(),
                };
                Body::Roabp {
                    width: w,
                    blocks: r.blocks().iter().map(|b| name_block(b)).collect(),
                    layers: r
                        .layers()
                        .iter()
                        .map(|l| {
                            l.terms()
                                .map(|(e, m)| MatTerm {
                                    exponents: exps(e),
                                    matrix: (0..w).map(|a| (0..w).map(|b| m.get(a, b)).collect()).collect(),
                                })
                                .collect()
                        })
                        .collect(),
                    left: boundary(r.left_block(), r.left()),
                    right: boundary(r.right_block(), r.right()),
                }
            }
            Instance::Depth3(c) => Body::Depth3 {
                gates: c
                    .gates()
                    .iter()
                    .map(|g| GateDoc {
                        scale: g.scale,
                        forms: g
                            .forms
                            .iter()
                            .map(|l| FormDoc {
                                constant: l.constant,
                                coeffs: l.coeffs.iter().map(|(&v, &c)| (variables[v].clone(), c)).collect(),
                            })
                            .collect(),
                    })
                    .collect(),
            },
        };
        Ok(CircuitFile { format: FORMAT_VERSION, modulus: inst.field().modulus(), variables, body })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

fn io_err(path: &Path, e: std::io::Error) -> PitError {
    PitError::Io(format!("{}: {e}", path.display()))
}

/// Reads and validates a circuit document; returns the instance and its variable names.
pub fn load_instance(path: &Path, modulus: Option<u64>) -> Result<(Instance, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc = CircuitFile::parse(&text)?;
    Ok((doc.to_instance(modulus)?, doc.variables.clone()))
}

pub fn save_instance(inst: &Instance, names: Option<&[String]>, path: &Path) -> Result<()> {
    let doc = CircuitFile::from_instance(inst, names)?;
    fs::write(path, doc.to_json()).map_err(|e| io_err(path, e))
}

/// Header plus one line per point; refuses sets longer than `ceiling`.
pub fn write_points(points: &PointSet, out: &mut impl Write, ceiling: u64) -> Result<()> {
    if points.len() > ceiling as u128 {
        return Err(PitError::Capability(format!("point set has {} points, above the ceiling {ceiling}", points.len())));
    }
    let e = |e: std::io::Error| PitError::Io(e.to_string());
    let prov = points.provenance();
    writeln!(out, "# generator {}", prov.generator).map_err(e)?;
    for (k, v) in &prov.params {
        writeln!(out, "# param {k}={v}").map_err(e)?;
    }
    writeln!(out, "# ambient {}", points.ambient()).map_err(e)?;
    writeln!(out, "# size {}", points.len()).map_err(e)?;
    for p in points.iter() {
        let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", line.join(",")).map_err(e)?;
    }
    Ok(())
}

pub fn save_points(points: &PointSet, path: &Path, ceiling: u64) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write_points(points, &mut w, ceiling)?;
    w.flush().map_err(|e| io_err(path, e))
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut prov = Provenance::new("file");
    let mut ambient: Option<usize> = None;
    let mut declared: Option<u128> = None;
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let at = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let h = h.trim();
            let (key, rest) = h.split_once(' ').unwrap_or((h, ""));
            let num = |s: &str| s.trim().parse::<u128>().map_err(|_| PitError::Parse(format!("line {at}: bad number {s:?}")));
            match key {
                "generator" => prov.generator = rest.trim().to_string(),
                "param" => {
                    let (k, v) = rest.split_once('=').ok_or_else(|| PitError::Parse(format!("line {at}: param without '='")))?;
                    prov = prov.with(k.trim(), v.trim());
                }
                "ambient" => ambient = Some(num(rest)? as usize),
                "size" => declared = Some(num(rest)?),
                _ => {}
            }
            continue;
        }
        let p = line
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|_| PitError::Parse(format!("line {at}: bad residue {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        pts.push(p);
    }
    let n = ambient.or_else(|| pts.first().map(|p| p.len())).unwrap_or(0);
    if let Some(d) = declared {
        if d != pts.len() as u128 {
            return Err(PitError::Parse(format!("header declares {d} points but the file has {}", pts.len())));
        }
    }
    PointSet::explicit(n, pts, prov)
}

pub fn load_points(path: &Path) -> Result<PointSet> {
    parse_points(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseSetDoc {
    pub variables: Vec<String>,
    /// Gate-partition indices in certificate order.
    pub order: Vec<usize>,
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub c: usize,
    pub n: usize,
    pub m: usize,
    pub cap: f64,
    pub within_cap: bool,
    pub sets: Vec<BaseSetDoc>,
}

impl DecompositionDoc {
    pub fn new(d: &BaseSetDecomposition, names: &[String]) -> Self {
        DecompositionDoc {
            c: d.c,
            n: d.n,
            m: d.m(),
            cap: d.cap,
            within_cap: d.within_cap(),
            sets: d
                .sets
                .iter()
                .map(|s| BaseSetDoc {
                    variables: s.vars.iter().map(|&v| names[v].clone()).collect(),
                    order: s.order.clone(),
                    distance: s.distance,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WIDTH1: &str = r#"{ "format": 1, "modulus": 10007, "kind": "roabp", "variables": ["x1", "x2"],
        "width": 1, "blocks": [["x1"], ["x2"]],
        "layers": [[{"exponents": {"x1": 1}, "matrix": [[1]]}], [{"exponents": {"x2": 1}, "matrix": [[1]]}]],
        "left": {"block": [], "entries": [[{"exponents": {}, "coeff": 1}]]},
        "right": {"block": [], "entries": [[{"exponents": {}, "coeff": 1}]]} }"#;

    #[test]
    fn minimal_width1_document() {
        let inst = CircuitFile::parse(WIDTH1).unwrap().to_instance(None).unwrap();
        assert_eq!(inst.evaluate(&[2, 3]).unwrap(), 6);
    }

    #[test]
    fn overlapping_blocks_are_named() {
        let text = WIDTH1.replace(r#""blocks": [["x1"], ["x2"]]"#, r#""blocks": [["x1", "x2"], ["x2"]]"#);
        let err = CircuitFile::parse(&text).unwrap().to_instance(None).unwrap_err();
        assert_eq!(err, PitError::Invariant("blocks not disjoint: x2 in block 1 and block 2".into()));
    }

    #[test]
    fn parse_errors_carry_locations() {
        let err = CircuitFile::parse("{\n \"format\": 1,\n \"modulus\": }").unwrap_err();
        assert!(matches!(&err, PitError::Parse(m) if m.starts_with("line 3")), "{err}");
        let text = WIDTH1.replace(r#"{"exponents": {"x2": 1}"#, r#"{"exponents": {"y": 1}"#);
        let err = CircuitFile::parse(&text).unwrap().to_instance(None).unwrap_err();
        assert_eq!(err, PitError::Parse("layers[1][0].exponents: undeclared variable \"y\"".into()));
        let text = WIDTH1.replace(r#""variables": ["x1", "x2"]"#, r#""variables": ["x1", "x1"]"#);
        assert!(matches!(CircuitFile::parse(&text).unwrap().to_instance(None), Err(PitError::Invariant(_))));
    }

    #[test]
    fn canonical_round_trip() {
        let inst = CircuitFile::parse(WIDTH1).unwrap().to_instance(None).unwrap();
        let a = CircuitFile::from_instance(&inst, None).unwrap().to_json();
        let back = CircuitFile::parse(&a).unwrap().to_instance(None).unwrap();
        assert_eq!(back, inst);
        assert_eq!(CircuitFile::from_instance(&back, None).unwrap().to_json(), a);
    }

    #[test]
    fn point_files() {
        let empty = PointSet::explicit(3, vec![], Provenance::new("none")).unwrap();
        let mut buf = Vec::new();
        write_points(&empty, &mut buf, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert_eq!(parse_points(&text).unwrap().len(), 0);

        let one = PointSet::explicit(3, vec![vec![1, 2, 3]], Provenance::new("g").with("size", 1)).unwrap();
        let mut buf = Vec::new();
        write_points(&one, &mut buf, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec!["1,2,3"]);
        let back = parse_points(&text).unwrap();
        assert_eq!(back.provenance(), one.provenance());
        assert_eq!(back.point(0), vec![1, 2, 3]);
    }
}
