//! The `verify` and `dump` commands: spec validation, suite dispatch, and
//! the single JSON document each run produces.

use crate::abrr::bd::{parse_triple, BDTriple};
use crate::abrr::{curly_j, invert_dynamical, lambda_genericity, solve_abrr, DynamicalElement, SolverConfig};
use crate::dynqg::DynamicalQG;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalars::{make_field, LambdaParam};
use crate::suite::{abrr_suite, axioms_suite, bd_suite, duality_suite, rank_suite, twist_suite, Pipeline, Suite};
use crate::torus::TorusGroup;
use crate::uqg::{build_uq, CartanDatum, QuantumGroup};
use crate::wha::sample::SampleSpec;
use crate::wha::WeakHopfStructure;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DumpTarget {
    J,
    CurlyJ,
    RLambda,
    HStructure,
    Ranks,
}

impl DumpTarget {
    pub const ALL: [DumpTarget; 5] = [DumpTarget::J, DumpTarget::CurlyJ, DumpTarget::RLambda, DumpTarget::HStructure, DumpTarget::Ranks];
}

impl fmt::Display for DumpTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DumpTarget::J => "J",
            DumpTarget::CurlyJ => "curlyJ",
            DumpTarget::RLambda => "R_lambda",
            DumpTarget::HStructure => "H_structure",
            DumpTarget::Ranks => "ranks",
        })
    }
}

impl FromStr for DumpTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<DumpTarget> {
        DumpTarget::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| Error::InvalidSpec(format!("unknown dump target {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Dump(DumpTarget),
}

/// A run as given on the command line, before validation.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub command: Command,
    pub cartan: String,
    pub ell: u32,
    /// Rationals such as "2" or "3/2"; empty means 2 for every simple root,
    /// a single value is used for every simple root.
    pub lambda: Vec<String>,
    pub triple: Option<String>,
    /// Suite names, or "all".
    pub suites: Vec<String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threshold: usize,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            command: Command::Verify,
            cartan: "A1".into(),
            ell: 3,
            lambda: Vec::new(),
            triple: None,
            suites: vec!["all".into()],
            seed: 0,
            out: None,
            threshold: 512,
        }
    }
}

/// A spec that has passed every check that can be made before building.
#[derive(Clone, Debug)]
pub struct Validated {
    pub datum: CartanDatum,
    pub ell: u32,
    pub lambda: LambdaParam,
    pub triple: Option<BDTriple>,
    pub suites: Vec<Suite>,
    /// Suites dropped from "all" because the type has no quantum group here.
    pub skipped: Vec<Suite>,
    pub sample: SampleSpec,
}

impl Validated {
    /// A1 builds the full quantum group; higher ranks stop at the torus.
    pub fn has_uq(&self) -> bool {
        self.datum.rank() == 1
    }

    fn solver_config(&self) -> SolverConfig {
        SolverConfig { lambda: self.lambda.clone(), triple: self.triple.clone().filter(|t| !t.is_identity()) }
    }

    /// The triple for the bd suite: the one given, else swap in rank 2 and
    /// the identity otherwise.
    fn bd_triple(&self) -> Result<BDTriple> {
        match &self.triple {
            Some(t) => Ok(t.clone()),
            None if self.datum.rank() == 2 => parse_triple(&self.datum, self.ell, "swap"),
            None => parse_triple(&self.datum, self.ell, "id"),
        }
    }
}

fn parse_lambda(values: &[String], rank: usize) -> Result<LambdaParam> {
    let parsed = values
        .iter()
        .map(|s| s.trim().parse::<BigRational>().map_err(|_| Error::InvalidSpec(format!("bad Lambda value {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    match parsed.len() {
        0 => Ok(LambdaParam::constant(rank, 2)),
        1 => LambdaParam::new(vec![parsed[0].clone(); rank]),
        _ => LambdaParam::new(parsed),
    }
}

impl RunSpec {
    pub fn validate(&self) -> Result<Validated> {
        let datum = CartanDatum::by_name(&self.cartan)?;
        make_field(self.ell)?;
        TorusGroup::new(datum.cartan.clone(), self.ell)?;
        let lambda = parse_lambda(&self.lambda, datum.rank())?;
        let triple = self.triple.as_deref().map(|s| parse_triple(&datum, self.ell, s)).transpose()?;
        lambda_genericity(&datum, self.ell, &lambda, triple.as_ref().map_or(1, |t| t.order))?;
        if let Some(t) = &triple {
            t.check_lambda(&lambda)?;
        }
        let has_uq = datum.rank() == 1;
        let all = self.suites.is_empty() || self.suites.iter().any(|s| s == "all");
        let (mut suites, mut skipped) = (Vec::new(), Vec::new());
        if all {
            for s in Suite::ALL {
                if s.needs_uq() && !has_uq {
                    skipped.push(s);
                } else {
                    suites.push(s);
                }
            }
        } else {
            for name in self.suites.iter().flat_map(|s| s.split(',')) {
                let s: Suite = name.trim().parse()?;
                if s.needs_uq() && !has_uq {
                    return Err(Error::UnsupportedType(format!("suite {s} needs the quantum group, available for A1 only")));
                }
                if !suites.contains(&s) {
                    suites.push(s);
                }
            }
            suites.sort();
        }
        if self.threshold == 0 {
            return Err(Error::InvalidSpec("threshold must be positive".into()));
        }
        let sample = SampleSpec { threshold: self.threshold, ..SampleSpec::with_seed(self.seed) };
        Ok(Validated { datum, ell: self.ell, lambda, triple, suites, skipped, sample })
    }

    fn describe(&self) -> Value {
        json!({
            "type": self.cartan,
            "ell": self.ell,
            "lambda": self.lambda,
            "triple": self.triple,
            "suites": self.suites,
            "seed": self.seed,
            "threshold": self.threshold,
        })
    }
}

/// Exit code and the JSON document of one run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub document: Value,
}

impl Outcome {
    fn invalid(spec: &RunSpec, e: &Error) -> Outcome {
        Outcome { exit_code: EXIT_INVALID, document: json!({ "spec": spec.describe(), "status": "invalid", "error": e.to_string() }) }
    }

    /// Writes the document to `path`, or stdout when there is none.
    pub fn emit(&self, path: Option<&PathBuf>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.document).expect("JSON values serialize") + "\n";
        match path {
            Some(p) => std::fs::write(p, text),
            None => {
                use std::io::Write;
                std::io::stdout().write_all(text.as_bytes())
            }
        }
    }
}

/// The document with timing fields removed, for comparing runs.
pub fn canonical(doc: &Value) -> Value {
    match doc {
        Value::Object(m) => Value::Object(m.iter().filter(|(k, _)| k.as_str() != "millis").map(|(k, v)| (k.clone(), canonical(v))).collect()),
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

fn run_suite(s: Suite, v: &Validated, p: Option<&Pipeline>) -> Result<Report> {
    let need = || p.ok_or_else(|| Error::UnsupportedType(format!("suite {s} needs the quantum group")));
    match s {
        Suite::Axioms => axioms_suite(need()?, &v.sample),
        Suite::Twist => twist_suite(need()?, &v.sample),
        Suite::Abrr => abrr_suite(need()?, v.sample.seed),
        Suite::Duality => duality_suite(need()?, &v.sample),
        Suite::Rank => Ok(rank_suite(need()?)?.report),
        Suite::Bd => bd_suite(&v.bd_triple()?, &v.lambda),
    }
}

/// Runs the selected suites. An error inside a suite is recorded as a failed
/// check named `<suite>_error`.
pub fn cmd_verify(spec: &RunSpec) -> Outcome {
    let v = match spec.validate() {
        Ok(v) => v,
        Err(e) => return Outcome::invalid(spec, &e),
    };
    let mut report = Report::new();
    let pipeline = if v.suites.iter().any(|s| s.needs_uq()) {
        match build_uq(&v.datum, v.ell).and_then(|u| Pipeline::build(&u, v.solver_config())) {
            Ok(p) => Some(p),
            Err(e) => return Outcome::invalid(spec, &e),
        }
    } else {
        None
    };
    for &s in &v.suites {
        match run_suite(s, &v, pipeline.as_ref()) {
            Ok(r) => report.extend(r),
            Err(e) => report.record(&format!("{s}_error"), &format!("{}/ell={}", v.datum.name, v.ell), Some(json!({ "error": e.to_string() })), 0),
        }
    }
    report.sort();
    let failed = report.failures().len();
    let exit_code = if report.checks.is_empty() || failed > 0 { EXIT_FAIL } else { EXIT_PASS };
    let document = json!({
        "spec": spec.describe(),
        "suites": v.suites.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "skipped": v.skipped.iter().map(|s| json!({ "suite": s.to_string(), "reason": format!("no quantum group for {}", v.datum.name) })).collect::<Vec<_>>(),
        "summary": { "checks": report.checks.len(), "passed": report.checks.len() - failed, "failed": failed },
        "status": if exit_code == EXIT_PASS { "pass" } else { "fail" },
        "checks": report.checks,
    });
    Outcome { exit_code, document }
}

struct Built {
    u: QuantumGroup,
    j: DynamicalElement,
    jj: DynamicalElement,
}

fn build_j(v: &Validated) -> Result<Built> {
    let u = build_uq(&v.datum, v.ell)?;
    let j = solve_abrr(&u, &v.solver_config())?;
    let jj = curly_j(&u, &j);
    Ok(Built { u, j, jj })
}

/// Z and the degree-one coefficients b_ij(λ), λ ∈ 𝕋_L, of a triple on a
/// type without a quantum group here.
fn dump_torus_level(v: &Validated) -> Result<Value> {
    let tr = v.bd_triple()?;
    tr.check_lambda(&v.lambda)?;
    let t = &tr.torus;
    let z = tr.z()?;
    let mut b = Vec::new();
    for &lam in &tr.t_l.elements {
        let rec = tr.bij_recursion(&v.lambda, lam)?;
        for ((i, j), x) in rec {
            let mut entry = json!({ "lambda": t.vector(lam), "ij": [i, j], "recursion": x.dump(t) });
            if tr.is_automorphism() {
                entry["closed_form"] = serde_json::to_value(tr.bij_closed(&v.lambda, lam, i, j)?.dump(t)).expect("dump serializes");
            }
            b.push(entry);
        }
    }
    Ok(json!({
        "level": "torus",
        "triple": { "gamma1": tr.gamma1, "gamma2": tr.gamma2, "t_map": tr.t_map, "orbits": tr.orbits, "order": tr.order },
        "Z": z.dump(t),
        "b": b,
    }))
}

fn structure_dump(h: &WeakHopfStructure) -> Value {
    let terms = |x: &crate::tensor::SparseTensor| -> Vec<Value> { x.sorted().into_iter().map(|(k, c)| json!({ "labels": k.to_vec(), "coeff": c.to_string() })).collect() };
    let n = h.dim() as crate::tensor::Label;
    let mut mul = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let p = h.mul(&h.basis(a), &h.basis(b));
            if !p.is_zero() {
                mul.push(json!({ "a": a, "b": b, "terms": terms(&p) }));
            }
        }
    }
    json!({
        "name": h.name(),
        "dim": h.dim(),
        "basis": (0..n).map(|l| h.label_name(l)).collect::<Vec<_>>(),
        "unit": terms(&h.one()),
        "mul": mul,
        "comul": (0..n).map(|a| json!({ "a": a, "terms": terms(h.comul_label(a)) })).collect::<Vec<_>>(),
        "counit": (0..n).filter_map(|a| { let c = h.counit_label(a); (!c.is_zero()).then(|| json!({ "a": a, "coeff": c.to_string() })) }).collect::<Vec<_>>(),
        "antipode": (0..n).map(|a| json!({ "a": a, "terms": terms(h.antipode_label(a)) })).collect::<Vec<_>>(),
    })
}

fn dump_value(v: &Validated, what: DumpTarget) -> Result<Value> {
    if !v.has_uq() {
        return match what {
            DumpTarget::J => dump_torus_level(v),
            _ => Err(Error::UnsupportedType(format!("{what} needs the quantum group, available for A1 only"))),
        };
    }
    let b = build_j(v)?;
    let to_value = |x: crate::abrr::DynamicalElementDump| serde_json::to_value(x).expect("dump serializes");
    match what {
        DumpTarget::J => Ok(to_value(b.j.dump(&b.u))),
        DumpTarget::CurlyJ => Ok(to_value(b.jj.dump(&b.u))),
        DumpTarget::RLambda => {
            let jj_inv = invert_dynamical(&b.u, &b.jj)?;
            let dq = DynamicalQG::new(&b.u)?;
            let values = b.u.torus.elements().map(|lam| dq.r_j(&b.jj, &jj_inv, lam)).collect::<Result<Vec<_>>>()?;
            Ok(to_value(DynamicalElement { rank: 2, values }.dump(&b.u)))
        }
        DumpTarget::HStructure => {
            let jj_inv = invert_dynamical(&b.u, &b.jj)?;
            let dq = DynamicalQG::new(&b.u)?;
            Ok(structure_dump(&dq.build_hj(&b.jj, &jj_inv, "H_J")?.algebra))
        }
        DumpTarget::Ranks => {
            let p = Pipeline::build(&b.u, v.solver_config())?;
            let rr = rank_suite(&p)?;
            let mut doc = serde_json::to_value(&rr).expect("rank report serializes");
            doc["report"] = serde_json::to_value(rr.report.canonical()).expect("report serializes");
            Ok(doc)
        }
    }
}

/// Writes one dump. Unbuildable inputs exit 2, like an invalid spec.
pub fn cmd_dump(spec: &RunSpec, what: DumpTarget) -> Outcome {
    let v = match spec.validate() {
        Ok(v) => v,
        Err(e) => return Outcome::invalid(spec, &e),
    };
    match dump_value(&v, what) {
        Ok(data) => Outcome { exit_code: EXIT_PASS, document: json!({ "spec": spec.describe(), "what": what.to_string(), "data": data }) },
        Err(e) => Outcome::invalid(spec, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ell: u32, lambda: &[&str]) -> RunSpec {
        RunSpec { ell, lambda: lambda.iter().map(|s| s.to_string()).collect(), ..RunSpec::default() }
    }

    #[test]
    fn invalid_specs_exit_two() {
        assert_eq!(cmd_verify(&spec(4, &[])).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&spec(1, &[])).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&spec(3, &["1"])).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&spec(3, &["-1"])).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&spec(3, &["0"])).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&spec(3, &["x"])).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&RunSpec { suites: vec!["bogus".into()], ..spec(3, &[]) }).exit_code, EXIT_INVALID);
        assert_eq!(cmd_verify(&RunSpec { cartan: "A2".into(), suites: vec!["axioms".into()], ..spec(5, &[]) }).exit_code, EXIT_INVALID);
        // det A2 = 3 divides ℓ
        assert_eq!(cmd_verify(&RunSpec { cartan: "A2".into(), ..spec(3, &[]) }).exit_code, EXIT_INVALID);
    }

    #[test]
    fn lambda_defaults_and_broadcast() {
        let v = spec(5, &[]).validate().unwrap();
        assert_eq!(v.lambda, LambdaParam::constant(1, 2));
        let v = RunSpec { cartan: "A2".into(), ..spec(5, &["3/2"]) }.validate().unwrap();
        assert_eq!(v.lambda.values().len(), 2);
        assert_eq!(v.skipped.len(), 5);
        assert_eq!(v.suites, vec![Suite::Bd]);
    }

    #[test]
    fn canonical_drops_timings() {
        let doc = json!({ "checks": [{ "check": "a", "millis": 7 }], "millis": 1 });
        assert_eq!(canonical(&doc), json!({ "checks": [{ "check": "a" }] }));
    }

    #[test]
    fn abrr_suite_at_three_is_deterministic() {
        let s = RunSpec { suites: vec!["abrr".into()], ..spec(3, &[]) };
        let (a, b) = (cmd_verify(&s), cmd_verify(&s));
        assert_eq!(a.exit_code, EXIT_PASS, "{}", a.document);
        assert_eq!(canonical(&a.document).to_string(), canonical(&b.document).to_string());
    }

    #[test]
    fn j_dump_has_one_entry_per_lambda() {
        let out = cmd_dump(&spec(3, &[]), DumpTarget::J);
        assert_eq!(out.exit_code, EXIT_PASS);
        let values = out.document["data"]["values"].as_array().unwrap();
        assert_eq!(values.len(), 3);
        // J = Σ_{n<3} (torus factor)·F^n⊗E^n with a torus factor in k𝕋⊗k𝕋
        for v in values {
            let n = v["tensor"]["terms"].as_array().unwrap().len();
            assert!(n > 0 && n <= 3 * 9, "{n}");
        }
    }
}
