//! Spec files, pipelines and certificates behind the `otcert` binary.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ball::Complex;
use crate::embedder::{build_embedding, conjecture_probe, verify_embedding_compat, verify_inclusion, verify_subfield};
use crate::exact::{AlgebraicNumber, IntPolynomial};
use crate::field::{build_field, NumberField};
use crate::form::{semipositivity_survey, verify_ddc, verify_invariance};
use crate::inoue::{compare_with_ot, inoue_from_cubic, inoue_from_matrix, verify_lattice_rank, InoueData, Matrix3};
use crate::ot::{validate, OtData, Sampler};
use crate::precision::{PrecisionPolicy, DEFAULT_BITS};
use crate::units::{admissibility_check, complete_basis, dirichlet_rank_check, log_map, log_sum, unit_search, UnitSystem};
use crate::verdict::Verdict;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Precision of the finite-difference `dd^c` check.
pub const DDC_BITS: usize = 256;
pub const DDC_STEP_EXP: u32 = 40;
pub const DDC_POINTS: usize = 10;
pub const INVARIANCE_WORDS: usize = 100;
pub const LEAF_SAMPLES: usize = 200;
pub const HOMOMORPHISM_PAIRS: usize = 200;

const TRANSLATION_NOTE: &str = "power basis of Z[theta]; a finite-index sublattice of O_K when the two differ";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Signature,
    Units,
    Admissible,
    BuildOt,
    CheckForm,
    Inoue,
    Embed,
    Probe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Signature => "signature",
            Command::Units => "units",
            Command::Admissible => "admissible",
            Command::BuildOt => "build-ot",
            Command::CheckForm => "check-form",
            Command::Inoue => "inoue",
            Command::Embed => "embed",
            Command::Probe => "probe",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub defining: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Union of the inputs every command reads; each command uses a subset.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defining: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PrecisionPolicy>,
    /// Nine integers, row-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub bits: Option<usize>,
    pub trials: usize,
    pub bound: u32,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 0,
            bits: None,
            trials: 1000,
            bound: 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Precision(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{what}: {e}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub evidence: Value,
}

fn check<T: Serialize>(name: &str, verdict: Verdict, evidence: T) -> Check {
    Check {
        name: name.to_string(),
        verdict,
        evidence: serde_json::to_value(evidence).expect("serializable evidence"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub policy: PrecisionPolicy,
    pub inputs: SpecFile,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub data: Value,
}

impl Certificate {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable certificate");
        s.push('\n');
        s
    }
}

pub fn parse_spec(text: &str, origin: &str) -> Result<SpecFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

pub fn read_spec(path: &Path) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_spec(&text, &path.display().to_string())
}

struct Ctx<'a> {
    spec: &'a SpecFile,
    opts: &'a Options,
    policy: PrecisionPolicy,
}

impl Ctx<'_> {
    fn field(&self) -> Result<NumberField, CliError> {
        let (coeffs, label) = match (&self.spec.field, &self.spec.defining) {
            (Some(f), None) => (&f.defining, f.label.clone()),
            (None, Some(d)) => (d, self.spec.label.clone()),
            (Some(_), Some(_)) => return Err(CliError::Input("give either \"field\" or \"defining\", not both".into())),
            (None, None) => return Err(CliError::Input("missing \"defining\" polynomial".into())),
        };
        let p = IntPolynomial::from_strings(coeffs).map_err(input("defining"))?;
        let k = build_field(p, self.policy).map_err(|e| match e {
            crate::field::FieldError::CertificationFailed { .. } => CliError::Precision(e.to_string()),
            e => CliError::Input(format!("defining: {e}")),
        })?;
        Ok(match label {
            Some(l) => k.with_label(l),
            None => k,
        })
    }

    fn element(&self, field: &NumberField, what: &str, coeffs: &[String]) -> Result<AlgebraicNumber, CliError> {
        let p = IntPolynomial::from_strings(coeffs).map_err(input(what))?;
        Ok(field.element(p))
    }

    fn elements(&self, field: &NumberField, what: &str, list: &[Vec<String>]) -> Result<Vec<AlgebraicNumber>, CliError> {
        list.iter()
            .enumerate()
            .map(|(i, c)| self.element(field, &format!("{what}[{i}]"), c))
            .collect()
    }

    fn search(&self, field: &NumberField) -> Vec<AlgebraicNumber> {
        unit_search(field, self.opts.bound, usize::MAX)
    }

    /// Spec units, or a completed admissible system from the unit search.
    fn units(&self, field: &NumberField) -> Result<UnitSystem, CliError> {
        let gens = match &self.spec.units {
            Some(list) => self.elements(field, "units", list)?,
            None => {
                let seed = UnitSystem::new(field, vec![]).map_err(input("units"))?;
                let pool = UnitSystem::new(field, self.search(field)).map_err(input("units"))?;
                complete_basis(&seed, &pool)
                    .map_err(|e| CliError::Input(format!("no admissible system within bound {}: {e}", self.opts.bound)))?
                    .generators()
                    .to_vec()
            }
        };
        UnitSystem::new(field, gens).map_err(input("units"))
    }
}

fn field_data(k: &NumberField) -> Value {
    let roots: Vec<Complex> = k.roots().roots.clone();
    json!({
        "defining": k.defining(),
        "label": k.label(),
        "degree": k.degree(),
        "signature": k.signature(),
        "roots": roots,
        "root_radii": k.roots().radii.iter().map(|r| format!("{r:e}")).collect::<Vec<_>>(),
        "irreducibility": k.irreducibility(),
    })
}

fn residues(gens: &[AlgebraicNumber]) -> Vec<Vec<String>> {
    gens.iter().map(|g| g.residue().to_strings()).collect()
}

fn inoue_checks(d: &InoueData, checks: &mut Vec<Check>) {
    let tol = 10.0 * d.tolerance;
    checks.push(check(
        "unimodularity",
        Verdict::from_bool(d.unimodularity_residual_f64 < tol),
        json!({ "residual": d.unimodularity_residual, "bound": format!("{tol:e}") }),
    ));
    let lr = verify_lattice_rank(d);
    checks.push(check("lattice-rank", lr.verdict, &lr));
}

/// Runs one command and assembles its certificate.
pub fn run(command: Command, spec: &SpecFile, opts: &Options) -> Result<Certificate, CliError> {
    let policy = match (opts.bits, spec.policy) {
        (Some(b), _) => PrecisionPolicy::with_bits(b),
        (None, Some(p)) => p,
        (None, None) => PrecisionPolicy::with_bits(DEFAULT_BITS),
    };
    let ctx = Ctx { spec, opts, policy };
    let seed = opts.seed;
    let mut checks = Vec::new();
    let data = match command {
        Command::Signature => {
            let k = ctx.field()?;
            let (s, t) = k.signature();
            checks.push(check("signature", Verdict::Pass, json!({ "s": s, "t": t })));
            let irr = k.irreducibility();
            let v = if irr.is_proven() { Verdict::Pass } else { Verdict::Inconclusive };
            checks.push(check("irreducibility", v, irr));
            field_data(&k)
        }
        Command::Units => {
            let k = ctx.field()?;
            let gens = match &spec.units {
                Some(list) => ctx.elements(&k, "units", list)?,
                None => ctx.search(&k),
            };
            let us = UnitSystem::new(&k, gens).map_err(input("units"))?;
            let tol = policy.tolerance();
            let sums: Vec<String> = us.log_matrix().iter().map(|r| log_sum(r).interval_string()).collect();
            let ok = us.max_log_sum() < tol;
            checks.push(check(
                "log-sum",
                Verdict::from_bool(ok),
                json!({ "max_abs": format!("{:e}", us.max_log_sum()), "tolerance": format!("{tol:e}") }),
            ));
            let rank = dirichlet_rank_check(&us);
            checks.push(check("dirichlet-rank", rank.verdict, &rank));
            let logs: Vec<Value> = us
                .generators()
                .iter()
                .map(|g| serde_json::to_value(log_map(&k, g).expect("unit")).expect("serializable"))
                .collect();
            json!({
                "field": field_data(&k),
                "units": residues(us.generators()),
                "log_maps": logs,
                "log_sums": sums,
                "totally_positive": us.positivity_flags(),
            })
        }
        Command::Admissible => {
            let k = ctx.field()?;
            let us = ctx.units(&k)?;
            let cert = admissibility_check(&us);
            checks.push(check("admissibility", cert.verdict(), &cert));
            json!({
                "signature": k.signature(),
                "units": residues(us.generators()),
                "rank_record": "determinant bound of the first-s log projection only",
            })
        }
        Command::BuildOt => {
            let k = ctx.field()?;
            if !k.is_ot_eligible() {
                return Err(CliError::Input(format!("signature {:?} needs s > 0 and t > 0", k.signature())));
            }
            let us = ctx.units(&k)?;
            let ot = OtData::unchecked(us).map_err(input("units"))?;
            let b = validate(&ot, opts.trials, LEAF_SAMPLES, seed).map_err(input("build-ot"))?;
            checks.push(check("admissibility", b.admissibility.verdict(), &b.admissibility));
            checks.push(check("dirichlet-rank", b.rank.verdict, &b.rank));
            if let Some(c) = &b.compatibility {
                checks.push(check("action-compat", c.verdict, c));
            }
            checks.push(check("leaf-disjointness", b.leaves.verdict, &b.leaves));
            json!({
                "signature": k.signature(),
                "units": residues(ot.units().generators()),
                "translation_basis": residues(&ot.translation_basis()),
                "translation_lattice": TRANSLATION_NOTE,
            })
        }
        Command::CheckForm => {
            let k = ctx.field()?;
            let us = ctx.units(&k)?;
            let ot = OtData::unchecked(us).map_err(input("units"))?;
            let fine = k
                .with_policy(PrecisionPolicy::with_bits(policy.working_bits.max(DDC_BITS)))
                .map_err(|e| CliError::Precision(e.to_string()))?;
            let mut rng = Sampler::new(seed);
            let mut worst = Verdict::Pass;
            let mut reports = Vec::new();
            for _ in 0..DDC_POINTS {
                let z = rng.point(&fine);
                let r = verify_ddc(&fine, &z, DDC_STEP_EXP, 2f64.powi(-30)).map_err(input("check-form"))?;
                worst = worst.combine(r.verdict);
                reports.push(json!({
                    "relative_error": r.relative_error,
                    "truncation_estimate": r.truncation_estimate,
                    "rounding_estimate": r.rounding_estimate,
                }));
            }
            checks.push(check(
                "ddc",
                worst,
                json!({ "bits": fine.policy().working_bits, "step_exp": DDC_STEP_EXP, "threshold": format!("{:e}", 2f64.powi(-30)), "points": reports }),
            ));
            let inv = verify_invariance(&ot, INVARIANCE_WORDS, seed).map_err(input("check-form"))?;
            checks.push(check("invariance", inv.verdict, &inv));
            let semi = semipositivity_survey(&k, opts.trials, seed, policy.tolerance()).map_err(input("check-form"))?;
            checks.push(check("semipositivity", semi.verdict, &semi));
            json!({
                "signature": k.signature(),
                "kernel_dimension": k.t(),
                "units": residues(ot.units().generators()),
                "scope": "invariance checked on the universal cover; the quotient is not modeled",
                "translation_lattice": TRANSLATION_NOTE,
            })
        }
        Command::Inoue => match (&spec.matrix, &spec.unit) {
            (Some(m), None) => {
                if m.len() != 9 {
                    return Err(CliError::Input(format!("matrix: expected 9 integers, got {}", m.len())));
                }
                let mat: Matrix3 = std::array::from_fn(|i| std::array::from_fn(|j| m[3 * i + j]));
                match inoue_from_matrix(&mat, policy) {
                    Ok(d) => {
                        checks.push(check("inoue-type", Verdict::Pass, json!({})));
                        inoue_checks(&d, &mut checks);
                        serde_json::to_value(&d).expect("serializable")
                    }
                    Err(e) => {
                        checks.push(check("inoue-type", Verdict::Fail, json!({ "reason": e.to_string() })));
                        Value::Null
                    }
                }
            }
            (None, Some(u)) => {
                let k = ctx.field()?;
                let u = ctx.element(&k, "unit", u)?;
                match inoue_from_cubic(&k, &u) {
                    Ok(d) => {
                        checks.push(check("inoue-type", Verdict::Pass, json!({})));
                        inoue_checks(&d, &mut checks);
                        let agree = compare_with_ot(&k, &u, opts.trials, seed).map_err(input("inoue"))?;
                        checks.push(check("ot-agreement", agree.verdict, &agree));
                        serde_json::to_value(&d).expect("serializable")
                    }
                    Err(e) => {
                        checks.push(check("inoue-type", Verdict::Fail, json!({ "reason": e.to_string() })));
                        Value::Null
                    }
                }
            }
            _ => return Err(CliError::Input("inoue needs exactly one of \"matrix\" or \"unit\"".into())),
        },
        Command::Embed => {
            let k = ctx.field()?;
            let eta = spec.eta.as_ref().ok_or_else(|| CliError::Input("missing \"eta\"".into()))?;
            let eta = ctx.element(&k, "eta", eta)?;
            let w = verify_subfield(&k, &eta).map_err(input("eta"))?;
            checks.push(check("subfield-signature", Verdict::from_bool(w.embeddable), w.summary()));
            if w.embeddable {
                let pool = match &spec.pool {
                    Some(list) => ctx.elements(&k, "pool", list)?,
                    None => ctx.search(&k),
                };
                let pool = UnitSystem::new(&k, pool).map_err(input("pool"))?;
                match build_embedding(&k, &w, &pool) {
                    Ok(e) => {
                        let hom = verify_inclusion(&e, HOMOMORPHISM_PAIRS, seed).map_err(input("embed"))?;
                        checks.push(check("inclusion-homomorphism", hom.verdict, &hom));
                        checks.push(check("holomorphic", Verdict::from_bool(e.is_holomorphic()), &e.map_spec));
                        let adm = admissibility_check(&e.big_units);
                        checks.push(check("admissibility", adm.verdict(), &adm));
                        let ot = OtData::unchecked(e.big_units.clone()).map_err(input("embed"))?;
                        let compat = verify_embedding_compat(&e, &ot, opts.trials, seed).map_err(input("embed"))?;
                        checks.push(check("embedding-compat", compat.verdict, &compat));
                        let inoue = inoue_from_cubic(&e.witness.k1, &e.u1);
                        checks.push(check(
                            "subfield-inoue",
                            Verdict::from_bool(inoue.is_ok()),
                            json!({ "error": inoue.err().map(|e| e.to_string()) }),
                        ));
                        json!({ "embedding": e.summary(), "injectivity": "unverified" })
                    }
                    Err(err) => {
                        checks.push(check("embedding", Verdict::Fail, json!({ "reason": err.to_string() })));
                        Value::Null
                    }
                }
            } else {
                Value::Null
            }
        }
        Command::Probe => {
            let k = ctx.field()?;
            let list = spec.candidates.clone().unwrap_or_default();
            let cands = ctx.elements(&k, "candidates", &list)?;
            let report = conjecture_probe(&k, &cands);
            checks.push(check("probe", Verdict::Pass, json!({ "hits": report.hits })));
            serde_json::to_value(&report).expect("serializable")
        }
    };
    let verdict = Verdict::all(checks.iter().map(|c| c.verdict));
    Ok(Certificate {
        command: command.name().to_string(),
        version: VERSION.to_string(),
        seed,
        policy,
        inputs: spec.clone(),
        checks,
        verdict,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SpecFile {
        parse_spec(text, "test").unwrap()
    }

    #[test]
    fn malformed_spec_reports_location() {
        let err = parse_spec("{\n  \"defining\": [1, 2]\n}", "f.json").unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_spec("{\"bogus\": 1}", "f.json").is_err());
    }

    #[test]
    fn signature_certificate() {
        let s = spec(r#"{"defining": ["-1", "-1", "0", "1"], "label": "plastic"}"#);
        let c = run(Command::Signature, &s, &Options::default()).unwrap();
        assert_eq!(c.exit_code(), 0);
        assert_eq!(c.checks[0].evidence, json!({ "s": 1, "t": 1 }));
    }

    #[test]
    fn reducible_input_is_inconclusive() {
        let s = spec(r#"{"defining": ["4", "0", "0", "0", "1"]}"#);
        assert_eq!(run(Command::Signature, &s, &Options::default()).unwrap().exit_code(), 2);
    }

    #[test]
    fn trivial_generator_fails_build() {
        let s = spec(r#"{"defining": ["-1", "-1", "0", "1"], "units": [["1"]]}"#);
        let opts = Options {
            trials: 10,
            ..Options::default()
        };
        let c = run(Command::BuildOt, &s, &opts).unwrap();
        assert_eq!(c.exit_code(), 1);
        assert_eq!(c.checks[0].verdict, Verdict::Fail);
    }

    #[test]
    fn invalid_field_is_input_error() {
        let s = spec(r#"{"defining": ["1", "0", "2"]}"#);
        assert_eq!(run(Command::Signature, &s, &Options::default()).unwrap_err().exit_code(), 3);
        let s = spec(r#"{"matrix": [1, 2, 3]}"#);
        assert_eq!(run(Command::Inoue, &s, &Options::default()).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn inoue_rejection_is_fail() {
        let s = spec(r#"{"matrix": [1, 0, 0, 0, 1, 0, 0, 0, 1]}"#);
        assert_eq!(run(Command::Inoue, &s, &Options::default()).unwrap().exit_code(), 1);
    }

    #[test]
    fn certificates_are_deterministic() {
        let s = spec(r#"{"defining": ["-1", "-1", "0", "1"], "units": [["0", "1"]]}"#);
        let opts = Options {
            trials: 20,
            ..Options::default()
        };
        let a = run(Command::BuildOt, &s, &opts).unwrap().to_json();
        let b = run(Command::BuildOt, &s, &opts).unwrap().to_json();
        assert_eq!(a, b);
    }
}
