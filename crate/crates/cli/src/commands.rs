//! The five subcommands. Each returns an [`Outcome`]: an exit code, a
//! human-readable report and the output document with a `certificate`.

use std::sync::Arc;

use coxmap::coxring::ToricCoxRing;
use coxmap::descriptions::{
    construct_description, CoxDescription, DescriptionError, DivisorDiagnosis, DivisorStatus, FactorIssue,
    HomogeneityDefect, HomogeneityReport,
};
use coxmap::oracle::{evaluate_description, orbit_deviation, sample_agreement, DEFAULT_TOL};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::document::{rational_strings, InputError, ProblemDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub trust_factors: bool,
    pub point: Option<String>,
}

#[derive(Clone, Debug, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Complete,
    Construct,
    Eval,
    VerifyIdeal,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Complete => "complete",
            Command::Construct => "construct",
            Command::Eval => "eval",
            Command::VerifyIdeal => "verify-ideal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub document: Option<ProblemDocument>,
}

impl Outcome {
    fn input_error(e: InputError) -> Self {
        Outcome {
            code: EXIT_INPUT,
            report: format!("error: {e}\n"),
            document: None,
        }
    }
}

struct Settings {
    tol: f64,
    samples: usize,
    seed: u64,
    trust_factors: bool,
}

fn settings(doc: &ProblemDocument, opts: &RunOptions) -> Settings {
    let d = doc.options.clone().unwrap_or_default();
    Settings {
        tol: opts.tol.or(d.tol).unwrap_or(DEFAULT_TOL),
        samples: opts.samples.or(d.samples).unwrap_or(0),
        seed: opts.seed.or(d.seed).unwrap_or(0),
        trust_factors: opts.trust_factors || d.trust_factors.unwrap_or(false),
    }
}

/// Accumulates the report text and certificate for one run.
struct Run {
    report: String,
    cert: Map<String, Value>,
    conditions: Map<String, Value>,
    ok: bool,
}

impl Run {
    fn new(cmd: Command) -> Self {
        let mut cert = Map::new();
        cert.insert("command".into(), json!(cmd.name()));
        Run {
            report: String::new(),
            cert,
            conditions: Map::new(),
            ok: true,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.report.push_str(s.as_ref());
        self.report.push('\n');
    }

    fn condition(&mut self, name: &str, passed: bool, detail: Value) {
        self.ok &= passed;
        let mut entry = Map::new();
        entry.insert("passed".into(), json!(passed));
        if !detail.is_null() {
            entry.insert("detail".into(), detail);
        }
        self.conditions.insert(name.into(), Value::Object(entry));
    }

    fn finish(mut self, mut doc: ProblemDocument) -> Outcome {
        self.cert.insert("status".into(), json!(if self.ok { "pass" } else { "fail" }));
        if !self.conditions.is_empty() {
            self.cert.insert("conditions".into(), Value::Object(self.conditions));
        }
        doc.certificate = Some(Value::Object(self.cert));
        Outcome {
            code: if self.ok { EXIT_OK } else { EXIT_VIOLATION },
            report: self.report,
            document: Some(doc),
        }
    }
}

pub fn run(cmd: Command, doc: &ProblemDocument, opts: &RunOptions) -> Outcome {
    match run_inner(cmd, doc, opts) {
        Ok(o) => o,
        Err(e) => Outcome::input_error(e),
    }
}

fn run_inner(cmd: Command, doc: &ProblemDocument, opts: &RunOptions) -> Result<Outcome, InputError> {
    let set = settings(doc, opts);
    let (source, target) = doc.rings()?;
    let mut out = doc.clone();
    out.certificate = None;
    let mut run = Run::new(cmd);

    let phi = if cmd == Command::Construct {
        let cm = doc
            .character_map(&source)?
            .ok_or(InputError::Missing("character_map"))?;
        match construct_description(source.clone(), target.clone(), &cm) {
            Ok(d) => d,
            Err(e @ DescriptionError::InconsistentCharacterData { .. })
            | Err(e @ DescriptionError::UnrepresentableSign) => {
                run.line(format!("construct: failed: {e}"));
                run.condition("construct", false, json!(e.to_string()));
                return Ok(run.finish(out));
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        match doc.description(&source, &target)? {
            Ok(d) => d,
            Err(DescriptionError::ZeroConeNotInFan(r)) => {
                run.line(format!("zero cone: FAIL (R = {} is not a cone of the target fan)", set_text(&r)));
                run.condition("zero_cone", false, json!(r));
                return Ok(run.finish(out));
            }
            Err(e) => return Err(e.into()),
        }
    };

    if !set.trust_factors && cmd != Command::Construct {
        sanity(&phi)?;
    }
    run.line(format!("zero cone: ok (R = {})", set_text(phi.zero_set())));
    run.condition("zero_cone", true, json!(phi.zero_set()));

    match cmd {
        Command::Check => check(&mut run, &phi, &set, doc)?,
        Command::Complete | Command::Construct => {
            if cmd == Command::Construct {
                run.line(format!("constructed: ({})", phi.image_strings().join(", ")));
                run.cert.insert("constructed".into(), json!(phi.image_strings()));
            }
            if conditions(&mut run, &phi)? {
                gather_completion(&mut run, &phi, &mut out)?;
            }
        }
        Command::Eval => eval(&mut run, &phi, &set, doc, opts)?,
        Command::VerifyIdeal => verify_ideal(&mut run, &phi, doc)?,
    }
    Ok(run.finish(out))
}

fn set_text(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn sanity(phi: &CoxDescription) -> Result<(), InputError> {
    let names = phi.source().names();
    let issues: Vec<String> = phi
        .factor_sanity()
        .iter()
        .map(|i| match i {
            FactorIssue::NonVariableMonomial(m) => format!("monomial factor {} is not a variable", m.to_string_with(names)),
            FactorIssue::VariableContent(p) => format!("factor {} is divisible by a variable", p.to_string_with(names)),
            FactorIssue::DivisibleBy { factor, divisor } => format!(
                "factor {} is divisible by factor {}",
                factor.to_string_with(names),
                divisor.to_string_with(names)
            ),
        })
        .collect();
    if issues.is_empty() {
        Ok(())
    } else {
        Err(InputError::FactorSanity(issues.join("; ")))
    }
}

/// Homogeneity and relevance; returns whether both hold.
fn conditions(run: &mut Run, phi: &CoxDescription) -> Result<bool, InputError> {
    let src = phi.source();
    match phi.check_homogeneity()? {
        HomogeneityReport::Pass(cm) => {
            let values: Vec<String> = cm.values.iter().map(|v| v.to_string_with(src.names())).collect();
            run.line("homogeneity: ok");
            run.condition(
                "homogeneity",
                true,
                json!({
                    "basis": cm.basis.iter().map(|m| m.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "values": values,
                }),
            );
        }
        HomogeneityReport::Fail(f) => {
            let character: Vec<String> = f.character.iter().map(|x| x.to_string()).collect();
            let value = f.value.to_string_with(src.names());
            let defect = match &f.defect {
                HomogeneityDefect::NotSingleValued { root_order } => {
                    json!({"kind": "not_single_valued", "root_order": root_order.to_string()})
                }
                HomogeneityDefect::NonzeroDegree { degree } => {
                    json!({"kind": "nonzero_degree", "degree": degree.to_string()})
                }
            };
            let why = match &f.defect {
                HomogeneityDefect::NotSingleValued { root_order } => format!("needs a root of order {root_order}"),
                HomogeneityDefect::NonzeroDegree { degree } => format!("has degree {degree}"),
            };
            run.line(format!(
                "homogeneity: FAIL (character ({}) pulls back to {value}, which {why})",
                character.join(", ")
            ));
            run.condition(
                "homogeneity",
                false,
                json!({"character": character, "value": value, "defect": defect}),
            );
        }
    }
    match phi.check_relevance() {
        Some(c) => {
            run.line(format!("relevance: ok (witness cone {c})"));
            run.condition("relevance", true, json!(c.rays()));
        }
        None => {
            run.line("relevance: FAIL (the images at a general point lie in the irrelevant locus)");
            run.condition("relevance", false, Value::Null);
        }
    }
    Ok(run.ok)
}

fn diagnosis_json(phi: &CoxDescription, d: &DivisorDiagnosis) -> Value {
    let mut m = Map::new();
    m.insert("f".into(), json!(phi.source().print(&d.f)));
    m.insert("status".into(), json!(d.status.name()));
    m.insert("mu".into(), json!(rational_strings(&d.mu)));
    m.insert("L_mu".into(), json!(rational_strings(&d.l_mu)));
    match &d.status {
        DivisorStatus::Agrees { witness } => {
            m.insert("witness".into(), json!(witness.rays()));
        }
        DivisorStatus::NonRegularMapLocus => {}
        DivisorStatus::NeedsModification { tau, tau_y, mu_prime } => {
            m.insert("tau".into(), json!(tau.rays()));
            m.insert("tau_y".into(), json!(tau_y.rays()));
            m.insert("mu_prime".into(), json!(rational_strings(mu_prime)));
        }
    }
    Value::Object(m)
}

fn status_text(phi: &CoxDescription, d: &DivisorDiagnosis) -> String {
    let f = phi.source().print(&d.f);
    let mu = rational_strings(&d.mu).join(", ");
    let l = rational_strings(&d.l_mu).join(", ");
    match &d.status {
        DivisorStatus::NeedsModification { tau_y, mu_prime, .. } => format!(
            "divisor {f}: mu = ({mu}), L(mu) = ({l}): NeedsModification (tau_Y = {tau_y}, mu' = ({}))",
            rational_strings(mu_prime).join(", ")
        ),
        s => format!("divisor {f}: mu = ({mu}), L(mu) = ({l}): {}", s.name()),
    }
}

/// Completes `phi`, records per-divisor data and the regularity patterns,
/// and writes the completed images into `out`.
fn gather_completion(run: &mut Run, phi: &CoxDescription, out: &mut ProblemDocument) -> Result<(), InputError> {
    let c = phi.complete()?;
    let done = &c.description;
    let mut divisors = Vec::new();
    for d in &c.divisors {
        run.line(status_text(phi, &d.initial));
        let mut j = diagnosis_json(phi, &d.initial);
        if let Value::Object(m) = &mut j {
            m.insert("modified".into(), json!(d.modified));
            m.insert("final_status".into(), json!(d.last.status.name()));
        }
        divisors.push(j);
    }
    run.cert.insert("divisors".into(), Value::Array(divisors));
    run.cert.insert("passes".into(), json!(c.passes));
    run.line(format!("completed: ({})", done.image_strings().join(", ")));
    run.cert.insert("completed".into(), json!(done.image_strings()));
    let (n, details) = regularity(run, done)?;
    run.line(format!("non-regular locus: {}", plural(n, "pattern")));
    details.into_iter().for_each(|l| run.line(l));
    out.set_images(done);
    Ok(())
}

/// Records the regularity data; returns the pattern count and the detail
/// lines for the report.
fn regularity(run: &mut Run, phi: &CoxDescription) -> Result<(usize, Vec<String>), InputError> {
    let r = phi.regularity_report()?;
    let src = phi.source();
    let patterns: Vec<Vec<String>> = r
        .patterns
        .iter()
        .map(|p| p.iter().map(|f| src.print(f)).collect())
        .collect();
    let divisors: Vec<String> = r.non_regular_divisors.iter().map(|f| src.print(f)).collect();
    let mut details = Vec::new();
    if !patterns.is_empty() {
        let shown: Vec<String> = patterns.iter().map(|p| format!("V({})", p.join(", "))).collect();
        details.push(format!("  non-regular patterns: {}", shown.join(", ")));
    }
    if !divisors.is_empty() {
        details.push(format!("  non-regular along: {}", divisors.join(", ")));
    }
    run.cert.insert("non_regular_patterns".into(), json!(patterns));
    run.cert.insert("non_regular_divisors".into(), json!(divisors));
    run.cert.insert("regular".into(), json!(r.is_regular()));
    Ok((patterns.len(), details))
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

fn check(run: &mut Run, phi: &CoxDescription, set: &Settings, doc: &ProblemDocument) -> Result<(), InputError> {
    if conditions(run, phi)? {
        completeness(run, phi)?;
    }
    if set.samples > 0 {
        let reference = doc.character_map(phi.source())?;
        let rep = sample_agreement(phi, set.samples, set.seed, set.tol, reference.as_ref());
        run.line(format!(
            "sampling: {} samples, {} failures, {} skipped, max deviation {:.3e}",
            rep.samples, rep.failures, rep.skipped, rep.max_deviation
        ));
        run.condition(
            "sampling",
            rep.failures == 0,
            json!({
                "samples": rep.samples,
                "failures": rep.failures,
                "skipped": rep.skipped,
                "max_deviation": rep.max_deviation,
                "seed": set.seed,
                "first_failure": rep.first_failure,
            }),
        );
    }
    Ok(())
}

fn completeness(run: &mut Run, phi: &CoxDescription) -> Result<(), InputError> {
    let mut pending = Vec::new();
    let mut divisors = Vec::new();
    for f in phi.candidate_divisors() {
        let d = phi.divisor_status(&f)?;
        run.line(status_text(phi, &d));
        if matches!(d.status, DivisorStatus::NeedsModification { .. }) {
            pending.push(phi.source().print(&f));
        }
        divisors.push(diagnosis_json(phi, &d));
    }
    run.cert.insert("divisors".into(), Value::Array(divisors));
    let complete = pending.is_empty();
    run.cert.insert("complete".into(), json!(complete));
    if complete {
        let (n, details) = regularity(run, phi)?;
        run.line(format!("complete: yes; non-regular locus: {}", plural(n, "pattern")));
        details.into_iter().for_each(|l| run.line(l));
    } else {
        run.line(format!("complete: no (modify along {})", pending.join(", ")));
    }
    Ok(())
}

fn complex_json(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_text(z: &Complex64) -> String {
    if z.im.abs() <= 1e-12 * z.re.abs().max(1.0) {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn eval(
    run: &mut Run,
    phi: &CoxDescription,
    set: &Settings,
    doc: &ProblemDocument,
    opts: &RunOptions,
) -> Result<(), InputError> {
    let src = phi.source();
    let points = match &opts.point {
        Some(p) => {
            let p = crate::document::parse_point(p)?;
            if p.len() != src.nvars() {
                return Err(InputError::PointDimension {
                    expected: src.nvars(),
                    found: p.len(),
                });
            }
            vec![p]
        }
        None => doc.points(src)?,
    };
    let mut results = Vec::new();
    let mut all_ok = true;
    for p in &points {
        let label: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        let xi: Vec<Complex64> = p
            .iter()
            .map(|x| Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0))
            .collect();
        match evaluate_description(phi, &xi, set.tol) {
            Err(e) => {
                all_ok = false;
                run.line(format!("point ({}): {e}", label.join(", ")));
                results.push(json!({"point": label, "error": e.to_string()}));
            }
            Ok(vs) => {
                let (single, dev) = single_orbit(phi.target(), &vs.tuples, set.tol);
                all_ok &= single;
                let tuples: Vec<String> = vs
                    .tuples
                    .iter()
                    .map(|t| format!("({})", t.iter().map(complex_text).collect::<Vec<_>>().join(", ")))
                    .collect();
                run.line(format!(
                    "point ({}): {} value{} {}: {}",
                    label.join(", "),
                    vs.tuples.len(),
                    if vs.tuples.len() == 1 { "" } else { "s" },
                    tuples.join(" "),
                    if single { "one orbit" } else { "DIFFERENT ORBITS" }
                ));
                results.push(json!({
                    "point": label,
                    "branches": vs.branch_count,
                    "values": vs.tuples.iter().map(|t| t.iter().map(complex_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "single_orbit": single,
                    "max_deviation": dev,
                }));
            }
        }
    }
    run.cert.insert("points".into(), Value::Array(results));
    run.condition("orbits", all_ok, Value::Null);
    Ok(())
}

/// Whether all tuples lie in the orbit of the first, and the largest
/// deviation seen. Irrelevant values count as a failure.
fn single_orbit(target: &ToricCoxRing, tuples: &[Vec<Complex64>], tol: f64) -> (bool, Option<f64>) {
    let Some(first) = tuples.first() else {
        return (false, None);
    };
    let mut worst = 0.0f64;
    for t in tuples {
        match orbit_deviation(target, first, t) {
            Ok(Some(d)) => worst = worst.max(d),
            _ => return (false, None),
        }
    }
    (worst <= tol, Some(worst))
}

fn verify_ideal(run: &mut Run, phi: &CoxDescription, doc: &ProblemDocument) -> Result<(), InputError> {
    let gens = doc.ideal(phi.target())?;
    match phi.verify_ideal_vanishing(&gens)? {
        None => {
            run.line(format!("ideal: {} pulled back to zero", plural(gens.len(), "generator")));
            run.condition("ideal", true, json!({"generators": gens.len()}));
        }
        Some(i) => {
            let g = phi.target().print(&gens[i]);
            let pb = phi.pullback_polynomial(&gens[i])?;
            let value = pb.to_string_with(phi.source().names());
            run.line(format!("ideal: FAIL (generator {g} pulls back to {value})"));
            run.condition("ideal", false, json!({"index": i, "generator": g, "pullback": value}));
        }
    }
    Ok(())
}

/// Shared handle used by tests that build descriptions directly.
pub fn description_of(doc: &ProblemDocument) -> Result<CoxDescription, InputError> {
    let (s, t): (Arc<ToricCoxRing>, Arc<ToricCoxRing>) = doc.rings()?;
    Ok(doc.description(&s, &t)??)
}
