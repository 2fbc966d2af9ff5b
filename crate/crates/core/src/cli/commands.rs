use std::fmt::Write as _;

use serde_json::{json, Value};

use super::report::{FuzzOut, GalleryCheck, GalleryListing, GalleryOutcome, InvariantsOut, ResidualOut, RunReport, Verdicts, VectorsOut};
use super::{Failure, Loaded, EXIT_NEGATIVE, EXIT_OK, EXIT_SEARCH};
use crate::analysis::{
    einstein_residual, forbidden_pattern, identity_residual, reduced_identity_residual, weakly_einstein_residual,
};
use crate::frames::{find_st_basis, ricci_spectrum, FrameError, STReport, SearchOptions, SignCase};
use crate::sources::{gallery, gallery_names, random_curvature};
use crate::tensor::Curvature4;
use crate::topology::{f_by_case, f_value, invariants_from_vectors, st_vectors, InvariantReport};

/// Human-readable number: fixed notation for moderate magnitudes.
fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if (1e-4..1e7).contains(&x.abs()) {
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{x:.6e}")
    }
}

fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn describe(l: &Loaded) -> String {
    let obj = l.echo.as_object();
    let field = |k: &str| obj.and_then(|o| o.get(k)).and_then(Value::as_str);
    let kind = match (field("kind"), field("name")) {
        (Some(k), Some(n)) => format!("{k} {n}"),
        (Some(k), None) => k.to_string(),
        _ => "?".to_string(),
    };
    let rest: Vec<String> = obj
        .map(|o| {
            o.iter()
                .filter(|(k, _)| k.as_str() != "kind" && k.as_str() != "name")
                .map(|(k, v)| match v {
                    Value::Number(n) => format!("{k}={}", num(n.as_f64().unwrap_or(f64::NAN))),
                    Value::String(s) => format!("{k}={s}"),
                    _ => format!("{k}=…"),
                })
                .collect()
        })
        .unwrap_or_default();
    if rest.is_empty() { kind } else { format!("{kind} ({})", rest.join(", ")) }
}

struct Analysis {
    weakly_einstein: bool,
    identity_ok: bool,
    forbidden: Option<u8>,
}

fn analyze(l: &Loaded, opts: &SearchOptions, report: &mut RunReport, human: &mut String) -> Analysis {
    let r = &l.tensor;
    let tol = opts.tol;
    let id = identity_residual(r, tol);
    let we = weakly_einstein_residual(r, tol);
    let ein = einstein_residual(r, tol);
    let red = reduced_identity_residual(r, tol);
    report.input = Some(l.echo.clone());
    report.verdicts = Some(Verdicts { einstein: ein.passes, weakly_einstein: we.passes, identity_ok: id.passes });
    report.residuals.insert("identity".into(), ResidualOut::from(&id));
    report.residuals.insert("weakly_einstein".into(), ResidualOut::from(&we));
    report.residuals.insert("einstein".into(), ResidualOut::from(&ein));
    report.residuals.insert("reduced_identity".into(), ResidualOut::from(&red));

    let _ = writeln!(human, "input: {}", describe(l));
    let _ = writeln!(human, "identity residual: {:.3e} (relative)", id.relative);
    let _ = writeln!(human, "einstein: {} (relative residual {:.3e})", ein.passes, ein.relative);
    let _ = writeln!(human, "weakly einstein: {} (relative residual {:.3e})", we.passes, we.relative);

    let mut forbidden = None;
    match ricci_spectrum(r, opts.tol_mult) {
        Ok(spec) => {
            forbidden = forbidden_pattern(&spec.eigenvalues, opts.tol_mult).map(|p| p.0);
            report.eigenvalues = Some(spec.eigenvalues);
            report.pattern = Some(spec.pattern.tag.label().into());
            report.forbidden_pattern = forbidden;
            let _ = writeln!(human, "ricci eigenvalues: {} (type {})", list(&spec.eigenvalues), spec.pattern.tag.label());
            if let Some(p) = forbidden {
                let _ = writeln!(human, "forbidden eigenvalue pattern ({p})");
            }
        }
        Err(e) => {
            let _ = writeln!(human, "ricci eigenvalues: unavailable ({e})");
        }
    }
    Analysis { weakly_einstein: we.passes, identity_ok: id.passes, forbidden }
}

pub(crate) fn identity(l: &Loaded, opts: &SearchOptions, report: &mut RunReport, human: &mut String) -> i32 {
    let a = analyze(l, opts, report, human);
    if a.identity_ok { EXIT_OK } else { EXIT_NEGATIVE }
}

pub(crate) fn check(l: &Loaded, opts: &SearchOptions, report: &mut RunReport, human: &mut String) -> i32 {
    let a = analyze(l, opts, report, human);
    if a.identity_ok && a.weakly_einstein && a.forbidden.is_none() { EXIT_OK } else { EXIT_NEGATIVE }
}

fn frame_failure(e: FrameError) -> Failure {
    match e {
        FrameError::NotWeaklyEinstein { .. } => Failure { code: EXIT_NEGATIVE, kind: "not-weakly-einstein", message: e.to_string() },
        other => Failure { code: EXIT_SEARCH, kind: "search", message: other.to_string() },
    }
}

fn search(l: &Loaded, opts: &SearchOptions, report: &mut RunReport, human: &mut String) -> Result<STReport<f64>, Failure> {
    analyze(l, opts, report, human);
    report.seed = Some(opts.seed);
    let rep = find_st_basis(&l.tensor, opts).map_err(|e| {
        if let FrameError::SearchFailed { start_penalties, .. } = &e {
            report.start_penalties = Some(start_penalties.clone());
        }
        frame_failure(e)
    })?;
    report.st_frame = Some(rep.frame.to_row_major().to_vec());
    report.penalty = Some(rep.penalty);
    report.construction_path = Some(rep.path.label().into());
    report.degenerate_fit = Some(rep.degenerate_fit);
    report.polished = Some(rep.polished);
    if !rep.start_penalties.is_empty() {
        report.start_penalties = Some(rep.start_penalties.clone());
    }
    report.sign_cases = Some(rep.sign_cases.cases.iter().map(|c| c.label().to_string()).collect());
    report.frame_ricci_diagonal = Some(rep.sign_cases.eigenvalues);

    let _ = writeln!(human, "st frame ({}, penalty {:.3e}):", rep.path.label(), rep.penalty);
    for (i, row) in rep.frame.rows().iter().enumerate() {
        let _ = writeln!(human, "  e{}' = {}", i + 1, list(row));
    }
    if rep.degenerate_fit {
        let _ = writeln!(human, "note: a rotation fit was constant and its angle was taken as 0");
    }
    let labels: Vec<&str> = rep.sign_cases.cases.iter().map(|c| c.label()).collect();
    let _ = writeln!(human, "sign cases: {}", labels.join(" "));
    Ok(rep)
}

fn vectors_and_f(l: &Loaded, rep: &STReport<f64>, report: &mut RunReport, human: &mut String) -> Result<crate::topology::STVectors<f64>, Failure> {
    let v = st_vectors(&l.tensor, &rep.frame).map_err(|e| Failure { code: EXIT_SEARCH, kind: "search", message: e.to_string() })?;
    let f = f_value(&v);
    report.st_vectors = Some(VectorsOut::from(&v));
    report.f = Some(f);
    for &case in &rep.sign_cases.cases {
        if let Ok(g) = f_by_case(&rep.sign_cases.eigenvalues, case) {
            report.f_by_case.insert(case.label().into(), g);
        }
    }
    let _ = writeln!(human, "a' = {}  a'' = {}  b = {}", list(&v.a_prime), list(&v.a_dprime), list(&v.b));
    let _ = writeln!(human, "f = {}", num(f));
    Ok(v)
}

pub(crate) fn frame(l: &Loaded, opts: &SearchOptions, report: &mut RunReport, human: &mut String) -> Result<i32, Failure> {
    let rep = search(l, opts, report, human)?;
    vectors_and_f(l, &rep, report, human)?;
    Ok(EXIT_OK)
}

fn write_invariants(inv: &InvariantReport<f64>, human: &mut String) {
    let _ = writeln!(human, "chi density = {}  p1 density = {}", num(inv.chi_density), num(inv.p1_density));
    if let (Some(vol), Some(chi), Some(p1), Some(c)) = (inv.volume, inv.chi, inv.p1, inv.c_bound) {
        let _ = writeln!(human, "volume = {}", num(vol));
        let _ = writeln!(human, "chi = {}  p1 = {}  C = {}", num(chi), num(p1), num(c));
        let yes = |b: Option<bool>| if b == Some(true) { "holds" } else { "fails" };
        let _ = writeln!(human, "2chi + p1 >= C: {}", yes(inv.bound_plus_ok));
        let _ = writeln!(human, "2chi - p1 >= C: {}", yes(inv.bound_minus_ok));
        if inv.bound_equality == Some(true) {
            let _ = writeln!(human, "both bounds hold with equality");
        }
        let _ = writeln!(human, "2chi >= 3|sigma|: {}", yes(inv.hitchin_ok));
    }
}

pub(crate) fn invariants(
    l: &Loaded,
    opts: &SearchOptions,
    volume: Option<f64>,
    report: &mut RunReport,
    human: &mut String,
) -> Result<i32, Failure> {
    let rep = search(l, opts, report, human)?;
    let v = vectors_and_f(l, &rep, report, human)?;
    let inv = invariants_from_vectors(&v, volume.or(l.volume), rep.frame.orientation());
    write_invariants(&inv, human);
    report.invariants = Some(InvariantsOut::from(&inv));
    Ok(EXIT_OK)
}

pub(crate) fn fuzz(count: usize, opts: &SearchOptions, report: &mut RunReport, human: &mut String) -> i32 {
    let mut max_relative = 0.0f64;
    let mut sum = 0.0;
    let mut worst_index = 0;
    let mut failures = 0;
    for i in 0..count {
        let r: Curvature4<f64> = random_curvature(opts.seed.wrapping_add(i as u64));
        let res = identity_residual(&r, opts.tol);
        sum += res.relative;
        if res.relative > max_relative {
            max_relative = res.relative;
            worst_index = i;
        }
        if !res.passes {
            failures += 1;
        }
    }
    let mean_relative = if count > 0 { sum / count as f64 } else { 0.0 };
    report.seed = Some(opts.seed);
    report.fuzz = Some(FuzzOut { count, seed: opts.seed, max_relative, mean_relative, worst_index, failures });
    let _ = writeln!(human, "random tensors: {count} (seeds {}..)", opts.seed);
    let _ = writeln!(human, "identity residual: max {max_relative:.3e} (index {worst_index}), mean {mean_relative:.3e}");
    let _ = writeln!(human, "failures: {failures}");
    if failures == 0 { EXIT_OK } else { EXIT_NEGATIVE }
}

pub(crate) fn gallery_list(report: &mut RunReport, human: &mut String) -> i32 {
    let mut entries = Vec::new();
    for (name, description) in gallery_names() {
        let params = gallery::<f64>(name, &[]).map(|e| e.meta.params).unwrap_or_default();
        let shown: Vec<String> = params.iter().map(|(k, v)| format!("{k}={}", num(*v))).collect();
        let _ = writeln!(human, "{name:<18} {description}{}", if shown.is_empty() { String::new() } else { format!(" [{}]", shown.join(", ")) });
        entries.push(GalleryListing { name: name.into(), description: description.into(), params });
    }
    report.entries = Some(entries);
    EXIT_OK
}

const VALUE_TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn sorted_desc(mut xs: [f64; 4]) -> [f64; 4] {
    xs.sort_by(|a, b| b.total_cmp(a));
    xs
}

struct Checks(Vec<GalleryCheck>);

impl Checks {
    fn push(&mut self, check: &str, expected: Value, actual: Value, ok: bool) {
        self.0.push(GalleryCheck { check: check.into(), expected, actual, ok });
    }

    fn number(&mut self, check: &str, expected: Option<f64>, actual: Option<f64>) {
        if let Some(e) = expected {
            let ok = actual.map_or(false, |a| close(e, a));
            self.push(check, json!(e), json!(actual), ok);
        }
    }
}

fn run_entry(name: &str, params: &[(&str, f64)], opts: &SearchOptions) -> Result<GalleryOutcome, Failure> {
    let entry = gallery::<f64>(name, params).map_err(|e| Failure::usage("input", e.to_string()))?;
    let meta = &entry.meta;
    let r = &entry.tensor;
    let mut checks = Checks(Vec::new());

    let id = identity_residual(r, opts.tol);
    checks.push("identity", json!(true), json!(id.passes), id.passes);
    let ein = einstein_residual(r, opts.tol).passes;
    checks.push("einstein", json!(meta.einstein), json!(ein), ein == meta.einstein);
    let we = weakly_einstein_residual(r, opts.tol).passes;
    checks.push("weakly_einstein", json!(meta.weakly_einstein), json!(we), we == meta.weakly_einstein);

    match ricci_spectrum(r, opts.tol_mult) {
        Ok(spec) => {
            let expected = sorted_desc(meta.eigenvalues);
            let ok = expected.iter().zip(spec.eigenvalues).all(|(e, a)| close(*e, a));
            checks.push("eigenvalues", json!(expected), json!(spec.eigenvalues), ok);
            let fp = forbidden_pattern(&spec.eigenvalues, opts.tol_mult).map(|p| p.0);
            checks.push("forbidden_pattern", json!(meta.forbidden_pattern), json!(fp), fp == meta.forbidden_pattern);
        }
        Err(e) => checks.push("eigenvalues", json!(sorted_desc(meta.eigenvalues)), json!(e.to_string()), false),
    }

    if meta.weakly_einstein {
        match find_st_basis(r, opts) {
            Ok(rep) => {
                let found: Vec<String> = rep.sign_cases.cases.iter().map(|c| c.label().to_string()).collect();
                if !meta.sign_cases_include.is_empty() {
                    let ok = meta.sign_cases_include.iter().all(|c| found.contains(c));
                    checks.push("sign_cases_include", json!(meta.sign_cases_include), json!(found), ok);
                }
                if let Some(exact) = &meta.sign_cases_exact {
                    checks.push("sign_cases_exact", json!(exact), json!(found), exact == &found);
                }
                if let Ok(v) = st_vectors(r, &rep.frame) {
                    let f = f_value(&v);
                    let agree = rep.sign_cases.cases.iter().all(|&c: &SignCase| {
                        f_by_case(&rep.sign_cases.eigenvalues, c).map_or(false, |g| (f - g).abs() <= 1e-8 * r.scale().powi(2))
                    });
                    checks.push("f_by_case_agrees", json!(true), json!(agree), agree);
                    if let Some(vol) = meta.volume {
                        let inv = invariants_from_vectors(&v, Some(vol), rep.frame.orientation());
                        checks.number("chi", meta.chi, inv.chi);
                        checks.number("p1", meta.p1, inv.p1);
                        checks.number("c", meta.c_bound, inv.c_bound);
                        if let Some(h) = meta.hitchin {
                            checks.push("hitchin", json!(h), json!(inv.hitchin_ok), inv.hitchin_ok == Some(h));
                        }
                    }
                } else {
                    checks.push("st_vectors", json!(true), json!(false), false);
                }
            }
            Err(e) => checks.push("st_frame", json!(true), json!(e.to_string()), false),
        }
    }

    let ok = checks.0.iter().all(|c| c.ok);
    Ok(GalleryOutcome { name: name.into(), params: meta.params.clone(), checks: checks.0, ok })
}

pub(crate) fn gallery_run(
    entries: &[(&str, Vec<(&str, f64)>)],
    opts: &SearchOptions,
    report: &mut RunReport,
    human: &mut String,
) -> Result<i32, Failure> {
    let mut outcomes = Vec::new();
    for (name, params) in entries {
        let outcome = run_entry(name, params, opts)?;
        let shown: Vec<String> = outcome.params.iter().map(|(k, v)| format!("{k}={}", num(*v))).collect();
        let head = if shown.is_empty() { name.to_string() } else { format!("{name} ({})", shown.join(", ")) };
        let _ = writeln!(human, "{} {head}", if outcome.ok { "ok  " } else { "FAIL" });
        for c in outcome.checks.iter().filter(|c| !c.ok) {
            let _ = writeln!(human, "     {}: expected {}, got {}", c.check, c.expected, c.actual);
        }
        outcomes.push(outcome);
    }
    let all_ok = outcomes.iter().all(|o| o.ok);
    report.seed = Some(opts.seed);
    report.gallery = Some(outcomes);
    let _ = writeln!(human, "{}", if all_ok { "all expectations met" } else { "some expectations failed" });
    Ok(if all_ok { EXIT_OK } else { EXIT_NEGATIVE })
}
