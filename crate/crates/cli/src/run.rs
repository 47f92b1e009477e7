//! Dispatch from merged options to the library, producing a report.

use crate::forms;
use crate::opts::{BoundsAction, CircleCheck, Command, CountKindArg, Opts, RouteArg};
use anyhow::{bail, Result};
use jetcircle::arith::field::PrimeField;
use jetcircle::certifier::formulas::{qstr, Q};
use jetcircle::certifier::{
    a_prime, a_quantity, bound_value, canonical_case, certify, default_spans, reproduce_paper_identities, terminal_case,
    thresholds, Mode, Span,
};
use jetcircle::circle::{self, MajorRoute, NMode, WeylSetup, DEFAULT_PRECISION_CAP};
use jetcircle::counting::{count_record, lw_trend, CountKind, CountMode, CountRecord};
use jetcircle::geometry::{smoothness_check, FormSpec, SymmetricForm};
use jetcircle::report::{CheckReport, Verdict};
use jetcircle::sections::DualFunctional;
use jetcircle::{Budget, Error};
use serde_json::{json, Value};

pub enum Status {
    Pass,
    Fail(String),
}

pub enum Body {
    Json(Value),
    Csv(String),
}

pub struct Outcome {
    pub body: Body,
    pub status: Status,
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    match v {
        Some(x) => Ok(x),
        None => bail!(Error::InvalidInput(format!("--{flag} is required"))),
    }
}

fn field_for(p: u32, d: usize) -> Result<PrimeField> {
    let f = PrimeField::new(p)?;
    if p as usize <= d {
        bail!(Error::Precondition(format!("need p > d, got p={p}, d={d}")));
    }
    Ok(f)
}

pub fn budget_of(o: &Opts) -> Budget {
    let mut b = o.budget.map(Budget::new).unwrap_or_default();
    if o.force {
        b.ceiling = b.ceiling.max(Budget::forced().ceiling);
    }
    b
}

pub fn dispatch(cmd: Command, o: &Opts) -> Result<Outcome> {
    let budget = budget_of(o);
    match cmd {
        Command::Count => count(o, &budget),
        Command::Circle => circle_cmd(o, &budget),
        Command::Bounds => bounds(o),
        Command::Smooth => smooth(o, &budget),
    }
}

fn primes_of(o: &Opts) -> Vec<u32> {
    match (&o.primes, o.q) {
        (Some(ps), _) => ps.clone(),
        (None, Some(q)) => vec![q],
        (None, None) => Vec::new(),
    }
}

fn form_spec(o: &Opts, primes: &[u32], budget: &Budget) -> Result<FormSpec> {
    let name = o.form.as_deref().unwrap_or("conic");
    forms::resolve(name, o.n, o.d, o.seed.unwrap_or(0), primes, budget)
}

fn reduced(o: &Opts, budget: &Budget) -> Result<SymmetricForm> {
    let p = need(o.q, "q")?;
    let spec = form_spec(o, &[p], budget)?;
    let f = field_for(p, spec.d)?;
    Ok(spec.reduce(f)?)
}

fn csv(records: &[CountRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["prime", "raw_count", "normalized_num", "normalized_den", "exponent"])?;
    for r in records {
        w.write_record([
            r.params.p.to_string(),
            r.raw_count.to_string(),
            r.normalized.numer().to_string(),
            r.normalized.denom().to_string(),
            r.exponent.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn count(o: &Opts, budget: &Budget) -> Result<Outcome> {
    let kind_arg = o.kind.unwrap_or(CountKindArg::Mm);
    let mut primes = primes_of(o);
    if primes.is_empty() {
        if kind_arg != CountKindArg::LwTrend {
            bail!(Error::InvalidInput("--q or --primes is required".into()));
        }
        primes = vec![3, 5, 7];
    }
    let e = need(o.e, "e")?;
    let m = o.m.unwrap_or(0);
    let spec = form_spec(o, &primes, budget)?;
    for &p in &primes {
        field_for(p, spec.d)?;
    }
    let kind = match (kind_arg, o.pairs) {
        (CountKindArg::M1m, _) | (CountKindArg::LwTrend, true) => CountKind::M1m,
        _ => CountKind::Mm,
    };
    if kind_arg == CountKindArg::LwTrend {
        let trend = lw_trend(&spec, e, m, &primes, kind, budget)?;
        eprintln!(
            "distance to 1: {} (non-increasing: {})",
            trend.distance_to_one.join(", "),
            trend.monotone_toward_one
        );
        return Ok(Outcome { body: Body::Csv(csv(&trend.records)?), status: Status::Pass });
    }
    let mut records = Vec::new();
    for &p in &primes {
        let form = spec.reduce(PrimeField::new(p)?)?;
        records.push(count_record(&form, e, m, kind, CountMode::Auto, budget)?);
    }
    let body = if o.primes.is_some() { Body::Csv(csv(&records)?) } else { Body::Json(serde_json::to_value(&records[0])?) };
    Ok(Outcome { body, status: Status::Pass })
}

fn sample(o: &Opts, form: &SymmetricForm, e: usize, order: usize, budget: &Budget) -> Result<Vec<DualFunctional>> {
    Ok(circle::alpha_sample(
        form.field,
        form.d * e,
        order,
        o.max_degree.unwrap_or(2),
        o.samples.unwrap_or(100),
        o.seed.unwrap_or(0),
        budget,
    )?)
}

/// Folds many single-functional reports into one, keeping the failures.
fn aggregate(check: &str, params: Value, reports: &[CheckReport]) -> (Value, Verdict) {
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let (fails, undecided) = (count(Verdict::Fails) + count(Verdict::NotEqual), count(Verdict::Undecided));
    let verdict = if fails > 0 {
        Verdict::Fails
    } else if undecided > 0 {
        Verdict::Undecided
    } else {
        Verdict::Holds
    };
    let max_tight = reports
        .iter()
        .filter_map(|r| r.tightness.as_deref().and_then(|t| t.parse::<f64>().ok()))
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
    let bad: Vec<&CheckReport> = reports.iter().filter(|r| !r.passed()).take(20).collect();
    let value = json!({
        "check": check,
        "params": params,
        "checked": reports.len(),
        "holds": count(Verdict::Holds) + count(Verdict::Equal),
        "fails": fails,
        "undecided": undecided,
        "max_tightness": max_tight.map(jetcircle::report::ratio_string),
        "not_passing": bad,
        "verdict": verdict,
    });
    (value, verdict)
}

fn status_of(verdict: Verdict, what: &str, cap: u32) -> Status {
    match verdict {
        Verdict::Equal | Verdict::Holds => Status::Pass,
        Verdict::Undecided => Status::Fail(format!("{what}: undecided at the precision cap of {cap} bits")),
        _ => Status::Fail(format!("{what}: verdict {verdict:?}")),
    }
}

fn circle_cmd(o: &Opts, budget: &Budget) -> Result<Outcome> {
    let check = need(o.check, "check")?;
    let form = reduced(o, budget)?;
    let e = need(o.e, "e")?;
    let m = o.m.unwrap_or(1);
    let cap = o.precision_cap.unwrap_or(DEFAULT_PRECISION_CAP);
    let single = |r: CheckReport| {
        let status = status_of(r.verdict, &r.check, cap);
        Ok(Outcome { body: Body::Json(serde_json::to_value(&r)?), status })
    };
    let params = json!({"p": form.field.p(), "n": form.n, "d": form.d, "e": e, "form": form.name});
    match check {
        CircleCheck::Orthogonality if o.pairs => single(circle::check_orthogonality_pairs(&form, e, m, budget)?),
        CircleCheck::Orthogonality => single(circle::check_orthogonality(&form, e, m, budget)?),
        CircleCheck::MajorIdentity if o.pairs => single(circle::check_major_identity_pairs(&form, e, m, budget)?),
        CircleCheck::MajorIdentity => {
            let route = match o.route.unwrap_or(RouteArg::Spectrum) {
                RouteArg::Spectrum => MajorRoute::Spectrum,
                RouteArg::Collapsed => MajorRoute::Collapsed,
            };
            single(circle::check_major_identity(&form, e, m, route, budget)?)
        }
        CircleCheck::TVanishing => single(circle::check_t_vanishing(
            &form,
            e,
            o.y_samples.unwrap_or(100),
            o.slices.unwrap_or(20),
            o.seed.unwrap_or(0),
            budget,
        )?),
        CircleCheck::Weyl => {
            if o.pairs {
                bail!(Error::InvalidInput("the weyl check has no --pairs variant on the command line".into()));
            }
            let alphas = sample(o, &form, e, m, budget)?;
            let setup = WeylSetup::new(&form, e, m, cap, budget)?;
            let reports = alphas.iter().map(|a| setup.check(a)).collect::<jetcircle::Result<Vec<_>>>()?;
            let mut params = params;
            params["m"] = json!(m);
            params["precision_cap"] = json!(cap);
            let (v, verdict) = aggregate("weyl", params, &reports);
            Ok(Outcome { body: Body::Json(v), status: status_of(verdict, "weyl", cap) })
        }
        CircleCheck::Shrink => {
            let (k, s) = (o.k.unwrap_or(0), o.s.unwrap_or(1));
            let alphas = sample(o, &form, e, k, budget)?;
            let reports = alphas
                .iter()
                .map(|a| circle::check_shrink(&form, e, a, k, s, budget))
                .collect::<jetcircle::Result<Vec<_>>>()?;
            let mut params = params;
            params["k"] = json!(k);
            params["s"] = json!(s);
            let (v, verdict) = aggregate("shrink", params, &reports);
            Ok(Outcome { body: Body::Json(v), status: status_of(verdict, "shrink", cap) })
        }
        CircleCheck::NCounts => {
            let (k, s) = (o.k.unwrap_or(0), o.s.unwrap_or(0));
            let alphas = sample(o, &form, e, k, budget)?;
            let mut reports = Vec::new();
            for a in &alphas {
                let kernel = circle::n_count(&form, e, a, k, k + 1, s, NMode::Kernel, budget)?;
                let direct = circle::n_count(&form, e, a, k, k + 1, s, NMode::Definition, budget)?;
                reports.push(CheckReport {
                    check: "n-count".into(),
                    params: json!({"alpha": a.data, "k": k, "s": s}),
                    lhs: json!(kernel.to_string()),
                    rhs: json!(direct.to_string()),
                    verdict: if kernel == direct { Verdict::Equal } else { Verdict::NotEqual },
                    tightness: None,
                    details: Value::Null,
                });
            }
            let mut params = params;
            params["k"] = json!(k);
            params["s"] = json!(s);
            let (v, verdict) = aggregate("n-counts", params, &reports);
            Ok(Outcome { body: Body::Json(v), status: status_of(verdict, "n-counts", cap) })
        }
    }
}

fn mode_of(o: &Opts) -> Result<Mode> {
    Ok(o.mode.as_deref().unwrap_or("canonical").parse::<Mode>()?)
}

fn span(lo: Option<i64>, hi: Option<i64>, default: Span) -> Span {
    Span::new(lo.unwrap_or(default.lo), hi.unwrap_or(default.hi))
}

fn bounds(o: &Opts) -> Result<Outcome> {
    match o.action.unwrap_or(BoundsAction::Certify) {
        BoundsAction::Certify => {
            let mode = mode_of(o)?;
            let d = need(o.d, "d")? as i64;
            let g = need(o.g, "g")? as i64;
            let (es, ms) = default_spans(mode, d, g)?;
            let cert = certify(mode, d, g, span(o.e_from, o.e_to, es), span(o.m_from, o.m_to, ms), o.n_plus_1)?;
            let status = if cert.passed() {
                Status::Pass
            } else {
                Status::Fail(format!("certificate failed with {} counterexamples", cert.counterexample_count))
            };
            Ok(Outcome { body: Body::Json(serde_json::to_value(&cert)?), status })
        }
        BoundsAction::PaperIdentities => {
            let report = reproduce_paper_identities(o.g_max.unwrap_or(20), o.d_max.unwrap_or(8));
            let status = if report.all_hold() {
                Status::Pass
            } else {
                Status::Fail(format!("{} stated relations do not hold: {}", report.failed_entries.len(), report.failed_entries.join("; ")))
            };
            Ok(Outcome { body: Body::Json(serde_json::to_value(&report)?), status })
        }
        BoundsAction::Eval => eval(o),
    }
}

fn eval(o: &Opts) -> Result<Outcome> {
    let mode = mode_of(o)?;
    let d = need(o.d, "d")? as i64;
    let g = need(o.g, "g")? as i64;
    let e = need(o.e, "e")? as i64;
    let m = need(o.m, "m")? as i64;
    let da = need(o.d_alpha, "d-alpha")?;
    let (value, case): (Q, _) = match mode {
        Mode::Canonical => (a_quantity(d, g, e, m, da)?, canonical_case(d, g, e, da)),
        Mode::Terminal => {
            let db = need(o.d_beta, "d-beta")?;
            (a_prime(d, g, e, m, da, db)?.0, terminal_case(d, g, e, m, da, db))
        }
    };
    let th = thresholds(d, g, e, mode)?;
    let n1 = o.n_plus_1.unwrap_or(th.min_n_plus_1);
    let below = value < Q::from_integer(n1.into());
    let case_bound = bound_value(case, d, g, e);
    let body = json!({
        "mode": mode,
        "d": d, "g": g, "e": e, "m": m, "d_alpha": da, "d_beta": o.d_beta,
        "value": qstr(&value),
        "case": case.name(),
        "case_bound": case_bound.as_ref().map(qstr),
        "threshold": th,
        "n_plus_1": n1,
        "below_n_plus_1": below,
    });
    let status = if below { Status::Pass } else { Status::Fail(format!("value {} is not below n+1 = {n1}", qstr(&value))) };
    Ok(Outcome { body: Body::Json(body), status })
}

fn smooth(o: &Opts, budget: &Budget) -> Result<Outcome> {
    let form = reduced(o, budget)?;
    let report = smoothness_check(&form, o.k_max, budget)?;
    if report.budget_stop {
        bail!(Error::Precondition(format!(
            "smoothness search stopped by the budget after degree {} of {}",
            report.verified_up_to, report.cap
        )));
    }
    let status = if report.singular_witness.is_some() {
        Status::Fail(format!("singular point over F_{}^{}", form.field.p(), report.witness_degree.unwrap_or(0)))
    } else {
        Status::Pass
    };
    Ok(Outcome { body: Body::Json(serde_json::to_value(&report)?), status })
}
