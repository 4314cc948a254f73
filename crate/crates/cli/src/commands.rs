use num_traits::Zero;
use serde_json::{json, Value};

use somos::companion::{
    companion_table, companion_w, subsequence_coeffs_from, verify_h_invariant, ward_generate, CompanionSeq, OrbitInvariants,
};
use somos::identities::{enumerate_lambda_sets, verify_all, verify_identity, TrialConfig};
use somos::kernel::Rational;
use somos::laurent::{check_specializations, symbolic_iterate, RecurrenceShape, SymbolicGuard};
use somos::lattice::{
    beta_n_integral, constraint_residual, i_n_integral, verify_h_n_invariant, y_from_t, LatticeConstants,
};
use somos::sequences::{fit_somos4_coeffs, gale_robinson_extend, gale_robinson_extend_partial, linear_window, subsequence, GaleRobinsonParams, SeqError};
use somos::volterra::{
    a_residual, a_series, b_series, bilinear_residual_series, check_closed_form, closed_form_trajectory, conjecture_check,
    positivity_scan, tau_series, triangles, volterra_residual_series, y_series_closed, ClosedFormConfig,
};
use somos::OrbitWindow;

use crate::args::{EqKind, Format, IndexRange, LinearArgs, RatList, RecurrenceArgs};
use crate::output::{float, Run};
use crate::Command;

pub enum CliError {
    Usage(String),
    Domain(String),
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Bad parameters are usage errors; anything the arithmetic hits is a domain error.
fn seq_err(e: SeqError) -> CliError {
    match e {
        SeqError::InvalidParams(m) => CliError::Usage(m),
        other => domain(other),
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cmd: &Command) -> Result<Run> {
    match cmd {
        Command::Generate { eq, rec, lin, range, fmt } => generate(*eq, rec, lin, *range, fmt.format),
        Command::LaurentCheck { big_n, p, q, order, seed, trials } => laurent_check(*big_n, *p, *q, *order, *seed, *trials),
        Command::Companion { rec, order, d } => companion(rec, *order, *d),
        Command::Ward { init, order } => ward(init, *order),
        Command::Verify { identity, trials, inject_fault } => {
            let cfg = trial_config(trials.seed, trials.trials, *inject_fault);
            let rep = verify_identity(*identity, &cfg);
            let failed = usize::from(!rep.passed());
            Ok(Run::checked(to_json(&rep), 1 - failed, failed))
        }
        Command::VerifyAll { trials, inject_fault } => {
            let cfg = trial_config(trials.seed, trials.trials, *inject_fault);
            let rep = verify_all(&cfg);
            Ok(Run::checked(to_json(&rep), rep.passed, rep.failed))
        }
        Command::Lattice { rec, range } => lattice(rec, *range),
        Command::Volterra { lin, range, dx, x_max, seed, fmt } => volterra(lin, *range, *dx, *x_max, *seed, fmt.format),
        Command::Series { lin, order, range } => series(lin, *order, *range),
        Command::Triangles { order } => {
            let (_, _, rep) = triangles(*order).map_err(domain)?;
            let ok = rep.all_ok;
            Ok(Run::checked(to_json(&rep), usize::from(ok), usize::from(!ok)))
        }
        Command::Conjecture { lin, r, range } => {
            let rep = conjecture_check(*r, &lin.params(), range.lo, range.hi).map_err(domain)?;
            let failed = rep.rows.iter().filter(|row| !row.failures.is_empty() || row.matches_display == Some(false)).count();
            Ok(Run::checked(to_json(&rep), rep.rows.len() - failed, failed))
        }
        Command::LambdaEnum { d, trials } => {
            let cfg = TrialConfig::with_seed(trials.seed, trials.trials);
            let rep = enumerate_lambda_sets(*d, &cfg).map_err(usage)?;
            let ok = rep.closure_ok;
            Ok(Run::checked(to_json(&rep), usize::from(ok), usize::from(!ok)))
        }
    }
}

fn to_json(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn trial_config(seed: u64, trials: usize, fault: Option<crate::args::FaultArg>) -> TrialConfig {
    TrialConfig { fault: fault.map(Into::into), ..TrialConfig::with_seed(seed, trials) }
}

fn rational_terms(w: &OrbitWindow) -> Vec<Value> {
    w.iter().map(|(n, t)| json!({ "n": n, "t": t.to_string() })).collect()
}

fn gale_robinson(eq: EqKind, rec: &RecurrenceArgs) -> Result<GaleRobinsonParams> {
    let (order, p, q) = match eq {
        EqKind::Somos4 => (4, 1, 2),
        EqKind::SomosN => (rec.big_n.ok_or_else(|| usage("--eq somosN needs --N"))?, 1, 2),
        EqKind::GaleRobinson => (
            rec.big_n.ok_or_else(|| usage("--eq gale-robinson needs --N"))?,
            rec.p.ok_or_else(|| usage("--eq gale-robinson needs --p"))?,
            rec.q.ok_or_else(|| usage("--eq gale-robinson needs --q"))?,
        ),
        EqKind::Linear => unreachable!("linear has no Gale-Robinson form"),
    };
    let init = match &rec.init {
        Some(list) => list.values(),
        None => vec![Rational::from_integer(1.into()); order],
    };
    GaleRobinsonParams::new(order, p, q, crate::args::rat(&rec.alpha), crate::args::rat(&rec.beta), init).map_err(seq_err)
}

fn generate(eq: EqKind, rec: &RecurrenceArgs, lin: &LinearArgs, range: IndexRange, format: Format) -> Result<Run> {
    let (window, error) = match eq {
        EqKind::Linear => match linear_window(&lin.params(), range.lo, range.hi) {
            Ok(w) => (Some(w), None),
            Err(e @ SeqError::InvalidParams(_)) => return Err(seq_err(e)),
            Err(e) => (None, Some(e)),
        },
        _ => {
            let params = gale_robinson(eq, rec)?;
            let (w, err) = gale_robinson_extend_partial(&params, range.lo, range.hi).map_err(seq_err)?;
            // Seeds outside the requested range still widen the window; trim back.
            let w = w.slice(range.lo.max(w.lo()), range.hi.min(w.hi())).ok();
            (w, err)
        }
    };
    if let Some(e) = &error {
        eprintln!("error: {e}");
    }
    let code_run = |body: Value| if error.is_some() { Run::domain(body) } else { Run::ok(body) };
    let run = match format {
        Format::Csv => {
            let mut csv = String::from("n,t_n\n");
            if let Some(w) = &window {
                for (n, t) in w.iter() {
                    csv.push_str(&format!("{n},{t}\n"));
                }
            }
            code_run(Value::Null).with_csv(csv)
        }
        Format::Json => code_run(json!({
            "terms": window.as_ref().map(rational_terms).unwrap_or_default(),
            "error": error.as_ref().map(ToString::to_string),
        })),
    };
    Ok(run)
}

fn laurent_check(big_n: usize, p: usize, q: usize, order: Option<usize>, seed: u64, trials: usize) -> Result<Run> {
    let shape = RecurrenceShape::new(big_n, p, q).map_err(usage)?;
    let n_max = order.unwrap_or(big_n + 8);
    let orbit = symbolic_iterate(shape, n_max, SymbolicGuard::default()).map_err(domain)?;
    let rep = check_specializations(&orbit, &TrialConfig::with_seed(seed, trials));
    let failed = rep.mismatches.len();
    let body = json!({
        "shape": [big_n, p, q],
        "n_max": n_max,
        "exact_divisions": n_max + 1 - big_n,
        "monomial_counts": orbit.monomial_counts(),
        "specializations": rep,
    });
    Ok(Run::checked(body, rep.trials * (n_max + 1) - failed, failed))
}

fn somos4_orbit(rec: &RecurrenceArgs, hi: i64) -> Result<(GaleRobinsonParams, OrbitWindow)> {
    let params = gale_robinson(EqKind::Somos4, rec)?;
    let w = gale_robinson_extend(&params, 0, hi).map_err(seq_err)?;
    Ok((params, w))
}

fn companion(rec: &RecurrenceArgs, order: usize, d: i64) -> Result<Run> {
    if d < 1 {
        return Err(usage("--d must be at least 1"));
    }
    let (params, w) = somos4_orbit(rec, 4 * d + 3 * d.max(2) + 4)?;
    let (alpha, beta) = (params.alpha(), params.beta());
    let h = verify_h_invariant(&w, alpha, beta).map_err(domain)?;
    let inv = OrbitInvariants::new(alpha.clone(), beta.clone(), h).map_err(domain)?;
    let seq = CompanionSeq::generate(inv.clone(), order.max(2 * d as usize + 2)).map_err(domain)?;
    let (mut passed, mut failed) = (0, 0);
    let mut tally = |ok: bool| if ok { passed += 1 } else { failed += 1 };

    tally(seq.check_parity().is_ok());
    let mut closed_form = Vec::new();
    for n in 0..=order as i64 {
        let direct = companion_w(&inv, n).map_err(domain)?;
        if let Some(c) = inv.closed_form_w(n) {
            let ok = c == direct;
            tally(ok);
            closed_form.push(json!({ "n": n, "matches": ok }));
        }
    }
    let predicted = subsequence_coeffs_from(&seq, d).map_err(domain)?;
    let mut fits = Vec::new();
    for r in 0..d {
        let sub = subsequence(&w, d, r).map_err(seq_err)?;
        let fit = fit_somos4_coeffs(&sub);
        if let Ok(f) = &fit {
            tally(f == &predicted);
        }
        fits.push(match fit {
            Ok((a, b)) => json!({ "r": r, "alpha": a.to_string(), "beta": b.to_string() }),
            Err(e) => json!({ "r": r, "error": e.to_string() }),
        });
    }
    let table: Vec<Value> = companion_table(&seq)
        .into_iter()
        .filter(|(n, _)| *n <= order as i64)
        .map(|(n, v)| json!({ "n": n, "W": v }))
        .collect();
    let body = json!({
        "alpha": inv.alpha.to_string(),
        "beta": inv.beta.to_string(),
        "H": inv.h.to_string(),
        "I": inv.i.to_string(),
        "J": inv.j.to_string(),
        "g2": inv.g2.to_string(),
        "g3": inv.g3.to_string(),
        "discriminant": inv.discriminant().to_string(),
        "W": table,
        "closed_form": closed_form,
        "d": d,
        "subsequence_coeffs": { "alpha": predicted.0.to_string(), "beta": predicted.1.to_string() },
        "fitted": fits,
    });
    Ok(Run::checked(body, passed, failed))
}

fn ward(init: &RatList, order: usize) -> Result<Run> {
    let seeds = init.values();
    if seeds.len() != 3 || seeds.iter().any(|s| !s.is_integer()) {
        return Err(usage("--init takes three integers W2,W3,W4"));
    }
    let [w2, w3, w4] = [0, 1, 2].map(|i| seeds[i].to_integer());
    let eds = ward_generate(&w2, &w3, &w4, order).map_err(domain)?;
    let bad = eds.divisibility_failures(order);
    let pairs: usize = (1..=order).map(|n| order / n).sum();
    let body = json!({
        "terms": eds.terms().iter().enumerate().map(|(n, w)| json!({ "n": n, "W": w.to_string() })).collect::<Vec<_>>(),
        "divisibility_failures": bad,
    });
    Ok(Run::checked(body, pairs.saturating_sub(bad.len()), bad.len()))
}

fn lattice(rec: &RecurrenceArgs, range: IndexRange) -> Result<Run> {
    let eq = if rec.big_n.is_some_and(|n| n != 4) { EqKind::SomosN } else { EqKind::Somos4 };
    let params = gale_robinson(eq, rec)?;
    let order = params.order();
    let t = gale_robinson_extend(&params, range.lo, range.hi).map_err(seq_err)?;
    if t.len() < 2 * order + 1 {
        return Err(usage(format!("range too short for N = {order}: need at least {} terms", 2 * order + 1)));
    }
    let y = y_from_t(&t).map_err(seq_err)?;
    let h = verify_h_n_invariant(&t, order, params.alpha(), params.beta()).map_err(seq_err)?;
    let (mut passed, mut failed) = (0, 0);
    let mut tally = |ok: bool| if ok { passed += 1 } else { failed += 1 };
    tally(h.is_some());
    let mut body = json!({
        "N": order,
        "Y": rational_terms(&y),
        "H_N": h.as_ref().map(ToString::to_string),
    });
    if let Some(h) = h {
        let residual_zero = constraint_residual(&y, order, &h).is_some_and(|r| r.values().iter().all(Zero::is_zero));
        tally(residual_zero);
        let c = LatticeConstants::from_y(&y, order, h.clone());
        let big = order as i64;
        let constant = (y.lo()..=y.hi() - (big - 2))
            .all(|n| beta_n_integral(&y, order, &h, n) == c.beta && i_n_integral(&y, order, &h, n) == c.i);
        tally(constant);
        tally(&c.beta == params.beta());
        body["constraint_residual_zero"] = json!(residual_zero);
        body["beta_N"] = json!(c.beta.to_string());
        body["I_N"] = json!(c.i.to_string());
        body["integrals_constant"] = json!(constant);
        body["alpha_product"] = json!(c.alpha_product().to_string());
    }
    Ok(Run::checked(body, passed, failed))
}

fn volterra(lin: &LinearArgs, range: IndexRange, dx: f64, x_max: f64, seed: u64, format: Format) -> Result<Run> {
    if !(dx > 0.0 && dx <= x_max) {
        return Err(usage("need 0 < dx <= x-max"));
    }
    let params = lin.params();
    if format == Format::Csv {
        let traj = closed_form_trajectory(&params, range.lo, range.hi, dx, x_max).map_err(domain)?;
        let mut csv = String::from("x,n,Y_n\n");
        for (x, row) in traj.xs.iter().zip(&traj.rows) {
            for (k, y) in row.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", float(*x), traj.lo + k as i64, float(*y)));
            }
        }
        return Ok(Run::ok(Value::Null).with_csv(csv));
    }
    let cfg = ClosedFormConfig { seed, sites: (range.lo, range.hi), x_end: x_max, dx, ..ClosedFormConfig::default() };
    let rep = check_closed_form(&params, &cfg).map_err(domain)?;
    let scan = positivity_scan(&params, x_max, (x_max / 100.0).max(dx), range.lo, range.hi).map_err(domain)?;
    let checks = [
        rep.max_bilinear_rel < 1e-8,
        rep.max_volterra_rel < 1e-8,
        rep.bilinear_series_zero,
        rep.volterra_series_zero,
        rep.tau_substitution_ok,
        rep.rk4_max_deviation < 1e-6,
        rep.constraint_max < 1e-6,
    ];
    let passed = checks.iter().filter(|&&c| c).count();
    let body = json!({ "closed_form": rep, "positivity": scan });
    Ok(Run::checked(body, passed, checks.len() - passed))
}

fn strings(coeffs: &[Rational]) -> Vec<String> {
    coeffs.iter().map(ToString::to_string).collect()
}

fn series(lin: &LinearArgs, order: usize, range: IndexRange) -> Result<Run> {
    let params = lin.params();
    let b = b_series(&params.p, &params.q, order).map_err(domain)?;
    let a = if params.p.is_zero() { None } else { Some(a_series(&params.p, &params.q, order).map_err(domain)?) };
    let a_res = a_residual(&params.q, order).map_err(domain)?;
    let (mut passed, mut failed) = (0, 0);
    let mut tally = |ok: bool| if ok { passed += 1 } else { failed += 1 };
    tally(a_res.is_zero());
    let mut rows = Vec::new();
    for n in range.lo..=range.hi {
        let tau = tau_series(n, &params, order).map_err(domain)?;
        let y = y_series_closed(n, &params, order.saturating_sub(2)).map_err(domain)?;
        let bil = bilinear_residual_series(n, &params, order).map_err(domain)?.is_zero();
        let vol = volterra_residual_series(n, &params, order.saturating_sub(2)).map_err(domain)?.is_zero();
        tally(bil);
        tally(vol);
        rows.push(json!({
            "n": n,
            "tau": strings(tau.coeffs()),
            "Y": strings(y.coeffs()),
            "bilinear_residual_zero": bil,
            "volterra_residual_zero": vol,
        }));
    }
    let body = json!({
        "order": order,
        "B": strings(b.coeffs()),
        "B_egf": strings(&b.to_egf()),
        "A": a.as_ref().map(|a| strings(a.coeffs())),
        "A_residual_zero": a_res.is_zero(),
        "sites": rows,
    });
    Ok(Run::checked(body, passed, failed))
}
