use std::fmt::Write as _;
use std::path::Path;

use isopair::algebra::pair::PairDocument;
use isopair::algebra::{to_alts, verify_alts, verify_anti_jordan, verify_isotopic_pair};
use isopair::bunches::{
    cross_check_isorep, enlarge_bunch, i_pair, split_structure_check, standard_isorep, verify_bunch,
    verify_lie_representation, BunchDocument, Isorep, IsorepDocument, LieAlgebraDocument, LieAlgebraSpec,
};
use isopair::classical::{integrate_full_with, reduce_and_integrate, xi_check, ClassicalState, XiForm};
use isopair::errata::errata_audit;
use isopair::ode::{AdaptiveConfig, Method};
use isopair::oscillator::{audit_structure_table, build_pair, parse_scalar_text, r_matrices, resolve_params, EpsilonParams};
use isopair::quantum::dynamics::similarity_flow_deviation;
use isopair::quantum::representation::zero_extension;
use isopair::quantum::{
    find_representation, hidden_hamiltonian_audit, integrate_quantum, verify_representation, RepresentationDocument, SearchConfig,
};
use isopair::superalgebra::{build_super, hom_pair, verify_super, SuperDocument};
use isopair::{IsotopicPair, Matrix, Rational};
use serde_json::{json, Map, Value};

use crate::cli::{
    AppendixArgs, AppendixCommand, ClassicalArgs, EpsArgs, ErrataArgs, OscillatorArgs, QuantumArgs, SearchArgs, VerifyArgs,
};
use crate::output::{in_file, pretty, read_json, CliError, CliResult, Outcome};

const PARAM_NAMES: [&str; 6] = ["eps1", "eps_t1", "eps2", "eps_t2", "eps3", "eps_t3"];

impl EpsArgs {
    pub fn resolve(&self) -> CliResult<EpsilonParams<Rational>> {
        let parse = |name: &str, text: &str| parse_scalar_text(text).map_err(|e| CliError::Usage(format!("--{name}: {e}")));
        Ok(resolve_params(parse("eps1", &self.eps1)?, parse("eps2", &self.eps2)?, parse("eps3", &self.eps3)?)?)
    }
}

fn params_json(e: &EpsilonParams<Rational>) -> Value {
    let map: Map<String, Value> = PARAM_NAMES
        .iter()
        .zip(e.as_array())
        .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
        .collect();
    Value::Object(map)
}

fn params_line(e: &EpsilonParams<Rational>) -> String {
    let parts: Vec<String> = PARAM_NAMES.iter().zip(e.as_array()).map(|(k, v)| format!("{k}={v}")).collect();
    parts.join(" ")
}

fn matrix_rows(m: &Matrix<Rational>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.to_string()).collect()).collect()
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Pair axioms, the triple system, and the superalgebra. The anti-Jordan
/// identities are reported without gating.
fn pair_section(pair: &IsotopicPair<Rational>) -> (bool, String, Value) {
    let iso = verify_isotopic_pair(pair, 0.0);
    let anti = verify_anti_jordan(pair, 0.0);
    let alts = to_alts(pair);
    let triple = verify_alts(&alts, 0.0);
    let mut summary = String::new();
    summary.push_str(&iso.summary());
    summary.push_str(&anti.summary());
    summary.push_str(&triple.summary());
    let mut passed = iso.passed && triple.passed;
    let (super_report, super_doc) = if triple.passed {
        match build_super(&alts, 0.0) {
            Ok(sa) => {
                let r = verify_super(&sa, 0.0);
                let (e, o) = sa.superdimension();
                let _ = writeln!(summary, "superdimension ({e}|{o})");
                summary.push_str(&r.summary());
                passed &= r.passed;
                (serde_json::to_value(&r).expect("report"), serde_json::to_value(SuperDocument::new(&sa)).expect("doc"))
            }
            Err(e) => {
                passed = false;
                let _ = writeln!(summary, "superalgebra: {e}");
                (json!({ "error": e.to_string() }), Value::Null)
            }
        }
    } else {
        let _ = writeln!(summary, "superalgebra: skipped, the triple system fails");
        (Value::Null, Value::Null)
    };
    let report = json!({
        "isotopic_pair": iso,
        "anti_jordan": anti,
        "triple_system": triple,
        "superalgebra": super_report,
        "superalgebra_constants": super_doc,
        "passed": passed,
    });
    (passed, summary, report)
}

pub fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let doc: PairDocument = read_json(&a.pair)?;
    let pair = doc.into_pair().map_err(in_file(&a.pair))?;
    let (passed, body, section) = pair_section(&pair);
    let summary = format!("verify {}  ({}|{})\n{body}result: {}\n", a.pair.display(), pair.n1(), pair.n2(), verdict(passed));
    let report = json!({
        "command": "verify",
        "input": a.pair.display().to_string(),
        "n1": pair.n1(),
        "n2": pair.n2(),
        "checks": section,
        "passed": passed,
    });
    Ok(Outcome { passed, summary, report, files: Vec::new() })
}

pub fn oscillator(a: &OscillatorArgs) -> CliResult<Outcome> {
    let e = a.eps.resolve()?;
    let osc = build_pair(&e)?;
    let (passed, body, section) = pair_section(&osc.pair);
    let rm = r_matrices(&e)?;
    let table = audit_structure_table(&e)?;
    let errata = errata_audit(&e)?;

    let mut summary = format!("oscillator  {}\n{body}", params_line(&e));
    let mismatches: Vec<Value> = rm
        .mismatches()
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "basis": c.basis,
                "computed": matrix_rows(&c.computed),
                "printed": matrix_rows(&c.printed),
            })
        })
        .collect();
    let _ = writeln!(summary, "R matrices: {} printed blocks differ, off-block max {}", mismatches.len(), sci(rm.off_block));
    for c in rm.mismatches() {
        let _ = writeln!(summary, "  {} {}", c.label, c.basis);
    }
    let _ = writeln!(
        summary,
        "bracket table: {} match, {} mismatch, {} not comparable",
        table.matches, table.mismatches, table.not_comparable
    );
    for line in &table.lines {
        if let isopair::oscillator::LineStatus::Mismatch { computed } = &line.status {
            let _ = writeln!(summary, "  printed {}  computed {}", line.printed, computed);
        }
    }
    let _ = writeln!(summary, "errata flagged: {}\nresult: {}", errata.flagged, verdict(passed));

    let pair_doc = PairDocument::from_pair(&osc.pair)?;
    let report = json!({
        "command": "oscillator",
        "params": params_json(&e),
        "genericity": e.genericity(),
        "checks": section,
        "r_matrices": { "mismatches": mismatches, "off_block": rm.off_block },
        "table_audit": table,
        "errata": errata,
        "passed": passed,
    });
    Ok(Outcome { passed, summary, report, files: vec![("pair.json".into(), pretty(&pair_doc))] })
}

pub fn errata(a: &ErrataArgs) -> CliResult<Outcome> {
    let e = a.eps.resolve()?;
    let audit = errata_audit(&e)?;
    let mut summary = format!("errata  {}\n", params_line(&e));
    for item in &audit.items {
        let _ = writeln!(
            summary,
            "  {:<4} {:<24} printed {}  computed {}",
            if item.flagged { "DIFF" } else { "ok" },
            item.id,
            item.printed,
            item.computed
        );
    }
    let _ = writeln!(summary, "{} of {} items differ", audit.flagged, audit.items.len());
    let report = json!({ "command": "errata", "params": params_json(&e), "audit": audit, "passed": true });
    Ok(Outcome { passed: true, summary, report, files: Vec::new() })
}

pub fn classical(a: &ClassicalArgs) -> CliResult<Outcome> {
    let e_exact = a.eps.resolve()?;
    let e = e_exact.to_f64();
    let s0 = ClassicalState::from_slice(&a.state)?;
    let reduced = reduce_and_integrate(&s0, &e, a.t_end, a.dt);
    let traj = match (&reduced, a.method) {
        (Ok(red), Method::Rk4) => red.full.clone(),
        _ => {
            let cfg = AdaptiveConfig { abs_tol: a.abs_tol, rel_tol: a.rel_tol, ..Default::default() };
            integrate_full_with(&s0, &e, a.t_end, a.dt, a.method, &cfg)?
        }
    };
    let drift = traj.drift(&e)?;
    let mut csv = Vec::new();
    traj.write_csv(&e, &mut csv, a.stride)?;

    let mut summary = format!(
        "classical  {}\nstate {:?}  t_end {}  dt {}  method {}  steps {}\n",
        params_line(&e_exact),
        a.state,
        a.t_end,
        a.dt,
        a.method,
        traj.steps
    );
    let drift_ok = drift.max_conserved() < a.drift_tol;
    let _ = writeln!(
        summary,
        "drift: I1^2 {}  I2^2 {}  L {}  Lambda {}  (bound {})  {}",
        sci(drift.i1sq),
        sci(drift.i2sq),
        sci(drift.l),
        drift.lambda.map_or("n/a".into(), sci),
        sci(a.drift_tol),
        verdict(drift_ok)
    );
    let _ = writeln!(summary, "printed mixed integral drift {}", sci(drift.l_printed));
    let mut passed = drift_ok;

    let reduction = match &reduced {
        Ok(red) => {
            let ok = red.reconstruction_error < 1e-6;
            passed &= ok;
            let _ = writeln!(summary, "reduced reconstruction error {}  {}", sci(red.reconstruction_error), verdict(ok));
            json!({ "i1": red.i1, "i2": red.i2, "reconstruction_error": red.reconstruction_error, "passed": ok })
        }
        Err(err) => {
            let _ = writeln!(summary, "reduced reconstruction: not available ({err})");
            json!({ "error": err.to_string() })
        }
    };

    let mut xi = Map::new();
    for form in [XiForm::Printed, XiForm::Derived] {
        let name = match form {
            XiForm::Printed => "printed",
            XiForm::Derived => "derived",
        };
        match xi_check(&traj, &e, form) {
            Ok(fit) => {
                let ok = fit.slope_error < 1e-4 && fit.max_residual < 1e-6;
                if form == XiForm::Derived {
                    passed &= ok;
                }
                let _ = writeln!(
                    summary,
                    "xi ({name}): predicted slope {:.6}  fitted {:.6}  max residual {}  {}",
                    fit.predicted_slope,
                    fit.fitted_slope,
                    sci(fit.max_residual),
                    if form == XiForm::Derived { verdict(ok) } else if ok { "agrees" } else { "disagrees" }
                );
                xi.insert(name.into(), json!({ "fit": fit, "agrees": ok }));
            }
            Err(err) => {
                let _ = writeln!(summary, "xi ({name}): not available ({err})");
                xi.insert(name.into(), json!({ "error": err.to_string() }));
            }
        }
    }
    let _ = writeln!(summary, "result: {}", verdict(passed));

    let first = traj.invariants.first().copied();
    let report = json!({
        "command": "classical",
        "params": params_json(&e_exact),
        "state": a.state,
        "integrator": { "method": a.method, "dt": a.dt, "t_end": a.t_end, "steps": traj.steps, "stride": a.stride },
        "initial_invariants": first,
        "drift": drift,
        "drift_tol": a.drift_tol,
        "reduction": reduction,
        "xi": xi,
        "passed": passed,
    });
    Ok(Outcome { passed, summary, report, files: vec![("trajectory.csv".into(), csv)] })
}

pub fn quantum(a: &QuantumArgs) -> CliResult<Outcome> {
    let e_exact = a.eps.resolve()?;
    let e = e_exact.to_f64();
    let doc: RepresentationDocument = read_json(&a.rep)?;
    let rep = doc.to_rational().map_err(in_file(&a.rep))?.to_f64();
    let pair = build_pair(&e)?.pair;
    if rep.t1.len() != pair.n1() || rep.t2.len() != pair.n2() {
        return Err(CliError::Usage(format!(
            "{}: expected {} and {} matrices, found {} and {}",
            a.rep.display(),
            pair.n1(),
            pair.n2(),
            rep.t1.len(),
            rep.t2.len()
        )));
    }
    let valid = verify_representation(&rep, &pair, a.audit_tol)?;
    let traj = integrate_quantum(&rep, &e, a.t_end, a.dt)?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv, a.stride)?;
    let mut files = vec![("relations.csv".to_string(), csv)];
    if a.matrices {
        let mut jsonl = Vec::new();
        traj.write_matrices_jsonl(&mut jsonl, a.stride)?;
        files.push(("operators.jsonl".into(), jsonl));
    }

    let mut summary = format!(
        "quantum  {}\nrep {}  dimW {}  t_end {}  dt {}\n",
        params_line(&e_exact),
        a.rep.display(),
        rep.dim_w,
        a.t_end,
        a.dt
    );
    summary.push_str(&valid.summary());
    let drift_ok = traj.drift < a.drift_tol;
    let mut passed = valid.passed && drift_ok;
    let _ = writeln!(
        summary,
        "relations: initial residual {}  drift {}  (bound {})  {}",
        sci(traj.initial_residual),
        sci(traj.drift),
        sci(a.drift_tol),
        verdict(drift_ok)
    );

    let split = valid.flags.get("split").copied().unwrap_or(false);
    let audit = if valid.passed && split {
        let audit = hidden_hamiltonian_audit(&rep, &e, a.audit_tol)?;
        let _ = writeln!(
            summary,
            "hidden hamiltonian: max residual {}  confirmed {}  normalized {}",
            sci(audit.max_residual),
            audit.confirmed,
            audit.normalized
        );
        let flow = audit.confirmed.then(|| similarity_flow_deviation(&audit.hamiltonian, &traj, a.stride));
        if let Some(dev) = flow {
            let ok = dev < 1e-6;
            passed &= ok;
            let _ = writeln!(summary, "similarity flow deviation {}  {}", sci(dev), verdict(ok));
        }
        json!({ "audit": audit, "similarity_flow_deviation": flow })
    } else {
        let _ = writeln!(summary, "hidden hamiltonian: skipped, needs a valid split representation");
        Value::Null
    };

    let refinement = if a.refine {
        let steps = [0.02, 0.01, 0.005];
        let mut drifts = Vec::new();
        for dt in steps {
            drifts.push(integrate_quantum(&rep, &e, a.t_end, dt)?.drift);
        }
        let orders: Vec<f64> = drifts.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        let _ = writeln!(summary, "refinement: drifts {:?}  observed orders {:?}", drifts.iter().map(|x| sci(*x)).collect::<Vec<_>>(), orders);
        json!({ "dt": steps, "drift": drifts, "observed_order": orders })
    } else {
        Value::Null
    };
    let _ = writeln!(summary, "result: {}", verdict(passed));

    let report = json!({
        "command": "quantum",
        "params": params_json(&e_exact),
        "input": a.rep.display().to_string(),
        "dim_w": rep.dim_w,
        "representation": valid,
        "integrator": { "method": "rk4", "dt": a.dt, "t_end": a.t_end, "stride": a.stride },
        "relations": traj.relations,
        "initial_residual": traj.initial_residual,
        "initial_rate": traj.initial_rate,
        "drift": traj.drift,
        "drift_tol": a.drift_tol,
        "hidden_hamiltonian": audit,
        "refinement": refinement,
        "passed": passed,
    });
    Ok(Outcome { passed, summary, report, files })
}

fn search_target(a: &SearchArgs) -> CliResult<(String, IsotopicPair<Rational>)> {
    if let Some(hom) = &a.hom {
        if hom.len() != 2 {
            return Err(CliError::Usage(format!("--hom expects n,m, found {} values", hom.len())));
        }
        Ok((format!("hom({},{})", hom[0], hom[1]), hom_pair(hom[0], hom[1])?))
    } else if let Some(path) = &a.pair {
        let doc: PairDocument = read_json(path)?;
        Ok((path.display().to_string(), doc.into_pair().map_err(in_file(path))?))
    } else {
        let e = a.eps.resolve()?;
        Ok((format!("oscillator {}", params_line(&e)), build_pair(&e)?.pair))
    }
}

pub fn search(a: &SearchArgs) -> CliResult<Outcome> {
    let (label, full) = search_target(a)?;
    let (target, keep) = match (&a.keep1, &a.keep2) {
        (Some(k1), Some(k2)) => (full.restrict(k1, k2)?, Some((k1.clone(), k2.clone()))),
        _ => (full.clone(), None),
    };
    let target = target.to_f64();
    let cfg = SearchConfig {
        seeds: a.seeds,
        max_iters: a.max_iters,
        tol: a.tol,
        min_norm_sq: a.min_norm_sq,
        min_generator_norm_sq: a.min_generator_norm_sq,
        base_seed: a.base_seed,
        ..Default::default()
    };
    let mut summary = format!("search  target {label}");
    if let Some((k1, k2)) = &keep {
        let _ = write!(summary, "  restricted to {k1:?} x {k2:?}");
    }
    let _ = writeln!(summary, "\nseeds {}  base seed {}  max iters {}", cfg.seeds, cfg.base_seed, cfg.max_iters);

    if let Some(n) = a.sweep {
        let mut rows = Vec::new();
        for d1 in 1..=n {
            for d2 in 1..=n {
                let r = find_representation(&target, d1, d2, &cfg)?;
                let best = r.runs.iter().find(|run| run.seed == r.seed);
                let gen = best.map_or(0.0, |run| run.min_generator_norm_sq);
                let _ = writeln!(
                    summary,
                    "  ({d1}|{d2})  {:<7} residual {}  objective {}  min |T(x)|^2 {}",
                    if r.success { "found" } else { "none" },
                    sci(r.residual),
                    sci(r.objective),
                    sci(gen)
                );
                rows.push(json!({
                    "d1": d1, "d2": d2, "success": r.success, "residual": r.residual,
                    "objective": r.objective, "seed": r.seed, "successes": r.successes,
                    "min_generator_norm_sq": gen,
                }));
            }
        }
        let report = json!({ "command": "search", "target": label, "config": cfg, "sweep": rows, "passed": true });
        return Ok(Outcome { passed: true, summary, report, files: Vec::new() });
    }

    let result = find_representation(&target, a.d1, a.d2, &cfg)?;
    let _ = writeln!(
        summary,
        "({}|{})  success {}  residual {}  objective {}  seed {}  {} of {} seeds succeeded",
        a.d1,
        a.d2,
        result.success,
        sci(result.residual),
        sci(result.objective),
        result.seed,
        result.successes,
        result.runs.len()
    );
    let mut files = vec![("search.json".to_string(), pretty(&result))];
    if result.success {
        files.push(("rep.json".into(), pretty(&RepresentationDocument::from_rep(&result.rep))));
        if let Some((k1, k2)) = &keep {
            let ext = zero_extension(&result.rep, full.n1(), full.n2(), k1, k2)?;
            let check = verify_representation(&ext, &full.to_f64(), cfg.tol.max(1e-9))?;
            let _ = writeln!(summary, "zero extension to the full pair: max residual {}", sci(check.max_residual()));
            files.push(("rep_extended.json".into(), pretty(&RepresentationDocument::from_rep(&ext))));
        }
    }
    let _ = writeln!(summary, "result: {}", verdict(result.success));
    let report = json!({
        "command": "search",
        "target": label,
        "restriction": keep.as_ref().map(|(k1, k2)| json!({ "keep1": k1, "keep2": k2 })),
        "config": cfg,
        "result": result,
        "passed": result.success,
    });
    Ok(Outcome { passed: result.success, summary, report, files })
}

/// `sl2`, `abelian:N`, or the path of a Lie algebra document.
pub fn load_lie(spec: &str) -> CliResult<LieAlgebraSpec<Rational>> {
    if spec == "sl2" {
        return Ok(LieAlgebraSpec::sl2());
    }
    if let Some(n) = spec.strip_prefix("abelian:") {
        let n: usize = n.parse().map_err(|_| CliError::Usage(format!("--g: bad dimension in '{spec}'")))?;
        return Ok(LieAlgebraSpec::abelian(n));
    }
    let path = Path::new(spec);
    let doc: LieAlgebraDocument = read_json(path)?;
    doc.into_spec().map_err(in_file(path))
}

fn isorep_section(iso: &Isorep<Rational>, g: &LieAlgebraSpec<Rational>, summary: &mut String) -> CliResult<(bool, Value)> {
    let cc = cross_check_isorep(iso, g, 0.0)?;
    summary.push_str(&cc.direct.summary());
    summary.push_str(&cc.via_pair.summary());
    let _ = writeln!(summary, "routes agree: {}", cc.agree);
    let mut passed = cc.direct.passed && cc.via_pair.passed && cc.agree;
    let split = if iso.grading.is_some() && cc.direct.passed {
        let s = split_structure_check(iso, g, 0.0)?;
        let _ = writeln!(
            summary,
            "split structure ({}|{}): q iso {}  rho1 rep {}  rho2 rep {}  intertwines {}  consistent {}",
            s.d1, s.d2, s.q_is_isomorphism, s.rho1_is_representation, s.rho2_is_representation, s.q_intertwines, s.consistent
        );
        passed &= s.consistent;
        serde_json::to_value(&s).expect("split")
    } else {
        Value::Null
    };
    Ok((passed, json!({ "cross_check": cc, "split_structure": split })))
}

pub fn appendix(a: &AppendixArgs) -> CliResult<Outcome> {
    let mut summary = String::new();
    let mut files = Vec::new();
    let (name, passed, body) = match &a.command {
        AppendixCommand::Lie { g } => {
            let spec = load_lie(g)?;
            let jac = spec.verify(0.0);
            let ad = verify_lie_representation(&spec.adjoint(), &spec, 0.0)?;
            let _ = writeln!(summary, "lie algebra {g}  dim {}", spec.dim());
            summary.push_str(&jac.summary());
            summary.push_str(&ad.summary());
            ("lie", jac.passed && ad.passed, json!({ "g": g, "dim": spec.dim(), "lie": jac, "adjoint": ad }))
        }
        AppendixCommand::IPair { g } => {
            let spec = load_lie(g)?;
            let pair = i_pair(&spec)?;
            let (ok, body, section) = pair_section(&pair);
            let _ = writeln!(summary, "I(g) for {g}  ({}|{})", pair.n1(), pair.n2());
            summary.push_str(&body);
            files.push(("pair.json".into(), pretty(&PairDocument::from_pair(&pair)?)));
            ("i-pair", ok, json!({ "g": g, "n1": pair.n1(), "n2": pair.n2(), "checks": section }))
        }
        AppendixCommand::Bunch { bunch } => {
            let doc: BunchDocument = read_json(bunch)?;
            let b = doc.into_bunch().map_err(in_file(bunch))?;
            let (report, _) = verify_bunch(&b, 0.0)?;
            let _ = writeln!(summary, "bunch {}  dim {}", bunch.display(), b.dim());
            summary.push_str(&report.report.summary());
            let _ = writeln!(summary, "complete: {}", report.complete);
            let mut ok = report.report.passed && report.complete;
            let enlarged = if ok {
                let pair = enlarge_bunch(&b, 0.0)?;
                let (pair_ok, body, section) = pair_section(&pair);
                let _ = writeln!(summary, "enlarged pair ({}|{})", pair.n1(), pair.n2());
                summary.push_str(&body);
                ok &= pair_ok;
                files.push(("pair.json".into(), pretty(&PairDocument::from_pair(&pair)?)));
                section
            } else {
                Value::Null
            };
            ("bunch", ok, json!({ "input": bunch.display().to_string(), "bunch": report, "enlarged": enlarged }))
        }
        AppendixCommand::Isorep { g, isorep } => {
            let spec = load_lie(g)?;
            let doc: IsorepDocument = read_json(isorep)?;
            let iso = doc.into_isorep().map_err(in_file(isorep))?;
            let _ = writeln!(summary, "isorepresentation {} of {g}  dim {}", isorep.display(), iso.dim());
            let (ok, section) = isorep_section(&iso, &spec, &mut summary)?;
            ("isorep", ok, json!({ "g": g, "input": isorep.display().to_string(), "checks": section }))
        }
        AppendixCommand::Standard { g } => {
            let spec = load_lie(g)?;
            let iso = standard_isorep(&spec);
            let _ = writeln!(summary, "standard isorepresentation of {g}  dim {}", iso.dim());
            let (ok, section) = isorep_section(&iso, &spec, &mut summary)?;
            files.push(("isorep.json".into(), pretty(&IsorepDocument::from_isorep(&iso))));
            ("standard", ok, json!({ "g": g, "checks": section }))
        }
    };
    let _ = writeln!(summary, "result: {}", verdict(passed));
    let report = json!({ "command": "appendix", "subcommand": name, "result": body, "passed": passed });
    Ok(Outcome { passed, summary, report, files })
}
