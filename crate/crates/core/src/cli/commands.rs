//! One function per job command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::certs::{cofactors_of, rows_of, strings, Certificate, RingSpec, SegmentSpec};
use super::job::{Effective, Inputs};
use super::CliError;
use crate::geometry::{
    construct_field_on_sigma, degeneracy_ideal, exterior_derivative, sigma_without, verify_full_rank, FieldOnSigma, FormTuple,
    VectorField,
};
use crate::grid::GridSpec;
use crate::groebner::{Ideal, MembershipCertificate};
use crate::homotopy::{
    replace_all_forms, replacement_segment, verify_contraction_invariance, verify_rank, DriverOptions, Homotopy,
    PipelineOutcome, RankReport, RankVerdict, StepPath,
};
use crate::numeric::min_singular_sample;
use crate::ring::{format_rational, Poly, Rational, Ring, VarKind};
use crate::semitrans::{
    extract_certificate, tangency_chain, ChainStatus, PerturbOptions, PerturbationRecord, TangencyCertificate,
};
use crate::solver::{bezout_lift, solve_restricted, stability_report, BezoutData, RestrictedSolution};

/// Command results before they are wrapped into a report.
pub struct Output {
    pub results: Value,
    pub certificates: Vec<Certificate>,
    /// Exit code 2 or 3 with a message when the mathematics did not go through.
    pub failure: Option<(i32, String)>,
    pub summary: Vec<String>,
}

impl Output {
    fn ok(results: Value, certificates: Vec<Certificate>, summary: Vec<String>) -> Self {
        Self { results, certificates, failure: None, summary }
    }
}

fn rs(r: &Rational) -> String {
    format_rational(r)
}

fn ring_of(p: &Ring) -> RingSpec {
    RingSpec::of(p)
}

pub fn rank_cert(name: &str, forms: &FormTuple, c: &MembershipCertificate) -> Certificate {
    Certificate::Rank { name: name.into(), ring: ring_of(forms.ring()), rows: rows_of(forms.rows()), cofactors: cofactors_of(c) }
}

fn field_cert(name: &str, forms: &FormTuple, k: usize, f: &FieldOnSigma) -> Certificate {
    Certificate::FieldPairing {
        name: name.into(),
        ring: ring_of(forms.ring()),
        rows: rows_of(forms.rows()),
        k,
        field: f.field.strings(),
        cofactors: f.certificates.iter().map(cofactors_of).collect(),
    }
}

fn tangency_cert(name: &str, sigma: &Ideal, l: &VectorField, c: &TangencyCertificate) -> Certificate {
    Certificate::Tangency {
        name: name.into(),
        ring: ring_of(sigma.ring()),
        field: l.strings(),
        sigma: strings(sigma.generators()),
        selected: c.selected.clone(),
        order: c.order,
        cofactors: cofactors_of(&c.unit),
    }
}

fn bezout_cert(name: &str, sigma: &Ideal, l: &VectorField, c: &TangencyCertificate, b: &BezoutData) -> Certificate {
    Certificate::Bezout {
        name: name.into(),
        ring: ring_of(sigma.ring()),
        field: l.strings(),
        sigma: strings(sigma.generators()),
        selected: c.selected.clone(),
        a: b.a.iter().map(|r| strings(r)).collect(),
        b: strings(&b.b),
    }
}

fn solution_cert(name: &str, sigma: &Ideal, l: &VectorField, s: &RestrictedSolution) -> Certificate {
    Certificate::Solution {
        name: name.into(),
        ring: ring_of(sigma.ring()),
        field: l.strings(),
        sigma: strings(sigma.generators()),
        f: s.f.to_string(),
        g: s.g.to_string(),
        cofactors: cofactors_of(&s.residual),
        parameter: None,
        specializations: Vec::new(),
    }
}

fn homotopy_cert(name: &str, h: &Homotopy) -> Result<Certificate, CliError> {
    Ok(Certificate::Homotopy {
        name: name.into(),
        ring: ring_of(h.ring()),
        t: h.t_name().into(),
        start: rows_of(h.start().map_err(CliError::math)?.rows()),
        end: rows_of(h.end().map_err(CliError::math)?.rows()),
        segments: h
            .segments()
            .iter()
            .map(|s| SegmentSpec {
                label: s.label.clone(),
                rows: rows_of(s.forms.rows()),
                interval: (rs(&s.interval.0), rs(&s.interval.1)),
            })
            .collect(),
    })
}

fn rank_json(r: &RankReport) -> Value {
    let (verdict, detail) = match &r.verdict {
        RankVerdict::UnitIdealCertified(_) => ("unit-ideal-certified", Value::Null),
        RankVerdict::SampledOnly(m) => ("sampled-only", json!({ "min_max_abs_minor": rs(m) })),
        RankVerdict::Failed(w) => ("failed", json!({ "witness": w.iter().map(rs).collect::<Vec<_>>() })),
    };
    json!({ "segment": r.label, "verdict": verdict, "detail": detail, "resource_fallback": r.resource_fallback })
}

fn segment_rank_certs(prefix: &str, h: &Homotopy, reports: &[RankReport]) -> Vec<Certificate> {
    h.segments()
        .iter()
        .zip(reports)
        .filter_map(|(s, r)| match &r.verdict {
            RankVerdict::UnitIdealCertified(c) => Some(rank_cert(&format!("{prefix} rank of segment {}", s.label), &s.forms, c)),
            _ => None,
        })
        .collect()
}

fn chain_failure(status: &ChainStatus, steps: usize) -> Option<(i32, String, Vec<String>)> {
    match status {
        ChainStatus::ReachedUnit(_) => None,
        ChainStatus::Stabilized(i) => Some((2, "not semi-transversal".into(), strings(i.generators()))),
        ChainStatus::BudgetExceeded => Some((3, format!("chain undecided after {steps} steps"), Vec::new())),
    }
}

pub fn rank_locus(inp: &Inputs, _opts: &Effective) -> Result<Output, CliError> {
    let forms = inp.forms()?;
    let subset = inp.job.subset.clone().unwrap_or_else(|| (0..forms.q()).collect());
    let locus = degeneracy_ideal(&forms, &subset).map_err(CliError::input)?;
    let basis = locus.ideal.reduced_basis().map_err(CliError::from_groebner)?;
    let empty = basis.is_unit();
    let minors: Vec<Value> = locus.minors.iter().map(|(rows, p)| json!({ "rows": rows, "minor": p.to_string() })).collect();
    let mut certs = Vec::new();
    if empty {
        let c = crate::geometry::unit_certificate_over(&locus.minor_polys(), &inp.ring, locus.ideal.budget())
            .map_err(CliError::from_groebner)?
            .expect("unit basis");
        let sub = forms.select(&subset).map_err(CliError::input)?;
        certs.push(rank_cert("locus is empty", &sub, &c));
    }
    let results = json!({
        "subset": subset,
        "minors": minors,
        "groebner_basis": strings(&basis.elements),
        "locus_empty": empty,
        "pairs_considered": basis.stats.pairs_considered,
    });
    let summary = vec![format!("{} minors; locus {}", locus.minors.len(), if empty { "empty" } else { "nonempty" })];
    Ok(Output::ok(results, certs, summary))
}

pub fn rank_check(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    let forms = inp.forms()?;
    let verdict = verify_full_rank(&forms).map_err(CliError::from_geometry)?;
    let grid = opts.grid(forms.n())?;
    let sample = min_singular_sample(&forms, &grid, None).map_err(CliError::input)?;
    let basis = verdict.locus.ideal.reduced_basis().map_err(CliError::from_groebner)?;
    let results = json!({
        "full_rank": verdict.full_rank,
        "minors": strings(&verdict.locus.minor_polys()),
        "locus": strings(&basis.elements),
        "numeric": {
            "min_singular_value": sample.min_singular(),
            "at": sample.point.iter().map(rs).collect::<Vec<_>>(),
        },
    });
    let mut out = Output::ok(results, Vec::new(), vec![format!("full rank: {}", verdict.full_rank)]);
    match &verdict.certificate {
        Some(c) => out.certificates.push(rank_cert("full rank", &forms, c)),
        None => out.failure = Some((2, "the forms drop rank somewhere".into())),
    }
    Ok(out)
}

fn chain_json(levels: &[Vec<Poly>]) -> Value {
    json!(levels.iter().map(|l| strings(l)).collect::<Vec<_>>())
}

pub fn tangency_order(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    let sigma = inp.ideal()?.with_budget(opts.budget());
    let l = inp.field()?;
    let chain = tangency_chain(&sigma, &l, opts.chain_steps).map_err(CliError::from_groebner)?;
    if let Some((code, msg, locus)) = chain_failure(&chain.status, opts.chain_steps) {
        let summary = vec![format!("chain stopped at level {} with locus {:?}", chain.levels.len() - 1, locus)];
        let results = json!({ "order": Value::Null, "locus": locus, "levels": chain_json(&chain.levels) });
        return Ok(Output { results, certificates: Vec::new(), failure: Some((code, msg)), summary });
    }
    let cert = extract_certificate(&chain, &sigma, &l).map_err(CliError::from_semitrans)?;
    let results = json!({ "order": cert.order, "levels": chain_json(&chain.levels), "selected": cert.selected });
    Ok(Output::ok(results, vec![tangency_cert("tangency", &sigma, &l, &cert)], vec![format!("tangency order {}", cert.order)]))
}

type Certified = (Ideal, VectorField, TangencyCertificate, BezoutData);

fn certify(inp: &Inputs, opts: &Effective) -> Result<Result<Certified, Output>, CliError> {
    let sigma = inp.ideal()?.with_budget(opts.budget());
    let l = inp.field()?;
    let chain = tangency_chain(&sigma, &l, opts.chain_steps).map_err(CliError::from_groebner)?;
    if let Some((code, msg, locus)) = chain_failure(&chain.status, opts.chain_steps) {
        let results = json!({ "locus": locus, "levels": chain_json(&chain.levels) });
        return Ok(Err(Output { results, certificates: Vec::new(), failure: Some((code, msg.clone())), summary: vec![msg] }));
    }
    let cert = extract_certificate(&chain, &sigma, &l).map_err(CliError::from_semitrans)?;
    let bez = bezout_lift(&cert);
    Ok(Ok((sigma, l, cert, bez)))
}

pub fn certificate(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    let (sigma, l, cert, bez) = match certify(inp, opts)? {
        Ok(c) => c,
        Err(out) => return Ok(out),
    };
    let results = json!({
        "order": cert.order,
        "functions": strings(&cert.functions),
        "a": bez.a.iter().map(|r| strings(r)).collect::<Vec<_>>(),
        "b": strings(&bez.b),
    });
    let certs = vec![tangency_cert("tangency", &sigma, &l, &cert), bezout_cert("bezout", &sigma, &l, &cert, &bez)];
    Ok(Output::ok(results, certs, vec![format!("order {}, {} functions", cert.order, cert.functions.len())]))
}

/// Deterministic sample of small rationals for parametric checks.
pub fn sample_values(seed: u64, count: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < count {
        let v = Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=9).into());
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn solve_common(inp: &Inputs, opts: &Effective, parametric: bool) -> Result<Output, CliError> {
    let params = inp.ring.indices_of_kind(VarKind::Parameter);
    if parametric && params.len() != 1 {
        return Err(CliError::Input("solve-parametric needs exactly one parameter".into()));
    }
    let g = inp.g()?;
    let (sigma, l, cert, bez) = match certify(inp, opts)? {
        Ok(c) => c,
        Err(out) => return Ok(out),
    };
    let sol = solve_restricted(&l, &sigma, &g, &cert, &bez).map_err(CliError::from_solver)?;
    let mut sc = solution_cert("solution", &sigma, &l, &sol);
    let mut results = json!({
        "f": sol.f.to_string(),
        "order": cert.order,
        "residual": sol.residual.target.to_string(),
    });
    if parametric {
        let name = inp.ring.vars()[params[0]].name.clone();
        let values: Vec<String> = match &inp.job.specializations {
            Some(v) => v.clone(),
            None => sample_values(opts.seed, 5).iter().map(rs).collect(),
        };
        let mut checks = Vec::new();
        for v in &values {
            let r = crate::ring::parse_rational(v).ok_or_else(|| CliError::Input(format!("specialization `{v}`")))?;
            let (s, gens) = crate::solver::specialize_solution(&sol, sigma.generators(), &name, &r).map_err(CliError::from_solver)?;
            let base = inp.ring.without(&[name.as_str()]).map_err(CliError::input)?;
            let comps: Vec<Poly> = l.components().iter().map(|p| p.specialize(&name, &r)).collect::<Result<_, _>>().map_err(CliError::input)?;
            let ls = VectorField::new(&base, comps).map_err(CliError::input)?;
            checks.push(json!({ "value": v, "f": s.f.to_string(), "verified": s.verify(&ls, &gens) }));
        }
        results["parameter"] = json!(name);
        results["specializations"] = json!(checks);
        if let Certificate::Solution { parameter, specializations, .. } = &mut sc {
            *parameter = Some(name);
            *specializations = values;
        }
    }
    let certs = vec![tangency_cert("tangency", &sigma, &l, &cert), bezout_cert("bezout", &sigma, &l, &cert, &bez), sc];
    Ok(Output::ok(results, certs, vec![format!("f = {}", sol.f)]))
}

pub fn solve(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    solve_common(inp, opts, false)
}

pub fn solve_parametric(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    solve_common(inp, opts, true)
}

pub fn stability(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    let f = inp.list("f", &inp.job.f)?;
    let a = inp.list("a", &inp.job.a)?;
    let ft = inp.list("f_tilde", &inp.job.f_tilde)?;
    let grid = opts.grid(inp.ring.space_dim())?;
    let rep = stability_report(&f, &a, &ft, &grid, opts.degree_bound).map_err(CliError::from_solver)?;
    let results = json!({
        "a_prime": strings(&rep.a_prime),
        "a_tilde": strings(&rep.a_tilde),
        "syzygies": rep.syzygies,
        "exact": rep.exact,
        "norm_a": rs(&rep.norm_a),
        "norm_f_minus_f_tilde": rs(&rep.norm_df),
        "norm_a_tilde_minus_a": rs(&rep.norm_da),
        "delta": rs(&rep.delta),
        "within_delta": rep.within_delta,
        "bound": rs(&rep.bound),
        "bound_holds": rep.bound_holds,
    });
    let cert = Certificate::Membership {
        name: "a_tilde . f_tilde = 1".into(),
        ring: ring_of(&inp.ring),
        generators: strings(&ft),
        target: "1".into(),
        cofactors: rep.a_tilde.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, p)| (i, p.to_string())).collect(),
    };
    let mut out = Output::ok(results, vec![cert], vec![format!(
        "|a~ - a| = {} vs bound {} ({})",
        rs(&rep.norm_da),
        rs(&rep.bound),
        if rep.bound_holds { "holds" } else { "fails" }
    )]);
    if !rep.exact {
        out.failure = Some((2, "corrected coefficients do not give an exact identity".into()));
    }
    Ok(out)
}

pub fn homotopy_step(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    let forms = inp.forms()?;
    let k = inp.k(forms.q())?;
    let f = inp.function()?;
    let grid = opts.grid(forms.n())?;
    let mut sigma = sigma_without(&forms, k).map_err(CliError::input)?;
    sigma.ideal = sigma.ideal.clone().with_budget(opts.budget());
    let field = construct_field_on_sigma(&forms, k, &sigma.ideal, opts.field_extra).map_err(CliError::from_geometry)?;
    let h = replacement_segment(&forms, k, &f).map_err(CliError::math)?;
    let rank = verify_rank(&h, &grid, opts.t_samples).map_err(CliError::math)?;
    let seg = &h.segments()[0];
    let contraction = verify_contraction_invariance(seg, &forms, &field.field, &sigma.ideal, k).map_err(CliError::math)?;
    let mut certs = vec![field_cert("field on the locus", &forms, k, &field), homotopy_cert("homotopy", &h)?];
    certs.extend(segment_rank_certs("step", &h, &rank));
    if let Some(c) = &contraction {
        certs.push(contraction_cert("contraction", seg, &forms, k, &field.field, &sigma.ideal, c));
    }
    let results = json!({
        "field": field.field.strings(),
        "segment": rows_of(seg.forms.rows()),
        "end": rows_of(h.end().map_err(CliError::math)?.rows()),
        "rank": rank.iter().map(rank_json).collect::<Vec<_>>(),
        "contraction_invariant": contraction.is_some(),
    });
    let mut out = Output::ok(results, certs, Vec::new());
    if let Some(RankVerdict::Failed(w)) = rank.first().map(|r| &r.verdict) {
        out.failure = Some((2, format!("rank drops at {:?}", w.iter().map(rs).collect::<Vec<_>>())));
    } else if contraction.is_none() {
        out.failure = Some((2, "contraction with the field is not preserved on the locus".into()));
    }
    out.summary.push(format!("segment rank: {}", rank_json(&rank[0])["verdict"]));
    Ok(out)
}

fn contraction_cert(
    name: &str,
    seg: &crate::homotopy::Segment,
    original: &FormTuple,
    k: usize,
    l: &VectorField,
    sigma: &Ideal,
    c: &MembershipCertificate,
) -> Certificate {
    let ring = seg.forms.ring();
    let lift = |p: &Poly| p.embed(ring).expect("sub-ring").to_string();
    Certificate::Contraction {
        name: name.into(),
        ring: ring_of(ring),
        row: strings(&seg.forms.rows()[k]),
        original: original.rows()[k].iter().map(lift).collect(),
        field: l.components().iter().map(lift).collect(),
        sigma: sigma.generators().iter().map(lift).collect(),
        cofactors: cofactors_of(c),
    }
}

fn record_json(r: &PerturbationRecord) -> Value {
    json!({
        "subset": r.subset,
        "target_form": r.target_form,
        "delta": r.delta.to_string(),
        "power": r.power,
        "scale": rs(&r.scale),
        "f": r.f.to_string(),
        "epsilon": rs(&r.epsilon),
        "df_norm": rs(&r.df_norm),
        "seed": r.seed,
        "stream": r.stream,
        "attempts": r.attempts,
        "failed_streams": r.failed_streams,
        "localized_order": r.localized.order,
    })
}

fn record_certs(step: usize, i: usize, r: &PerturbationRecord, forms: &FormTuple, sigma_gens: &[Poly]) -> Vec<Certificate> {
    let mut rows: Vec<Vec<Poly>> = r.subset.iter().map(|&j| forms.rows()[j].clone()).collect();
    rows.push(forms.rows()[step].clone());
    let lc = &r.localized;
    let lift = |p: &Poly| p.embed(&lc.ring).expect("sub-ring").to_string();
    let localizer = (lc.ring != *forms.ring()).then(|| {
        let base: Vec<&str> = forms.ring().names();
        lc.ring.names().into_iter().find(|n| !base.contains(n)).expect("adjoined").to_string()
    });
    vec![
        Certificate::Product {
            name: format!("step {step} perturbation {i} lies in the locus ideal power"),
            ring: ring_of(forms.ring()),
            target: r.f.to_string(),
            multiplier: r.product.multiplier.to_string(),
            delta_rows: rows_of(&rows),
            power: r.power,
        },
        Certificate::Localized {
            name: format!("step {step} perturbation {i} tangency off the fixed locus"),
            ring: ring_of(&lc.ring),
            localizer,
            field: r.field.components().iter().map(lift).collect(),
            sigma: sigma_gens.iter().map(lift).collect(),
            delta: lift(&r.delta),
            order: lc.order,
            cofactors: cofactors_of(&lc.certificate),
        },
    ]
}

pub fn pipeline(inp: &Inputs, opts: &Effective) -> Result<Output, CliError> {
    let forms = inp.forms()?;
    let primitives = inp.primitives()?;
    let grid = opts.grid(forms.n())?;
    let driver = DriverOptions {
        perturb: PerturbOptions {
            max_retries: opts.max_retries,
            degree: opts.perturbation_degree,
            max_rounds: opts.max_rounds,
            chain_steps: opts.chain_steps,
            field_extra: opts.field_extra,
            budget: opts.budget(),
            ..PerturbOptions::default()
        },
        epsilon: opts.epsilon()?,
        seed: opts.seed,
        t_samples: opts.t_samples,
        direct_degree: (opts.direct_degree > 0).then_some(opts.direct_degree),
    };
    match replace_all_forms(&forms, &primitives, &grid, &driver) {
        Ok(out) => pipeline_output(&out, &grid, None),
        Err(fail) => {
            let code = if fail.error.is_resource() { 3 } else { 2 };
            let msg = match fail.k {
                Some(k) => format!("step {k}: {}", fail.error),
                None => fail.error.to_string(),
            };
            match fail.partial {
                Some(p) => pipeline_output(&p, &grid, Some((code, msg))),
                None => {
                    let failure = Some((if matches!(fail.error, crate::homotopy::PipelineError::OpenCase { .. }) { 1 } else { code }, msg.clone()));
                    Ok(Output { results: json!({ "steps": [] }), certificates: Vec::new(), failure, summary: vec![msg] })
                }
            }
        }
    }
}

fn pipeline_output(out: &PipelineOutcome, grid: &GridSpec, failure: Option<(i32, String)>) -> Result<Output, CliError> {
    let mut certs = vec![rank_cert("input has full rank", &out.input, &out.input_rank)];
    let mut steps = Vec::new();
    let mut summary = Vec::new();
    for s in &out.steps {
        let k = s.k;
        certs.push(field_cert(&format!("step {k} field on the locus"), &s.reduced, k, &s.field));
        let sigma = &s.sigma.ideal;
        let l = &s.field.field;
        let (path, order) = match &s.path {
            StepPath::Exact => ("exact", Value::Null),
            StepPath::Direct { .. } => ("direct", Value::Null),
            StepPath::Solved { order, certificate, bezout } => {
                certs.push(tangency_cert(&format!("step {k} tangency"), sigma, l, certificate));
                certs.push(bezout_cert(&format!("step {k} bezout"), sigma, l, certificate, bezout));
                ("solved", json!(order))
            }
        };
        let mut forms_now = s.forms_before.clone();
        for (i, r) in s.records.iter().enumerate() {
            let p = r.target_form;
            let row = forms_now.rows()[p].iter().zip(exterior_derivative(&r.f)).map(|(a, d)| a + &d).collect();
            let after = forms_now.with_row(p, row).map_err(CliError::from_geometry)?;
            let new_sigma = sigma_without(&after, k).map_err(CliError::from_geometry)?;
            certs.extend(record_certs(k, i, r, &forms_now, new_sigma.ideal.generators()));
            forms_now = after;
        }
        let sol = &s.solution;
        let residual = RestrictedSolution { f: sol.f_k.clone(), g: sigma.ring().one(), residual: sol.residual.clone() };
        certs.push(solution_cert(&format!("step {k} L f_k = 1 on the locus"), sigma, l, &residual));
        certs.extend(segment_rank_certs(&format!("step {k}"), &s.homotopy, &s.rank));
        let last = s.homotopy.segments().last().expect("replacement segment");
        certs.push(contraction_cert(&format!("step {k} contraction"), last, &s.reduced, k, l, sigma, &s.contraction));
        steps.push(json!({
            "k": k,
            "path": path,
            "order": order,
            "sigma": strings(sigma.generators()),
            "field": l.strings(),
            "perturbations": s.records.iter().map(record_json).collect::<Vec<_>>(),
            "g_k": sol.g_k.to_string(),
            "h": sol.h.f.to_string(),
            "f_k": sol.f_k.to_string(),
            "norm_h": rs(&sol.norm_h),
            "norm_target": rs(&sol.norm_target),
            "ratio": sol.ratio().map(|r| rs(&r)),
            "rank": s.rank.iter().map(rank_json).collect::<Vec<_>>(),
            "forms_after": rows_of(s.forms_after.rows()),
        }));
        summary.push(format!("step {k}: {path}, f_{k} = {}", sol.f_k));
    }
    if let Some(h) = &out.homotopy {
        certs.push(homotopy_cert("full homotopy", h)?);
    }
    let functions: Vec<Option<String>> = out.functions.iter().map(|f| f.as_ref().map(Poly::to_string)).collect();
    if out.complete() && failure.is_none() {
        certs.push(Certificate::Exactness {
            name: "final forms are differentials".into(),
            ring: ring_of(out.final_forms.ring()),
            rows: rows_of(out.final_forms.rows()),
            functions: functions.iter().map(|f| f.clone().unwrap_or_default()).collect(),
        });
    }
    let numeric: Vec<f64> = match &out.homotopy {
        Some(h) => h
            .segments()
            .iter()
            .map(|s| min_singular_sample(&s.forms, grid, Some(5)).map(|m| m.min_singular()).unwrap_or(f64::NAN))
            .collect(),
        None => Vec::new(),
    };
    let results = json!({
        "complete": out.complete(),
        "steps": steps,
        "functions": functions,
        "final_forms": rows_of(out.final_forms.rows()),
        "all_rank_certified": out.all_rank_certified(),
        "segments": out.homotopy.as_ref().map_or(0, |h| h.segments().len()),
        "numeric_min_singular_per_segment": numeric,
    });
    Ok(Output { results, certificates: certs, failure, summary })
}
