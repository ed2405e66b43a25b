use crate::output::{self, Failure, Report};
use crate::Opts;
use fellbundle::formats::*;
use fellbundle::random::Rng;
use fellbundle::*;
use serde_json::{json, Value};
use std::fs;
use std::path::Path;
use std::result::Result;

type Outcome = Result<(bool, Value), Failure>;

fn load(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn write(path: &Path, doc: &Document) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).expect("documents serialize");
    fs::write(path, text + "\n").map_err(|e| Failure::Malformed(format!("cannot write {}: {e}", path.display())))
}

fn wrong_kind(want: &str, doc: &Document) -> Failure {
    Failure::Malformed(format!("expected a {want} document, got {}", doc.kind()))
}

fn run(command: &str, input: &Path, opts: &Opts, body: impl FnOnce(Document) -> Outcome) -> Report {
    let rep = Report::new(command, &input.display().to_string(), opts);
    match load(input).and_then(body) {
        Ok((passed, result)) => rep.finish(passed, result),
        Err(f) => rep.failure(f, Value::Null),
    }
}

fn bundle_summary(b: &FellBundle64, opts: &Opts) -> Value {
    json!({
        "group_order": b.group().order(),
        "abelian": b.group().is_abelian(),
        "ambient_dim": b.ambient_dim(),
        "dims": b.dims(),
        "unital": b.is_unital(),
        "saturated": b.check_saturated(&opts.tol()),
    })
}

fn validate_bundle(b: &FellBundle64, opts: &Opts) -> (bool, Value) {
    let rep = b.validate(&opts.tol());
    let mut v = bundle_summary(b, opts);
    v["axioms"] = output::axioms(&rep);
    (rep.passed(), v)
}

fn validate_map(t: &BundleMap64, opts: &Opts) -> (bool, Value) {
    let (sp, sv) = validate_bundle(t.source(), opts);
    let (tp, tv) = validate_bundle(t.target(), opts);
    let hom = t.phi().check_hom();
    (sp && tp && hom, json!({ "source": sv, "target": tv, "phi": t.phi().map, "phi_is_homomorphism": hom }))
}

fn validate_action(a: &Action64, opts: &Opts) -> (bool, Value) {
    let rep = a.validate(&opts.tol());
    let xrep = a.target().validate(&opts.tol());
    let (sp, sv) = validate_bundle(a.source(), opts);
    let v = json!({
        "source": sv,
        "phi": a.phi().map,
        "target_dims": a.target().dims(),
        "target_axioms": output::axioms(&xrep),
        "axioms": output::axioms(&rep),
    });
    (sp && rep.passed() && xrep.passed(), v)
}

fn vector_for(x: &VecDoc, want: usize) -> Result<Vec<C64>, Failure> {
    let v: Vec<C64> = vec_from_doc(x)?;
    if v.len() != want {
        return Err(Failure::Malformed(format!("vector has {} coordinates, fiber over the identity has {want}", v.len())));
    }
    Ok(v)
}

fn correspondence(d: &CorrespondenceDoc, opts: &Opts) -> Outcome {
    let tol = opts.tol();
    let act: Action64 = d.action.build(&tol)?;
    let (act_ok, act_v) = validate_action(&act, opts);
    let e = act.target().group().identity();
    let x = d.x.as_ref().map(|x| vector_for(x, act.target().dim(e))).transpose()?;
    let y = Correspondence::build_unchecked(act.target().clone()).attach_left_action_unchecked(act.clone())?;
    let rep = y.validate(opts.samples, opts.seed, &tol);
    let amp = y.check_amplified(opts.samples, opts.seed, &tol)?;
    let mut v = json!({
        "action": act_v,
        "dim": y.dim(),
        "fiber_dims": y.bundle().dims(),
        "axioms": output::axioms(&rep),
        "amplified": output::axioms(&amp),
        "nondegenerate": y.check_nondegenerate(&tol)?,
    });
    let mut passed = act_ok && rep.passed() && amp.passed();
    if let Some(x) = x {
        let t = act.coefficient_map(&x, None)?;
        let mut rng = Rng::seeded(opts.seed);
        let mut gap = 0.0f64;
        for _ in 0..opts.samples {
            let f = Section::random(act.source().clone(), &mut rng);
            let lhs = y.psi(&x, &f)?;
            let rhs = t.phi_t(&f)?;
            let scale = 1.0 + rhs.coeffs().iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            gap = gap.max(lhs.distance(&rhs) / scale);
        }
        let sub = y.subcorrespondence(&x, &tol)?;
        passed &= gap <= opts.tol_eq;
        v["x"] = json!({
            "vector": output::vector(&x),
            "cyclic": y.check_cyclic(&x, &tol)?,
            "rank_profile": y.rank_profile(&x, &tol)?,
            "generated_dim": sub.corr.dim(),
            "psi_equals_phi_t_residual": gap,
        });
    }
    Ok((passed, v))
}

fn equivalence(spec: &EquivalenceSpec, opts: &Opts) -> Outcome {
    let e: EquivalenceBundle<f64> = spec.build(&opts.tol())?;
    let rep = e.verify_imprimitivity(opts.samples, opts.seed, &opts.tol());
    let grp = e.left().group();
    let v = json!({
        "left": bundle_summary(e.left(), opts),
        "right": bundle_summary(e.right(), opts),
        "fiber_dims": grp.elements().map(|g| e.fiber(g).dim()).collect::<Vec<_>>(),
        "axioms": output::axioms(&rep),
    });
    Ok((rep.passed(), v))
}

fn gns_doc(d: &GnsDoc, opts: &Opts) -> Outcome {
    let tol = opts.tol();
    let act: Action64 = d.action.build(&tol)?;
    let e = act.target().group().identity();
    if d.xi.fiber != e {
        return Err(Failure::Malformed(format!("xi must lie over the identity {e}, got {}", d.xi.fiber)));
    }
    let xi = vector_for(&d.xi.coords, act.target().dim(e))?;
    let (ok, mut v) = validate_action(&act, opts);
    let y = Correspondence::build_unchecked(act.target().clone()).attach_left_action_unchecked(act.clone())?;
    let cert = act.coefficient_map(&xi, None)?.pd_check_exact(&tol)?;
    v["xi_cyclic"] = json!(y.check_cyclic(&xi, &tol)?);
    v["coefficient_map_margin"] = json!(cert.margin);
    Ok((ok && cert.passed, v))
}

fn validate_doc(doc: Document, opts: &Opts) -> Outcome {
    let tol = opts.tol();
    let (passed, mut v) = match &doc {
        Document::Group(g) => {
            let g = g.build()?;
            (true, json!({ "order": g.order(), "identity": g.identity(), "abelian": g.is_abelian() }))
        }
        Document::Bundle(spec) => validate_bundle(&*spec.build::<f64>()?, opts),
        Document::BundleMap(d) => validate_map(&d.build::<f64>()?, opts),
        Document::HilbertBundle(spec) => {
            let semi: SemiInnerBundle<f64> = spec.build_semi()?;
            let rep = semi.validate_with(&tol, true);
            (rep.passed(), json!({ "dims": semi.dims(), "axioms": output::axioms(&rep) }))
        }
        Document::Action(spec) => validate_action(&spec.build::<f64>(&tol)?, opts),
        Document::Correspondence(d) => correspondence(d, opts)?,
        Document::Equivalence(spec) => equivalence(spec, opts)?,
        Document::Gns(d) => gns_doc(d, opts)?,
    };
    v["kind"] = json!(doc.kind());
    Ok((passed, v))
}

pub fn validate(input: &Path, opts: &Opts) -> Report {
    run("validate", input, opts, |doc| validate_doc(doc, opts))
}

pub fn build(input: &Path, out: &Path, opts: &Opts) -> Report {
    run("build", input, opts, |doc| {
        let tol = opts.tol();
        let explicit = match &doc {
            Document::Group(g) => Document::Group(GroupDoc::from_group(&g.build()?)),
            Document::Bundle(spec) => Document::Bundle(BundleSpec::from_bundle(&*spec.build::<f64>()?)),
            Document::BundleMap(d) => Document::BundleMap(BundleMapDoc::from_map(&d.build::<f64>()?)),
            Document::HilbertBundle(spec) => Document::HilbertBundle(HilbertSpec::from_bundle(&spec.build_semi::<f64>()?)),
            Document::Action(spec) => Document::Action(ActionSpec::from_action(&spec.build::<f64>(&tol)?)),
            Document::Correspondence(d) => Document::Correspondence(CorrespondenceDoc {
                action: ActionSpec::from_action(&d.action.build::<f64>(&tol)?),
                x: d.x.clone(),
            }),
            Document::Equivalence(spec) => Document::Equivalence(EquivalenceSpec::from_equivalence(&spec.build::<f64>(&tol)?)),
            Document::Gns(d) => Document::Gns(GnsDoc { action: ActionSpec::from_action(&d.action.build::<f64>(&tol)?), xi: d.xi.clone() }),
        };
        write(out, &explicit)?;
        Ok((true, json!({ "kind": doc.kind(), "out": out.display().to_string() })))
    })
}

fn pd_summary(t: &BundleMap64, opts: &Opts) -> Result<(bool, Value), Failure> {
    let tol = opts.tol();
    let exact = t.pd_check_exact(&tol)?;
    let choi = t.choi_check(&tol)?;
    let sampled = t.pd_check_sampled(opts.samples, opts.seed, &tol);
    let mut ex = json!({
        "passed": exact.passed,
        "margin": exact.margin,
        "threshold": exact.threshold,
        "size": exact.gram.rows(),
    });
    let mut ch = json!({ "psd": choi.psd, "margin": choi.margin, "threshold": choi.threshold });
    if opts.full {
        ex["gram"] = output::matrix(&exact.gram);
        ch["matrix"] = output::matrix(&t.choi_matrix());
    }
    let witness = exact.witness.as_ref().or(sampled.witness.as_ref()).map(output::witness);
    let v = json!({
        "source_dims": t.source().dims(),
        "target_dims": t.target().dims(),
        "phi": t.phi().map,
        "norm": t.norm(),
        "exact": ex,
        "choi": ch,
        "sampled": { "passed": sampled.passed, "samples": sampled.samples, "worst": sampled.worst },
        "consistent": exact.passed == choi.psd && exact.passed == sampled.passed,
        "witness": witness,
    });
    Ok((exact.passed, v))
}

pub fn pd_check(input: &Path, opts: &Opts) -> Report {
    run("pd-check", input, opts, |doc| match doc {
        Document::BundleMap(d) => pd_summary(&d.build()?, opts),
        other => Err(wrong_kind("bundle_map", &other)),
    })
}

pub fn gns(input: &Path, out: &Path, opts: &Opts) -> Report {
    let rep = Report::new("gns", &input.display().to_string(), opts);
    let t: BundleMap64 = match load(input).and_then(|doc| match doc {
        Document::BundleMap(d) => Ok(d.build()?),
        other => Err(wrong_kind("bundle_map", &other)),
    }) {
        Ok(t) => t,
        Err(f) => return rep.failure(f, Value::Null),
    };
    let tol = opts.tol();
    match t.pd_check_exact(&tol) {
        Ok(cert) if !cert.passed => {
            let partial = json!({
                "margin": cert.margin,
                "threshold": cert.threshold,
                "witness": cert.witness.as_ref().map(output::witness),
            });
            return rep.failure(Failure::Check("map is not positive definite; nothing written".into()), partial);
        }
        Err(e) => return rep.failure(e.into(), Value::Null),
        Ok(_) => {}
    }
    match gns_pipeline(&t, out, opts) {
        Ok((passed, v)) => rep.finish(passed, v),
        Err(f) => rep.failure(f, Value::Null),
    }
}

const GNS_FILES: [&str; 3] = ["hilbert_bundle.json", "action.json", "gns.json"];

fn gns_pipeline(t: &BundleMap64, out: &Path, opts: &Opts) -> Outcome {
    let tol = opts.tol();
    let triple = t.gelfand_raikov(&tol)?;
    fs::create_dir_all(out).map_err(|e| Failure::Malformed(format!("cannot create {}: {e}", out.display())))?;
    let e = triple.bundle.group().identity();
    let action = ActionSpec::from_action(&triple.action);
    write(&out.join(GNS_FILES[0]), &Document::HilbertBundle(HilbertSpec::from_bundle(triple.bundle.semi())))?;
    write(&out.join(GNS_FILES[1]), &Document::Action(action.clone()))?;
    let xi = VectorDoc { fiber: e, coords: vec_to_doc(&triple.xi) };
    write(&out.join(GNS_FILES[2]), &Document::Gns(GnsDoc { action, xi }))?;

    // everything below uses only what was read back
    let back = match load(&out.join(GNS_FILES[2]))? {
        Document::Gns(d) => d,
        other => return Err(wrong_kind("gns", &other)),
    };
    let act: Action64 = back.action.build(&tol)?;
    let xi = vector_for(&back.xi.coords, act.target().dim(e))?;
    let bundle_same = match load(&out.join(GNS_FILES[0]))? {
        Document::HilbertBundle(spec) => spec.build::<f64>(&tol)? == **act.target(),
        _ => false,
    };
    let action_same = match load(&out.join(GNS_FILES[1]))? {
        Document::Action(spec) => spec.build::<f64>(&tol)?.ops() == act.ops(),
        _ => false,
    };
    let reread = GnsTriple { bundle: act.target().clone(), action: act.clone(), xi: xi.clone(), raw_dims: triple.raw_dims.clone() };
    let residual = reread.round_trip_residual(t)?;
    let threshold = opts.tol_psd * (1.0 + t.norm());
    let y = Correspondence::build_unchecked(act.target().clone()).attach_left_action_unchecked(act.clone())?;
    let cyclic = y.check_cyclic(&xi, &tol)?;
    let v = json!({
        "out_dir": out.display().to_string(),
        "files": GNS_FILES,
        "raw_dims": triple.raw_dims,
        "dims": act.target().dims(),
        "norm": t.norm(),
        "residual": residual,
        "threshold": threshold,
        "reread_bundle_matches": bundle_same,
        "reread_action_matches": action_same,
        "xi_cyclic": cyclic,
    });
    Ok((residual <= threshold && bundle_same && action_same, v))
}

pub fn correspond(input: &Path, opts: &Opts) -> Report {
    run("correspond", input, opts, |doc| match doc {
        Document::Correspondence(d) => correspondence(&d, opts),
        Document::Action(spec) => correspondence(&CorrespondenceDoc { action: spec, x: None }, opts),
        other => Err(wrong_kind("correspondence", &other)),
    })
}

pub fn morita(input: &Path, opts: &Opts) -> Report {
    run("morita", input, opts, |doc| match doc {
        Document::Equivalence(spec) => equivalence(&spec, opts),
        other => Err(wrong_kind("equivalence", &other)),
    })
}

/// Validation plus what else is known about the object.
pub fn report(input: &Path, opts: &Opts) -> Report {
    run("report", input, opts, |doc| {
        let extra = match &doc {
            Document::BundleMap(d) => {
                let t: BundleMap64 = d.build()?;
                let (pd, v) = pd_summary(&t, opts)?;
                let unital = t.source().is_unital() && t.target().is_unital();
                Some(json!({ "positive_definite": v, "gns_available": pd && unital }))
            }
            Document::Bundle(spec) => {
                let b: BundleRef<f64> = spec.build()?;
                let reg = RegRep::new(b.clone());
                Some(json!({ "regular_representation_faithful": reg.is_faithful(&opts.tol()), "cross_sectional_dim": reg.dim() }))
            }
            Document::Action(spec) => {
                let a: Action64 = spec.build(&opts.tol())?;
                let y = Correspondence::build_unchecked(a.target().clone()).attach_left_action_unchecked(a)?;
                Some(json!({ "nondegenerate": y.check_nondegenerate(&opts.tol())? }))
            }
            _ => None,
        };
        let (passed, mut v) = validate_doc(doc, opts)?;
        if let Some(x) = extra {
            v["details"] = x;
        }
        Ok((passed, v))
    })
}
