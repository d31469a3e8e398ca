use std::path::Path;

use serde_json::{json, Value};

use super::{Command, Ctx, MultiposetCommand, Verdict, EXIT_FAILS, EXIT_OK, EXIT_UNKNOWN};
use crate::amalgamation::{check_nabla, nabla, two_generated, wtc_check, WtcInstance};
use crate::arrows::{check_arrow, find_min_pi_arrow, verify_refutation, Outcome, PiArrowOutcome, SearchBudget};
use crate::error::{Error, Result};
use crate::gen::{census, gen_ordered_posets, gen_posets};
use crate::io::{parse_doc, parse_structure, parse_template, pi_labels, structure_doc, Document, Label, StructureDoc};
use crate::multiposets::{
    in_ordered_class, ordered_members, validate_multiposet, verify_op_witness_multi, wtc_tau_for_template, Multiposet,
    Template,
};
use crate::ordering_property::{
    op_witness_for_poset, op_witness_via_arrow, verify_op_prime, verify_op_witness, OpWitnessReport,
};
use crate::param_words::{phi, Alphabet, ParamWord};
use crate::powerset_pi::pi;
use crate::structures::{validate_map, FiniteLattice, LinearlyOrderedPoset, Structure};
use crate::varieties::{check_ap, satisfies_identity, ApOutcome, Identity};

fn ok(result: Value) -> Verdict {
    Verdict {
        verdict: "ok",
        code: EXIT_OK,
        result,
        verified: true,
        nodes: None,
    }
}

fn doc_value(s: &Structure, labels: Option<&[Label]>, t: Option<&Template>) -> Value {
    serde_json::to_value(structure_doc(s, labels, t)).expect("serializable")
}

fn load(ctx: &mut Ctx, path: &Path) -> Result<Document> {
    parse_structure(&ctx.read(path)?)
}

fn load_with(ctx: &mut Ctx, path: &Path, t: &Template) -> Result<Document> {
    parse_doc(&ctx.read(path)?)?.to_document_with(Some(t))
}

fn load_template(ctx: &mut Ctx, path: &Path) -> Result<Template> {
    parse_template(&ctx.read(path)?)
}

fn ordered(doc: &Document) -> Result<LinearlyOrderedPoset> {
    match &doc.structure {
        Structure::OrderedPoset(p) => Ok(p.clone()),
        Structure::Multiposet(m) if m.relation_count() == 1 && m.is_ordered() => {
            Ok(m.to_ordered_poset().expect("one ordered relation"))
        }
        other => Err(Error::Precondition(format!(
            "expected an ordered poset, found {}",
            other.kind()
        ))),
    }
}

fn lattice(doc: &Document) -> Result<FiniteLattice> {
    match &doc.structure {
        Structure::Lattice(l) => Ok(l.clone()),
        other => Err(Error::Precondition(format!(
            "expected a lattice, found {}",
            other.kind()
        ))),
    }
}

fn multiposet(s: &Structure) -> Result<Multiposet> {
    match s {
        Structure::OrderedPoset(p) => Ok(Multiposet::from_ordered_poset(p)),
        Structure::Poset(p) => Ok(Multiposet::from_poset(p)),
        Structure::Multiposet(m) => Ok(m.clone()),
        Structure::Lattice(_) => Err(Error::Precondition("expected a multiposet, found lattice".into())),
    }
}

fn budget(ctx: &Ctx, time_limit_secs: Option<u64>) -> SearchBudget {
    if ctx.deterministic {
        SearchBudget::deterministic(ctx.node_limit)
    } else {
        SearchBudget {
            node_limit: Some(ctx.node_limit),
            time_limit: time_limit_secs.map(std::time::Duration::from_secs),
            parallel: true,
        }
    }
}

fn emit(path: &Path, value: &impl serde::Serialize) -> Result<Value> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, &text)?;
    let mut ctx = Ctx {
        deterministic: true,
        node_limit: 0,
        inputs: Vec::new(),
    };
    ctx.note_text(&path.display().to_string(), &text);
    Ok(serde_json::to_value(&ctx.inputs[0])?)
}

fn outcome_verdict(o: Outcome) -> (&'static str, i32) {
    match o {
        Outcome::Holds => ("holds", EXIT_OK),
        Outcome::Fails => ("fails", EXIT_FAILS),
        Outcome::Unknown => ("unknown", EXIT_UNKNOWN),
    }
}

fn op_report(report: &OpWitnessReport, extra: Value) -> Verdict {
    let (verdict, code) = outcome_verdict(report.outcome);
    let mut result = json!({
        "base": doc_value(&report.base, None, None),
        "witness": doc_value(&report.witness, None, None),
        "witness_size": report.witness.len(),
        "outcome": report.outcome,
        "checked_pairs": report.checked_pairs,
        "counterexample": report.counterexample.as_ref().map(|(a, b)| json!({"base_order": a, "witness_order": b})),
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    Verdict {
        verdict,
        code,
        result,
        verified: report.outcome != Outcome::Fails || report.counterexample.is_some(),
        nodes: None,
    }
}

fn parse_map(text: &str, target: &Document) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            target
                .labels
                .iter()
                .position(|l| l.to_string() == t)
                .ok_or_else(|| Error::Format(format!("unknown label {t:?} in map")))
        })
        .collect()
}

fn identity_arg(ctx: &mut Ctx, spec: &str) -> Result<Option<Identity>> {
    Ok(match spec {
        "lattices" | "none" => None,
        "distributive" => Some(Identity::distributive()),
        "modular" => Some(Identity::modular()),
        other => match other.strip_prefix("custom:") {
            Some(path) => Some(Identity::parse(ctx.read(Path::new(path))?.trim())?),
            None => return Err(Error::Format(format!("unknown identity {other:?}"))),
        },
    })
}

pub(crate) fn dispatch(command: &Command, ctx: &mut Ctx) -> Result<Verdict> {
    match command {
        Command::Validate { structure, template } => {
            let doc = match template {
                Some(t) => {
                    let t = load_template(ctx, t)?;
                    load_with(ctx, structure, &t)?
                }
                None => load(ctx, structure)?,
            };
            doc.structure.validate()?;
            Ok(ok(json!({
                "kind": doc.structure.kind(),
                "size": doc.structure.len(),
                "valid": true,
            })))
        }
        Command::Pi { n, emit: out } => {
            let p = pi(*n)?;
            let labels = pi_labels(*n);
            let s = Structure::OrderedPoset(p);
            s.validate()?;
            let doc = structure_doc(&s, Some(&labels), None);
            let mut result = json!({ "n": n, "size": s.len() });
            match out {
                Some(path) => result["emitted"] = emit(path, &doc)?,
                None => result["structure"] = serde_json::to_value(&doc)?,
            }
            Ok(ok(result))
        }
        Command::Phi {
            structure,
            word,
            alphabet,
            emit: out,
        } => {
            let doc = load(ctx, structure)?;
            let a = ordered(&doc)?;
            ctx.note_text("word", word);
            let alphabet = Alphabet::new(alphabet.split(',').map(str::trim))?;
            let u = ParamWord::parse(word, &alphabet)?;
            let map = phi(&a, &u)?;
            let host = pi(u.len())?;
            validate_map(&Structure::OrderedPoset(a), &Structure::OrderedPoset(host), &map)?;
            let labels = pi_labels(u.len());
            let images: Vec<Label> = map.map.iter().map(|&i| labels[i].clone()).collect();
            let map_doc = json!({ "mode": map.mode, "map": images });
            let mut result = json!({ "n": u.len(), "word": u.to_string(), "images": images });
            if let Some(path) = out {
                result["emitted"] = emit(path, &map_doc)?;
            }
            Ok(ok(result))
        }
        Command::Arrow(args) => {
            let a_doc = load(ctx, &args.pattern)?;
            let b_doc = load(ctx, &args.target)?;
            let (a, b) = (ordered(&a_doc)?, ordered(&b_doc)?);
            let budget = budget(ctx, args.time_limit_secs);
            if let Some(n_max) = args.pi_search {
                return Ok(match find_min_pi_arrow(&a, &b, args.colors, n_max, &budget)? {
                    PiArrowOutcome::Found { n, verdict } => Verdict {
                        verdict: "holds",
                        code: EXIT_OK,
                        result: json!({ "n": n, "a_copies": verdict.a_copies.len(), "b_copies": verdict.b_copy_count }),
                        verified: true,
                        nodes: Some(verdict.nodes),
                    },
                    PiArrowOutcome::NotFoundWithinBound { n_max, .. } => Verdict {
                        verdict: "unknown",
                        code: EXIT_UNKNOWN,
                        result: json!({ "not_found_up_to": n_max }),
                        verified: true,
                        nodes: None,
                    },
                    PiArrowOutcome::Unknown { n, nodes } => Verdict {
                        verdict: "unknown",
                        code: EXIT_UNKNOWN,
                        result: json!({ "undecided_at": n }),
                        verified: true,
                        nodes: Some(nodes),
                    },
                });
            }
            let host_path = args.host.as_ref().expect("clap requires host without --pi-search");
            let c_doc = load(ctx, host_path)?;
            let c = ordered(&c_doc)?;
            let v = check_arrow(&c, &a, &b, args.colors, &budget)?;
            let (verdict, code) = outcome_verdict(v.outcome);
            let mut result = json!({
                "colors": v.k,
                "a_copies": v.a_copies.len(),
                "b_copies": v.b_copy_count,
            });
            let mut verified = true;
            if let Some(col) = &v.refutation {
                verified = verify_refutation(&c, &a, &b, v.k, &v.a_copies, col).is_ok();
                let entries: Vec<Value> = v
                    .a_copies
                    .copies
                    .iter()
                    .zip(col)
                    .map(|(img, &color)| {
                        let copy: Vec<&Label> = img.iter().map(|&i| &c_doc.labels[i]).collect();
                        json!({ "copy": copy, "color": color })
                    })
                    .collect();
                result["refutation"] = Value::Array(entries);
            }
            Ok(Verdict {
                verdict,
                code: if verified { code } else { EXIT_FAILS },
                result,
                verified,
                nodes: Some(v.nodes),
            })
        }
        Command::OpWitness {
            structure,
            n_max,
            verify_only,
            extension_limit,
        } => {
            let doc = load(ctx, structure)?;
            if let Some(cand) = verify_only {
                let cdoc = load(ctx, cand)?;
                let witness = cdoc
                    .structure
                    .underlying_poset()
                    .ok_or_else(|| Error::Precondition("the candidate must carry one partial order".into()))?;
                let report = match &doc.structure {
                    Structure::Poset(p) => verify_op_witness(p, &witness, *extension_limit),
                    _ => verify_op_prime(&ordered(&doc)?, &witness, *extension_limit),
                };
                return Ok(op_report(&report, json!({})));
            }
            let budget = budget(ctx, None);
            match &doc.structure {
                Structure::Poset(p) => {
                    let (n, report) = op_witness_for_poset(p, *n_max, &budget, *extension_limit)?;
                    Ok(op_report(&report, json!({ "n": n })))
                }
                _ => {
                    let b = ordered(&doc)?;
                    let r = op_witness_via_arrow(&b, *n_max, &budget, *extension_limit)?;
                    let b1 =
                        r.b1.as_ref()
                            .map(|b1| doc_value(&Structure::OrderedPoset(b1.clone()), None, None));
                    Ok(op_report(&r.report, json!({ "n": r.n, "b1": b1 })))
                }
            }
        }
        Command::Wtc {
            class,
            tau,
            sigmas,
            bound,
        } => {
            let t = match class.as_str() {
                "ordered-posets" => Template::trivial(),
                other => match other.strip_prefix("multiposet:") {
                    Some(path) => load_template(ctx, Path::new(path))?,
                    None => return Err(Error::Format(format!("unknown class {other:?}"))),
                },
            };
            let tau = match tau.as_str() {
                "auto" => wtc_tau_for_template(&t),
                path => multiposet(&load_with(ctx, Path::new(path), &t)?.structure)?,
            };
            let sigmas = match sigmas.as_str() {
                "auto" => two_generated(&ordered_members(&t, 4)),
                path => {
                    let docs: Vec<StructureDoc> = serde_json::from_str(&ctx.read(Path::new(path))?)
                        .map_err(|e| Error::Format(format!("sigmas: {e}")))?;
                    docs.iter()
                        .map(|d| multiposet(&d.to_document_with(Some(&t))?.structure))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            match wtc_check(&sigmas, &tau, *bound, |m| in_ordered_class(m, &t)) {
                Ok(inst) => {
                    let entries: Vec<Value> = inst
                        .sigmas
                        .iter()
                        .zip(&inst.witnesses)
                        .map(|(s, w)| {
                            json!({
                                "sigma": doc_value(&Structure::Multiposet(s.clone()), None, None),
                                "witness": doc_value(&Structure::Multiposet(w.d.clone()), None, None),
                                "x": w.x, "y": w.y, "z": w.z,
                            })
                        })
                        .collect();
                    Ok(ok(json!({ "sigmas": sigmas.len(), "witnesses": entries })))
                }
                Err(Error::MissingSigma { sigma }) => Ok(Verdict {
                    verdict: "fails",
                    code: EXIT_FAILS,
                    result: json!({
                        "missing_sigma": doc_value(&Structure::Multiposet(sigmas[sigma].clone()), None, None),
                        "bound": bound,
                    }),
                    verified: true,
                    nodes: None,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Nabla {
            structure,
            tau,
            template,
            bound,
        } => {
            let t = match template {
                Some(path) => Some(load_template(ctx, path)?),
                None => None,
            };
            let doc = match &t {
                Some(t) => load_with(ctx, structure, t)?,
                None => load(ctx, structure)?,
            };
            let t = t.or(doc.template.clone()).unwrap_or_else(Template::trivial);
            let b = multiposet(&doc.structure)?;
            validate_multiposet(&b, &t)?;
            let tau = match tau {
                Some(path) => multiposet(&load_with(ctx, path, &t)?.structure)?,
                None => wtc_tau_for_template(&t),
            };
            let sigmas = two_generated(std::slice::from_ref(&b));
            let wtc = if sigmas.is_empty() {
                WtcInstance {
                    sigmas,
                    tau: tau.clone(),
                    witnesses: Vec::new(),
                }
            } else {
                wtc_check(&sigmas, &tau, *bound, |m| in_ordered_class(m, &t))?
            };
            let out = nabla(&b, &wtc)?;
            check_nabla(&b, &tau, &out).map_err(Error::Internal)?;
            let middles: Vec<Value> = out.middles.iter().map(|&(a, y, c)| json!([a, y, c])).collect();
            Ok(ok(json!({
                "input_size": b.len(),
                "structure": doc_value(&Structure::Multiposet(out.d.clone()), None, Some(&t)),
                "middles": middles,
            })))
        }
        Command::ApSearch {
            a,
            b1,
            b2,
            f1,
            f2,
            class,
            bound,
        } => {
            let (ad, b1d, b2d) = (load(ctx, a)?, load(ctx, b1)?, load(ctx, b2)?);
            let (la, l1, l2) = (lattice(&ad)?, lattice(&b1d)?, lattice(&b2d)?);
            let (m1, m2) = (parse_map(f1, &b1d)?, parse_map(f2, &b2d)?);
            let id = identity_arg(ctx, class)?;
            Ok(match check_ap(&la, &l1, &l2, &m1, &m2, id.as_ref(), *bound)? {
                ApOutcome::Found(am) => ok(json!({
                    "amalgam": doc_value(&Structure::Lattice(am.d.clone()), None, None),
                    "g1": am.g1,
                    "g2": am.g2,
                })),
                ApOutcome::NotFoundWithinBound { bound, candidates } => Verdict {
                    verdict: "unknown",
                    code: EXIT_UNKNOWN,
                    result: json!({ "not_found_up_to": bound, "candidates": candidates }),
                    verified: true,
                    nodes: None,
                },
            })
        }
        Command::Identity { lattice: path, check } => {
            let doc = load(ctx, path)?;
            let l = lattice(&doc)?;
            let id = identity_arg(ctx, check)?.ok_or_else(|| Error::Format("an identity is required".into()))?;
            let res = satisfies_identity(&l, &id.lhs, &id.rhs);
            match &res.countermodel {
                None => Ok(Verdict {
                    verdict: "holds",
                    code: EXIT_OK,
                    result: json!({ "identity": id.to_string(), "assignments_checked": res.assignments_checked }),
                    verified: true,
                    nodes: None,
                }),
                Some(cm) => {
                    let verified = id.lhs.eval(&l, &res.variables, cm) != id.rhs.eval(&l, &res.variables, cm);
                    let assignment: serde_json::Map<String, Value> = res
                        .variables
                        .iter()
                        .zip(cm)
                        .map(|(v, &e)| (v.clone(), serde_json::to_value(&doc.labels[e]).expect("label")))
                        .collect();
                    Ok(Verdict {
                        verdict: "fails",
                        code: EXIT_FAILS,
                        result: json!({
                            "identity": id.to_string(),
                            "countermodel": assignment,
                            "assignments_checked": res.assignments_checked,
                        }),
                        verified,
                        nodes: None,
                    })
                }
            }
        }
        Command::Multiposet(MultiposetCommand::Validate { template, structure }) => {
            let t = load_template(ctx, template)?;
            let doc = load_with(ctx, structure, &t)?;
            let m = multiposet(&doc.structure)?;
            validate_multiposet(&m, &t)?;
            Ok(ok(json!({
                "size": m.len(),
                "relations": m.relation_count(),
                "ordered": m.is_ordered(),
                "valid": true,
            })))
        }
        Command::Multiposet(MultiposetCommand::OpWitness {
            template,
            a,
            b,
            extension_limit,
        }) => {
            let t = load_template(ctx, template)?;
            let ma = multiposet(&load_with(ctx, a, &t)?.structure)?;
            let mb = multiposet(&load_with(ctx, b, &t)?.structure)?;
            let report = verify_op_witness_multi(&ma, &mb, &t, *extension_limit)?;
            Ok(op_report(&report, json!({})))
        }
        Command::Gen { n, ordered, emit: out } => {
            let corpus: Vec<StructureDoc> = if *ordered {
                gen_ordered_posets(*n)?
                    .into_iter()
                    .map(|p| structure_doc(&Structure::OrderedPoset(p), None, None))
                    .collect()
            } else {
                gen_posets(*n)?
                    .into_iter()
                    .map(|p| structure_doc(&Structure::Poset(p), None, None))
                    .collect()
            };
            for d in &corpus {
                d.to_document()?;
            }
            let mut result = json!({ "n": n, "ordered": ordered, "count": corpus.len() });
            match out {
                Some(path) => result["emitted"] = emit(path, &corpus)?,
                None => result["corpus"] = serde_json::to_value(&corpus)?,
            }
            Ok(ok(result))
        }
        Command::Census { n_max } => {
            let rows = (0..=*n_max).map(census).collect::<Result<Vec<_>>>()?;
            Ok(ok(json!({ "rows": rows })))
        }
    }
}
