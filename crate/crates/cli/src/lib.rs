//! Command-line front end: reads a `.msl` file and runs one pipeline stage.
//!
//! Exit codes: 0 success, 1 verification failure (rejected proof,
//! counterexample found), 2 input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use eqsketch::deduction::{
    check_deduction, check_normal_form, compile_to_factorization, find_counterexample,
    normalize_deduction, verify_with_trace, EqConstraint, Factorization, KernelRule, Witnesses,
};
use eqsketch::dsl::{parse_spec, SpecFile};
use eqsketch::fpcat::{arr_of_term, arrows_equal, compile_term, diagram_of_equation, normalize, FPArrow};
use eqsketch::signature::inhabited_sorts;
use eqsketch::sketch::sketch_of_signature;
use eqsketch::subst::{a_map, arr_subst_direct, subst_term_recursive, SubstInstance};
use eqsketch::termlang::{Equation, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "eqsketch", version, about = "Equational logic compiled to finite-product arrows")]
struct Cli {
    /// Emit stable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FileArg {
    /// Specification file (.msl).
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the finite-product sketch of the signature.
    Sketch(FileArg),
    /// Compile a term or both sides of an equation to arrows.
    Compile {
        #[arg(long, conflicts_with = "equation", required_unless_present = "equation")]
        term: Option<String>,
        #[arg(long)]
        equation: Option<String>,
        #[command(flatten)]
        file: FileArg,
    },
    /// Compile an equation to its parallel pair and compare the normal forms.
    CheckEq {
        #[arg(long)]
        equation: String,
        #[command(flatten)]
        file: FileArg,
    },
    /// Substitute a term for a variable, recursively and via the substitution arrow.
    Subst {
        #[arg(long)]
        term: String,
        #[arg(long)]
        var: String,
        #[arg(long = "with")]
        with: String,
        #[command(flatten)]
        file: FileArg,
    },
    /// Check one proof (or all) and emit its certificate.
    CheckProof {
        #[arg(long)]
        proof: Option<String>,
        #[command(flatten)]
        file: FileArg,
    },
    /// Lay a proof out in levels and compile the levelled form.
    NormalizeProof {
        #[arg(long)]
        proof: String,
        #[command(flatten)]
        file: FileArg,
    },
    /// Search finite models for a counterexample.
    Oracle {
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, conflicts_with = "proof", required_unless_present = "proof")]
        equation: Option<String>,
        #[arg(long)]
        proof: Option<String>,
        #[command(flatten)]
        file: FileArg,
    },
}

/// Exit status and everything the command printed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

struct Report {
    code: i32,
    text: String,
    json: Json,
}

impl Report {
    fn ok(text: String, json: Json) -> Self {
        Report { code: EXIT_OK, text, json }
    }
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return Outcome {
                code,
                output: e.render().to_string(),
            };
        }
    };
    let json = cli.json;
    match dispatch(cli.command) {
        Ok(r) => Outcome {
            code: r.code,
            output: if json {
                let mut s = serde_json::to_string_pretty(&r.json).expect("json values serialize");
                s.push('\n');
                s
            } else {
                r.text
            },
        },
        Err(InputError(msg)) => Outcome {
            code: EXIT_INPUT,
            output: if json {
                format!("{}\n", serde_json::to_string_pretty(&json!({ "error": msg })).expect("json"))
            } else {
                format!("error: {msg}\n")
            },
        },
    }
}

fn load(f: &FileArg) -> Res<SpecFile> {
    let text = std::fs::read_to_string(&f.file)
        .map_err(|e| InputError(format!("{}: {e}", f.file.display())))?;
    parse_spec(&text).map_err(|e| InputError(format!("{}:{e}", f.file.display())))
}

fn dispatch(cmd: Command) -> Res<Report> {
    match cmd {
        Command::Sketch(f) => sketch(&load(&f)?),
        Command::Compile { term, equation, file } => {
            let spec = load(&file)?;
            match (term, equation) {
                (Some(t), _) => compile(&spec, &t),
                (None, Some(e)) => check_eq(&spec, &e),
                (None, None) => Err(InputError("one of --term or --equation is required".into())),
            }
        }
        Command::CheckEq { equation, file } => check_eq(&load(&file)?, &equation),
        Command::Subst { term, var, with, file } => subst(&load(&file)?, &term, &var, &with),
        Command::CheckProof { proof, file } => check_proof(&load(&file)?, proof.as_deref()),
        Command::NormalizeProof { proof, file } => normalize_proof(&load(&file)?, &proof),
        Command::Oracle {
            max_size,
            equation,
            proof,
            file,
        } => oracle(&load(&file)?, max_size, equation.as_deref(), proof.as_deref()),
    }
}

fn arrow_json(a: &FPArrow) -> Json {
    let n = normalize(a);
    json!({
        "dom": n.dom.to_string(),
        "cod": n.cod.to_string(),
        "text": n.to_string(),
        "normal": n.body,
    })
}

fn sketch(spec: &SpecFile) -> Res<Report> {
    let sk = sketch_of_signature(&spec.signature);
    let mut text = String::from("nodes:\n");
    for (i, n) in sk.nodes.iter().enumerate() {
        writeln!(text, "  {i}: {n}")?;
    }
    text.push_str("arrows:\n");
    for (i, a) in sk.arrows.iter().enumerate() {
        writeln!(text, "  {i}: {a}")?;
    }
    text.push_str("cones:\n");
    for c in &sk.cones {
        let legs: Vec<String> = c.legs.iter().map(usize::to_string).collect();
        writeln!(text, "  {} <- [{}]", c.vertex, legs.join(", "))?;
    }
    let json = json!({
        "nodes": sk.nodes.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "arrows": sk.arrows.iter().map(|a| json!({
            "label": a.to_string(),
            "source": a.source().to_string(),
            "target": a.target().to_string(),
        })).collect::<Vec<_>>(),
        "cones": sk.cones.iter().map(|c| json!({ "vertex": c.vertex.to_string(), "legs": c.legs })).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json))
}

fn term_by_name<'a>(spec: &'a SpecFile, name: &str) -> Res<&'a Term> {
    spec.term(name)
        .map(|t| &t.term)
        .ok_or_else(|| InputError(format!("unknown term `{name}`")))
}

fn equation_by_name<'a>(spec: &'a SpecFile, name: &str) -> Res<&'a Equation> {
    spec.equation(name)
        .map(|e| &e.equation)
        .ok_or_else(|| InputError(format!("unknown equation `{name}`")))
}

fn compile(spec: &SpecFile, name: &str) -> Res<Report> {
    let t = term_by_name(spec, name)?;
    let parts = compile_term(t);
    let mut text = format!("term {name} : {} over {}\n", spec.show_expr(t.expr()), spec.show_vars(t.vars()));
    let stages = [("D", &parts.d), ("I", &parts.i), ("Q", &parts.q), ("arr", &parts.arr)];
    let mut js = serde_json::Map::new();
    for (label, a) in stages {
        let n = normalize(a);
        writeln!(text, "{label:>3} : {} -> {} = {n}", n.dom, n.cod)?;
        js.insert(label.to_lowercase(), arrow_json(a));
    }
    js.insert("term".into(), json!(name));
    js.insert("expression".into(), json!(spec.show_expr(t.expr())));
    Ok(Report::ok(text, Json::Object(js)))
}

fn check_eq(spec: &SpecFile, name: &str) -> Res<Report> {
    let eq = equation_by_name(spec, name)?;
    let (l, r) = diagram_of_equation(eq);
    let equal = arrows_equal(&l, &r)?;
    let (nl, nr) = (normalize(&l), normalize(&r));
    let text = format!(
        "eq {name} {}\n left : {} -> {} = {nl}\nright : {} -> {} = {nr}\nformally equal: {equal}\n",
        spec.show_equation(eq),
        nl.dom,
        nl.cod,
        nr.dom,
        nr.cod,
    );
    let json = json!({
        "equation": name,
        "text": spec.show_equation(eq),
        "left": arrow_json(&l),
        "right": arrow_json(&r),
        "formally_equal": equal,
    });
    Ok(Report::ok(text, json))
}

fn subst(spec: &SpecFile, target: &str, var: &str, with: &str) -> Res<Report> {
    let t = term_by_name(spec, target)?.clone();
    let u = term_by_name(spec, with)?.clone();
    let x = spec
        .variable(var)
        .cloned()
        .ok_or_else(|| InputError(format!("unknown variable `{var}`")))?;
    let inst = SubstInstance::new(t, x, u)?;
    let result = subst_term_recursive(&inst)?;
    let recursive = arr_of_term(&result);
    let direct = arr_subst_direct(&inst)?;
    let a = a_map(&inst)?;
    let agree = arrows_equal(&recursive, &direct)?;
    let text = format!(
        "result : {} over {}\n     A = {}\n recursive = {}\n    direct = {}\nagree: {agree}\n",
        spec.show_expr(result.expr()),
        spec.show_vars(result.vars()),
        normalize(&a),
        normalize(&recursive),
        normalize(&direct),
    );
    let json = json!({
        "result": spec.show_expr(result.expr()),
        "vars": result.vars().iter().map(|v| spec.var_name(v)).collect::<Vec<_>>(),
        "a_map": arrow_json(&a),
        "recursive": arrow_json(&recursive),
        "direct": arrow_json(&direct),
        "agree": agree,
    });
    Ok(Report {
        code: if agree { EXIT_OK } else { EXIT_REJECTED },
        text,
        json,
    })
}

fn certificate_json(f: &Factorization) -> Json {
    json!({
        "hyp": f.hyp.iter().map(constraint_text).collect::<Vec<_>>(),
        "claim": f.claim.iter().map(constraint_text).collect::<Vec<_>>(),
        "claimcon": f.claimcon,
        "hypcon": f.hypcon,
        "steps": f.steps.iter().enumerate().map(|(i, s)| {
            let (name, cites, arrow) = rule_parts(&s.rule);
            json!({
                "index": i,
                "rule": name,
                "cites": cites,
                "arrow": arrow,
                "concl": constraint_text(&s.concl),
            })
        }).collect::<Vec<_>>(),
        "verif": f.verif,
        "notes": f.notes,
    })
}

fn constraint_text(c: &EqConstraint) -> String {
    format!("{} = {}", normalize(&c.left), normalize(&c.right))
}

/// Rule name, cited step or hypothesis indices, and the composed arrow if any.
fn rule_parts(r: &KernelRule) -> (&'static str, Vec<usize>, Option<String>) {
    match r {
        KernelRule::Hyp(i) => ("hyp", vec![*i], None),
        KernelRule::Refl => ("refl", vec![], None),
        KernelRule::Sym(a) => ("sym", vec![*a], None),
        KernelRule::Trans(a, b) => ("trans", vec![*a, *b], None),
        KernelRule::LeftCompose { arrow, of } => ("left-compose", vec![*of], Some(normalize(arrow).to_string())),
        KernelRule::RightCompose { of, arrow } => ("right-compose", vec![*of], Some(normalize(arrow).to_string())),
        KernelRule::TupleCong(cs) => ("tuple-congruence", cs.clone(), None),
    }
}

fn certificate_text(f: &Factorization, out: &mut String) {
    for (i, s) in f.steps.iter().enumerate() {
        let (name, cites, arrow) = rule_parts(&s.rule);
        let cites: Vec<String> = cites.iter().map(usize::to_string).collect();
        let arrow = arrow.map(|a| format!(" with {a}")).unwrap_or_default();
        let _ = writeln!(out, "  {i:>3}. {}  by {name} [{}]{arrow}", constraint_text(&s.concl), cites.join(", "));
    }
    let _ = writeln!(out, "  verif: {:?}", f.verif);
    for n in &f.notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

fn witnesses(spec: &SpecFile) -> Witnesses {
    inhabited_sorts(&spec.signature)
}

fn check_proof(spec: &SpecFile, only: Option<&str>) -> Res<Report> {
    let proofs: Vec<_> = match only {
        Some(n) => vec![spec.proof(n).ok_or_else(|| InputError(format!("unknown proof `{n}`")))?],
        None => spec.proofs().collect(),
    };
    let wit = witnesses(spec);
    let mut text = String::new();
    let mut results = Vec::new();
    let mut code = EXIT_OK;
    for p in proofs {
        let hyps = spec.hypotheses(p);
        let checked = spec
            .proof_tree(p, &wit)
            .map_err(|e| e.to_string())
            .and_then(|tree| {
                let f = check_deduction(&tree, &hyps, &wit).map_err(|e| e.to_string())?;
                Ok((tree, f))
            });
        match checked {
            Ok((tree, f)) => {
                let report = verify_with_trace(&f);
                let verdict = if report.ok { "valid" } else { "invalid" };
                if !report.ok {
                    code = EXIT_REJECTED;
                }
                writeln!(text, "proof {}: {verdict}", p.name)?;
                writeln!(text, "  proves {}", spec.show_equation(&tree.conclusion))?;
                certificate_text(&f, &mut text);
                results.push(json!({
                    "proof": p.name,
                    "verdict": verdict,
                    "conclusion": spec.show_equation(&tree.conclusion),
                    "certificate": certificate_json(&f),
                    "trace": report.trace,
                }));
            }
            Err(msg) => {
                code = EXIT_REJECTED;
                writeln!(text, "proof {}: rejected\n  {msg}", p.name)?;
                results.push(json!({ "proof": p.name, "verdict": "rejected", "reason": msg }));
            }
        }
    }
    Ok(Report {
        code,
        text,
        json: json!({ "proofs": results }),
    })
}

fn normalize_proof(spec: &SpecFile, name: &str) -> Res<Report> {
    let p = spec
        .proof(name)
        .ok_or_else(|| InputError(format!("unknown proof `{name}`")))?;
    let wit = witnesses(spec);
    let hyps = spec.hypotheses(p);
    let tree = match spec.proof_tree(p, &wit) {
        Ok(t) => t,
        Err(e) => {
            return Ok(Report {
                code: EXIT_REJECTED,
                text: format!("proof {name}: rejected\n  {e}\n"),
                json: json!({ "proof": name, "verdict": "rejected", "reason": e.to_string() }),
            })
        }
    };
    let ld = normalize_deduction(&tree);
    let shape = check_normal_form(&ld);
    let compiled = compile_to_factorization(&ld, &hyps, &wit);
    let direct = check_deduction(&tree, &hyps, &wit);
    let mut text = format!("proof {name}: {} levels\n", ld.levels.len());
    let mut levels = Vec::new();
    for (l, level) in ld.levels.iter().enumerate() {
        writeln!(text, "level {l}:")?;
        let mut entries = Vec::new();
        for (i, e) in level.iter().enumerate() {
            let prem: Vec<String> = e.premises.iter().map(usize::to_string).collect();
            writeln!(
                text,
                "  {i}: {}  by {} [{}]",
                spec.show_equation(&e.equation),
                e.rule.name(),
                prem.join(", ")
            )?;
            entries.push(json!({
                "equation": spec.show_equation(&e.equation),
                "rule": e.rule.name(),
                "premises": e.premises,
            }));
        }
        levels.push(entries);
    }
    let (verdict, cert) = match (&shape, &compiled, &direct) {
        (Ok(()), Ok(f), Ok(d)) => {
            let same = f.claim.len() == d.claim.len()
                && f.claim.iter().zip(&d.claim).all(|(a, b)| a.matches(b));
            let ok = verify_with_trace(f).ok && same;
            (if ok { "valid" } else { "invalid" }, Some(f))
        }
        _ => ("invalid", None),
    };
    writeln!(text, "normal form: {}", shape.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.clone()))?;
    if let Some(f) = cert {
        text.push_str("certificate:\n");
        certificate_text(f, &mut text);
    }
    if let Err(e) = &compiled {
        writeln!(text, "compile: {e}")?;
    }
    writeln!(text, "verdict: {verdict}")?;
    let json = json!({
        "proof": name,
        "levels": levels,
        "normal_form": shape.err().unwrap_or_else(|| "ok".into()),
        "certificate": cert.map(certificate_json),
        "verdict": verdict,
    });
    Ok(Report {
        code: if verdict == "valid" { EXIT_OK } else { EXIT_REJECTED },
        text,
        json,
    })
}

fn oracle(spec: &SpecFile, max_size: usize, equation: Option<&str>, proof: Option<&str>) -> Res<Report> {
    let (label, hyps, goal) = match (equation, proof) {
        (Some(e), _) => (format!("equation {e}"), Vec::new(), equation_by_name(spec, e)?.clone()),
        (None, Some(p)) => {
            let pd = spec
                .proof(p)
                .ok_or_else(|| InputError(format!("unknown proof `{p}`")))?;
            let tree = spec.proof_tree(pd, &witnesses(spec))?;
            (format!("proof {p}"), spec.hypotheses(pd), tree.conclusion)
        }
        (None, None) => return Err(InputError("one of --equation or --proof is required".into())),
    };
    let found = find_counterexample(&spec.signature, max_size, &hyps, &goal)?;
    let claim = spec.show_equation(&goal);
    Ok(match found {
        None => Report::ok(
            format!("{label}: {claim}\nno counterexample with carriers of size <= {max_size}\n"),
            json!({ "target": label, "claim": claim, "max_size": max_size, "counterexample": null }),
        ),
        Some(cx) => {
            let assignment: Vec<String> = goal
                .vars()
                .iter()
                .zip(&cx.assignment)
                .map(|(v, a)| format!("{} = {a}", spec.var_name(v)))
                .collect();
            Report {
                code: EXIT_REJECTED,
                text: format!(
                    "{label}: {claim}\ncounterexample:\n{}assignment: {}\n",
                    cx.model,
                    assignment.join(", ")
                ),
                json: json!({
                    "target": label,
                    "claim": claim,
                    "max_size": max_size,
                    "counterexample": {
                        "model": cx.model,
                        "assignment": assignment,
                    },
                }),
            }
        }
    })
}
