//! Seeded random generators shared by the acceptance suite.

#![allow(dead_code)]

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use eqsketch::deduction::{DeductionTree, RuleInstance, Witnesses};
use eqsketch::fpcat::{normalize, FPArrow, FPObject, NormalBody};
use eqsketch::signature::{validate_signature, OpDecl, Operation, Signature, Sort, Variable};
use eqsketch::termlang::{var_set, Equation, Expression, Term, VarSet};

pub fn signature(rng: &mut StdRng, max_sorts: usize, max_ops: usize, max_arity: usize) -> Signature {
    let n_sorts = rng.gen_range(1..=max_sorts);
    let names: Vec<String> = (0..n_sorts).map(|i| format!("s{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let n_ops = rng.gen_range(1..=max_ops);
    let ops: Vec<OpDecl> = (0..n_ops)
        .map(|k| {
            let arity = rng.gen_range(0..=max_arity);
            let ins: Vec<&str> = (0..arity).map(|_| *refs.choose(rng).unwrap()).collect();
            OpDecl::new(&format!("o{k}"), &ins, refs.choose(rng).unwrap())
        })
        .collect();
    validate_signature(&refs, &ops).expect("generated signatures are valid")
}

pub fn variable(rng: &mut StdRng, sort: &Sort, max_sub: u32) -> Variable {
    Variable::new(sort.clone(), rng.gen_range(1..=max_sub))
}

/// An expression of `sort` with depth at most `depth`.
pub fn expression(rng: &mut StdRng, sig: &Signature, sort: &Sort, depth: usize, max_sub: u32) -> Expression {
    let ops: Vec<&Arc<Operation>> = sig.operations().iter().filter(|o| &o.output == sort).collect();
    if depth == 0 || ops.is_empty() || rng.gen_bool(0.3) {
        let closed: Vec<_> = ops.iter().filter(|o| o.is_constant()).collect();
        if !closed.is_empty() && rng.gen_bool(0.2) {
            return Expression::constant(closed.choose(rng).unwrap()).unwrap();
        }
        return Expression::var(variable(rng, sort, max_sub));
    }
    let op = *ops.choose(rng).unwrap();
    let args = op
        .inputs
        .iter()
        .map(|s| expression(rng, sig, s, depth - 1, max_sub))
        .collect();
    Expression::app(op, args).unwrap()
}

/// `vars(e)` plus a few random extra variables.
pub fn widen(rng: &mut StdRng, sig: &Signature, base: VarSet, extra: usize, max_sub: u32) -> VarSet {
    let mut vs = base;
    for _ in 0..rng.gen_range(0..=extra) {
        let s = sig.sorts().choose(rng).unwrap();
        vs.insert(variable(rng, s, max_sub));
    }
    vs
}

pub fn term(rng: &mut StdRng, sig: &Signature, sort: &Sort, depth: usize, max_sub: u32) -> Term {
    let e = expression(rng, sig, sort, depth, max_sub);
    let vars = widen(rng, sig, var_set(&e), 2, max_sub);
    Term::new(e, vars, sort.clone()).unwrap()
}

pub fn equation(rng: &mut StdRng, sig: &Signature, depth: usize, max_sub: u32) -> Equation {
    let sort = sig.sorts().choose(rng).unwrap();
    let l = expression(rng, sig, sort, depth, max_sub);
    let r = expression(rng, sig, sort, depth, max_sub);
    let vars = widen(rng, sig, var_set(&l).union(&var_set(&r)), 2, max_sub);
    Equation::new(l, r, vars).unwrap()
}

pub fn object(rng: &mut StdRng, sig: &Signature, depth: usize) -> FPObject {
    if depth == 0 || rng.gen_bool(0.5) {
        return FPObject::Leaf(sig.sorts().choose(rng).unwrap().clone());
    }
    let n = rng.gen_range(0..=3);
    FPObject::Prod((0..n).map(|_| object(rng, sig, depth - 1)).collect())
}

fn paths_to(obj: &FPObject, sort: &Sort, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    match obj {
        FPObject::Leaf(s) if s == sort => out.push(prefix.clone()),
        FPObject::Leaf(_) => {}
        FPObject::Prod(cs) => {
            for (i, c) in cs.iter().enumerate() {
                prefix.push(i + 1);
                paths_to(c, sort, prefix, out);
                prefix.pop();
            }
        }
    }
}

/// A random normal body `dom -> cod`, or `None` when some sort is unreachable.
pub fn body(rng: &mut StdRng, sig: &Signature, dom: &FPObject, cod: &FPObject, depth: usize) -> Option<NormalBody> {
    match cod {
        FPObject::Prod(cs) => Some(NormalBody::Tuple(
            cs.iter().map(|c| body(rng, sig, dom, c, depth)).collect::<Option<Vec<_>>>()?,
        )),
        FPObject::Leaf(s) => {
            let mut paths = Vec::new();
            paths_to(dom, s, &mut Vec::new(), &mut paths);
            let ops: Vec<_> = sig.operations().iter().filter(|o| &o.output == s).collect();
            let use_op = !ops.is_empty() && depth > 0 && (paths.is_empty() || rng.gen_bool(0.5));
            if use_op {
                for _ in 0..4 {
                    let op = *ops.choose(rng).unwrap();
                    let args: Option<Vec<_>> = op
                        .inputs
                        .iter()
                        .map(|i| body(rng, sig, dom, &FPObject::Leaf(i.clone()), depth - 1))
                        .collect();
                    if let Some(args) = args {
                        return Some(NormalBody::App(op.clone(), args));
                    }
                }
            }
            paths.choose(rng).map(|p| NormalBody::Path(p.clone()))
        }
    }
}

/// A random arrow `dom -> cod` in normal shape.
pub fn arrow(rng: &mut StdRng, sig: &Signature, dom: &FPObject, cod: &FPObject, depth: usize) -> Option<FPArrow> {
    let b = body(rng, sig, dom, cod, depth)?;
    Some(
        eqsketch::fpcat::NormalArrow {
            dom: dom.clone(),
            cod: cod.clone(),
            body: b,
        }
        .embed(),
    )
}

fn comp(g: FPArrow, f: FPArrow) -> FPArrow {
    FPArrow::Comp(Box::new(g), Box::new(f))
}

/// Rewrites `a` with finite-product laws so that the syntax changes but the
/// arrow does not.
pub fn scramble(rng: &mut StdRng, a: &FPArrow, fuel: usize) -> FPArrow {
    if fuel == 0 {
        return a.clone();
    }
    let (dom, cod) = (a.dom(), a.cod());
    let inner = match a {
        FPArrow::Comp(g, f) => comp(scramble(rng, g, fuel - 1), scramble(rng, f, fuel - 1)),
        FPArrow::Tuple { dom, comps } => FPArrow::Tuple {
            dom: dom.clone(),
            comps: comps.iter().map(|c| scramble(rng, c, fuel - 1)).collect(),
        },
        other => other.clone(),
    };
    match rng.gen_range(0..6) {
        0 => comp(inner, FPArrow::Id(dom)),
        1 => comp(FPArrow::Id(cod), inner),
        2 => match &cod {
            FPObject::Prod(cs) => FPArrow::Tuple {
                dom,
                comps: (1..=cs.len())
                    .map(|i| comp(FPArrow::Proj { obj: cod.clone(), index: i }, inner.clone()))
                    .collect(),
            },
            _ => inner,
        },
        3 => {
            // a = a ∘ p1 ∘ <id, !>
            let pair = FPObject::Prod(vec![dom.clone(), FPObject::terminal()]);
            let t = FPArrow::Tuple {
                dom: dom.clone(),
                comps: vec![FPArrow::Id(dom.clone()), FPArrow::Bang(dom)],
            };
            comp(inner, comp(FPArrow::Proj { obj: pair, index: 1 }, t))
        }
        4 => {
            // a = p2 ∘ <!, a>
            let pair = FPObject::Prod(vec![FPObject::terminal(), cod]);
            let t = FPArrow::Tuple {
                dom: dom.clone(),
                comps: vec![FPArrow::Bang(dom), inner],
            };
            comp(FPArrow::Proj { obj: pair, index: 2 }, t)
        }
        _ => inner,
    }
}

pub fn same_normal_form(a: &FPArrow, b: &FPArrow) -> bool {
    normalize(a) == normalize(b)
}

/// A random valid deduction of depth at most `depth` from `hyps`.
pub fn deduction(
    rng: &mut StdRng,
    sig: &Signature,
    hyps: &[Equation],
    wit: &Witnesses,
    depth: usize,
) -> DeductionTree {
    let derive = |rule, prem| DeductionTree::derive(rule, prem, hyps, wit).unwrap();
    if depth <= 1 || rng.gen_bool(0.2) {
        if !hyps.is_empty() && rng.gen_bool(0.7) {
            return derive(RuleInstance::Hypothesis(rng.gen_range(0..hyps.len())), vec![]);
        }
        let sort = sig.sorts().choose(rng).unwrap();
        return derive(RuleInstance::Reflexivity(term(rng, sig, sort, 2, 3)), vec![]);
    }
    let p = deduction(rng, sig, hyps, wit, depth - 1);
    let eq = p.conclusion.clone();
    match rng.gen_range(0..5) {
        0 => derive(RuleInstance::Symmetry, vec![p]),
        1 => {
            if depth >= 3 && rng.gen_bool(0.5) {
                let p = deduction(rng, sig, hyps, wit, depth - 2);
                let back = derive(RuleInstance::Symmetry, vec![p.clone()]);
                derive(RuleInstance::Transitivity, vec![p, back])
            } else {
                let t = Term::new(eq.right().clone(), eq.vars().clone(), eq.sort().clone()).unwrap();
                let r = derive(RuleInstance::Reflexivity(t), vec![]);
                derive(RuleInstance::Transitivity, vec![p, r])
            }
        }
        2 => {
            let occurring = eq.occurring_vars();
            let spare: Vec<_> = eq
                .vars()
                .iter()
                .filter(|v| !occurring.contains(v) && wit.contains_key(&v.sort))
                .cloned()
                .collect();
            match spare.choose(rng) {
                Some(x) => derive(RuleInstance::Concretion(x.clone()), vec![p]),
                None => derive(RuleInstance::Symmetry, vec![p]),
            }
        }
        3 => {
            let s = sig.sorts().choose(rng).unwrap();
            let fresh = (1..).map(|j| Variable::new(s.clone(), j)).find(|v| !eq.vars().contains(v)).unwrap();
            derive(RuleInstance::Abstraction(fresh), vec![p])
        }
        _ => {
            let q = deduction(rng, sig, hyps, wit, depth - 1);
            let qs = q.conclusion.sort().clone();
            let candidates: Vec<_> = eq.vars().iter().filter(|v| v.sort == qs).cloned().collect();
            match candidates.choose(rng) {
                Some(x) => derive(RuleInstance::Substitutivity(x.clone()), vec![p, q]),
                None => derive(RuleInstance::Symmetry, vec![p]),
            }
        }
    }
}
