//! Property tests over a fixed two-sorted signature. Expressions are decoded
//! from random byte strings so shrinking stays meaningful.

use std::sync::Arc;

use proptest::prelude::*;

use eqsketch::deduction::{check_rule, verify_factorization, apply_rule, RuleInstance};
use eqsketch::dsl::parse_spec;
use eqsketch::fpcat::{arr_of_term, arrows_equal, normalize};
use eqsketch::signature::{inhabited_sorts, validate_signature, OpDecl, Operation, Signature, Sort, Variable};
use eqsketch::subst::{arr_subst_direct, subst_term_recursive, SubstInstance};
use eqsketch::termlang::{var_set, Equation, Expression, Term};

fn sig() -> Signature {
    validate_signature(
        &["s", "t"],
        &[
            OpDecl::new("e", &[], "s"),
            OpDecl::new("m", &["s", "s"], "s"),
            OpDecl::new("i", &["s"], "s"),
            OpDecl::new("k", &["t"], "s"),
            OpDecl::new("g", &["s", "t"], "t"),
        ],
    )
    .unwrap()
}

struct Decoder<'a> {
    genes: &'a [u8],
    at: usize,
}

impl Decoder<'_> {
    fn next(&mut self) -> u8 {
        let g = self.genes.get(self.at).copied().unwrap_or(0);
        self.at += 1;
        g
    }

    fn expr(&mut self, sig: &Signature, sort: &Sort, depth: usize) -> Expression {
        let g = self.next();
        let ops: Vec<&Arc<Operation>> = sig.operations().iter().filter(|o| &o.output == sort).collect();
        if depth == 0 || g % 3 == 0 || ops.is_empty() {
            if g % 5 == 4 {
                if let Some(c) = ops.iter().find(|o| o.is_constant()) {
                    return Expression::constant(c).unwrap();
                }
            }
            return Expression::var(Variable::new(sort.clone(), 1 + u32::from(self.next() % 3)));
        }
        let op = ops[usize::from(g) % ops.len()];
        let args = op.inputs.iter().map(|s| self.expr(sig, s, depth - 1)).collect();
        Expression::app(op, args).unwrap()
    }
}

fn decode(sig: &Signature, genes: &[u8], sort: &Sort) -> Expression {
    Decoder { genes, at: 0 }.expr(sig, sort, 4)
}

fn pick_sort(sig: &Signature, g: u8) -> Sort {
    sig.sorts()[usize::from(g) % sig.sorts().len()].clone()
}

fn name(v: &Variable) -> String {
    format!("{}{}", ["x", "y"][v.sort.index], v.subscript)
}

fn render(e: &Expression) -> String {
    match e {
        Expression::Var(v) => name(v),
        Expression::App(op, args) if args.is_empty() => op.name.clone(),
        Expression::App(op, args) => {
            let parts: Vec<_> = args.iter().map(render).collect();
            format!("{}({})", op.name, parts.join(", "))
        }
    }
}

fn genes() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 1..48)
}

proptest! {
    #[test]
    fn normalization_is_idempotent(g in genes(), s in any::<u8>()) {
        let sig = sig();
        let sort = pick_sort(&sig, s);
        let e = decode(&sig, &g, &sort);
        let t = Term::new(e.clone(), var_set(&e), sort).unwrap();
        let once = normalize(&arr_of_term(&t));
        let twice = normalize(&once.embed());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn substitution_routes_agree(g in genes(), h in genes(), s in any::<u8>(), j in 1u32..4) {
        let sig = sig();
        let sort = pick_sort(&sig, s);
        let x = Variable::new(pick_sort(&sig, s / 2), j);
        let e = decode(&sig, &g, &sort);
        let u = decode(&sig, &h, &x.sort);
        let target = Term::new(e.clone(), var_set(&e).with(x.clone()), sort).unwrap();
        let repl = Term::new(u.clone(), var_set(&u), x.sort.clone()).unwrap();
        let inst = SubstInstance::new(target, x, repl).unwrap();
        let recursive = arr_of_term(&subst_term_recursive(&inst).unwrap());
        let direct = arr_subst_direct(&inst).unwrap();
        prop_assert!(arrows_equal(&recursive, &direct).unwrap());
    }

    #[test]
    fn symmetry_twice_is_certified(g in genes(), h in genes(), s in any::<u8>()) {
        let sig = sig();
        let wit = inhabited_sorts(&sig);
        let sort = pick_sort(&sig, s);
        let (l, r) = (decode(&sig, &g, &sort), decode(&sig, &h, &sort));
        let eq = Equation::new(l.clone(), r.clone(), var_set(&l).union(&var_set(&r))).unwrap();
        let once = apply_rule(std::slice::from_ref(&eq), &RuleInstance::Symmetry, &[], &wit).unwrap();
        let back = apply_rule(std::slice::from_ref(&once), &RuleInstance::Symmetry, &[], &wit).unwrap();
        prop_assert_eq!(&back, &eq);
        let f = check_rule(std::slice::from_ref(&eq), &RuleInstance::Symmetry, &once, &wit).unwrap();
        prop_assert!(verify_factorization(&f));
    }

    #[test]
    fn printed_specs_reparse(g in genes(), h in genes(), s in any::<u8>()) {
        let sig = sig();
        let sort = pick_sort(&sig, s);
        let (l, r) = (decode(&sig, &g, &sort), decode(&sig, &h, &sort));
        let binders: Vec<String> = var_set(&l)
            .union(&var_set(&r))
            .iter()
            .map(|v| format!("{}:{}", name(v), v.sort.name))
            .collect();
        let text = format!(
            "sort s t\nop e : -> s\nop m : s s -> s\nop i : s -> s\nop k : t -> s\nop g : s t -> t\n\
             eq q [{}] : {} = {}\nterm u [{}] : {}\n",
            binders.join(", "), render(&l), render(&r), binders.join(", "), render(&l)
        );
        let spec = parse_spec(&text).unwrap();
        let printed = spec.print();
        let again = parse_spec(&printed).unwrap();
        prop_assert_eq!(&again.print(), &printed);
        let (a, b) = (spec.equation("q").unwrap(), again.equation("q").unwrap());
        prop_assert_eq!(&a.equation, &b.equation);
    }
}
