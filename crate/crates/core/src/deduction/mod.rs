//! Equational deduction: the six inference rules, deduction trees, their
//! coding as arrow-equality certificates, the levelled normal form, and a
//! finite-model oracle used to check soundness independently.

mod certificate;
mod model;
mod normal_form;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpcat::{arr_of_term, arrows_equal, diagram_of_equation, FPArrow};
use crate::signature::{Sort, Variable};
use crate::subst::{a_map, retyping_map, subst_expr, SubstInstance};
use crate::termlang::{Equation, Expression, Term};

pub use certificate::{
    paste_factorizations, product_factorizations, verify_factorization, verify_with_trace,
    EqConstraint, Factorization, KernelRule, KernelStep, VerifyReport,
};
pub use model::{
    enumerate_models, enumerate_models_with_sizes, eval_arrow, eval_expression,
    find_counterexample, model_count, points, satisfies, Counterexample, FiniteModel, ModelIter,
    Value, MODEL_LIMIT,
};
pub use normal_form::{
    check_normal_form, compile_to_factorization, normalize_deduction, LevelEntry,
    LevelledDeduction,
};

/// Closed witnesses of the inhabited sorts, see
/// [`inhabited_sorts`](crate::signature::inhabited_sorts).
pub type Witnesses = BTreeMap<Sort, Expression>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleInstance {
    /// Cites the `i`-th hypothesis (0-based).
    Hypothesis(usize),
    Reflexivity(Term),
    Symmetry,
    Transitivity,
    /// Drops an unused variable of an inhabited sort.
    Concretion(Variable),
    /// Adds a variable.
    Abstraction(Variable),
    /// Substitutes the second premise's sides for the variable in the first's.
    Substitutivity(Variable),
    /// Carries an equation one level up unchanged.
    Copy,
}

impl RuleInstance {
    pub fn arity(&self) -> usize {
        match self {
            RuleInstance::Hypothesis(_) | RuleInstance::Reflexivity(_) => 0,
            RuleInstance::Symmetry
            | RuleInstance::Concretion(_)
            | RuleInstance::Abstraction(_)
            | RuleInstance::Copy => 1,
            RuleInstance::Transitivity | RuleInstance::Substitutivity(_) => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RuleInstance::Hypothesis(_) => "hyp",
            RuleInstance::Reflexivity(_) => "refl",
            RuleInstance::Symmetry => "sym",
            RuleInstance::Transitivity => "trans",
            RuleInstance::Concretion(_) => "conc",
            RuleInstance::Abstraction(_) => "abs",
            RuleInstance::Substitutivity(_) => "subst",
            RuleInstance::Copy => "copy",
        }
    }
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleInstance::Hypothesis(i) => write!(f, "hyp {i}"),
            RuleInstance::Reflexivity(t) => write!(f, "refl {}", t.expr()),
            RuleInstance::Concretion(x) => write!(f, "conc {x}"),
            RuleInstance::Abstraction(x) => write!(f, "abs {x}"),
            RuleInstance::Substitutivity(x) => write!(f, "subst {x}"),
            r => f.write_str(r.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeductionTree {
    pub conclusion: Equation,
    pub rule: RuleInstance,
    pub premises: Vec<DeductionTree>,
}

impl DeductionTree {
    pub fn new(conclusion: Equation, rule: RuleInstance, premises: Vec<DeductionTree>) -> Result<Self> {
        if premises.len() != rule.arity() {
            return Err(Error::SideConditionViolated(format!(
                "{} takes {} premises, got {}",
                rule.name(),
                rule.arity(),
                premises.len()
            )));
        }
        Ok(DeductionTree {
            conclusion,
            rule,
            premises,
        })
    }

    /// Applies `rule` forward to the premises' conclusions.
    pub fn derive(
        rule: RuleInstance,
        premises: Vec<DeductionTree>,
        hypotheses: &[Equation],
        witnesses: &Witnesses,
    ) -> Result<Self> {
        let prem: Vec<Equation> = premises.iter().map(|p| p.conclusion.clone()).collect();
        let conclusion = apply_rule(&prem, &rule, hypotheses, witnesses)?;
        DeductionTree::new(conclusion, rule, premises)
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(DeductionTree::depth).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(DeductionTree::size).sum::<usize>()
    }
}

fn side(msg: impl Into<String>) -> Error {
    Error::SideConditionViolated(msg.into())
}

/// The conclusion of `rule` applied to `premises`, after checking its side
/// conditions.
pub fn apply_rule(
    premises: &[Equation],
    rule: &RuleInstance,
    hypotheses: &[Equation],
    witnesses: &Witnesses,
) -> Result<Equation> {
    if premises.len() != rule.arity() {
        return Err(side(format!(
            "{} takes {} premises, got {}",
            rule.name(),
            rule.arity(),
            premises.len()
        )));
    }
    match rule {
        RuleInstance::Hypothesis(i) => hypotheses
            .get(*i)
            .cloned()
            .ok_or(Error::UnknownHypothesis(*i)),
        RuleInstance::Reflexivity(t) => {
            Equation::new(t.expr().clone(), t.expr().clone(), t.vars().clone())
        }
        RuleInstance::Symmetry => Ok(premises[0].swapped()),
        RuleInstance::Copy => Ok(premises[0].clone()),
        RuleInstance::Transitivity => {
            let (a, b) = (&premises[0], &premises[1]);
            if a.vars() != b.vars() {
                return Err(side("transitivity premises have different variable sets"));
            }
            if a.sort() != b.sort() {
                return Err(Error::MiddleTermMismatch);
            }
            let mid_a = arr_of_term(&a.right_term());
            let mid_b = arr_of_term(&b.left_term());
            if !arrows_equal(&mid_a, &mid_b)? {
                return Err(Error::MiddleTermMismatch);
            }
            Equation::new(a.left().clone(), b.right().clone(), a.vars().clone())
        }
        RuleInstance::Concretion(x) => {
            let p = &premises[0];
            if !p.vars().contains(x) {
                return Err(side(format!("{x} is not declared")));
            }
            if p.occurring_vars().contains(x) {
                return Err(side(format!("{x} occurs in the equation")));
            }
            if !witnesses.contains_key(&x.sort) {
                return Err(Error::UninhabitedFill(x.sort.name.clone()));
            }
            p.with_vars(p.vars().without(x))
        }
        RuleInstance::Abstraction(x) => {
            let p = &premises[0];
            if p.vars().contains(x) {
                return Err(side(format!("{x} is already declared")));
            }
            p.with_vars(p.vars().with(x.clone()))
        }
        RuleInstance::Substitutivity(x) => {
            let (p, q) = (&premises[0], &premises[1]);
            if !p.vars().contains(x) {
                return Err(side(format!("{x} is not declared")));
            }
            if *q.sort() != x.sort {
                return Err(Error::SortMismatch(0));
            }
            let vars = p.vars().without(x).union(q.vars());
            Equation::new(
                subst_expr(p.left(), x, q.left())?,
                subst_expr(p.right(), x, q.right())?,
                vars,
            )
        }
    }
}

fn constraint(eq: &Equation) -> EqConstraint {
    EqConstraint::from_pair(diagram_of_equation(eq))
}

fn with_vars(e: &Expression, vars: &crate::termlang::VarSet) -> Result<FPArrow> {
    Ok(arr_of_term(&Term::new(e.clone(), vars.clone(), e.sort().clone())?))
}

/// Validates one rule application and codes it as a certificate whose
/// hypotheses are the premises' arrow pairs and whose single claim is the
/// conclusion's.
pub fn check_rule(
    premises: &[Equation],
    rule: &RuleInstance,
    conclusion: &Equation,
    witnesses: &Witnesses,
) -> Result<Factorization> {
    if let RuleInstance::Hypothesis(_) = rule {
        return Err(side("hypotheses are cited, not derived"));
    }
    let expected = apply_rule(premises, rule, &[], witnesses)?;
    if expected != *conclusion {
        return Err(side(format!(
            "{} yields {expected}, not {conclusion}",
            rule.name()
        )));
    }
    let hyp: Vec<EqConstraint> = premises.iter().map(constraint).collect();
    let claim = constraint(conclusion);
    let step = |rule: KernelRule, l: FPArrow, r: FPArrow| KernelStep::new(rule, EqConstraint { left: l, right: r });
    let mut steps: Vec<KernelStep> = hyp
        .iter()
        .enumerate()
        .map(|(i, h)| KernelStep::new(KernelRule::Hyp(i), h.clone()))
        .collect();
    match rule {
        RuleInstance::Hypothesis(_) => unreachable!(),
        RuleInstance::Reflexivity(_) => {
            steps.push(step(KernelRule::Refl, claim.left.clone(), claim.left.clone()));
        }
        RuleInstance::Copy => {}
        RuleInstance::Symmetry => {
            steps.push(step(KernelRule::Sym(0), hyp[0].right.clone(), hyp[0].left.clone()));
        }
        RuleInstance::Transitivity => {
            steps.push(step(
                KernelRule::Trans(0, 1),
                hyp[0].left.clone(),
                hyp[1].right.clone(),
            ));
        }
        RuleInstance::Concretion(_) | RuleInstance::Abstraction(_) => {
            let h = retyping_map(conclusion.vars(), premises[0].vars(), witnesses)?;
            steps.push(step(
                KernelRule::RightCompose {
                    of: 0,
                    arrow: h.clone(),
                },
                FPArrow::Comp(Box::new(hyp[0].left.clone()), Box::new(h.clone())),
                FPArrow::Comp(Box::new(hyp[0].right.clone()), Box::new(h)),
            ));
        }
        RuleInstance::Substitutivity(x) => {
            substitutivity_steps(&mut steps, premises, x, witnesses)?;
        }
    }
    let last = steps.len() - 1;
    Ok(Factorization::new(hyp, vec![claim], steps, vec![last]))
}

/// Derives `(A, A')` from the second premise by tuple congruence, widens the
/// first premise to `V ∪ W`, and closes with `F∘A = F∘A' = F'∘A'`.
fn substitutivity_steps(
    steps: &mut Vec<KernelStep>,
    premises: &[Equation],
    x: &Variable,
    witnesses: &Witnesses,
) -> Result<()> {
    let (p, q) = (&premises[0], &premises[1]);
    let target = |e: &Expression| Term::new(e.clone(), p.vars().clone(), p.sort().clone());
    let repl = |e: &Expression| Term::new(e.clone(), q.vars().clone(), q.sort().clone());
    let inst = SubstInstance::new(target(p.left())?, x.clone(), repl(q.left())?)?;
    let inst_r = SubstInstance::new(target(p.right())?, x.clone(), repl(q.right())?)?;
    let a = a_map(&inst)?;
    let a_r = a_map(&inst_r)?;
    let joint = inst.joint_vars();
    let result = inst.result_vars();
    let push = |steps: &mut Vec<KernelStep>, rule, left, right| {
        steps.push(KernelStep::new(rule, EqConstraint { left, right }));
        steps.len() - 1
    };

    // (f∘π, f'∘π) = (arr(e, V∪W), arr(e', V∪W))
    let widen = retyping_map(&joint, p.vars(), witnesses)?;
    let big_f = with_vars(p.left(), &joint)?;
    let big_f_r = with_vars(p.right(), &joint)?;
    let widened = push(
        steps,
        KernelRule::RightCompose { of: 0, arrow: widen },
        big_f.clone(),
        big_f_r.clone(),
    );

    // (g∘β, g'∘β) = (arr(u, (V∖x)∪W), arr(u', (V∖x)∪W))
    let narrow = retyping_map(&result, q.vars(), witnesses)?;
    let slot = push(
        steps,
        KernelRule::RightCompose { of: 1, arrow: narrow },
        with_vars(q.left(), &result)?,
        with_vars(q.right(), &result)?,
    );

    let (FPArrow::Tuple { comps, .. }, FPArrow::Tuple { comps: comps_r, .. }) = (&a, &a_r) else {
        unreachable!("substitution arrows are tuples");
    };
    let mut parts = Vec::with_capacity(comps.len());
    for (v, (c, c_r)) in joint.iter().zip(comps.iter().zip(comps_r)) {
        if v == x {
            parts.push(slot);
        } else {
            debug_assert_eq!(c, c_r);
            parts.push(push(steps, KernelRule::Refl, c.clone(), c.clone()));
        }
    }
    let cong = push(steps, KernelRule::TupleCong(parts), a.clone(), a_r.clone());
    let left = push(
        steps,
        KernelRule::LeftCompose {
            arrow: big_f.clone(),
            of: cong,
        },
        FPArrow::Comp(Box::new(big_f.clone()), Box::new(a.clone())),
        FPArrow::Comp(Box::new(big_f.clone()), Box::new(a_r.clone())),
    );
    let right = push(
        steps,
        KernelRule::RightCompose {
            of: widened,
            arrow: a_r.clone(),
        },
        FPArrow::Comp(Box::new(big_f), Box::new(a_r.clone())),
        FPArrow::Comp(Box::new(big_f_r.clone()), Box::new(a_r.clone())),
    );
    push(
        steps,
        KernelRule::Trans(left, right),
        FPArrow::Comp(Box::new(with_vars(p.left(), &joint)?), Box::new(a)),
        FPArrow::Comp(Box::new(big_f_r), Box::new(a_r)),
    );
    Ok(())
}

/// Checks every node of `tree` and assembles one certificate from the
/// hypotheses to the conclusion.
pub fn check_deduction(
    tree: &DeductionTree,
    hypotheses: &[Equation],
    witnesses: &Witnesses,
) -> Result<Factorization> {
    fn emit(
        t: &DeductionTree,
        hyps: &[Equation],
        wit: &Witnesses,
        out: &mut Vec<KernelStep>,
    ) -> Result<usize> {
        if t.premises.len() != t.rule.arity() {
            return Err(side(format!("{} has the wrong number of premises", t.rule.name())));
        }
        if let RuleInstance::Hypothesis(i) = t.rule {
            let h = hyps.get(i).ok_or(Error::UnknownHypothesis(i))?;
            if *h != t.conclusion {
                return Err(side(format!("hypothesis {i} is {h}, not {}", t.conclusion)));
            }
            out.push(KernelStep::new(KernelRule::Hyp(i), constraint(h)));
            return Ok(out.len() - 1);
        }
        let cited = t
            .premises
            .iter()
            .map(|p| emit(p, hyps, wit, out))
            .collect::<Result<Vec<_>>>()?;
        let prem: Vec<Equation> = t.premises.iter().map(|p| p.conclusion.clone()).collect();
        let coded = check_rule(&prem, &t.rule, &t.conclusion, wit)?;
        let map = certificate::splice(out, &coded.steps, &cited);
        Ok(map[coded.verif[0]])
    }
    let mut steps = Vec::new();
    let root = emit(tree, hypotheses, witnesses, &mut steps)?;
    Ok(Factorization::new(
        hypotheses.iter().map(constraint).collect(),
        vec![constraint(&tree.conclusion)],
        steps,
        vec![root],
    ))
}
