//! Levelled deductions. Level 0 holds the leaves, every entry at level `l`
//! draws its premises from level `l - 1`, and each entry of level `l - 1` is
//! used exactly once. Such a deduction compiles to a pasting of one product
//! certificate per level.

use serde::Serialize;

use super::{check_rule, constraint, side, DeductionTree, RuleInstance, Witnesses};
use super::certificate::{paste_factorizations, product_factorizations, Factorization, KernelRule, KernelStep};
use crate::error::{Error, Result};
use crate::termlang::Equation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelEntry {
    pub equation: Equation,
    pub rule: RuleInstance,
    /// Indices into the level below.
    pub premises: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelledDeduction {
    /// `levels[0]` are the leaves; the last level holds the conclusion.
    pub levels: Vec<Vec<LevelEntry>>,
}

impl LevelledDeduction {
    pub fn height(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn conclusion(&self) -> Option<&Equation> {
        self.levels.last().and_then(|l| l.first()).map(|e| &e.equation)
    }

    pub fn copies(&self) -> usize {
        self.levels
            .iter()
            .flatten()
            .filter(|e| e.rule == RuleInstance::Copy)
            .count()
    }
}

fn height(t: &DeductionTree) -> usize {
    t.premises.iter().map(|p| height(p) + 1).max().unwrap_or(0)
}

/// Lays `tree` out level by level, carrying short branches upward with
/// [`RuleInstance::Copy`].
pub fn normalize_deduction(tree: &DeductionTree) -> LevelledDeduction {
    let top = height(tree);
    let mut levels = vec![Vec::new(); top + 1];
    let mut frontier = vec![tree];
    for l in (0..=top).rev() {
        let mut next = Vec::new();
        for t in frontier {
            let entry = if height(t) == l {
                let premises = t
                    .premises
                    .iter()
                    .map(|p| {
                        next.push(p);
                        next.len() - 1
                    })
                    .collect();
                LevelEntry {
                    equation: t.conclusion.clone(),
                    rule: t.rule.clone(),
                    premises,
                }
            } else {
                next.push(t);
                LevelEntry {
                    equation: t.conclusion.clone(),
                    rule: RuleInstance::Copy,
                    premises: vec![next.len() - 1],
                }
            };
            levels[l].push(entry);
        }
        frontier = next;
    }
    LevelledDeduction { levels }
}

/// Checks the shape conditions of a levelled deduction (not the rules).
pub fn check_normal_form(ld: &LevelledDeduction) -> Result<(), String> {
    let Some(last) = ld.levels.last() else {
        return Err("no levels".into());
    };
    if last.len() != 1 {
        return Err(format!("top level has {} entries", last.len()));
    }
    for (i, e) in ld.levels[0].iter().enumerate() {
        if e.rule.arity() != 0 || !e.premises.is_empty() {
            return Err(format!("level 0 entry {i} is not a leaf"));
        }
    }
    for l in 1..ld.levels.len() {
        let below = ld.levels[l - 1].len();
        let mut used = vec![0usize; below];
        for (i, e) in ld.levels[l].iter().enumerate() {
            if e.premises.len() != e.rule.arity() || e.premises.is_empty() {
                return Err(format!("level {l} entry {i} has the wrong number of premises"));
            }
            for &p in &e.premises {
                if p >= below {
                    return Err(format!("level {l} entry {i} cites missing premise {p}"));
                }
                used[p] += 1;
            }
        }
        if let Some(p) = used.iter().position(|&n| n != 1) {
            return Err(format!(
                "level {} entry {p} is used {} times",
                l - 1,
                used[p]
            ));
        }
    }
    Ok(())
}

/// Compiles a levelled deduction into `F0 ; α1 ; F1 ; ... ; αL ; FL`, where
/// `Fl` is the product of the rule certificates of level `l` and `αl`
/// reorders level `l - 1` into the order those certificates consume it.
pub fn compile_to_factorization(
    ld: &LevelledDeduction,
    hypotheses: &[Equation],
    witnesses: &Witnesses,
) -> Result<Factorization> {
    check_normal_form(ld).map_err(Error::SideConditionViolated)?;
    let hyp: Vec<_> = hypotheses.iter().map(constraint).collect();

    let mut steps = Vec::new();
    for e in &ld.levels[0] {
        match &e.rule {
            RuleInstance::Hypothesis(i) => {
                let h = hypotheses.get(*i).ok_or(Error::UnknownHypothesis(*i))?;
                if *h != e.equation {
                    return Err(side(format!("hypothesis {i} is {h}, not {}", e.equation)));
                }
                steps.push(KernelStep::new(KernelRule::Hyp(*i), constraint(h)));
            }
            rule => {
                let coded = check_rule(&[], rule, &e.equation, witnesses)?;
                steps.extend(coded.steps);
            }
        }
    }
    let verif = (0..steps.len()).collect();
    let claims = ld.levels[0].iter().map(|e| constraint(&e.equation)).collect();
    let mut acc = Factorization::new(hyp, claims, steps, verif)
        .with_note(format!("level 0: {} leaves", ld.levels[0].len()));

    for l in 1..ld.levels.len() {
        let below = &ld.levels[l - 1];
        let mut parts = Vec::new();
        let mut order = Vec::new();
        for e in &ld.levels[l] {
            let prem: Vec<Equation> = e.premises.iter().map(|&p| below[p].equation.clone()).collect();
            parts.push(check_rule(&prem, &e.rule, &e.equation, witnesses)?);
            order.extend(e.premises.iter().copied());
        }
        let sizes: Vec<String> = ld.levels[l].iter().map(|e| e.premises.len().to_string()).collect();
        let level = product_factorizations(&parts);
        if order.iter().enumerate().any(|(i, &p)| i != p) {
            let alpha = Factorization::new(
                acc.claim.clone(),
                order.iter().map(|&p| acc.claim[p].clone()).collect(),
                order.iter().map(|&p| KernelStep::new(KernelRule::Hyp(p), acc.claim[p].clone())).collect(),
                (0..order.len()).collect(),
            );
            acc = paste_factorizations(&acc, &alpha)?;
        }
        acc = paste_factorizations(&acc, &level)?
            .with_note(format!("level {l}: partition [{}]", sizes.join(", ")));
    }
    Ok(acc)
}
