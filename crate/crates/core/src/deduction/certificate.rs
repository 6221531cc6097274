//! Factorization certificates: a hypothesis list and a claim list of arrow
//! equalities, plus a kernel derivation of every claim from the hypotheses.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpcat::{arrows_equal, compose, tuple, FPArrow};

/// A claim that two parallel arrows are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EqConstraint {
    pub left: FPArrow,
    pub right: FPArrow,
}

impl EqConstraint {
    pub fn new(left: FPArrow, right: FPArrow) -> Result<Self> {
        if left.dom() != right.dom() || left.cod() != right.cod() {
            return Err(Error::EndpointMismatch(format!(
                "constraint sides {} -> {} and {} -> {}",
                left.dom(),
                left.cod(),
                right.dom(),
                right.cod()
            )));
        }
        Ok(EqConstraint { left, right })
    }

    pub fn from_pair((left, right): (FPArrow, FPArrow)) -> Self {
        EqConstraint { left, right }
    }

    /// Both sides agree with `other`'s up to the finite-product laws.
    pub fn matches(&self, other: &EqConstraint) -> bool {
        matches!(arrows_equal(&self.left, &other.left), Ok(true))
            && matches!(arrows_equal(&self.right, &other.right), Ok(true))
    }
}

impl fmt::Display for EqConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.left, self.right)
    }
}

/// One kernel inference. Premises refer to earlier steps by index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRule {
    Hyp(usize),
    Refl,
    Sym(usize),
    Trans(usize, usize),
    /// `(a, b) ⊢ (k ∘ a, k ∘ b)`
    LeftCompose { arrow: FPArrow, of: usize },
    /// `(a, b) ⊢ (a ∘ h, b ∘ h)`
    RightCompose { of: usize, arrow: FPArrow },
    TupleCong(Vec<usize>),
}

impl KernelRule {
    fn premises(&self) -> Vec<usize> {
        match self {
            KernelRule::Hyp(_) | KernelRule::Refl => vec![],
            KernelRule::Sym(a) => vec![*a],
            KernelRule::Trans(a, b) => vec![*a, *b],
            KernelRule::LeftCompose { of, .. } | KernelRule::RightCompose { of, .. } => vec![*of],
            KernelRule::TupleCong(cs) => cs.clone(),
        }
    }

    fn remap(&self, map: &dyn Fn(usize) -> usize) -> KernelRule {
        match self {
            KernelRule::Hyp(i) => KernelRule::Hyp(*i),
            KernelRule::Refl => KernelRule::Refl,
            KernelRule::Sym(a) => KernelRule::Sym(map(*a)),
            KernelRule::Trans(a, b) => KernelRule::Trans(map(*a), map(*b)),
            KernelRule::LeftCompose { arrow, of } => KernelRule::LeftCompose {
                arrow: arrow.clone(),
                of: map(*of),
            },
            KernelRule::RightCompose { of, arrow } => KernelRule::RightCompose {
                of: map(*of),
                arrow: arrow.clone(),
            },
            KernelRule::TupleCong(cs) => KernelRule::TupleCong(cs.iter().map(|c| map(*c)).collect()),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            KernelRule::Hyp(_) => "hyp",
            KernelRule::Refl => "refl",
            KernelRule::Sym(_) => "sym",
            KernelRule::Trans(..) => "trans",
            KernelRule::LeftCompose { .. } => "left-compose",
            KernelRule::RightCompose { .. } => "right-compose",
            KernelRule::TupleCong(_) => "tuple-congruence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelStep {
    pub rule: KernelRule,
    pub concl: EqConstraint,
}

impl KernelStep {
    pub fn new(rule: KernelRule, concl: EqConstraint) -> Self {
        KernelStep { rule, concl }
    }
}

/// An entailment certificate `hyp ⊢ claim`.
///
/// The workspace is the concatenation `hyp ++ claim`, with `claimcon` and
/// `hypcon` the inclusions of the hypotheses and of the claims into it.
/// `verif[j]` is the step deriving `claim[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub hyp: Vec<EqConstraint>,
    pub claim: Vec<EqConstraint>,
    pub wksp: Vec<EqConstraint>,
    pub claimcon: Vec<usize>,
    pub hypcon: Vec<usize>,
    pub steps: Vec<KernelStep>,
    pub verif: Vec<usize>,
    pub notes: Vec<String>,
}

impl Factorization {
    /// Assembles a certificate, computing the workspace and its inclusions.
    pub fn new(
        hyp: Vec<EqConstraint>,
        claim: Vec<EqConstraint>,
        steps: Vec<KernelStep>,
        verif: Vec<usize>,
    ) -> Self {
        let wksp: Vec<EqConstraint> = hyp.iter().chain(claim.iter()).cloned().collect();
        let claimcon = (0..hyp.len()).collect();
        let hypcon = (hyp.len()..hyp.len() + claim.len()).collect();
        Factorization {
            hyp,
            claim,
            wksp,
            claimcon,
            hypcon,
            steps,
            verif,
            notes: Vec::new(),
        }
    }

    /// The unit of [`product_factorizations`].
    pub fn empty() -> Self {
        Factorization::new(Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }

    /// `cs ⊢ cs`, each claim citing its hypothesis.
    pub fn identity(cs: Vec<EqConstraint>) -> Self {
        let steps = cs
            .iter()
            .enumerate()
            .map(|(i, c)| KernelStep::new(KernelRule::Hyp(i), c.clone()))
            .collect();
        let verif = (0..cs.len()).collect();
        Factorization::new(cs.clone(), cs, steps, verif)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Result of replaying a certificate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub trace: Vec<String>,
}

fn derive(hyp: &[EqConstraint], steps: &[KernelStep], k: usize) -> std::result::Result<EqConstraint, String> {
    let step = &steps[k];
    if let Some(p) = step.rule.premises().into_iter().find(|&p| p >= k) {
        return Err(format!("step {k} cites later step {p}"));
    }
    let prem = |i: usize| &steps[i].concl;
    let err = |e: Error| e.to_string();
    Ok(match &step.rule {
        KernelRule::Hyp(i) => hyp
            .get(*i)
            .cloned()
            .ok_or_else(|| format!("step {k} cites missing hypothesis {i}"))?,
        KernelRule::Refl => EqConstraint {
            left: step.concl.left.clone(),
            right: step.concl.left.clone(),
        },
        KernelRule::Sym(a) => EqConstraint {
            left: prem(*a).right.clone(),
            right: prem(*a).left.clone(),
        },
        KernelRule::Trans(a, b) => {
            let (a, b) = (prem(*a), prem(*b));
            if !matches!(arrows_equal(&a.right, &b.left), Ok(true)) {
                return Err(format!(
                    "step {k}: middle terms differ ({} vs {})",
                    a.right, b.left
                ));
            }
            EqConstraint {
                left: a.left.clone(),
                right: b.right.clone(),
            }
        }
        KernelRule::LeftCompose { arrow, of } => EqConstraint {
            left: compose(arrow.clone(), prem(*of).left.clone()).map_err(err)?,
            right: compose(arrow.clone(), prem(*of).right.clone()).map_err(err)?,
        },
        KernelRule::RightCompose { of, arrow } => EqConstraint {
            left: compose(prem(*of).left.clone(), arrow.clone()).map_err(err)?,
            right: compose(prem(*of).right.clone(), arrow.clone()).map_err(err)?,
        },
        KernelRule::TupleCong(cs) => {
            let dom = match cs.first() {
                Some(&c) => prem(c).left.dom(),
                None => step.concl.left.dom(),
            };
            EqConstraint {
                left: tuple(dom.clone(), cs.iter().map(|&c| prem(c).left.clone()).collect())
                    .map_err(err)?,
                right: tuple(dom, cs.iter().map(|&c| prem(c).right.clone()).collect())
                    .map_err(err)?,
            }
        }
    })
}

/// Replays every kernel step and checks that each claim is derived.
pub fn verify_with_trace(f: &Factorization) -> VerifyReport {
    let mut trace = Vec::new();
    let mut ok = true;
    for (k, step) in f.steps.iter().enumerate() {
        if let Err(e) = step.concl.left.check().and(step.concl.right.check()) {
            ok = false;
            trace.push(format!("step {k}: ill-formed conclusion: {e}"));
            continue;
        }
        match derive(&f.hyp, &f.steps, k) {
            Ok(derived) if derived.matches(&step.concl) => {
                trace.push(format!("step {k} [{}]: ok", step.rule.name()));
            }
            Ok(derived) => {
                ok = false;
                trace.push(format!(
                    "step {k} [{}]: stated {} but derived {}",
                    step.rule.name(),
                    step.concl,
                    derived
                ));
            }
            Err(e) => {
                ok = false;
                trace.push(e);
            }
        }
    }
    if f.verif.len() != f.claim.len() {
        ok = false;
        trace.push(format!(
            "{} claims but {} derivations",
            f.claim.len(),
            f.verif.len()
        ));
    }
    for (j, (claim, &k)) in f.claim.iter().zip(&f.verif).enumerate() {
        match f.steps.get(k) {
            Some(step) if step.concl.matches(claim) => {}
            Some(_) => {
                ok = false;
                trace.push(format!("claim {j}: step {k} derives a different equality"));
            }
            None => {
                ok = false;
                trace.push(format!("claim {j}: no step {k}"));
            }
        }
    }
    let wksp_ok = f.claimcon.len() == f.hyp.len()
        && f.hypcon.len() == f.claim.len()
        && f.claimcon
            .iter()
            .zip(&f.hyp)
            .chain(f.hypcon.iter().zip(&f.claim))
            .all(|(&w, c)| f.wksp.get(w).is_some_and(|x| x.matches(c)));
    if !wksp_ok {
        ok = false;
        trace.push("workspace inclusions do not match".to_string());
    }
    VerifyReport { ok, trace }
}

pub fn verify_factorization(f: &Factorization) -> bool {
    verify_with_trace(f).ok
}

/// Appends `steps` to `out`, rewriting citations of local hypothesis `i` into
/// references to the existing step `cited[i]`. Returns the index map.
pub(crate) fn splice(out: &mut Vec<KernelStep>, steps: &[KernelStep], cited: &[usize]) -> Vec<usize> {
    let mut map = Vec::with_capacity(steps.len());
    for step in steps {
        match step.rule {
            KernelRule::Hyp(i) => map.push(cited[i]),
            _ => {
                let rule = step.rule.remap(&|p| map[p]);
                map.push(out.len());
                out.push(KernelStep::new(rule, step.concl.clone()));
            }
        }
    }
    map
}

/// Pastes `f1: H ⊢ C` and `f2: C ⊢ C'` into `H ⊢ C'`; citations of `C` in `f2`
/// are replaced by `f1`'s derivations.
pub fn paste_factorizations(f1: &Factorization, f2: &Factorization) -> Result<Factorization> {
    if f1.claim.len() != f2.hyp.len() {
        return Err(Error::InterfaceMismatch(format!(
            "{} claims against {} hypotheses",
            f1.claim.len(),
            f2.hyp.len()
        )));
    }
    if let Some(i) = (0..f2.hyp.len()).find(|&i| !f1.claim[i].matches(&f2.hyp[i])) {
        return Err(Error::InterfaceMismatch(format!(
            "claim {i} does not match hypothesis {i}"
        )));
    }
    let mut steps = f1.steps.clone();
    let cited: Vec<usize> = f1.verif.clone();
    let map = splice(&mut steps, &f2.steps, &cited);
    let verif = f2.verif.iter().map(|&k| map[k]).collect();
    let mut out = Factorization::new(f1.hyp.clone(), f2.claim.clone(), steps, verif);
    out.notes = f1.notes.iter().chain(&f2.notes).cloned().collect();
    Ok(out)
}

/// Juxtaposes certificates: hypotheses, claims and derivations are concatenated.
pub fn product_factorizations(fs: &[Factorization]) -> Factorization {
    let mut hyp = Vec::new();
    let mut claim = Vec::new();
    let mut steps: Vec<KernelStep> = Vec::new();
    let mut verif = Vec::new();
    let mut notes = Vec::new();
    for f in fs {
        let (h0, s0) = (hyp.len(), steps.len());
        hyp.extend(f.hyp.iter().cloned());
        claim.extend(f.claim.iter().cloned());
        steps.extend(f.steps.iter().map(|s| {
            let rule = match &s.rule {
                KernelRule::Hyp(i) => KernelRule::Hyp(i + h0),
                r => r.remap(&|p| p + s0),
            };
            KernelStep::new(rule, s.concl.clone())
        }));
        verif.extend(f.verif.iter().map(|k| k + s0));
        notes.extend(f.notes.iter().cloned());
    }
    let mut out = Factorization::new(hyp, claim, steps, verif);
    out.notes = notes;
    out
}
