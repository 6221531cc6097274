//! The `.msl` specification language.
//!
//! ```text
//! sort s t
//! op e : -> s
//! op m : s s -> s
//! term t1 [x:s, y:s] : m(x, y)
//! eq unit [x:s] : m(x, e) = x
//! proof P from unit {
//!   a = hyp unit;
//!   b = sym a;
//!   c = trans b a
//! }
//! ```
//!
//! Statements end at a newline unless a bracket or brace is open; `#` starts
//! a comment. Variable names are global to a file: a name keeps one sort,
//! and within each sort subscripts follow the order of first appearance.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error as ThisError;

use crate::deduction::{DeductionTree, RuleInstance, Witnesses};
use crate::error::{Error, Loc, Result};
use crate::signature::{validate_signature, OpDecl, Operation, Signature, Sort, Variable};
use crate::termlang::{Equation, Expression, Term, VarSet};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(char),
    Arrow,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, Loc)>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    for (i, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            let loc = Loc { line: i + 1, col: j + 1 };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                j += 1;
            } else if is_ident_start(c) {
                let start = j;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                out.push((Tok::Ident(chars[start..j].iter().collect()), loc));
            } else if c == '-' && chars.get(j + 1) == Some(&'>') {
                out.push((Tok::Arrow, loc));
                j += 2;
            } else if ":,;=()[]{}".contains(c) {
                match c {
                    '(' | '[' | '{' => depth += 1,
                    ')' | ']' | '}' => depth = depth.saturating_sub(1),
                    _ => {}
                }
                out.push((Tok::Sym(c), loc));
                j += 1;
            } else {
                return Err(Error::SyntaxError {
                    loc,
                    msg: format!("unexpected character `{c}`"),
                });
            }
        }
        if depth == 0 {
            out.push((
                Tok::Newline,
                Loc {
                    line: i + 1,
                    col: chars.len() + 1,
                },
            ));
        }
    }
    let end = Loc {
        line: text.lines().count() + 1,
        col: 1,
    };
    out.push((Tok::Eof, end));
    Ok(out)
}

#[derive(Clone, Debug)]
struct ExprAst {
    name: String,
    loc: Loc,
    args: Option<Vec<ExprAst>>,
}

/// A named term with its bracket in source order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermDecl {
    pub name: String,
    pub binders: Vec<String>,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqDecl {
    pub name: String,
    pub binders: Vec<String>,
    pub equation: Equation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermRef {
    Named(String),
    Inline { binders: Vec<String>, term: Term },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    Hyp(String),
    Refl(TermRef),
    Sym(String),
    Trans(String, String),
    Conc(String, Variable),
    Abs(String, Variable),
    Subst(String, Variable, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofStep {
    pub name: String,
    pub rule: StepRule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofDecl {
    pub name: String,
    pub from: Vec<String>,
    pub steps: Vec<ProofStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Sorts(Vec<String>),
    Op(OpDecl),
    Term(TermDecl),
    Equation(EqDecl),
    Proof(ProofDecl),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub signature: Signature,
    /// Declarations in source order.
    pub decls: Vec<Decl>,
    vars: Vec<(String, Variable)>,
}

/// A proof step that failed to elaborate into a deduction.
#[derive(Clone, Debug, ThisError, PartialEq, Eq)]
#[error("step `{step}`: {error}")]
pub struct StepError {
    pub step: String,
    pub error: Error,
}

struct Parser {
    toks: Vec<(Tok, Loc)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Loc) {
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(Error::SyntaxError {
            loc: self.loc(),
            msg: format!("expected {what}, found {}", self.peek()),
        })
    }

    fn ident(&mut self, what: &str) -> Result<(String, Loc)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let loc = self.bump().1;
                Ok((s, loc))
            }
            _ => self.fail(what),
        }
    }

    fn sym(&mut self, c: char) -> Result<Loc> {
        if *self.peek() == Tok::Sym(c) {
            Ok(self.bump().1)
        } else {
            self.fail(&format!("`{c}`"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn end_of_statement(&mut self) -> Result<()> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => self.fail("end of line"),
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let (name, loc) = self.ident("an expression")?;
        if !self.eat('(') {
            return Ok(ExprAst { name, loc, args: None });
        }
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                args.push(self.expr()?);
                if self.eat(')') {
                    break;
                }
                self.sym(',')?;
            }
        }
        Ok(ExprAst {
            name,
            loc,
            args: Some(args),
        })
    }

    /// `[x:s, y:t]`
    fn binders(&mut self) -> Result<Vec<(String, Loc, String, Loc)>> {
        self.sym('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            let (v, vloc) = self.ident("a variable name")?;
            self.sym(':')?;
            let (s, sloc) = self.ident("a sort name")?;
            out.push((v, vloc, s, sloc));
            if self.eat(']') {
                return Ok(out);
            }
            self.sym(',')?;
        }
    }
}

struct Elab {
    sig: Option<Signature>,
    sort_decls: Vec<(String, Loc)>,
    op_decls: Vec<(OpDecl, Loc)>,
    vars: Vec<(String, Variable)>,
    decls: Vec<Decl>,
}

fn unresolved(loc: Loc, msg: impl Into<String>) -> Error {
    Error::NameResolutionError { loc, msg: msg.into() }
}

fn ill_typed(loc: Loc, e: Error) -> Error {
    Error::IllTyped {
        loc,
        msg: e.to_string(),
    }
}

impl Elab {
    /// Validates the signature on first use; later sort and op lines are rejected.
    fn signature(&mut self, loc: Loc) -> Result<&Signature> {
        if self.sig.is_none() {
            let names: Vec<&str> = self.sort_decls.iter().map(|(s, _)| s.as_str()).collect();
            let ops: Vec<OpDecl> = self.op_decls.iter().map(|(o, _)| o.clone()).collect();
            let sig = validate_signature(&names, &ops).map_err(|e| match &e {
                Error::DuplicateSort(s) => {
                    let at = self.sort_decls.iter().filter(|(n, _)| n == s).nth(1).map(|p| p.1);
                    unresolved(at.unwrap_or(loc), e.to_string())
                }
                Error::DuplicateOperation(o) | Error::UnknownSortInArity { op: o, .. } => {
                    let at = self.op_decls.iter().rev().find(|(d, _)| &d.name == o).map(|p| p.1);
                    unresolved(at.unwrap_or(loc), e.to_string())
                }
                _ => unresolved(loc, e.to_string()),
            })?;
            self.sig = Some(sig);
        }
        Ok(self.sig.as_ref().expect("signature"))
    }

    fn sort(&mut self, name: &str, loc: Loc) -> Result<Sort> {
        let sig = self.signature(loc)?;
        sig.sort(name)
            .cloned()
            .ok_or_else(|| unresolved(loc, format!("unknown sort `{name}`")))
    }

    fn op(&self, name: &str) -> Option<&Arc<Operation>> {
        self.sig.as_ref().and_then(|s| s.operation(name))
    }

    fn variable(&mut self, name: &str, sort: Sort, loc: Loc) -> Result<Variable> {
        if self.op(name).is_some() {
            return Err(unresolved(loc, format!("`{name}` is an operation, not a variable")));
        }
        if let Some((_, v)) = self.vars.iter().find(|(n, _)| n == name) {
            if v.sort != sort {
                return Err(unresolved(
                    loc,
                    format!("variable `{name}` already has sort `{}`", v.sort.name),
                ));
            }
            return Ok(v.clone());
        }
        let next = self.vars.iter().filter(|(_, v)| v.sort == sort).count() as u32 + 1;
        let v = Variable::new(sort, next);
        self.vars.push((name.to_string(), v.clone()));
        Ok(v)
    }

    fn known_variable(&self, name: &str, loc: Loc) -> Result<Variable> {
        self.vars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| unresolved(loc, format!("unknown variable `{name}`")))
    }

    fn bracket(
        &mut self,
        binders: Vec<(String, Loc, String, Loc)>,
    ) -> Result<(Vec<String>, BTreeMap<String, Variable>)> {
        let mut names = Vec::new();
        let mut scope = BTreeMap::new();
        for (v, vloc, s, sloc) in binders {
            if scope.contains_key(&v) {
                return Err(unresolved(vloc, format!("variable `{v}` is bound twice")));
            }
            let sort = self.sort(&s, sloc)?;
            let var = self.variable(&v, sort, vloc)?;
            names.push(v.clone());
            scope.insert(v, var);
        }
        Ok((names, scope))
    }

    fn expr(&self, ast: &ExprAst, scope: &BTreeMap<String, Variable>) -> Result<Expression> {
        if let Some(v) = scope.get(&ast.name) {
            if ast.args.is_some() {
                return Err(unresolved(ast.loc, format!("variable `{}` applied to arguments", ast.name)));
            }
            return Ok(Expression::var(v.clone()));
        }
        let Some(op) = self.op(&ast.name) else {
            return Err(unresolved(ast.loc, format!("`{}` is neither a bound variable nor an operation", ast.name)));
        };
        let args = ast
            .args
            .iter()
            .flatten()
            .map(|a| self.expr(a, scope))
            .collect::<Result<Vec<_>>>()?;
        Expression::app(op, args).map_err(|e| ill_typed(ast.loc, e))
    }

    fn term(&mut self, p: &mut Parser) -> Result<(Vec<String>, Term)> {
        let at = p.loc();
        let binders = p.binders()?;
        p.sym(':')?;
        let body = p.expr()?;
        self.signature(at)?;
        let (names, scope) = self.bracket(binders)?;
        let e = self.expr(&body, &scope)?;
        let vars: VarSet = scope.values().cloned().collect();
        let sort = e.sort().clone();
        let term = Term::new(e, vars, sort).map_err(|e| ill_typed(body.loc, e))?;
        Ok((names, term))
    }

    fn has_term(&self, name: &str) -> Option<&TermDecl> {
        self.decls.iter().find_map(|d| match d {
            Decl::Term(t) if t.name == name => Some(t),
            _ => None,
        })
    }

    fn has_equation(&self, name: &str) -> bool {
        self.decls.iter().any(|d| matches!(d, Decl::Equation(e) if e.name == name))
    }

    fn has_proof(&self, name: &str) -> bool {
        self.decls.iter().any(|d| matches!(d, Decl::Proof(q) if q.name == name))
    }

    fn statement(&mut self, p: &mut Parser) -> Result<()> {
        let (kw, kw_loc) = p.ident("a declaration keyword")?;
        match kw.as_str() {
            "sort" => {
                if self.sig.is_some() {
                    return Err(unresolved(kw_loc, "sorts must be declared before any term or equation"));
                }
                let mut names = Vec::new();
                while let Tok::Ident(_) = p.peek() {
                    let (s, loc) = p.ident("a sort name")?;
                    self.sort_decls.push((s.clone(), loc));
                    names.push(s);
                }
                if names.is_empty() {
                    return p.fail("a sort name");
                }
                self.decls.push(Decl::Sorts(names));
            }
            "op" => {
                if self.sig.is_some() {
                    return Err(unresolved(kw_loc, "operations must be declared before any term or equation"));
                }
                let (name, loc) = p.ident("an operation name")?;
                p.sym(':')?;
                let mut inputs = Vec::new();
                while let Tok::Ident(_) = p.peek() {
                    inputs.push(p.ident("a sort name")?.0);
                }
                if *p.peek() != Tok::Arrow {
                    return p.fail("a sort name or `->`");
                }
                p.bump();
                let (output, _) = p.ident("the result sort")?;
                let d = OpDecl {
                    name,
                    inputs,
                    output,
                };
                self.op_decls.push((d.clone(), loc));
                self.decls.push(Decl::Op(d));
            }
            "term" => {
                let (name, loc) = p.ident("a term name")?;
                let (binders, term) = self.term(p)?;
                if self.has_term(&name).is_some() {
                    return Err(unresolved(loc, format!("term `{name}` is declared twice")));
                }
                self.decls.push(Decl::Term(TermDecl { name, binders, term }));
            }
            "eq" => {
                let (name, loc) = p.ident("an equation name")?;
                let binders = p.binders()?;
                p.sym(':')?;
                let l = p.expr()?;
                p.sym('=')?;
                let r = p.expr()?;
                self.signature(loc)?;
                if self.has_equation(&name) {
                    return Err(unresolved(loc, format!("equation `{name}` is declared twice")));
                }
                let (names, scope) = self.bracket(binders)?;
                let le = self.expr(&l, &scope)?;
                let re = self.expr(&r, &scope)?;
                let vars: VarSet = scope.values().cloned().collect();
                let equation = Equation::new(le, re, vars).map_err(|e| ill_typed(l.loc, e))?;
                self.decls.push(Decl::Equation(EqDecl {
                    name,
                    binders: names,
                    equation,
                }));
            }
            "proof" => {
                let proof = self.proof(p)?;
                self.decls.push(Decl::Proof(proof));
            }
            _ => {
                return Err(Error::SyntaxError {
                    loc: kw_loc,
                    msg: format!("unknown declaration `{kw}`"),
                })
            }
        }
        p.end_of_statement()
    }

    fn proof(&mut self, p: &mut Parser) -> Result<ProofDecl> {
        let (name, loc) = p.ident("a proof name")?;
        self.signature(loc)?;
        if self.has_proof(&name) {
            return Err(unresolved(loc, format!("proof `{name}` is declared twice")));
        }
        let (kw, kw_loc) = p.ident("`from`")?;
        if kw != "from" {
            return Err(Error::SyntaxError {
                loc: kw_loc,
                msg: format!("expected `from`, found `{kw}`"),
            });
        }
        let mut from = Vec::new();
        while let Tok::Ident(_) = p.peek() {
            let (e, eloc) = p.ident("an equation name")?;
            if !self.has_equation(&e) {
                return Err(unresolved(eloc, format!("unknown equation `{e}`")));
            }
            from.push(e);
        }
        p.sym('{')?;
        let mut steps: Vec<ProofStep> = Vec::new();
        loop {
            if p.eat('}') {
                break;
            }
            let (step, sloc) = p.ident("a step name or `}`")?;
            if steps.iter().any(|s| s.name == step) {
                return Err(unresolved(sloc, format!("step `{step}` is defined twice")));
            }
            p.sym('=')?;
            let rule = self.rule(p, &steps, &from)?;
            steps.push(ProofStep { name: step, rule });
            if !p.eat(';') {
                p.sym('}')?;
                break;
            }
        }
        if steps.is_empty() {
            return Err(Error::SyntaxError {
                loc,
                msg: format!("proof `{name}` has no steps"),
            });
        }
        Ok(ProofDecl { name, from, steps })
    }

    fn rule(&mut self, p: &mut Parser, steps: &[ProofStep], from: &[String]) -> Result<StepRule> {
        let step_ref = |p: &mut Parser| -> Result<String> {
            let (s, loc) = p.ident("a step name")?;
            if steps.iter().any(|st| st.name == s) {
                Ok(s)
            } else {
                Err(unresolved(loc, format!("unknown step `{s}`")))
            }
        };
        let (kw, kw_loc) = p.ident("a rule name")?;
        Ok(match kw.as_str() {
            "hyp" => {
                let (e, loc) = p.ident("an equation name")?;
                if !from.contains(&e) {
                    return Err(unresolved(loc, format!("`{e}` is not among the proof's hypotheses")));
                }
                StepRule::Hyp(e)
            }
            "refl" => {
                if *p.peek() == Tok::Sym('[') {
                    let (binders, term) = self.term(p)?;
                    StepRule::Refl(TermRef::Inline { binders, term })
                } else {
                    let (t, loc) = p.ident("a term name or `[`")?;
                    if self.has_term(&t).is_none() {
                        return Err(unresolved(loc, format!("unknown term `{t}`")));
                    }
                    StepRule::Refl(TermRef::Named(t))
                }
            }
            "sym" => StepRule::Sym(step_ref(p)?),
            "trans" => {
                let a = step_ref(p)?;
                StepRule::Trans(a, step_ref(p)?)
            }
            "conc" => {
                let s = step_ref(p)?;
                let (x, loc) = p.ident("a variable name")?;
                StepRule::Conc(s, self.known_variable(&x, loc)?)
            }
            "abs" => {
                let s = step_ref(p)?;
                let (x, loc) = p.ident("a variable name")?;
                p.sym(':')?;
                let (sort, sloc) = p.ident("a sort name")?;
                let sort = self.sort(&sort, sloc)?;
                StepRule::Abs(s, self.variable(&x, sort, loc)?)
            }
            "subst" => {
                let s = step_ref(p)?;
                let (x, loc) = p.ident("a variable name")?;
                let x = self.known_variable(&x, loc)?;
                StepRule::Subst(s, x, step_ref(p)?)
            }
            _ => {
                return Err(Error::SyntaxError {
                    loc: kw_loc,
                    msg: format!("unknown rule `{kw}`"),
                })
            }
        })
    }
}

/// Parses and elaborates a specification.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut el = Elab {
        sig: None,
        sort_decls: Vec::new(),
        op_decls: Vec::new(),
        vars: Vec::new(),
        decls: Vec::new(),
    };
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Newline => {
                p.bump();
            }
            _ => el.statement(&mut p)?,
        }
    }
    let end = p.loc();
    el.signature(end)?;
    Ok(SpecFile {
        signature: el.sig.expect("signature"),
        decls: el.decls,
        vars: el.vars,
    })
}

impl SpecFile {
    pub fn terms(&self) -> impl Iterator<Item = &TermDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Term(t) => Some(t),
            _ => None,
        })
    }

    pub fn equations(&self) -> impl Iterator<Item = &EqDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Equation(e) => Some(e),
            _ => None,
        })
    }

    pub fn proofs(&self) -> impl Iterator<Item = &ProofDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Proof(p) => Some(p),
            _ => None,
        })
    }

    pub fn term(&self, name: &str) -> Option<&TermDecl> {
        self.terms().find(|t| t.name == name)
    }

    pub fn equation(&self, name: &str) -> Option<&EqDecl> {
        self.equations().find(|e| e.name == name)
    }

    pub fn proof(&self, name: &str) -> Option<&ProofDecl> {
        self.proofs().find(|p| p.name == name)
    }

    /// The variable named `name`, if any bracket binds it.
    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// The source name of a variable, or its canonical `x{i}_{j}` form.
    pub fn var_name(&self, v: &Variable) -> String {
        self.vars
            .iter()
            .find(|(_, w)| w == v)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| v.to_string())
    }

    pub fn show_expr(&self, e: &Expression) -> String {
        e.display_with(&|v: &Variable| self.var_name(v)).to_string()
    }

    /// `[x:s, y:t]`, in canonical variable order.
    pub fn show_vars(&self, vars: &VarSet) -> String {
        let parts: Vec<String> = vars
            .iter()
            .map(|v| format!("{}:{}", self.var_name(v), v.sort.name))
            .collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn show_equation(&self, eq: &Equation) -> String {
        format!(
            "{} : {} = {}",
            self.show_vars(eq.vars()),
            self.show_expr(eq.left()),
            self.show_expr(eq.right())
        )
    }

    /// The hypotheses a proof is stated from, in order.
    pub fn hypotheses(&self, proof: &ProofDecl) -> Vec<Equation> {
        proof
            .from
            .iter()
            .map(|n| self.equation(n).expect("resolved at parse time").equation.clone())
            .collect()
    }

    /// Elaborates a proof into a deduction tree whose root is its last step.
    /// Steps cited more than once are duplicated.
    pub fn proof_tree(&self, proof: &ProofDecl, witnesses: &Witnesses) -> Result<DeductionTree, StepError> {
        let hyps = self.hypotheses(proof);
        let mut done: BTreeMap<&str, DeductionTree> = BTreeMap::new();
        let mut last = None;
        for step in &proof.steps {
            let get = |n: &String| done[n.as_str()].clone();
            let (rule, premises) = match &step.rule {
                StepRule::Hyp(e) => {
                    let i = proof.from.iter().position(|f| f == e).expect("resolved at parse time");
                    (RuleInstance::Hypothesis(i), vec![])
                }
                StepRule::Refl(TermRef::Named(t)) => {
                    let t = self.term(t).expect("resolved at parse time");
                    (RuleInstance::Reflexivity(t.term.clone()), vec![])
                }
                StepRule::Refl(TermRef::Inline { term, .. }) => (RuleInstance::Reflexivity(term.clone()), vec![]),
                StepRule::Sym(a) => (RuleInstance::Symmetry, vec![get(a)]),
                StepRule::Trans(a, b) => (RuleInstance::Transitivity, vec![get(a), get(b)]),
                StepRule::Conc(a, x) => (RuleInstance::Concretion(x.clone()), vec![get(a)]),
                StepRule::Abs(a, x) => (RuleInstance::Abstraction(x.clone()), vec![get(a)]),
                StepRule::Subst(a, x, b) => (RuleInstance::Substitutivity(x.clone()), vec![get(a), get(b)]),
            };
            let tree = DeductionTree::derive(rule, premises, &hyps, witnesses).map_err(|error| StepError {
                step: step.name.clone(),
                error,
            })?;
            done.insert(&step.name, tree.clone());
            last = Some(tree);
        }
        Ok(last.expect("proofs have at least one step"))
    }

    fn show_bracket(&self, names: &[String], vars: &VarSet) -> String {
        let parts: Vec<String> = names
            .iter()
            .map(|n| {
                let v = vars.iter().find(|v| self.var_name(v) == *n).expect("bound variable");
                format!("{n}:{}", v.sort.name)
            })
            .collect();
        format!("[{}]", parts.join(", "))
    }

    /// Canonical source text; parsing it yields an equal `SpecFile`.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for d in &self.decls {
            match d {
                Decl::Sorts(names) => writeln!(out, "sort {}", names.join(" ")),
                Decl::Op(o) => {
                    let mut ins = o.inputs.join(" ");
                    if !ins.is_empty() {
                        ins.push(' ');
                    }
                    writeln!(out, "op {} : {ins}-> {}", o.name, o.output)
                }
                Decl::Term(t) => writeln!(
                    out,
                    "term {} {} : {}",
                    t.name,
                    self.show_bracket(&t.binders, t.term.vars()),
                    self.show_expr(t.term.expr())
                ),
                Decl::Equation(e) => writeln!(
                    out,
                    "eq {} {} : {} = {}",
                    e.name,
                    self.show_bracket(&e.binders, e.equation.vars()),
                    self.show_expr(e.equation.left()),
                    self.show_expr(e.equation.right())
                ),
                Decl::Proof(p) => {
                    let mut head = format!("proof {} from", p.name);
                    for f in &p.from {
                        head.push(' ');
                        head.push_str(f);
                    }
                    let steps: Vec<String> = p
                        .steps
                        .iter()
                        .map(|s| format!("  {} = {}", s.name, self.show_rule(&s.rule)))
                        .collect();
                    writeln!(out, "{head} {{\n{}\n}}", steps.join(";\n"))
                }
            }
            .expect("writing to a string");
        }
        out
    }

    fn show_rule(&self, r: &StepRule) -> String {
        match r {
            StepRule::Hyp(e) => format!("hyp {e}"),
            StepRule::Refl(TermRef::Named(t)) => format!("refl {t}"),
            StepRule::Refl(TermRef::Inline { binders, term }) => format!(
                "refl {} : {}",
                self.show_bracket(binders, term.vars()),
                self.show_expr(term.expr())
            ),
            StepRule::Sym(a) => format!("sym {a}"),
            StepRule::Trans(a, b) => format!("trans {a} {b}"),
            StepRule::Conc(a, x) => format!("conc {a} {}", self.var_name(x)),
            StepRule::Abs(a, x) => format!("abs {a} {} : {}", self.var_name(x), x.sort.name),
            StepRule::Subst(a, x, b) => format!("subst {a} {} {b}", self.var_name(x)),
        }
    }
}
