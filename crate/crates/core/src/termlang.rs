//! Expressions, terms and equations together with their variable and type lists.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signature::{Operation, Signature, Sort, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Expression {
    Var(Variable),
    App(Arc<Operation>, Vec<Expression>),
}

impl Expression {
    pub fn var(v: Variable) -> Self {
        Expression::Var(v)
    }

    /// Checked application: argument count and argument sorts must match.
    pub fn app(op: &Arc<Operation>, args: Vec<Expression>) -> Result<Self> {
        if args.len() != op.arity() {
            return Err(Error::ArityMismatch {
                op: op.name.clone(),
                expected: op.arity(),
                found: args.len(),
            });
        }
        for (i, (arg, want)) in args.iter().zip(&op.inputs).enumerate() {
            if arg.sort() != want {
                return Err(Error::SortMismatch(i + 1));
            }
        }
        Ok(Expression::App(op.clone(), args))
    }

    pub fn constant(op: &Arc<Operation>) -> Result<Self> {
        Self::app(op, Vec::new())
    }

    /// Type of an expression built through the checked constructors.
    pub fn sort(&self) -> &Sort {
        match self {
            Expression::Var(v) => &v.sort,
            Expression::App(op, _) => &op.output,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Expression::Var(_) => false,
            Expression::App(_, args) => args.iter().all(Expression::is_closed),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expression::Var(_) => 0,
            Expression::App(_, args) => 1 + args.iter().map(Expression::depth).max().unwrap_or(0),
        }
    }

    pub fn contains_var(&self, x: &Variable) -> bool {
        match self {
            Expression::Var(v) => v == x,
            Expression::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn display_with<'a>(
        &'a self,
        name: &'a dyn Fn(&Variable) -> String,
    ) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, name }
    }
}

struct ExprDisplay<'a> {
    expr: &'a Expression,
    name: &'a dyn Fn(&Variable) -> String,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expression::Var(v) => f.write_str(&(self.name)(v)),
            Expression::App(op, args) => {
                f.write_str(&op.name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        ExprDisplay { expr: a, name: self.name }.fmt(f)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&|v: &Variable| v.to_string()).fmt(f)
    }
}

/// Recomputes the type of `e`, checking every application against `sig`.
pub fn type_of_expression(sig: &Signature, e: &Expression) -> Result<Sort> {
    match e {
        Expression::Var(v) => Ok(v.sort.clone()),
        Expression::App(op, args) => {
            if !sig.contains_operation(op) {
                return Err(Error::UnknownOperation(op.name.clone()));
            }
            if args.len() != op.arity() {
                return Err(Error::ArityMismatch {
                    op: op.name.clone(),
                    expected: op.arity(),
                    found: args.len(),
                });
            }
            for (i, (arg, want)) in args.iter().zip(&op.inputs).enumerate() {
                if type_of_expression(sig, arg)? != *want {
                    return Err(Error::SortMismatch(i + 1));
                }
            }
            Ok(op.output.clone())
        }
    }
}

pub fn var_list(e: &Expression) -> Vec<Variable> {
    fn go(e: &Expression, out: &mut Vec<Variable>) {
        match e {
            Expression::Var(v) => out.push(v.clone()),
            Expression::App(_, args) => args.iter().for_each(|a| go(a, out)),
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}

pub fn var_set(e: &Expression) -> VarSet {
    var_list(e).into_iter().collect()
}

pub fn type_list(e: &Expression) -> Vec<Sort> {
    var_list(e).into_iter().map(|v| v.sort).collect()
}

pub fn type_set(e: &Expression) -> BTreeSet<Sort> {
    type_list(e).into_iter().collect()
}

/// A set of variables kept as a sorted, duplicate-free list so that positions
/// are meaningful.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct VarSet(Vec<Variable>);

impl VarSet {
    pub fn new() -> Self {
        VarSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Variable> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Variable] {
        &self.0
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.0.binary_search(v).is_ok()
    }

    /// 1-based position of `v`.
    pub fn position(&self, v: &Variable) -> Option<usize> {
        self.0.binary_search(v).ok().map(|i| i + 1)
    }

    pub fn insert(&mut self, v: Variable) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, v);
                true
            }
        }
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    pub fn without(&self, v: &Variable) -> VarSet {
        VarSet(self.0.iter().filter(|w| *w != v).cloned().collect())
    }

    pub fn with(&self, v: Variable) -> VarSet {
        let mut out = self.clone();
        out.insert(v);
        out
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Sorts of the members, in order.
    pub fn sorts(&self) -> Vec<Sort> {
        self.0.iter().map(|v| v.sort.clone()).collect()
    }
}

impl FromIterator<Variable> for VarSet {
    fn from_iter<I: IntoIterator<Item = Variable>>(iter: I) -> Self {
        let mut v: Vec<Variable> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        VarSet(v)
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = &'a Variable;
    type IntoIter = std::slice::Iter<'a, Variable>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

fn missing(e: &Expression, vars: &VarSet) -> BTreeSet<String> {
    var_set(e)
        .iter()
        .filter(|v| !vars.contains(v))
        .map(|v| v.to_string())
        .collect()
}

/// An expression with an explicit variable set (which may contain variables
/// not occurring in the expression) and its type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Term {
    expr: Expression,
    vars: VarSet,
    sort: Sort,
}

impl Term {
    pub fn new(expr: Expression, vars: VarSet, sort: Sort) -> Result<Self> {
        let miss = missing(&expr, &vars);
        if !miss.is_empty() {
            return Err(Error::MissingVariables(miss));
        }
        if *expr.sort() != sort {
            return Err(Error::TypeDisagrees);
        }
        Ok(Term { expr, vars, sort })
    }

    pub fn expr(&self) -> &Expression {
        &self.expr
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.expr, self.vars, self.sort)
    }
}

pub fn make_term(e: Expression, vars: VarSet, sort: Sort) -> Result<Term> {
    Term::new(e, vars, sort)
}

/// Sorts of the declared variables, in canonical order.
pub fn input_types(t: &Term) -> Vec<Sort> {
    t.vars.sorts()
}

pub fn most_concrete_term(e: &Expression) -> Term {
    Term {
        vars: var_set(e),
        sort: e.sort().clone(),
        expr: e.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Equation {
    left: Expression,
    right: Expression,
    vars: VarSet,
}

impl Equation {
    pub fn new(left: Expression, right: Expression, vars: VarSet) -> Result<Self> {
        if left.sort() != right.sort() {
            return Err(Error::SortMismatch(0));
        }
        let mut miss = missing(&left, &vars);
        miss.extend(missing(&right, &vars));
        if !miss.is_empty() {
            return Err(Error::MissingVariables(miss));
        }
        Ok(Equation { left, right, vars })
    }

    pub fn left(&self) -> &Expression {
        &self.left
    }

    pub fn right(&self) -> &Expression {
        &self.right
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn sort(&self) -> &Sort {
        self.left.sort()
    }

    pub fn left_term(&self) -> Term {
        Term {
            expr: self.left.clone(),
            vars: self.vars.clone(),
            sort: self.sort().clone(),
        }
    }

    pub fn right_term(&self) -> Term {
        Term {
            expr: self.right.clone(),
            vars: self.vars.clone(),
            sort: self.sort().clone(),
        }
    }

    pub fn swapped(&self) -> Equation {
        Equation {
            left: self.right.clone(),
            right: self.left.clone(),
            vars: self.vars.clone(),
        }
    }

    /// Same sides over a different variable set.
    pub fn with_vars(&self, vars: VarSet) -> Result<Equation> {
        Equation::new(self.left.clone(), self.right.clone(), vars)
    }

    pub fn occurring_vars(&self) -> VarSet {
        var_set(&self.left).union(&var_set(&self.right))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =_{} {}", self.left, self.vars, self.right)
    }
}

pub fn make_equation(l: Expression, r: Expression, vars: VarSet) -> Result<Equation> {
    Equation::new(l, r, vars)
}

pub fn most_concrete_equation(l: &Expression, r: &Expression) -> Result<Equation> {
    let vars = var_set(l).union(&var_set(r));
    Equation::new(l.clone(), r.clone(), vars)
}
