//! Finite models: a carrier size per sort and a lookup table per operation.
//! Used as an independent soundness oracle for equations and deductions.

use std::sync::Arc;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpcat::{FPArrow, FPObject};
use crate::signature::{Operation, Signature, Variable};
use crate::termlang::{Equation, Expression};

/// Upper bound on the number of models a single enumeration may visit.
pub const MODEL_LIMIT: f64 = 1e7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Atom(usize),
    Tuple(Vec<Value>),
}

impl Value {
    fn atom(&self) -> usize {
        match self {
            Value::Atom(a) => *a,
            Value::Tuple(_) => panic!("expected an atom, found a tuple"),
        }
    }

    fn parts(&self) -> &[Value] {
        match self {
            Value::Tuple(vs) => vs,
            Value::Atom(_) => panic!("expected a tuple, found an atom"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteModel {
    sig: Arc<Signature>,
    /// Carrier size per sort, by declaration index.
    pub sizes: Vec<usize>,
    /// Row-major table per operation, by declaration order.
    pub tables: Vec<Vec<usize>>,
}

impl PartialEq for FiniteModel {
    fn eq(&self, other: &Self) -> bool {
        self.sizes == other.sizes && self.tables == other.tables
    }
}

fn table_len(sizes: &[usize], op: &Operation) -> usize {
    op.inputs.iter().map(|s| sizes[s.index]).product()
}

impl FiniteModel {
    pub fn new(sig: Arc<Signature>, sizes: Vec<usize>, tables: Vec<Vec<usize>>) -> Result<Self> {
        let bad = |m: String| Err(Error::SideConditionViolated(m));
        if sizes.len() != sig.sorts().len() || tables.len() != sig.operations().len() {
            return bad("model shape does not match the signature".into());
        }
        for (op, t) in sig.operations().iter().zip(&tables) {
            if t.len() != table_len(&sizes, op) {
                return bad(format!("table of {} has the wrong length", op.name));
            }
            if t.iter().any(|&v| v >= sizes[op.output.index]) {
                return bad(format!("table of {} leaves its carrier", op.name));
            }
        }
        Ok(FiniteModel { sig, sizes, tables })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn op_index(&self, op: &Arc<Operation>) -> usize {
        self.sig
            .operations()
            .iter()
            .position(|o| Arc::ptr_eq(o, op))
            .or_else(|| self.sig.operation_index(op))
            .unwrap_or_else(|| panic!("operation {} is not in the model's signature", op.name))
    }

    pub fn apply(&self, op: &Arc<Operation>, args: &[usize]) -> usize {
        let k = self.op_index(op);
        let mut idx = 0;
        for (a, s) in args.iter().zip(&op.inputs) {
            idx = idx * self.sizes[s.index] + a;
        }
        self.tables[k][idx]
    }
}

impl Serialize for FiniteModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Sizes<'a>(&'a FiniteModel);
        impl Serialize for Sizes<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.sizes.len()))?;
                for (sort, n) in self.0.sig.sorts().iter().zip(&self.0.sizes) {
                    m.serialize_entry(&sort.name, n)?;
                }
                m.end()
            }
        }
        struct Tables<'a>(&'a FiniteModel);
        impl Serialize for Tables<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.tables.len()))?;
                for (op, t) in self.0.sig.operations().iter().zip(&self.0.tables) {
                    m.serialize_entry(&op.name, t)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("sizes", &Sizes(self))?;
        m.serialize_entry("tables", &Tables(self))?;
        m.end()
    }
}

impl std::fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (sort, n) in self.sig.sorts().iter().zip(&self.sizes) {
            writeln!(f, "|{}| = {n}", sort.name)?;
        }
        for (op, t) in self.sig.operations().iter().zip(&self.tables) {
            for (row, v) in t.iter().enumerate() {
                let mut args = Vec::with_capacity(op.inputs.len());
                let mut rest = row;
                for s in op.inputs.iter().rev() {
                    let n = self.sizes[s.index];
                    args.push(rest % n);
                    rest /= n;
                }
                args.reverse();
                let args: Vec<String> = args.iter().map(usize::to_string).collect();
                writeln!(f, "{}({}) = {v}", op.name, args.join(", "))?;
            }
        }
        Ok(())
    }
}

/// Number of models with every carrier of size at most `max_size`.
pub fn model_count(sig: &Signature, max_size: usize) -> f64 {
    let mut sizes = vec![0usize; sig.sorts().len()];
    let mut total = 0.0;
    loop {
        total += count_for(sig, &sizes);
        if !bump(&mut sizes, |_| max_size + 1) {
            return total;
        }
    }
}

fn count_for(sig: &Signature, sizes: &[usize]) -> f64 {
    sig.operations()
        .iter()
        .map(|op| (sizes[op.output.index] as f64).powf(table_len(sizes, op) as f64))
        .product()
}

/// Odometer increment; `false` once it wraps around.
fn bump(digits: &mut [usize], base: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < base(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

pub struct ModelIter {
    sig: Arc<Signature>,
    size_choices: Vec<Vec<usize>>,
    size_pos: Vec<usize>,
    current: Option<(Vec<usize>, Vec<Vec<usize>>)>,
    fresh: bool,
    done: bool,
}

impl ModelIter {
    fn new(sig: Arc<Signature>, size_choices: Vec<Vec<usize>>) -> Self {
        let done = size_choices.iter().any(Vec::is_empty);
        let size_pos = vec![0; size_choices.len()];
        ModelIter {
            sig,
            size_choices,
            size_pos,
            current: None,
            fresh: true,
            done,
        }
    }

    fn sizes(&self) -> Vec<usize> {
        self.size_pos
            .iter()
            .zip(&self.size_choices)
            .map(|(&p, c)| c[p])
            .collect()
    }

    fn start_tables(&self, sizes: &[usize]) -> Option<Vec<Vec<usize>>> {
        let mut tables = Vec::new();
        for op in self.sig.operations() {
            let n = table_len(sizes, op);
            if n > 0 && sizes[op.output.index] == 0 {
                return None;
            }
            tables.push(vec![0; n]);
        }
        Some(tables)
    }

    fn bump_tables(&self, sizes: &[usize], tables: &mut [Vec<usize>]) -> bool {
        for (op, t) in self.sig.operations().iter().zip(tables.iter_mut()).rev() {
            let base = sizes[op.output.index];
            if bump(t, |_| base) {
                return true;
            }
        }
        false
    }
}

impl Iterator for ModelIter {
    type Item = FiniteModel;

    fn next(&mut self) -> Option<FiniteModel> {
        loop {
            if self.done {
                return None;
            }
            let advanced = match self.current.as_mut() {
                Some((sizes, tables)) if !self.fresh => {
                    let sizes = sizes.clone();
                    let mut t = std::mem::take(tables);
                    let ok = self.bump_tables(&sizes, &mut t);
                    self.current = Some((sizes, t));
                    ok
                }
                _ => false,
            };
            if !advanced {
                if !self.fresh {
                    let choices = &self.size_choices;
                    if !bump(&mut self.size_pos, |i| choices[i].len()) {
                        self.done = true;
                        return None;
                    }
                }
                self.fresh = false;
                let sizes = self.sizes();
                match self.start_tables(&sizes) {
                    Some(t) => self.current = Some((sizes, t)),
                    None => {
                        self.current = None;
                        continue;
                    }
                }
            }
            let (sizes, tables) = self.current.clone().expect("current model");
            return Some(FiniteModel {
                sig: self.sig.clone(),
                sizes,
                tables,
            });
        }
    }
}

/// All models whose carriers have between 0 and `max_size` elements.
pub fn enumerate_models(sig: &Signature, max_size: usize) -> Result<ModelIter> {
    let count = model_count(sig, max_size);
    if count > MODEL_LIMIT {
        return Err(Error::CarrierTooLarge(format!(
            "{count:.3e} models up to size {max_size} exceed the limit of {MODEL_LIMIT:e}"
        )));
    }
    let choices = vec![(0..=max_size).collect(); sig.sorts().len()];
    Ok(ModelIter::new(Arc::new(sig.clone()), choices))
}

/// All models with exactly the given carrier sizes.
pub fn enumerate_models_with_sizes(sig: &Signature, sizes: &[usize]) -> Result<ModelIter> {
    if sizes.len() != sig.sorts().len() {
        return Err(Error::SideConditionViolated(
            "one carrier size per sort is required".into(),
        ));
    }
    let count = count_for(sig, sizes);
    if count > MODEL_LIMIT {
        return Err(Error::CarrierTooLarge(format!(
            "{count:.3e} models exceed the limit of {MODEL_LIMIT:e}"
        )));
    }
    let choices = sizes.iter().map(|&n| vec![n]).collect();
    Ok(ModelIter::new(Arc::new(sig.clone()), choices))
}

/// Every element of the interpretation of `obj`.
pub fn points(m: &FiniteModel, obj: &FPObject) -> Vec<Value> {
    match obj {
        FPObject::Leaf(s) => (0..m.sizes[s.index]).map(Value::Atom).collect(),
        FPObject::Prod(fs) => {
            let mut acc = vec![Vec::new()];
            for f in fs {
                let ps = points(m, f);
                acc = acc
                    .into_iter()
                    .flat_map(|prefix| {
                        ps.iter().map(move |p| {
                            let mut v = prefix.clone();
                            v.push(p.clone());
                            v
                        })
                    })
                    .collect();
            }
            acc.into_iter().map(Value::Tuple).collect()
        }
    }
}

/// Interprets an arrow as a function on points of its domain.
pub fn eval_arrow(m: &FiniteModel, a: &FPArrow, point: &Value) -> Value {
    match a {
        FPArrow::Id(_) => point.clone(),
        FPArrow::Comp(g, f) => eval_arrow(m, g, &eval_arrow(m, f, point)),
        FPArrow::Proj { index, .. } => point.parts()[index - 1].clone(),
        FPArrow::Tuple { comps, .. } => {
            Value::Tuple(comps.iter().map(|c| eval_arrow(m, c, point)).collect())
        }
        FPArrow::Gen(op) => {
            let args: Vec<usize> = point.parts().iter().map(Value::atom).collect();
            Value::Atom(m.apply(op, &args))
        }
        FPArrow::Bang(_) => Value::Tuple(Vec::new()),
    }
}

pub fn eval_expression(m: &FiniteModel, e: &Expression, env: &dyn Fn(&Variable) -> usize) -> usize {
    match e {
        Expression::Var(v) => env(v),
        Expression::App(op, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval_expression(m, a, env)).collect();
            m.apply(op, &vals)
        }
    }
}

/// Calls `f` on every assignment of the equation's variables; stops early
/// when `f` returns `false`.
fn for_each_assignment(m: &FiniteModel, eq: &Equation, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let bases: Vec<usize> = eq.vars().iter().map(|v| m.sizes[v.sort.index]).collect();
    if bases.contains(&0) {
        return true;
    }
    let mut digits = vec![0; bases.len()];
    loop {
        if !f(&digits) {
            return false;
        }
        if !bump(&mut digits, |i| bases[i]) {
            return true;
        }
    }
}

fn falsifying(m: &FiniteModel, eq: &Equation) -> Option<Vec<usize>> {
    let mut witness = None;
    for_each_assignment(m, eq, |vals| {
        let env = |v: &Variable| vals[eq.vars().position(v).expect("declared variable") - 1];
        if eval_expression(m, eq.left(), &env) != eval_expression(m, eq.right(), &env) {
            witness = Some(vals.to_vec());
            false
        } else {
            true
        }
    });
    witness
}

/// Whether both sides agree under every assignment of the declared variables.
pub fn satisfies(m: &FiniteModel, eq: &Equation) -> bool {
    falsifying(m, eq).is_none()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub model: FiniteModel,
    /// Values of the conclusion's declared variables, in order.
    pub assignment: Vec<usize>,
}

/// Searches models up to `max_size` for one satisfying every hypothesis but
/// not the conclusion.
pub fn find_counterexample(
    sig: &Signature,
    max_size: usize,
    hypotheses: &[Equation],
    conclusion: &Equation,
) -> Result<Option<Counterexample>> {
    for m in enumerate_models(sig, max_size)? {
        if !hypotheses.iter().all(|h| satisfies(&m, h)) {
            continue;
        }
        if let Some(assignment) = falsifying(&m, conclusion) {
            return Ok(Some(Counterexample { model: m, assignment }));
        }
    }
    Ok(None)
}
