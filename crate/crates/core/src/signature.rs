//! Sorts, operations, variables and the inhabitedness analysis.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::termlang::Expression;

/// A sort of the signature. Ordered by its declaration index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sort {
    pub index: usize,
    pub name: String,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Operation {
    pub name: String,
    pub inputs: Vec<Sort>,
    pub output: Sort,
}

impl Operation {
    pub fn is_constant(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.name)?;
        for s in &self.inputs {
            write!(f, " {s}")?;
        }
        write!(f, " -> {}", self.output)
    }
}

pub fn is_constant(op: &Operation) -> bool {
    op.is_constant()
}

/// The `subscript`-th variable of `sort`. The derived order compares the sort
/// (by declaration index) first and the subscript second.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Variable {
    pub sort: Sort,
    pub subscript: u32,
}

impl Variable {
    pub fn new(sort: Sort, subscript: u32) -> Self {
        assert!(subscript > 0, "variable subscripts start at 1");
        Variable { sort, subscript }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}_{}", self.sort.index + 1, self.subscript)
    }
}

/// Unvalidated operation declaration, as read from the DSL.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub inputs: Vec<String>,
    pub output: String,
}

impl OpDecl {
    pub fn new(name: &str, inputs: &[&str], output: &str) -> Self {
        OpDecl {
            name: name.to_string(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            output: output.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    sorts: Vec<Sort>,
    operations: Vec<Arc<Operation>>,
}

impl Signature {
    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn operations(&self) -> &[Arc<Operation>] {
        &self.operations
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.name == name)
    }

    pub fn operation(&self, name: &str) -> Option<&Arc<Operation>> {
        self.operations.iter().find(|o| o.name == name)
    }

    /// Declaration index of an operation, matched structurally.
    pub fn operation_index(&self, op: &Operation) -> Option<usize> {
        self.operations.iter().position(|o| **o == *op)
    }

    pub fn contains_operation(&self, op: &Operation) -> bool {
        self.operation_index(op).is_some()
    }
}

pub fn validate_signature(sorts: &[&str], ops: &[OpDecl]) -> Result<Signature> {
    let mut seen = HashSet::new();
    let mut sort_list = Vec::with_capacity(sorts.len());
    for (index, name) in sorts.iter().enumerate() {
        if !seen.insert(*name) {
            return Err(Error::DuplicateSort(name.to_string()));
        }
        sort_list.push(Sort {
            index,
            name: name.to_string(),
        });
    }
    let lookup = |op: &str, name: &str| {
        sort_list
            .iter()
            .find(|s| s.name == name)
            .cloned()
            .ok_or_else(|| Error::UnknownSortInArity {
                op: op.to_string(),
                sort: name.to_string(),
            })
    };
    let mut op_names = HashSet::new();
    let mut operations = Vec::with_capacity(ops.len());
    for decl in ops {
        if !op_names.insert(decl.name.as_str()) {
            return Err(Error::DuplicateOperation(decl.name.clone()));
        }
        let inputs = decl
            .inputs
            .iter()
            .map(|s| lookup(&decl.name, s))
            .collect::<Result<Vec<_>>>()?;
        let output = lookup(&decl.name, &decl.output)?;
        operations.push(Arc::new(Operation {
            name: decl.name.clone(),
            inputs,
            output,
        }));
    }
    Ok(Signature {
        sorts: sort_list,
        operations,
    })
}

/// Inhabited sorts with their canonical closed witnesses.
///
/// Computed as a least fixpoint in rounds: in each round every operation whose
/// inputs were all inhabited before the round yields a witness for its output
/// sort, unless that sort already has one. Witnesses therefore have minimal
/// depth, and ties go to the operation declared first.
pub fn inhabited_sorts(sig: &Signature) -> BTreeMap<Sort, Expression> {
    let mut witnesses: BTreeMap<Sort, Expression> = BTreeMap::new();
    loop {
        let mut fresh: BTreeMap<Sort, Expression> = BTreeMap::new();
        for op in &sig.operations {
            if witnesses.contains_key(&op.output) || fresh.contains_key(&op.output) {
                continue;
            }
            if op.inputs.iter().all(|s| witnesses.contains_key(s)) {
                let args = op.inputs.iter().map(|s| witnesses[s].clone()).collect();
                fresh.insert(op.output.clone(), Expression::App(op.clone(), args));
            }
        }
        if fresh.is_empty() {
            return witnesses;
        }
        witnesses.extend(fresh);
    }
}
