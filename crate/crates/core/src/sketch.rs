//! The finite-product sketch of a signature: sort nodes, one list node per
//! distinct input-type list, operation and projection arrows, and one discrete
//! cone per list node.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::signature::{Operation, Signature, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SketchNode {
    Sort(Sort),
    List(Vec<Sort>),
}

impl fmt::Display for SketchNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SketchNode::Sort(s) => write!(f, "{s}"),
            SketchNode::List(w) => {
                f.write_str("(")?;
                for (i, s) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SketchArrow {
    Op {
        op: Arc<Operation>,
        source: SketchNode,
        target: SketchNode,
    },
    /// `index` is 1-based.
    Proj {
        source: SketchNode,
        index: usize,
        target: SketchNode,
    },
}

impl SketchArrow {
    pub fn source(&self) -> &SketchNode {
        match self {
            SketchArrow::Op { source, .. } | SketchArrow::Proj { source, .. } => source,
        }
    }

    pub fn target(&self) -> &SketchNode {
        match self {
            SketchArrow::Op { target, .. } | SketchArrow::Proj { target, .. } => target,
        }
    }
}

impl fmt::Display for SketchArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SketchArrow::Op { op, source, target } => {
                write!(f, "{} : {source} -> {target}", op.name)
            }
            SketchArrow::Proj {
                source,
                index,
                target,
            } => write!(f, "proj[{source},{index}] : {source} -> {target}"),
        }
    }
}

/// A discrete cone; `legs` are indices into [`Sketch::arrows`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cone {
    pub vertex: SketchNode,
    pub legs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sketch {
    pub nodes: Vec<SketchNode>,
    pub arrows: Vec<SketchArrow>,
    pub cones: Vec<Cone>,
}

impl Sketch {
    pub fn list_nodes(&self) -> impl Iterator<Item = &SketchNode> {
        self.nodes.iter().filter(|n| matches!(n, SketchNode::List(_)))
    }

    pub fn op_arrow(&self, name: &str) -> Option<&SketchArrow> {
        self.arrows
            .iter()
            .find(|a| matches!(a, SketchArrow::Op { op, .. } if op.name == name))
    }
}

/// Distinct input-type lists, in order of first occurrence among the
/// operations, each mapped to its list node.
pub fn shared_arity_dedup(sig: &Signature) -> Vec<(Vec<Sort>, SketchNode)> {
    let mut out: Vec<(Vec<Sort>, SketchNode)> = Vec::new();
    for op in sig.operations() {
        if !out.iter().any(|(w, _)| *w == op.inputs) {
            out.push((op.inputs.clone(), SketchNode::List(op.inputs.clone())));
        }
    }
    out
}

pub fn sketch_of_signature(sig: &Signature) -> Sketch {
    let lists = shared_arity_dedup(sig);
    let mut nodes: Vec<SketchNode> = sig.sorts().iter().cloned().map(SketchNode::Sort).collect();
    nodes.extend(lists.iter().map(|(_, n)| n.clone()));

    let mut arrows: Vec<SketchArrow> = sig
        .operations()
        .iter()
        .map(|op| SketchArrow::Op {
            op: op.clone(),
            source: SketchNode::List(op.inputs.clone()),
            target: SketchNode::Sort(op.output.clone()),
        })
        .collect();
    let mut cones = Vec::with_capacity(lists.len());
    for (w, node) in &lists {
        let mut legs = Vec::with_capacity(w.len());
        for (i, s) in w.iter().enumerate() {
            legs.push(arrows.len());
            arrows.push(SketchArrow::Proj {
                source: node.clone(),
                index: i + 1,
                target: SketchNode::Sort(s.clone()),
            });
        }
        cones.push(Cone {
            vertex: node.clone(),
            legs,
        });
    }
    Sketch {
        nodes,
        arrows,
        cones,
    }
}

/// Index of every list node, keyed by its sort list.
pub fn list_node_index(sketch: &Sketch) -> BTreeMap<Vec<Sort>, usize> {
    sketch
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n {
            SketchNode::List(w) => Some((w.clone(), i)),
            SketchNode::Sort(_) => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{validate_signature, OpDecl};

    fn worked_sig() -> Signature {
        validate_signature(
            &["s1", "s2", "s3", "s4", "s5"],
            &[
                OpDecl::new("g", &["s1", "s1"], "s2"),
                OpDecl::new("f", &["s1", "s2", "s2"], "s5"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn worked_signature_sketch() {
        let sk = sketch_of_signature(&worked_sig());
        let names: Vec<String> = sk.nodes.iter().map(|n| n.to_string()).collect();
        assert_eq!(names, ["s1", "s2", "s3", "s4", "s5", "(s1,s1)", "(s1,s2,s2)"]);
        let ops = sk
            .arrows
            .iter()
            .filter(|a| matches!(a, SketchArrow::Op { .. }))
            .count();
        assert_eq!(ops, 2);
        assert_eq!(sk.arrows.len() - ops, 5);
        assert_eq!(sk.cones.len(), 2);
        let f = sk.op_arrow("f").unwrap();
        assert_eq!(f.source().to_string(), "(s1,s2,s2)");
        assert_eq!(f.target().to_string(), "s5");
    }

    #[test]
    fn constant_gives_empty_cone() {
        let sig = validate_signature(&["s"], &[OpDecl::new("c", &[], "s")]).unwrap();
        let sk = sketch_of_signature(&sig);
        assert_eq!(sk.nodes.len(), 2);
        assert_eq!(sk.nodes[1], SketchNode::List(vec![]));
        assert_eq!(sk.cones.len(), 1);
        assert!(sk.cones[0].legs.is_empty());
        assert_eq!(sk.op_arrow("c").unwrap().to_string(), "c : () -> s");
    }

    #[test]
    fn empty_signature() {
        let sig = validate_signature(&[], &[]).unwrap();
        let sk = sketch_of_signature(&sig);
        assert!(sk.nodes.is_empty() && sk.arrows.is_empty() && sk.cones.is_empty());
    }

    #[test]
    fn arity_sharing() {
        let sig = validate_signature(
            &["s"],
            &[OpDecl::new("m", &["s", "s"], "s"), OpDecl::new("n", &["s", "s"], "s")],
        )
        .unwrap();
        assert_eq!(shared_arity_dedup(&sig).len(), 1);
        let sig = validate_signature(
            &["a", "b", "c"],
            &[OpDecl::new("f", &["a", "b"], "c"), OpDecl::new("g", &["b", "a"], "c")],
        )
        .unwrap();
        assert_eq!(shared_arity_dedup(&sig).len(), 2);
        assert_eq!(shared_arity_dedup(&worked_sig()).len(), 2);
    }

    #[test]
    fn singleton_list_is_its_own_node() {
        let sig = validate_signature(&["g"], &[OpDecl::new("u", &["g"], "g")]).unwrap();
        let sk = sketch_of_signature(&sig);
        assert_eq!(sk.nodes.len(), 2);
        assert_eq!(sk.cones[0].legs.len(), 1);
    }

    #[test]
    fn cone_legs_partition_projections() {
        let sk = sketch_of_signature(&worked_sig());
        let mut legs: Vec<usize> = sk.cones.iter().flat_map(|c| c.legs.clone()).collect();
        legs.sort();
        let projs: Vec<usize> = sk
            .arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, SketchArrow::Proj { .. }))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(legs, projs);
        for a in &sk.arrows {
            assert!(sk.nodes.contains(a.source()) && sk.nodes.contains(a.target()));
        }
        assert_eq!(list_node_index(&sk).len(), 2);
    }
}
