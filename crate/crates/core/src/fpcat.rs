//! The free finite-product category over the sketch of a signature.
//!
//! Objects are finite trees of sorts, arrows are built from identities,
//! composition, projections, tupling and the generating operations. Equality
//! of arrows is decided by normalization: an arrow into a product is a tuple,
//! an arrow into a sort is either a projection path into the domain or an
//! operation applied to such arrows.
//!
//! Terms are compiled in three stages, `arr = q ∘ i ∘ d`: `d` reindexes the
//! declared variables onto the occurrences, `i` reassociates the flat product
//! of occurrences into the nested shape of the expression, and `q` applies the
//! operations.

use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::signature::{Operation, Sort};
use crate::termlang::{type_list, var_list, Equation, Expression, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FPObject {
    Leaf(Sort),
    Prod(Vec<FPObject>),
}

impl FPObject {
    pub fn terminal() -> Self {
        FPObject::Prod(Vec::new())
    }

    /// The flat product of a list of sorts.
    pub fn flat(sorts: &[Sort]) -> Self {
        FPObject::Prod(sorts.iter().cloned().map(FPObject::Leaf).collect())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, FPObject::Prod(cs) if cs.is_empty())
    }

    /// 1-based factor of a product.
    pub fn factor(&self, index: usize) -> Option<&FPObject> {
        match self {
            FPObject::Prod(cs) if index >= 1 => cs.get(index - 1),
            _ => None,
        }
    }
}

impl fmt::Display for FPObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FPObject::Leaf(s) => write!(f, "{s}"),
            FPObject::Prod(cs) if cs.is_empty() => f.write_str("1"),
            FPObject::Prod(cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" × ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for FPObject {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FPObject::Leaf(s) => ser.serialize_str(&s.name),
            FPObject::Prod(cs) => {
                let mut seq = ser.serialize_seq(Some(cs.len()))?;
                for c in cs {
                    seq.serialize_element(c)?;
                }
                seq.end()
            }
        }
    }
}

fn op_name<S: Serializer>(op: &Arc<Operation>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&op.name)
}

/// Arrow syntax. Projection indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FPArrow {
    Id(FPObject),
    /// `Comp(g, f)` is `g ∘ f`.
    Comp(Box<FPArrow>, Box<FPArrow>),
    Proj {
        obj: FPObject,
        index: usize,
    },
    Tuple {
        dom: FPObject,
        comps: Vec<FPArrow>,
    },
    #[serde(serialize_with = "op_name")]
    Gen(Arc<Operation>),
    Bang(FPObject),
}

impl FPArrow {
    pub fn dom(&self) -> FPObject {
        match self {
            FPArrow::Id(a) | FPArrow::Bang(a) => a.clone(),
            FPArrow::Comp(_, f) => f.dom(),
            FPArrow::Proj { obj, .. } => obj.clone(),
            FPArrow::Tuple { dom, .. } => dom.clone(),
            FPArrow::Gen(op) => FPObject::flat(&op.inputs),
        }
    }

    pub fn cod(&self) -> FPObject {
        match self {
            FPArrow::Id(a) => a.clone(),
            FPArrow::Bang(_) => FPObject::terminal(),
            FPArrow::Comp(g, _) => g.cod(),
            FPArrow::Proj { obj, index } => obj
                .factor(*index)
                .cloned()
                .expect("projection index checked at construction"),
            FPArrow::Tuple { comps, .. } => FPObject::Prod(comps.iter().map(FPArrow::cod).collect()),
            FPArrow::Gen(op) => FPObject::Leaf(op.output.clone()),
        }
    }

    pub fn proj(obj: &FPObject, index: usize) -> Result<FPArrow> {
        if obj.factor(index).is_none() {
            return Err(Error::EndpointMismatch(format!(
                "no factor {index} in {obj}"
            )));
        }
        Ok(FPArrow::Proj {
            obj: obj.clone(),
            index,
        })
    }

    /// Structural well-formedness: every composite and tuple lines up.
    pub fn check(&self) -> Result<()> {
        match self {
            FPArrow::Id(_) | FPArrow::Gen(_) | FPArrow::Bang(_) => Ok(()),
            FPArrow::Proj { obj, index } => FPArrow::proj(obj, *index).map(|_| ()),
            FPArrow::Comp(g, f) => {
                g.check()?;
                f.check()?;
                if f.cod() != g.dom() {
                    return Err(Error::EndpointMismatch(format!(
                        "cannot compose {} -> {} after {} -> {}",
                        g.dom(),
                        g.cod(),
                        f.dom(),
                        f.cod()
                    )));
                }
                Ok(())
            }
            FPArrow::Tuple { dom, comps } => {
                for c in comps {
                    c.check()?;
                    if c.dom() != *dom {
                        return Err(Error::EndpointMismatch(format!(
                            "tuple component has domain {} instead of {dom}",
                            c.dom()
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            FPArrow::Id(_) | FPArrow::Gen(_) | FPArrow::Bang(_) | FPArrow::Proj { .. } => 1,
            FPArrow::Comp(g, f) => 1 + g.size() + f.size(),
            FPArrow::Tuple { comps, .. } => 1 + comps.iter().map(FPArrow::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for FPArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FPArrow::Id(a) => write!(f, "id[{a}]"),
            FPArrow::Comp(g, h) => write!(f, "({g} ∘ {h})"),
            FPArrow::Proj { index, .. } => write!(f, "p{index}"),
            FPArrow::Tuple { comps, .. } => {
                f.write_str("<")?;
                for (i, c) in comps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(">")
            }
            FPArrow::Gen(op) => f.write_str(&op.name),
            FPArrow::Bang(a) => write!(f, "![{a}]"),
        }
    }
}

pub fn dom(a: &FPArrow) -> FPObject {
    a.dom()
}

pub fn cod(a: &FPArrow) -> FPObject {
    a.cod()
}

/// `g ∘ f`.
pub fn compose(g: FPArrow, f: FPArrow) -> Result<FPArrow> {
    if f.cod() != g.dom() {
        return Err(Error::EndpointMismatch(format!(
            "codomain {} does not match domain {}",
            f.cod(),
            g.dom()
        )));
    }
    Ok(FPArrow::Comp(Box::new(g), Box::new(f)))
}

pub fn tuple(dom: FPObject, comps: Vec<FPArrow>) -> Result<FPArrow> {
    if let Some(c) = comps.iter().find(|c| c.dom() != dom) {
        return Err(Error::EndpointMismatch(format!(
            "tuple component has domain {} instead of {dom}",
            c.dom()
        )));
    }
    Ok(FPArrow::Tuple { dom, comps })
}

/// `f₁ × … × fₙ`, the tuple `<f₁ ∘ p₁, …, fₙ ∘ pₙ>` out of the product of the domains.
pub fn product_of_arrows(fs: Vec<FPArrow>) -> FPArrow {
    let dom = FPObject::Prod(fs.iter().map(FPArrow::dom).collect());
    let comps = fs
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            FPArrow::Comp(
                Box::new(f),
                Box::new(FPArrow::Proj {
                    obj: dom.clone(),
                    index: i + 1,
                }),
            )
        })
        .collect();
    FPArrow::Tuple { dom, comps }
}

/// Body of a normal arrow, relative to a fixed domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalBody {
    Tuple(Vec<NormalBody>),
    /// Successive 1-based projections, outermost first. Always ends at a sort.
    Path(Vec<usize>),
    App(#[serde(serialize_with = "op_name")] Arc<Operation>, Vec<NormalBody>),
}

impl NormalBody {
    fn at(&self, path: &[usize]) -> &NormalBody {
        let mut cur = self;
        for &k in path {
            match cur {
                NormalBody::Tuple(cs) => cur = &cs[k - 1],
                _ => unreachable!("normal bodies are eta-long"),
            }
        }
        cur
    }

    /// `self ∘ f`, where `self` is relative to the codomain of `f`.
    fn after(&self, f: &NormalBody) -> NormalBody {
        match self {
            NormalBody::Path(p) => f.at(p).clone(),
            NormalBody::Tuple(cs) => NormalBody::Tuple(cs.iter().map(|c| c.after(f)).collect()),
            NormalBody::App(op, args) => {
                NormalBody::App(op.clone(), args.iter().map(|a| a.after(f)).collect())
            }
        }
    }

    fn embed(&self, dom: &FPObject) -> FPArrow {
        match self {
            NormalBody::Tuple(cs) => FPArrow::Tuple {
                dom: dom.clone(),
                comps: cs.iter().map(|c| c.embed(dom)).collect(),
            },
            NormalBody::Path(p) => {
                let mut arrow = FPArrow::Id(dom.clone());
                let mut obj = dom.clone();
                for &k in p {
                    let proj = FPArrow::Proj {
                        obj: obj.clone(),
                        index: k,
                    };
                    obj = obj.factor(k).expect("path stays inside the domain").clone();
                    arrow = if matches!(arrow, FPArrow::Id(_)) {
                        proj
                    } else {
                        FPArrow::Comp(Box::new(proj), Box::new(arrow))
                    };
                }
                arrow
            }
            NormalBody::App(op, args) => FPArrow::Comp(
                Box::new(FPArrow::Gen(op.clone())),
                Box::new(FPArrow::Tuple {
                    dom: dom.clone(),
                    comps: args.iter().map(|a| a.embed(dom)).collect(),
                }),
            ),
        }
    }
}

impl fmt::Display for NormalBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, xs: &[NormalBody]) -> fmt::Result {
            f.write_str("<")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(">")
        }
        match self {
            NormalBody::Tuple(cs) => list(f, cs),
            NormalBody::Path(p) if p.is_empty() => f.write_str("id"),
            NormalBody::Path(p) => {
                f.write_str("p")?;
                for (i, k) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write!(f, "{k}")?;
                }
                Ok(())
            }
            NormalBody::App(op, args) if args.is_empty() => f.write_str(&op.name),
            NormalBody::App(op, args) => {
                f.write_str(&op.name)?;
                list(f, args)
            }
        }
    }
}

/// Canonical representative of an arrow under the finite-product laws.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NormalArrow {
    pub dom: FPObject,
    pub cod: FPObject,
    pub body: NormalBody,
}

impl NormalArrow {
    /// Back into arrow syntax.
    pub fn embed(&self) -> FPArrow {
        self.body.embed(&self.dom)
    }
}

impl fmt::Display for NormalArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

/// Eta-long identity on the sub-object reached by `path`.
fn eta(obj: &FPObject, path: Vec<usize>) -> NormalBody {
    match obj {
        FPObject::Leaf(_) => NormalBody::Path(path),
        FPObject::Prod(cs) => NormalBody::Tuple(
            cs.iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut p = path.clone();
                    p.push(i + 1);
                    eta(c, p)
                })
                .collect(),
        ),
    }
}

fn normal_body(a: &FPArrow) -> NormalBody {
    match a {
        FPArrow::Id(obj) => eta(obj, Vec::new()),
        FPArrow::Proj { obj, index } => eta(
            obj.factor(*index).expect("projection index checked at construction"),
            vec![*index],
        ),
        FPArrow::Tuple { comps, .. } => NormalBody::Tuple(comps.iter().map(normal_body).collect()),
        FPArrow::Gen(op) => NormalBody::App(
            op.clone(),
            (1..=op.arity()).map(|k| NormalBody::Path(vec![k])).collect(),
        ),
        FPArrow::Bang(_) => NormalBody::Tuple(Vec::new()),
        FPArrow::Comp(g, f) => normal_body(g).after(&normal_body(f)),
    }
}

pub fn normalize(a: &FPArrow) -> NormalArrow {
    NormalArrow {
        dom: a.dom(),
        cod: a.cod(),
        body: normal_body(a),
    }
}

pub fn arrows_equal(a: &FPArrow, b: &FPArrow) -> Result<bool> {
    if a.dom() != b.dom() || a.cod() != b.cod() {
        return Err(Error::EndpointMismatch(format!(
            "{} -> {} versus {} -> {}",
            a.dom(),
            a.cod(),
            b.dom(),
            b.cod()
        )));
    }
    Ok(normal_body(a) == normal_body(b))
}

/// Domain of `q_of(e)`: a sort for a variable, otherwise the product of the
/// argument domains.
pub fn q_domain(e: &Expression) -> FPObject {
    match e {
        Expression::Var(v) => FPObject::Leaf(v.sort.clone()),
        Expression::App(_, args) => FPObject::Prod(args.iter().map(q_domain).collect()),
    }
}

pub fn q_of(e: &Expression) -> FPArrow {
    match e {
        Expression::Var(v) => FPArrow::Id(FPObject::Leaf(v.sort.clone())),
        Expression::App(op, args) if args.is_empty() => FPArrow::Comp(
            Box::new(FPArrow::Gen(op.clone())),
            Box::new(FPArrow::Id(FPObject::terminal())),
        ),
        Expression::App(op, args) => FPArrow::Comp(
            Box::new(FPArrow::Gen(op.clone())),
            Box::new(product_of_arrows(args.iter().map(q_of).collect())),
        ),
    }
}

/// The reassociation from the flat product of the type list of `e` onto
/// [`q_domain`]`(e)`. For a variable this is the projection out of the
/// one-factor product.
pub fn i_of(e: &Expression) -> FPArrow {
    fn build(e: &Expression, flat: &FPObject, next: &mut usize) -> FPArrow {
        match e {
            Expression::Var(_) => {
                *next += 1;
                FPArrow::Proj {
                    obj: flat.clone(),
                    index: *next,
                }
            }
            Expression::App(_, args) => FPArrow::Tuple {
                dom: flat.clone(),
                comps: args.iter().map(|a| build(a, flat, next)).collect(),
            },
        }
    }
    let flat = FPObject::flat(&type_list(e));
    build(e, &flat, &mut 0)
}

/// Reindexing from the declared variables of `t` onto the occurrences of its
/// expression: the `i`-th component projects onto the declared position of the
/// `i`-th occurrence.
pub fn d_of(t: &Term) -> FPArrow {
    let dom = FPObject::flat(&t.vars().sorts());
    let comps = var_list(t.expr())
        .iter()
        .map(|v| FPArrow::Proj {
            obj: dom.clone(),
            index: t.vars().position(v).expect("term invariant: occurrences are declared"),
        })
        .collect();
    FPArrow::Tuple { dom, comps }
}

/// The three compilation stages of a term and their composite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermArrows {
    pub d: FPArrow,
    pub i: FPArrow,
    pub q: FPArrow,
    pub arr: FPArrow,
}

pub fn compile_term(t: &Term) -> TermArrows {
    let d = d_of(t);
    let i = i_of(t.expr());
    let q = q_of(t.expr());
    let arr = FPArrow::Comp(
        Box::new(q.clone()),
        Box::new(FPArrow::Comp(Box::new(i.clone()), Box::new(d.clone()))),
    );
    TermArrows { d, i, q, arr }
}

pub fn arr_of_term(t: &Term) -> FPArrow {
    compile_term(t).arr
}

/// The parallel pair of arrows of an equation, from the product of its
/// declared variables' sorts to its type.
pub fn diagram_of_equation(eq: &Equation) -> (FPArrow, FPArrow) {
    (arr_of_term(&eq.left_term()), arr_of_term(&eq.right_term()))
}
