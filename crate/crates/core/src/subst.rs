//! Substitution of a term for a variable, by structural recursion on the
//! expression and directly as a composite with the substitution arrow.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpcat::{arr_of_term, FPArrow, FPObject};
use crate::signature::{Sort, Variable};
use crate::termlang::{Expression, Term, VarSet};

/// `target[variable ← replacement]`, validated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubstInstance {
    target: Term,
    variable: Variable,
    replacement: Term,
}

impl SubstInstance {
    pub fn new(target: Term, variable: Variable, replacement: Term) -> Result<Self> {
        if !target.vars().contains(&variable) {
            return Err(Error::SideConditionViolated(format!(
                "{variable} is not declared in the target term"
            )));
        }
        if *replacement.sort() != variable.sort {
            return Err(Error::SortMismatch(0));
        }
        Ok(SubstInstance {
            target,
            variable,
            replacement,
        })
    }

    pub fn target(&self) -> &Term {
        &self.target
    }

    pub fn variable(&self) -> &Variable {
        &self.variable
    }

    pub fn replacement(&self) -> &Term {
        &self.replacement
    }

    /// `(V ∖ {x}) ∪ W`.
    pub fn result_vars(&self) -> VarSet {
        self.target
            .vars()
            .without(&self.variable)
            .union(self.replacement.vars())
    }

    /// `V ∪ W`.
    pub fn joint_vars(&self) -> VarSet {
        self.target.vars().union(self.replacement.vars())
    }
}

pub fn subst_expr(e: &Expression, x: &Variable, u: &Expression) -> Result<Expression> {
    if *u.sort() != x.sort {
        return Err(Error::SortMismatch(0));
    }
    fn go(e: &Expression, x: &Variable, u: &Expression) -> Expression {
        match e {
            Expression::Var(v) if v == x => u.clone(),
            Expression::Var(_) => e.clone(),
            Expression::App(op, args) => {
                Expression::App(op.clone(), args.iter().map(|a| go(a, x, u)).collect())
            }
        }
    }
    Ok(go(e, x, u))
}

pub fn subst_term_recursive(inst: &SubstInstance) -> Result<Term> {
    let expr = subst_expr(inst.target.expr(), &inst.variable, inst.replacement.expr())?;
    Term::new(expr, inst.result_vars(), inst.target.sort().clone())
}

/// The substitution arrow `∏((V∖{x})∪W) → ∏(V∪W)`: projections on every
/// coordinate except the one of `x`, which carries the arrow of the
/// replacement over `(V∖{x})∪W`.
pub fn a_map(inst: &SubstInstance) -> Result<FPArrow> {
    let source = inst.result_vars();
    let joint = inst.joint_vars();
    let dom = FPObject::flat(&source.sorts());
    let replacement = Term::new(
        inst.replacement.expr().clone(),
        source.clone(),
        inst.replacement.sort().clone(),
    )?;
    let comps = joint
        .iter()
        .map(|v| {
            if *v == inst.variable {
                arr_of_term(&replacement)
            } else {
                let index = source.position(v).expect("every other variable survives");
                FPArrow::Proj {
                    obj: dom.clone(),
                    index,
                }
            }
        })
        .collect();
    Ok(FPArrow::Tuple { dom, comps })
}

/// `arr(e, V∪W, σ) ∘ A`.
pub fn arr_subst_direct(inst: &SubstInstance) -> Result<FPArrow> {
    let widened = Term::new(
        inst.target.expr().clone(),
        inst.joint_vars(),
        inst.target.sort().clone(),
    )?;
    Ok(FPArrow::Comp(
        Box::new(arr_of_term(&widened)),
        Box::new(a_map(inst)?),
    ))
}

/// `∏source → ∏target`. Shared variables are projected; a target variable
/// missing from `source` is filled with the closed witness of its sort.
pub fn retyping_map(
    source: &VarSet,
    target: &VarSet,
    witnesses: &BTreeMap<Sort, Expression>,
) -> Result<FPArrow> {
    let dom = FPObject::flat(&source.sorts());
    let comps = target
        .iter()
        .map(|v| match source.position(v) {
            Some(index) => Ok(FPArrow::Proj {
                obj: dom.clone(),
                index,
            }),
            None => {
                let w = witnesses
                    .get(&v.sort)
                    .ok_or_else(|| Error::UninhabitedFill(v.sort.name.clone()))?;
                Ok(arr_of_term(&Term::new(w.clone(), source.clone(), v.sort.clone())?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FPArrow::Tuple { dom, comps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpcat::{arrows_equal, normalize};
    use crate::signature::{inhabited_sorts, validate_signature, OpDecl, Signature};

    struct Fx {
        sig: Signature,
    }

    impl Fx {
        /// The signature of the worked substitution example.
        fn new() -> Self {
            let sig = validate_signature(
                &["s1", "s2", "s3", "s4", "s5"],
                &[
                    OpDecl::new("f", &["s1", "s4", "s3", "s1", "s5", "s2"], "s5"),
                    OpDecl::new("g", &["s1", "s3"], "s5"),
                    OpDecl::new("h", &["s2", "s3"], "s3"),
                    OpDecl::new("k", &[], "s3"),
                ],
            )
            .unwrap();
            Fx { sig }
        }
        fn s(&self, i: usize) -> Sort {
            self.sig.sorts()[i - 1].clone()
        }
        fn x(&self, i: usize, j: u32) -> Variable {
            Variable::new(self.s(i), j)
        }
        fn v(&self, i: usize, j: u32) -> Expression {
            Expression::var(self.x(i, j))
        }
        fn app(&self, op: &str, args: Vec<Expression>) -> Expression {
            Expression::app(self.sig.operation(op).unwrap(), args).unwrap()
        }
        fn vars(&self, xs: &[(usize, u32)]) -> VarSet {
            xs.iter().map(|&(i, j)| self.x(i, j)).collect()
        }
        /// e = f(x¹₁, x⁴₃, x³₂, x¹₁, g(x¹₂, x³₂), x²₁), the reading whose
        /// displayed reindexing tuple uses x¹₂.
        fn e(&self) -> Expression {
            let g = self.app("g", vec![self.v(1, 2), self.v(3, 2)]);
            self.app(
                "f",
                vec![self.v(1, 1), self.v(4, 3), self.v(3, 2), self.v(1, 1), g, self.v(2, 1)],
            )
        }
        fn u(&self) -> Expression {
            self.app("h", vec![self.v(2, 1), self.v(3, 2)])
        }
        fn big_v(&self) -> VarSet {
            self.vars(&[(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1), (3, 2), (4, 3)])
        }
        fn big_w(&self) -> VarSet {
            self.vars(&[(1, 1), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
        }
        fn inst(&self) -> SubstInstance {
            SubstInstance::new(
                Term::new(self.e(), self.big_v(), self.s(5)).unwrap(),
                self.x(3, 2),
                Term::new(self.u(), self.big_w(), self.s(3)).unwrap(),
            )
            .unwrap()
        }
    }

    #[test]
    fn substitution_in_expressions() {
        let fx = Fx::new();
        let out = subst_expr(&fx.e(), &fx.x(3, 2), &fx.u()).unwrap();
        assert_eq!(
            out.to_string(),
            "f(x1_1, x4_3, h(x2_1, x3_2), x1_1, g(x1_2, h(x2_1, x3_2)), x2_1)"
        );
        assert_eq!(subst_expr(&fx.v(3, 2), &fx.x(3, 2), &fx.u()).unwrap(), fx.u());
        assert_eq!(
            subst_expr(&fx.e(), &fx.x(1, 1), &fx.u()),
            Err(Error::SortMismatch(0))
        );
    }

    #[test]
    fn recursive_term_substitution() {
        let fx = Fx::new();
        let t = subst_term_recursive(&fx.inst()).unwrap();
        assert_eq!(
            t.vars(),
            &fx.vars(&[
                (1, 1),
                (1, 2),
                (1, 3),
                (2, 1),
                (2, 2),
                (2, 3),
                (3, 1),
                (3, 2),
                (3, 3),
                (4, 3)
            ])
        );
        // variable absent from the expression: expression unchanged
        let inst = SubstInstance::new(
            Term::new(fx.e(), fx.big_v(), fx.s(5)).unwrap(),
            fx.x(3, 1),
            Term::new(fx.u(), fx.big_w(), fx.s(3)).unwrap(),
        )
        .unwrap();
        let t = subst_term_recursive(&inst).unwrap();
        assert_eq!(t.expr(), &fx.e());
        assert_eq!(t.vars(), &fx.big_v().without(&fx.x(3, 1)).union(&fx.big_w()));
    }

    #[test]
    fn substitution_arrow_of_worked_example() {
        let fx = Fx::new();
        let a = a_map(&fx.inst()).unwrap();
        let n = normalize(&a);
        assert_eq!(n.to_string(), "<p1,p2,p3,p4,p5,p6,p7,h<p4,p8>,p9,p10>");
        assert!(arrows_equal(
            &arr_of_term(&subst_term_recursive(&fx.inst()).unwrap()),
            &arr_subst_direct(&fx.inst()).unwrap()
        )
        .unwrap());
    }

    #[test]
    fn square_when_variable_in_replacement_vars() {
        let fx = Fx::new();
        let inst = fx.inst();
        assert!(inst.replacement().vars().contains(inst.variable()));
        let a = a_map(&inst).unwrap();
        assert_eq!(a.dom(), a.cod());
        // x ∉ W: the codomain has one more factor
        let w = fx.vars(&[(2, 1), (3, 3)]);
        let u = fx.app("h", vec![fx.v(2, 1), fx.v(3, 3)]);
        let inst = SubstInstance::new(
            Term::new(fx.e(), fx.big_v(), fx.s(5)).unwrap(),
            fx.x(3, 2),
            Term::new(u, w, fx.s(3)).unwrap(),
        )
        .unwrap();
        let a = a_map(&inst).unwrap();
        let width = |o: FPObject| match o {
            FPObject::Prod(cs) => cs.len(),
            FPObject::Leaf(_) => 1,
        };
        assert_eq!(width(a.cod()), width(a.dom()) + 1);
    }

    #[test]
    fn base_case_and_self_substitution() {
        let fx = Fx::new();
        let v = fx.vars(&[(3, 2), (4, 1)]);
        let inst = SubstInstance::new(
            Term::new(fx.v(3, 2), v, fx.s(3)).unwrap(),
            fx.x(3, 2),
            Term::new(fx.u(), fx.big_w(), fx.s(3)).unwrap(),
        )
        .unwrap();
        let direct = arr_subst_direct(&inst).unwrap();
        let expected = arr_of_term(&Term::new(fx.u(), inst.result_vars(), fx.s(3)).unwrap());
        assert!(arrows_equal(&direct, &expected).unwrap());

        let t = Term::new(fx.e(), fx.big_v(), fx.s(5)).unwrap();
        let inst = SubstInstance::new(
            t.clone(),
            fx.x(3, 2),
            Term::new(fx.v(3, 2), fx.vars(&[(3, 2)]), fx.s(3)).unwrap(),
        )
        .unwrap();
        let a = a_map(&inst).unwrap();
        assert_eq!(normalize(&a), normalize(&FPArrow::Id(a.dom())));
        assert!(arrows_equal(&arr_subst_direct(&inst).unwrap(), &arr_of_term(&t)).unwrap());
    }

    #[test]
    fn constant_replacement() {
        let fx = Fx::new();
        let inst = SubstInstance::new(
            Term::new(fx.e(), fx.big_v(), fx.s(5)).unwrap(),
            fx.x(3, 2),
            Term::new(fx.app("k", vec![]), VarSet::new(), fx.s(3)).unwrap(),
        )
        .unwrap();
        let n = normalize(&a_map(&inst).unwrap());
        assert_eq!(n.to_string(), "<p1,p2,p3,p4,p5,p6,k,p7>");
        assert!(arrows_equal(
            &arr_of_term(&subst_term_recursive(&inst).unwrap()),
            &arr_subst_direct(&inst).unwrap()
        )
        .unwrap());
    }

    #[test]
    fn retyping() {
        let fx = Fx::new();
        let wit = inhabited_sorts(&fx.sig);
        let big = fx.vars(&[(2, 1), (3, 2), (3, 3)]);
        let small = fx.vars(&[(2, 1), (3, 2)]);
        let n = normalize(&retyping_map(&big, &small, &wit).unwrap());
        assert_eq!(n.to_string(), "<p1,p2>");
        let n = normalize(&retyping_map(&small, &big, &wit).unwrap());
        assert_eq!(n.to_string(), "<p1,p2,k>");
        assert_eq!(
            retyping_map(&small, &fx.vars(&[(1, 1)]), &wit),
            Err(Error::UninhabitedFill("s1".into()))
        );
        // arr(t1) = arr(t2) ∘ retyping(V1, V2)
        let t1 = Term::new(fx.u(), big.clone(), fx.s(3)).unwrap();
        let t2 = Term::new(fx.u(), small.clone(), fx.s(3)).unwrap();
        let rt = retyping_map(&big, &small, &wit).unwrap();
        let comp = crate::fpcat::compose(arr_of_term(&t2), rt).unwrap();
        assert!(arrows_equal(&arr_of_term(&t1), &comp).unwrap());
    }

    #[test]
    fn rejects_bad_instances() {
        let fx = Fx::new();
        let t = Term::new(fx.e(), fx.big_v(), fx.s(5)).unwrap();
        let u = Term::new(fx.u(), fx.big_w(), fx.s(3)).unwrap();
        assert!(matches!(
            SubstInstance::new(t.clone(), fx.x(5, 1), u.clone()),
            Err(Error::SideConditionViolated(_))
        ));
        assert_eq!(
            SubstInstance::new(t, fx.x(1, 1), u),
            Err(Error::SortMismatch(0))
        );
    }
}
