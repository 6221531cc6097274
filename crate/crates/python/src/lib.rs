//! Python bindings: parse a specification file and run the compiler, the
//! substitution comparison, the proof checker and the model oracle on it.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use eqsketch::deduction::{
    check_deduction, check_normal_form, compile_to_factorization, find_counterexample,
    normalize_deduction, verify_factorization, Witnesses,
};
use eqsketch::dsl::{self, ProofDecl, SpecFile};
use eqsketch::fpcat::{arr_of_term, arrows_equal, compile_term, diagram_of_equation, normalize};
use eqsketch::signature::inhabited_sorts;
use eqsketch::subst::{arr_subst_direct, subst_term_recursive, SubstInstance};
use eqsketch::termlang::{Equation, Term};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed specification file.
#[pyclass(frozen)]
pub struct Spec {
    inner: SpecFile,
}

impl Spec {
    fn term(&self, name: &str) -> PyResult<&Term> {
        self.inner
            .term(name)
            .map(|t| &t.term)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown term `{name}`")))
    }

    fn equation(&self, name: &str) -> PyResult<&Equation> {
        self.inner
            .equation(name)
            .map(|e| &e.equation)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown equation `{name}`")))
    }

    fn proof(&self, name: &str) -> PyResult<&ProofDecl> {
        self.inner
            .proof(name)
            .ok_or_else(|| PyKeyError::new_err(format!("unknown proof `{name}`")))
    }

    fn witnesses(&self) -> Witnesses {
        inhabited_sorts(&self.inner.signature)
    }
}

#[pymethods]
impl Spec {
    fn terms(&self) -> Vec<String> {
        self.inner.terms().map(|t| t.name.clone()).collect()
    }

    fn equations(&self) -> Vec<String> {
        self.inner.equations().map(|e| e.name.clone()).collect()
    }

    fn proofs(&self) -> Vec<String> {
        self.inner.proofs().map(|p| p.name.clone()).collect()
    }

    /// The source text re-printed in canonical layout.
    fn print(&self) -> String {
        self.inner.print()
    }

    /// Normal forms of the stages D, I, Q and the composite arrow of a term.
    fn compile(&self, term: &str) -> PyResult<BTreeMap<&'static str, String>> {
        let t = compile_term(self.term(term)?);
        Ok(BTreeMap::from([
            ("D", normalize(&t.d).to_string()),
            ("I", normalize(&t.i).to_string()),
            ("Q", normalize(&t.q).to_string()),
            ("arr", normalize(&t.arr).to_string()),
        ]))
    }

    /// The two sides of an equation's diagram and whether they coincide.
    fn check_eq(&self, equation: &str) -> PyResult<(String, String, bool)> {
        let (l, r) = diagram_of_equation(self.equation(equation)?);
        let equal = arrows_equal(&l, &r).map_err(value_error)?;
        Ok((normalize(&l).to_string(), normalize(&r).to_string(), equal))
    }

    /// Substitutes term `with` for variable `var` in `term`; returns the
    /// result, both compiled arrows and whether they agree.
    #[pyo3(name = "subst")]
    fn substitute(&self, term: &str, var: &str, with: &str) -> PyResult<(String, String, String, bool)> {
        let x = self
            .inner
            .variable(var)
            .cloned()
            .ok_or_else(|| PyKeyError::new_err(format!("unknown variable `{var}`")))?;
        let inst = SubstInstance::new(self.term(term)?.clone(), x, self.term(with)?.clone()).map_err(value_error)?;
        let result = subst_term_recursive(&inst).map_err(value_error)?;
        let recursive = arr_of_term(&result);
        let direct = arr_subst_direct(&inst).map_err(value_error)?;
        let agree = arrows_equal(&recursive, &direct).map_err(value_error)?;
        Ok((
            self.inner.show_expr(result.expr()),
            normalize(&recursive).to_string(),
            normalize(&direct).to_string(),
            agree,
        ))
    }

    /// Checks a proof and verifies its certificate; returns the conclusion.
    fn check_proof(&self, proof: &str) -> PyResult<String> {
        let pd = self.proof(proof)?;
        let wit = self.witnesses();
        let tree = self.inner.proof_tree(pd, &wit).map_err(value_error)?;
        let f = check_deduction(&tree, &self.inner.hypotheses(pd), &wit).map_err(value_error)?;
        if !verify_factorization(&f) {
            return Err(PyValueError::new_err(format!("certificate of `{proof}` does not verify")));
        }
        Ok(self.inner.show_equation(&tree.conclusion))
    }

    /// Levels the proof and compiles it; returns the number of levels.
    fn normalize_proof(&self, proof: &str) -> PyResult<usize> {
        let pd = self.proof(proof)?;
        let wit = self.witnesses();
        let tree = self.inner.proof_tree(pd, &wit).map_err(value_error)?;
        let ld = normalize_deduction(&tree);
        check_normal_form(&ld).map_err(PyValueError::new_err)?;
        let f = compile_to_factorization(&ld, &self.inner.hypotheses(pd), &wit).map_err(value_error)?;
        if !verify_factorization(&f) {
            return Err(PyValueError::new_err(format!("levelled `{proof}` does not verify")));
        }
        Ok(ld.levels.len())
    }

    /// Searches models with carriers up to `max_size` for one where the
    /// equation fails; returns the model as text, or None.
    #[pyo3(signature = (equation, max_size = 3))]
    fn oracle(&self, equation: &str, max_size: usize) -> PyResult<Option<String>> {
        let goal = self.equation(equation)?;
        let found = find_counterexample(&self.inner.signature, max_size, &[], goal).map_err(value_error)?;
        Ok(found.map(|cx| format!("{}assignment: {:?}", cx.model, cx.assignment)))
    }
}

/// Parses specification text.
#[pyfunction]
fn parse_spec(text: &str) -> PyResult<Spec> {
    dsl::parse_spec(text).map(|inner| Spec { inner }).map_err(value_error)
}

#[pymodule]
fn pyeqsketch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Spec>()?;
    m.add_function(wrap_pyfunction!(parse_spec, m)?)?;
    Ok(())
}
