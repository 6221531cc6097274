//! Multisorted equational logic compiled into finite-product categories.
//!
//! Signatures become sketches, terms become arrows, equations become
//! parallel pairs, and equational deductions become checkable certificates
//! of arrow equalities.

pub mod deduction;
pub mod dsl;
pub mod error;
pub mod fpcat;
pub mod signature;
pub mod sketch;
pub mod subst;
pub mod termlang;

pub use error::{Error, Loc, Result};
pub use fpcat::{FPArrow, FPObject};
pub use signature::{Operation, Signature, Sort, Variable};
pub use termlang::{Equation, Expression, Term, VarSet};
