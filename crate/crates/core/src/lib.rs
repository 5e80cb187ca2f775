//! Computational tools for linear Maltsev conditions on small finite algebras.
//!
//! * [`algebra`] and [`clone`]: finite algebras as operation tables and their
//!   term-operation clones, generated by closure.
//! * [`identities`]: linear identity systems, their DSL, canonical forms and
//!   satisfiability in a finite algebra.
//! * [`affine`]: realizability in full idempotent reducts of modules,
//!   decided with exact integer linear algebra.
//! * [`systems`]: named systems on two ternary symbols.
//! * [`classify`]: the filter pipeline that searches whole signature classes
//!   for systems holding in the test algebras but in no affine reduct.

pub mod affine;
pub mod algebra;
pub mod classify;
pub mod clone;
pub mod error;
pub mod identities;
pub mod systems;

pub use algebra::{
    builtin, make_majority_first, make_meet3, make_semilattice, product, AlgebraSpec, BasicOp,
    FiniteAlgebra,
};
pub use clone::{
    classify_operation, generate_term_operations, CloneSlice, OperationProfile, Term, TermOperation,
};
pub use error::{AffineError, AlgebraError, ClassifyError, CloneError, ParseError, SystemError};
