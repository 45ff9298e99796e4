//! Finite crossed modules in categories of groups with operations.
//!
//! Every object is a set of integer tables over elements `0..n`, with `0`
//! the additive identity. Validators return a [`ValidationReport`] listing
//! each violated rule with its first witness; constructors refuse invalid
//! input.

pub mod action;
pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod derivation;
pub mod derived;
pub mod error;
pub mod groupoid;
pub mod homotopy;
pub mod report;
pub mod text;
pub mod xmod;

pub use action::{check_derived_action, semidirect_product, ActionSet, SplitExtension};
pub use algebra::{check_morphism, validate_algebra, AlgMorphism, OmegaAlgebra, Signature, Table, DEFAULT_BUDGET};
pub use derivation::{Derivation, Regularity};
pub use error::{Error, Result};
pub use groupoid::{InternalFunctor, InternalGroupoid};
pub use homotopy::{GroupoidHomotopy, XModHomotopy};
pub use report::{ValidationReport, Violation};
pub use xmod::{CrossedModule, XModMorphism};
