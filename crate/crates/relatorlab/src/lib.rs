//! A workbench for a monadic call-by-value λ-calculus.
//!
//! The crate evaluates fine-grain λ-terms with algebraic operations under a
//! family of concrete monads, lifts relations along relators, and checks
//! applicative Γ-similarity, Γ-bisimilarity and Howe-closure properties on
//! finite universes. Every check is bounded by an explicit evaluation index
//! and universe, and reports carry those bounds.

pub mod bitrel;
pub mod error;
pub mod evaluator;
pub mod howe;
pub mod monads;
pub mod rational;
pub mod relators;
pub mod report;
pub mod similarity;
pub mod syntax;

pub use error::{Error, Result};
