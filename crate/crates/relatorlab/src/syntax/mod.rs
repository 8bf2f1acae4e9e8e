//! Abstract syntax of the fine-grain computational λ-calculus.

mod enumerate;
pub mod macros;
mod parse;
mod pretty;
pub mod programs;
mod random;
mod signature;
mod term;

pub use enumerate::{
    enumerate_terms, enumerate_terms_with, enumerate_values, enumerate_values_with, EnumLimits,
    DEFAULT_CAP, DEFAULT_MAX_DEPTH,
};
pub use parse::{expand_macros, parse_phrase, parse_term, parse_value};
pub use pretty::{print_term, print_value};
pub use random::TermSampler;
pub use signature::Signature;
pub use term::{
    alpha_eq, free_vars, open_term, open_with_name, substitute, Name, Phrase, Term, Value,
};

/// Canonical name of the `i`-th variable of a context.
pub fn context_var(i: usize) -> Name {
    Name::new(format!("x{i}"))
}

/// The canonical context `{x0, …, x(k-1)}`.
pub fn context(k: usize) -> Vec<Name> {
    (0..k).map(context_var).collect()
}
