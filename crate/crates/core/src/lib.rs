//! Finite automata that compute the base-`b` digits of quadratic irrationals.
//!
//! On input the Ostrowski-family representation of `b^n`, the automata built
//! by [`pipeline`] output the `n`'th digit after the point of a quadratic
//! irrational `α`. The crate provides the exact arithmetic oracle
//! ([`qexact`]), the numeration systems ([`numeration`]), an automaton
//! algebra ([`automata`]), synchronized automata for linear relations
//! ([`linrel`]) and the end-to-end constructions ([`pipeline`]).

pub mod automata;
pub mod error;
pub mod linrel;
pub mod numeration;
pub mod pipeline;
pub mod qexact;

pub use error::{Error, Result};
