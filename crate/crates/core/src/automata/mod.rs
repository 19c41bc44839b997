//! Deterministic and nondeterministic automata over scalar and tuple
//! alphabets, with the boolean algebra, projection, minimization and output
//! combination used by the constructions.

mod alphabet;
mod dfa;
pub mod format;
mod minimize;
mod nfa;
pub mod ops;
mod regex;

pub use alphabet::{pad_left, Alphabet, Symbol};
pub use dfa::{Dfa, Dfao};
pub use nfa::Nfa;
pub use ops::{combine, complement, dfao_difference, intersect, lift, product, project, union, BoolOp};
pub use regex::regex_to_dfa;

/// Marker for a missing transition in flat transition tables.
pub const NONE: u32 = u32::MAX;
