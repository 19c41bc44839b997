//! SAT-based minimality proofs and candidate enumeration for digit automata.
//!
//! A dictionary of `(b^n)_β ↦ digit` pairs is turned into a prefix tree,
//! colored with `k` colors by a SAT solver, and each satisfying coloring is
//! read back as a `k`-state automaton with output.

pub mod apta;
pub mod dictionary;
pub mod dimacs;
pub mod encode;
mod error;
pub mod ladder;
pub mod solver;
pub mod verify;

pub use apta::{build_apta, build_cg, propagate_conflicts, Apta, ConsistencyGraph};
pub use dictionary::{build_dictionary, Dictionary};
pub use encode::{encode, extend, CnfEncoding, EncodeOptions, OstrowskiConstraints, VarMap};
pub use error::{Error, Result};
pub use ladder::{enumerate_verified, instance, run_cell, run_ladder, CellResult, Ledger, LadderConfig, LadderRow, Refined, Status};
pub use solver::{decode_model, enumerate_all, solve, Granularity, SolverKind, Verdict};
pub use verify::{verify_candidate, verify_candidates, PowerStream, Verification};
