//! Decision engine and counting toolkit for first-order properties of
//! automatic sequences.
//!
//! Predicates over `(ℕ, +, n ↦ x[n])` are compiled into finite automata
//! ([`logic`]), sentences are decided by emptiness checks, and counting
//! automata become linear representations ([`counting`]). Every engine
//! result can be cross-checked against brute-force word checkers
//! ([`oracle`]).

pub mod automata;
pub mod counting;
pub mod error;
pub mod logic;
pub mod numeration;
pub mod oracle;
pub mod sequences;

pub use error::{Error, Result};
