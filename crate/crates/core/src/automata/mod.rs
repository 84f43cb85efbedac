//! Automata algebra over tuple-digit alphabets.

mod alphabet;
mod dfa;
mod dfao;
pub mod io;
mod nfa;
mod ops;
mod partition;

pub use alphabet::Alphabet;
pub use dfa::{BoolOp, Dfa};
pub use dfao::Dfao;
pub use nfa::Nfa;
