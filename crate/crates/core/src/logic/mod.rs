//! First-order predicate language over `(ℕ, +, n ↦ x[n])`: parsing, the
//! shipped predicate library, and compilation to automata.

pub mod ast;
mod compile;
mod library;
mod parser;

pub use ast::{Connective, Formula, LinExpr, Quant, Rel, SeqTerm};
pub use compile::{Binding, Compiled, Compiler, Decision};
pub use library::Library;
pub use parser::{parse, parse_defs, MacroDef};
