use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(String, String),

    #[error("digit {digit} is not valid for {system}")]
    InvalidDigit { digit: u32, system: String },

    #[error("malformed automaton: {0}")]
    MalformedAutomaton(String),

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unbound variable `{var}` in {context}")]
    UnboundVariable { var: String, context: String },

    #[error("macro `{name}` expects {expected} arguments, got {found}")]
    MacroArity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown macro `{0}`")]
    UnknownMacro(String),

    #[error("recursive macro `{0}`")]
    RecursiveMacro(String),

    #[error("sequence symbol `{0}` is not bound")]
    UnboundSequence(String),

    #[error("unknown sequence `{0}`")]
    UnknownSequence(String),

    #[error("mixed numeration systems: {0} and {1}")]
    MixedSystems(String, String),

    #[error("counting variable has infinitely many witnesses (cycle through states {cycle:?})")]
    InfiniteCount { cycle: Vec<u32> },

    #[error("prefix of length {cap} did not stabilize the factor sets")]
    NotStabilized { cap: usize },

    #[error("{0}")]
    Format(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
