use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("kind error at byte {pos}: {msg}")]
    Kind { pos: usize, msg: String },

    #[error("unknown letter `{letter}` at byte {pos}")]
    UnknownLetter { pos: usize, letter: String },

    #[error("free variable `{name}` at byte {pos}")]
    FreeVariable { pos: usize, name: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid data word: {0}")]
    DataWord(String),

    #[error("constant vocabularies differ: {0}")]
    Vocabulary(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("type structure is not a tree: {0}")]
    NotATree(String),

    #[error("target type is not reachable: {0}")]
    Unreachable(String),

    #[error("formula depth {depth} exceeds type depth {k}")]
    DepthMismatch { depth: usize, k: usize },

    #[error("not winning: {0}")]
    NotWinning(String),

    #[error("wrong turn: {0}")]
    WrongTurn(String),

    #[error("illegal script entry: {0}")]
    Script(String),

    #[error("malformed strategy: {0}")]
    Strategy(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
