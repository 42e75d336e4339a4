use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("missing variable `{0}` in joint distribution")]
    MissingVariable(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty alphabet")]
    EmptyAlphabet(String),
    #[error("variable `{0}` is already present")]
    VariableCollision(String),
    #[error("variable `{name}` has alphabet size {got}, expected {expected}")]
    SizeMismatch { name: String, expected: usize, got: usize },
    #[error("tensor has {got} entries, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("non-finite probability at index {0}")]
    NonFinite(usize),
    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),
    #[error("conditioning event has probability zero")]
    ZeroProbabilityEvent,
    #[error("symbol {symbol} out of range for `{name}` (alphabet size {size})")]
    SymbolOutOfRange { name: String, symbol: usize, size: usize },
    #[error("sequence length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),
    #[error("channel is not semi-orthogonal: {0}")]
    NotSomarc(String),
    #[error("joint does not come from the required input chain: {0}")]
    WrongChain(String),
    #[error("variable `{0}` must have a singleton alphabet")]
    NotSingleton(String),
    #[error("objective {objective} cannot be optimized over family {family}")]
    IncompatibleFamily { objective: String, family: String },
    #[error("objective evaluated to a non-finite value")]
    NonFiniteObjective,
    #[error("grid has {points} points, cap is {cap}")]
    GridTooLarge { points: f64, cap: f64 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
