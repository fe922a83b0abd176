use thiserror::Error;

/// Errors produced by simulation, circuit construction, and the factoring driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("gate requires distinct qubits, got {qubit} twice")]
    DuplicateQubit { qubit: usize },

    #[error(
        "state of {required} qubits needs {amplitudes} amplitudes, over the cap of {cap} qubits"
    )]
    QubitCapExceeded {
        required: usize,
        cap: usize,
        amplitudes: u128,
    },

    #[error("circuit width {circuit} does not match state width {state}")]
    WidthMismatch { circuit: usize, state: usize },

    #[error("register {start}..{end} invalid for {width} qubits")]
    BadRegister {
        start: usize,
        end: usize,
        width: usize,
    },

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("circuit width must be at least 1")]
    ZeroWidth,

    #[error("modulus must be odd, got {n}")]
    EvenModulus { n: u64 },

    #[error("modulus must be at least 3, got {n}")]
    ModulusTooSmall { n: u64 },

    #[error("base {a} outside [2, {max}]")]
    BaseOutOfRange { a: u64, max: u64 },

    #[error("block index {block} outside [0, {upper_bits})")]
    BlockOutOfRange { block: usize, upper_bits: usize },

    #[error("modulus must be nonzero")]
    ZeroModulus,

    #[error("gcd(0, 0) is undefined")]
    GcdBothZero,

    #[error("{a} is not coprime to {n} (gcd = {g})")]
    NotCoprime { a: String, n: String, g: String },

    #[error("order search for a = {a} mod {n} aborted after {bound} iterations")]
    OrderSearchAborted { a: String, n: String, bound: u64 },

    #[error("analytic distribution over {terms} terms exceeds the cap of {cap}")]
    AnalyticCapExceeded { terms: u128, cap: u128 },

    #[error("circuit text line {line}: {msg}")]
    CircuitParse { line: usize, msg: String },

    #[error("fixture {name} line {line}: {msg}")]
    FixtureParse {
        name: String,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
