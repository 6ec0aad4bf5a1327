use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation at s = {s} is within tolerance of the pole {pole}")]
    PoleEvaluation { s: f64, pole: f64 },

    #[error("special function overflow evaluating {what} at {at}")]
    NonFiniteSpecialFunction { what: &'static str, at: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("no sign change on [{lo}, {hi}] while solving for {what}")]
    BracketFailure { what: String, lo: f64, hi: f64 },

    #[error("roots {a} and {b} coincide (repeated Cramér–Lundberg root)")]
    MultiplicityDetected { a: f64, b: f64 },

    #[error("generator has complex eigenvalue {re} + {im}i")]
    ComplexPoles { re: f64, im: f64 },

    #[error("division by a near-zero factor 1 - {xi_k}/{xi_i}")]
    DivisionNearZero { xi_k: f64, xi_i: f64 },

    #[error("G stays positive up to the horizon {horizon}")]
    NoSignChange { horizon: f64 },

    #[error("F is maximised at 0 (F(0) = {f0}); take-the-money-and-run candidate")]
    RunStrategySignal { f0: f64 },

    #[error("impulse policy degenerate: {0}")]
    Degenerate(String),

    #[error("empty barrier interval: w* = {upper} < w_* = {lower}")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
