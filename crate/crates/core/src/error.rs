use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arc {src} -> {dst} has no reverse arc")]
    SymmetryViolation { src: String, dst: String },
    #[error("graph is disconnected: no walk from {from} to {to}")]
    Disconnected { from: String, to: String },
    #[error("loop at vertex {0}")]
    LoopPresent(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("lattice window {width}x{height} is too small, both sides must be at least 2")]
    DimensionTooSmall { width: usize, height: usize },
    #[error("unknown vertex {0}")]
    VertexUnknown(String),
    #[error("walk enumeration exceeded the cap of {cap} walks")]
    BudgetExceeded { cap: usize },
    #[error("tree does not span the graph: {0}")]
    NotSpanning(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("no rate for arc {src} -> {dst}")]
    MissingRate { src: String, dst: String },
    #[error("basis does not belong to this graph: {0}")]
    BasisMismatch(String),
    #[error("prescription incomplete: {0}")]
    PrescriptionIncomplete(String),
    #[error("{what} must be positive and finite, got {value}")]
    NonPositiveRate { what: String, value: f64 },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("range too small: {0}")]
    RangeTooSmall(String),
    #[error("R = {r} is below the admissible threshold {threshold}")]
    RNotInRegime { r: f64, threshold: f64 },
    #[error("boundary leak {leak:e} exceeds {threshold:e}")]
    WindowLeak { leak: f64, threshold: f64 },
    #[error("endpoint {to} is unreachable from {from}")]
    UnreachableEndpoint { from: String, to: String },
    #[error("evaluator failure: {0}")]
    EvaluatorFailure(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("effective sample size {ess:.1} is below 1% of {n} paths")]
    DegenerateWeights { ess: f64, n: usize },
    #[error("no R in the grid has at least {min_exceedances} exceedances")]
    InsufficientTail { min_exceedances: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
