use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a rational")]
    Parse(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid interval: lower endpoint {lo} exceeds upper endpoint {hi}")]
    InvalidInterval { lo: String, hi: String },
    #[error("negative padding {0}")]
    NegativeDelta(String),
    #[error("inconsistent set: {0}")]
    Inconsistent(String),
    #[error("inconsistent set at level {level}")]
    InconsistentLevel { level: usize },
    #[error("{0} is not way-below {1}")]
    NotWayBelow(String, String),
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
    #[error("chain is not increasing between indices {lower} and {upper}")]
    ChainNotMonotone { lower: usize, upper: usize },
    #[error("grid is not monotone at ({n}, {m})")]
    NonMonotoneGrid { n: usize, m: usize },
    #[error("no level n <= {budget} reached width 2^-{k}")]
    BudgetExhausted { k: u32, budget: usize },
    #[error("certificate violated: {0}")]
    CertificateViolated(String),
    #[error("step function inconsistent on steps {subset:?}")]
    InvalidStepFunction { subset: Vec<usize> },
    #[error("step function has {len} singles, more than the cap of {cap}")]
    TooManySteps { len: usize, cap: usize },
    #[error("argument must be positive, got {0}")]
    NonPositive(String),
    #[error("modulus too small: steps {i} and {j} conflict at level {level}")]
    InvalidModulus { level: usize, i: usize, j: usize },
    #[error("modulus is not positive on {0}")]
    NonPositiveModulus(String),
    #[error("Markov modulus does not bound the oscillation at level {level}")]
    InvalidMarkov { level: usize },
    #[error("null sequence has no finite term up to index {0}")]
    UnboundedLevel(usize),
    #[error("function is not monotone: steps {i} and {j} conflict at level {level}")]
    NonMonotoneFunction { level: usize, i: usize, j: usize },
}
