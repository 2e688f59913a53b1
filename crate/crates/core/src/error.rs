use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("degree too low: need at least {need}, got {got}")]
    DegreeTooLow { need: usize, got: usize },
    #[error("dimension too high: {0}")]
    DimensionTooHigh(usize),
    #[error("derivative order {0} too high")]
    OrderTooHigh(usize),
    #[error("root iteration did not converge after {0} sweeps")]
    NonConvergence(usize),
    #[error("zero on contour (nearest zero estimate {0:e})")]
    ZeroOnContour(f64),
    #[error("argument principle inconclusive (value {0})")]
    Inconclusive(f64),
    #[error("derivative of order {0} vanishes at the base point")]
    DerivativeVanishes(usize),
    #[error("derivative vanishes at iterate {0}")]
    DerivativeVanishesAtIterate(usize),
    #[error("no convergence within {0} iterations")]
    MaxIterations(usize),
    #[error("iterate {step} left the disc of radius 5/4 (|z| = {modulus})")]
    LeftDomain { step: usize, modulus: f64 },
    #[error("case analysis failed: {0}")]
    CaseAnalysisFailed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("smallness hypothesis violated: {0}")]
    SmallnessViolated(String),
    #[error("sublevel set sampling found no points")]
    EmptySublevel,
    #[error("too many distinct roots: {0} (cap 12)")]
    TooManyRoots(usize),
    #[error("root finding failed: {0}")]
    RootFindingFailed(String),
    #[error("quadrature budget exceeded: {needed} points needed, cap {cap}")]
    BudgetExceeded { needed: u64, cap: u64 },
    #[error("Fourier tail too heavy: {0:.3e} of mass beyond W")]
    TailTooFat(f64),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Argument,
    Budget,
    Precondition,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidInput(_) | Parse { .. } | DegreeCap { .. } | OrderTooHigh(_)
            | DimensionTooHigh(_) | Io(_) => ErrorKind::Argument,
            BudgetExceeded { .. } => ErrorKind::Budget,
            DegreeTooLow { .. }
            | SmallnessViolated(_)
            | Precondition(_)
            | DerivativeVanishes(_)
            | TooManyRoots(_)
            | ZeroOnContour(_) => ErrorKind::Precondition,
            _ => ErrorKind::Numerical,
        }
    }

    /// Short identifier used in machine-readable error records.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidInput(_) => "InvalidInput",
            Parse { .. } => "Parse",
            DegreeCap { .. } => "DegreeCap",
            DegreeTooLow { .. } => "DegreeTooLow",
            DimensionTooHigh(_) => "DimensionTooHigh",
            OrderTooHigh(_) => "OrderTooHigh",
            NonConvergence(_) => "NonConvergence",
            ZeroOnContour(_) => "ZeroOnContour",
            Inconclusive(_) => "Inconclusive",
            DerivativeVanishes(_) => "DerivativeVanishes",
            DerivativeVanishesAtIterate(_) => "DerivativeVanishesAtIterate",
            MaxIterations(_) => "MaxIterations",
            LeftDomain { .. } => "LeftDomain",
            CaseAnalysisFailed(_) => "CaseAnalysisFailed",
            SmallnessViolated(_) => "SmallnessViolated",
            Precondition(_) => "Precondition",
            EmptySublevel => "EmptySublevel",
            TooManyRoots(_) => "TooManyRoots",
            RootFindingFailed(_) => "RootFindingFailed",
            BudgetExceeded { .. } => "BudgetExceeded",
            TailTooFat(_) => "TailTooFat",
            Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
