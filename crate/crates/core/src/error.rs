use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("undecidable comparison: enclosures still overlap at {bits} bits")]
    UndecidableComparison { bits: u32 },

    #[error("undecidable comparison at step {step}: enclosures still overlap at {bits} bits")]
    UndecidableAtStep { step: usize, bits: u32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid wager set: {0}")]
    InvalidSet(String),

    #[error("wager set has no nonzero elements")]
    EmptySet,

    #[error("cannot step a bankrupt run (t = {t})")]
    SteppedBankruptRun { t: usize },

    #[error("validation depth {depth} exceeds the exhaustive cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },

    #[error("strategy is not history-independent")]
    NotHistoryIndependent,

    #[error("unknown strategy spec: {0}")]
    UnknownSpec(String),

    #[error("no element of the wager set lies in the approximation window at history {history:?}")]
    EmptyWindow { history: String },

    #[error("runs do not share an outcome sequence: {0}")]
    MismatchedRuns(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("ratio increased at step {step}")]
    MonotonicityViolation { step: usize },

    #[error("sup A is infinite")]
    UnboundedA,

    #[error("B \\ {{0}} is not bounded away from zero")]
    BNotBoundedAwayFromZero,

    #[error("B is not well ordered")]
    NotWellOrdered,

    #[error("fragility assertion failed at step {step}: {detail}")]
    FragilityAssertionFailed { step: usize, detail: String },

    #[error("invariant violated at step {step}: {detail}")]
    InvariantViolation { step: usize, detail: String },

    #[error("opponent {index} wagered {wager} outside its wager set at step {step}")]
    OpponentOutsideWagerSet {
        index: usize,
        step: usize,
        wager: String,
    },

    #[error("missing columns: {0}")]
    MissingColumns(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Invariant traps signal an implementation bug rather than bad input.
    pub fn is_invariant_trap(&self) -> bool {
        matches!(
            self,
            Error::MonotonicityViolation { .. }
                | Error::FragilityAssertionFailed { .. }
                | Error::InvariantViolation { .. }
        )
    }

    /// Attaches the casino step to an undecidable comparison.
    pub fn at_step(self, step: usize) -> Error {
        match self {
            Error::UndecidableComparison { bits } => Error::UndecidableAtStep { step, bits },
            other => other,
        }
    }
}
