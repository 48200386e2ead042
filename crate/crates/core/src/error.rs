use thiserror::Error;

/// The closure axiom an open family failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureAxiom {
    ContainsEmpty,
    ContainsWhole,
    UnionClosed,
    IntersectionClosed,
}

impl std::fmt::Display for ClosureAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClosureAxiom::ContainsEmpty => "family must contain the empty set",
            ClosureAxiom::ContainsWhole => "family must contain the whole space",
            ClosureAxiom::UnionClosed => "family must be closed under union",
            ClosureAxiom::IntersectionClosed => "family must be closed under intersection",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QtopError {
    #[error("not a topology: {axiom} (offending opens {witness:?})")]
    NotAClosedFamily { axiom: ClosureAxiom, witness: Vec<Vec<usize>> },
    #[error("space is not T0: points {0} and {1} are indistinguishable")]
    NotT0(usize, usize),
    #[error("space is not scattered: perfect kernel {0:?}")]
    NotScattered(Vec<usize>),
    #[error("space has {0} points; at most {1} supported")]
    TooLarge(usize, usize),
    #[error("point index {0} out of range")]
    BadPoint(usize),
    #[error("open index {0} out of range")]
    BadOpen(usize),
    #[error("set {0:?} is not open")]
    NotOpen(Vec<usize>),
    #[error("set {0:?} is not closed")]
    NotClosed(Vec<usize>),
    #[error("map is not continuous: preimage of open {0:?} is not open")]
    NotContinuous(Vec<usize>),
    #[error("sets are not increasing at position {0}")]
    NonIncreasing(usize),
    #[error("unsupported level: {0}")]
    UnsupportedLevel(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("no witness found up to length {0}")]
    NoWitness(usize),
    #[error("not a quasi-metric: {0}")]
    NotAQuasiMetric(String),
    #[error("partial metric axiom violated: {0}")]
    PMetricAxiomViolation(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("pair {0}: V is not contained in U")]
    VNotInU(usize),
    #[error("pair {0}: U and A are not disjoint")]
    PairNotDisjoint(usize),
    #[error("pair {pair}: point {point} lies in U at distance 0 from its complement")]
    PointOnBoundary { pair: usize, point: usize },
    #[error("round {round}: no radius down to 2^-{floor} fits inside U")]
    NoAdmissibleRadius { round: usize, floor: u32 },
    #[error("malformed run at round {round}: {reason}")]
    MalformedRun { round: usize, reason: String },
    #[error("decomposition does not evaluate to the complement of B")]
    DecompositionMismatch,
    #[error("round {0}: response is not a basic open")]
    NonBasisMove(usize),
    #[error("index exceeds presentation depth {0}")]
    DepthExceeded(usize),
    #[error("point is not in X: fails pair {0}")]
    PointNotInX(usize),
    #[error("inconsistent tables: {0}")]
    TableInconsistent(String),
    #[error("r table too short: no entry for {0} past the function depth")]
    RTableTooShort(usize),
    #[error("tree is not pruned: prefix {0:?} has no extension")]
    NotPruned(Vec<u64>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, QtopError>;
