use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tree degree must be at least 2, got {0}")]
    InvalidDegree(usize),
    #[error("state `{state}`: output is not a bijection of 1..={degree}")]
    NonBijectiveOutput { state: String, degree: usize },
    #[error("state `{state}`: {field} has {found} entries, expected {expected}")]
    WrongArity {
        state: String,
        field: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("state `{state}`: transition target `{target}` is not a declared state")]
    UnknownTransitionTarget { state: String, target: String },
    #[error("state name `{0}` is declared more than once")]
    DuplicateStateName(String),
    #[error("reserved identity state `e` misused: {0}")]
    ReservedNameMisuse(String),
    #[error("cannot parse element word: {0}")]
    BadWord(String),
    #[error("letter {letter} is outside 1..={degree}")]
    LetterOutOfRange { letter: usize, degree: usize },
    #[error("level {level} needs {points} points, over the point budget of {budget}")]
    PointBudgetExceeded {
        level: usize,
        points: u128,
        budget: usize,
    },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("permutation group of degree 0")]
    EmptyDegree,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("element is not in the group")]
    ElementNotInGroup,
    #[error("subgroup is not normal in the given group")]
    NotNormal,
    #[error("generators of the second group are not contained in the first")]
    NotASubgroup,
    #[error("order {numerator} is not divisible by {denominator}")]
    NonDividingOrder {
        numerator: String,
        denominator: String,
    },
    #[error("permutation does not preserve the {m}-adic tree structure or uses labels outside the cyclic group")]
    NotInGammaGroup { m: usize },
    #[error("automaton is not m-adic: state `{0}` has an output that is not a power of the m-cycle")]
    NotMAdic(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(i64),
    #[error("unsupported report format `{0}`")]
    UnsupportedFormat(String),
    #[error("malformed log index `{0}`")]
    BadLogIndex(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
