use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("universe must have at least one element")]
    EmptyUniverse,
    #[error("operation name {0:?} is declared twice")]
    DuplicateOp(String),
    #[error("operation {0:?} has arity 0; constants are not supported")]
    NullaryOp(String),
    #[error("operation {op:?} of arity {arity} has a table too large to address")]
    TableTooLarge { op: String, arity: usize },
    #[error("operation {op:?}: table has {found} entries, expected {expected}")]
    TableLength {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("operation {op:?}: entry {value} at index {index} is outside 0..{size}")]
    EntryOutOfRange {
        op: String,
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("majority-first algebra needs at least 2 elements, got {0}")]
    MajorityTooSmall(usize),
    #[error("algebras {lhs:?} and {rhs:?} do not share a signature")]
    SignatureMismatch { lhs: String, rhs: String },
    #[error("product universe is too large")]
    ProductTooLarge,
    #[error("malformed algebra JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CloneError {
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("cap must be positive")]
    ZeroCap,
    #[error("clone of {algebra:?} at arity {arity} is larger than cap {cap}")]
    CapExceeded {
        algebra: String,
        arity: usize,
        cap: usize,
    },
    #[error("tables of arity {arity} over {size} elements are too large")]
    TableTooLarge { size: usize, arity: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: unknown symbol {name:?}")]
    UnknownSymbol {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: symbol {name:?} has arity {expected}, applied to {found} arguments")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: symbol {name:?} declared twice")]
    DuplicateSymbol {
        line: usize,
        col: usize,
        name: String,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("symbol {0:?} must have arity 1, 2 or 3")]
    BadArity(String),
    #[error("symbol {0:?} declared twice")]
    DuplicateSymbol(String),
    #[error("symbol {0:?} collides with a variable name")]
    SymbolIsVariable(String),
    #[error("term refers to symbol #{0}, which is not in the signature")]
    UnknownSymbol(usize),
    #[error("symbol {name:?} has arity {expected}, applied to {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("variable index {0} is outside the 6-letter alphabet")]
    VariableOutOfRange(u8),
    #[error("system uses variables beyond x, y, z")]
    TooManyVariables,
    #[error("interpretation does not match the signature: {0}")]
    Interpretation(String),
    #[error(transparent)]
    Clone(#[from] CloneError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("operations mix moduli {0} and {1}")]
    ModulusMismatch(u64, u64),
    #[error("coefficients {coeffs:?} do not sum to 1 mod {modulus}")]
    NotIdempotent { modulus: u64, coeffs: Vec<u64> },
    #[error("assignment has {found} operations for {expected} symbols")]
    AssignmentSize { expected: usize, found: usize },
    #[error("symbol {symbol:?} has arity {expected}, operation has {found} coefficients")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("invariant factor {0} is too large to factor")]
    FactorTooLarge(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Clone(#[from] CloneError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("system is realizable in some affine reduct; it has no unrealizable subsystems")]
    Realizable,
    #[error("refinement search needs more than {0} evaluations")]
    LatticeTooLarge(usize),
    #[error("variable bound must be 2 or 3, got {0}")]
    VariableBound(usize),
    #[error("expected a system over at most two ternary symbols")]
    NotTernaryPair,
    #[error("unknown signature class {0:?}")]
    UnknownClass(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
