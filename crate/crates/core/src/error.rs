use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// First violated invariant of a structure, with witnessing indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Shape {
        detail: String,
    },
    Reflexivity {
        element: usize,
    },
    Antisymmetry {
        a: usize,
        b: usize,
    },
    Transitivity {
        a: usize,
        b: usize,
        c: usize,
    },
    OrderNotPermutation,
    OrderDoesNotExtend {
        below: usize,
        above: usize,
    },
    TableEntry {
        row: usize,
        col: usize,
    },
    LatticeLaw {
        law: &'static str,
        a: usize,
        b: usize,
        c: Option<usize>,
    },
    Conformance {
        lower: usize,
        upper: usize,
        a: usize,
        b: usize,
    },
    Inconsistent {
        a: usize,
        b: usize,
        i: usize,
        j: usize,
    },
    CyclicUnion {
        a: usize,
        b: usize,
    },
    RelationCount {
        expected: usize,
        found: usize,
    },
    Injectivity {
        a: usize,
        b: usize,
    },
    MapOutOfRange {
        element: usize,
    },
    MapLength {
        expected: usize,
        found: usize,
    },
    NotPreserved {
        relation: &'static str,
        a: usize,
        b: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            Shape { detail } => write!(f, "malformed table: {detail}"),
            Reflexivity { element } => write!(f, "reflexivity fails at {element}"),
            Antisymmetry { a, b } => write!(f, "antisymmetry fails at ({a},{b})"),
            Transitivity { a, b, c } => {
                write!(f, "transitivity fails at ({a},{b},{c}): {a}<={b}<={c} but not {a}<={c}")
            }
            OrderNotPermutation => write!(f, "linear order is not a permutation of the elements"),
            OrderDoesNotExtend { below, above } => write!(
                f,
                "linear order does not extend the partial order: {below} <= {above} but {above} is ranked first"
            ),
            TableEntry { row, col } => write!(f, "table entry ({row},{col}) is out of range"),
            LatticeLaw { law, a, b, c: Some(c) } => write!(f, "{law} fails at ({a},{b},{c})"),
            LatticeLaw { law, a, b, c: None } => write!(f, "{law} fails at ({a},{b})"),
            Conformance { lower, upper, a, b } => write!(
                f,
                "conformance fails: relation {lower} is below {upper} in the template but ({a},{b}) is in {lower} and not in {upper}"
            ),
            Inconsistent { a, b, i, j } => write!(
                f,
                "consistency fails: {a} < {b} in relation {i} and {b} < {a} in relation {j}"
            ),
            CyclicUnion { a, b } => write!(
                f,
                "consistency fails: no common linear extension ({a} and {b} lie on a cycle of the union), although no single pair conflicts"
            ),
            RelationCount { expected, found } => {
                write!(f, "expected {expected} relations, found {found}")
            }
            Injectivity { a, b } => write!(f, "map is not injective: {a} and {b} collide"),
            MapOutOfRange { element } => write!(f, "image of {element} is out of range"),
            MapLength { expected, found } => {
                write!(f, "map has length {found}, expected {expected}")
            }
            NotPreserved { relation, a, b } => {
                write!(f, "{relation} not preserved or reflected at ({a},{b})")
            }
        }
    }
}

impl std::error::Error for Violation {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid structure: {0}")]
    Invalid(#[from] Violation),
    #[error("not a lattice: elements {a} and {b} lack a {missing}")]
    NotALattice { a: usize, b: usize, missing: &'static str },
    #[error("{what} exceeds the configured bound {limit}")]
    BoundExceeded { what: String, limit: u128 },
    #[error("mode {mode} requires {expected} inputs")]
    ModeMismatch { mode: &'static str, expected: &'static str },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot generate a substructure from the empty set")]
    EmptyGenerators,
    #[error("no factor word exists for the given embedding")]
    NoFactor,
    #[error("no weak-triangle witness for the pair type at position {sigma}")]
    MissingSigma { sigma: usize },
    #[error("amalgam closure is not antisymmetric at ({a},{b})")]
    ClosureViolation { a: usize, b: usize },
    #[error("not found within bound: {0}")]
    NotFoundWithinBound(String),
    #[error("undecided within the resource budget: {0}")]
    Undecided(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
