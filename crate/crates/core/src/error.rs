use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("1/2 does not exist in characteristic 2")]
    CharTwoHalf,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("operation not supported over this field")]
    UnsupportedField,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("cannot parse field constant `{0}`")]
    BadConstant(String),
    #[error("circuit contains a cycle through gate g{0}")]
    CyclicCircuit(usize),
    #[error("gate g{0} has the wrong number of arguments")]
    BadArity(usize),
    #[error("gate g{0} is not reachable from any output")]
    UnreachableGate(usize),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unknown gate g{0}")]
    UnknownGate(usize),
    #[error("undeclared variable `{0}`")]
    UnknownVariable(String),
    #[error("circuit has no outputs")]
    NoOutput,
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("circuit computes a constant")]
    ConstantCircuit,
    #[error("instance too large for brute force ({0})")]
    TooLarge(String),
    #[error("circuit is not a formula")]
    NotAFormula,
    #[error("circuit is not weakly skew")]
    NotWeaklySkew,
    #[error("construction needs a single-output circuit")]
    MultipleOutputs,
    #[error("field too small for randomized identity testing")]
    FieldTooSmall,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("syntax error at {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("dimension {dim} exceeds bound {bound}")]
    BoundViolation { dim: usize, bound: usize },
}
