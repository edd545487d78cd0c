use thiserror::Error;

/// Violations detected while validating a decoded instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("agent count must be a positive even number, got {0}")]
    OddAgentCount(usize),
    #[error("size mismatch in {what}: expected {expected}, found {found}")]
    SizeMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("negative value {value} at {matrix}[{row}][{col}]")]
    NegativeValue {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: i64,
    },
    #[error("value {value} at {matrix}[{row}][{col}] exceeds the cap {cap}")]
    ValueAboveBig {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: i64,
        cap: u64,
    },
    #[error("agent {agent} has nonzero self value {value}")]
    NonzeroDiagonal { agent: usize, value: i64 },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
}

/// Violations detected while building an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("expected {expected} triples, found {found}")]
    WrongTripleCount { expected: usize, found: usize },
    #[error("agent {0} is out of range")]
    AgentOutOfRange(usize),
    #[error("room {0} is out of range")]
    RoomOutOfRange(usize),
    #[error("agent {0} appears more than once")]
    DuplicateAgent(usize),
    #[error("room {0} appears more than once")]
    DuplicateRoom(usize),
    #[error("unknown agent label {0:?}")]
    UnknownAgent(String),
    #[error("unknown room label {0:?}")]
    UnknownRoom(String),
    #[error("assignment is for {found} agents, instance has {expected}")]
    InstanceMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("invalid assignment: {0}")]
    Assignment(#[from] AssignmentError),
    #[error("agents {0} and {1} share a room and cannot swap")]
    SameRoomSwap(usize, usize),
    #[error("malformed trading cycle {0:?}")]
    MalformedCycle(Vec<usize>),
    #[error("instance with {agents} agents exceeds the enumeration cap of {cap}")]
    InstanceTooLarge { agents: usize, cap: usize },
    #[error("mechanism requires binary symmetric valuations")]
    NotBinarySymmetric,
    #[error("invalid agent order: {0}")]
    InvalidOrder(String),
    #[error("search space of {size} misreports exceeds the budget of {budget}")]
    SpaceTooLarge { size: u128, budget: u128 },
    #[error("mechanism did not terminate: {0}")]
    NonTerminating(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no assignment satisfies {0}")]
    NoStableAssignment(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable variant name, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Instance(e) => match e {
                InstanceError::OddAgentCount(_) => "OddAgentCount",
                InstanceError::SizeMismatch { .. } => "SizeMismatch",
                InstanceError::NegativeValue { .. } => "NegativeValue",
                InstanceError::ValueAboveBig { .. } => "ValueAboveBig",
                InstanceError::NonzeroDiagonal { .. } => "NonzeroDiagonal",
                InstanceError::DuplicateLabel(_) => "DuplicateLabel",
            },
            Error::Assignment(_) => "InvalidAssignment",
            Error::SameRoomSwap(..) => "SameRoomSwap",
            Error::MalformedCycle(_) => "MalformedCycle",
            Error::InstanceTooLarge { .. } => "InstanceTooLarge",
            Error::NotBinarySymmetric => "NotBinarySymmetric",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::SpaceTooLarge { .. } => "SpaceTooLarge",
            Error::NonTerminating(_) => "NonTerminating",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NoStableAssignment(_) => "NoStableAssignment",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
