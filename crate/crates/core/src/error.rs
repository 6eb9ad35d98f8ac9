use core::fmt;

/// Errors raised by the planning core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The graph has no agents.
    EmptyGraph,
    /// A weight is negative, non-finite, or sits on the diagonal.
    InvalidWeight { row: usize, col: usize, value: f64 },
    /// Two inputs disagree on the number of agents.
    DimensionMismatch { expected: usize, found: usize },
    /// A cluster's induced subgraph has no directed spanning tree.
    NoSpanningTree { cluster: usize },
    /// The left null space of a cluster Laplacian is not one-dimensional.
    SingularStructure { cluster: usize },
    /// A cluster list does not partition the agents.
    InvalidPartition,
    /// A numerical routine produced NaN or infinity.
    NonFinite,
    /// An opinion left `[0, 1]` by more than round-off.
    OpinionOutOfRange { agent: usize, value: f64 },
    /// A control entry is outside `[0, cap]`.
    InvalidControl { agent: usize, value: f64 },
    /// A scalar parameter is outside its domain.
    InvalidParameter(&'static str),
    /// The total budget is not an integer number of cap-sized units.
    BudgetNotDiscrete { budget: f64, cap: f64 },
    /// The planner needs a single weakly connected network.
    NotConnected { clusters: usize },
    /// The planner regime and the campaign spacing do not fit together.
    RegimeMismatch(&'static str),
    /// Exhaustive search would visit more candidates than allowed.
    SearchSpaceTooLarge { candidates: Option<u128>, limit: u128 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyGraph => write!(f, "graph has no agents"),
            Error::InvalidWeight { row, col, value } => write!(
                f,
                "invalid weight a[{}][{}] = {} (weights must be finite, nonnegative, off-diagonal)",
                row + 1,
                col + 1,
                value
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} agents, found {found}")
            }
            Error::NoSpanningTree { cluster } => write!(
                f,
                "cluster {} has no directed spanning tree (zero eigenvalue is not simple)",
                cluster + 1
            ),
            Error::SingularStructure { cluster } => write!(
                f,
                "left null space of cluster {} Laplacian is not one-dimensional",
                cluster + 1
            ),
            Error::InvalidPartition => write!(f, "clusters do not partition the agent set"),
            Error::NonFinite => write!(f, "numerical routine produced a non-finite value"),
            Error::OpinionOutOfRange { agent, value } => {
                write!(f, "opinion of agent {} left [0, 1]: {}", agent + 1, value)
            }
            Error::InvalidControl { agent, value } => {
                write!(f, "control of agent {} outside [0, cap]: {}", agent + 1, value)
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::BudgetNotDiscrete { budget, cap } => {
                write!(f, "budget {budget} is not a whole number of units of {cap}")
            }
            Error::NotConnected { clusters } => write!(
                f,
                "network splits into {clusters} clusters; this planner needs a weakly connected graph"
            ),
            Error::RegimeMismatch(what) => write!(f, "regime mismatch: {what}"),
            Error::SearchSpaceTooLarge { candidates, limit } => match candidates {
                Some(c) => write!(f, "search space of {c} candidates exceeds node limit {limit}"),
                None => write!(f, "search space overflows u128 (node limit {limit})"),
            },
        }
    }
}

impl core::error::Error for Error {}
