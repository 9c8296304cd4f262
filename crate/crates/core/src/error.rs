use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("invalid family parameters: {0}")]
    InvalidFamilyParams(String),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error(
        "kernel dimension {kernel_dim} disagrees with component count {components} \
         (threshold {threshold:e})"
    )]
    KernelMismatch {
        kernel_dim: usize,
        components: usize,
        threshold: f64,
    },

    #[error("edge ({u}, {v}) is not in the graph")]
    EdgeNotInGraph { u: usize, v: usize },

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("barrier saturated: headroom minimum eigenvalue {headroom:e}")]
    BarrierSaturated { headroom: f64 },

    #[error("candidate pool is empty")]
    EmptyCandidatePool,

    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("exact enumeration needs n <= {max}, got n = {n}")]
    TooLargeForEnumeration { n: usize, max: usize },

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("timed out after {0:.1} s")]
    TimedOut(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from bad user input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedInput(_)
                | Error::IndexOutOfRange { .. }
                | Error::NonPositiveWeight { .. }
                | Error::DuplicateEdge { .. }
                | Error::SelfLoop(_)
                | Error::InvalidFamilyParams(_)
                | Error::InvalidEpsilon(_)
                | Error::InvalidProbability(_)
                | Error::InvalidConfig(_)
                | Error::EdgeNotInGraph { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
