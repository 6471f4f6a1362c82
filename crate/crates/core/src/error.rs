use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("state `{0}` has no outgoing edges")]
    Sink(String),

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("state set is not closed under followers: `{0}` has a follower outside it")]
    NotFollowerClosed(String),

    #[error("isomorphism search is limited to {limit} states, got {actual}")]
    SizeGuard { limit: usize, actual: usize },

    #[error("not a graph homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("not right-resolving: {0}")]
    NotRightResolving(String),

    #[error("mismatched graphs: {0}")]
    Mismatch(String),

    #[error("invalid edge order: {0}")]
    InvalidOrder(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition is not a congruence: {0}")]
    NotCongruence(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("right-resolver is not synchronizing")]
    NotSynchronizing,

    #[error("stability relation is not transitive: {0}")]
    NotTransitive(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search budget of {budget} exhausted without a result")]
    BudgetExhausted { budget: u64 },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
