use crate::group::GroupId;

/// Everything that can go wrong in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(GroupId, GroupId),

    #[error("point has {got} coordinates but group {group} needs {want}")]
    Dimension { group: GroupId, got: usize, want: usize },

    #[error("empty shape where a non-empty one is required: {0}")]
    EmptyShape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration guard exceeded: {what} needs about {needed} candidates, limit is {limit}")]
    Guard { what: String, needed: String, limit: u128 },

    #[error("marker depth cap of {cap} rounds reached while resolving {what}")]
    DepthCap { cap: usize, what: String },

    #[error("window mismatch: {0}")]
    Window(String),

    #[error("config error in `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { field: field.into(), msg: msg.into() }
    }

    /// True for guard and depth-cap failures, which the CLI maps to exit code 3.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. } | Error::DepthCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
