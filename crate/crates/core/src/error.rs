use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse word `{text}`: {reason}")]
    WordSyntax { text: String, reason: String },

    #[error("cyclic shift by {k} is out of range for a word of length {len}")]
    ShiftOutOfRange { k: i64, len: usize },

    #[error("element {elem} does not belong to {group}")]
    Foreign { elem: String, group: String },

    #[error("{group} does not provide {capability}")]
    Capability { group: String, capability: String },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("invalid monomorphism: {0}")]
    InvalidMonomorphism(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid graph of groups: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("the two elements do not commute")]
    NotCommuting,

    #[error("degenerate amalgam: {0}")]
    Nontriviality(String),

    #[error("graph of groups has a nontrivial reduced circuit")]
    NotSansCircuit,

    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("self-check failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn capability(group: impl Into<String>, capability: impl Into<String>) -> Self {
        Error::Capability { group: group.into(), capability: capability.into() }
    }
}

/// Three-valued answer of a bounded decision procedure.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<W> {
    Yes(W),
    No,
    Unknown(String),
}

impl<W> Verdict<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Yes(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Yes(w) => Verdict::Yes(f(w)),
            Verdict::No => Verdict::No,
            Verdict::Unknown(r) => Verdict::Unknown(r),
        }
    }
}
