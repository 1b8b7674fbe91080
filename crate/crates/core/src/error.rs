use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown type label `{0}`")]
    UnknownType(String),

    #[error("color {color} out of range for type `{ty}` (q = {q})")]
    ColorOutOfRange { ty: String, color: u32, q: u32 },

    #[error("rank {rank} exceeds the enumeration bound {bound}")]
    RankTooLarge { rank: usize, bound: usize },

    #[error("ball exceeds the size limit of {limit} chambers")]
    BallTooLarge { limit: usize },

    #[error("residue of type {0} is not a panel")]
    NotAPanel(String),

    #[error("set of chambers is not panel-closed: {0}")]
    InvalidPanelClosedSet(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("closing square found non-commuting types `{i}` and `{j}`")]
    NonCommutingTypes { i: String, j: String },

    #[error("tree-wall of rung type `{0}` has unboundedly many panels")]
    InfiniteTreeWall(String),

    #[error("no path between the given edges inside the ball")]
    PathEscapesBall,

    #[error("panel-closed closure escapes the radius-{0} bounding ball")]
    EscapesBound(u32),

    #[error("group enumeration exceeds the bound of {0} elements")]
    GroupTooLarge(usize),

    #[error("claimed subgroup contains an element outside the ambient group")]
    NotASubgroup,

    #[error("degree mismatch: expected {expected}, got {got} ({context})")]
    DegreeMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("inconsistent portrait: {0}")]
    InconsistentPortrait(String),

    #[error("residues have different types")]
    TypeMismatch,

    #[error("chambers {0} and {1} are not harmonious (type `{2}` colors lie in different orbits)")]
    NotHarmonious(String, String, String),

    #[error("partial map is not distance-preserving: {0}")]
    NotDistancePreserving(String),

    #[error("two parallel panels inside the set force different local actions at {0}")]
    InconsistentLocalActions(String),

    #[error("no element of the local group at type `{0}` satisfies the color constraints")]
    NoValidLocalAction(String),

    #[error("portrait does not fix the tree-wall of the panel pointwise")]
    TreeWallNotFixed,

    #[error("not a permutation: {0}")]
    NotAPermutation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
