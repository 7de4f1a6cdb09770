use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// Which end of the interval a boundary condition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Endpoint {
    Start,
    End,
}

impl core::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Endpoint::Start => f.write_str("t=0"),
            Endpoint::End => f.write_str("t=1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("eigen-phase {phase} lies within {margin:e} of the branch cut at -1")]
    BranchFailure { phase: f64, margin: f64 },
    #[error("boundary violation at {endpoint}: defect {defect:e}")]
    BoundaryViolation { endpoint: Endpoint, defect: f64 },
    #[error("glue fibres disagree (defect {defect:e})")]
    GlueMismatch { defect: f64 },
    #[error("resolution {0} must be even")]
    OddResolution(usize),
    #[error("matrix is not in H({n},{j}) (defect {defect:e})")]
    NotInHnj { n: usize, j: usize, defect: f64 },
    #[error("eigen-phase unwrapping is ambiguous at sample {index} (matching distance {distance})")]
    UnwrapFailure { index: usize, distance: f64 },
    #[error("determinant phase jump {max_jump} violates the sampling limit")]
    NyquistViolation { max_jump: f64 },
    #[error("determinant vanishes at sample {index}")]
    DegenerateDeterminant { index: usize },
    #[error("K1 classes differ: {left:?} vs {right:?}")]
    ClassMismatch { left: Vec<i64>, right: Vec<i64> },
    #[error("fibre ranks disagree ({min} vs {max})")]
    RankJump { min: usize, max: usize },
    #[error("{m} and {n} are not coprime")]
    NotCoprime { m: i64, n: i64 },
    #[error("compression is not a unitary of the corner (defect {defect:e})")]
    NotCornerUnitary { defect: f64 },
    #[error("projection {0} is not full")]
    NotFull(&'static str),
    #[error("precondition {condition} violated (defect {defect:e})")]
    PreconditionViolation { condition: &'static str, defect: f64 },
    #[error("no continuous rank-one subprojection: {0}")]
    SubprojectionFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("stage {stage}: {source}")]
    Stage { stage: String, source: Box<Error> },
}

impl Error {
    /// Wraps the error with the name of the pipeline stage that raised it.
    pub fn in_stage(self, stage: &str) -> Error {
        Error::Stage { stage: String::from(stage), source: Box::new(self) }
    }

    /// Innermost error, with stage tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
