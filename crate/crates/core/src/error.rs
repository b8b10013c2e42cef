use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("need at least {need} facet normals in dimension {dim}, got {got}")]
    TooFewNormals { dim: usize, need: usize, got: usize },
    #[error("facet normal {index} is zero")]
    ZeroNormal { index: usize },
    #[error("cone is not full-dimensional (no point pairs strictly positively with every normal)")]
    NotFullDimensional,
    #[error("cone is not pointed (facet normals span a space of dimension {rank} < {dim})")]
    NotPointed { rank: usize, dim: usize },
    #[error("no Calabi-Yau vector: the system <gamma, l_a> = -1 is inconsistent")]
    NoCalabiYauVector,
    #[error("Calabi-Yau vector is not unique: facet normals do not span")]
    AmbiguousGamma,
    #[error("no strictly feasible Reeb covector on the slice")]
    EmptyInterior,
    #[error("Reeb covector is not strictly feasible (minimum pairing {margin})")]
    InfeasibleReeb { margin: f64 },
    #[error("degenerate simplex in triangulation")]
    DegenerateSimplex,
    #[error("polytope has dimension {got} < {need}")]
    DegeneratePolytope { got: usize, need: usize },
    #[error("polytopes lie on different slice hyperplanes")]
    MixedSlices,
    #[error("piece {piece} is not contained in the slice polytope")]
    PieceOutsidePolytope { piece: usize },
    #[error("pieces do not sum to the slice polytope about the origin")]
    NotMinkowskiSum,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("finite-difference stencil leaves the feasible region (step {step})")]
    StepTooLarge { step: f64 },
    #[error("degenerate sampling box")]
    DegenerateBox,
    #[error("grid of {0} points is too large (slice dimension must be <= 3)")]
    GridTooLarge(usize),
}

impl Error {
    /// Variant name, for machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "Parse",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TooFewNormals { .. } => "TooFewNormals",
            Error::ZeroNormal { .. } => "ZeroNormal",
            Error::NotFullDimensional => "NotFullDimensional",
            Error::NotPointed { .. } => "NotPointed",
            Error::NoCalabiYauVector => "NoCalabiYauVector",
            Error::AmbiguousGamma => "AmbiguousGamma",
            Error::EmptyInterior => "EmptyInterior",
            Error::InfeasibleReeb { .. } => "InfeasibleReeb",
            Error::DegenerateSimplex => "DegenerateSimplex",
            Error::DegeneratePolytope { .. } => "DegeneratePolytope",
            Error::MixedSlices => "MixedSlices",
            Error::PieceOutsidePolytope { .. } => "PieceOutsidePolytope",
            Error::NotMinkowskiSum => "NotMinkowskiSum",
            Error::NumericalBreakdown(_) => "NumericalBreakdown",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::DegenerateBox => "DegenerateBox",
            Error::GridTooLarge(_) => "GridTooLarge",
        }
    }

    /// Errors that mean the input does not describe a valid cone.
    pub fn is_invalid_cone(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::DimensionMismatch { .. }
                | Error::TooFewNormals { .. }
                | Error::ZeroNormal { .. }
                | Error::NotFullDimensional
                | Error::NotPointed { .. }
        )
    }
}
