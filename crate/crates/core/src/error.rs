use std::fmt;

use crate::stability::SheafType;

/// Input rejection codes surfaced by the problem-file parser and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputErrorCode {
    Json,
    Length,
    Polarization,
    UnknownId,
    DuplicateId,
    Rational,
    Divisor,
    Type,
}

impl InputErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputErrorCode::Json => "E_JSON",
            InputErrorCode::Length => "E_LENGTH",
            InputErrorCode::Polarization => "E_POLARIZATION",
            InputErrorCode::UnknownId => "E_UNKNOWN_ID",
            InputErrorCode::DuplicateId => "E_DUPLICATE_ID",
            InputErrorCode::Rational => "E_RATIONAL",
            InputErrorCode::Divisor => "E_DIVISOR",
            InputErrorCode::Type => "E_TYPE",
        }
    }
}

impl fmt::Display for InputErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The clause of the polytopal-decomposition axioms a validation failure violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionClause {
    /// The cells do not cover the torus.
    Cover,
    /// A face of a cell is missing from the decomposition.
    FaceClosure,
    /// Two cells meet in something other than a common face.
    FaceToFace,
    /// Cell volumes do not add up to the covolume of the period lattice.
    Volume,
    /// A cell is not cut out by integral normals with rational thresholds.
    Admissibility,
    /// A cell violates a structural expectation (e.g. disconnected normalization).
    Structure,
}

impl fmt::Display for DecompositionClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DecompositionClause::Cover => "cells must cover the torus",
            DecompositionClause::FaceClosure => "every face of a cell belongs to the decomposition",
            DecompositionClause::FaceToFace => "pairwise intersections are common faces",
            DecompositionClause::Volume => "maximal cell volumes sum to the lattice covolume",
            DecompositionClause::Admissibility => "cells are admissible polytopes",
            DecompositionClause::Structure => "cell structure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("invalid spanning forest: {0}")]
    InvalidForest(String),

    #[error("graph is disconnected; the Jacobian of a disconnected curve is not supported")]
    Disconnected,

    #[error("type {0:?} is not semistable")]
    NotSemistable(SheafType),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },

    #[error("cap exceeded: {0}")]
    Cap(String),

    #[error("invalid decomposition ({clause}): {detail}")]
    InvalidDecomposition {
        clause: DecompositionClause,
        detail: String,
    },

    #[error("refinement violated: {0}")]
    Refinement(String),

    #[error("check failed: {0}")]
    Check(String),

    #[error("{code}: {message}")]
    Input { code: InputErrorCode, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn input(code: InputErrorCode, message: impl Into<String>) -> Self {
        Error::Input {
            code,
            message: message.into(),
        }
    }

    /// Process exit status: 2 for a failed check, 3 for bad input, 4 for a cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Cap(_) => 4,
            Error::InvalidDecomposition { .. } | Error::Refinement(_) | Error::Check(_) | Error::NotSemistable(_) => 2,
            _ => 3,
        }
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Input { code, .. } => code.as_str(),
            Error::Cap(_) => "E_CAP",
            Error::UnknownVertex(_) | Error::UnknownEdge(_) => "E_UNKNOWN_ID",
            Error::DegreeMismatch { .. } => "E_DEGREE",
            Error::Io(_) => "E_IO",
            Error::Domain(_) | Error::InvalidForest(_) | Error::Disconnected => "E_DOMAIN",
            Error::NotSemistable(_) => "E_UNSTABLE",
            Error::InvalidDecomposition { .. } | Error::Refinement(_) | Error::Check(_) => "E_VALIDATION",
        }
    }

    pub(crate) fn invalid(clause: DecompositionClause, detail: impl Into<String>) -> Self {
        Error::InvalidDecomposition {
            clause,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
