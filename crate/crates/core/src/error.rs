use thiserror::Error;

use crate::symbols::Word;

/// Which clause of a resolution failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolutionClause {
    EmptyResolution,
    FiniteBlurredSet,
    InfiniteIntersection,
    UnionNotCofinite,
}

impl std::fmt::Display for ResolutionClause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ResolutionClause::EmptyResolution => "resolution has no blurred sets",
            ResolutionClause::FiniteBlurredSet => "blurred set is finite",
            ResolutionClause::InfiniteIntersection => "two blurred sets have infinite intersection",
            ResolutionClause::UnionNotCofinite => "union of blurred sets is not cofinite in the alphabet",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("word {0} is not allowed")]
    WordNotAllowed(Word),
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("invalid resolution ({clause}): {detail}")]
    InvalidResolution {
        clause: ResolutionClause,
        detail: String,
    },
    #[error("undecidable at bound: {0}")]
    UndecidableAtBound(String),
    #[error("family not convergent: {0}")]
    FamilyNotConvergent(String),
    #[error("no witness found: {0}")]
    NoWitnessFound(String),
    #[error("empty cylinder [{0}]")]
    EmptyCylinder(Word),
    #[error("tail rule missing: {0}")]
    TailRuleMissing(String),
    #[error("rival extension leaves the sandwich: {0}")]
    RivalNotInSandwich(String),
    #[error("truncation has an empty language")]
    EmptyTruncation,
    #[error("graph has no cycle")]
    AcyclicGraph,
    #[error("potential is not locally constant: {0}")]
    NotLocallyConstant(String),
    #[error("shift is not class-decomposable")]
    NotClassDecomposable,
    #[error("certificate is not exact")]
    CertificateNotExact,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("measure is not invariant")]
    NotInvariant,
    #[error("invalid class rule: {0}")]
    InvalidClassRule(String),
    #[error("no connecting word of length <= {bound} from {u} to {w}")]
    NoConnectionWithinBound { u: Word, w: Word, bound: usize },
    #[error("orbits do not share a class")]
    OrbitsNotCoclass,
    #[error("unknown demo `{0}`")]
    UnknownDemo(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code used in JSON error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::WordNotAllowed(_) => "word-not-allowed",
            Error::TruncationInsufficient(_) => "truncation-insufficient",
            Error::InvalidResolution { .. } => "invalid-resolution",
            Error::UndecidableAtBound(_) => "undecidable-at-bound",
            Error::FamilyNotConvergent(_) => "family-not-convergent",
            Error::NoWitnessFound(_) => "no-witness-found",
            Error::EmptyCylinder(_) => "empty-cylinder",
            Error::TailRuleMissing(_) => "tail-rule-missing",
            Error::RivalNotInSandwich(_) => "rival-not-in-sandwich",
            Error::EmptyTruncation => "empty-truncation",
            Error::AcyclicGraph => "acyclic-graph",
            Error::NotLocallyConstant(_) => "not-locally-constant",
            Error::NotClassDecomposable => "not-class-decomposable",
            Error::CertificateNotExact => "certificate-not-exact",
            Error::HypothesisViolated(_) => "hypothesis-violated",
            Error::NotInvariant => "not-invariant",
            Error::InvalidClassRule(_) => "invalid-class-rule",
            Error::NoConnectionWithinBound { .. } => "no-connection-within-bound",
            Error::OrbitsNotCoclass => "orbits-not-coclass",
            Error::UnknownDemo(_) => "unknown-demo",
            Error::InvalidInput(_) => "malformed-config",
            Error::Internal(_) => "internal",
        }
    }

    /// Process exit code: 1 internal, 2 invalid input, 3 inexact certificate.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CertificateNotExact => 3,
            Error::Internal(_) => 1,
            Error::WordNotAllowed(_)
            | Error::InvalidResolution { .. }
            | Error::InvalidClassRule(_)
            | Error::InvalidInput(_)
            | Error::TailRuleMissing(_)
            | Error::UnknownDemo(_)
            | Error::OrbitsNotCoclass
            | Error::RivalNotInSandwich(_)
            | Error::NotLocallyConstant(_)
            | Error::NotClassDecomposable
            | Error::NotInvariant
            | Error::EmptyCylinder(_)
            | Error::EmptyTruncation => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
