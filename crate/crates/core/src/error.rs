use thiserror::Error;

/// Errors across the fan, series, and extraction layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cone {cone} is not simplicial: its rays are linearly dependent")]
    NotSimplicial { cone: usize },
    #[error("fan is not complete: {reason}")]
    NotComplete { reason: String },
    #[error("extension vector {index} is not a box element of age <= 1: {reason}")]
    InvalidExtension { index: usize, reason: String },
    #[error("rays and extension vectors do not generate the ambient lattice over Z")]
    GenerationFailure,
    #[error("anticone data for extension {index} is inconsistent: {reason}")]
    InconsistentAnticone { index: usize, reason: String },
    #[error("p-basis is not an integral basis of the divisor class lattice: {reason}")]
    NonIntegralBasis { reason: String },
    #[error("p-basis row {index} violates a cone condition: {reason}")]
    BasisConeCondition { index: usize, reason: String },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("weak Fano condition violated: {reason}")]
    WeakFanoViolation { reason: String },
    #[error("exponent point is outside K: pairing {index} is not integral")]
    NotInK { index: usize },
    #[error("reduction of exponent point is not a box element")]
    NotABox,
    #[error("needed denominator {denom} does not divide the lattice scale {scale}")]
    ScaleTooSmall { denom: String, scale: String },
    #[error("enumeration grid of {terms} candidate points exceeds the term budget {budget}")]
    CapsExplosion { terms: u128, budget: u128 },
    #[error("series caps are incompatible")]
    IncompatibleCaps,
    #[error("series exponential requires a zero constant term")]
    NonzeroConstantTerm,
    #[error("monomial shift pushed exponent {exponent} below zero at variable {variable}")]
    NegativeExponentEscape { variable: usize, exponent: String },
    #[error("operator requires an integral lattice vector")]
    NonIntegralD,
    #[error("z^-1 coefficient contains a class of degree > 2; weak Fano expansion hypothesis violated")]
    NotWeakFanoBehavior,
    #[error("series depends on the section variable where the theory forbids it: {context}")]
    Y0DependenceDetected { context: String },
    #[error("bundle sector {sector:?} does not project to a fiber box element")]
    SectorProjectionFailure { sector: Vec<String> },
    #[error("input parse error: {0}")]
    Parse(String),
    #[error("validation failure: {invariant}: {detail}")]
    Validation { invariant: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
