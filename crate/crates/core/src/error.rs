//! Error types shared across the crate.

use thiserror::Error;

/// Errors from exact form algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormsError {
    /// An integer computation left the 64/128-bit range. Never silently wrapped.
    #[error("integer overflow in {context}")]
    Overflow { context: &'static str },
    /// Input matrix is singular where an invertible one is required.
    #[error("singular matrix: determinant is zero")]
    SingularMatrix,
    /// A matrix that must lie in SL2(Z) has determinant != 1.
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: i64 },
    /// Operation requires nonzero discriminant.
    #[error("form has zero discriminant")]
    ZeroDiscriminant,
    /// Operation requires zero discriminant.
    #[error("form has nonzero discriminant {disc}")]
    NonzeroDiscriminant { disc: i128 },
    /// Dual-lattice operation applied to a form with 3 ∤ b or 3 ∤ c.
    #[error("form ({a},{b},{c},{d}) is not in the dual lattice (3|b, 3|c required)")]
    NotInDualLattice { a: i64, b: i64, c: i64, d: i64 },
    /// Violated internal invariant; indicates a bug, surfaced instead of panicking.
    #[error("internal invariant violated: {what}")]
    Internal { what: &'static str },
}

/// Errors from class enumeration.
#[derive(Debug, Error)]
pub enum EnumError {
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error("max |disc| must be >= 1, got {0}")]
    BadRange(i64),
    #[error("brute-force oracle limited to X <= {limit}, got {got}")]
    OracleScale { limit: i64, got: i64 },
    #[error("resource ceiling exceeded; progress checkpointed through |disc| <= {completed}")]
    ResourceCeiling { completed: i64 },
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt checkpoint {path}: {what}")]
    CorruptCheckpoint { path: String, what: String },
}

/// Errors from numerical evaluation of automorphic data.
#[derive(Debug, Clone, Error)]
pub enum EvalError {
    #[error("argument outside supported domain: {what}")]
    Domain { what: String },
    #[error("point not reduced to the fundamental domain (x={x}, y={y})")]
    NotReduced { x: f64, y: f64 },
    #[error("coefficient table too short: need rho(n) through n = {needed}, have {have}")]
    InsufficientCoefficients { needed: usize, have: usize },
    #[error("fundamental domain reduction did not terminate")]
    ReductionStuck,
    #[error("half-plane convention self-test failed")]
    ConventionSelfTest,
    #[error("root finding failed: {what}")]
    Roots { what: String },
}

/// Errors from spectral data ingestion.
#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("malformed header: {what}")]
    MalformedHeader { what: String },
    #[error("unknown key `{key}` in coefficient file")]
    UnknownKey { key: String },
    #[error("coefficient indices not strictly increasing from 1 (line {line})")]
    NonMonotoneIndices { line: usize },
    #[error("bad numeric value on line {line}: {what}")]
    BadValue { line: usize, what: String },
    #[error("normalization violated: rho(1) = {rho1}, expected 1")]
    NotNormalized { rho1: f64 },
    #[error("Hecke relations violated: max residual {violation:.3e} exceeds tolerance {tolerance:.3e}")]
    HeckeViolation { violation: f64, tolerance: f64 },
    #[error("coefficient bound violated at n = {n}: |rho(n)| = {value:.6} exceeds the Kim-Sarnak screen {bound:.6}")]
    CoefficientBound { n: usize, value: f64, bound: f64 },
    #[error("offline mode with empty cache for `{label}`; run without --offline once, or use an Eisenstein or constant test function")]
    OfflineNoCache { label: String },
    #[error("network: {0}")]
    Network(String),
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
}
