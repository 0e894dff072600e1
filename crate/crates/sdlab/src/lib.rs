//! # sdlab
//!
//! A numerical laboratory for quantum state discrimination with
//! post-measurement information.
//!
//! A string `x` is encoded in one of several mutually unbiased bases and Bob
//! must predict `f(x)`; the basis label arrives only after his measurement
//! (and, possibly, after a quantum memory bound applies). The crate builds
//! the discrimination instances, evaluates the optimal strategies on both
//! sides of that information gap, and decides how much quantum memory perfect
//! prediction requires:
//!
//! - [`numkit`] — self-contained dense complex linear algebra (Hermitian
//!   eigendecomposition, SVD, trace norm, Kronecker products, PSD checks).
//! - [`ensembles`] — qubit MUB constructions, Boolean truth tables, priors,
//!   and the encoded state ensembles with their support projectors.
//! - [`optimize`] — a small projected-gradient solver for POVM discrimination
//!   SDPs plus an exact verifier for hand-built dual certificates.
//! - [`star`] — discrimination *without* the basis announcement: Helstrom
//!   two-state optimum, the universal balanced-function bound, and closed-form
//!   AND/XOR optima.
//! - [`pistar`] — zero-memory discrimination *with* the announcement: the
//!   square-root-type measurement lower bound, the optimal AND measurement
//!   with its dual certificate, and the perfect Bell-basis XOR strategies.
//! - [`memory`] — commutant algebra block decomposition: minimal quantum
//!   memory for perfect prediction, the one-qubit two-basis protocol, and the
//!   adversarial three-basis construction that forces full storage.
//! - [`cli`] — reproducible command-line front end emitting JSON/CSV tables.
//!
//! Run `cargo run --example <name>` for worked scenarios, or the `sdlab`
//! binary for the subcommand interface.

use thiserror::Error;

pub mod numkit;

pub mod ensembles;
pub mod optimize;

pub mod memory;
pub mod pistar;
pub mod star;

pub mod cli;

pub use numkit::CMatrix;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (symmetry defect {defect:.3e} exceeds {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("{algorithm} failed to converge within {limit} iterations")]
    NoConvergence { algorithm: &'static str, limit: usize },

    #[error("tensor product result {rows}x{cols} exceeds the dimension cap {cap}")]
    DimensionOverflow { rows: usize, cols: usize, cap: usize },

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch { context: &'static str, left: usize, right: usize },

    #[error("size limit exceeded: {context} ({value} > {limit})")]
    SizeLimit { context: &'static str, value: usize, limit: usize },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("bad truth table: {0}")]
    BadTable(String),

    #[error("output label {label} has an empty preimage")]
    EmptyPreimage { label: usize },

    #[error("function is not balanced")]
    NotBalanced,

    #[error("bases are not mutually unbiased")]
    NotMub,

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not a projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("input length {n} must be even")]
    OddLength { n: usize },

    #[error("input length {n} must be odd")]
    EvenLength { n: usize },

    #[error("numerical rank ambiguity: {0}")]
    NumericalRankAmbiguity(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Dimension cap for all dense operations.
///
/// Defaults to 1024; override with the `SDLAB_MAX_DIM` environment variable
/// (read once per process).
pub fn max_dim() -> usize {
    use std::sync::OnceLock;
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SDLAB_MAX_DIM")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(1024)
    })
}
