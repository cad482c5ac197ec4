//! Rank-1 lattice point sets, trigonometric kernels, and numerical
//! verification of sampling discretization.
//!
//! The crate builds the pieces needed to study discretized convolution of
//! multivariate trigonometric polynomials on rank-1 lattices:
//!
//! * [`freqsets`] — integer frequency sets (rectangles, hyperbolic crosses,
//!   dyadic blocks) that index the polynomial spaces,
//! * [`trigpoly`] — sparse trigonometric polynomials with exact convolution
//!   and `L_p` norms,
//! * [`kernels`] — Dirichlet, Fejér, de la Vallée Poussin and hyperbolic-cross
//!   kernels, as coefficient maps and closed-form evaluators,
//! * [`lattices`] — Fibonacci and Korobov point sets, their dual lattices,
//!   exactness scans, and the Korobov generating-vector search,
//! * [`discretize`] — cubature, discretized convolution, shift operators,
//!   operator norms, and sampling-discretization ratios,
//! * [`verify`] — independent brute-force oracles and the acceptance-suite
//!   runner,
//! * [`cli`] — the command-line front end.
//!
//! Everything is deterministic: random instances come from a seeded ChaCha8
//! generator and every report records the seed it ran with.
//!
//! The `examples/` directory has one runnable demo per capability; start with
//! `cargo run --example fibonacci_lattice`.

pub mod cli;
pub mod discretize;
pub mod freqsets;
pub mod kernels;
pub mod lattices;
pub mod trigpoly;
pub mod verify;

pub use freqsets::{FreqIndex, FreqSet};
pub use kernels::KernelId;
pub use lattices::{DualLattice, PointSet};
pub use trigpoly::{GridSpec, TrigPoly};

/// Identifier of the pseudo-random generator used for all random instances,
/// recorded in every report.
pub const PRNG_ALGORITHM: &str = "chacha8";

/// Crate version, recorded in report headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Errors produced by construction and verification routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("integer overflow computing {0}")]
    Overflow(String),
    #[error("generating-vector search failed: {0}")]
    SearchFailed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
