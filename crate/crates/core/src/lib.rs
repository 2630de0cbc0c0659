//! Exact finite-set kernel for the iterated wreath products `Theta_n` of the
//! simplex category: objects are planar trees, morphisms carry a simplex-map
//! spine plus componentwise tree maps, and presheaves are tabulated on finite
//! size-closed windows of objects.
//!
//! Everything here is computed exactly over finite sets.  Operations that
//! would need objects outside the ambient window fail with
//! [`Error::WindowExhausted`] instead of approximating.

pub mod cells;
pub mod delta;
pub mod fibrancy;
pub mod homology;
pub mod intertwine;
pub mod ncat;
pub mod presheaf;
pub mod qpaths;
pub mod theta;
pub mod window;

use thiserror::Error;

/// Errors shared across the kernel.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("structural mismatch: {0}")]
    StructuralMismatch(String),
    #[error("window exhausted: needs {0}")]
    WindowExhausted(String),
    #[error("presheaf is not window-presented: {0}")]
    NotWindowPresented(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
