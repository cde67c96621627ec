//! 2D acoustic wave propagation on uniform grids.
//!
//! The scheme advances the displacement field explicitly in time. Material
//! properties live in grid cells, so sharp interfaces between dissimilar
//! media fall on node lines and the update stencil absorbs the jump through
//! harmonic coefficient averaging at the cross points. Outgoing waves can be
//! absorbed by perfectly matched layers appended around the domain, in a
//! first- or second-order formulation.
//!
//! Module map:
//! * [`grid`]: uniform grid, cell-centered materials, cross-point coefficients
//! * [`kernel`]: explicit time steps, boundary application, CFL check
//! * [`pml`]: damping profiles, absorbing-layer steps, interior coupling
//! * [`sources`]: analytic solutions and forcing terms
//! * [`analysis`]: norms, errors, convergence orders, grid restriction
//! * [`config`], [`snapshot`], [`runner`]: experiment plumbing

pub mod analysis;
pub mod config;
pub mod grid;
pub mod kernel;
pub mod pml;
pub mod runner;
pub mod snapshot;
pub mod sources;

/// Unified error type for the whole crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// One message per violated constraint, all collected before failing.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("material error: {0}")]
    Material(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A step produced a non-finite value; `step` is the level that failed.
    #[error("solution diverged at step {step}")]
    Diverged { step: u64 },
    #[error("{path}: {reason}")]
    Snapshot { path: String, reason: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Convenience constructor for single-message config errors.
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }
}

pub type Result<T> = std::result::Result<T, Error>;
