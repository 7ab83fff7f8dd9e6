//! Driven two-level systems with a band-touching point.
//!
//! The crate is organised bottom-up:
//!
//! - [`matrix`]: 2×2 Hermitian matrices and their gauge-fixed eigensystems.
//! - [`models`]: the Hamiltonian families, `H(λ)` and `∂λH`.
//! - [`fis`]: fidelity susceptibility, its closed forms and peak search.
//! - [`dynamics`]: driving protocols, Crank–Nicolson propagation, the
//!   reference integrators and the split-evolution phase analysis.
//! - [`sweep`]: parallel parameter sweeps and their tables.
//!
//! ```
//! use bandtouch::{fis, ModelSpec};
//!
//! let model = ModelSpec::gl(2, 0.5);
//! assert_eq!(fis::chi_zero_limit(&model).unwrap(), 1.0);
//! ```

pub mod dynamics;
pub mod error;
pub mod fis;
mod io;
pub mod matrix;
pub mod models;
pub mod sweep;

pub use dynamics::{Protocol, ProtocolKind, Trajectory};
pub use error::{Error, Result};
pub use matrix::{EigenSystem, HermitianMatrix2, Level, Spinor};
pub use models::ModelSpec;
pub use num_complex::Complex64;
