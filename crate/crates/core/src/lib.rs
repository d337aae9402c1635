//! Simulation engine for a laser-driven emitter ensemble coupled to a
//! waveguide with measurement-based feedback.
//!
//! The ensemble is treated as a single collective spin of length N/2. The
//! dynamics is resolved at three levels:
//!
//! - [`lindblad`]: exact finite-N master equation in the Dicke basis,
//!   including the Liouvillian spectrum, steady states and spin squeezing;
//! - [`meanfield`]: closed equations for the magnetization in the
//!   thermodynamic limit, phase classification (time crystal vs. stationary);
//! - [`fluctuations`]: Gaussian dynamics of quantum fluctuation operators,
//!   covariance propagation and the squeezing parameter ξ.
//!
//! All rates are expressed in units of the rescaled collective decay rate Γ;
//! the single-emitter rate γ = Γ/N is applied internally.

pub mod error;
pub mod fit;
pub mod fluctuations;
pub mod lindblad;
pub mod meanfield;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod spin;

pub use error::Error;
pub use params::SystemParams;

/// Shorthand used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
