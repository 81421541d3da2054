//! Simulation and design-optimization toolkit for ensemble-based
//! microwave-optical photon converters.
//!
//! A three-level color-center ensemble inside overlapping optical and
//! microwave cavities mediates three-wave mixing between a microwave signal,
//! an optical signal, and an optical pump. This crate computes the
//! linear-response susceptibilities of the ensemble, the bidirectional
//! conversion efficiency and its internal/external decomposition, the
//! input-referred added noise, pump-dependent loss budgets, and the
//! dispersion-contour structure of the hybridized system. An independent
//! steady-state coupled-mode solver ([`oracle`]) validates the closed-form
//! response.
//!
//! Module layout:
//!
//! - [`model`] — domain types and the ensemble susceptibilities ξ_a, ξ_c, ξ_ac
//! - [`response`] — efficiency, cooperativity, matching, added noise
//! - [`ensemble`] — Gauss–Hermite discretization of inhomogeneous broadening,
//!   Monte Carlo and semi-analytic validation evaluators
//! - [`budget`] — coupling rates from dipoles, pump leakage, quasiparticle
//!   loss, loss-budget assembly
//! - [`system`] — full converter description and one-call evaluation
//! - [`explore`] — sweeps, contour tracing, matched-design solving, local
//!   optimization
//! - [`oracle`] — dense steady-state solve of the coupled-mode equations and
//!   transient ring-up cross-check
//!
//! Unit convention: all rates and detunings are ordinary frequencies in Hz,
//! exactly as quoted in device tables. Every response formula is homogeneous
//! in rate units, so no 2π factors appear internally; the few
//! absolute-frequency expressions (thermal occupation, coupling rates from
//! dipoles, photon energies) convert explicitly through [`constants`].

pub mod budget;
pub mod constants;
pub mod ensemble;
pub mod explore;
pub mod model;
pub mod oracle;
pub mod response;
pub mod system;

pub use model::{
    susceptibilities, CavityMode, CenterClass, OperatingPoint, Rate, SusceptibilityTriplet,
};
pub use response::{LossBudget, ResponseReport};
pub use system::SystemSpec;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An input violates a physical or mathematical precondition.
    /// `path` names the offending parameter so callers can point at it.
    #[error("domain error at `{path}`: {message}")]
    Domain { path: String, message: String },

    /// A model or task configuration is inconsistent or names an unknown
    /// model identifier.
    #[error("configuration error: {0}")]
    Config(String),

    /// The steady-state linear system could not be factorized.
    #[error("singular coupled-mode system (diagonal ratio ≈ {cond:.3e})")]
    Singular { cond: f64 },

    /// A solve has no admissible solution (e.g. a matched design would
    /// require a negative external coupling).
    #[error("no solution: {0}")]
    NoSolution(String),
}

impl Error {
    pub(crate) fn domain(path: &str, message: impl Into<String>) -> Self {
        Error::Domain {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
