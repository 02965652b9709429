//! Principal eigenvalues of the Pucci sup-operator on explicit plane domains.
//!
//! The crate has three layers:
//!
//! - [`pucci`]: exact algebra of the extremal operator M⁺ on symmetric 2×2
//!   matrices (spectral form, Bellman form, the cone solution).
//! - [`closed_form`]: the explicit domains Ω^ω_γ and their sheared images,
//!   piecewise eigenfunctions with analytic gradients and Hessians, the
//!   sign-changing periodic extension, areas and the area derivative in γ.
//! - [`grid_fd`]: an independent numerical route to the principal eigenvalue
//!   via a monotone wide-stencil discretization of M⁺, Howard policy
//!   iteration for the Dirichlet solves, and inverse power iteration.
//!
//! [`verify`] ties the two routes together (residual sweeps, supersolution
//! certificates, parameter sweeps), and [`cli`] exposes everything as
//! deterministic CSV/JSON-producing subcommands.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so
// that NaN fails them too; the rewrite clippy suggests would let NaN
// slip through silently.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod grid_fd;
pub mod pucci;
pub mod quad;
pub mod report;
pub mod verify;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
