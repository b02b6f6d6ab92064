//! A numerical laboratory for Li-Yau type gradient estimates.
//!
//! For a positive solution u of the heat equation Δu − u_t = 0 on a complete
//! manifold with Ricci curvature bounded below by −k, estimates of the form
//!
//! ```text
//! β(t)·‖∇ log u‖² − (log u)_t ≤ B(t)
//! ```
//!
//! hold uniformly over the manifold for suitable pairs (β, B). This crate
//! evaluates the classical constant-parameter bounds and their
//! time-dependent-parameter refinements ψ₁/ψ₂, optimizes over parameter
//! curves, and verifies everything against closed-form heat kernels and
//! simulated heat flows:
//!
//! * [`paramfun`] — parameter curves β(t), weight functions a(t), and their
//!   admissibility certificates.
//! * [`bounds`] — the estimate catalog: classical bounds, the ψ₁/ψ₂/σ/λ
//!   machinery with certified running extrema, the quadrature-form estimate,
//!   envelopes and dominance comparisons.
//! * [`varopt`] — upper bounds of the variational quantities φ₁/φ₂ by
//!   derivative-free search over constrained families.
//! * [`kernels`] — closed-form heat kernels on ℝⁿ and H³ and grid
//!   verification of every estimate against them.
//! * [`simulate`] — a radial Crank-Nicolson heat solver with an online
//!   estimate monitor.
//! * [`cli`] — the `liyau` command-line front end with reproducible JSON/CSV
//!   reports.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --example evaluate_bounds`.

// Guards are written `!(x > 0.0)` on purpose: the negation also rejects NaN,
// which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod paramfun;
mod quad;
pub mod report;
mod search;
pub mod simulate;
pub mod varopt;

pub use bounds::{
    beta_m, dominates, envelope, eval_classical, eval_qian_general, max_h, psi1, psi2,
    sigma_lambda, Estimate, EstimateId, QuadratureMode,
};
pub use error::{Error, Result};
pub use kernels::{kernel_logderivs, sharpness_ratio, verify_on_grid, ModelManifold};
pub use paramfun::{validate_beta, validate_weight, ParamFunction, WeightFunction};
pub use simulate::{monitor, run_radial_heat, InitialData, RadialGrid};
pub use varopt::{corollary_bound, phi_upper, Phi, PhiOptions};
