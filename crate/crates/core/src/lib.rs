//! Two-patch SIR model with commuters and permanently resident populations.
//!
//! The model couples two territories through commuters while a permanently
//! resident part of each population never moves. This crate computes the
//! epidemic threshold of the coupled system exactly (closed form and
//! eigensolve cross-check), its fast-mixing approximation, the commuter
//! proportions minimizing it, and integrates the full 18-compartment
//! dynamics.
//!
//! Entry points:
//! - [`model`]: parameter bundles, balanced commuter split, ODE right-hand
//!   side.
//! - [`ngm`]: next-generation matrices, spectral radius, reduced 2x2
//!   coefficients, exact threshold.
//! - [`threshold_analysis`]: fast-mixing approximation, monotonicity
//!   classification, threshold minimization.
//! - [`simulate`]: adaptive Runge-Kutta integration and outbreak verdicts.

pub mod error;
pub mod model;
pub mod ngm;
pub mod simulate;
pub mod threshold_analysis;

pub use error::{Error, Result};
pub use model::{
    equilibrium_split, intrinsic_reproduction, ode_rhs, EpidemicParams, EquilibriumPopulations,
    MobilityParams, PopulationSplit, Scenario, StateVector, GROUP_COUNT, GROUP_LABELS,
};
pub use ngm::{
    build_next_generation, reduced_coefficients, spectral_radius, threshold_explicit,
    threshold_via_alpha, Matrix6, NextGenMatrices, ReducedMatrix, ThresholdReport,
};
pub use simulate::{integrate, outbreak_verdict, OutbreakVerdict, Trajectory};
pub use threshold_analysis::{
    approx_coefficients, approx_threshold, classify_monotonicity, eta, increase_condition_a,
    minimize_threshold, sign_indicators_ab, ApproxCoefficients, BoundaryFlags, EtaPair,
    MinimizerResult, MonotonicityClass,
};
