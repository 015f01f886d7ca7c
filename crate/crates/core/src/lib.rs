//! Linear-response model of a Tavis-Cummings coupling optomechanical system:
//! a cavity mode `c`, a collective emitter (dopant) mode `a` and a mechanical
//! mode `b`, coupled through radiation pressure and a mechanically modulated
//! cavity-emitter interaction.
//!
//! The pipeline is
//! [`steady_state`] → [`model`] (drift matrix M, noise coupling Γ) →
//! [`stability`] → [`response`] (U(ω), T(ω), S_v(ω)) → [`sweep`] metrics.
//! [`phase`] locates the drive phases that make the response maximally
//! nonreciprocal and [`oracle`] cross-checks U(ω) by direct time integration.

pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod response;
pub mod stability;
pub mod steady_state;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    build_linearized_from_direct, build_model, DirectParams, DriftModel, LinearizedParams, Mode, PhysicalParams,
};
pub use response::{response_at, ResponseMatrices};
