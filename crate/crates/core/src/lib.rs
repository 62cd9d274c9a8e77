//! Numerical laboratory for the static flow
//!
//! ```text
//!     ∂g/∂t = -2 Ric(g) - 2n g + 2 V⁻¹ ∇²V + L_W g
//!     ∂V/∂t = Δ_g V - n V + dV(W)
//! ```
//!
//! on rotationally symmetric asymptotically hyperbolic manifolds
//! `g = A(r) dr² + B(r) σ`, together with exact static Einstein vacua used as
//! fixtures and a power-series engine for the expansion of static vacua at
//! conformal infinity.
//!
//! * [`geometry`]: curvature, Hessians, DeTurck field, defects and norms.
//! * [`solutions`]: AdS and Schwarzschild-AdS triples, bump perturbations.
//! * [`flow`]: method-of-lines integrator with monitors.
//! * [`expansion`]: order-by-order boundary expansion and reconstruction.
//! * [`cli`]: JSON-configured runs and report writers.

pub mod cli;
pub mod error;
pub mod expansion;
pub mod fd;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod solutions;

pub use error::{Error, Result};
pub use grid::{Profile, RadialGrid};
