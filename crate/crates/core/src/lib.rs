//! Hybrid kinetic/fluid discontinuous Galerkin solver.
//!
//! The kinetic model is the Chu-reduced BGK equation discretized by a
//! first-order IMEX nodal DG scheme; the fluid model is the compressible
//! Navier-Stokes system with Bassi-Rebay gradients and kinetic flux-vector
//! splitting fluxes. A per-cell indicator decides which model is used where,
//! and interfaces between the two regions share the same kinetic upwind
//! fluxes so that mass, momentum and energy cross them consistently.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); `f64` aliases are provided at the crate root.

// Negated comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod decomposition;
pub mod error;
pub mod fluid;
pub mod hybrid;
pub mod io;
pub mod kinetic;
pub mod mesh;
pub mod problem;
pub mod real;
pub mod scenarios;
pub mod velocity;

pub use decomposition::{DecompositionConfig, Region, RegionMap};
pub use error::{Error, Location, Result};
pub use fluid::FluidState;
pub use hybrid::{HybridState, Mode};
pub use kinetic::{BoundaryKind, BoundarySpec, CollisionModel, KineticState};
pub use mesh::{Dim, DgSpace, Field, Mesh, NodalBasis, Side};
pub use problem::Problem;
pub use real::Real;
pub use scenarios::{ScenarioKind, ScenarioSpec};
pub use velocity::{Conserved, Moments, PrimitiveGradients, ReducedDistribution, VelocityGrid};

pub type Mesh64 = Mesh<f64>;
pub type DgSpace64 = DgSpace<f64>;
pub type VelocityGrid64 = VelocityGrid<f64>;
pub type Moments64 = Moments<f64>;
pub type Problem64 = Problem<f64>;
pub type KineticState64 = KineticState<f64>;
pub type FluidState64 = FluidState<f64>;
pub type HybridState64 = HybridState<f64>;
pub type ScenarioSpec64 = ScenarioSpec<f64>;

pub type Mesh32 = Mesh<f32>;
pub type Problem32 = Problem<f32>;
pub type HybridState32 = HybridState<f32>;
