//! Navier-Stokes DG solver with kinetic flux-vector splitting fluxes.

pub mod dg;
pub mod halfmoment;
pub mod kfvs;

pub use dg::{
    fluid_dt_limit, gradient_reconstruct, ns_step, trace_conserved, trace_gradient, wall_flux, AllFluid,
    FaceFluxOverride, FluidState, Gradient,
};
pub use halfmoment::{half_moment, split_gaussian_moment, HalfLine};
pub use kfvs::{
    euler_flux, kfvs_half_flux, kfvs_interface_flux, kfvs_interface_flux_1d, kfvs_interface_flux_2d,
    maxwellian_half_flux, navier_stokes_flux, viscous_volume_flux, Flux,
};
