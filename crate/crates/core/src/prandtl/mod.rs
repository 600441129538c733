//! Constructive solver for the Robin-wall Prandtl system in the decay gauge
//! `u = e^{-Y}(u^P - U)`, where it becomes the Neumann problem
//! `(∂_t - ∂_YY) u = K(u) + 2∂_Y u`, `∂_Y u|_{Y=0} = U`.

mod euler;
mod gauge;
mod profile;
mod reconstruct;
mod solver;
mod source;

pub use euler::{EulerTrace, FourierMode};
pub use gauge::{from_tilde, from_u, to_tilde, to_u};
pub use profile::{poisson_profile, InitialProfile};
pub use reconstruct::{divergence, reconstruct, residual_prandtl, ResidualReport};
pub use solver::{apply_f, apply_f_with, compatibility_mismatch, compute_cal_u, picard_solve, PicardState, SolverConfig, COMPAT_TOL};
pub use source::{compute_k, DECAY_GUARD};

#[cfg(test)]
mod tests;
