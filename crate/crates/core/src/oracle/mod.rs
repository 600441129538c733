//! Independent reference solvers: direct finite differences on a uniform Y
//! grid, plus trajectory comparison. Shares no operators with the mild solver.

mod compare;
mod fd;

pub use compare::{compare, CompareReport, SnapshotError};
pub use fd::{fd_solve_gauged, fd_solve_robin, FDConfig, FdStats, GhostOrder, BLOWUP};

use crate::error::Result;
use crate::fields::Trajectory;
use crate::prandtl::{from_tilde, from_u, to_tilde, to_u, EulerTrace};

/// Map a gauged trajectory to physical variables.
pub fn gauged_to_physical(traj: &Trajectory, trace: &EulerTrace) -> Result<Trajectory> {
    traj.map(|s| from_tilde(&from_u(s)?, trace))
}

pub fn physical_to_gauged(traj: &Trajectory, trace: &EulerTrace) -> Result<Trajectory> {
    traj.map(|s| to_u(&to_tilde(s, trace)?))
}
