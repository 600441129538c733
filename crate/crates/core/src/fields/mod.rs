//! Discretisation substrate: grids, field containers, spectral x-derivatives,
//! Y finite differences and cumulative quadrature.

pub mod csv;
mod field;
mod grid;
pub mod spectral;
mod ydir;

pub use field::{Field2D, Gauge, Trajectory, XSeries, FAR_FIELD_TOL};
pub use grid::{make_grid, stretched_node, Grid, RowStencil, YScheme, CUM_WIDTH, FD_WIDTH, STRETCH_RATIO};
pub use spectral::{ddx, ddx_n, dealias};
pub use ydir::{
    cumint_values, cumint_y, d2dy2, d2dy2_values, ddy, ddy_values, ddy_wide, ddy_wide_values, interp_stencil, resample_y, wall_slope,
    YWeight, INTERP_WIDTH,
};
