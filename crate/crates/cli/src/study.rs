//! Refinement studies: the scenario is run at successively doubled
//! resolutions, the finest being the scenario itself.

use std::fmt;

use serde::{Serialize, Serializer};

use prandtl_core::fields::{make_grid, Trajectory, YScheme};
use prandtl_core::kernels::kernel_residuals;
use prandtl_core::oracle::{compare, fd_solve_gauged};
use prandtl_core::prandtl::{picard_solve, reconstruct, residual_prandtl, SolverConfig};
use prandtl_core::Error as CoreError;

use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;

/// Refuse studies above this many grid values (all levels plus the oracle).
pub const MAX_DOF: f64 = 1e8;

/// Observed order between two successive levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// Both errors vanish.
    Exact,
    /// Only one vanishes, so no rate exists.
    Undefined,
    Observed(f64),
}

impl Order {
    pub fn between(coarse: f64, fine: f64) -> Self {
        match (coarse == 0.0, fine == 0.0) {
            (true, true) => Order::Exact,
            (false, false) => Order::Observed((coarse / fine).log2()),
            _ => Order::Undefined,
        }
    }

    /// True when the order is exact or at least `p`.
    pub fn at_least(self, p: f64) -> bool {
        match self {
            Order::Exact => true,
            Order::Undefined => false,
            Order::Observed(q) => q >= p,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Order::Exact => "exact".to_string(),
            Order::Undefined => "n/a".to_string(),
            Order::Observed(q) => format!("{q:.2}"),
        };
        f.pad(&s)
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Observed(q) => s.serialize_f64(*q),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    pub ny: usize,
    pub steps: usize,
    /// Heat-equation residuals of E1, E2, E3 on uniform grids with ΔY halving.
    pub kernel_e1: f64,
    pub kernel_e2: f64,
    pub kernel_e3: f64,
    pub momentum_max: f64,
    pub momentum_l2: f64,
    pub robin_max: f64,
    pub divergence_max: f64,
    /// Global relative L∞ gap to the finite-difference oracle.
    pub oracle_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    pub ny: usize,
    pub kernel_e1: Order,
    pub kernel_e2: Order,
    pub kernel_e3: Order,
    pub momentum_max: Order,
    pub momentum_l2: Order,
    pub robin_max: Order,
    pub oracle_gap: Order,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub levels: Vec<LevelRow>,
    /// Orders from each level to the next finer one.
    pub orders: Vec<OrderRow>,
}

fn coarsen(n: usize, by: usize, what: &str) -> CliResult<usize> {
    if !n.is_multiple_of(by) || n / by == 0 {
        return Err(CliError::Core(CoreError::Config(format!("{what} = {n} cannot be halved down to {by}x coarser"))));
    }
    Ok(n / by)
}

/// Solver configurations of every level, coarsest first.
pub fn level_configs(base: &SolverConfig, levels: usize) -> CliResult<Vec<SolverConfig>> {
    if levels < 3 {
        return Err(CliError::Usage(format!("a convergence study needs at least 3 levels, got {levels}")));
    }
    let chunk = base.chunk_steps()?;
    (0..levels)
        .map(|k| {
            let by = 1usize << (levels - 1 - k);
            coarsen(chunk, by, "steps per chunk")?;
            let cfg = SolverConfig { ny: coarsen(base.ny, by, "ny")?, steps: coarsen(base.steps, by, "steps")?, ..base.clone() };
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

pub fn dof(scn: &Scenario, cfgs: &[SolverConfig]) -> f64 {
    let solver: f64 = cfgs.iter().map(|c| (c.nx * c.ny * (c.steps + 1)) as f64).sum();
    let o = &scn.oracle;
    solver + (o.nx * o.ny) as f64 * (scn.solver.t_final / o.dt + 1.0)
}

fn kernel_level(scn: &Scenario, ny: usize) -> CliResult<[f64; 3]> {
    // uniform grid with twice the level's intervals
    let g = make_grid(scn.solver.nx, 2 * ny + 1, scn.solver.height, YScheme::Uniform)?;
    let wall = scn.trace.sample(g.x_nodes(), 0.0);
    let u0 = scn.initial.field(&g, &scn.trace)?;
    // the linear part applies E1 to u0 - U(x,0)·Y, whose Neumann trace
    // vanishes; E3 sources decay, so u0 itself stands in for them
    let homogeneous = u0.map_xy(|v, x, y| v - scn.trace.u(x, 0.0) * y);
    Ok(kernel_residuals(&homogeneous, &wall, &u0)?)
}

pub fn oracle_reference(scn: &Scenario) -> CliResult<Trajectory> {
    Ok(fd_solve_gauged(&scn.oracle_initial_field()?, &scn.trace, &scn.oracle, scn.solver.t_final)?.0)
}

pub fn run_study(scn: &Scenario, levels: usize) -> CliResult<StudyReport> {
    let cfgs = level_configs(&scn.solver, levels)?;
    let total = dof(scn, &cfgs);
    if total > MAX_DOF {
        return Err(CliError::Resource(format!("{total:.3e} degrees of freedom exceed the limit {MAX_DOF:e}")));
    }
    let fd = oracle_reference(scn)?;
    let mut rows = Vec::with_capacity(levels);
    for cfg in &cfgs {
        let u0 = scn.initial.field(&cfg.grid()?, &scn.trace)?;
        let (traj, _) = picard_solve(&u0, &scn.trace, cfg)?;
        let (up, vp) = reconstruct(&traj, &scn.trace)?;
        let r = residual_prandtl(&up, &vp, &scn.trace)?;
        let [kernel_e1, kernel_e2, kernel_e3] = kernel_level(scn, cfg.ny)?;
        rows.push(LevelRow {
            ny: cfg.ny,
            steps: cfg.steps,
            kernel_e1,
            kernel_e2,
            kernel_e3,
            momentum_max: r.momentum_max,
            momentum_l2: r.momentum_l2,
            robin_max: r.robin_max,
            divergence_max: r.divergence_max,
            oracle_gap: compare(&traj, &fd)?.rel_linf,
        });
    }
    let orders = rows
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            OrderRow {
                ny: b.ny,
                kernel_e1: Order::between(a.kernel_e1, b.kernel_e1),
                kernel_e2: Order::between(a.kernel_e2, b.kernel_e2),
                kernel_e3: Order::between(a.kernel_e3, b.kernel_e3),
                momentum_max: Order::between(a.momentum_max, b.momentum_max),
                momentum_l2: Order::between(a.momentum_l2, b.momentum_l2),
                robin_max: Order::between(a.robin_max, b.robin_max),
                oracle_gap: Order::between(a.oracle_gap, b.oracle_gap),
            }
        })
        .collect();
    Ok(StudyReport { levels: rows, orders })
}
