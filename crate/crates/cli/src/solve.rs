use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use prandtl_core::diagnostics::{weighted_norm, NormReport};
use prandtl_core::fields::csv::write_trajectory;
use prandtl_core::fields::Trajectory;
use prandtl_core::prandtl::{from_u, picard_solve, reconstruct, residual_prandtl, PicardState, ResidualReport};

use crate::error::CliResult;
use crate::scenario::Scenario;

pub struct SolveOutcome {
    pub u: Trajectory,
    pub u_tilde: Trajectory,
    pub up: Trajectory,
    pub vp: Trajectory,
    pub states: Vec<PicardState>,
    pub residuals: ResidualReport,
    pub norms: Vec<TimedNorm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimedNorm {
    pub time: f64,
    #[serde(flatten)]
    pub norm: NormReport,
}

#[derive(Serialize)]
struct SolveReport<'a> {
    residuals: &'a ResidualReport,
    scenario: &'a Scenario,
    picard: &'a [PicardState],
    norms: &'a [TimedNorm],
}

pub fn run_solve(scn: &Scenario) -> CliResult<SolveOutcome> {
    let u0 = scn.initial_field()?;
    let (u, states) = picard_solve(&u0, &scn.trace, &scn.solver)?;
    let u_tilde = u.map(from_u)?;
    let (up, vp) = reconstruct(&u, &scn.trace)?;
    let residuals = residual_prandtl(&up, &vp, &scn.trace)?;
    let norms = u
        .snapshots()
        .iter()
        .map(|s| Ok(TimedNorm { time: s.time(), norm: weighted_norm(s, scn.diagnostics.l, scn.diagnostics.mu)? }))
        .collect::<CliResult<_>>()?;
    Ok(SolveOutcome { u, u_tilde, up, vp, states, residuals, norms })
}

fn write_csv(dir: &Path, name: &str, traj: &Trajectory) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    write_trajectory(traj, &mut w)?;
    w.flush()?;
    Ok(())
}

/// CSVs `u.csv`, `u_tilde_p.csv`, `u_p.csv`, `v_p.csv` and `report.toml`.
pub fn write_solve(out: &SolveOutcome, scn: &Scenario, dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(dir, "u.csv", &out.u)?;
    write_csv(dir, "u_tilde_p.csv", &out.u_tilde)?;
    write_csv(dir, "u_p.csv", &out.up)?;
    write_csv(dir, "v_p.csv", &out.vp)?;
    let report = SolveReport { residuals: &out.residuals, scenario: scn, picard: &out.states, norms: &out.norms };
    let text = toml::to_string(&report).map_err(|e| prandtl_core::Error::Io(e.to_string()))?;
    std::fs::write(dir.join("report.toml"), text)?;
    Ok(())
}

pub fn summarise(out: &SolveOutcome, w: &mut dyn Write) -> std::io::Result<()> {
    for s in &out.states {
        let worst = s.contraction_ratios.iter().copied().fold(0.0, f64::max);
        writeln!(
            w,
            "chunk [{:.4}, {:.4}]: {} iterates, last residual {:.3e}, max contraction ratio {:.3}",
            s.chunk_start,
            s.chunk_end,
            s.iterate_index,
            s.residual_history.last().copied().unwrap_or(0.0),
            worst
        )?;
    }
    let r = &out.residuals;
    writeln!(w, "momentum  max {:.3e}  l2 {:.3e}", r.momentum_max, r.momentum_l2)?;
    writeln!(w, "robin     max {:.3e}  l2 {:.3e}", r.robin_max, r.robin_l2)?;
    writeln!(w, "far field max {:.3e}  l2 {:.3e}", r.far_field_max, r.far_field_l2)?;
    writeln!(w, "divergence max {:.3e}", r.divergence_max)
}
