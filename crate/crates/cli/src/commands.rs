use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use prandtl_core::kernels::{run_identities, Check};
use prandtl_core::oracle::{compare, fd_solve_robin, gauged_to_physical, CompareReport};
use prandtl_core::prandtl::{from_tilde, from_u, picard_solve};

use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;
use crate::solve::{run_solve, summarise, write_solve};
use crate::study::{oracle_reference, run_study};

fn out_dir(scn: &Scenario, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf).unwrap_or_else(|| scn.output.dir.clone())
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let text = toml::to_string(value).map_err(|e| prandtl_core::Error::Io(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn cmd_solve(scenario: &Path, out: Option<&Path>, w: &mut dyn Write) -> CliResult<()> {
    let scn = Scenario::load(scenario)?;
    let res = run_solve(&scn)?;
    let dir = out_dir(&scn, out);
    write_solve(&res, &scn, &dir)?;
    summarise(&res, w)?;
    writeln!(w, "wrote {}", dir.display())?;
    Ok(())
}

pub fn cmd_verify_kernels(filter: Option<&str>, tolerance: Option<f64>, w: &mut dyn Write) -> CliResult<()> {
    let rows = run_identities(filter, tolerance)?;
    if rows.is_empty() {
        return Err(CliError::Usage(format!("no kernel identity named {:?}", filter.unwrap_or(""))));
    }
    writeln!(w, "{:<24} {:>12} {:>4} {:>10}  status", "identity", "measured", "", "tolerance")?;
    let mut failed = Vec::new();
    for r in &rows {
        let op = match r.check {
            Check::AtMost => "<=",
            Check::AtLeast => ">=",
        };
        let status = if r.passed { "pass" } else { "FAIL" };
        writeln!(w, "{:<24} {:>12.3e} {:>4} {:>10.1e}  {status}", r.name, r.value, op, r.tolerance)?;
        if !r.passed {
            failed.push(r.name.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

pub fn cmd_convergence(scenario: &Path, levels: usize, out: Option<&Path>, w: &mut dyn Write) -> CliResult<()> {
    if levels < 3 {
        return Err(CliError::Usage(format!("--levels must be at least 3, got {levels}")));
    }
    let scn = Scenario::load(scenario)?;
    let rep = run_study(&scn, levels)?;
    writeln!(
        w,
        "{:>5} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "ny", "steps", "E1 res", "E2 res", "E3 res", "mom max", "mom l2", "robin", "fd gap"
    )?;
    for r in &rep.levels {
        writeln!(
            w,
            "{:>5} {:>6} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}",
            r.ny, r.steps, r.kernel_e1, r.kernel_e2, r.kernel_e3, r.momentum_max, r.momentum_l2, r.robin_max, r.oracle_gap
        )?;
    }
    writeln!(w, "observed orders (coarse -> fine):")?;
    for o in &rep.orders {
        writeln!(
            w,
            "{:>5} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            o.ny, "", o.kernel_e1, o.kernel_e2, o.kernel_e3, o.momentum_max, o.momentum_l2, o.robin_max, o.oracle_gap
        )?;
    }
    let path = out_dir(&scn, out).join("convergence.toml");
    write_toml(&path, &rep)?;
    writeln!(w, "wrote {}", path.display())?;
    Ok(())
}

#[derive(Serialize)]
struct OracleReport<'a> {
    /// How the two trajectories were brought onto one grid.
    interpolation: String,
    mild_vs_fd_gauged: &'a CompareReport,
    fd_gauged_vs_fd_robin: &'a CompareReport,
}

fn print_compare(label: &str, r: &CompareReport, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "{label}")?;
    writeln!(w, "{:>8} {:>12} {:>12} {:>12} {:>12}", "t", "abs Linf", "rel Linf", "abs L2", "rel L2")?;
    for s in &r.snapshots {
        writeln!(w, "{:>8.4} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}", s.time, s.abs_linf, s.rel_linf, s.abs_l2, s.rel_l2)?;
    }
    writeln!(w, "{:>8} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}", "global", r.abs_linf, r.rel_linf, r.abs_l2, r.rel_l2)
}

pub fn cmd_compare_oracle(scenario: &Path, out: Option<&Path>, w: &mut dyn Write) -> CliResult<()> {
    let scn = Scenario::load(scenario)?;
    let (mild, _) = picard_solve(&scn.initial_field()?, &scn.trace, &scn.solver)?;
    let fd = oracle_reference(&scn)?;
    let mild_vs_fd = compare(&mild, &fd)?;

    let up0 = from_tilde(&from_u(&scn.oracle_initial_field()?)?, &scn.trace)?;
    let (robin, _) = fd_solve_robin(&up0, &scn.trace, &scn.oracle, scn.solver.t_final)?;
    let chain = compare(&gauged_to_physical(&fd, &scn.trace)?, &robin)?;

    let (mg, og) = (mild.grid(), fd.grid());
    let interpolation = format!(
        "mild grid {}x{} ({:?}) and oracle grid {}x{} ({:?}) compared on the finer grid: spectral in x, cubic Lagrange in Y, linear in t",
        mg.nx(),
        mg.ny(),
        mg.scheme(),
        og.nx(),
        og.ny(),
        og.scheme()
    );
    writeln!(w, "{interpolation}")?;
    print_compare("mild solution vs gauged finite differences", &mild_vs_fd, w)?;
    print_compare("gauged vs Robin finite differences (physical)", &chain, w)?;
    let path = out_dir(&scn, out).join("compare.toml");
    write_toml(&path, &OracleReport { interpolation, mild_vs_fd_gauged: &mild_vs_fd, fd_gauged_vs_fd_robin: &chain })?;
    writeln!(w, "wrote {}", path.display())?;
    Ok(())
}
