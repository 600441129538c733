//! Plain CSV export: header `x,Y,value,time,gauge`, rows ordered over
//! `(x, Y)` with `Y` fastest, numbers with 17 significant digits.

use std::io::Write;

use super::field::{Field2D, Trajectory};
use crate::error::Result;

pub const HEADER: &str = "x,Y,value,time,gauge";

fn write_rows<W: Write>(f: &Field2D, out: &mut W) -> Result<()> {
    let g = f.grid();
    let gauge = f.gauge().name();
    for (i, x) in g.x_nodes().iter().enumerate() {
        for (j, y) in g.y_nodes().iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{}", x, y, f.values()[[i, j]], f.time(), gauge)?;
        }
    }
    Ok(())
}

pub fn write_field<W: Write>(f: &Field2D, out: &mut W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    write_rows(f, out)
}

/// All snapshots in time order under a single header.
pub fn write_trajectory<W: Write>(traj: &Trajectory, out: &mut W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for s in traj.snapshots() {
        write_rows(s, out)?;
    }
    Ok(())
}
