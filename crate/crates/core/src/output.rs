//! Output artifacts: trajectory CSVs, iteration summaries and legacy VTK
//! snapshots of the fluid.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::iteration::{IterationHistory, Snapshot};
use crate::mesh::Point;
use crate::rigid_body::{RigidState, RigidTrajectory};
use crate::{Error, Result};

pub const TRAJECTORY_HEADER: &str = "t,qx,qy,vx,vy,omega";
pub const SUMMARY_HEADER: &str = "k,qx_T,qy_T,vx_T,vy_T,omega_T,delta_k";

/// `{:.16e}` keeps 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &RigidTrajectory) -> String {
    let mut out = String::with_capacity(120 * traj.states.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (n, s) in traj.states.iter().enumerate() {
        let t = n as f64 * traj.tau;
        let row = [t, s.q[0], s.q[1], s.v[0], s.v[1], s.omega].map(num);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(traj: &RigidTrajectory, path: &Path) -> Result<()> {
    fs::write(path, trajectory_csv(traj))?;
    Ok(())
}

fn csv_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::MeshFormat {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a file written by [`write_trajectory_csv`]. The step size is
/// recovered from the time of the first step.
pub fn read_trajectory_csv(path: &Path) -> Result<RigidTrajectory> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(TRAJECTORY_HEADER) {
        return Err(csv_error(path, 1, "missing trajectory header"));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| csv_error(path, i + 2, format!("{e}")))?;
        if cols.len() != 6 {
            return Err(csv_error(
                path,
                i + 2,
                format!("expected 6 columns, got {}", cols.len()),
            ));
        }
        times.push(cols[0]);
        states.push(RigidState {
            q: [cols[1], cols[2]],
            v: [cols[3], cols[4]],
            omega: cols[5],
        });
    }
    if states.len() < 2 {
        return Err(csv_error(path, 2, "need at least two rows"));
    }
    Ok(RigidTrajectory {
        tau: times[1],
        states,
    })
}

pub fn summary_csv(history: &IterationHistory) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in history.summaries() {
        let row = [
            s.state.q[0],
            s.state.q[1],
            s.state.v[0],
            s.state.v[1],
            s.state.omega,
            s.distance,
        ]
        .map(num);
        let _ = writeln!(out, "{},{}", s.iteration, row.join(","));
    }
    out
}

pub fn trajectory_file_name(iteration: usize) -> String {
    format!("trajectory_k{iteration:03}.csv")
}

/// Writes the guess (`trajectory_guess.csv`), one trajectory file per
/// iteration and `summary.csv` into `dir`. Returns the written paths.
pub fn write_history(history: &IterationHistory, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let guess = dir.join("trajectory_guess.csv");
    write_trajectory_csv(&history.guess, &guess)?;
    written.push(guess);
    for (k, record) in history.records.iter().enumerate() {
        let path = dir.join(trajectory_file_name(k));
        write_trajectory_csv(&record.trajectory, &path)?;
        written.push(path);
    }
    let summary = dir.join("summary.csv");
    fs::write(&summary, summary_csv(history))?;
    written.push(summary);
    Ok(written)
}

/// Markdown rendering of an iteration summary, laid out like the tables of
/// the falling-ball experiments.
pub fn summary_markdown(title: &str, history: &IterationHistory) -> String {
    let mut out = format!(
        "### {title}\n\n| Iteration | q(T) | v(T) | omega(T) | d_k |\n|---|---|---|---|---|\n"
    );
    for s in history.summaries() {
        let _ = writeln!(
            out,
            "| {} | ({:.4}, {:.4}) | ({:.3e}, {:.4e}) | {:.3e} | {:.3e} |",
            s.iteration,
            s.state.q[0],
            s.state.q[1],
            s.state.v[0],
            s.state.v[1],
            s.state.omega,
            s.distance
        );
    }
    out
}

/// Fluid state reduced to the mesh vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotRecord {
    pub iteration: usize,
    pub step: usize,
    pub time: f64,
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub speed: Vec<f64>,
    pub pressure: Vec<f64>,
}

impl SnapshotRecord {
    pub fn from_snapshot(s: &Snapshot<'_>) -> Self {
        let nv = s.mesh.vertex_count();
        let u = &s.field.velocity;
        // vertex nodes come first in the quadratic numbering
        let speed = (0..nv).map(|i| u[2 * i].hypot(u[2 * i + 1])).collect();
        Self {
            iteration: s.iteration,
            step: s.step,
            time: s.time,
            vertices: s.mesh.vertices().to_vec(),
            triangles: s.mesh.triangles().to_vec(),
            speed,
            pressure: s.field.pressure[..nv].to_vec(),
        }
    }
}

/// Legacy ASCII VTK (version 3.0) unstructured grid.
pub fn snapshot_vtk(record: &SnapshotRecord) -> String {
    let nv = record.vertices.len();
    let nt = record.triangles.len();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(
        out,
        "fluid k={} n={} t={}",
        record.iteration,
        record.step,
        num(record.time)
    );
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {nv} double");
    for p in &record.vertices {
        let _ = writeln!(out, "{} {} 0", num(p[0]), num(p[1]));
    }
    let _ = writeln!(out, "CELLS {nt} {}", 4 * nt);
    for t in &record.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {nt}");
    for _ in 0..nt {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "POINT_DATA {nv}");
    for (name, data) in [("speed", &record.speed), ("pressure", &record.pressure)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for x in data.iter() {
            out.push_str(&num(*x));
            out.push('\n');
        }
    }
    out
}

pub fn write_snapshot_vtk(record: &SnapshotRecord, path: &Path) -> Result<()> {
    if record.speed.len() != record.vertices.len() || record.pressure.len() != record.vertices.len()
    {
        return Err(Error::InconsistentConfig(
            "snapshot arrays do not match the mesh".into(),
        ));
    }
    fs::write(path, snapshot_vtk(record))?;
    Ok(())
}

/// Whether step `n` gets a snapshot at stride `stride` (0 disables).
pub fn snapshot_due(step: usize, stride: usize) -> bool {
    stride > 0 && step.is_multiple_of(stride)
}

pub fn snapshot_file_name(iteration: usize, step: usize) -> String {
    format!("fluid_k{iteration:03}_n{step:06}.vtk")
}
