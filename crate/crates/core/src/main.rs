use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ale_fsi::config::{parse_config_with_preset, Preset, RunConfig};
use ale_fsi::iteration::{
    initial_guess_freefall, run_global_partial, run_per_timestep, IterationHistory, Schedule,
    Snapshot,
};
use ale_fsi::mesh::{generate_mesh, write_mesh};
use ale_fsi::output::{
    snapshot_due, snapshot_file_name, summary_markdown, write_history, write_snapshot_vtk,
    write_trajectory_csv, SnapshotRecord,
};
use ale_fsi::{Error, Result};

#[derive(Parser)]
#[command(
    version,
    about = "Falling rigid disk in a viscous fluid, solved by fixed-point iteration on the body trajectory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured simulation.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides any `preset` line in the config.
        #[arg(long)]
        preset: Option<Preset>,
        /// Output directory (default: `out_dir` from the config, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the initial mesh only.
    MeshOnly {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the heavy and light ball experiments at both resolutions and
    /// write their iteration tables.
    Tables {
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Path, preset: Option<Preset>) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::InconsistentConfig(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config_with_preset(&text, preset)
}

/// Runs the configured schedule, writing CSVs and snapshots into `out`.
/// Returns the printable table and the failure, if any.
fn run(cfg: &RunConfig, out: &Path, title: &str) -> Result<(String, Option<Error>)> {
    let problem = cfg.build_problem()?;
    let it = &cfg.iteration;
    let steps = it.steps()?;
    fs::create_dir_all(out)?;
    let snap_dir = out.join("snapshots");
    if cfg.snapshot_stride > 0 {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut io_error: Option<std::io::Error> = None;
    let mut observer = |s: &Snapshot<'_>| {
        if s.step == steps {
            eprintln!("  iteration {} finished", s.iteration);
        }
        if !snapshot_due(s.step, cfg.snapshot_stride) || io_error.is_some() {
            return;
        }
        let path = snap_dir.join(snapshot_file_name(s.iteration, s.step));
        if let Err(Error::Io(e)) = write_snapshot_vtk(&SnapshotRecord::from_snapshot(s), &path) {
            io_error = Some(e);
        }
    };
    eprintln!(
        "{title}: {} nodes, {} triangles, {steps} steps",
        problem.initial_mesh.node_count(),
        problem.initial_mesh.triangle_count()
    );
    let (table, failure) = match it.schedule {
        Schedule::Global => {
            let guess = initial_guess_freefall(&problem.rigid, &problem.initial, it.tau, steps);
            let (history, failure) = run_global_partial(guess, &problem, it, &mut observer);
            write_history(&history, out)?;
            (
                table_with_failure(title, &history, failure.as_ref()),
                failure,
            )
        }
        Schedule::PerTimestep => match run_per_timestep(&problem, it, &mut observer) {
            Ok(h) => {
                write_trajectory_csv(&h.trajectory, &out.join("trajectory.csv"))?;
                let mut text = String::from("n,k,d\n");
                for (n, ds) in h.inner_distances.iter().enumerate() {
                    for (k, d) in ds.iter().enumerate() {
                        text.push_str(&format!("{},{k},{d:.16e}\n", n + 1));
                    }
                }
                fs::write(out.join("inner_distances.csv"), text)?;
                let s = h.trajectory.last();
                let table = format!(
                    "### {title}\n\nper-timestep schedule, k_max = {}: q(T) = ({:.4}, {:.4}), v(T) = ({:.3e}, {:.4e}), omega(T) = {:.3e}\n",
                    it.k_max, s.q[0], s.q[1], s.v[0], s.v[1], s.omega
                );
                (table, None)
            }
            Err(e) => (format!("### {title}\n\nfailed: {e}\n"), Some(e)),
        },
    };
    if let Some(e) = io_error {
        return Err(Error::Io(e));
    }
    Ok((table, failure))
}

fn table_with_failure(title: &str, history: &IterationHistory, failure: Option<&Error>) -> String {
    let mut table = summary_markdown(title, history);
    if let Some(e) = failure {
        table.push_str(&format!("\nstopped: {e}\n"));
    }
    table
}

fn simulate(config: &Path, preset: Option<Preset>, out: Option<PathBuf>) -> Result<Option<Error>> {
    let cfg = load_config(config, preset)?;
    let out = out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let (table, failure) = run(&cfg, &out, "simulation")?;
    println!("{table}");
    Ok(failure)
}

fn mesh_only(config: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(config, None)?;
    let mesh = generate_mesh(&cfg.geometry())?;
    write_mesh(&mesh, out)?;
    eprintln!(
        "{} vertices, {} triangles, minimum angle {:.1} deg",
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.min_angle_deg()
    );
    Ok(())
}

fn tables(out: &Path) -> Result<Option<Error>> {
    let mut refined_heavy = RunConfig::from_preset(Preset::Refined);
    refined_heavy.iteration.k_max = 5;
    let mut refined_light = RunConfig::from_preset(Preset::Refined);
    refined_light.body_density = RunConfig::from_preset(Preset::LightBall).body_density;
    refined_light.iteration.final_time = 0.05;
    refined_light.iteration.k_max = 6;
    let runs = [
        ("heavy_ball", RunConfig::from_preset(Preset::HeavyBall)),
        ("light_ball", RunConfig::from_preset(Preset::LightBall)),
        ("heavy_ball_refined", refined_heavy),
        ("light_ball_refined", refined_light),
    ];
    fs::create_dir_all(out)?;
    let mut doc = String::new();
    let mut first_failure = None;
    for (name, cfg) in runs {
        let (table, failure) = run(&cfg, &out.join(name), name)?;
        doc.push_str(&table);
        doc.push('\n');
        // keep what we have after every run
        fs::write(out.join("tables.md"), &doc)?;
        if first_failure.is_none() {
            first_failure = failure;
        }
    }
    print!("{doc}");
    Ok(first_failure)
}

fn report(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            config,
            preset,
            out,
        } => simulate(&config, preset, out),
        Command::MeshOnly { config, out } => mesh_only(&config, &out).map(|()| None),
        Command::Tables { out } => tables(&out),
    };
    match outcome {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(e) => report(&e),
    }
}
