//! Fixed-point iteration on rigid-body trajectories: a guessed trajectory
//! drives the mesh motion and the fluid boundary data, the resulting
//! hydrodynamic loads give a new trajectory.

use crate::extension::stokes_extension;
use crate::extension::{rigid_velocity, CutoffField, ExtensionField, ExtensionKind, LaplaceSolver};
use crate::fem::{divergence_residual, FieldPair};
use crate::mesh::{Circle, Mesh2D, Point};
use crate::navier_stokes::{AleStepInput, FluidParams, NavierStokesSolver, RigidBoundary};
use crate::rigid_body::{
    advance_state, hydrodynamic_load_boundary, hydrodynamic_load_bulk, trajectory_update,
    BulkLoadInput, BulkTorque, Load, RigidParams, RigidState, RigidTrajectory,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Whole trajectories per iteration.
    #[default]
    Global,
    /// A fixed number of iterations on each timestep before moving on.
    PerTimestep,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ForceMethod {
    #[default]
    Boundary,
    Bulk,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationConfig {
    pub schedule: Schedule,
    pub k_max: usize,
    /// Stop once `d_k / ‖traj_k‖` drops below this.
    pub trajectory_tol: f64,
    pub force_method: ForceMethod,
    /// Abort when the body-wall gap drops below this fraction of the
    /// initial gap.
    pub collision_fraction: f64,
    pub tau: f64,
    pub final_time: f64,
    /// Move body nodes with the exact rigid map instead of the Euler update.
    pub exact_boundary_motion: bool,
    pub extension: ExtensionKind,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::Global,
            k_max: 5,
            trajectory_tol: 0.0,
            force_method: ForceMethod::Boundary,
            collision_fraction: 0.5,
            tau: 5e-4,
            final_time: 0.1,
            exact_boundary_motion: false,
            extension: ExtensionKind::Harmonic,
        }
    }
}

impl IterationConfig {
    /// Number of timesteps `N_T = T / τ`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InconsistentConfig(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::InconsistentConfig(format!(
                "final time must be positive, got {}",
                self.final_time
            )));
        }
        let ratio = self.final_time / self.tau;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) || n < 1.0 {
            return Err(Error::InconsistentConfig(format!(
                "T / tau = {ratio} is not a positive integer"
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.steps()?;
        if self.k_max < 1 {
            return Err(Error::InconsistentConfig("k_max must be at least 1".into()));
        }
        if !(self.collision_fraction >= 0.0 && self.collision_fraction < 1.0) {
            return Err(Error::InconsistentConfig(format!(
                "collision fraction {} outside [0, 1)",
                self.collision_fraction
            )));
        }
        if self.trajectory_tol.is_nan() || self.trajectory_tol < 0.0 {
            return Err(Error::InconsistentConfig(
                "trajectory tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Everything that stays fixed across iterations.
#[derive(Clone, Debug)]
pub struct Problem {
    pub initial_mesh: Mesh2D,
    pub disk: Circle,
    pub fluid: FluidParams,
    pub rigid: RigidParams,
    pub initial: RigidState,
}

impl Problem {
    pub fn initial_gap(&self) -> f64 {
        self.initial_mesh.min_gap()
    }
}

/// Fluid state passed to observers after every committed step (and once for
/// the initial state).
pub struct Snapshot<'a> {
    /// Iteration index (0 = first image of the guess).
    pub iteration: usize,
    pub step: usize,
    pub time: f64,
    pub mesh: &'a Mesh2D,
    pub field: &'a FieldPair,
}

/// Diagnostics collected while stepping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    pub max_divergence: f64,
    pub max_picard_iterations: usize,
    pub min_gap: f64,
    pub min_area: f64,
}

impl Default for StepStats {
    fn default() -> Self {
        Self {
            max_divergence: 0.0,
            max_picard_iterations: 0,
            min_gap: f64::INFINITY,
            min_area: f64::INFINITY,
        }
    }
}

impl StepStats {
    fn merge(&mut self, other: &StepStats) {
        self.max_divergence = self.max_divergence.max(other.max_divergence);
        self.max_picard_iterations = self.max_picard_iterations.max(other.max_picard_iterations);
        self.min_gap = self.min_gap.min(other.min_gap);
        self.min_area = self.min_area.min(other.min_area);
    }
}

/// State at the end of a committed step: mesh, fluid, and the mesh velocity
/// and cutoff computed on that mesh.
#[derive(Clone)]
struct StepContext {
    mesh: Mesh2D,
    field: FieldPair,
    mesh_velocity: ExtensionField,
    cutoff: CutoffField,
    /// Body state used for `mesh_velocity`.
    extension_state: RigidState,
    circle_center: Point,
}

fn extension_on(
    mesh: &Mesh2D,
    state: &RigidState,
    kind: ExtensionKind,
) -> Result<(ExtensionField, CutoffField)> {
    let lap = LaplaceSolver::new(mesh)?;
    let ext = match kind {
        ExtensionKind::Harmonic => lap.extension(mesh, state.q, state.v, state.omega)?,
        ExtensionKind::Stokes => stokes_extension(mesh, state.q, state.v, state.omega)?,
    };
    Ok((ext, lap.cutoff(mesh)?))
}

fn initial_context(problem: &Problem, cfg: &IterationConfig) -> Result<StepContext> {
    let mesh = problem.initial_mesh.clone();
    let (mesh_velocity, cutoff) = extension_on(&mesh, &problem.initial, cfg.extension)?;
    Ok(StepContext {
        field: FieldPair::zeros(&mesh),
        mesh,
        mesh_velocity,
        cutoff,
        extension_state: problem.initial,
        circle_center: problem.disk.center,
    })
}

fn rotate(y: Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    [c * y[0] - s * y[1], s * y[0] + c * y[1]]
}

/// One step `n − 1 → n` driven by the guessed body states `prev` (at `n − 1`)
/// and `curr` (at `n`).
fn advance_step(
    ctx: &StepContext,
    prev: &RigidState,
    curr: &RigidState,
    problem: &Problem,
    cfg: &IterationConfig,
    gap_threshold: f64,
    solver: &mut NavierStokesSolver,
) -> Result<(StepContext, Load, StepStats)> {
    let tau = cfg.tau;
    let old = &ctx.mesh;
    let v_old = if ctx.extension_state == *prev {
        ctx.mesh_velocity.clone()
    } else {
        extension_on(old, prev, cfg.extension)?.0
    };

    // nodal update x_n = x_{n−1} + τ V_{n−1}
    let mut disp: Vec<Point> = v_old
        .values
        .iter()
        .map(|v| [tau * v[0], tau * v[1]])
        .collect();
    let c_old = ctx.circle_center;
    let c_new = if cfg.exact_boundary_motion {
        let angle = tau * prev.omega;
        for (i, d) in disp.iter_mut().enumerate() {
            if old.node_tag(i) == crate::mesh::NodeTag::Body {
                let x = old.node(i);
                let y = rotate([x[0] - prev.q[0], x[1] - prev.q[1]], angle);
                *d = [curr.q[0] + y[0] - x[0], curr.q[1] + y[1] - x[1]];
            }
        }
        let y = rotate([c_old[0] - prev.q[0], c_old[1] - prev.q[1]], angle);
        [curr.q[0] + y[0], curr.q[1] + y[1]]
    } else {
        let w = rigid_velocity(prev.q, prev.v, prev.omega, c_old);
        [c_old[0] + tau * w[0], c_old[1] + tau * w[1]]
    };
    let moved = old.move_nodes(&disp)?;
    let mesh = moved.snap_disk_boundary(Circle::new(c_new, problem.disk.radius))?;

    let gap = mesh.min_gap();
    if gap < gap_threshold {
        return Err(Error::CollisionGuard {
            gap,
            threshold: gap_threshold,
        });
    }

    let (mesh_velocity, cutoff) = extension_on(&mesh, curr, cfg.extension)?;
    let boundary = RigidBoundary {
        q: curr.q,
        v: curr.v,
        omega: curr.omega,
    };
    let input = AleStepInput {
        old_mesh: old,
        old_field: &ctx.field,
        new_mesh: &mesh,
        mesh_velocity: &mesh_velocity,
        boundary: &boundary,
        tau,
        forcing: None,
    };
    let (field, picard) = solver.step(&input, &problem.fluid)?;

    let load = match cfg.force_method {
        ForceMethod::Boundary => {
            hydrodynamic_load_boundary(&mesh, &field, curr.q, problem.fluid.viscosity)
        }
        ForceMethod::Bulk => hydrodynamic_load_bulk(&BulkLoadInput {
            old_mesh: old,
            old_field: &ctx.field,
            old_cutoff: &ctx.cutoff,
            new_mesh: &mesh,
            new_field: &field,
            new_cutoff: &cutoff,
            mesh_velocity: &mesh_velocity,
            tau,
            old_q: prev.q,
            q: curr.q,
            v: curr.v,
            density: problem.fluid.density,
            viscosity: problem.fluid.viscosity,
            torque_form: BulkTorque::default(),
        }),
    };

    let stats = StepStats {
        max_divergence: divergence_residual(&mesh, &field.velocity),
        max_picard_iterations: picard.iterations,
        min_gap: gap,
        min_area: mesh.worst_triangle().map_or(f64::INFINITY, |(_, a)| a),
    };
    let next = StepContext {
        mesh,
        field,
        mesh_velocity,
        cutoff,
        extension_state: *curr,
        circle_center: c_new,
    };
    Ok((next, load, stats))
}

/// `q(tₙ) = q₀ + g tₙ²/2`, `v(tₙ) = g tₙ`, `ω = 0`.
pub fn initial_guess_freefall(
    rigid: &RigidParams,
    initial: &RigidState,
    tau: f64,
    steps: usize,
) -> RigidTrajectory {
    let g = rigid.gravity;
    let states = (0..=steps)
        .map(|n| {
            if n == 0 {
                return *initial;
            }
            let t = n as f64 * tau;
            RigidState {
                q: [
                    initial.q[0] + tau * initial.v[0] * n as f64 + 0.5 * g[0] * t * t,
                    initial.q[1] + tau * initial.v[1] * n as f64 + 0.5 * g[1] * t * t,
                ],
                v: [initial.v[0] + g[0] * t, initial.v[1] + g[1] * t],
                omega: 0.0,
            }
        })
        .collect();
    RigidTrajectory { tau, states }
}

/// First guess for state `n` from state `n − 1` with no hydrodynamic load.
fn ballistic(s: &RigidState, g: [f64; 2], tau: f64) -> RigidState {
    RigidState {
        q: [
            s.q[0] + tau * s.v[0] + 0.5 * g[0] * tau * tau,
            s.q[1] + tau * s.v[1] + 0.5 * g[1] * tau * tau,
        ],
        v: [s.v[0] + g[0] * tau, s.v[1] + g[1] * tau],
        omega: s.omega,
    }
}

pub type Observer<'a> = dyn FnMut(&Snapshot<'_>) + 'a;

/// One application of the iteration map: the image of `guess`.
pub fn apply_f(
    guess: &RigidTrajectory,
    problem: &Problem,
    cfg: &IterationConfig,
    iteration: usize,
    observer: &mut Observer<'_>,
) -> Result<(RigidTrajectory, StepStats)> {
    cfg.validate()?;
    let steps = cfg.steps()?;
    if guess.states.len() != steps + 1 || guess.states[0] != problem.initial {
        return Err(Error::InconsistentConfig(
            "guess must have N_T + 1 states starting at the initial condition".into(),
        ));
    }
    let threshold = cfg.collision_fraction * problem.initial_gap();
    let mut ctx = initial_context(problem, cfg).map_err(|e| e.at_step(iteration, 0))?;
    observer(&Snapshot {
        iteration,
        step: 0,
        time: 0.0,
        mesh: &ctx.mesh,
        field: &ctx.field,
    });
    let mut solver = NavierStokesSolver::new();
    let mut loads = Vec::with_capacity(steps);
    let mut stats = StepStats::default();
    for n in 1..=steps {
        let (next, load, s) = advance_step(
            &ctx,
            &guess.states[n - 1],
            &guess.states[n],
            problem,
            cfg,
            threshold,
            &mut solver,
        )
        .map_err(|e| e.at_step(iteration, n))?;
        stats.merge(&s);
        loads.push(load);
        ctx = next;
        observer(&Snapshot {
            iteration,
            step: n,
            time: n as f64 * cfg.tau,
            mesh: &ctx.mesh,
            field: &ctx.field,
        });
    }
    let traj = trajectory_update(&loads, &problem.rigid, problem.initial, cfg.tau)
        .map_err(|e| e.at_step(iteration, steps))?;
    Ok((traj, stats))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub trajectory: RigidTrajectory,
    /// Distance to the previous iterate (the guess for the first record).
    pub distance: f64,
    pub stats: StepStats,
}

/// Final-time values of one iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub iteration: usize,
    pub state: RigidState,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationHistory {
    pub guess: RigidTrajectory,
    /// Entry `k` is the `(k + 1)`-th image of the guess; the first entry is
    /// reported as iteration 0.
    pub records: Vec<IterationRecord>,
}

impl IterationHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn summaries(&self) -> Vec<Summary> {
        self.records
            .iter()
            .enumerate()
            .map(|(k, r)| Summary {
                iteration: k,
                state: *r.trajectory.last(),
                distance: r.distance,
            })
            .collect()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.distance).collect()
    }

    /// Latest iterate, or the guess if no iteration completed.
    pub fn last(&self) -> &RigidTrajectory {
        self.records.last().map_or(&self.guess, |r| &r.trajectory)
    }
}

/// Repeatedly applies the iteration map to whole trajectories.
pub fn run_global(
    guess: RigidTrajectory,
    problem: &Problem,
    cfg: &IterationConfig,
    observer: &mut Observer<'_>,
) -> Result<IterationHistory> {
    match run_global_partial(guess, problem, cfg, observer) {
        (history, None) => Ok(history),
        (_, Some(err)) => Err(err),
    }
}

/// As [`run_global`], but keeps the iterations completed before a failure.
/// The history may be empty if the first iteration fails.
pub fn run_global_partial(
    guess: RigidTrajectory,
    problem: &Problem,
    cfg: &IterationConfig,
    observer: &mut Observer<'_>,
) -> (IterationHistory, Option<Error>) {
    let mut records: Vec<IterationRecord> = Vec::new();
    if let Err(e) = cfg.validate() {
        return (IterationHistory { guess, records }, Some(e));
    }
    let mut failure = None;
    for k in 0..cfg.k_max {
        let prev = records.last().map_or(&guess, |r| &r.trajectory);
        let (traj, stats) = match apply_f(prev, problem, cfg, k, observer) {
            Ok(out) => out,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        let distance = traj.distance(prev);
        let rel = distance / traj.norm().max(f64::MIN_POSITIVE);
        records.push(IterationRecord {
            trajectory: traj,
            distance,
            stats,
        });
        if rel < cfg.trajectory_tol {
            break;
        }
    }
    (IterationHistory { guess, records }, failure)
}

/// Result of the per-timestep schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct PerStepHistory {
    pub trajectory: RigidTrajectory,
    /// Per step, the change of the body state between successive inner
    /// iterations.
    pub inner_distances: Vec<Vec<f64>>,
    pub stats: StepStats,
}

/// Iterates `k_max` times on each timestep, using only data from the
/// previous step, before committing it.
pub fn run_per_timestep(
    problem: &Problem,
    cfg: &IterationConfig,
    observer: &mut Observer<'_>,
) -> Result<PerStepHistory> {
    cfg.validate()?;
    let steps = cfg.steps()?;
    let tau = cfg.tau;
    let m = problem.rigid.mass();
    let j = problem.rigid.inertia();
    let threshold = cfg.collision_fraction * problem.initial_gap();
    let mut ctx = initial_context(problem, cfg).map_err(|e| e.at_step(0, 0))?;
    observer(&Snapshot {
        iteration: cfg.k_max - 1,
        step: 0,
        time: 0.0,
        mesh: &ctx.mesh,
        field: &ctx.field,
    });
    let mut solver = NavierStokesSolver::new();
    let mut states = vec![problem.initial];
    let mut inner_distances = Vec::with_capacity(steps);
    let mut stats = StepStats::default();
    for n in 1..=steps {
        let prev = *states.last().expect("nonempty");
        let mut guess = ballistic(&prev, problem.rigid.gravity, tau);
        let mut committed = None;
        let mut dists = Vec::with_capacity(cfg.k_max);
        for k in 0..cfg.k_max {
            let (next, load, s) =
                advance_step(&ctx, &prev, &guess, problem, cfg, threshold, &mut solver)
                    .map_err(|e| e.at_step(k, n))?;
            if !load.is_finite() {
                return Err(Error::NonFiniteLoad { step: n }.at_step(k, n));
            }
            let image = advance_state(&prev, &load, &problem.rigid, m, j, tau);
            let d: f64 = image
                .as_array()
                .iter()
                .zip(guess.as_array())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            dists.push(d);
            guess = image;
            committed = Some((next, s));
        }
        let (next, s) = committed.expect("k_max >= 1");
        stats.merge(&s);
        ctx = next;
        states.push(guess);
        inner_distances.push(dists);
        observer(&Snapshot {
            iteration: cfg.k_max - 1,
            step: n,
            time: n as f64 * tau,
            mesh: &ctx.mesh,
            field: &ctx.field,
        });
    }
    Ok(PerStepHistory {
        trajectory: RigidTrajectory { tau, states },
        inner_distances,
        stats,
    })
}

/// Observer that ignores every snapshot.
pub fn no_observer() -> impl FnMut(&Snapshot<'_>) {
    |_| {}
}
