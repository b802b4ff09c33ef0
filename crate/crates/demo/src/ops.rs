//! The demo operations, free of any browser types so they can be tested
//! natively.

use ale_fsi::config::RunConfig;
use ale_fsi::extension::{cutoff_field, ExtensionField};
use ale_fsi::iteration::{initial_guess_freefall, no_observer, run_global_partial};
use ale_fsi::mesh::{generate_mesh, Geometry, Mesh2D};
use ale_fsi::navier_stokes::{solve_stokes, RigidBoundary};
use ale_fsi::rigid_body::{
    hydrodynamic_load_boundary, hydrodynamic_load_bulk, BulkLoadInput, BulkTorque, Load,
};
use ale_fsi::Result;

/// Unit box with a disk of radius `radius` centred at `(0.5, 0.5)`.
pub fn box_mesh(h: f64, radius: f64) -> Result<Mesh2D> {
    generate_mesh(&Geometry::unit_box([0.5, 0.5], radius, h))
}

/// Vertex coordinates as `[x0, y0, x1, y1, ...]`.
pub fn flat_vertices(mesh: &Mesh2D) -> Vec<f64> {
    mesh.vertices().iter().flat_map(|p| [p[0], p[1]]).collect()
}

pub fn flat_triangles(mesh: &Mesh2D) -> Vec<u32> {
    mesh.triangles()
        .iter()
        .flatten()
        .map(|&i| i as u32)
        .collect()
}

pub struct SteadyLoads {
    pub boundary: Load,
    pub bulk: Load,
    /// Speed at the mesh vertices.
    pub speed: Vec<f64>,
}

/// Steady Stokes flow around a disk moving with `(v, omega)` in a still box,
/// with the load on the disk computed both ways.
pub fn steady_loads(mesh: &Mesh2D, v: [f64; 2], omega: f64, viscosity: f64) -> Result<SteadyLoads> {
    let body = RigidBoundary {
        q: [0.5, 0.5],
        v,
        omega,
    };
    let field = solve_stokes(mesh, viscosity, &body, None)?;
    let zeta = cutoff_field(mesh)?;
    let still = ExtensionField {
        values: vec![[0.0, 0.0]; mesh.node_count()],
    };
    let boundary = hydrodynamic_load_boundary(mesh, &field, body.q, viscosity);
    let bulk = hydrodynamic_load_bulk(&BulkLoadInput {
        old_mesh: mesh,
        old_field: &field,
        old_cutoff: &zeta,
        new_mesh: mesh,
        new_field: &field,
        new_cutoff: &zeta,
        mesh_velocity: &still,
        tau: 1.0,
        old_q: body.q,
        q: body.q,
        v,
        density: 0.0,
        viscosity,
        torque_form: BulkTorque::default(),
    });
    let speed = (0..mesh.vertex_count())
        .map(|i| field.velocity[2 * i].hypot(field.velocity[2 * i + 1]))
        .collect();
    Ok(SteadyLoads {
        boundary,
        bulk,
        speed,
    })
}

/// Final-time values of one iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FallRow {
    pub q_y: f64,
    pub v_y: f64,
    pub omega: f64,
    pub distance: f64,
}

/// A few global iterations for a disk dropped in the unit box. Returns the
/// completed rows and the error message that stopped the run, if any.
pub fn fall(
    h: f64,
    body_density: f64,
    final_time: f64,
    tau: f64,
    iterations: usize,
) -> Result<(Vec<FallRow>, Option<String>)> {
    let mut cfg = RunConfig {
        box_half_width: 0.5,
        grading: 0.0,
        h,
        max_h: h,
        y0: 0.0,
        body_density,
        ..RunConfig::default()
    };
    cfg.iteration.final_time = final_time;
    cfg.iteration.tau = tau;
    cfg.iteration.k_max = iterations;
    let problem = cfg.build_problem()?;
    let it = cfg.iteration;
    let guess = initial_guess_freefall(&problem.rigid, &problem.initial, tau, it.steps()?);
    let (history, failure) = run_global_partial(guess, &problem, &it, &mut no_observer());
    let rows = history
        .summaries()
        .into_iter()
        .map(|s| FallRow {
            q_y: s.state.q[1],
            v_y: s.state.v[1],
            omega: s.state.omega,
            distance: s.distance,
        })
        .collect();
    Ok((rows, failure.map(|e| e.to_string())))
}
