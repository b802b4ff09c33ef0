//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use ale_fsi::extension::ExtensionField;
use ale_fsi::fem::element::{p2_values, Element};
use ale_fsi::fem::{pressure_mean, quadrature_rule, AtRest, FieldPair, QuadDomain};
use ale_fsi::mesh::{Mesh2D, Point};
use ale_fsi::navier_stokes::{solve_stokes, AleStepInput, FluidParams, NavierStokesSolver};

/// Divergence-free, vanishing on the boundary of the unit square.
pub fn exact_u(x: Point) -> [f64; 2] {
    let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
    [
        sx * sx * (2.0 * PI * x[1]).sin(),
        -(2.0 * PI * x[0]).sin() * sy * sy,
    ]
}

fn grad_u(x: Point) -> [[f64; 2]; 2] {
    let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
    let (s2x, s2y) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
    let (c2x, c2y) = ((2.0 * PI * x[0]).cos(), (2.0 * PI * x[1]).cos());
    // row i = component, column j = derivative direction
    [
        [PI * s2x * s2y, 2.0 * PI * sx * sx * c2y],
        [-2.0 * PI * c2x * sy * sy, -PI * s2x * s2y],
    ]
}

fn laplace_u(x: Point) -> [f64; 2] {
    let (sx, sy) = ((PI * x[0]).sin(), (PI * x[1]).sin());
    let (s2x, s2y) = ((2.0 * PI * x[0]).sin(), (2.0 * PI * x[1]).sin());
    let (c2x, c2y) = ((2.0 * PI * x[0]).cos(), (2.0 * PI * x[1]).cos());
    let pi2 = PI * PI;
    [
        2.0 * pi2 * c2x * s2y - 4.0 * pi2 * sx * sx * s2y,
        4.0 * pi2 * s2x * sy * sy - 2.0 * pi2 * s2x * c2y,
    ]
}

/// Zero mean over the unit square.
pub fn exact_p(x: Point) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).cos()
}

fn grad_p(x: Point) -> [f64; 2] {
    [
        PI * (PI * x[0]).cos() * (PI * x[1]).cos(),
        -PI * (PI * x[0]).sin() * (PI * x[1]).sin(),
    ]
}

/// `-μΔu + ∇p + ρ(u·∇)u`
pub fn forcing(x: Point, viscosity: f64, density: f64) -> [f64; 2] {
    let lu = laplace_u(x);
    let gp = grad_p(x);
    let u = exact_u(x);
    let g = grad_u(x);
    let mut f = [0.0; 2];
    for i in 0..2 {
        let adv = u[0] * g[i][0] + u[1] * g[i][1];
        f[i] = -viscosity * lu[i] + gp[i] + density * adv;
    }
    f
}

/// L² errors of velocity and (mean-free) pressure.
pub fn l2_errors(mesh: &Mesh2D, field: &FieldPair) -> (f64, f64) {
    let pbar = pressure_mean(mesh, &field.pressure);
    let mut eu = 0.0;
    let mut ep = 0.0;
    for t in 0..mesh.triangle_count() {
        let el = Element::of(mesh, t);
        let nodes = mesh.triangle_nodes(t);
        let verts = mesh.triangles()[t];
        for q in quadrature_rule(QuadDomain::Triangle) {
            let l = [1.0 - q.point[0] - q.point[1], q.point[0], q.point[1]];
            let x = el.map(l);
            let w = el.jxw(q.weight);
            let phi = p2_values(l);
            let mut uh = [0.0; 2];
            for (k, &n) in nodes.iter().enumerate() {
                uh[0] += phi[k] * field.velocity[2 * n];
                uh[1] += phi[k] * field.velocity[2 * n + 1];
            }
            let ph: f64 = (0..3).map(|k| l[k] * field.pressure[verts[k]]).sum::<f64>() - pbar;
            let ue = exact_u(x);
            eu += w * ((uh[0] - ue[0]).powi(2) + (uh[1] - ue[1]).powi(2));
            ep += w * (ph - exact_p(x)).powi(2);
        }
    }
    (eu.sqrt(), ep.sqrt())
}

pub fn unit_square(n: usize) -> Mesh2D {
    Mesh2D::structured_rectangle([0.0, 0.0], [1.0, 1.0], n, n)
}

/// Steady Stokes with the manufactured forcing.
pub fn stokes_errors(n: usize) -> (f64, f64) {
    let mesh = unit_square(n);
    let f = |x: Point| forcing(x, 1.0, 0.0);
    let field = solve_stokes(&mesh, 1.0, &AtRest, Some(&f)).unwrap();
    l2_errors(&mesh, &field)
}

/// One implicit Navier–Stokes step on a fixed mesh, started from the
/// interpolant of the steady manufactured solution.
pub fn navier_stokes_step_errors(n: usize) -> (f64, f64) {
    let mesh = unit_square(n);
    let params = FluidParams::default();
    let f = |x: Point| forcing(x, params.viscosity, params.density);
    let old = FieldPair::interpolate(&mesh, exact_u, exact_p);
    let still = ExtensionField {
        values: vec![[0.0, 0.0]; mesh.node_count()],
    };
    let input = AleStepInput {
        old_mesh: &mesh,
        old_field: &old,
        new_mesh: &mesh,
        mesh_velocity: &still,
        boundary: &AtRest,
        tau: 0.1,
        forcing: Some(&f),
    };
    let (field, _) = NavierStokesSolver::new().step(&input, &params).unwrap();
    l2_errors(&mesh, &field)
}

/// Observed orders between consecutive refinements (mesh size halves).
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

use ale_fsi::extension::cutoff_field;
use ale_fsi::mesh::{generate_mesh, Circle, Geometry};
use ale_fsi::navier_stokes::RigidBoundary;
use ale_fsi::rigid_body::{
    hydrodynamic_load_boundary, hydrodynamic_load_bulk, BulkLoadInput, BulkTorque, Load,
};

pub const CROSS_CHECK_BODY: RigidBoundary = RigidBoundary {
    q: [0.5, 0.5],
    v: [1.0, 0.5],
    omega: 2.0,
};

pub fn cross_check_meshes() -> (Mesh2D, Mesh2D) {
    let geom = Geometry::unit_box([0.5, 0.5], 0.1, 6.284e-2);
    let coarse = generate_mesh(&geom).unwrap();
    let fine = coarse
        .refine_uniform(Some(Circle::new([0.5, 0.5], 0.1)))
        .unwrap();
    (coarse, fine)
}

/// Boundary and bulk loads of a steady Stokes flow driven by a moving disk.
pub fn boundary_and_bulk_loads(mesh: &Mesh2D, torque_form: BulkTorque) -> (Load, Load) {
    let body = CROSS_CHECK_BODY;
    let field = solve_stokes(mesh, 1.0, &body, None).unwrap();
    let zeta = cutoff_field(mesh).unwrap();
    let still = ExtensionField {
        values: vec![[0.0, 0.0]; mesh.node_count()],
    };
    let boundary = hydrodynamic_load_boundary(mesh, &field, body.q, 1.0);
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
        v: body.v,
        density: 0.0,
        viscosity: 1.0,
        torque_form,
    });
    (boundary, bulk)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs()
}

/// Largest relative force component gap `|bulk - boundary| / |boundary|`.
pub fn force_gap(boundary: &Load, bulk: &Load) -> f64 {
    rel(boundary.force[0], bulk.force[0]).max(rel(boundary.force[1], bulk.force[1]))
}

pub fn torque_gap(boundary: &Load, bulk: &Load) -> f64 {
    rel(boundary.torque, bulk.torque)
}
