//! Rigid-disk state, mass properties, hydrodynamic loads and the discrete
//! equations of motion.

use crate::extension::{CutoffField, ExtensionField};
use crate::fem::assembly::{qp_data, QpData};
use crate::fem::element::{eval_vector, p2_gradients, p2_values, Element, RefQuad};
use crate::fem::quadrature::{EDGE_RULE, TRIANGLE_RULE};
use crate::fem::FieldPair;
use crate::mesh::{cross, sub, Mesh2D, NodeTag, Point};
use crate::{Error, Result};

pub const STANDARD_GRAVITY: [f64; 2] = [0.0, -9.8];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidParams {
    pub density: f64,
    pub radius: f64,
    pub gravity: [f64; 2],
}

impl RigidParams {
    pub fn new(density: f64, radius: f64) -> Self {
        Self {
            density,
            radius,
            gravity: STANDARD_GRAVITY,
        }
    }

    pub fn mass(&self) -> f64 {
        self.density * std::f64::consts::PI * self.radius * self.radius
    }

    pub fn inertia(&self) -> f64 {
        inertia_scalar(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.density > 0.0 && self.radius > 0.0 && self.density.is_finite() {
            Ok(())
        } else {
            Err(Error::InconsistentConfig(format!(
                "invalid body parameters {self:?}"
            )))
        }
    }
}

/// `∫_B ρ_B |x − q|² = m r² / 2` for the disk.
pub fn inertia_scalar(params: &RigidParams) -> f64 {
    0.5 * params.mass() * params.radius * params.radius
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RigidState {
    pub q: Point,
    pub v: [f64; 2],
    pub omega: f64,
}

impl RigidState {
    pub fn at_rest(q: Point) -> Self {
        Self {
            q,
            ..Default::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.v).all(|x| x.is_finite()) && self.omega.is_finite()
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.q[0], self.q[1], self.v[0], self.v[1], self.omega]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidTrajectory {
    pub tau: f64,
    pub states: Vec<RigidState>,
}

impl RigidTrajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn initial(&self) -> &RigidState {
        &self.states[0]
    }

    pub fn last(&self) -> &RigidState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Discrete ℓ² distance over all states and components.
    pub fn distance(&self, other: &RigidTrajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .flat_map(|(a, b)| a.as_array().into_iter().zip(b.as_array()))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.states
            .iter()
            .flat_map(|s| s.as_array())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// Hydrodynamic force and torque on the body.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Load {
    pub force: [f64; 2],
    pub torque: f64,
}

impl Load {
    pub fn is_finite(&self) -> bool {
        self.force[0].is_finite() && self.force[1].is_finite() && self.torque.is_finite()
    }
}

/// `𝕋 = −pI + μ(∇u + ∇uᵀ)`
#[inline]
fn stress(p: f64, g: [[f64; 2]; 2], viscosity: f64) -> [[f64; 2]; 2] {
    [
        [
            -p + 2.0 * viscosity * g[0][0],
            viscosity * (g[0][1] + g[1][0]),
        ],
        [
            viscosity * (g[1][0] + g[0][1]),
            -p + 2.0 * viscosity * g[1][1],
        ],
    ]
}

fn pressure_at(field: &FieldPair, verts: [usize; 3], l: [f64; 3]) -> f64 {
    l[0] * field.pressure[verts[0]]
        + l[1] * field.pressure[verts[1]]
        + l[2] * field.pressure[verts[2]]
}

/// `force = −∮ 𝕋ν`, `torque = −∮ (x − q)×𝕋ν` over the body edges, with `ν`
/// the outward normal of the fluid domain and `𝕋` taken from the adjacent
/// fluid element.
pub fn hydrodynamic_load_boundary(
    mesh: &Mesh2D,
    field: &FieldPair,
    q: Point,
    viscosity: f64,
) -> Load {
    let mut load = Load::default();
    for be in mesh
        .boundary_edges()
        .iter()
        .filter(|b| b.tag == NodeTag::Body)
    {
        let t = be.triangle;
        let el = Element::of(mesh, t);
        let nodes = mesh.triangle_nodes(t);
        let verts = mesh.triangles()[t];
        let (ka, kb) = (be.local, (be.local + 1) % 3);
        let a = el.points[ka];
        let b = el.points[kb];
        let d = sub(b, a);
        let len = d[0].hypot(d[1]);
        let nu = [d[1] / len, -d[0] / len];
        for gp in &EDGE_RULE {
            let s = gp.point[0];
            let mut l = [0.0; 3];
            l[ka] = 1.0 - s;
            l[kb] = s;
            let phi = p2_values(l);
            let dphi = el.p2_gradients(l);
            let (_, g) = eval_vector(&field.velocity, &nodes, &phi, &dphi);
            let tt = stress(pressure_at(field, verts, l), g, viscosity);
            let tn = [
                tt[0][0] * nu[0] + tt[0][1] * nu[1],
                tt[1][0] * nu[0] + tt[1][1] * nu[1],
            ];
            let x = el.map(l);
            let w = gp.weight * len;
            load.force[0] -= w * tn[0];
            load.force[1] -= w * tn[1];
            load.torque -= w * cross(sub(x, q), tn);
        }
    }
    load
}

/// How the bulk torque handles the `ζ y×(∇·𝕋)` term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BulkTorque {
    /// Evaluate `∇·𝕋` elementwise from the discrete fields (constant second
    /// derivatives of the quadratic velocity, constant pressure gradient).
    #[default]
    StressCurl,
    /// Replace `∇·𝕋` by the momentum balance, as for the force.
    Momentum,
}

/// Data for the volume form of the hydrodynamic load at step `n`.
pub struct BulkLoadInput<'a> {
    pub old_mesh: &'a Mesh2D,
    pub old_field: &'a FieldPair,
    pub old_cutoff: &'a CutoffField,
    pub new_mesh: &'a Mesh2D,
    pub new_field: &'a FieldPair,
    pub new_cutoff: &'a CutoffField,
    /// Mesh velocity on the new mesh.
    pub mesh_velocity: &'a ExtensionField,
    pub tau: f64,
    /// Body centre at steps `n − 1` and `n`.
    pub old_q: Point,
    pub q: Point,
    /// Body velocity at step `n`.
    pub v: Point,
    pub density: f64,
    pub viscosity: f64,
    pub torque_form: BulkTorque,
}

fn scalar_at(values: &[f64], nodes: &[usize; 6], qp: &QpData) -> (f64, [f64; 2]) {
    let mut v = 0.0;
    let mut g = [0.0; 2];
    for a in 0..6 {
        let c = values[nodes[a]];
        v += c * qp.phi[a];
        g[0] += c * qp.dphi[a][0];
        g[1] += c * qp.dphi[a][1];
    }
    (v, g)
}

/// `(∫ ζ u, ∫ ζ (x − q)×u)` over a mesh.
fn weighted_momentum(
    mesh: &Mesh2D,
    field: &FieldPair,
    zeta: &CutoffField,
    q: Point,
) -> ([f64; 2], f64) {
    let rq = RefQuad::triangle();
    let mut s = [0.0; 2];
    let mut a = 0.0;
    for t in 0..mesh.triangle_count() {
        let nodes = mesh.triangle_nodes(t);
        for qp in qp_data(&Element::of(mesh, t), &rq) {
            let (u, _) = eval_vector(&field.velocity, &nodes, &qp.phi, &qp.dphi);
            let (z, _) = scalar_at(&zeta.values, &nodes, &qp);
            s[0] += qp.jxw * z * u[0];
            s[1] += qp.jxw * z * u[1];
            a += qp.jxw * z * cross(sub(qp.x, q), u);
        }
    }
    (s, a)
}

/// Elementwise `−∇p + μΔu + μ∇(∇·u)`.
fn stress_divergence(
    el: &Element,
    field: &FieldPair,
    nodes: &[usize; 6],
    verts: [usize; 3],
    mu: f64,
) -> [f64; 2] {
    let hess = el.p2_hessians();
    let mut d = [0.0; 2];
    for a in 0..6 {
        let ux = field.velocity[2 * nodes[a]];
        let uy = field.velocity[2 * nodes[a] + 1];
        let h = hess[a];
        let lap = h[0][0] + h[1][1];
        d[0] += mu * (ux * lap + ux * h[0][0] + uy * h[1][0]);
        d[1] += mu * (uy * lap + ux * h[0][1] + uy * h[1][1]);
    }
    for k in 0..3 {
        d[0] -= field.pressure[verts[k]] * el.grad_l[k][0];
        d[1] -= field.pressure[verts[k]] * el.grad_l[k][1];
    }
    d
}

/// Volume form of the load, using `ζ = 1` on the body and `0` on the walls.
/// With `y = x − q`, `wⱼ = y₁𝕋₂ⱼ − y₂𝕋₁ⱼ` and `∂ₜζ = ∂°ζ − V·∇ζ`:
///
/// force  = −∫(∇ζ)ᵀ𝕋 − (ρ/τ)(∫_{Ωₙ} ζₙuₙ − ∫_{Ωₙ₋₁} ζₙ₋₁uₙ₋₁) + ρ∫(∂ₜζ + u·∇ζ) u
///
/// torque = −∫∇ζ·w − ∫ζ y×(∇·𝕋)ₕ                              (`StressCurl`)
///
/// torque = −∫∇ζ·w − (ρ/τ)(∫_{Ωₙ} ζₙ yₙ×uₙ − ∫_{Ωₙ₋₁} ζₙ₋₁ yₙ₋₁×uₙ₋₁)
///          + ρ∫(∂ₜζ + u·∇ζ) y×u − ρ∫ζ v×u                       (`Momentum`)
///
/// where `∂°ζ` is the nodal difference quotient along mesh trajectories, `v`
/// the body velocity and `(∇·𝕋)ₕ = −∇p + μΔu + μ∇(∇·u)` is evaluated
/// elementwise.
pub fn hydrodynamic_load_bulk(input: &BulkLoadInput<'_>) -> Load {
    let mesh = input.new_mesh;
    let field = input.new_field;
    let (rho, mu, tau) = (input.density, input.viscosity, input.tau);
    let rq = RefQuad::triangle();
    let dzeta: Vec<f64> = input
        .new_cutoff
        .values
        .iter()
        .zip(&input.old_cutoff.values)
        .map(|(a, b)| (a - b) / tau)
        .collect();

    let mut force = [0.0; 2];
    let mut torque = 0.0;
    for t in 0..mesh.triangle_count() {
        let el = Element::of(mesh, t);
        let nodes = mesh.triangle_nodes(t);
        let verts = mesh.triangles()[t];
        let div_t = match input.torque_form {
            BulkTorque::StressCurl => stress_divergence(&el, field, &nodes, verts, mu),
            BulkTorque::Momentum => [0.0; 2],
        };
        for qp in qp_data(&el, &rq) {
            let (u, g) = eval_vector(&field.velocity, &nodes, &qp.phi, &qp.dphi);
            let (z, gz) = scalar_at(&input.new_cutoff.values, &nodes, &qp);
            let (zdot, _) = scalar_at(&dzeta, &nodes, &qp);
            let mut v = [0.0; 2];
            for a in 0..6 {
                let mv = input.mesh_velocity.values[nodes[a]];
                v[0] += mv[0] * qp.phi[a];
                v[1] += mv[1] * qp.phi[a];
            }
            let tt = stress(pressure_at(field, verts, qp.l), g, mu);
            let transport = zdot - (v[0] * gz[0] + v[1] * gz[1]) + (u[0] * gz[0] + u[1] * gz[1]);
            for j in 0..2 {
                let gzt = gz[0] * tt[0][j] + gz[1] * tt[1][j];
                force[j] += qp.jxw * (-gzt + rho * transport * u[j]);
            }
            let y = sub(qp.x, input.q);
            let w = [
                y[0] * tt[1][0] - y[1] * tt[0][0],
                y[0] * tt[1][1] - y[1] * tt[0][1],
            ];
            torque -= qp.jxw * (gz[0] * w[0] + gz[1] * w[1]);
            match input.torque_form {
                BulkTorque::StressCurl => torque -= qp.jxw * z * cross(y, div_t),
                BulkTorque::Momentum => {
                    torque += qp.jxw * rho * (transport * cross(y, u) - z * cross(input.v, u));
                }
            }
        }
    }
    if rho != 0.0 {
        let (new, new_a) = weighted_momentum(mesh, field, input.new_cutoff, input.q);
        let (old, old_a) = weighted_momentum(
            input.old_mesh,
            input.old_field,
            input.old_cutoff,
            input.old_q,
        );
        for j in 0..2 {
            force[j] -= rho / tau * (new[j] - old[j]);
        }
        if input.torque_form == BulkTorque::Momentum {
            torque -= rho / tau * (new_a - old_a);
        }
    }
    Load { force, torque }
}

/// Integrates the equations of motion over `loads.len()` steps:
/// `vₙ = vₙ₋₁ + τ(g + Fₙ/m)`, `qₙ = qₙ₋₁ + τvₙ`, `ωₙ = ωₙ₋₁ + τ Mₙ/J`.
pub fn trajectory_update(
    loads: &[Load],
    params: &RigidParams,
    initial: RigidState,
    tau: f64,
) -> Result<RigidTrajectory> {
    let m = params.mass();
    let j = params.inertia();
    let mut states = Vec::with_capacity(loads.len() + 1);
    states.push(initial);
    let mut s = initial;
    for (n, load) in loads.iter().enumerate() {
        if !load.is_finite() {
            return Err(Error::NonFiniteLoad { step: n + 1 });
        }
        s = advance_state(&s, load, params, m, j, tau);
        states.push(s);
    }
    Ok(RigidTrajectory { tau, states })
}

/// One step of the discrete equations of motion.
pub fn advance_state(
    s: &RigidState,
    load: &Load,
    params: &RigidParams,
    m: f64,
    j: f64,
    tau: f64,
) -> RigidState {
    let (fx, fy) = if m > 0.0 {
        (load.force[0] / m, load.force[1] / m)
    } else {
        (0.0, 0.0)
    };
    let v = [
        s.v[0] + tau * (params.gravity[0] + fx),
        s.v[1] + tau * (params.gravity[1] + fy),
    ];
    let q = [s.q[0] + tau * v[0], s.q[1] + tau * v[1]];
    let omega = if j > 0.0 {
        s.omega + tau * load.torque / j
    } else {
        s.omega
    };
    RigidState { q, v, omega }
}

/// `∫ ρ_B |x − q|²` over a triangulated disk, using the quadratic
/// (isoparametric) element map so that curved boundary edges follow the
/// nodes placed on the circle.
pub fn inertia_quadrature(disk: &Mesh2D, q: Point, density: f64) -> f64 {
    let ref_grad = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let mut total = 0.0;
    for t in 0..disk.triangle_count() {
        let nodes = disk.triangle_nodes(t);
        let xs: [Point; 6] = std::array::from_fn(|a| disk.node(nodes[a]));
        for qp in &TRIANGLE_RULE {
            let l = [1.0 - qp.point[0] - qp.point[1], qp.point[0], qp.point[1]];
            let phi = p2_values(l);
            let dphi = p2_gradients(l, &ref_grad);
            let mut x = [0.0; 2];
            let mut jac = [[0.0; 2]; 2];
            for a in 0..6 {
                for r in 0..2 {
                    x[r] += xs[a][r] * phi[a];
                    for c in 0..2 {
                        jac[r][c] += xs[a][r] * dphi[a][c];
                    }
                }
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let y = sub(x, q);
            total += qp.weight * det.abs() * density * (y[0] * y[0] + y[1] * y[1]);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_disk_mesh, generate_mesh, Circle, Geometry};

    #[test]
    fn mass_properties_of_the_presets() {
        let heavy = RigidParams::new(200.0 / std::f64::consts::PI, 0.1);
        assert!((heavy.mass() - 2.0).abs() < 1e-14);
        assert!((heavy.inertia() - 0.01).abs() < 1e-16);
        let light = RigidParams::new(10.0 / std::f64::consts::PI, 0.1);
        assert!((light.mass() - 0.1).abs() < 1e-15);
        assert!((light.inertia() - 5e-4).abs() < 1e-17);
        let point = RigidParams::new(1.0, 0.0);
        assert_eq!(point.mass(), 0.0);
        assert_eq!(point.inertia(), 0.0);
    }

    #[test]
    fn free_fall_reaches_expected_velocity() {
        let p = RigidParams::new(200.0 / std::f64::consts::PI, 0.1);
        let loads = vec![Load::default(); 200];
        let traj = trajectory_update(&loads, &p, RigidState::at_rest([0.5, 0.6]), 5e-4).unwrap();
        assert_eq!(traj.states.len(), 201);
        let last = traj.last();
        assert!((last.v[1] + 0.98).abs() < 1e-12);
        // q_y = q0 − 9.8 τ² Σ k
        let expected = 0.6 - 9.8 * 5e-4 * 5e-4 * (200.0 * 201.0 / 2.0);
        assert!((last.q[1] - expected).abs() < 1e-12);
        assert!((last.q[1] - (0.6 - 0.049)).abs() < 3e-4);
    }

    #[test]
    fn balanced_and_weightless_motion() {
        let mut p = RigidParams::new(200.0 / std::f64::consts::PI, 0.1);
        let s0 = RigidState {
            q: [0.5, 0.5],
            v: [0.1, -0.2],
            omega: 0.3,
        };
        let balance = Load {
            force: [0.0, p.mass() * 9.8],
            torque: 0.0,
        };
        let traj = trajectory_update(&[balance; 10], &p, s0, 0.01).unwrap();
        assert!(traj
            .states
            .iter()
            .all(|s| (s.v[0] - 0.1).abs() < 1e-15 && (s.v[1] + 0.2).abs() < 1e-14));
        p.gravity = [0.0, 0.0];
        let rest = RigidState::at_rest([0.5, 0.5]);
        let traj = trajectory_update(&[Load::default(); 10], &p, rest, 0.01).unwrap();
        assert!(traj.states.iter().all(|s| *s == rest));
    }

    #[test]
    fn non_finite_loads_are_rejected() {
        let p = RigidParams::new(1.0, 0.1);
        let loads = [
            Load::default(),
            Load {
                force: [f64::NAN, 0.0],
                torque: 0.0,
            },
        ];
        let err = trajectory_update(&loads, &p, RigidState::default(), 0.1).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoad { step: 2 }));
    }

    fn ball_mesh() -> Mesh2D {
        generate_mesh(&Geometry::unit_box([0.5, 0.6], 0.1, 6.284e-2)).unwrap()
    }

    #[test]
    fn constant_pressure_exerts_no_load() {
        let mesh = ball_mesh();
        let f = FieldPair::interpolate(&mesh, |_| [0.0, 0.0], |_| 3.7);
        let l = hydrodynamic_load_boundary(&mesh, &f, [0.5, 0.6], 1.0);
        assert!(l.force[0].abs() < 1e-12 && l.force[1].abs() < 1e-12 && l.torque.abs() < 1e-12);
    }

    #[test]
    fn linear_pressure_gives_buoyancy_like_force() {
        let mesh = ball_mesh();
        let f = FieldPair::interpolate(&mesh, |_| [0.0, 0.0], |x| x[0]);
        let l = hydrodynamic_load_boundary(&mesh, &f, [0.5, 0.6], 1.0);
        // brute force: midpoint rule with many sub-intervals on every body edge
        let mut oracle = [0.0; 2];
        for be in mesh
            .boundary_edges()
            .iter()
            .filter(|b| b.tag == NodeTag::Body)
        {
            let [a, b] = mesh.edges()[be.edge];
            let tri = mesh.triangles()[be.triangle];
            // orient as seen from the fluid triangle
            let (a, b) = if tri[be.local] == a { (a, b) } else { (b, a) };
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let nu = [pb[1] - pa[1], -(pb[0] - pa[0])];
            let n = 1000;
            for i in 0..n {
                let s = (i as f64 + 0.5) / n as f64;
                let p = pa[0] + s * (pb[0] - pa[0]);
                oracle[0] += p * nu[0] / n as f64;
                oracle[1] += p * nu[1] / n as f64;
            }
        }
        assert!((l.force[0] - oracle[0]).abs() < 1e-9);
        assert!((l.force[1] - oracle[1]).abs() < 1e-9);
        // ν points into the body, so −∮(−p)ν = ∮pν = −∫_B ∇p = (−|B_h|, 0)
        let area: f64 = {
            let pts: Vec<Point> = mesh
                .vertices()
                .iter()
                .zip(mesh.vertex_tags())
                .filter(|(_, t)| **t == NodeTag::Body)
                .map(|(p, _)| *p)
                .collect();
            let c = [0.5, 0.6];
            let mut angles: Vec<(f64, Point)> = pts
                .iter()
                .map(|p| ((p[1] - c[1]).atan2(p[0] - c[0]), *p))
                .collect();
            angles.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            (0..angles.len())
                .map(|i| cross(angles[i].1, angles[(i + 1) % angles.len()].1) * 0.5)
                .sum()
        };
        assert!((l.force[0] + area).abs() < 1e-12);
        assert!((area - std::f64::consts::PI * 0.01).abs() / (std::f64::consts::PI * 0.01) < 0.07);
    }

    #[test]
    fn inertia_quadrature_converges() {
        let c = Circle::new([0.3, -0.2], 0.1);
        let rho = 200.0 / std::f64::consts::PI;
        let exact = inertia_scalar(&RigidParams::new(rho, 0.1));
        let mut errs = Vec::new();
        let mut disk = generate_disk_mesh(c, 0.06).unwrap();
        for _ in 0..3 {
            errs.push((inertia_quadrature(&disk, c.center, rho) - exact).abs() / exact);
            disk = disk.refine_uniform(Some(c)).unwrap();
        }
        assert!(errs[0] < 0.02, "{errs:?}");
        assert!(
            errs[1] < errs[0] / 3.5 && errs[2] < errs[1] / 3.5,
            "{errs:?}"
        );
    }
}
