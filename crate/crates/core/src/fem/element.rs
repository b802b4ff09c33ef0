//! Affine triangle geometry and the quadratic / linear Lagrange bases on it.
//!
//! Local quadratic node order: vertices 0, 1, 2, then edge nodes on (0,1),
//! (1,2), (2,0).

use super::quadrature::TRIANGLE_RULE;
use crate::mesh::{Mesh2D, Point};

pub type Grad = [f64; 2];

/// Quadratic basis values at barycentric coordinates `l`.
pub fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

pub fn p2_gradients(l: [f64; 3], gl: &[Grad; 3]) -> [Grad; 6] {
    let vertex = |i: usize| {
        let s = 4.0 * l[i] - 1.0;
        [s * gl[i][0], s * gl[i][1]]
    };
    let edge = |a: usize, b: usize| {
        [
            4.0 * (l[a] * gl[b][0] + l[b] * gl[a][0]),
            4.0 * (l[a] * gl[b][1] + l[b] * gl[a][1]),
        ]
    };
    [
        vertex(0),
        vertex(1),
        vertex(2),
        edge(0, 1),
        edge(1, 2),
        edge(2, 0),
    ]
}

/// Second derivatives of the quadratic basis, constant on the element.
pub fn p2_hessians(gl: &[Grad; 3]) -> [[[f64; 2]; 2]; 6] {
    let outer = |a: Grad, b: Grad| [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
    let vertex = |i: usize| {
        let o = outer(gl[i], gl[i]);
        [
            [4.0 * o[0][0], 4.0 * o[0][1]],
            [4.0 * o[1][0], 4.0 * o[1][1]],
        ]
    };
    let edge = |a: usize, b: usize| {
        let o = outer(gl[a], gl[b]);
        let p = outer(gl[b], gl[a]);
        [
            [4.0 * (o[0][0] + p[0][0]), 4.0 * (o[0][1] + p[0][1])],
            [4.0 * (o[1][0] + p[1][0]), 4.0 * (o[1][1] + p[1][1])],
        ]
    };
    [
        vertex(0),
        vertex(1),
        vertex(2),
        edge(0, 1),
        edge(1, 2),
        edge(2, 0),
    ]
}

/// Reference quadrature data shared by all elements.
#[derive(Clone, Debug)]
pub struct RefQuad {
    pub bary: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub p2: Vec<[f64; 6]>,
}

impl RefQuad {
    pub fn triangle() -> Self {
        let bary: Vec<[f64; 3]> = TRIANGLE_RULE
            .iter()
            .map(|q| [1.0 - q.point[0] - q.point[1], q.point[0], q.point[1]])
            .collect();
        let p2 = bary.iter().map(|&l| p2_values(l)).collect();
        let weights = TRIANGLE_RULE.iter().map(|q| q.weight).collect();
        Self { bary, weights, p2 }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }
}

/// Geometry of one affine triangle.
#[derive(Clone, Copy, Debug)]
pub struct Element {
    pub points: [Point; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates (= linear basis gradients).
    pub grad_l: [Grad; 3],
}

impl Element {
    pub fn new(points: [Point; 3]) -> Self {
        let [p0, p1, p2] = points;
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
        let grad_l = [
            [(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det],
            [(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det],
            [(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det],
        ];
        Self {
            points,
            area: 0.5 * det,
            grad_l,
        }
    }

    pub fn of(mesh: &Mesh2D, t: usize) -> Self {
        Self::new(mesh.triangle_points(t))
    }

    pub fn map(&self, l: [f64; 3]) -> Point {
        let [p0, p1, p2] = self.points;
        [
            l[0] * p0[0] + l[1] * p1[0] + l[2] * p2[0],
            l[0] * p0[1] + l[1] * p1[1] + l[2] * p2[1],
        ]
    }

    /// Physical quadrature weight for reference weight `w`.
    #[inline]
    pub fn jxw(&self, w: f64) -> f64 {
        2.0 * self.area * w
    }

    pub fn p2_gradients(&self, l: [f64; 3]) -> [Grad; 6] {
        p2_gradients(l, &self.grad_l)
    }

    pub fn p2_hessians(&self) -> [[[f64; 2]; 2]; 6] {
        p2_hessians(&self.grad_l)
    }
}

/// Evaluates a quadratic vector field (interleaved nodal coefficients) on an
/// element: value and gradient `g[i][j] = ∂u_i/∂x_j`.
pub fn eval_vector(
    coeffs: &[f64],
    nodes: &[usize; 6],
    phi: &[f64; 6],
    dphi: &[Grad; 6],
) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut u = [0.0; 2];
    let mut g = [[0.0; 2]; 2];
    for a in 0..6 {
        let ux = coeffs[2 * nodes[a]];
        let uy = coeffs[2 * nodes[a] + 1];
        u[0] += ux * phi[a];
        u[1] += uy * phi[a];
        for j in 0..2 {
            g[0][j] += ux * dphi[a][j];
            g[1][j] += uy * dphi[a][j];
        }
    }
    (u, g)
}

/// Evaluates a quadratic field stored per node as points.
pub fn eval_nodal_vector(values: &[Point], nodes: &[usize; 6], phi: &[f64; 6]) -> [f64; 2] {
    let mut v = [0.0; 2];
    for a in 0..6 {
        v[0] += values[nodes[a]][0] * phi[a];
        v[1] += values[nodes[a]][1] * phi[a];
    }
    v
}
