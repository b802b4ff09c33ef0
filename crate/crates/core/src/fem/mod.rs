//! Taylor–Hood (quadratic velocity, linear pressure) finite elements on
//! [`Mesh2D`]: quadrature, local kernels, global assembly and the direct
//! solution of the resulting saddle-point systems.

pub mod assembly;
pub mod element;
pub mod quadrature;
pub mod saddle;
pub mod sparse;

pub use assembly::{
    assemble_convection, assemble_laplacian, assemble_mass, assemble_stokes_blocks, p1_stiffness,
    ConvectionForm, StokesBlocks,
};
pub use quadrature::{quadrature_rule, QuadDomain, QuadPoint};
pub use saddle::{
    assemble_saddle, divergence_residual, pressure_mean, solve_saddle_point, ConvectionTerm,
    MomentumTerms, SaddleSolver, SparseSystem,
};
pub use sparse::CooMatrix;

use crate::mesh::{Mesh2D, NodeTag, Point};

/// Prescribed velocity on boundary nodes.
pub trait BoundaryVelocity {
    fn velocity(&self, tag: NodeTag, x: Point) -> [f64; 2];
}

impl<F> BoundaryVelocity for F
where
    F: Fn(NodeTag, Point) -> [f64; 2],
{
    fn velocity(&self, tag: NodeTag, x: Point) -> [f64; 2] {
        self(tag, x)
    }
}

/// No-slip walls, zero velocity on the body.
pub struct AtRest;

impl BoundaryVelocity for AtRest {
    fn velocity(&self, _: NodeTag, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// Degree-of-freedom layout. Velocity dofs are interleaved per quadratic
/// node (`2 * node + component`); pressure dofs are the vertices.
#[derive(Clone, Debug)]
pub struct DofMap {
    n_nodes: usize,
    n_vertices: usize,
    dirichlet: Vec<bool>,
    free_index: Vec<usize>,
    n_free: usize,
}

pub const NOT_FREE: usize = usize::MAX;

impl DofMap {
    /// Every wall and body node carries a Dirichlet condition.
    pub fn new(mesh: &Mesh2D) -> Self {
        let n_nodes = mesh.node_count();
        let dirichlet: Vec<bool> = (0..n_nodes)
            .map(|i| mesh.node_tag(i).is_boundary())
            .collect();
        let mut free_index = vec![NOT_FREE; 2 * n_nodes];
        let mut n_free = 0;
        for (node, &d) in dirichlet.iter().enumerate() {
            if !d {
                free_index[2 * node] = n_free;
                free_index[2 * node + 1] = n_free + 1;
                n_free += 2;
            }
        }
        Self {
            n_nodes,
            n_vertices: mesh.vertex_count(),
            dirichlet,
            free_index,
            n_free,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n_nodes
    }

    pub fn velocity_dofs(&self) -> usize {
        2 * self.n_nodes
    }

    pub fn pressure_dofs(&self) -> usize {
        self.n_vertices
    }

    pub fn free_velocity_dofs(&self) -> usize {
        self.n_free
    }

    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.dirichlet[node]
    }

    /// Compressed index of a velocity dof, or [`NOT_FREE`].
    #[inline]
    pub fn free_index(&self, dof: usize) -> usize {
        self.free_index[dof]
    }

    /// Full velocity vector holding the boundary values on Dirichlet dofs and
    /// zero elsewhere.
    pub fn dirichlet_values(&self, mesh: &Mesh2D, bc: &dyn BoundaryVelocity) -> Vec<f64> {
        let mut g = vec![0.0; 2 * self.n_nodes];
        for node in 0..self.n_nodes {
            if self.dirichlet[node] {
                let u = bc.velocity(mesh.node_tag(node), mesh.node(node));
                g[2 * node] = u[0];
                g[2 * node + 1] = u[1];
            }
        }
        g
    }
}

/// Velocity (interleaved, per quadratic node) and pressure (per vertex)
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
}

impl FieldPair {
    pub fn zeros(mesh: &Mesh2D) -> Self {
        Self {
            velocity: vec![0.0; 2 * mesh.node_count()],
            pressure: vec![0.0; mesh.vertex_count()],
        }
    }

    pub fn matches(&self, mesh: &Mesh2D) -> bool {
        self.velocity.len() == 2 * mesh.node_count() && self.pressure.len() == mesh.vertex_count()
    }

    pub fn nodal_velocity(&self, node: usize) -> [f64; 2] {
        [self.velocity[2 * node], self.velocity[2 * node + 1]]
    }

    /// Interpolates analytic fields at the nodes.
    pub fn interpolate(
        mesh: &Mesh2D,
        u: impl Fn(Point) -> [f64; 2],
        p: impl Fn(Point) -> f64,
    ) -> Self {
        let mut velocity = Vec::with_capacity(2 * mesh.node_count());
        for x in mesh.nodes() {
            velocity.extend_from_slice(&u(x));
        }
        let pressure = mesh.vertices().iter().map(|&x| p(x)).collect();
        Self { velocity, pressure }
    }

    pub fn max_speed(&self) -> f64 {
        self.velocity
            .chunks_exact(2)
            .map(|c| c[0].hypot(c[1]))
            .fold(0.0, f64::max)
    }
}
