//! Element kernels and global block assembly.

use super::element::{eval_nodal_vector, eval_vector, Element, Grad, RefQuad};
use super::sparse::CooMatrix;
use crate::mesh::{Mesh2D, Point};

/// Which form of the convective trilinear term to assemble.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConvectionForm {
    /// `½∫(u·∇φ)·w − ½∫(u·∇w)·φ` for the fluid part; skew-symmetric in the
    /// test and trial functions.
    #[default]
    Antisymmetric,
    /// `∫(u·∇φ)·w` as it arises from the transport theorem.
    Plain,
}

/// Basis data at one quadrature point of one element.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QpData {
    pub x: Point,
    pub jxw: f64,
    pub l: [f64; 3],
    pub phi: [f64; 6],
    pub dphi: [Grad; 6],
}

pub(crate) fn qp_data(el: &Element, rq: &RefQuad) -> [QpData; 7] {
    debug_assert_eq!(rq.len(), 7);
    std::array::from_fn(|q| {
        let l = rq.bary[q];
        QpData {
            x: el.map(l),
            jxw: el.jxw(rq.weights[q]),
            l,
            phi: rq.p2[q],
            dphi: el.p2_gradients(l),
        }
    })
}

#[inline]
fn dot(a: Grad, b: Grad) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn local_stiffness(qps: &[QpData; 7]) -> [[f64; 6]; 6] {
    let mut k = [[0.0; 6]; 6];
    for qp in qps {
        for a in 0..6 {
            for b in 0..6 {
                k[a][b] += qp.jxw * dot(qp.dphi[a], qp.dphi[b]);
            }
        }
    }
    k
}

pub(crate) fn local_mass(qps: &[QpData; 7]) -> [[f64; 6]; 6] {
    let mut m = [[0.0; 6]; 6];
    for qp in qps {
        for a in 0..6 {
            for b in 0..6 {
                m[a][b] += qp.jxw * qp.phi[a] * qp.phi[b];
            }
        }
    }
    m
}

/// `D[k][2b + c] = −∫ ψ_k ∂_c φ_b`
pub(crate) fn local_divergence(qps: &[QpData; 7]) -> [[f64; 12]; 3] {
    let mut d = [[0.0; 12]; 3];
    for qp in qps {
        for k in 0..3 {
            for b in 0..6 {
                for c in 0..2 {
                    d[k][2 * b + c] -= qp.jxw * qp.l[k] * qp.dphi[b][c];
                }
            }
        }
    }
    d
}

/// `∫ ψ_k` for the linear basis.
pub(crate) fn local_pressure_integrals(el: &Element) -> [f64; 3] {
    [el.area / 3.0; 3]
}

/// Scalar convection kernel `C[a][b]` (test `a`, trial `b`), applied
/// identically to both velocity components.
pub(crate) fn local_convection(
    qps: &[QpData; 7],
    advecting: &[f64],
    mesh_velocity: Option<&[Point]>,
    nodes: &[usize; 6],
    density: f64,
    form: ConvectionForm,
) -> [[f64; 6]; 6] {
    let mut c = [[0.0; 6]; 6];
    for qp in qps {
        let (u, _) = eval_vector(advecting, nodes, &qp.phi, &qp.dphi);
        let v = mesh_velocity.map_or([0.0; 2], |mv| eval_nodal_vector(mv, nodes, &qp.phi));
        let w = qp.jxw * density;
        match form {
            ConvectionForm::Plain => {
                let rel = [u[0] - v[0], u[1] - v[1]];
                for a in 0..6 {
                    let adv = dot(rel, qp.dphi[a]);
                    for b in 0..6 {
                        c[a][b] -= w * adv * qp.phi[b];
                    }
                }
            }
            ConvectionForm::Antisymmetric => {
                let u_grad: [f64; 6] = std::array::from_fn(|a| dot(u, qp.dphi[a]));
                let v_grad: [f64; 6] = std::array::from_fn(|a| dot(v, qp.dphi[a]));
                for a in 0..6 {
                    for b in 0..6 {
                        c[a][b] -= w * 0.5 * (u_grad[a] * qp.phi[b] - u_grad[b] * qp.phi[a]);
                        c[a][b] += w * v_grad[a] * qp.phi[b];
                    }
                }
            }
        }
    }
    c
}

/// Stiffness matrix of the linear Lagrange basis on one triangle.
pub fn p1_stiffness(points: [Point; 3]) -> [[f64; 3]; 3] {
    let el = Element::new(points);
    let mut k = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            k[a][b] = el.area * dot(el.grad_l[a], el.grad_l[b]);
        }
    }
    k
}

/// Viscous block `A` (vector Laplacian scaled by the viscosity) and
/// divergence block `B` (`B_kj = −∫ψ_k ∇·φ_j`), both over all velocity dofs.
#[derive(Clone, Debug)]
pub struct StokesBlocks {
    pub a: CooMatrix,
    pub b: CooMatrix,
}

pub fn assemble_stokes_blocks(mesh: &Mesh2D, viscosity: f64) -> StokesBlocks {
    let nn = mesh.node_count();
    let rq = RefQuad::triangle();
    let mut a = CooMatrix::new(2 * nn, 2 * nn);
    let mut b = CooMatrix::new(mesh.vertex_count(), 2 * nn);
    for t in 0..mesh.triangle_count() {
        let el = Element::of(mesh, t);
        let qps = qp_data(&el, &rq);
        let nodes = mesh.triangle_nodes(t);
        let k = local_stiffness(&qps);
        for i in 0..6 {
            for j in 0..6 {
                for c in 0..2 {
                    a.push(2 * nodes[i] + c, 2 * nodes[j] + c, viscosity * k[i][j]);
                }
            }
        }
        let d = local_divergence(&qps);
        let verts = mesh.triangles()[t];
        for kk in 0..3 {
            for j in 0..6 {
                for c in 0..2 {
                    b.push(verts[kk], 2 * nodes[j] + c, d[kk][2 * j + c]);
                }
            }
        }
    }
    StokesBlocks { a, b }
}

/// Vector mass matrix over all velocity dofs.
pub fn assemble_mass(mesh: &Mesh2D) -> CooMatrix {
    let nn = mesh.node_count();
    let rq = RefQuad::triangle();
    let mut m = CooMatrix::new(2 * nn, 2 * nn);
    for t in 0..mesh.triangle_count() {
        let qps = qp_data(&Element::of(mesh, t), &rq);
        let nodes = mesh.triangle_nodes(t);
        let ml = local_mass(&qps);
        for i in 0..6 {
            for j in 0..6 {
                for c in 0..2 {
                    m.push(2 * nodes[i] + c, 2 * nodes[j] + c, ml[i][j]);
                }
            }
        }
    }
    m
}

/// Scalar quadratic Laplacian over all nodes.
pub fn assemble_laplacian(mesh: &Mesh2D) -> CooMatrix {
    let nn = mesh.node_count();
    let rq = RefQuad::triangle();
    let mut k = CooMatrix::new(nn, nn);
    for t in 0..mesh.triangle_count() {
        let qps = qp_data(&Element::of(mesh, t), &rq);
        let nodes = mesh.triangle_nodes(t);
        let kl = local_stiffness(&qps);
        for i in 0..6 {
            for j in 0..6 {
                k.push(nodes[i], nodes[j], kl[i][j]);
            }
        }
    }
    k
}

/// Convection block over all velocity dofs for the relative velocity
/// `advecting − mesh_velocity`.
pub fn assemble_convection(
    mesh: &Mesh2D,
    advecting: &[f64],
    mesh_velocity: Option<&[Point]>,
    density: f64,
    form: ConvectionForm,
) -> CooMatrix {
    let nn = mesh.node_count();
    let rq = RefQuad::triangle();
    let mut c = CooMatrix::new(2 * nn, 2 * nn);
    for t in 0..mesh.triangle_count() {
        let qps = qp_data(&Element::of(mesh, t), &rq);
        let nodes = mesh.triangle_nodes(t);
        let cl = local_convection(&qps, advecting, mesh_velocity, &nodes, density, form);
        for i in 0..6 {
            for j in 0..6 {
                for comp in 0..2 {
                    c.push(2 * nodes[i] + comp, 2 * nodes[j] + comp, cl[i][j]);
                }
            }
        }
    }
    c
}
