//! Saddle-point systems for the velocity–pressure pair with strongly imposed
//! boundary velocities and a zero-mean pressure constraint.
//!
//! Unknown ordering: free velocity dofs, pressure (one per vertex), then the
//! Lagrange multiplier for the pressure mean.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::SparseColMat;
use faer::Mat;

use super::assembly::{
    local_convection, local_divergence, local_mass, local_pressure_integrals, local_stiffness,
    qp_data, ConvectionForm,
};
use super::element::{Element, RefQuad};
use super::sparse::{csc_mul_vec, CooMatrix};
use super::{BoundaryVelocity, DofMap, FieldPair, NOT_FREE};
use crate::mesh::{Mesh2D, Point};
use crate::{Error, Result};

/// Convective contribution to the momentum operator.
#[derive(Clone, Copy)]
pub struct ConvectionTerm<'a> {
    /// Advecting velocity, interleaved per node.
    pub advecting: &'a [f64],
    /// Mesh velocity per node, if the mesh moves.
    pub mesh_velocity: Option<&'a [Point]>,
    pub density: f64,
    pub form: ConvectionForm,
}

/// Momentum operator `mass_coeff·M + viscosity·K + C` and its right-hand side
/// `∫f·φ + load`.
#[derive(Clone, Copy, Default)]
pub struct MomentumTerms<'a> {
    pub viscosity: f64,
    pub mass_coeff: f64,
    pub convection: Option<ConvectionTerm<'a>>,
    pub forcing: Option<&'a dyn Fn(Point) -> [f64; 2]>,
    /// Extra right-hand side over all velocity dofs (already integrated).
    pub load: Option<&'a [f64]>,
}

/// Assembled and reduced saddle-point system.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CooMatrix,
    pub rhs: Vec<f64>,
    pub n_free: usize,
    pub n_pressure: usize,
    /// Index of the multiplier row.
    pub mean_row: usize,
    /// Boundary values over all velocity dofs.
    pub dirichlet: Vec<f64>,
}

impl SparseSystem {
    pub fn size(&self) -> usize {
        self.mean_row + 1
    }
}

pub fn assemble_saddle(
    mesh: &Mesh2D,
    dofs: &DofMap,
    terms: &MomentumTerms<'_>,
    bc: &dyn BoundaryVelocity,
) -> SparseSystem {
    let n_free = dofs.free_velocity_dofs();
    let n_pressure = dofs.pressure_dofs();
    let mean_row = n_free + n_pressure;
    let n = mean_row + 1;
    let g = dofs.dirichlet_values(mesh, bc);

    let rq = RefQuad::triangle();
    let mut mat = CooMatrix::new(n, n);
    let mut rhs = vec![0.0; n];
    mat.entries
        .reserve(mesh.triangle_count() * (144 + 144 + 6) + n);

    for t in 0..mesh.triangle_count() {
        let el = Element::of(mesh, t);
        let qps = qp_data(&el, &rq);
        let nodes = mesh.triangle_nodes(t);
        let verts = mesh.triangles()[t];

        let mut a = local_stiffness(&qps);
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v *= terms.viscosity;
            }
        }
        if terms.mass_coeff != 0.0 {
            let m = local_mass(&qps);
            for i in 0..6 {
                for j in 0..6 {
                    a[i][j] += terms.mass_coeff * m[i][j];
                }
            }
        }
        if let Some(c) = &terms.convection {
            let cl = local_convection(
                &qps,
                c.advecting,
                c.mesh_velocity,
                &nodes,
                c.density,
                c.form,
            );
            for i in 0..6 {
                for j in 0..6 {
                    a[i][j] += cl[i][j];
                }
            }
        }
        let d = local_divergence(&qps);

        for i in 0..6 {
            for ci in 0..2 {
                let gi = 2 * nodes[i] + ci;
                let fi = dofs.free_index(gi);
                if fi == NOT_FREE {
                    continue;
                }
                for j in 0..6 {
                    let gj = 2 * nodes[j] + ci;
                    let fj = dofs.free_index(gj);
                    if fj == NOT_FREE {
                        rhs[fi] -= a[i][j] * g[gj];
                    } else {
                        mat.push(fi, fj, a[i][j]);
                    }
                }
                for k in 0..3 {
                    mat.push(fi, n_free + verts[k], d[k][2 * i + ci]);
                }
                if let Some(f) = terms.forcing {
                    for qp in &qps {
                        rhs[fi] += qp.jxw * f(qp.x)[ci] * qp.phi[i];
                    }
                }
            }
        }
        for k in 0..3 {
            let pk = n_free + verts[k];
            for j in 0..6 {
                for cj in 0..2 {
                    let gj = 2 * nodes[j] + cj;
                    let fj = dofs.free_index(gj);
                    if fj == NOT_FREE {
                        rhs[pk] -= d[k][2 * j + cj] * g[gj];
                    } else {
                        mat.push(pk, fj, d[k][2 * j + cj]);
                    }
                }
            }
        }
        let m = local_pressure_integrals(&el);
        for k in 0..3 {
            mat.push(n_free + verts[k], mean_row, m[k]);
            mat.push(mean_row, n_free + verts[k], m[k]);
        }
    }
    if let Some(load) = terms.load {
        for (dof, &l) in load.iter().enumerate() {
            let fi = dofs.free_index(dof);
            if fi != NOT_FREE {
                rhs[fi] += l;
            }
        }
    }
    SparseSystem {
        matrix: mat,
        rhs,
        n_free,
        n_pressure,
        mean_row,
        dirichlet: g,
    }
}

/// Sparse LU solver that reuses the symbolic factorisation while the
/// sparsity pattern stays the same.
#[derive(Default)]
pub struct SaddleSolver {
    cached: Option<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
    /// Number of numeric factorisations performed.
    pub factorizations: usize,
}

/// Relative residual tolerance for accepting a solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

impl SaddleSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn symbolic(&mut self, a: &SparseColMat<usize, f64>) -> Result<SymbolicLu<usize>> {
        let col_ptr = a.symbolic().col_ptr();
        let row_idx = a.symbolic().row_idx();
        if let Some((cp, ri, sym)) = &self.cached {
            if cp.as_slice() == col_ptr && ri.as_slice() == row_idx {
                return Ok(sym.clone());
            }
        }
        let sym = SymbolicLu::try_new(a.symbolic())
            .map_err(|e| Error::SingularSystem(format!("symbolic factorisation: {e:?}")))?;
        self.cached = Some((col_ptr.to_vec(), row_idx.to_vec(), sym.clone()));
        Ok(sym)
    }

    /// Solves `A x = b` with a few steps of iterative refinement.
    pub fn solve(&mut self, matrix: &CooMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
        let a = matrix.to_csc();
        let sym = self.symbolic(&a)?;
        let lu = Lu::try_new_with_symbolic(sym, a.as_ref())
            .map_err(|e| Error::SingularSystem(format!("numeric factorisation: {e:?}")))?;
        self.factorizations += 1;

        let n = rhs.len();
        let scale = rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut res = f64::INFINITY;
        for _ in 0..=REFINEMENT_STEPS {
            let mut col = Mat::from_fn(n, 1, |i, _| r[i]);
            lu.solve_in_place(&mut col);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += col[(i, 0)];
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::SingularSystem("non-finite solution".into()));
            }
            let ax = csc_mul_vec(&a, &x);
            for i in 0..n {
                r[i] = rhs[i] - ax[i];
            }
            res = r.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / scale;
            if res <= RESIDUAL_TOLERANCE {
                return Ok(x);
            }
        }
        Err(Error::ResidualTooLarge {
            residual: res,
            tolerance: RESIDUAL_TOLERANCE,
        })
    }
}

/// Solves an assembled system and expands it back to full fields.
pub fn solve_saddle_point(
    system: &SparseSystem,
    dofs: &DofMap,
    solver: &mut SaddleSolver,
) -> Result<FieldPair> {
    let x = solver.solve(&system.matrix, &system.rhs)?;
    let mut velocity = system.dirichlet.clone();
    for (dof, v) in velocity.iter_mut().enumerate() {
        let fi = dofs.free_index(dof);
        if fi != NOT_FREE {
            *v = x[fi];
        }
    }
    let pressure = x[system.n_free..system.n_free + system.n_pressure].to_vec();
    Ok(FieldPair { velocity, pressure })
}

/// `max_k |∫ψ_k ∇·u|` over the linear pressure basis.
pub fn divergence_residual(mesh: &Mesh2D, velocity: &[f64]) -> f64 {
    let rq = RefQuad::triangle();
    let mut r = vec![0.0; mesh.vertex_count()];
    for t in 0..mesh.triangle_count() {
        let qps = qp_data(&Element::of(mesh, t), &rq);
        let nodes = mesh.triangle_nodes(t);
        let d = local_divergence(&qps);
        let verts = mesh.triangles()[t];
        for k in 0..3 {
            for j in 0..6 {
                for c in 0..2 {
                    r[verts[k]] -= d[k][2 * j + c] * velocity[2 * nodes[j] + c];
                }
            }
        }
    }
    r.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// `∫p` for a linear pressure field.
pub fn pressure_mean(mesh: &Mesh2D, pressure: &[f64]) -> f64 {
    let mut s = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let a = mesh.signed_area(t);
        s += a / 3.0 * (pressure[tri[0]] + pressure[tri[1]] + pressure[tri[2]]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::NodeTag;

    fn square(n: usize) -> Mesh2D {
        Mesh2D::structured_rectangle([0.0, 0.0], [1.0, 1.0], n, n)
    }

    fn stokes(viscosity: f64) -> MomentumTerms<'static> {
        MomentumTerms {
            viscosity,
            ..Default::default()
        }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let mesh = square(4);
        let dofs = DofMap::new(&mesh);
        let sys = assemble_saddle(&mesh, &dofs, &stokes(1.0), &crate::fem::AtRest);
        let sol = solve_saddle_point(&sys, &dofs, &mut SaddleSolver::new()).unwrap();
        assert!(sol.velocity.iter().all(|v| *v == 0.0));
        assert!(sol.pressure.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn boundary_values_are_imposed_exactly() {
        let mesh = square(4);
        let dofs = DofMap::new(&mesh);
        let lid = |_: NodeTag, x: Point| {
            if x[1] > 1.0 - 1e-12 {
                [1.0, 0.0]
            } else {
                [0.0, 0.0]
            }
        };
        let sys = assemble_saddle(&mesh, &dofs, &stokes(1.0), &lid);
        let sol = solve_saddle_point(&sys, &dofs, &mut SaddleSolver::new()).unwrap();
        for (i, x) in mesh.nodes().enumerate() {
            if dofs.is_dirichlet(i) {
                assert_eq!(sol.nodal_velocity(i), lid(NodeTag::Wall, x));
            }
        }
        assert!(divergence_residual(&mesh, &sol.velocity) < 1e-12);
        assert!(pressure_mean(&mesh, &sol.pressure).abs() < 1e-12);
    }

    #[test]
    fn quadratic_stokes_flow_is_reproduced() {
        // u = (y², x²) is divergence free, −Δu + ∇p = 0 with p = 2x + 2y − 2.
        let mesh = square(3);
        let dofs = DofMap::new(&mesh);
        let exact = |_: NodeTag, x: Point| [x[1] * x[1], x[0] * x[0]];
        let sys = assemble_saddle(&mesh, &dofs, &stokes(1.0), &exact);
        let sol = solve_saddle_point(&sys, &dofs, &mut SaddleSolver::new()).unwrap();
        for (i, x) in mesh.nodes().enumerate() {
            let u = sol.nodal_velocity(i);
            let e = exact(NodeTag::Interior, x);
            assert!((u[0] - e[0]).abs() < 1e-11 && (u[1] - e[1]).abs() < 1e-11);
        }
        for (k, x) in mesh.vertices().iter().enumerate() {
            let p = 2.0 * x[0] + 2.0 * x[1] - 2.0;
            assert!(
                (sol.pressure[k] - p).abs() < 1e-10,
                "{} vs {}",
                sol.pressure[k],
                p
            );
        }
    }

    #[test]
    fn symbolic_factorisation_is_reused() {
        let mesh = square(3);
        let dofs = DofMap::new(&mesh);
        let mut solver = SaddleSolver::new();
        for mu in [1.0, 2.0, 0.5] {
            let sys = assemble_saddle(&mesh, &dofs, &stokes(mu), &crate::fem::AtRest);
            solve_saddle_point(&sys, &dofs, &mut solver).unwrap();
        }
        assert_eq!(solver.factorizations, 3);
        assert!(solver.cached.is_some());
    }
}
