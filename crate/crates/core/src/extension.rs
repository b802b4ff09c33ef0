//! Extension of the rigid-body boundary velocity into the fluid mesh (the
//! mesh velocity `V`) and the scalar cutoff `ζ` (1 on the body, 0 on the
//! walls).

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::SparseColMat;
use faer::{Mat, Side};

use crate::fem::sparse::{csc_mul_vec, CooMatrix};
use crate::fem::{
    assemble_laplacian, assemble_saddle, solve_saddle_point, DofMap, MomentumTerms, SaddleSolver,
};
use crate::mesh::{Mesh2D, NodeTag, Point};
use crate::{Error, Result};

/// How the mesh velocity is extended from the boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExtensionKind {
    /// Componentwise Laplace problem.
    #[default]
    Harmonic,
    /// Stokes problem with unit viscosity.
    Stokes,
}

/// Mesh velocity per quadratic node.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionField {
    pub values: Vec<Point>,
}

/// Cutoff per quadratic node.
#[derive(Clone, Debug, PartialEq)]
pub struct CutoffField {
    pub values: Vec<f64>,
}

/// Velocity of the rigid motion `v + ω×(x − q)` at `x`.
#[inline]
pub fn rigid_velocity(q: Point, v: [f64; 2], omega: f64, x: Point) -> [f64; 2] {
    [v[0] - omega * (x[1] - q[1]), v[1] + omega * (x[0] - q[0])]
}

/// Factorised scalar Laplacian with Dirichlet conditions on every boundary
/// node.
pub struct LaplaceSolver {
    free: Vec<usize>,
    n_free: usize,
    reduced: SparseColMat<usize, f64>,
    /// Couplings from free rows to Dirichlet columns.
    coupling: Vec<(usize, usize, f64)>,
    llt: Llt<usize, f64>,
}

/// Relative residual accepted for the Laplace solves.
pub const LAPLACE_RESIDUAL_TOLERANCE: f64 = 1e-10;

impl LaplaceSolver {
    pub fn new(mesh: &Mesh2D) -> Result<Self> {
        let nn = mesh.node_count();
        let mut free = vec![usize::MAX; nn];
        let mut n_free = 0;
        for (i, f) in free.iter_mut().enumerate() {
            if !mesh.node_tag(i).is_boundary() {
                *f = n_free;
                n_free += 1;
            }
        }
        let k = assemble_laplacian(mesh);
        let mut reduced = CooMatrix::new(n_free, n_free);
        let mut coupling = Vec::new();
        for &(i, j, v) in &k.entries {
            let fi = free[i];
            if fi == usize::MAX {
                continue;
            }
            match free[j] {
                usize::MAX => coupling.push((fi, j, v)),
                fj => reduced.push(fi, fj, v),
            }
        }
        let reduced = reduced.to_csc();
        let sym = SymbolicLlt::try_new(reduced.symbolic(), Side::Lower)
            .map_err(|e| Error::SingularSystem(format!("Laplace symbolic: {e:?}")))?;
        let llt = Llt::try_new_with_symbolic(sym, reduced.as_ref(), Side::Lower)
            .map_err(|e| Error::SingularSystem(format!("Laplace factorisation: {e:?}")))?;
        Ok(Self {
            free,
            n_free,
            reduced,
            coupling,
            llt,
        })
    }

    /// Solves with boundary values taken from `data` (one value per node;
    /// interior entries are ignored) and returns the full nodal solution.
    pub fn solve(&self, data: &[f64]) -> Result<Vec<f64>> {
        let mut rhs = vec![0.0; self.n_free];
        for &(fi, j, v) in &self.coupling {
            rhs[fi] -= v * data[j];
        }
        let mut col = Mat::from_fn(self.n_free, 1, |i, _| rhs[i]);
        self.llt.solve_in_place(&mut col);
        let x: Vec<f64> = (0..self.n_free).map(|i| col[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite Laplace solution".into()));
        }
        let ax = csc_mul_vec(&self.reduced, &x);
        let scale = rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let res = ax
            .iter()
            .zip(&rhs)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            / scale;
        if res > LAPLACE_RESIDUAL_TOLERANCE {
            return Err(Error::ResidualTooLarge {
                residual: res,
                tolerance: LAPLACE_RESIDUAL_TOLERANCE,
            });
        }
        Ok(data
            .iter()
            .zip(&self.free)
            .map(|(&d, &f)| if f == usize::MAX { d } else { x[f] })
            .collect())
    }

    pub fn extension(
        &self,
        mesh: &Mesh2D,
        q: Point,
        v: [f64; 2],
        omega: f64,
    ) -> Result<ExtensionField> {
        let mut data = [vec![0.0; mesh.node_count()], vec![0.0; mesh.node_count()]];
        for i in 0..mesh.node_count() {
            if mesh.node_tag(i) == NodeTag::Body {
                let w = rigid_velocity(q, v, omega, mesh.node(i));
                data[0][i] = w[0];
                data[1][i] = w[1];
            }
        }
        let vx = self.solve(&data[0])?;
        let vy = self.solve(&data[1])?;
        Ok(ExtensionField {
            values: vx.into_iter().zip(vy).map(|(a, b)| [a, b]).collect(),
        })
    }

    pub fn cutoff(&self, mesh: &Mesh2D) -> Result<CutoffField> {
        let data: Vec<f64> = (0..mesh.node_count())
            .map(|i| {
                if mesh.node_tag(i) == NodeTag::Body {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(CutoffField {
            values: self.solve(&data)?,
        })
    }
}

pub fn harmonic_extension(
    mesh: &Mesh2D,
    q: Point,
    v: [f64; 2],
    omega: f64,
) -> Result<ExtensionField> {
    LaplaceSolver::new(mesh)?.extension(mesh, q, v, omega)
}

pub fn cutoff_field(mesh: &Mesh2D) -> Result<CutoffField> {
    LaplaceSolver::new(mesh)?.cutoff(mesh)
}

/// Velocity part of the Stokes problem with the rigid data on the body and
/// no-slip walls.
pub fn stokes_extension(
    mesh: &Mesh2D,
    q: Point,
    v: [f64; 2],
    omega: f64,
) -> Result<ExtensionField> {
    let dofs = DofMap::new(mesh);
    let terms = MomentumTerms {
        viscosity: 1.0,
        ..Default::default()
    };
    let bc = |tag: NodeTag, x: Point| match tag {
        NodeTag::Body => rigid_velocity(q, v, omega, x),
        _ => [0.0, 0.0],
    };
    let sys = assemble_saddle(mesh, &dofs, &terms, &bc);
    let sol = solve_saddle_point(&sys, &dofs, &mut SaddleSolver::new())?;
    Ok(ExtensionField {
        values: (0..mesh.node_count())
            .map(|i| sol.nodal_velocity(i))
            .collect(),
    })
}

/// Mesh velocity and cutoff on one mesh, sharing a single factorisation.
pub fn extension_and_cutoff(
    mesh: &Mesh2D,
    q: Point,
    v: [f64; 2],
    omega: f64,
    kind: ExtensionKind,
) -> Result<(ExtensionField, CutoffField)> {
    let lap = LaplaceSolver::new(mesh)?;
    let ext = match kind {
        ExtensionKind::Harmonic => lap.extension(mesh, q, v, omega)?,
        ExtensionKind::Stokes => stokes_extension(mesh, q, v, omega)?,
    };
    Ok((ext, lap.cutoff(mesh)?))
}
