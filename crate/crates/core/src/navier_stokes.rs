//! One implicit ALE timestep of the incompressible Navier–Stokes equations on
//! a moving mesh, with the nonlinearity resolved by Picard iteration.

use crate::extension::{rigid_velocity, ExtensionField};
use crate::fem::assembly::qp_data;
use crate::fem::element::{eval_vector, Element, RefQuad};
use crate::fem::{
    assemble_mass, assemble_saddle, solve_saddle_point, BoundaryVelocity, ConvectionForm,
    ConvectionTerm, DofMap, FieldPair, MomentumTerms, SaddleSolver,
};
use crate::mesh::{Mesh2D, NodeTag, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidParams {
    pub density: f64,
    pub viscosity: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub convection: ConvectionForm,
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            density: 1.0,
            viscosity: 1.0,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            convection: ConvectionForm::Antisymmetric,
        }
    }
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.density > 0.0
            && self.viscosity > 0.0
            && self.picard_tol > 0.0
            && self.picard_max_iters >= 1
            && self.density.is_finite()
            && self.viscosity.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InconsistentConfig(format!(
                "invalid fluid parameters {self:?}"
            )))
        }
    }
}

/// Rigid-body boundary data: `v + ω×(x − q)` on the body, zero on walls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidBoundary {
    pub q: Point,
    pub v: [f64; 2],
    pub omega: f64,
}

impl BoundaryVelocity for RigidBoundary {
    fn velocity(&self, tag: NodeTag, x: Point) -> [f64; 2] {
        match tag {
            NodeTag::Body => rigid_velocity(self.q, self.v, self.omega, x),
            _ => [0.0, 0.0],
        }
    }
}

pub struct AleStepInput<'a> {
    pub old_mesh: &'a Mesh2D,
    pub old_field: &'a FieldPair,
    pub new_mesh: &'a Mesh2D,
    /// Mesh velocity on the new mesh.
    pub mesh_velocity: &'a ExtensionField,
    pub boundary: &'a dyn BoundaryVelocity,
    pub tau: f64,
    /// Optional body force per unit volume.
    pub forcing: Option<&'a dyn Fn(Point) -> [f64; 2]>,
}

/// Convergence record of the Picard loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardStats {
    pub iterations: usize,
    pub increment: f64,
}

/// Reusable state for repeated steps on meshes of the same topology.
#[derive(Default)]
pub struct NavierStokesSolver {
    saddle: SaddleSolver,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

impl NavierStokesSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factorizations(&self) -> usize {
        self.saddle.factorizations
    }

    pub fn step(
        &mut self,
        input: &AleStepInput<'_>,
        params: &FluidParams,
    ) -> Result<(FieldPair, PicardStats)> {
        params.validate()?;
        let old = input.old_mesh;
        let new = input.new_mesh;
        if old.node_count() != new.node_count()
            || old.triangles() != new.triangles()
            || !input.old_field.matches(old)
            || input.mesh_velocity.values.len() != new.node_count()
        {
            return Err(Error::InconsistentConfig(
                "old and new meshes do not correspond".into(),
            ));
        }
        let dofs = DofMap::new(new);
        let coeff = params.density / input.tau;
        let mut load = assemble_mass(old).mul_vec(&input.old_field.velocity);
        for l in load.iter_mut() {
            *l *= coeff;
        }

        let mut advecting = input.old_field.velocity.clone();
        let mut last_increment = f64::INFINITY;
        let mut growth = 0;
        for it in 1..=params.picard_max_iters {
            let terms = MomentumTerms {
                viscosity: params.viscosity,
                mass_coeff: coeff,
                convection: Some(ConvectionTerm {
                    advecting: &advecting,
                    mesh_velocity: Some(&input.mesh_velocity.values),
                    density: params.density,
                    form: params.convection,
                }),
                forcing: input.forcing,
                load: Some(&load),
            };
            let sys = assemble_saddle(new, &dofs, &terms, input.boundary);
            let sol = solve_saddle_point(&sys, &dofs, &mut self.saddle)?;
            let diff: Vec<f64> = sol
                .velocity
                .iter()
                .zip(&advecting)
                .map(|(a, b)| a - b)
                .collect();
            let increment = max_abs(&diff) / max_abs(&sol.velocity).max(1.0);
            if increment <= params.picard_tol {
                return Ok((
                    sol,
                    PicardStats {
                        iterations: it,
                        increment,
                    },
                ));
            }
            if increment > last_increment {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::PicardDiverged {
                        iterations: it,
                        increment,
                    });
                }
            } else {
                growth = 0;
            }
            last_increment = increment;
            advecting = sol.velocity;
        }
        Err(Error::PicardDiverged {
            iterations: params.picard_max_iters,
            increment: last_increment,
        })
    }
}

pub fn ale_step(input: &AleStepInput<'_>, params: &FluidParams) -> Result<FieldPair> {
    NavierStokesSolver::new()
        .step(input, params)
        .map(|(f, _)| f)
}

/// Steady Stokes solution with the given boundary data and forcing.
pub fn solve_stokes(
    mesh: &Mesh2D,
    viscosity: f64,
    boundary: &dyn BoundaryVelocity,
    forcing: Option<&dyn Fn(Point) -> [f64; 2]>,
) -> Result<FieldPair> {
    let dofs = DofMap::new(mesh);
    let terms = MomentumTerms {
        viscosity,
        forcing,
        ..Default::default()
    };
    let sys = assemble_saddle(mesh, &dofs, &terms, boundary);
    solve_saddle_point(&sys, &dofs, &mut SaddleSolver::new())
}

/// `(ρ/2)∫|u|²`
pub fn kinetic_energy(mesh: &Mesh2D, field: &FieldPair, density: f64) -> f64 {
    let rq = RefQuad::triangle();
    let mut e = 0.0;
    for t in 0..mesh.triangle_count() {
        let nodes = mesh.triangle_nodes(t);
        for qp in qp_data(&Element::of(mesh, t), &rq) {
            let (u, _) = eval_vector(&field.velocity, &nodes, &qp.phi, &qp.dphi);
            e += qp.jxw * (u[0] * u[0] + u[1] * u[1]);
        }
    }
    0.5 * density * e
}
