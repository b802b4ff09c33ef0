use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),

    #[error(
        "mesh quality failure: minimum angle {min_angle_deg:.2} deg below {required_deg:.1} deg"
    )]
    MeshQualityFailure {
        min_angle_deg: f64,
        required_deg: f64,
    },

    #[error("element inversion: triangle {triangle} has signed area {signed_area:.3e}")]
    ElementInversion { triangle: usize, signed_area: f64 },

    #[error("body node {node} is {distance:.3e} away from the target circle (limit {limit:.3e})")]
    SnapTooLarge {
        node: usize,
        distance: f64,
        limit: f64,
    },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("linear solve residual {residual:.3e} exceeds {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("Picard iteration diverged after {iterations} iterations (increment {increment:.3e})")]
    PicardDiverged { iterations: usize, increment: f64 },

    #[error("non-finite hydrodynamic load at step {step}")]
    NonFiniteLoad { step: usize },

    #[error("collision guard: body-wall gap {gap:.4e} below threshold {threshold:.4e}")]
    CollisionGuard { gap: f64, threshold: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("inconsistent configuration: {0}")]
    InconsistentConfig(String),

    #[error("{path}: line {line}: {message}")]
    MeshFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("iteration {iteration}, timestep {step}: {source}")]
    AtStep {
        iteration: usize,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_step(self, iteration: usize, step: usize) -> Self {
        match self {
            // keep the innermost location
            Error::AtStep { .. } => self,
            other => Error::AtStep {
                iteration,
                step,
                source: Box::new(other),
            },
        }
    }

    /// Innermost error, skipping location annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Parse { .. }
            | Error::InconsistentConfig(_)
            | Error::GeometryInfeasible(_)
            | Error::MeshQualityFailure { .. } => 2,
            Error::ElementInversion { .. }
            | Error::CollisionGuard { .. }
            | Error::SnapTooLarge { .. } => 3,
            Error::SingularSystem(_)
            | Error::ResidualTooLarge { .. }
            | Error::PicardDiverged { .. }
            | Error::NonFiniteLoad { .. } => 4,
            Error::MeshFormat { .. } | Error::Io(_) => 1,
            Error::AtStep { .. } => unreachable!(),
        }
    }
}
