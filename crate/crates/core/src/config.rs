//! Run configuration: flat `key = value` text with `#` comments and named
//! presets for the falling-ball experiments.
//!
//! Numeric values may be arithmetic expressions (`200/pi`, `2.5e-5`).

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::extension::ExtensionKind;
use crate::fem::ConvectionForm;
use crate::iteration::{ForceMethod, IterationConfig, Problem, Schedule};
use crate::mesh::{generate_mesh, Geometry};
use crate::navier_stokes::FluidParams;
use crate::rigid_body::{RigidParams, RigidState, STANDARD_GRAVITY};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    HeavyBall,
    LightBall,
    Refined,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::HeavyBall, Preset::LightBall, Preset::Refined];

    pub fn name(self) -> &'static str {
        match self {
            Preset::HeavyBall => "heavy_ball",
            Preset::LightBall => "light_ball",
            Preset::Refined => "refined",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!("unknown preset `{s}` (expected heavy_ball, light_ball or refined)")
            })
    }
}

/// Every knob of a simulation run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub box_center: [f64; 2],
    pub box_half_width: f64,
    /// Initial disk centre is `(disk_x, 0.5 + y0)`.
    pub disk_x: f64,
    pub y0: f64,
    pub radius: f64,
    pub h: f64,
    pub grading: f64,
    pub max_h: f64,
    pub fluid: FluidParams,
    pub body_density: f64,
    pub gravity: [f64; 2],
    pub iteration: IterationConfig,
    pub out_dir: Option<PathBuf>,
    /// Write a field snapshot every this many steps; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            box_center: [0.5, 0.5],
            box_half_width: 2.0,
            disk_x: 0.5,
            y0: -0.0048,
            radius: 0.1,
            h: 6.284e-2,
            grading: 0.2,
            max_h: 0.4,
            fluid: FluidParams::default(),
            body_density: 200.0 / PI,
            gravity: STANDARD_GRAVITY,
            iteration: IterationConfig::default(),
            out_dir: None,
            snapshot_stride: 0,
        }
    }
}

impl RunConfig {
    pub fn from_preset(preset: Preset) -> Self {
        let mut cfg = Self::default();
        cfg.apply_preset(preset);
        cfg
    }

    fn apply_preset(&mut self, preset: Preset) {
        *self = Self {
            preset: Some(preset),
            ..Self::default()
        };
        match preset {
            Preset::HeavyBall => {
                self.body_density = 200.0 / PI;
                self.iteration.final_time = 0.1;
                self.iteration.tau = 5e-4;
                self.iteration.k_max = 5;
            }
            Preset::LightBall => {
                self.body_density = 10.0 / PI;
                self.iteration.final_time = 0.05;
                self.iteration.tau = 5e-4;
                self.iteration.k_max = 10;
            }
            Preset::Refined => {
                self.iteration.tau = 2.5e-5;
                self.h = 4.879e-2;
            }
        }
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::graded_box(
            self.box_center,
            self.box_half_width,
            [self.disk_x, 0.5 + self.y0],
            self.radius,
            self.h,
            self.grading,
            self.max_h,
        )
    }

    pub fn rigid_params(&self) -> RigidParams {
        RigidParams {
            density: self.body_density,
            radius: self.radius,
            gravity: self.gravity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.iteration.validate()?;
        self.fluid.validate()?;
        self.rigid_params().validate()?;
        let g = self.geometry();
        if !(g.target_h > 0.0 && g.max_h >= g.target_h && g.grading >= 0.0) {
            return Err(Error::InconsistentConfig(
                "need h > 0, max_h >= h and grading >= 0".into(),
            ));
        }
        if g.clearance() <= 0.0 {
            return Err(Error::InconsistentConfig(
                "disk does not fit inside the box".into(),
            ));
        }
        Ok(())
    }

    /// Generates the initial mesh and packages the fixed problem data.
    pub fn build_problem(&self) -> Result<Problem> {
        self.validate()?;
        let geom = self.geometry();
        let mesh = generate_mesh(&geom)?;
        Ok(Problem {
            initial_mesh: mesh,
            disk: geom.circle(),
            fluid: self.fluid,
            rigid: self.rigid_params(),
            initial: RigidState::at_rest(geom.disk_center),
        })
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = || parse_number(value);
        let count = || parse_count(value);
        match key {
            "preset" => {}
            "box_center_x" => self.box_center[0] = num()?,
            "box_center_y" => self.box_center[1] = num()?,
            "box_half_width" => self.box_half_width = num()?,
            "disk_x" => self.disk_x = num()?,
            "y0" => self.y0 = num()?,
            "radius" => self.radius = num()?,
            "h" => self.h = num()?,
            "grading" => self.grading = num()?,
            "max_h" => self.max_h = num()?,
            "rho" => self.fluid.density = num()?,
            "mu" => self.fluid.viscosity = num()?,
            "picard_tol" => self.fluid.picard_tol = num()?,
            "picard_max_iters" => self.fluid.picard_max_iters = count()?,
            "convection" => {
                self.fluid.convection = match value {
                    "antisymmetric" => ConvectionForm::Antisymmetric,
                    "plain" => ConvectionForm::Plain,
                    _ => return Err(format!("unknown convection form `{value}`")),
                }
            }
            "rho_b" => self.body_density = num()?,
            "gravity_x" => self.gravity[0] = num()?,
            "gravity_y" => self.gravity[1] = num()?,
            "schedule" => {
                self.iteration.schedule = match value {
                    "global" => Schedule::Global,
                    "per_timestep" => Schedule::PerTimestep,
                    _ => return Err(format!("unknown schedule `{value}`")),
                }
            }
            "k_max" => self.iteration.k_max = count()?,
            "trajectory_tol" => self.iteration.trajectory_tol = parse_number_or_inf(value)?,
            "force_method" => {
                self.iteration.force_method = match value {
                    "boundary" => ForceMethod::Boundary,
                    "bulk" => ForceMethod::Bulk,
                    _ => return Err(format!("unknown force method `{value}`")),
                }
            }
            "collision_fraction" => self.iteration.collision_fraction = num()?,
            "tau" => self.iteration.tau = num()?,
            "T" => self.iteration.final_time = num()?,
            "exact_boundary_motion" => self.iteration.exact_boundary_motion = parse_bool(value)?,
            "extension" => {
                self.iteration.extension = match value {
                    "harmonic" => ExtensionKind::Harmonic,
                    "stokes" => ExtensionKind::Stokes,
                    _ => return Err(format!("unknown extension `{value}`")),
                }
            }
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "snapshot_stride" => self.snapshot_stride = count()?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }
}

fn parse_number(value: &str) -> std::result::Result<f64, String> {
    let mut names = |name: &str, _args: Vec<f64>| match name {
        "pi" => Some(PI),
        _ => None,
    };
    let x =
        fasteval::ez_eval(value, &mut names).map_err(|e| format!("bad number `{value}`: {e:?}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{value}` is not finite"))
    }
}

fn parse_number_or_inf(value: &str) -> std::result::Result<f64, String> {
    match value {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => parse_number(value),
    }
}

fn parse_count(value: &str) -> std::result::Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("expected a nonnegative integer, got `{value}`"))
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got `{value}`")),
    }
}

/// Splits the text into `(line number, key, value)` triples.
fn entries(text: &str) -> Result<Vec<(usize, &str, &str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key or value".into(),
            });
        }
        out.push((i + 1, key, value));
    }
    Ok(out)
}

/// Parses a config file. A `preset` line (wherever it appears) sets the
/// baseline; the other keys override it.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_preset(text, None)
}

/// As [`parse_config`], with a preset given outside the file taking
/// precedence over any `preset` line.
pub fn parse_config_with_preset(text: &str, preset: Option<Preset>) -> Result<RunConfig> {
    let entries = entries(text)?;
    let mut seen = std::collections::HashSet::new();
    let mut file_preset = None;
    for &(line, key, value) in &entries {
        if !seen.insert(key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        if key == "preset" {
            file_preset = Some(
                value
                    .parse::<Preset>()
                    .map_err(|message| Error::Parse { line, message })?,
            );
        }
    }
    let mut cfg = match preset.or(file_preset) {
        Some(p) => RunConfig::from_preset(p),
        None => RunConfig::default(),
    };
    for (line, key, value) in entries {
        cfg.set(key, value)
            .map_err(|message| Error::Parse { line, message })?;
    }
    cfg.validate()?;
    Ok(cfg)
}
