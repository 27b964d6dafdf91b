//! Simulation parameters and the `key = value` case file.
//!
//! ```text
//! [grid]
//! nx = 64
//! [material]
//! viscosity_model = sharp_jump
//! ```
//!
//! Sections: `grid`, `time`, `material`, `boundary`, `output`. Lines starting
//! with `#` are comments. Unknown sections or keys are rejected.

use std::fmt;
use std::str::FromStr;

use super::viscosity::{ViscosityKind, ViscosityModel};
use crate::error::{Error, Result};
use crate::grid_field::StaggeredGrid2D;

/// Thermal condition on the right wall; the other three walls are adiabatic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalWall {
    /// `-κ ∂T/∂n = h (T - t_ambient)`.
    Robin {
        h: f64,
        t_ambient: f64,
    },
    Dirichlet {
        t_cold: f64,
    },
    Adiabatic,
}

/// Tangential velocity condition on all four walls. Normal velocity is
/// always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityWalls {
    NoSlip,
    FreeSlip,
}

impl VelocityWalls {
    /// Ghost value factor: `u_ghost = factor · u_inside`.
    pub(crate) fn ghost_factor(self) -> f64 {
        match self {
            VelocityWalls::NoSlip => -1.0,
            VelocityWalls::FreeSlip => 1.0,
        }
    }
}

impl FromStr for VelocityWalls {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "no_slip" => Ok(VelocityWalls::NoSlip),
            "free_slip" => Ok(VelocityWalls::FreeSlip),
            other => Err(Error::Argument(format!("unknown wall condition '{other}'"))),
        }
    }
}

impl fmt::Display for VelocityWalls {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VelocityWalls::NoSlip => "no_slip",
            VelocityWalls::FreeSlip => "free_slip",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: StaggeredGrid2D,
    pub dt: f64,
    pub n_steps: usize,
    pub snap_every: usize,
    /// Repetitions of the tentative-velocity / pressure-correction pair.
    pub inner_iterations: usize,
    /// Upper bound on `Δt (max|u|/Δx + max|v|/Δy)`.
    pub max_cfl: f64,
    pub viscosity: ViscosityModel,
    /// Rows whose viscosity exceeds this multiple of `mu_liquid` use
    /// backward Euler instead of Crank–Nicolson for diffusion.
    pub implicit_viscosity_ratio: f64,
    /// g·β, buoyancy acceleration per °C.
    pub buoyancy_coeff: f64,
    pub t_ref: f64,
    pub thermal_diffusivity: f64,
    pub initial_temp: f64,
    pub right_wall: ThermalWall,
    pub velocity_walls: VelocityWalls,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::desk_default(ViscosityKind::Mushy)
    }
}

impl SimConfig {
    /// 64×64 unit square, 500 snapshots.
    pub fn desk_default(kind: ViscosityKind) -> Self {
        Self {
            grid: StaggeredGrid2D::unit_square(64).expect("valid grid"),
            dt: 0.004,
            n_steps: 5000,
            snap_every: 10,
            inner_iterations: 1,
            max_cfl: 1.0,
            viscosity: ViscosityModel::of_kind(kind),
            implicit_viscosity_ratio: 10.0,
            buoyancy_coeff: 10.0,
            t_ref: 700.0,
            thermal_diffusivity: 1e-2,
            initial_temp: 700.0,
            right_wall: ThermalWall::Robin {
                h: 10.0,
                t_ambient: 550.0,
            },
            velocity_walls: VelocityWalls::NoSlip,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be positive, got {v}")))
            }
        };
        StaggeredGrid2D::new(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly)?;
        pos(self.dt, "dt")?;
        pos(self.thermal_diffusivity, "thermal_diffusivity")?;
        if self.n_steps == 0 {
            return Err(Error::Argument("n_steps must be at least 1".into()));
        }
        if self.snap_every == 0 || self.snap_every > self.n_steps {
            return Err(Error::Argument(format!(
                "snap_every must be in 1..={}, got {}",
                self.n_steps, self.snap_every
            )));
        }
        if self.inner_iterations == 0 {
            return Err(Error::Argument(
                "inner_iterations must be at least 1".into(),
            ));
        }
        if !(self.max_cfl > 0.0 && self.max_cfl <= 1.0) {
            return Err(Error::Argument(format!(
                "max_cfl must be in (0, 1], got {}",
                self.max_cfl
            )));
        }
        if self.implicit_viscosity_ratio.is_nan() || self.implicit_viscosity_ratio < 1.0 {
            return Err(Error::Argument(
                "implicit_viscosity_ratio must be at least 1".into(),
            ));
        }
        if !(self.buoyancy_coeff.is_finite() && self.buoyancy_coeff >= 0.0) {
            return Err(Error::Argument(
                "buoyancy_coeff must be non-negative".into(),
            ));
        }
        if !(self.t_ref.is_finite() && self.initial_temp.is_finite()) {
            return Err(Error::Argument("temperatures must be finite".into()));
        }
        self.viscosity.validate()?;
        if self.initial_temp <= self.viscosity.t_freeze {
            return Err(Error::Argument(format!(
                "initial_temp {} must exceed the freezing point {}",
                self.initial_temp, self.viscosity.t_freeze
            )));
        }
        match self.right_wall {
            ThermalWall::Robin { h, t_ambient } => {
                pos(h, "h")?;
                if !t_ambient.is_finite() {
                    return Err(Error::Argument("t_ambient must be finite".into()));
                }
            }
            ThermalWall::Dirichlet { t_cold } if !t_cold.is_finite() => {
                return Err(Error::Argument("t_cold must be finite".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn n_snapshots(&self) -> usize {
        self.n_steps / self.snap_every
    }

    /// Parse a case file on top of `base`.
    pub fn parse_onto(base: SimConfig, text: &str) -> Result<SimConfig> {
        let mut b = Builder::from(base);
        let mut section: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Config {
                line: line_no,
                reason,
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("malformed section header '{line}'")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| err("key outside of any section".into()))?;
            b.set(sec, key.trim(), value.trim()).map_err(err)?;
        }
        let cfg = b
            .build()
            .map_err(|reason| Error::Config { line: 0, reason })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl FromStr for SimConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SimConfig::parse_onto(SimConfig::default(), s)
    }
}

const SECTIONS: [&str; 5] = ["grid", "time", "material", "boundary", "output"];

/// Flat view of every addressable field, so `right_wall` can be assembled
/// after all of its parameters are known.
struct Builder {
    cfg: SimConfig,
    wall_kind: String,
    h: f64,
    t_ambient: f64,
    t_cold: f64,
}

impl From<SimConfig> for Builder {
    fn from(cfg: SimConfig) -> Self {
        let (wall_kind, h, t_ambient, t_cold) = match cfg.right_wall {
            ThermalWall::Robin { h, t_ambient } => ("robin", h, t_ambient, t_ambient),
            ThermalWall::Dirichlet { t_cold } => ("dirichlet", 10.0, t_cold, t_cold),
            ThermalWall::Adiabatic => ("adiabatic", 10.0, 550.0, 550.0),
        };
        Self {
            cfg,
            wall_kind: wall_kind.into(),
            h,
            t_ambient,
            t_cold,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse '{value}' for key '{key}'"))
}

impl Builder {
    fn set(&mut self, section: &str, key: &str, value: &str) -> std::result::Result<(), String> {
        let c = &mut self.cfg;
        match (section, key) {
            ("grid", "nx") => c.grid.nx = num(key, value)?,
            ("grid", "ny") => c.grid.ny = num(key, value)?,
            ("grid", "lx") => c.grid.lx = num(key, value)?,
            ("grid", "ly") => c.grid.ly = num(key, value)?,
            ("time", "dt") => c.dt = num(key, value)?,
            ("time", "n_steps") => c.n_steps = num(key, value)?,
            ("time", "inner_iterations") => c.inner_iterations = num(key, value)?,
            ("time", "max_cfl") => c.max_cfl = num(key, value)?,
            ("material", "viscosity_model") => {
                c.viscosity.kind = value.parse().map_err(|e: Error| e.to_string())?
            }
            ("material", "mu_liquid") => c.viscosity.mu_liquid = num(key, value)?,
            ("material", "t_freeze") => c.viscosity.t_freeze = num(key, value)?,
            ("material", "mushy_coeff") => c.viscosity.mushy_coeff = num(key, value)?,
            ("material", "jump_factor") => c.viscosity.jump_factor = num(key, value)?,
            ("material", "mu_cap") => c.viscosity.mu_cap = num(key, value)?,
            ("material", "implicit_viscosity_ratio") => {
                c.implicit_viscosity_ratio = num(key, value)?
            }
            ("material", "buoyancy_coeff") => c.buoyancy_coeff = num(key, value)?,
            ("material", "t_ref") => c.t_ref = num(key, value)?,
            ("material", "thermal_diffusivity") => c.thermal_diffusivity = num(key, value)?,
            ("material", "initial_temp") => c.initial_temp = num(key, value)?,
            ("boundary", "right_wall") => match value {
                "robin" | "dirichlet" | "adiabatic" => self.wall_kind = value.into(),
                other => return Err(format!("unknown right_wall '{other}'")),
            },
            ("boundary", "h") => self.h = num(key, value)?,
            ("boundary", "t_ambient") => self.t_ambient = num(key, value)?,
            ("boundary", "t_cold") => self.t_cold = num(key, value)?,
            ("boundary", "velocity_walls") => {
                c.velocity_walls = value.parse().map_err(|e: Error| e.to_string())?
            }
            ("output", "snap_every") => c.snap_every = num(key, value)?,
            _ => return Err(format!("unknown key '{key}' in section [{section}]")),
        }
        Ok(())
    }

    fn build(mut self) -> std::result::Result<SimConfig, String> {
        self.cfg.right_wall = match self.wall_kind.as_str() {
            "robin" => ThermalWall::Robin {
                h: self.h,
                t_ambient: self.t_ambient,
            },
            "dirichlet" => ThermalWall::Dirichlet {
                t_cold: self.t_cold,
            },
            "adiabatic" => ThermalWall::Adiabatic,
            other => return Err(format!("unknown right_wall '{other}'")),
        };
        Ok(self.cfg)
    }
}

/// Renders the full resolved configuration in the case-file format.
/// Floats use Rust's shortest round-trip representation.
impl fmt::Display for SimConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.viscosity;
        writeln!(f, "[grid]")?;
        writeln!(f, "nx = {}", self.grid.nx)?;
        writeln!(f, "ny = {}", self.grid.ny)?;
        writeln!(f, "lx = {:?}", self.grid.lx)?;
        writeln!(f, "ly = {:?}", self.grid.ly)?;
        writeln!(f, "\n[time]")?;
        writeln!(f, "dt = {:?}", self.dt)?;
        writeln!(f, "n_steps = {}", self.n_steps)?;
        writeln!(f, "inner_iterations = {}", self.inner_iterations)?;
        writeln!(f, "max_cfl = {:?}", self.max_cfl)?;
        writeln!(f, "\n[material]")?;
        writeln!(f, "viscosity_model = {}", v.kind)?;
        writeln!(f, "mu_liquid = {:?}", v.mu_liquid)?;
        writeln!(f, "t_freeze = {:?}", v.t_freeze)?;
        writeln!(f, "mushy_coeff = {:?}", v.mushy_coeff)?;
        writeln!(f, "jump_factor = {:?}", v.jump_factor)?;
        writeln!(f, "mu_cap = {:?}", v.mu_cap)?;
        writeln!(
            f,
            "implicit_viscosity_ratio = {:?}",
            self.implicit_viscosity_ratio
        )?;
        writeln!(f, "buoyancy_coeff = {:?}", self.buoyancy_coeff)?;
        writeln!(f, "t_ref = {:?}", self.t_ref)?;
        writeln!(f, "thermal_diffusivity = {:?}", self.thermal_diffusivity)?;
        writeln!(f, "initial_temp = {:?}", self.initial_temp)?;
        writeln!(f, "\n[boundary]")?;
        match self.right_wall {
            ThermalWall::Robin { h, t_ambient } => {
                writeln!(f, "right_wall = robin")?;
                writeln!(f, "h = {h:?}")?;
                writeln!(f, "t_ambient = {t_ambient:?}")?;
            }
            ThermalWall::Dirichlet { t_cold } => {
                writeln!(f, "right_wall = dirichlet")?;
                writeln!(f, "t_cold = {t_cold:?}")?;
            }
            ThermalWall::Adiabatic => writeln!(f, "right_wall = adiabatic")?,
        }
        writeln!(f, "velocity_walls = {}", self.velocity_walls)?;
        writeln!(f, "\n[output]")?;
        write!(f, "snap_every = {}", self.snap_every)
    }
}
