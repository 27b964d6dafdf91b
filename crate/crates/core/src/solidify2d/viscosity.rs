use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscosityKind {
    /// Quadratic rise below the freezing point (alloy with a mushy zone).
    Mushy,
    /// Step increase at the freezing point (pure metal).
    SharpJump,
}

impl FromStr for ViscosityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mushy" => Ok(ViscosityKind::Mushy),
            "sharp_jump" | "sharp" | "pure" => Ok(ViscosityKind::SharpJump),
            other => Err(Error::Argument(format!(
                "unknown viscosity model '{other}'"
            ))),
        }
    }
}

impl fmt::Display for ViscosityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViscosityKind::Mushy => "mushy",
            ViscosityKind::SharpJump => "sharp_jump",
        })
    }
}

/// Temperature-dependent dynamic viscosity (density is 1, so this is also
/// the kinematic viscosity used in the momentum equation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscosityModel {
    pub kind: ViscosityKind,
    pub mu_liquid: f64,
    /// Freezing point in °C.
    pub t_freeze: f64,
    /// Coefficient of `(T - t_freeze)²` in the mushy law.
    pub mushy_coeff: f64,
    /// Solid/liquid viscosity ratio for the sharp jump.
    pub jump_factor: f64,
    /// Upper clamp for the mushy law.
    pub mu_cap: f64,
}

impl ViscosityModel {
    pub fn mushy() -> Self {
        Self {
            kind: ViscosityKind::Mushy,
            mu_liquid: 1.0,
            t_freeze: 650.0,
            mushy_coeff: 10.0,
            jump_factor: 1e6,
            mu_cap: 1e7,
        }
    }

    pub fn sharp_jump() -> Self {
        Self {
            kind: ViscosityKind::SharpJump,
            ..Self::mushy()
        }
    }

    pub fn of_kind(kind: ViscosityKind) -> Self {
        Self {
            kind,
            ..Self::mushy()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.mu_liquid) {
            return Err(Error::Argument(format!(
                "mu_liquid must be positive, got {}",
                self.mu_liquid
            )));
        }
        if !self.t_freeze.is_finite() {
            return Err(Error::Argument("t_freeze must be finite".into()));
        }
        if !ok(self.mushy_coeff) {
            return Err(Error::Argument("mushy_coeff must be positive".into()));
        }
        if !(self.jump_factor.is_finite() && self.jump_factor >= 1e3) {
            return Err(Error::Argument(format!(
                "jump_factor must be at least 1e3, got {}",
                self.jump_factor
            )));
        }
        if !(self.mu_cap.is_finite() && self.mu_cap >= self.mu_liquid) {
            return Err(Error::Argument(format!(
                "mu_cap must be at least mu_liquid, got {}",
                self.mu_cap
            )));
        }
        Ok(())
    }

    pub fn at(&self, temp: f64) -> f64 {
        viscosity_of(self, temp)
    }
}

/// Mushy: `mu_liquid + 10 (T - 650)²` below freezing, clamped at `mu_cap`.
/// Sharp jump: `mu_liquid · jump_factor` below freezing.
pub fn viscosity_of(model: &ViscosityModel, temp: f64) -> f64 {
    if temp >= model.t_freeze {
        return model.mu_liquid;
    }
    match model.kind {
        ViscosityKind::Mushy => {
            let d = temp - model.t_freeze;
            (model.mu_liquid + model.mushy_coeff * d * d).min(model.mu_cap)
        }
        ViscosityKind::SharpJump => model.mu_liquid * model.jump_factor,
    }
}
