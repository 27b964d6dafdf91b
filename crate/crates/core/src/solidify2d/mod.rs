//! 2D fractional-step Boussinesq flow with temperature-dependent viscosity
//! on a MAC grid.
//!
//! One step:
//!
//! 1. tentative velocity `uᴵ` from the momentum equation with pressure
//!    guess `p*` (the previous pressure);
//! 2. pressure correction `∇²φ = (1/Δt) ∇·uᴵ` with Neumann walls;
//!    steps 1–2 repeat `inner_iterations` times with `p* ← p* + φ`;
//! 3. projection `uⁿ = uᴵ − Δt ∇φ`, `p = p* + φ`;
//! 4. temperature transport with the projected velocity.

mod config;
mod momentum;
mod projection;
mod state;
mod thermal;
mod viscosity;

pub use config::{SimConfig, ThermalWall, VelocityWalls};
pub use momentum::{cfl_number, tentative_velocity};
pub use projection::{neumann_laplacian, pressure_correction, velocity_update, PressureSolver};
pub use state::{divergence, max_divergence, FlowState};
pub use thermal::ThermalSolver;
pub use viscosity::{viscosity_of, ViscosityKind, ViscosityModel};

use crate::error::{Error, Result};
use crate::grid_field::{assemble, FieldLayout, SnapshotMatrix, StaggeredGrid2D};
use crate::linalg::BandLu;
use momentum::{check_cfl, MomentumSystems};

/// Relative divergence bound enforced after every projection.
pub const DIVERGENCE_TOL: f64 = 1e-8;

/// Advance the temperature of `state` by one step using its velocity.
pub fn temperature_step(state: &FlowState, cfg: &SimConfig) -> Result<Vec<f64>> {
    check_cfl(&state.grid, &state.u, &state.v, cfg)?;
    ThermalSolver::new(cfg)?.step(&state.temp, &state.u, &state.v)
}

/// The `[u, v, p, T]` layout of a snapshot column.
pub fn snapshot_layout(grid: &StaggeredGrid2D) -> Result<FieldLayout> {
    FieldLayout::from_sizes([
        ("u", grid.n_u()),
        ("v", grid.n_v()),
        ("p", grid.n_cells()),
        ("T", grid.n_cells()),
    ])
}

/// A running simulation with cached factorizations: pressure Poisson and
/// heat diffusion are constant, momentum factors are refreshed on demand.
pub struct Simulation {
    cfg: SimConfig,
    state: FlowState,
    pressure: PressureSolver,
    thermal: ThermalSolver,
    momentum_factors: Option<(BandLu, BandLu)>,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        let state = FlowState::at_rest(cfg.grid, cfg.initial_temp);
        Self::with_state(cfg, state)
    }

    pub fn with_state(cfg: SimConfig, state: FlowState) -> Result<Self> {
        cfg.validate()?;
        if state.grid != cfg.grid {
            return Err(Error::Dimension(
                "state grid differs from the configured grid".into(),
            ));
        }
        state.check_shapes()?;
        state.check_finite()?;
        Ok(Self {
            pressure: PressureSolver::new(cfg.grid)?,
            thermal: ThermalSolver::new(&cfg)?,
            momentum_factors: None,
            cfg,
            state,
        })
    }

    pub fn state(&self) -> &FlowState {
        &self.state
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    /// Viscosity per cell at the current temperature.
    pub fn viscosity_field(&self) -> Vec<f64> {
        self.state
            .temp
            .iter()
            .map(|&t| viscosity_of(&self.cfg.viscosity, t))
            .collect()
    }

    pub fn step(&mut self) -> Result<()> {
        let (step, time) = (self.state.step, self.state.time);
        self.advance().map_err(|e| Error::Step {
            step: step + 1,
            time,
            source: Box::new(e),
        })
    }

    fn advance(&mut self) -> Result<()> {
        let cfg = &self.cfg;
        let grid = cfg.grid;
        let dt = cfg.dt;

        let mut systems =
            MomentumSystems::assemble(&self.state, cfg, self.momentum_factors.take())?;
        let mut p_star = self.state.p.clone();
        let (mut u, mut v) = systems.solve(&grid, &p_star)?;
        let mut phi = self.pressure.correction(&u, &v, dt)?;
        for _ in 1..cfg.inner_iterations {
            p_star.iter_mut().zip(&phi).for_each(|(p, f)| *p += f);
            (u, v) = systems.solve(&grid, &p_star)?;
            phi = self.pressure.correction(&u, &v, dt)?;
        }
        velocity_update(&grid, &mut u, &mut v, &mut p_star, &phi, dt);

        let scale = u.iter().chain(&v).fold(1.0f64, |m, x| m.max(x.abs()));
        let div = max_divergence(&grid, &u, &v);
        if div > DIVERGENCE_TOL * scale {
            return Err(Error::numerical(
                "projected velocity is not divergence-free",
                1,
                div / scale,
            ));
        }
        check_cfl(&grid, &u, &v, cfg)?;
        self.momentum_factors = systems.into_factors();
        let temp = self.thermal.step(&self.state.temp, &u, &v)?;

        let s = &mut self.state;
        s.u_prev = std::mem::replace(&mut s.u, u);
        s.v_prev = std::mem::replace(&mut s.v, v);
        s.p = p_star;
        s.phi = phi;
        s.temp = temp;
        s.step += 1;
        s.time = s.step as f64 * dt;
        s.check_finite()
    }
}

/// Run `n_steps` steps from rest, recording `(u, v, p, T)` every
/// `snap_every` steps. Labels are the snapshot times.
pub fn run_case(cfg: &SimConfig) -> Result<SnapshotMatrix> {
    run_case_with(cfg, |_, _| {})
}

/// [`run_case`] with a callback invoked after every recorded snapshot.
pub fn run_case_with(
    cfg: &SimConfig,
    mut on_snapshot: impl FnMut(usize, &Simulation),
) -> Result<SnapshotMatrix> {
    let mut sim = Simulation::new(cfg.clone())?;
    let mut columns = Vec::with_capacity(cfg.n_snapshots());
    let mut labels = Vec::with_capacity(cfg.n_snapshots());
    for n in 1..=cfg.n_steps {
        sim.step()?;
        if n % cfg.snap_every == 0 {
            columns.push(sim.state().snapshot());
            labels.push(sim.state().time);
            on_snapshot(columns.len() - 1, &sim);
        }
    }
    assemble(&columns, snapshot_layout(&cfg.grid)?, &labels)
}
