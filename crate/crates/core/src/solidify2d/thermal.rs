//! Temperature transport: explicit first-order upwind advection followed by
//! backward-Euler diffusion. The update is written for the increment
//! `Tⁿ - Tⁿ⁻¹`, so a uniform field with no wall flux stays bit-identical.

use super::config::{SimConfig, ThermalWall};
use crate::error::{Error, Result};
use crate::grid_field::StaggeredGrid2D;
use crate::linalg::{BandLu, BandMatrix, SparseRows};

const RESIDUAL_TOL: f64 = 1e-9;

/// Factorized `(1/Δt - κ∇²)` with the right-wall condition folded in.
pub struct ThermalSolver {
    grid: StaggeredGrid2D,
    kappa: f64,
    /// Conductance (per unit cell area) between right-wall cells and the
    /// ambient/wall temperature.
    wall_conductance: f64,
    wall_temp: f64,
    matrix: SparseRows,
    lu: BandLu,
}

impl ThermalSolver {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let grid = cfg.grid;
        let kappa = cfg.thermal_diffusivity;
        let (dx, dy) = (grid.dx(), grid.dy());
        let (wall_conductance, wall_temp) = match cfg.right_wall {
            ThermalWall::Robin { h, t_ambient } => {
                (1.0 / (dx * (0.5 * dx / kappa + 1.0 / h)), t_ambient)
            }
            ThermalWall::Dirichlet { t_cold } => (2.0 * kappa / (dx * dx), t_cold),
            ThermalWall::Adiabatic => (0.0, 0.0),
        };
        let n = grid.n_cells();
        let mut m = BandMatrix::zeros(n, grid.nx, grid.nx);
        let (wx, wy) = (kappa / (dx * dx), kappa / (dy * dy));
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let c = grid.cell(i, j);
                m.add(c, c, 1.0 / cfg.dt);
                let mut link = |nb: usize, w: f64| {
                    m.add(c, c, w);
                    m.add(c, nb, -w);
                };
                if i > 0 {
                    link(grid.cell(i - 1, j), wx);
                }
                if i + 1 < grid.nx {
                    link(grid.cell(i + 1, j), wx);
                }
                if j > 0 {
                    link(grid.cell(i, j - 1), wy);
                }
                if j + 1 < grid.ny {
                    link(grid.cell(i, j + 1), wy);
                }
                if i + 1 == grid.nx {
                    m.add(c, c, wall_conductance);
                }
            }
        }
        Ok(Self {
            grid,
            kappa,
            wall_conductance,
            wall_temp,
            lu: m.factor()?,
            matrix: m.to_sparse(),
        })
    }

    /// Advance `temp` by one step with the (divergence-free) face velocities.
    pub fn step(&self, temp: &[f64], u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        let (dx, dy) = (g.dx(), g.dy());
        let (wx, wy) = (self.kappa / (dx * dx), self.kappa / (dy * dy));
        let n = g.n_cells();
        let mut rhs = vec![0.0; n];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let c = g.cell(i, j);
                let t = temp[c];
                // walls act as zero-gradient for advection
                let tw = if i > 0 { temp[g.cell(i - 1, j)] } else { t };
                let te = if i + 1 < g.nx {
                    temp[g.cell(i + 1, j)]
                } else {
                    t
                };
                let ts = if j > 0 { temp[g.cell(i, j - 1)] } else { t };
                let tn = if j + 1 < g.ny {
                    temp[g.cell(i, j + 1)]
                } else {
                    t
                };

                let uc = 0.5 * (u[g.u_idx(i, j)] + u[g.u_idx(i + 1, j)]);
                let vc = 0.5 * (v[g.v_idx(i, j)] + v[g.v_idx(i, j + 1)]);
                let adv = if uc > 0.0 {
                    uc * (t - tw)
                } else {
                    uc * (te - t)
                } / dx
                    + if vc > 0.0 {
                        vc * (t - ts)
                    } else {
                        vc * (tn - t)
                    } / dy;

                // diffusion of the old field, consistent with the matrix
                let mut lap = 0.0;
                if i > 0 {
                    lap += wx * (tw - t);
                }
                if i + 1 < g.nx {
                    lap += wx * (te - t);
                }
                if j > 0 {
                    lap += wy * (ts - t);
                }
                if j + 1 < g.ny {
                    lap += wy * (tn - t);
                }
                if i + 1 == g.nx {
                    lap += self.wall_conductance * (self.wall_temp - t);
                }
                rhs[c] = -adv + lap;
            }
        }
        let b = rhs.clone();
        self.lu.solve_in_place(&mut rhs);

        let mut check = vec![0.0; n];
        self.matrix.mul_vec(&rhs, &mut check);
        let res = check
            .iter()
            .zip(&b)
            .map(|(a, r)| (a - r).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm = b.iter().map(|r| r * r).sum::<f64>().sqrt();
        if norm > 0.0 && res > RESIDUAL_TOL * norm {
            return Err(Error::numerical(
                "temperature solve residual above tolerance",
                1,
                res / norm,
            ));
        }
        Ok(temp.iter().zip(&rhs).map(|(t, d)| t + d).collect())
    }

    /// `Σ T · area`, the thermal energy up to a constant heat capacity.
    pub fn thermal_energy(&self, temp: &[f64]) -> f64 {
        temp.iter().sum::<f64>() * self.grid.dx() * self.grid.dy()
    }
}
