//! Pressure-correction Poisson problem and velocity projection.

use super::config::SimConfig;
use super::state::divergence;
use crate::error::{Error, Result};
use crate::grid_field::StaggeredGrid2D;
use crate::linalg::{BandLu, BandMatrix};

const RESIDUAL_TOL: f64 = 1e-10;

/// Factorized Neumann Laplacian on cell centres.
///
/// The operator is singular (constants), so cell 0 is eliminated to get a
/// definite system. Right-hand sides are first projected onto zero mean,
/// which makes the eliminated equation redundant; the solution is then
/// shifted to its zero-mean representative.
pub struct PressureSolver {
    grid: StaggeredGrid2D,
    lu: BandLu,
}

impl PressureSolver {
    pub fn new(grid: StaggeredGrid2D) -> Result<Self> {
        let n = grid.n_cells();
        let mut a = BandMatrix::zeros(n - 1, grid.nx, grid.nx);
        for_each_link(&grid, |c, nb, w| {
            // -Laplacian; unknown k corresponds to cell k + 1
            if c > 0 {
                a.add(c - 1, c - 1, w);
                if nb > 0 {
                    a.add(c - 1, nb - 1, -w);
                }
            }
        });
        Ok(Self {
            grid,
            lu: a.factor()?,
        })
    }

    pub fn grid(&self) -> &StaggeredGrid2D {
        &self.grid
    }

    /// Solve `∇²φ = f` with homogeneous Neumann walls, returning the
    /// zero-mean solution. `f` is projected onto zero mean first.
    pub fn solve(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.n_cells();
        let mean = f.iter().sum::<f64>() / n as f64;
        let rhs: Vec<f64> = f.iter().map(|v| -(v - mean)).collect();
        let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rhs_norm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = rhs[1..].to_vec();
        self.lu.solve_in_place(&mut x);
        let mut phi = Vec::with_capacity(n);
        phi.push(0.0);
        phi.extend_from_slice(&x);
        let m = phi.iter().sum::<f64>() / n as f64;
        phi.iter_mut().for_each(|v| *v -= m);

        let lap = neumann_laplacian(&self.grid, &phi);
        let res = lap
            .iter()
            .zip(&rhs)
            .map(|(l, r)| (-l - r).powi(2))
            .sum::<f64>()
            .sqrt();
        if res > RESIDUAL_TOL * rhs_norm {
            return Err(Error::numerical(
                "pressure Poisson residual above tolerance",
                1,
                res / rhs_norm,
            ));
        }
        Ok(phi)
    }

    /// `φ` from `∇²φ = (1/Δt) ∇·uᴵ`.
    pub fn correction(&self, u: &[f64], v: &[f64], dt: f64) -> Result<Vec<f64>> {
        let div = divergence(&self.grid, u, v);
        let f: Vec<f64> = div.iter().map(|d| d / dt).collect();
        self.solve(&f)
    }
}

/// Visit every interior cell link `(c, neighbour, weight)` in both
/// directions, with `weight = 1/h²`.
fn for_each_link(grid: &StaggeredGrid2D, mut f: impl FnMut(usize, usize, f64)) {
    let (wx, wy) = (1.0 / grid.dx().powi(2), 1.0 / grid.dy().powi(2));
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.cell(i, j);
            if i > 0 {
                f(c, grid.cell(i - 1, j), wx);
            }
            if i + 1 < grid.nx {
                f(c, grid.cell(i + 1, j), wx);
            }
            if j > 0 {
                f(c, grid.cell(i, j - 1), wy);
            }
            if j + 1 < grid.ny {
                f(c, grid.cell(i, j + 1), wy);
            }
        }
    }
}

/// Five-point Laplacian with zero normal gradient at the walls.
pub fn neumann_laplacian(grid: &StaggeredGrid2D, phi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; grid.n_cells()];
    for_each_link(grid, |c, nb, w| out[c] += w * (phi[nb] - phi[c]));
    out
}

/// Solve the pressure correction for a tentative velocity field.
pub fn pressure_correction(u: &[f64], v: &[f64], cfg: &SimConfig) -> Result<Vec<f64>> {
    PressureSolver::new(cfg.grid)?.correction(u, v, cfg.dt)
}

/// `uⁿ = uᴵ − Δt ∇φ` on interior faces and `p = p* + φ`.
pub fn velocity_update(
    grid: &StaggeredGrid2D,
    u: &mut [f64],
    v: &mut [f64],
    p: &mut [f64],
    phi: &[f64],
    dt: f64,
) {
    let (dx, dy) = (grid.dx(), grid.dy());
    for j in 0..grid.ny {
        for i in 1..grid.nx {
            u[grid.u_idx(i, j)] -= dt * (phi[grid.cell(i, j)] - phi[grid.cell(i - 1, j)]) / dx;
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            v[grid.v_idx(i, j)] -= dt * (phi[grid.cell(i, j)] - phi[grid.cell(i, j - 1)]) / dy;
        }
    }
    for (pk, fk) in p.iter_mut().zip(phi) {
        *pk += fk;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solidify2d::state::max_divergence;

    fn random_fields(grid: &StaggeredGrid2D, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut u = vec![0.0; grid.n_u()];
        let mut v = vec![0.0; grid.n_v()];
        for j in 0..grid.ny {
            for i in 1..grid.nx {
                u[grid.u_idx(i, j)] = next();
            }
        }
        for j in 1..grid.ny {
            for i in 0..grid.nx {
                v[grid.v_idx(i, j)] = next();
            }
        }
        (u, v)
    }

    #[test]
    fn divergence_free_input_gives_zero_phi() {
        let g = StaggeredGrid2D::unit_square(8).unwrap();
        let solver = PressureSolver::new(g).unwrap();
        let phi = solver
            .correction(&vec![0.0; g.n_u()], &vec![0.0; g.n_v()], 0.1)
            .unwrap();
        assert!(phi.iter().all(|&x| x == 0.0));
        // discrete curl field: u = ∂ψ/∂y, v = -∂ψ/∂x from a corner stream function
        let psi = |i: usize, j: usize| {
            ((i * 3 + j * 5) % 7) as f64
                * if i == 0 || j == 0 || i == 8 || j == 8 {
                    0.0
                } else {
                    1.0
                }
        };
        let mut u = vec![0.0; g.n_u()];
        let mut v = vec![0.0; g.n_v()];
        for j in 0..8 {
            for i in 0..=8 {
                u[g.u_idx(i, j)] = (psi(i, j + 1) - psi(i, j)) / g.dy();
            }
        }
        for j in 0..=8 {
            for i in 0..8 {
                v[g.v_idx(i, j)] = -(psi(i + 1, j) - psi(i, j)) / g.dx();
            }
        }
        assert!(max_divergence(&g, &u, &v) < 1e-12);
        let phi = solver.correction(&u, &v, 0.1).unwrap();
        assert!(phi.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn projection_removes_divergence() {
        let g = StaggeredGrid2D::new(16, 12, 1.0, 0.75).unwrap();
        let solver = PressureSolver::new(g).unwrap();
        for seed in 0..5 {
            let (mut u, mut v) = random_fields(&g, seed);
            let dt = 0.01;
            let phi = solver.correction(&u, &v, dt).unwrap();
            let mut p = vec![0.0; g.n_cells()];
            velocity_update(&g, &mut u, &mut v, &mut p, &phi, dt);
            let scale = u.iter().chain(&v).fold(1.0f64, |m, x| m.max(x.abs()));
            assert!(max_divergence(&g, &u, &v) <= 1e-8 * scale);
            assert_eq!(p, phi);
        }
    }

    #[test]
    fn zero_phi_is_identity_and_linear_phi_shifts_uniformly() {
        let g = StaggeredGrid2D::unit_square(6).unwrap();
        let (u0, v0) = random_fields(&g, 7);
        let (mut u, mut v) = (u0.clone(), v0.clone());
        let mut p = vec![0.0; g.n_cells()];
        velocity_update(&g, &mut u, &mut v, &mut p, &vec![0.0; g.n_cells()], 0.5);
        assert_eq!((&u, &v), (&u0, &v0));

        let a = 3.0;
        let phi: Vec<f64> = (0..g.n_cells())
            .map(|c| a * g.cell_center(c % 6, c / 6).0)
            .collect();
        let dt = 0.1;
        velocity_update(&g, &mut u, &mut v, &mut p, &phi, dt);
        for j in 0..6 {
            for i in 1..6 {
                let k = g.u_idx(i, j);
                assert!((u[k] - (u0[k] - dt * a)).abs() < 1e-12);
            }
        }
        assert_eq!(v, v0);
    }

    #[test]
    fn constant_offset_in_rhs_is_ignored() {
        let g = StaggeredGrid2D::unit_square(8).unwrap();
        let solver = PressureSolver::new(g).unwrap();
        let f: Vec<f64> = (0..64).map(|k| ((k * 37) % 11) as f64 - 5.0).collect();
        let shifted: Vec<f64> = f.iter().map(|x| x + 4.2).collect();
        let a = solver.solve(&f).unwrap();
        let b = solver.solve(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(a.iter().sum::<f64>().abs() < 1e-12);
    }
}
