//! Tentative velocity: the linearized momentum solve of the fractional step.
//!
//! Per component,
//!
//! ```text
//! (uᴵ - uⁿ⁻¹)/Δt + (ū·∇)ũ = ∇·(μ ∇ũ_θ) - ∇p* + f
//! ```
//!
//! with convecting velocity `ū = 1.5 uⁿ⁻¹ - 0.5 uⁿ⁻²`, convected velocity
//! `ũ = (uᴵ + uⁿ⁻¹)/2` and viscosity lagged at `Tⁿ⁻¹`. The diffusion weight
//! θ is ½ except in rows where any viscosity coefficient exceeds
//! `implicit_viscosity_ratio · mu_liquid`, where it is 1 (θ = ½ does not damp
//! the stiff modes of freshly solidified cells).

use super::config::SimConfig;
use super::state::FlowState;
use super::viscosity::viscosity_of;
use crate::error::{Error, Result};
use crate::grid_field::StaggeredGrid2D;
use crate::linalg::{BandLu, SparseRows};

const RESIDUAL_TOL: f64 = 1e-9;
/// Defect correction with stale factors stops here.
const REFINE_TOL: f64 = 1e-12;
const MAX_REFINE: usize = 12;
/// Refactor when one correction sweep reduces the residual less than this.
const MIN_CONTRACTION: f64 = 0.7;

/// Assembled momentum system for one velocity component. The factors may be
/// those of an earlier step; they are then used as a preconditioner for
/// defect correction and replaced when it converges too slowly.
pub(crate) struct ComponentSystem {
    sparse: SparseRows,
    band: usize,
    lu: Option<BandLu>,
    fresh: bool,
    /// Right-hand side without the pressure-gradient term.
    rhs: Vec<f64>,
}

fn rel_residual(m: &SparseRows, x: &[f64], b: &[f64], r: &mut [f64]) -> f64 {
    m.mul_vec(x, r);
    let (mut res, mut norm) = (0.0, 0.0);
    for (rk, bk) in r.iter_mut().zip(b) {
        *rk = bk - *rk;
        res += *rk * *rk;
        norm += bk * bk;
    }
    if norm > 0.0 {
        (res / norm).sqrt()
    } else {
        res.sqrt()
    }
}

impl ComponentSystem {
    fn solve(&mut self, pressure_grad: &[f64]) -> Result<Vec<f64>> {
        let b: Vec<f64> = self
            .rhs
            .iter()
            .zip(pressure_grad)
            .map(|(r, g)| r - g)
            .collect();
        let mut r = vec![0.0; b.len()];
        if !self.fresh {
            if let Some(x) = self.lu.as_ref().and_then(|lu| self.refine(lu, &b, &mut r)) {
                return Ok(x);
            }
            self.lu = Some(self.sparse.to_band(self.band, self.band).factor()?);
            self.fresh = true;
        }
        if self.lu.is_none() {
            self.lu = Some(self.sparse.to_band(self.band, self.band).factor()?);
            self.fresh = true;
        }
        let lu = self.lu.as_ref().expect("factors present");
        let mut x = b.clone();
        lu.solve_in_place(&mut x);
        let res = rel_residual(&self.sparse, &x, &b, &mut r);
        if res > RESIDUAL_TOL {
            return Err(Error::numerical(
                "momentum solve residual above tolerance",
                1,
                res,
            ));
        }
        Ok(x)
    }

    /// Defect correction `x += LU⁻¹ (b - A x)` with stale factors; `None`
    /// when it stalls.
    fn refine(&self, lu: &BandLu, b: &[f64], r: &mut [f64]) -> Option<Vec<f64>> {
        let mut x = b.to_vec();
        lu.solve_in_place(&mut x);
        let mut prev = rel_residual(&self.sparse, &x, b, r);
        for sweep in 1..=MAX_REFINE {
            if prev <= REFINE_TOL {
                return Some(x);
            }
            lu.solve_in_place(r);
            x.iter_mut().zip(r.iter()).for_each(|(xk, dk)| *xk += dk);
            let res = rel_residual(&self.sparse, &x, b, r);
            let rate = res / prev;
            if rate.is_nan() || rate >= MIN_CONTRACTION {
                return None;
            }
            // give up early when the observed rate cannot reach the tolerance
            let needed = (REFINE_TOL / res).ln() / rate.ln();
            if res > REFINE_TOL && sweep as f64 + needed > MAX_REFINE as f64 {
                return None;
            }
            prev = res;
        }
        (prev <= REFINE_TOL).then_some(x)
    }
}

/// Both momentum systems for the current step. The matrices do not depend on
/// `p*`, so repeated inner iterations reuse the factors.
pub(crate) struct MomentumSystems {
    u: ComponentSystem,
    v: ComponentSystem,
}

/// `Δt (max|u|/Δx + max|v|/Δy)`.
pub fn cfl_number(grid: &StaggeredGrid2D, u: &[f64], v: &[f64], dt: f64) -> f64 {
    let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    dt * (umax / grid.dx() + vmax / grid.dy())
}

pub(crate) fn check_cfl(
    grid: &StaggeredGrid2D,
    u: &[f64],
    v: &[f64],
    cfg: &SimConfig,
) -> Result<()> {
    let cfl = cfl_number(grid, u, v, cfg.dt);
    if cfl > cfg.max_cfl {
        return Err(Error::Stability {
            reason: "advective CFL bound exceeded".into(),
            value: cfl,
            limit: cfg.max_cfl,
        });
    }
    Ok(())
}

/// One row of a component system: centre plus four neighbours (W, E, S, N).
/// Neighbour indices are in unknown numbering; `None` marks a wall value,
/// which is always zero.
struct Row {
    nb: [Option<usize>; 4],
    diff: [f64; 5],
    conv: [f64; 5],
    theta: f64,
    source: f64,
}

impl Row {
    fn new() -> Self {
        Row {
            nb: [None; 4],
            diff: [0.0; 5],
            conv: [0.0; 5],
            theta: 0.5,
            source: 0.0,
        }
    }
}

struct Coefficients<'a> {
    grid: &'a StaggeredGrid2D,
    mu_cell: Vec<f64>,
    mu_corner: Vec<f64>,
    ghost: f64,
    stiff_mu: f64,
}

impl<'a> Coefficients<'a> {
    fn new(state: &'a FlowState, cfg: &SimConfig) -> Self {
        let grid = &state.grid;
        let mu_cell: Vec<f64> = state
            .temp
            .iter()
            .map(|&t| viscosity_of(&cfg.viscosity, t))
            .collect();
        let (nx, ny) = (grid.nx, grid.ny);
        let mut mu_corner = vec![0.0; (nx + 1) * (ny + 1)];
        for j in 0..=ny {
            for i in 0..=nx {
                let (mut sum, mut n) = (0.0, 0.0);
                for (ci, cj) in [
                    (i.wrapping_sub(1), j.wrapping_sub(1)),
                    (i, j.wrapping_sub(1)),
                    (i.wrapping_sub(1), j),
                    (i, j),
                ] {
                    if ci < nx && cj < ny {
                        sum += mu_cell[grid.cell(ci, cj)];
                        n += 1.0;
                    }
                }
                mu_corner[i + (nx + 1) * j] = sum / n;
            }
        }
        Self {
            grid,
            mu_cell,
            mu_corner,
            ghost: cfg.velocity_walls.ghost_factor(),
            stiff_mu: cfg.implicit_viscosity_ratio * cfg.viscosity.mu_liquid,
        }
    }

    fn cell(&self, i: usize, j: usize) -> f64 {
        self.mu_cell[self.grid.cell(i, j)]
    }

    fn corner(&self, i: usize, j: usize) -> f64 {
        self.mu_corner[i + (self.grid.nx + 1) * j]
    }

    /// Backward Euler as soon as any coefficient of the row is stiff.
    fn theta(&self, mu: [f64; 4]) -> f64 {
        if mu.iter().any(|&m| m > self.stiff_mu) {
            1.0
        } else {
            0.5
        }
    }
}

const C: usize = 0;
const W: usize = 1;
const E: usize = 2;
const S: usize = 3;
const N: usize = 4;

/// Rows for the `u` unknowns at faces `i = 1..nx-1`, numbered `(i-1) + (nx-1) j`.
fn u_rows(co: &Coefficients, ubar: &[f64], vbar: &[f64]) -> Vec<Row> {
    let g = co.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx(), g.dy());
    let idx = |i: usize, j: usize| (i - 1) + (nx - 1) * j;
    let mut rows = Vec::with_capacity((nx - 1) * ny);
    for j in 0..ny {
        for i in 1..nx {
            let mut r = Row::new();
            let (mw, me) = (co.cell(i - 1, j), co.cell(i, j));
            let (ms, mn) = (co.corner(i, j), co.corner(i, j + 1));
            r.theta = co.theta([mw, me, ms, mn]);

            let a = ubar[g.u_idx(i, j)];
            let b = 0.25
                * (vbar[g.v_idx(i - 1, j)]
                    + vbar[g.v_idx(i, j)]
                    + vbar[g.v_idx(i - 1, j + 1)]
                    + vbar[g.v_idx(i, j + 1)]);

            // x direction: wall faces at i = 0 and i = nx carry zero velocity
            r.diff[C] -= (mw + me) / (dx * dx);
            r.diff[W] = mw / (dx * dx);
            r.diff[E] = me / (dx * dx);
            r.conv[W] = -a / (2.0 * dx);
            r.conv[E] = a / (2.0 * dx);
            r.nb[0] = (i > 1).then(|| idx(i - 1, j));
            r.nb[1] = (i + 1 < nx).then(|| idx(i + 1, j));

            // y direction: tangential ghosts fold into the centre
            r.diff[C] -= (ms + mn) / (dy * dy);
            let (cs, cn) = (-b / (2.0 * dy), b / (2.0 * dy));
            if j > 0 {
                r.nb[2] = Some(idx(i, j - 1));
                r.diff[S] = ms / (dy * dy);
                r.conv[S] = cs;
            } else {
                r.diff[C] += co.ghost * ms / (dy * dy);
                r.conv[C] += co.ghost * cs;
            }
            if j + 1 < ny {
                r.nb[3] = Some(idx(i, j + 1));
                r.diff[N] = mn / (dy * dy);
                r.conv[N] = cn;
            } else {
                r.diff[C] += co.ghost * mn / (dy * dy);
                r.conv[C] += co.ghost * cn;
            }
            rows.push(r);
        }
    }
    rows
}

/// Rows for the `v` unknowns at faces `j = 1..ny-1`, numbered `i + nx (j-1)`.
fn v_rows(
    co: &Coefficients,
    ubar: &[f64],
    vbar: &[f64],
    cfg: &SimConfig,
    state: &FlowState,
) -> Vec<Row> {
    let g = co.grid;
    let (nx, ny) = (g.nx, g.ny);
    let (dx, dy) = (g.dx(), g.dy());
    let idx = |i: usize, j: usize| i + nx * (j - 1);
    let mut rows = Vec::with_capacity(nx * (ny - 1));
    for j in 1..ny {
        for i in 0..nx {
            let mut r = Row::new();
            let (ms, mn) = (co.cell(i, j - 1), co.cell(i, j));
            let (mw, me) = (co.corner(i, j), co.corner(i + 1, j));
            r.theta = co.theta([ms, mn, mw, me]);

            let a = 0.25
                * (ubar[g.u_idx(i, j - 1)]
                    + ubar[g.u_idx(i + 1, j - 1)]
                    + ubar[g.u_idx(i, j)]
                    + ubar[g.u_idx(i + 1, j)]);
            let b = vbar[g.v_idx(i, j)];

            r.diff[C] -= (ms + mn) / (dy * dy);
            r.diff[S] = ms / (dy * dy);
            r.diff[N] = mn / (dy * dy);
            r.conv[S] = -b / (2.0 * dy);
            r.conv[N] = b / (2.0 * dy);
            r.nb[2] = (j > 1).then(|| idx(i, j - 1));
            r.nb[3] = (j + 1 < ny).then(|| idx(i, j + 1));

            r.diff[C] -= (mw + me) / (dx * dx);
            let (cw, ce) = (-a / (2.0 * dx), a / (2.0 * dx));
            if i > 0 {
                r.nb[0] = Some(idx(i - 1, j));
                r.diff[W] = mw / (dx * dx);
                r.conv[W] = cw;
            } else {
                r.diff[C] += co.ghost * mw / (dx * dx);
                r.conv[C] += co.ghost * cw;
            }
            if i + 1 < nx {
                r.nb[1] = Some(idx(i + 1, j));
                r.diff[E] = me / (dx * dx);
                r.conv[E] = ce;
            } else {
                r.diff[C] += co.ghost * me / (dx * dx);
                r.conv[C] += co.ghost * ce;
            }

            let t_face = 0.5 * (state.temp[g.cell(i, j - 1)] + state.temp[g.cell(i, j)]);
            r.source = cfg.buoyancy_coeff * (t_face - cfg.t_ref);
            rows.push(r);
        }
    }
    rows
}

/// `(1/Δt + ½C - θD) uᴵ = (1/Δt - ½C + (1-θ)D) uⁿ⁻¹ + f`.
fn build_system(
    rows: &[Row],
    old: &[f64],
    dt: f64,
    band: usize,
    stale: Option<BandLu>,
) -> Result<ComponentSystem> {
    let n = rows.len();
    let mut m = SparseRows::with_capacity(n, 5 * n);
    let mut rhs = vec![0.0; n];
    for (k, r) in rows.iter().enumerate() {
        let th = r.theta;
        m.push(k, 1.0 / dt + 0.5 * r.conv[C] - th * r.diff[C]);
        let mut acc = old[k] * (1.0 / dt - 0.5 * r.conv[C] + (1.0 - th) * r.diff[C]);
        for (slot, nb) in r.nb.iter().enumerate() {
            if let Some(col) = *nb {
                let (d, c) = (r.diff[slot + 1], r.conv[slot + 1]);
                m.push(col, 0.5 * c - th * d);
                acc += old[col] * ((1.0 - th) * d - 0.5 * c);
            }
        }
        m.finish_row();
        rhs[k] = acc + r.source;
    }
    Ok(ComponentSystem {
        lu: stale,
        fresh: false,
        sparse: m,
        band,
        rhs,
    })
}

fn interior_u(g: &StaggeredGrid2D, u: &[f64]) -> Vec<f64> {
    (0..g.ny)
        .flat_map(|j| (1..g.nx).map(move |i| (i, j)))
        .map(|(i, j)| u[g.u_idx(i, j)])
        .collect()
}

fn interior_v(g: &StaggeredGrid2D, v: &[f64]) -> Vec<f64> {
    (1..g.ny)
        .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
        .map(|(i, j)| v[g.v_idx(i, j)])
        .collect()
}

impl MomentumSystems {
    /// Assemble both systems. `stale` are factors from an earlier step,
    /// reused while they still precondition well.
    pub(crate) fn assemble(
        state: &FlowState,
        cfg: &SimConfig,
        stale: Option<(BandLu, BandLu)>,
    ) -> Result<Self> {
        let (stale_u, stale_v) = match stale {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        let g = &state.grid;
        let (ubar, vbar): (Vec<f64>, Vec<f64>) = if state.step == 0 {
            (state.u.clone(), state.v.clone())
        } else {
            (
                state
                    .u
                    .iter()
                    .zip(&state.u_prev)
                    .map(|(a, b)| 1.5 * a - 0.5 * b)
                    .collect(),
                state
                    .v
                    .iter()
                    .zip(&state.v_prev)
                    .map(|(a, b)| 1.5 * a - 0.5 * b)
                    .collect(),
            )
        };
        check_cfl(g, &ubar, &vbar, cfg)?;
        let co = Coefficients::new(state, cfg);
        let u = build_system(
            &u_rows(&co, &ubar, &vbar),
            &interior_u(g, &state.u),
            cfg.dt,
            g.nx - 1,
            stale_u,
        )?;
        let v = build_system(
            &v_rows(&co, &ubar, &vbar, cfg, state),
            &interior_v(g, &state.v),
            cfg.dt,
            g.nx,
            stale_v,
        )?;
        Ok(Self { u, v })
    }

    /// The factors currently held, for reuse in the next step.
    pub(crate) fn into_factors(self) -> Option<(BandLu, BandLu)> {
        self.u.lu.zip(self.v.lu)
    }

    /// Tentative velocity for the pressure guess `p_star`, as full face arrays.
    pub(crate) fn solve(
        &mut self,
        grid: &StaggeredGrid2D,
        p_star: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let (dx, dy) = (grid.dx(), grid.dy());
        let gx: Vec<f64> = (0..grid.ny)
            .flat_map(|j| (1..grid.nx).map(move |i| (i, j)))
            .map(|(i, j)| (p_star[grid.cell(i, j)] - p_star[grid.cell(i - 1, j)]) / dx)
            .collect();
        let gy: Vec<f64> = (1..grid.ny)
            .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
            .map(|(i, j)| (p_star[grid.cell(i, j)] - p_star[grid.cell(i, j - 1)]) / dy)
            .collect();
        let ui = self.u.solve(&gx)?;
        let vi = self.v.solve(&gy)?;

        let mut u = vec![0.0; grid.n_u()];
        let mut v = vec![0.0; grid.n_v()];
        let mut it = ui.into_iter();
        for j in 0..grid.ny {
            for i in 1..grid.nx {
                u[grid.u_idx(i, j)] = it.next().unwrap();
            }
        }
        let mut it = vi.into_iter();
        for j in 1..grid.ny {
            for i in 0..grid.nx {
                v[grid.v_idx(i, j)] = it.next().unwrap();
            }
        }
        Ok((u, v))
    }
}

/// Tentative velocity `(uᴵ, vᴵ)` using the state's pressure as `p*`.
pub fn tentative_velocity(state: &FlowState, cfg: &SimConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    state.check_shapes()?;
    MomentumSystems::assemble(state, cfg, None)?.solve(&state.grid, &state.p)
}
