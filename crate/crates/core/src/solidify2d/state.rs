use crate::error::{Error, Result};
use crate::grid_field::StaggeredGrid2D;

/// Discrete solution on a MAC grid.
///
/// `p` is the latest pressure `p^{n-1/2}`; it doubles as the pressure guess
/// `p*` of the next step. `u_prev`/`v_prev` hold the velocity one level back
/// for the Adams–Bashforth extrapolation of the convecting velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub grid: StaggeredGrid2D,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub u_prev: Vec<f64>,
    pub v_prev: Vec<f64>,
    pub p: Vec<f64>,
    pub phi: Vec<f64>,
    pub temp: Vec<f64>,
    pub time: f64,
    pub step: usize,
}

impl FlowState {
    /// Fluid at rest with uniform temperature and zero pressure.
    pub fn at_rest(grid: StaggeredGrid2D, temp: f64) -> Self {
        Self {
            grid,
            u: vec![0.0; grid.n_u()],
            v: vec![0.0; grid.n_v()],
            u_prev: vec![0.0; grid.n_u()],
            v_prev: vec![0.0; grid.n_v()],
            p: vec![0.0; grid.n_cells()],
            phi: vec![0.0; grid.n_cells()],
            temp: vec![temp; grid.n_cells()],
            time: 0.0,
            step: 0,
        }
    }

    /// Initialize from point functions evaluated at the staggered locations.
    /// Normal velocity on the walls is forced to zero.
    pub fn from_fields(
        grid: StaggeredGrid2D,
        u: impl Fn(f64, f64) -> f64,
        v: impl Fn(f64, f64) -> f64,
        p: impl Fn(f64, f64) -> f64,
        temp: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut s = Self::at_rest(grid, 0.0);
        for j in 0..grid.ny {
            for i in 1..grid.nx {
                let (x, y) = grid.u_location(i, j);
                s.u[grid.u_idx(i, j)] = u(x, y);
            }
        }
        for j in 1..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.v_location(i, j);
                s.v[grid.v_idx(i, j)] = v(x, y);
            }
        }
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.cell_center(i, j);
                s.p[grid.cell(i, j)] = p(x, y);
                s.temp[grid.cell(i, j)] = temp(x, y);
            }
        }
        let mean = s.p.iter().sum::<f64>() / s.p.len() as f64;
        s.p.iter_mut().for_each(|x| *x -= mean);
        s.u_prev.clone_from(&s.u);
        s.v_prev.clone_from(&s.v);
        s
    }

    pub fn check_shapes(&self) -> Result<()> {
        let g = &self.grid;
        let ok = self.u.len() == g.n_u()
            && self.u_prev.len() == g.n_u()
            && self.v.len() == g.n_v()
            && self.v_prev.len() == g.n_v()
            && self.p.len() == g.n_cells()
            && self.phi.len() == g.n_cells()
            && self.temp.len() == g.n_cells();
        if !ok {
            return Err(Error::Dimension(
                "flow state arrays do not match the grid".into(),
            ));
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, f) in [
            ("u", &self.u),
            ("v", &self.v),
            ("p", &self.p),
            ("T", &self.temp),
        ] {
            if let Some(k) = f.iter().position(|x| !x.is_finite()) {
                return Err(Error::Data(format!("{name}[{k}] is not finite")));
            }
        }
        Ok(())
    }

    pub fn max_divergence(&self) -> f64 {
        max_divergence(&self.grid, &self.u, &self.v)
    }

    pub fn max_speed(&self) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `(u, v, p, T)` stacked into one snapshot column.
    pub fn snapshot(&self) -> Vec<f64> {
        let mut col = Vec::with_capacity(self.u.len() + self.v.len() + 2 * self.p.len());
        col.extend_from_slice(&self.u);
        col.extend_from_slice(&self.v);
        col.extend_from_slice(&self.p);
        col.extend_from_slice(&self.temp);
        col
    }
}

/// Cell-centred divergence `(u_E - u_W)/Δx + (v_N - v_S)/Δy`.
pub fn divergence(grid: &StaggeredGrid2D, u: &[f64], v: &[f64]) -> Vec<f64> {
    let (dx, dy) = (grid.dx(), grid.dy());
    let mut div = vec![0.0; grid.n_cells()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            div[grid.cell(i, j)] = (u[grid.u_idx(i + 1, j)] - u[grid.u_idx(i, j)]) / dx
                + (v[grid.v_idx(i, j + 1)] - v[grid.v_idx(i, j)]) / dy;
        }
    }
    div
}

pub fn max_divergence(grid: &StaggeredGrid2D, u: &[f64], v: &[f64]) -> f64 {
    divergence(grid, u, v)
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
}
