//! 1D reference problems: the heat equation with a rectangular initial
//! condition, a sharp front `u = 1 for x <= t`, and smooth sigmoid fronts.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid_field::{assemble, FieldLayout, Grid1D, SnapshotMatrix};

/// Steepness of the "steep" advected sigmoid.
pub const SIGMOID_STEEP: f64 = 100.0;
/// Steepness of the "stretched" advected sigmoid.
pub const SIGMOID_STRETCHED: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeatScheme {
    ExplicitEuler,
    #[default]
    ImplicitEuler,
}

impl FromStr for HeatScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" | "explicit_euler" => Ok(HeatScheme::ExplicitEuler),
            "implicit" | "implicit_euler" => Ok(HeatScheme::ImplicitEuler),
            other => Err(Error::Argument(format!("unknown heat scheme '{other}'"))),
        }
    }
}

impl fmt::Display for HeatScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeatScheme::ExplicitEuler => "explicit_euler",
            HeatScheme::ImplicitEuler => "implicit_euler",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition1D {
    /// `height` on `[left, right]`, zero elsewhere.
    Rectangle { left: f64, right: f64, height: f64 },
    /// Nodal values, one per grid node.
    Custom(Vec<f64>),
}

impl Default for InitialCondition1D {
    fn default() -> Self {
        InitialCondition1D::Rectangle {
            left: 0.25,
            right: 0.75,
            height: 1.0,
        }
    }
}

impl InitialCondition1D {
    pub fn sample(&self, grid: &Grid1D) -> Result<Vec<f64>> {
        let n = grid.n_nodes();
        match self {
            InitialCondition1D::Rectangle {
                left,
                right,
                height,
            } => {
                if !(left.is_finite() && right.is_finite() && height.is_finite()) {
                    return Err(Error::Argument(
                        "rectangle parameters must be finite".into(),
                    ));
                }
                if !(*left > grid.x_min() && right < &grid.x_max() && left < right) {
                    return Err(Error::Argument(format!(
                        "rectangle [{left}, {right}] must lie strictly inside ({}, {})",
                        grid.x_min(),
                        grid.x_max()
                    )));
                }
                Ok((0..n)
                    .map(|i| {
                        let x = grid.x(i);
                        if x >= *left && x <= *right {
                            *height
                        } else {
                            0.0
                        }
                    })
                    .collect())
            }
            InitialCondition1D::Custom(values) => {
                if values.len() != n {
                    return Err(Error::Dimension(format!(
                        "initial condition has {} values for {n} nodes",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Data(
                        "initial condition has non-finite values".into(),
                    ));
                }
                if values[0] != 0.0 || values[n - 1] != 0.0 {
                    return Err(Error::Argument(
                        "initial condition must vanish at both boundary nodes".into(),
                    ));
                }
                Ok(values.clone())
            }
        }
    }
}

/// `u_t = α u_xx` with homogeneous Dirichlet ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Heat1DConfig {
    pub alpha: f64,
    pub dt: f64,
    pub grid: Grid1D,
    pub n_snaps: usize,
    pub ic: InitialCondition1D,
    pub scheme: HeatScheme,
}

impl Default for Heat1DConfig {
    /// α = 1, Δt = 1e-3, 256 nodes on [0, 1], 128 snapshots, implicit Euler.
    fn default() -> Self {
        Self {
            alpha: 1.0,
            dt: 1e-3,
            grid: Grid1D::unit(256).expect("valid grid"),
            n_snaps: 128,
            ic: InitialCondition1D::default(),
            scheme: HeatScheme::ImplicitEuler,
        }
    }
}

impl Heat1DConfig {
    /// Largest stable forward-Euler step, `Δx² / (2α)`.
    pub fn explicit_dt_limit(&self) -> f64 {
        self.grid.spacing().powi(2) / (2.0 * self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Argument(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Argument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.n_snaps == 0 {
            return Err(Error::Argument("n_snaps must be at least 1".into()));
        }
        if self.grid.n_nodes() < 3 {
            return Err(Error::Argument(
                "heat solver needs at least one interior node".into(),
            ));
        }
        if self.scheme == HeatScheme::ExplicitEuler && self.dt > self.explicit_dt_limit() {
            return Err(Error::Stability {
                reason: "explicit Euler heat step exceeds dx^2/(2 alpha)".into(),
                value: self.dt,
                limit: self.explicit_dt_limit(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Heat1DConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[grid]")?;
        writeln!(f, "nodes = {}", self.grid.n_nodes())?;
        writeln!(f, "x_min = {}", self.grid.x_min())?;
        writeln!(f, "x_max = {}", self.grid.x_max())?;
        writeln!(f, "[time]")?;
        writeln!(f, "dt = {}", self.dt)?;
        writeln!(f, "snapshots = {}", self.n_snaps)?;
        writeln!(f, "scheme = {}", self.scheme)?;
        writeln!(f, "[material]")?;
        writeln!(f, "alpha = {}", self.alpha)?;
        match &self.ic {
            InitialCondition1D::Rectangle {
                left,
                right,
                height,
            } => {
                writeln!(f, "rect_left = {left}")?;
                writeln!(f, "rect_right = {right}")?;
                write!(f, "rect_height = {height}")
            }
            InitialCondition1D::Custom(_) => write!(f, "initial_condition = custom"),
        }
    }
}

/// Column `j` holds the solution after `j` steps; column 0 is the initial
/// condition. Labels are the times `j·Δt`.
pub fn solve_heat1d(cfg: &Heat1DConfig) -> Result<SnapshotMatrix> {
    cfg.validate()?;
    let n = cfg.grid.n_nodes();
    let r = cfg.alpha * cfg.dt / cfg.grid.spacing().powi(2);
    let mut u = cfg.ic.sample(&cfg.grid)?;

    let mut columns = Vec::with_capacity(cfg.n_snaps);
    columns.push(u.clone());
    let mut next = vec![0.0; n];
    let thomas = match cfg.scheme {
        HeatScheme::ImplicitEuler => Some(Tridiagonal::constant(n - 2, -r, 1.0 + 2.0 * r, -r)?),
        HeatScheme::ExplicitEuler => None,
    };
    for _ in 1..cfg.n_snaps {
        match &thomas {
            Some(sys) => {
                next.copy_from_slice(&u);
                sys.solve_in_place(&mut next[1..n - 1]);
            }
            None => {
                for i in 1..n - 1 {
                    next[i] = u[i] + r * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
                }
            }
        }
        next[0] = 0.0;
        next[n - 1] = 0.0;
        std::mem::swap(&mut u, &mut next);
        columns.push(u.clone());
    }
    let labels: Vec<f64> = (0..cfg.n_snaps).map(|j| j as f64 * cfg.dt).collect();
    assemble(&columns, FieldLayout::single("u", n)?, &labels)
}

/// Pre-eliminated constant-coefficient tridiagonal system (Thomas algorithm).
struct Tridiagonal {
    lower: f64,
    upper: f64,
    /// Modified diagonal after forward elimination.
    diag: Vec<f64>,
}

impl Tridiagonal {
    fn constant(n: usize, lower: f64, diag: f64, upper: f64) -> Result<Self> {
        let mut d = vec![diag; n];
        for i in 1..n {
            if d[i - 1] == 0.0 {
                return Err(Error::numerical("singular tridiagonal system", i, 0.0));
            }
            d[i] = diag - lower * upper / d[i - 1];
        }
        Ok(Self {
            lower,
            upper,
            diag: d,
        })
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 1..n {
            b[i] -= self.lower / self.diag[i - 1] * b[i - 1];
        }
        b[n - 1] /= self.diag[n - 1];
        for i in (0..n - 1).rev() {
            b[i] = (b[i] - self.upper * b[i + 1]) / self.diag[i];
        }
    }
}

/// Snapshot times `t_j = j / (n_snaps - 1)` on `[0, 1]`.
pub fn advection_times(n_snaps: usize) -> Result<Vec<f64>> {
    if n_snaps < 2 {
        return Err(Error::Argument(format!(
            "advected profiles need at least 2 snapshots, got {n_snaps}"
        )));
    }
    let last = (n_snaps - 1) as f64;
    Ok((0..n_snaps).map(|j| j as f64 / last).collect())
}

/// `u(x, t) = 1` if `x <= t`, else 0.
pub fn gen_advected_jump(grid: &Grid1D, n_snaps: usize) -> Result<SnapshotMatrix> {
    gen_profile(grid, n_snaps, |x, t| if x <= t { 1.0 } else { 0.0 })
}

/// `u(x, t) = 1 / (1 + exp(-k (t - x)))`.
pub fn gen_sigmoid(grid: &Grid1D, n_snaps: usize, k: f64) -> Result<SnapshotMatrix> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Argument(format!(
            "sigmoid steepness must be positive, got {k}"
        )));
    }
    gen_profile(grid, n_snaps, |x, t| sigmoid(k, x, t))
}

#[inline]
pub fn sigmoid(k: f64, x: f64, t: f64) -> f64 {
    1.0 / (1.0 + (-k * (t - x)).exp())
}

fn gen_profile(
    grid: &Grid1D,
    n_snaps: usize,
    f: impl Fn(f64, f64) -> f64,
) -> Result<SnapshotMatrix> {
    let times = advection_times(n_snaps)?;
    let xs = grid.coordinates();
    let columns: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| xs.iter().map(|&x| f(x, t)).collect())
        .collect();
    assemble(&columns, FieldLayout::single("u", grid.n_nodes())?, &times)
}
