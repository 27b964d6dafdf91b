use crate::error::{Error, Result};

/// Uniform 1D grid including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_nodes: usize,
    x_min: f64,
    x_max: f64,
}

impl Grid1D {
    pub fn new(n_nodes: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::Argument(format!(
                "grid needs at least 2 nodes, got {n_nodes}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Argument(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self {
            n_nodes,
            x_min,
            x_max,
        })
    }

    /// `n_nodes` points on `[0, 1]`.
    pub fn unit(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, 0.0, 1.0)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_nodes - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_nodes - 1 {
            return self.x_max;
        }
        self.x_min + i as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.x(i)).collect()
    }
}

/// Marker-and-cell grid on `[0, lx] x [0, ly]`.
///
/// Scalars (pressure, temperature) live at cell centres, `u` on vertical
/// faces and `v` on horizontal faces. All fields are stored with the x index
/// running fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggeredGrid2D {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl StaggeredGrid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Argument(format!(
                "staggered grid needs at least 2x2 cells, got {nx}x{ny}"
            )));
        }
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(Error::Argument(format!(
                "domain extents must be positive, got {lx}x{ly}"
            )));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_u(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn n_v(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    #[inline]
    pub fn u_idx(&self, i: usize, j: usize) -> usize {
        i + (self.nx + 1) * j
    }

    #[inline]
    pub fn v_idx(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.dx(), (j as f64 + 0.5) * self.dy())
    }

    pub fn u_location(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.dx(), (j as f64 + 0.5) * self.dy())
    }

    pub fn v_location(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.dx(), j as f64 * self.dy())
    }
}
