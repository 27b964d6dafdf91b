//! Independent references shared by the integration suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use solidrom::cases1d::{solve_heat1d, Heat1DConfig, HeatScheme, InitialCondition1D};
use solidrom::grid_field::{Grid1D, StaggeredGrid2D};
use solidrom::pod::{decompose_matrix, truncate, SvdMethod};
use solidrom::solidify2d::{
    max_divergence, pressure_correction, velocity_update, FlowState, PressureSolver, SimConfig,
    Simulation, ThermalWall, VelocityWalls, ViscosityKind,
};

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Largest per-value relative gap; values near round-off are compared
/// against σ₁ instead.
pub fn sigma_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let s1 = a[0].max(b[0]);
    a.iter().zip(b).fold(0.0, |m, (x, y)| {
        let scale = if x.max(*y) > 1e-6 * s1 { x.max(*y) } else { s1 };
        m.max((x - y).abs() / scale)
    })
}

/// Both SVD routes on the given matrix.
pub fn route_gap(x: &DMatrix<f64>) -> f64 {
    let d = decompose_matrix(x, SvdMethod::Direct, "x").unwrap();
    let s = decompose_matrix(x, SvdMethod::MethodOfSnapshots, "x").unwrap();
    sigma_gap(d.spectrum().sigma(), s.spectrum().sigma())
}

/// `| ‖X - X_r‖²_F - Σ_{k>r} σ_k² |` relative to the tail, with σ from
/// nalgebra, worst over the given ranks.
pub fn eckart_young_gap(x: &DMatrix<f64>, ranks: &[usize]) -> f64 {
    let mut sv: Vec<f64> = x
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let b = decompose_matrix(x, SvdMethod::Auto, "x").unwrap();
    ranks.iter().fold(0.0, |m, &r| {
        let err = (x - truncate(&b, r).unwrap().reconstruct()).norm_squared();
        let tail: f64 = sv[r..].iter().map(|s| s * s).sum();
        m.max((err - tail).abs() / tail.max(1e-300))
    })
}

/// Matrix with singular values decaying like `0.8^k`.
pub fn graded_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> DMatrix<f64> {
    random_matrix(rng, rows, cols)
        * DMatrix::from_fn(
            cols,
            cols,
            |i, j| if i == j { 0.8f64.powi(i as i32) } else { 0.0 },
        )
}

/// Semi-discrete heat operator on the interior of a uniform unit grid.
pub fn heat_operator(n_nodes: usize, alpha: f64) -> DMatrix<f64> {
    let m = n_nodes - 2;
    let h = 1.0 / (n_nodes - 1) as f64;
    let c = alpha / (h * h);
    DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => -2.0 * c,
        1 => c,
        _ => 0.0,
    })
}

pub fn heat_config(n_nodes: usize, dt: f64, n_snaps: usize) -> Heat1DConfig {
    Heat1DConfig {
        alpha: 1.0,
        dt,
        grid: Grid1D::unit(n_nodes).unwrap(),
        n_snaps,
        ic: InitialCondition1D::default(),
        scheme: HeatScheme::ImplicitEuler,
    }
}

/// Worst deviation of the 8-node implicit solution from `exp(tA) u₀`,
/// sampled every `stride` columns.
pub fn heat_exponential_gap(dt: f64, n_snaps: usize, stride: usize) -> f64 {
    let m = solve_heat1d(&heat_config(8, dt, n_snaps)).unwrap();
    let eig = SymmetricEigen::new(heat_operator(8, 1.0));
    let interior = |c: &[f64]| DVector::from_column_slice(&c[1..c.len() - 1]);
    let u0 = interior(m.column(0));
    (0..n_snaps).step_by(stride).fold(0.0, |worst, j| {
        let t = j as f64 * dt;
        let decay = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (l * t).exp()));
        let exact = &eig.eigenvectors * decay * eig.eigenvectors.transpose() * &u0;
        worst.max((interior(m.column(j)) - exact).amax())
    })
}

/// Dense Neumann Laplacian built cell by cell.
pub fn dense_laplacian(g: &StaggeredGrid2D) -> DMatrix<f64> {
    let n = g.n_cells();
    let (wx, wy) = (1.0 / g.dx().powi(2), 1.0 / g.dy().powi(2));
    let mut l = DMatrix::zeros(n, n);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = g.cell(i, j);
            let mut link = |nb: usize, w: f64| {
                l[(c, c)] -= w;
                l[(c, nb)] += w;
            };
            if i > 0 {
                link(g.cell(i - 1, j), wx);
            }
            if i + 1 < g.nx {
                link(g.cell(i + 1, j), wx);
            }
            if j > 0 {
                link(g.cell(i, j - 1), wy);
            }
            if j + 1 < g.ny {
                link(g.cell(i, j + 1), wy);
            }
        }
    }
    l
}

/// Relative gap between the pressure solver and a bordered dense solve
/// `[L 1; 1ᵀ 0] [φ; λ] = [f - mean; 0]` for a random right-hand side.
pub fn poisson_gap(g: StaggeredGrid2D, seed: u64) -> f64 {
    let n = g.n_cells();
    let mut rng = StdRng::seed_from_u64(seed);
    let f: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let mean = f.iter().sum::<f64>() / n as f64;
    let mut big = DMatrix::zeros(n + 1, n + 1);
    big.view_mut((0, 0), (n, n)).copy_from(&dense_laplacian(&g));
    let mut rhs = DVector::zeros(n + 1);
    for k in 0..n {
        big[(k, n)] = 1.0;
        big[(n, k)] = 1.0;
        rhs[k] = f[k] - mean;
    }
    let oracle = big.lu().solve(&rhs).unwrap();
    let phi = PressureSolver::new(g).unwrap().solve(&f).unwrap();
    let scale = oracle.rows(0, n).amax();
    (0..n).fold(0.0, |m, k| m.max((phi[k] - oracle[k]).abs() / scale))
}

pub fn small_config(n: usize) -> SimConfig {
    let mut cfg = SimConfig::desk_default(ViscosityKind::Mushy);
    cfg.grid = StaggeredGrid2D::unit_square(n).unwrap();
    cfg.dt = 1e-3;
    cfg.n_steps = 20;
    cfg.snap_every = 5;
    cfg
}

/// Random face velocities with zero normal flow through the walls.
pub fn random_faces(g: &StaggeredGrid2D, rng: &mut StdRng) -> (Vec<f64>, Vec<f64>) {
    let mut u: Vec<f64> = (0..g.n_u()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut v: Vec<f64> = (0..g.n_v()).map(|_| rng.random_range(-1.0..1.0)).collect();
    for j in 0..g.ny {
        u[g.u_idx(0, j)] = 0.0;
        u[g.u_idx(g.nx, j)] = 0.0;
    }
    for i in 0..g.nx {
        v[g.v_idx(i, 0)] = 0.0;
        v[g.v_idx(i, g.ny)] = 0.0;
    }
    (u, v)
}

/// Post-projection divergence relative to the velocity scale.
pub fn projected_divergence(n: usize, seed: u64, amp: f64) -> f64 {
    let cfg = small_config(n);
    let g = cfg.grid;
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut u, mut v) = random_faces(&g, &mut rng);
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x *= amp);
    let phi = pressure_correction(&u, &v, &cfg).unwrap();
    let mut p = vec![0.0; g.n_cells()];
    velocity_update(&g, &mut u, &mut v, &mut p, &phi, cfg.dt);
    let scale = u.iter().chain(&v).fold(1.0f64, |m, x| m.max(x.abs()));
    max_divergence(&g, &u, &v) / scale
}

/// Uniform fluid at the reference temperature with no net wall flux.
pub fn quiescent_config(wall: ThermalWall) -> SimConfig {
    let mut cfg = small_config(16);
    cfg.initial_temp = cfg.t_ref;
    cfg.right_wall = wall;
    cfg.n_steps = 100;
    cfg
}

/// Largest departure from rest (speed, pressure, temperature) over `steps`.
pub fn quiescent_drift(wall: ThermalWall, steps: usize) -> f64 {
    let cfg = quiescent_config(wall);
    let mut sim = Simulation::new(cfg.clone()).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        sim.step().unwrap();
        let s = sim.state();
        worst = worst
            .max(s.max_speed())
            .max(s.p.iter().fold(0.0, |m, p| m.max(p.abs())))
            .max(s.temp.iter().fold(0.0, |m, t| m.max((t - cfg.t_ref).abs())));
    }
    worst
}

pub const TG_NU: f64 = 0.1;
pub const TG_END: f64 = 0.8;

pub fn taylor_green_grid() -> StaggeredGrid2D {
    let pi = std::f64::consts::PI;
    StaggeredGrid2D::new(24, 24, pi, pi).unwrap()
}

/// Taylor–Green vortex on [0, π]² with free-slip walls, constant viscosity
/// and no buoyancy; returns `[u, v]` at `TG_END`.
pub fn taylor_green(dt: f64) -> Vec<f64> {
    let mut cfg = SimConfig::desk_default(ViscosityKind::Mushy);
    cfg.grid = taylor_green_grid();
    cfg.viscosity.mu_liquid = TG_NU;
    cfg.velocity_walls = VelocityWalls::FreeSlip;
    cfg.right_wall = ThermalWall::Adiabatic;
    cfg.initial_temp = cfg.t_ref;
    cfg.dt = dt;
    cfg.n_steps = (TG_END / dt).round() as usize;
    cfg.snap_every = cfg.n_steps;
    let state = FlowState::from_fields(
        cfg.grid,
        |x, y| x.sin() * y.cos(),
        |x, y| -x.cos() * y.sin(),
        |x, y| 0.25 * ((2.0 * x).cos() + (2.0 * y).cos()),
        |_, _| 700.0,
    );
    let mut sim = Simulation::with_state(cfg.clone(), state).unwrap();
    for _ in 0..cfg.n_steps {
        sim.step().unwrap();
    }
    let s = sim.state();
    s.u.iter().chain(&s.v).copied().collect()
}

/// Errors against a fine-step reference for Δt = 0.04, 0.02, 0.01 and the
/// observed orders between successive refinements.
pub fn taylor_green_orders() -> (Vec<f64>, Vec<f64>) {
    let reference = taylor_green(0.0025);
    let errors: Vec<f64> = [0.04, 0.02, 0.01]
        .into_iter()
        .map(|dt| {
            taylor_green(dt)
                .iter()
                .zip(&reference)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
        .collect();
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    (errors, orders)
}
