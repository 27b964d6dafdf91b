//! Snapshot generation and proper orthogonal decomposition (POD) for studying
//! how solution smoothness controls the decay of singular values.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid_field`]: grids, snapshot matrices, and the `PODSNAP1` binary format.
//! - [`pod`]: SVD-based decomposition, energy accounting, truncation and
//!   per-field splitting.
//! - [`cases1d`]: 1D heat equation, advected jump and advected sigmoid families.
//! - [`solidify2d`]: a fractional-step Boussinesq solver on a MAC grid with
//!   temperature-dependent viscosity (mushy zone or sharp freezing).
//! - [`analysis`]: decay-rate fits and mode-count comparisons.
//! - [`cli`]: the batch pipeline behind the `solidrom` binary.

pub mod analysis;
pub mod cases1d;
pub mod cli;
pub mod error;
pub mod grid_field;
pub mod linalg;
pub mod pod;
pub mod solidify2d;

pub use error::{Error, ErrorClass, Result};
pub use grid_field::{FieldLayout, Grid1D, SnapshotMatrix, StaggeredGrid2D};
pub use pod::{EnergyReport, PodBasis, PodSpectrum, SvdMethod};
