//! Small linear-algebra kernels shared by the solvers.

mod band;

pub use band::{BandLu, BandMatrix, SparseRows};
