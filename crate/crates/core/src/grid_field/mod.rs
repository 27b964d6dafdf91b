//! Grids, discrete fields and snapshot matrices.

mod grid;
mod io;
mod snapshot;

pub use grid::{Grid1D, StaggeredGrid2D};
pub use io::{decode, encode, read_snap, write_snap, SNAP_MAGIC};
pub use snapshot::{assemble, FieldLayout, Segment, SnapshotMatrix};
