//! Online Euclidean spanner: hierarchical grid with per-level ordered Yao graphs.

pub mod alg1;
pub mod cones;
pub mod grid;

pub use alg1::{alg1, Alg1State, LevelEdge, LevelState, DEFAULT_CAP_FACTOR};
pub use cones::{aperture_for_epsilon, build_cone_cover, planar_yao_cone_count, ConeCover};
pub use grid::GridCellKey;
