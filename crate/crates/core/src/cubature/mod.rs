//! Deterministic numerical integration: adaptive 1-D and iterated 2-D
//! quadrature, and octree indicator cubature for solid volumes.

mod octree;
mod polytope;
mod quadrature;

pub use octree::{cell_enclosure, classify_cell, volume_by_octree, CellClassification, MAX_DEPTH_LIMIT};
pub use quadrature::{
    integrate_1d, integrate_1d_budget, integrate_2d_iterated, QuadratureResult, MAX_EVALUATIONS,
};
