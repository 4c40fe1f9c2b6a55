//! Exact-arithmetic toolkit for compatible triangulations of point sets.

pub mod compat;
pub mod exactgeom;
pub mod formats;
pub mod pointsets;
pub mod registry;
pub mod render;
pub mod skeleton;
pub mod subdivide;
pub mod swapgraph;
pub mod tri;
