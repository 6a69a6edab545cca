//! Grids, voxelized domains and their sampled boundaries.

pub mod cloud;
pub mod domain;
pub mod edt;
pub mod lattice;
pub mod spec;
