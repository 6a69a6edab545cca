//! Discrete calculus on grid functions and box fields.

pub mod barrier;
pub mod function;
pub mod mollify;
pub mod ops;
pub mod steiner;
