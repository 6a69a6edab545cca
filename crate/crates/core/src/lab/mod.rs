//! Inequality checks, the proof replay and the quotient search.

pub mod checks;
pub mod report;
pub mod search;
pub mod tolerances;
pub mod trace;
