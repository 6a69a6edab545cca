//! Frozen numerical tolerances.
//!
//! Check tolerances scale with the cell size so that coarse grids are not
//! held to fine-grid accuracy: `tol(h) = max(CHECK_TOL_FLOOR, CHECK_TOL_PER_UNIT_H * h)`.

/// Smallest relative slack allowed in any inequality check.
pub const CHECK_TOL_FLOOR: f64 = 0.02;

/// Growth of the check slack per unit of cell size.
pub const CHECK_TOL_PER_UNIT_H: f64 = 4.0;

/// Relative slack for comparing discrete and closed-form barrier mass.
pub const SHELL_MASS_TOL: f64 = 0.05;

/// Quadrature cells per ramp width when integrating barrier gradients.
pub const BARRIER_QUADRATURE_CELLS: f64 = 16.0;

/// Headroom over the optimal constant allowed during quotient search.
pub const SEARCH_BOUND_SLACK: f64 = 0.05;

/// Mollifier indices used when none are given.
pub const DEFAULT_K_LIST: [f64; 3] = [4.0, 8.0, 16.0];

/// Relative slack for a check at cell size `h`.
pub fn check_tolerance(h: f64) -> f64 {
    CHECK_TOL_FLOOR.max(CHECK_TOL_PER_UNIT_H * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_applies_on_fine_grids() {
        assert_eq!(check_tolerance(1.0 / 512.0), CHECK_TOL_FLOOR);
        assert_eq!(check_tolerance(0.1), 0.4);
    }
}
