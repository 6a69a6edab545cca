//! Constants and inequality checks.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{ConstantMode, InequalityId, Relation, Report};
use super::tolerances::check_tolerance;
use crate::calculus::function::{BoxField, GridFunction, Region};
use crate::calculus::mollify::mollify;
use crate::calculus::ops::{
    abs_value, boundary_integral, gradient_magnitudes, lq_norm, total_variation, BoundaryWeights,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::domain::{minkowski_sum, GridDomain};
use crate::hausdorff::{estimate_hm, unit_ball_volume};
use crate::sum::pairwise_sum;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("dimension must be at least 1"))
    } else {
        Ok(())
    }
}

/// The two closed forms of the sharp isoperimetric constant:
/// `1 / (n omega_n^(1/n))` and `Gamma(n/2 + 1)^(1/n) / (n sqrt(pi))`.
pub fn iso_constant_forms(n: usize) -> Result<(f64, f64)> {
    check_dim(n)?;
    let nf = n as f64;
    let a = 1.0 / (nf * unit_ball_volume(nf)?.powf(1.0 / nf));
    let b = libm::tgamma(nf / 2.0 + 1.0).powf(1.0 / nf) / (nf * PI.sqrt());
    Ok((a, b))
}

/// Sharp constant `c(n)` in `|u|_{n/(n-1)} <= c(n) * integral |grad u|`.
///
/// ```
/// let c2 = gmtlab::iso_constant(2).unwrap();
/// assert!((c2 - 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
/// ```
pub fn iso_constant(n: usize) -> Result<f64> {
    let (a, b) = iso_constant_forms(n)?;
    if (a - b).abs() > 1e-12 * a {
        return Err(invalid("closed forms of the isoperimetric constant disagree"));
    }
    Ok(a)
}

/// Boundary weight produced by the covering argument:
/// `2^(n-1) * n * omega_n / omega_(n-1)`.
///
/// The ratio `omega_n / omega_(n-1)` is built from the recurrence
/// `r_1 = 2`, `r_n = 2 pi / (n r_(n-1))`, which keeps `n = 2, 3` exact.
pub fn paper_boundary_factor(n: usize) -> Result<f64> {
    check_dim(n)?;
    let mut r = 2.0;
    for m in 2..=n {
        r = 2.0 * PI / (m as f64 * r);
    }
    Ok(2f64.powi(n as i32 - 1) * n as f64 * r)
}

/// Sobolev exponent `n / (n - 1)`.
pub fn sobolev_exponent(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("Sobolev exponent needs n >= 2"));
    }
    Ok(n as f64 / (n as f64 - 1.0))
}

/// Constant choice for [`check_mazya`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MazyaMode {
    /// Boundary term with weight one.
    Optimal,
    /// Boundary term weighted by [`paper_boundary_factor`].
    PaperFactor,
}

/// Constant in the quadratic variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum L2Constant {
    /// `|Omega|^(1/n) c(n)`, from Hoelder's inequality and the sharp
    /// linear inequality.
    Auto,
    Value(f64),
}

/// Sides of the boundary-term inequality for `u`, with a chosen boundary weight.
pub(crate) struct MazyaSides {
    pub lq: f64,
    pub grad: f64,
    pub boundary: f64,
    pub calibration: f64,
}

pub(crate) fn mazya_sides(u: &GridFunction) -> Result<MazyaSides> {
    let q = sobolev_exponent(u.dim())?;
    let abs = abs_value(u)?;
    let b = boundary_integral(&abs, BoundaryWeights::Calibrated)?;
    Ok(MazyaSides {
        lq: lq_norm(u, q)?,
        grad: crate::calculus::ops::grad_l1(u),
        boundary: b.value,
        calibration: b.factor,
    })
}

/// `|u|_q <= c(n) (integral |grad u| + F integral over the boundary of |u|)`,
/// with `F = 1` or the covering factor.
pub fn check_mazya(u: &GridFunction, mode: MazyaMode) -> Result<Report> {
    let n = u.dim();
    let c = iso_constant(n)?;
    let (factor, cmode) = match mode {
        MazyaMode::Optimal => (1.0, ConstantMode::Optimal),
        MazyaMode::PaperFactor => (paper_boundary_factor(n)?, ConstantMode::PaperFactor),
    };
    let s = mazya_sides(u)?;
    let rhs = c * (s.grad + factor * s.boundary);
    Ok(Report::new(InequalityId::Mazya, s.lq, rhs, cmode, c, check_tolerance(u.h()), Relation::LhsAtMostRhs)
        .meta("h", u.h())
        .meta("grad_l1", s.grad)
        .meta("boundary_integral", s.boundary)
        .meta("boundary_factor", factor)
        .meta("calibration_factor", s.calibration))
}

/// `|u|_2^2 <= 2 c1 (2 c1 integral |grad u|^2 + integral over the boundary of |u|^2)`.
///
/// Also records the two intermediate steps of the derivation: the linear
/// inequality applied to `u^2`, and the Cauchy-Schwarz bound on
/// `integral |u| |grad u|`.
pub fn check_mazya_l2(u: &GridFunction, c1: L2Constant) -> Result<Report> {
    let n = u.dim();
    let (c1v, auto) = match c1 {
        L2Constant::Auto => (u.domain().volume().powf(1.0 / n as f64) * iso_constant(n)?, true),
        L2Constant::Value(v) if v > 0.0 && v.is_finite() => (v, false),
        L2Constant::Value(v) => return Err(invalid(format!("c1 must be positive, got {v}"))),
    };
    let cell_vol = u.lattice().cell_volume();
    let cells: Vec<usize> = u.domain().cells().collect();
    let grads = gradient_magnitudes(u);
    let vals: Vec<f64> = cells.iter().map(|&c| u.values()[c]).collect();
    let l2sq = pairwise_sum(&vals.iter().map(|v| v * v).collect::<Vec<_>>()) * cell_vol;
    let grad2 = pairwise_sum(&grads.iter().map(|g| g * g).collect::<Vec<_>>()) * cell_vol;
    let cross = pairwise_sum(&vals.iter().zip(&grads).map(|(v, g)| v.abs() * g).collect::<Vec<_>>()) * cell_vol;
    let u2 = u.map(|v| v * v)?;
    let b2 = boundary_integral(&u2, BoundaryWeights::Calibrated)?;
    let grad_u2 = crate::calculus::ops::grad_l1(&u2);
    let rhs = 2.0 * c1v * (2.0 * c1v * grad2 + b2.value);
    let mode = if auto { ConstantMode::Optimal } else { ConstantMode::Supplied };
    Ok(Report::new(InequalityId::MazyaL2, l2sq, rhs, mode, c1v, check_tolerance(u.h()), Relation::LhsAtMostRhs)
        .meta("h", u.h())
        .meta("c1_auto", auto)
        .meta("grad_l2_squared", grad2)
        .meta("boundary_integral_of_square", b2.value)
        .meta("linear_step_lhs", l2sq)
        .meta("linear_step_rhs", c1v * (grad_u2 + b2.value))
        .meta("cauchy_schwarz_lhs", cross)
        .meta("cauchy_schwarz_rhs", l2sq.sqrt() * grad2.sqrt())
        .meta("calibration_factor", b2.factor))
}

/// `TV(u extended by zero) <= integral |grad u| + F integral over the boundary of |u|`.
pub fn check_bv_bound(u: &GridFunction) -> Result<Report> {
    let n = u.dim();
    let factor = paper_boundary_factor(n)?;
    let tv = total_variation(&u.extend_by_zero());
    let s = mazya_sides(u)?;
    let rhs = s.grad + factor * s.boundary;
    Ok(Report::new(InequalityId::BvBound, tv, rhs, ConstantMode::PaperFactor, factor, check_tolerance(u.h()), Relation::LhsAtMostRhs)
        .meta("h", u.h())
        .meta("grad_l1", s.grad)
        .meta("boundary_integral", s.boundary)
        .meta("calibration_factor", s.calibration))
}

/// `|Omega|^((n-1)/n) <= c(n) H^(n-1)(boundary)`, with the boundary measure
/// estimated at a scale of a few cells.
pub fn check_isoperimetric(region: &Arc<Region>) -> Result<Report> {
    let n = region.dim();
    let c = iso_constant(n)?;
    let nf = n as f64;
    let lhs = region.domain().volume().powf((nf - 1.0) / nf);
    let delta = crate::calculus::function::CALIBRATION_CELLS * region.h();
    let est = estimate_hm(region.cloud(), nf - 1.0, delta)?;
    Ok(Report::new(InequalityId::Isoperimetric, lhs, c * est.value, ConstantMode::Optimal, c, check_tolerance(region.h()), Relation::LhsAtMostRhs)
        .meta("h", region.h())
        .meta("volume", region.domain().volume())
        .meta("boundary_measure", est.value)
        .meta("boundary_measure_delta", delta)
        .meta("boundary_measure_upper_bound", est.upper_bound))
}

fn require_support(field: &BoxField) -> Result<()> {
    if field.vanishes_on_outer_layer() {
        Ok(())
    } else {
        Err(Error::Support)
    }
}

/// `|u|_q <= c(n) integral |grad u|` for a field vanishing near the edge of its box.
pub fn check_sobolev(field: &BoxField) -> Result<Report> {
    require_support(field)?;
    let n = field.lattice().dim();
    let c = iso_constant(n)?;
    let lhs = field.lq_norm(sobolev_exponent(n)?)?;
    let grad = total_variation(field);
    let h = field.lattice().h();
    Ok(Report::new(InequalityId::Sobolev, lhs, c * grad, ConstantMode::Optimal, c, check_tolerance(h), Relation::LhsAtMostRhs)
        .meta("h", h)
        .meta("grad_l1", grad))
}

/// `|u|_q <= c(n) TV(u)`, together with the mollified chain
/// `|rho_k * u|_q <= c(n) TV(rho_k * u) <= c(n) TV(u)` for each `k`.
pub fn check_extended_sobolev(field: &BoxField, k_list: &[f64]) -> Result<Report> {
    require_support(field)?;
    let n = field.lattice().dim();
    let c = iso_constant(n)?;
    let q = sobolev_exponent(n)?;
    let h = field.lattice().h();
    let tol = check_tolerance(h);
    let tv = total_variation(field);
    let lhs = field.lq_norm(q)?;
    let mut chain = Vec::new();
    let mut chain_holds = true;
    for &k in k_list {
        let m = mollify(field, k)?;
        let norm = m.lq_norm(q)?;
        let tv_k = total_variation(&m);
        let ok = norm <= c * tv_k * (1.0 + tol) && tv_k <= tv * (1.0 + 1e-9) + 1e-9;
        chain_holds &= ok;
        chain.push(json!({"k": k, "lq_norm": norm, "total_variation": tv_k, "bound": c * tv, "holds": ok}));
    }
    let mut r = Report::new(InequalityId::SobolevExtended, lhs, c * tv, ConstantMode::Optimal, c, tol, Relation::LhsAtMostRhs)
        .meta("h", h)
        .meta("total_variation", tv)
        .meta("mollified_chain", chain)
        .meta("chain_holds", chain_holds);
    r.holds &= chain_holds;
    Ok(r)
}

/// `|Omega|^((n-1)/n) <= c(n) TV(1_Omega)`.
pub fn check_perimeter_iso(domain: &GridDomain) -> Result<Report> {
    let n = domain.dim();
    let c = iso_constant(n)?;
    let nf = n as f64;
    let lhs = domain.volume().powf((nf - 1.0) / nf);
    let per = total_variation(&BoxField::indicator(domain));
    Ok(Report::new(InequalityId::PerimeterIso, lhs, c * per, ConstantMode::Optimal, c, check_tolerance(domain.h()), Relation::LhsAtMostRhs)
        .meta("h", domain.h())
        .meta("perimeter", per))
}

/// `|A + B|^(1/n) >= |A|^(1/n) + |B|^(1/n)`.
pub fn check_brunn_minkowski(a: &GridDomain, b: &GridDomain) -> Result<Report> {
    let n = a.dim() as f64;
    let sum = minkowski_sum(a, b)?;
    let lhs = a.volume().powf(1.0 / n) + b.volume().powf(1.0 / n);
    let rhs = sum.volume().powf(1.0 / n);
    Ok(Report::new(InequalityId::BrunnMinkowski, lhs, rhs, ConstantMode::Optimal, 1.0, check_tolerance(a.h()), Relation::RhsAtLeastLhs)
        .meta("h", a.h())
        .meta("volume_a", a.volume())
        .meta("volume_b", b.volume())
        .meta("volume_sum", sum.volume())
        .meta("sum_model", "union of closed cells"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_is_exact_in_low_dimensions() {
        assert_eq!(paper_boundary_factor(1).unwrap(), 2.0);
        assert_eq!(paper_boundary_factor(2).unwrap(), std::f64::consts::TAU);
        assert_eq!(paper_boundary_factor(3).unwrap(), 16.0);
    }

    #[test]
    fn constant_in_one_dimension_is_one_half() {
        assert!((iso_constant(1).unwrap() - 0.5).abs() < 1e-15);
        assert!(iso_constant(0).is_err());
    }

    #[test]
    fn l2_constant_must_be_positive() {
        let r = Region::new(crate::make_box(&[0.0, 0.0], &[1.0, 1.0], 0.125).unwrap()).unwrap();
        let u = GridFunction::constant(&r, 1.0).unwrap();
        assert!(check_mazya_l2(&u, L2Constant::Value(0.0)).is_err());
        assert!(check_mazya_l2(&u, L2Constant::Value(-1.0)).is_err());
    }

    #[test]
    fn sobolev_needs_compact_support() {
        let l = crate::Lattice::new(2, 0.5, [0; 3], [4, 4, 1]).unwrap();
        let f = BoxField::from_fn(l, |_| 1.0).unwrap();
        assert!(matches!(check_sobolev(&f), Err(Error::Support)));
    }
}
