//! Discrete gradients, norms, traces and total variation.
//!
//! The gradient of a grid function uses forward differences between
//! interior cells. Where a cell borders the boundary along an axis, the
//! difference toward the boundary trace over half a cell is used, and when
//! boundary faces lie on both sides the steeper of the two one-sided
//! differences wins. The per-cell magnitude is Euclidean.

use serde::{Deserialize, Serialize};

use super::function::{lq_of, BoxField, GridFunction, Modulus};
use crate::error::{invalid, Error, Result};
use crate::sum::pairwise_sum;

/// Euclidean gradient magnitude at interior cell `c`.
pub(crate) fn cell_gradient(u: &GridFunction, values: &[f64], trace: Option<&[f64]>, c: usize) -> f64 {
    let region = u.region();
    let l = region.domain().lattice();
    let mask = region.domain().mask();
    let h = l.h();
    let v = values[c];
    let mut sum = 0.0;
    for axis in 0..l.dim() {
        let s = l.stride(axis);
        let fwd_in = mask[c + s];
        let back_in = mask[c - s];
        let comp = match trace {
            Some(t) => {
                let fwd = if fwd_in {
                    (values[c + s] - v) / h
                } else {
                    let i = region.face_index(c, axis, true).expect("boundary face");
                    (t[i] - v) / (0.5 * h)
                };
                if back_in {
                    fwd
                } else {
                    let i = region.face_index(c, axis, false).expect("boundary face");
                    let back = (v - t[i]) / (0.5 * h);
                    if back.abs() > fwd.abs() {
                        back
                    } else {
                        fwd
                    }
                }
            }
            None => {
                if fwd_in {
                    (values[c + s] - v) / h
                } else if back_in {
                    (v - values[c - s]) / h
                } else {
                    0.0
                }
            }
        };
        sum += comp * comp;
    }
    sum.sqrt()
}

/// Gradient magnitude of every interior cell, in flat order.
pub fn gradient_magnitudes(u: &GridFunction) -> Vec<f64> {
    u.domain()
        .cells()
        .map(|c| cell_gradient(u, u.values(), u.trace(), c))
        .collect()
}

/// `integral |grad u|` over the domain.
pub fn grad_l1(u: &GridFunction) -> f64 {
    pairwise_sum(&gradient_magnitudes(u)) * u.lattice().cell_volume()
}

/// `integral |grad u|^2` over the domain.
pub fn grad_l2_squared(u: &GridFunction) -> f64 {
    let g: Vec<f64> = gradient_magnitudes(u).into_iter().map(|x| x * x).collect();
    pairwise_sum(&g) * u.lattice().cell_volume()
}

/// `L^q` norm over the domain; `q = f64::INFINITY` gives the sup norm of cell values.
pub fn lq_norm(u: &GridFunction, q: f64) -> Result<f64> {
    let vals: Vec<f64> = u.domain().cells().map(|c| u.values()[c]).collect();
    lq_of(&vals, u.lattice().cell_volume(), q)
}

/// How boundary samples are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryWeights {
    /// Face weights `h^(n-1)` as extracted.
    Raw,
    /// Face weights rescaled so their total matches the Hausdorff estimate.
    Calibrated,
}

/// Value of a boundary integral and the weight factor used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryIntegral {
    pub value: f64,
    pub factor: f64,
}

/// `integral over the boundary of |u|`, from the trace.
pub fn boundary_integral(u: &GridFunction, weights: BoundaryWeights) -> Result<BoundaryIntegral> {
    let t = u.trace().ok_or(Error::NoTrace)?;
    let factor = match weights {
        BoundaryWeights::Raw => 1.0,
        BoundaryWeights::Calibrated => u.region().calibration_factor()?,
    };
    let terms: Vec<f64> = t.iter().zip(u.cloud().weights()).map(|(v, w)| v.abs() * w).collect();
    Ok(BoundaryIntegral { value: factor * pairwise_sum(&terms), factor })
}

/// Cellwise minimum of two functions on the same domain.
pub fn pointwise_min(u: &GridFunction, v: &GridFunction) -> Result<GridFunction> {
    if !u.same_region(v) {
        return Err(invalid("functions live on different domains"));
    }
    let values = u.values().iter().zip(v.values()).map(|(a, b)| a.min(*b)).collect();
    let trace = match (u.trace(), v.trace()) {
        (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()),
        _ => None,
    };
    let mut out = GridFunction::from_parts(u.region(), values, trace)?;
    if let (Some(Modulus::Lipschitz(a)), Some(Modulus::Lipschitz(b))) = (u.modulus(), v.modulus()) {
        out.set_modulus(Some(Modulus::Lipschitz(a.max(b))));
    }
    Ok(out)
}

/// `|u|` cellwise and on the trace.
pub fn abs_value(u: &GridFunction) -> Result<GridFunction> {
    let mut out = u.map(f64::abs)?;
    out.set_modulus(u.modulus());
    Ok(out)
}

/// Isotropic total variation of a box field, counting jumps to the zero
/// exterior beyond the box.
pub fn total_variation(field: &BoxField) -> f64 {
    let l = field.lattice();
    let v = field.values();
    let h = l.h();
    let dims = l.dims();
    let n = l.dim();
    // Cells one layer below the box contribute their jump into the box.
    let mut terms = Vec::with_capacity(v.len());
    let lo = [-1i64, -1, if n == 3 { -1 } else { 0 }];
    for k in lo[2]..dims[2] as i64 {
        for j in lo[1]..dims[1] as i64 {
            for i in lo[0]..dims[0] as i64 {
                let at = |ii: i64, jj: i64, kk: i64| -> f64 {
                    if ii < 0 || jj < 0 || kk < 0 || ii >= dims[0] as i64 || jj >= dims[1] as i64 || kk >= dims[2] as i64 {
                        0.0
                    } else {
                        v[l.flat([ii as usize, jj as usize, kk as usize])]
                    }
                };
                let c = at(i, j, k);
                let mut s = (at(i + 1, j, k) - c).powi(2) + (at(i, j + 1, k) - c).powi(2);
                if n == 3 {
                    s += (at(i, j, k + 1) - c).powi(2);
                }
                if s > 0.0 {
                    terms.push(s.sqrt());
                }
            }
        }
    }
    pairwise_sum(&terms) * h.powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::function::Region;
    use crate::geometry::domain::{make_ball, make_box};
    use std::sync::Arc;

    fn square(h: f64) -> Arc<Region> {
        Region::new(make_box(&[0.0, 0.0], &[1.0, 1.0], h).unwrap()).unwrap()
    }

    #[test]
    fn constant_has_zero_gradient() {
        let u = GridFunction::constant(&square(1.0 / 32.0), 3.0).unwrap();
        assert_eq!(grad_l1(&u), 0.0);
    }

    #[test]
    fn linear_function_gradient_is_exact() {
        let u = GridFunction::from_fn(&square(1.0 / 32.0), |p| 2.0 * p[0]).unwrap();
        assert!((grad_l1(&u) - 2.0).abs() < 1e-12);
        assert!((grad_l2_squared(&u) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_integral_of_one_on_unit_square() {
        let u = GridFunction::constant(&square(1.0 / 32.0), 1.0).unwrap();
        assert_eq!(boundary_integral(&u, BoundaryWeights::Raw).unwrap().value, 4.0);
    }

    #[test]
    fn boundary_integral_needs_trace() {
        let r = square(0.25);
        let vals = GridFunction::constant(&r, 1.0).unwrap().values().to_vec();
        let u = GridFunction::from_parts(&r, vals, None).unwrap();
        assert!(matches!(boundary_integral(&u, BoundaryWeights::Raw), Err(Error::NoTrace)));
    }

    #[test]
    fn square_indicator_variation_is_perimeter() {
        let d = make_box(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 64.0).unwrap();
        let tv = total_variation(&BoxField::indicator(&d));
        assert!((tv - 4.0).abs() < 0.05, "{tv}");
    }

    #[test]
    fn variation_counts_jumps_past_the_box() {
        let l = crate::Lattice::new(2, 1.0, [0; 3], [1, 1, 1]).unwrap();
        let f = BoxField::new(l, vec![1.0]).unwrap();
        // Two axis jumps from the cell itself plus one from each lower neighbour.
        assert!((total_variation(&f) - (2f64.sqrt() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn min_with_other_domain_fails() {
        let a = GridFunction::constant(&square(0.25), 1.0).unwrap();
        let r = Region::new(make_ball(&[0.0, 0.0], 1.0, 0.25).unwrap()).unwrap();
        let b = GridFunction::constant(&r, 1.0).unwrap();
        assert!(pointwise_min(&a, &b).is_err());
    }
}
