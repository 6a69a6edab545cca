//! Perimeter from the growth rate of parallel sets.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::domain::GridDomain;
use crate::sum::pairwise_sum;

/// One point of the Steiner quotient sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerPoint {
    pub eps: f64,
    /// Volume of the parallel set at distance `eps`.
    pub volume: f64,
    /// `(volume - |D|) / eps`.
    pub quotient: f64,
}

/// Result of [`minkowski_steiner`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerEstimate {
    pub base_volume: f64,
    pub points: Vec<SteinerPoint>,
    /// Quotient at the smallest `eps`.
    pub perimeter: f64,
    /// Polynomial extrapolation of the quotients to `eps = 0`, when at
    /// least three radii are given.
    pub extrapolated: Option<f64>,
}

/// Volume of the parallel set, counting each exterior cell by the fraction
/// of its width covered at distance `eps` from the nearest interior center.
fn parallel_volume(domain: &GridDomain, d_int: &[f64], eps: f64) -> f64 {
    let h = domain.h();
    let fractions: Vec<f64> = d_int
        .iter()
        .zip(domain.mask())
        .filter(|(_, &m)| !m)
        .map(|(d2, _)| ((eps - d2.sqrt()) / h + 1.0).clamp(0.0, 1.0))
        .collect();
    domain.volume() + pairwise_sum(&fractions) * domain.lattice().cell_volume()
}

/// Least-squares polynomial of the given degree through `(x, y)`, evaluated at zero.
fn extrapolate_to_zero(x: &[f64], y: &[f64], degree: usize) -> f64 {
    let m = degree + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (xi, yi) in x.iter().zip(y) {
        let pows: Vec<f64> = (0..m).map(|p| xi.powi(p as i32)).collect();
        for r in 0..m {
            for c in 0..m {
                a[r][c] += pows[r] * pows[c];
            }
            a[r][m] += pows[r] * yi;
        }
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    a[0][m] / a[0][0]
}

/// Steiner quotients `(|D + B_eps| - |D|) / eps` for decreasing radii.
///
/// Every radius must exceed two cells. With three or more radii the
/// quotients are fitted by a polynomial in `eps` of degree `n - 1` (capped by
/// the number of radii) and extrapolated to zero.
pub fn minkowski_steiner(domain: &GridDomain, eps_list: &[f64]) -> Result<SteinerEstimate> {
    if eps_list.is_empty() {
        return Err(invalid("at least one radius is needed"));
    }
    let h = domain.h();
    if let Some(e) = eps_list.iter().find(|e| !(e.is_finite() && **e > 2.0 * h)) {
        return Err(Error::Resolution(format!("radius {e} must exceed two cells of size {h}")));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("radii must be strictly decreasing"));
    }
    let grow = (eps_list[0] / h).ceil() as usize + 2;
    let big = domain.embedded(&domain.lattice().grown(grow))?;
    let d_int = big.squared_distance_to_interior();
    let base = big.volume();
    let points: Vec<SteinerPoint> = eps_list
        .iter()
        .map(|&eps| {
            let v = parallel_volume(&big, &d_int, eps);
            SteinerPoint { eps, volume: v, quotient: (v - base) / eps }
        })
        .collect();
    let perimeter = points.last().expect("non-empty").quotient;
    let extrapolated = (points.len() >= 3).then(|| {
        let degree = (domain.dim() - 1).min(points.len() - 1);
        let x: Vec<f64> = points.iter().map(|p| p.eps).collect();
        let y: Vec<f64> = points.iter().map(|p| p.quotient).collect();
        extrapolate_to_zero(&x, &y, degree)
    });
    Ok(SteinerEstimate { base_volume: base, points, perimeter, extrapolated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::make_box;

    #[test]
    fn quadratic_is_recovered_exactly() {
        let x = [0.3, 0.2, 0.1];
        let y: Vec<f64> = x.iter().map(|t| 4.0 + 2.0 * t + 5.0 * t * t).collect();
        assert!((extrapolate_to_zero(&x, &y, 2) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_small_and_unordered_radii() {
        let d = make_box(&[0.0, 0.0], &[1.0, 1.0], 0.05).unwrap();
        assert!(matches!(minkowski_steiner(&d, &[0.2, 0.1, 0.05]), Err(Error::Resolution(_))));
        assert!(minkowski_steiner(&d, &[0.2, 0.3]).is_err());
    }

    #[test]
    fn square_growth_is_near_perimeter() {
        let d = make_box(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 128.0).unwrap();
        let s = minkowski_steiner(&d, &[0.2, 0.1, 0.05]).unwrap();
        assert!((s.extrapolated.unwrap() - 4.0).abs() < 0.08);
    }
}
