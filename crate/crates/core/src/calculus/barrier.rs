//! Conical barriers around boundary pieces and the truncation they induce.
//!
//! A barrier of height `a`, inner radius `r` and ramp width `s` around a
//! point `x0` is zero on the ball `B(x0, r)`, rises linearly with slope
//! `a / s` across the shell `r < |x - x0| < r + s`, and is treated as
//! infinite outside the closed ball of radius `r + s`. Its gradient mass
//! over the shell is [`shell_mass`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::function::{GridFunction, Modulus};
use crate::error::{invalid, Error, Result};
use crate::geometry::lattice::{dist, Point};
use crate::hausdorff::{unit_ball_volume, Partition};
use crate::sum::pairwise_sum;

/// `integral |grad psi|` over the shell: `(height / s) * omega_n * ((r + s)^n - r^n)`.
pub fn shell_mass(r: f64, s: f64, height: f64, n: usize) -> Result<f64> {
    if !(r >= 0.0 && s > 0.0 && height >= 0.0) {
        return Err(invalid("shell mass needs r >= 0, s > 0 and height >= 0"));
    }
    let omega = unit_ball_volume(n as f64)?;
    let ni = n as i32;
    Ok(height / s * omega * ((r + s).powi(ni) - r.powi(ni)))
}

/// Limit of [`shell_mass`] as the ramp width shrinks: `height * n * omega_n * r^(n-1)`.
pub fn shell_mass_limit(r: f64, height: f64, n: usize) -> Result<f64> {
    let omega = unit_ball_volume(n as f64)?;
    Ok(height * n as f64 * omega * r.powi(n as i32 - 1))
}

/// A single conical barrier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub center: Point,
    /// Radius of the flat zero region.
    pub radius: f64,
    /// Width of the ramp.
    pub ramp: f64,
    pub height: f64,
}

impl Barrier {
    pub fn new(center: Point, radius: f64, ramp: f64, height: f64) -> Result<Self> {
        if !(radius >= 0.0 && ramp > 0.0 && height >= 0.0 && radius.is_finite() && height.is_finite()) {
            return Err(invalid("barrier needs radius >= 0, ramp > 0 and finite height >= 0"));
        }
        Ok(Self { center, radius, ramp, height })
    }

    /// The barrier value, `None` outside the closed outer ball.
    pub fn value(&self, p: Point) -> Option<f64> {
        let d = dist(p, self.center);
        if d > self.radius + self.ramp {
            None
        } else {
            Some(self.height * (d - self.radius).max(0.0) / self.ramp)
        }
    }

    /// The ramp clamped at `height` outside the outer ball.
    pub fn clamped(&self, p: Point) -> f64 {
        let d = dist(p, self.center);
        self.height * ((d - self.radius).max(0.0) / self.ramp).min(1.0)
    }

    /// Closed-form gradient mass of the ramp.
    pub fn shell_mass(&self, n: usize) -> Result<f64> {
        shell_mass(self.radius, self.ramp, self.height, n)
    }

    /// Gradient mass of the clamped ramp by forward differences on an
    /// origin-anchored lattice of spacing `h` in dimension `n`.
    pub fn gradient_mass(&self, h: f64, n: usize) -> f64 {
        let reach = self.radius + self.ramp + 2.0 * h;
        let lo: Vec<i64> = (0..n).map(|k| ((self.center[k] - reach) / h).floor() as i64).collect();
        let hi: Vec<i64> = (0..n).map(|k| ((self.center[k] + reach) / h).ceil() as i64).collect();
        let at = |g: [i64; 3]| -> f64 {
            let mut p = [0.0; 3];
            for k in 0..n {
                p[k] = (g[k] as f64 + 0.5) * h;
            }
            self.clamped(p)
        };
        let mut terms = Vec::new();
        let (k_lo, k_hi) = if n == 3 { (lo[2], hi[2]) } else { (0, 0) };
        for k in k_lo..=k_hi {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    let c = at([i, j, k]);
                    let mut s = (at([i + 1, j, k]) - c).powi(2) + (at([i, j + 1, k]) - c).powi(2);
                    if n == 3 {
                        s += (at([i, j, k + 1]) - c).powi(2);
                    }
                    if s > 0.0 {
                        terms.push(s.sqrt());
                    }
                }
            }
        }
        pairwise_sum(&terms) * h.powi(n as i32 - 1)
    }
}

/// A barrier sampled on a region, with a finite stand-in for infinity.
#[derive(Clone, Debug)]
pub struct BarrierField {
    pub barrier: Barrier,
    pub function: GridFunction,
    /// Value used outside the outer ball.
    pub sentinel: f64,
}

/// Samples a barrier on `region`, using `sentinel` outside its outer ball.
pub fn barrier(
    region: &Arc<super::function::Region>,
    center: Point,
    radius: f64,
    ramp: f64,
    height: f64,
    sentinel: f64,
) -> Result<BarrierField> {
    let b = Barrier::new(center, radius, ramp, height)?;
    if !(sentinel.is_finite() && sentinel > height) {
        return Err(invalid("sentinel must be finite and exceed the barrier height"));
    }
    let function = GridFunction::from_fn(region, |p| b.value(p).unwrap_or(sentinel))?;
    Ok(BarrierField { barrier: b, function, sentinel })
}

/// The truncated function `min(u, inf_C psi_C)` and its barriers.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub function: GridFunction,
    pub barriers: Vec<Barrier>,
    pub sentinel: f64,
}

/// Truncates a non-negative `u` by barriers around every partition piece.
///
/// Piece `C` gets a barrier centered at its representative, with inner
/// radius `diam C`, ramp `s` and height `u(x_C) + eps`. Requires
/// `0 < s < partition.delta`.
pub fn truncate(u: &GridFunction, partition: &Partition, eps: f64, s: f64) -> Result<Truncation> {
    if !u.is_nonnegative() {
        return Err(invalid("truncation needs a non-negative function"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps must be positive"));
    }
    if !(s > 0.0 && s < partition.delta) {
        return Err(invalid(format!("ramp width must lie in (0, {}), got {s}", partition.delta)));
    }
    if partition.samples != u.cloud().len() {
        return Err(invalid("partition does not belong to this function's boundary"));
    }
    let trace = u.trace().ok_or(Error::NoTrace)?;
    let barriers: Vec<Barrier> = partition
        .cells
        .iter()
        .map(|c| Barrier::new(c.representative_point, 2.0 * c.rd, s, trace[c.representative] + eps))
        .collect::<Result<_>>()?;
    let top = barriers.iter().map(|b| b.height).fold(0.0, f64::max);
    let sentinel = u.sup_norm() + top + 1.0;
    let l = u.lattice();
    let n = l.dim();
    let mut values = u.values().to_vec();
    let mut cut = vec![sentinel; values.len()];
    let mut tcut = vec![sentinel; trace.len()];
    let pts = u.cloud().points();
    for b in &barriers {
        let reach = b.radius + b.ramp;
        let g_lo = l.global_of_point([b.center[0] - reach, b.center[1] - reach, b.center[2] - reach]);
        let g_hi = l.global_of_point([b.center[0] + reach, b.center[1] + reach, b.center[2] + reach]);
        let k_range = if n == 3 { g_lo[2]..=g_hi[2] } else { 0..=0 };
        for gk in k_range {
            for gj in g_lo[1]..=g_hi[1] {
                for gi in g_lo[0]..=g_hi[0] {
                    let Some(idx) = l.local([gi, gj, gk]) else { continue };
                    let f = l.flat(idx);
                    if let Some(v) = b.value(l.center(idx)) {
                        cut[f] = cut[f].min(v);
                    }
                }
            }
        }
        for (i, p) in pts.iter().enumerate() {
            if let Some(v) = b.value(*p) {
                tcut[i] = tcut[i].min(v);
            }
        }
    }
    let mask = u.domain().mask();
    for (f, v) in values.iter_mut().enumerate() {
        if mask[f] {
            *v = v.min(cut[f]);
        }
    }
    let new_trace: Vec<f64> = trace.iter().zip(&tcut).map(|(a, b)| a.min(*b)).collect();
    let mut function = GridFunction::from_parts(u.region(), values, Some(new_trace))?;
    let slope = barriers.iter().map(|b| b.height / b.ramp).fold(0.0, f64::max);
    if let Some(Modulus::Lipschitz(lu)) = u.modulus() {
        function.set_modulus(Some(Modulus::Lipschitz(lu.max(slope))));
    }
    Ok(Truncation { function, barriers, sentinel })
}
