//! Convolution with a compactly supported smooth bump.

use serde::{Deserialize, Serialize};

use super::function::BoxField;
use crate::error::{invalid, Error, Result};
use crate::fft::convolve;
use crate::geometry::lattice::Lattice;
use crate::sum::pairwise_sum;

/// Discrete mollifier of radius `1/k`.
///
/// Weights are the bump `exp(-1 / (1 - |x|^2 k^2))` at lattice offsets,
/// normalized to sum to one so that convolution preserves mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub k: f64,
    pub dim: usize,
    pub h: f64,
    /// Half-width of the stencil in cells.
    pub reach: usize,
    /// Weights over the `(2 reach + 1)^dim` stencil, axis 0 fastest.
    pub weights: Vec<f64>,
}

impl Mollifier {
    pub fn new(k: f64, h: f64, dim: usize) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid("mollifier index must be positive"));
        }
        let radius = 1.0 / k;
        if radius < 2.0 * h {
            return Err(Error::Resolution(format!(
                "mollifier radius {radius} is below two cells of size {h}"
            )));
        }
        let reach = (radius / h).ceil() as usize;
        let w = 2 * reach + 1;
        let len = w * w * if dim == 3 { w } else { 1 };
        let mut raw = vec![0.0; len];
        let side = |i: usize| (i as f64 - reach as f64) * h;
        for (f, slot) in raw.iter_mut().enumerate() {
            let (i, j, l) = (f % w, (f / w) % w, f / (w * w));
            let mut r2 = side(i).powi(2) + side(j).powi(2);
            if dim == 3 {
                r2 += side(l).powi(2);
            }
            let t = r2 * k * k;
            if t < 1.0 {
                *slot = (-1.0 / (1.0 - t)).exp();
            }
        }
        let total = pairwise_sum(&raw);
        let weights = raw.into_iter().map(|x| x / total).collect();
        Ok(Self { k, dim, h, reach, weights })
    }

    fn stencil_dims(&self) -> [usize; 3] {
        let w = 2 * self.reach + 1;
        [w, w, if self.dim == 3 { w } else { 1 }]
    }
}

/// Convolves a box field with the mollifier of radius `1/k`.
///
/// The result lives on the input box grown by the stencil reach, so no mass
/// is lost at the edges.
pub fn mollify(field: &BoxField, k: f64) -> Result<BoxField> {
    let l = field.lattice();
    let m = Mollifier::new(k, l.h(), l.dim())?;
    let (mut out, od) = convolve(field.values(), l.dims(), &m.weights, m.stencil_dims());
    let grown = l.grown(m.reach);
    debug_assert_eq!(grown.dims(), od);
    let lattice = Lattice::new(l.dim(), l.h(), grown.offset(), od)?;
    // The exact convolution vanishes there; drop FFT round-off.
    if field.vanishes_on_outer_layer() {
        for idx in lattice.indices() {
            if lattice.on_outer_layer(idx) {
                out[lattice.flat(idx)] = 0.0;
            }
        }
    }
    BoxField::new(lattice, out)
}
