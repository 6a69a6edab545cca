//! Axis-aligned cell lattices anchored at the world origin.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point in space. Planar problems leave the third coordinate at zero.
pub type Point = [f64; 3];

/// Number of empty layers kept around every constructed domain.
pub const PAD: usize = 2;

/// A finite block of cells of side `h`.
///
/// Cell `idx` along an axis has global index `offset + idx` and center
/// `(offset + idx + 0.5) * h`. Because every lattice with the same `h` shares
/// the same global cells, fields built on different boxes line up exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    h: f64,
    offset: [i64; 3],
    dims: [usize; 3],
}

impl Lattice {
    pub fn new(dim: usize, h: f64, offset: [i64; 3], dims: [usize; 3]) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(invalid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid(format!("cell size must be positive, got {h}")));
        }
        let mut offset = offset;
        let mut dims = dims;
        for k in dim..3 {
            offset[k] = 0;
            dims[k] = 1;
        }
        if dims[..dim].iter().any(|&d| d == 0) {
            return Err(invalid("lattice dimensions must be positive"));
        }
        Ok(Self { dim, h, offset, dims })
    }

    /// Smallest lattice whose cells cover the box `[lo, hi]`, plus `pad` layers.
    pub fn covering(dim: usize, h: f64, lo: Point, hi: Point, pad: usize) -> Result<Self> {
        let mut offset = [0i64; 3];
        let mut dims = [1usize; 3];
        for k in 0..dim {
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] <= hi[k]) {
                return Err(invalid("covering box must be finite and ordered"));
            }
            let a = (lo[k] / h).floor() as i64 - pad as i64;
            let b = (hi[k] / h).floor() as i64 + pad as i64;
            offset[k] = a;
            dims[k] = (b - a + 1) as usize;
        }
        Self::new(dim, h, offset, dims)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn offset(&self) -> [i64; 3] {
        self.offset
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume of one cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Flat-index distance between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.dims[0],
            _ => self.dims[0] * self.dims[1],
        }
    }

    pub fn flat(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.dims[0] * (idx[1] + self.dims[1] * idx[2])
    }

    pub fn unflat(&self, f: usize) -> [usize; 3] {
        let i = f % self.dims[0];
        let r = f / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    /// Global lattice index of a local index.
    pub fn global(&self, idx: [usize; 3]) -> [i64; 3] {
        [
            self.offset[0] + idx[0] as i64,
            self.offset[1] + idx[1] as i64,
            self.offset[2] + idx[2] as i64,
        ]
    }

    /// Local index of a global index, if it lies in this block.
    pub fn local(&self, g: [i64; 3]) -> Option<[usize; 3]> {
        let mut out = [0usize; 3];
        for k in 0..3 {
            let l = g[k] - self.offset[k];
            if l < 0 || l >= self.dims[k] as i64 {
                return None;
            }
            out[k] = l as usize;
        }
        Some(out)
    }

    pub fn center(&self, idx: [usize; 3]) -> Point {
        let mut p = [0.0; 3];
        for k in 0..self.dim {
            p[k] = (self.offset[k] as f64 + idx[k] as f64 + 0.5) * self.h;
        }
        p
    }

    pub fn center_flat(&self, f: usize) -> Point {
        self.center(self.unflat(f))
    }

    /// Global index of the cell containing `p`.
    pub fn global_of_point(&self, p: Point) -> [i64; 3] {
        let mut g = [0i64; 3];
        for k in 0..self.dim {
            g[k] = (p[k] / self.h).floor() as i64;
        }
        g
    }

    /// Neighbour of `idx` one step along `axis`, forwards or backwards.
    pub fn step(&self, idx: [usize; 3], axis: usize, forward: bool) -> Option<[usize; 3]> {
        let mut out = idx;
        if forward {
            if idx[axis] + 1 >= self.dims[axis] {
                return None;
            }
            out[axis] += 1;
        } else {
            if idx[axis] == 0 {
                return None;
            }
            out[axis] -= 1;
        }
        Some(out)
    }

    /// The same lattice with `cells` extra layers on every side.
    pub fn grown(&self, cells: usize) -> Lattice {
        let mut offset = self.offset;
        let mut dims = self.dims;
        for k in 0..self.dim {
            offset[k] -= cells as i64;
            dims[k] += 2 * cells;
        }
        Lattice { dim: self.dim, h: self.h, offset, dims }
    }

    /// Whether `other` is the same cell family (dimension and cell size).
    pub fn compatible(&self, other: &Lattice) -> bool {
        self.dim == other.dim && self.h == other.h
    }

    /// Whether the cell at `idx` touches the outer face of the block.
    pub fn on_outer_layer(&self, idx: [usize; 3]) -> bool {
        (0..self.dim).any(|k| idx[k] == 0 || idx[k] + 1 == self.dims[k])
    }

    /// Iterates all local indices in flat order.
    pub fn indices(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.len()).map(move |f| self.unflat(f))
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    dist2(a, b).sqrt()
}

pub(crate) fn dist2(a: Point, b: Point) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

pub(crate) fn norm(a: Point) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}
