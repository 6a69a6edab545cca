//! Weighted boundary samples.
//!
//! Each sample stands for a small flat patch of boundary: a segment in the
//! plane or a parallelogram in space, given by its center and half-axes.
//! Diameters of groups of samples are taken over patch vertices, so a group
//! of adjacent patches measures the diameter of the boundary piece it
//! represents rather than that of its sample centers.

use super::domain::GridDomain;
use super::lattice::{norm, Point};
use crate::error::{invalid, Error, Result};
use crate::sum::pairwise_sum;

/// Boundary face of an interior cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    /// Flat index of the interior cell.
    pub cell: usize,
    pub axis: usize,
    /// True when the face looks along the positive axis direction.
    pub forward: bool,
}

/// A finite weighted sample of a boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCloud {
    dim: usize,
    resolution: f64,
    points: Vec<Point>,
    weights: Vec<f64>,
    patches: Vec<[Point; 2]>,
    faces: Option<Vec<Face>>,
}

impl BoundaryCloud {
    /// Builds a cloud of bare points (no patch extent).
    pub fn from_points(dim: usize, points: Vec<Point>, weights: Vec<f64>, resolution: f64) -> Result<Self> {
        let patches = vec![[[0.0; 3]; 2]; points.len()];
        Self::with_patches(dim, points, weights, patches, resolution)
    }

    /// Builds a cloud whose samples carry patch half-axes.
    pub fn with_patches(
        dim: usize,
        points: Vec<Point>,
        weights: Vec<f64>,
        patches: Vec<[Point; 2]>,
        resolution: f64,
    ) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(invalid("cloud dimension must be 2 or 3"));
        }
        if points.len() != weights.len() || points.len() != patches.len() {
            return Err(invalid("points, weights and patches differ in length"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(invalid("resolution must be positive"));
        }
        Ok(Self { dim, resolution, points, weights, patches, faces: None })
    }

    /// Points spaced about `spacing` apart along the segment from `a` to `b`.
    pub fn segment(a: Point, b: Point, spacing: f64) -> Result<Self> {
        let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let len = norm(d);
        if !(len > 0.0 && spacing > 0.0) {
            return Err(invalid("segment needs positive length and spacing"));
        }
        let m = (len / spacing).round().max(1.0) as usize;
        let w = len / m as f64;
        let half = [d[0] / (2.0 * m as f64), d[1] / (2.0 * m as f64), d[2] / (2.0 * m as f64)];
        let points = (0..m)
            .map(|i| {
                let t = (i as f64 + 0.5) / m as f64;
                [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]]
            })
            .collect();
        let dim = if a[2] == 0.0 && b[2] == 0.0 { 2 } else { 3 };
        Self::with_patches(dim, points, vec![w; m], vec![[half, [0.0; 3]]; m], w)
    }

    /// Planar ellipse with semi-axes `a`, `b`, sampled about `spacing` apart.
    pub fn ellipse(center: [f64; 2], a: f64, b: f64, spacing: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && spacing > 0.0) {
            return Err(invalid("ellipse needs positive axes and spacing"));
        }
        let approx = std::f64::consts::PI * (3.0 * (a + b) - ((3.0 * a + b) * (a + 3.0 * b)).sqrt());
        let m = (approx / spacing).ceil().max(8.0) as usize;
        let dt = std::f64::consts::TAU / m as f64;
        let mut points = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mut patches = Vec::with_capacity(m);
        for i in 0..m {
            let t = (i as f64 + 0.5) * dt;
            let (s, c) = t.sin_cos();
            let tangent = [-a * s, b * c, 0.0];
            let speed = norm(tangent);
            let w = speed * dt;
            points.push([center[0] + a * c, center[1] + b * s, 0.0]);
            weights.push(w);
            let k = 0.5 * w / speed;
            patches.push([[tangent[0] * k, tangent[1] * k, 0.0], [0.0; 3]]);
        }
        let res = weights.iter().cloned().fold(0.0, f64::max);
        Self::with_patches(2, points, weights, patches, res)
    }

    /// Circle of radius `r` sampled about `spacing` apart.
    pub fn circle(center: [f64; 2], r: f64, spacing: f64) -> Result<Self> {
        Self::ellipse(center, r, r, spacing)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sampling scale: the largest patch size or cell size.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn patches(&self) -> &[[Point; 2]] {
        &self.patches
    }

    /// Grid faces behind each sample, when extracted from a domain.
    pub fn faces(&self) -> Option<&[Face]> {
        self.faces.as_deref()
    }

    /// Sum of the weights.
    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Same samples with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(invalid("weight scale must be positive"));
        }
        let mut out = self.clone();
        for w in &mut out.weights {
            *w *= factor;
        }
        Ok(out)
    }

    /// Largest distance from a sample point to a vertex of its patch.
    pub fn patch_radius(&self) -> f64 {
        self.patches
            .iter()
            .map(|[a, b]| norm(*a) + norm(*b))
            .fold(0.0, f64::max)
    }

    /// Largest per-axis extent of a patch beyond its sample point.
    pub fn patch_overhang(&self) -> f64 {
        self.patches
            .iter()
            .flat_map(|[a, b]| (0..3).map(move |k| a[k].abs() + b[k].abs()))
            .fold(0.0, f64::max)
    }

    /// Patch vertices of sample `i` (the point itself when it has no extent).
    pub fn vertices(&self, i: usize, out: &mut Vec<Point>) {
        let p = self.points[i];
        let start = out.len();
        out.push(p);
        for t in self.patches[i] {
            if t == [0.0; 3] {
                continue;
            }
            let n = out.len();
            for j in start..n {
                let v = out[j];
                out[j] = [v[0] + t[0], v[1] + t[1], v[2] + t[2]];
                out.push([v[0] - t[0], v[1] - t[1], v[2] - t[2]]);
            }
        }
    }

    /// Diameter of the union of the patches of `members`.
    pub fn diameter(&self, members: &[usize]) -> f64 {
        let mut verts = Vec::with_capacity(members.len() * 4);
        for &i in members {
            self.vertices(i, &mut verts);
        }
        diameter_of(&verts)
    }
}

pub(crate) fn diameter_of(verts: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..verts.len() {
        let a = verts[i];
        for b in &verts[i + 1..] {
            let d = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
            best = best.max(d);
        }
    }
    best.sqrt()
}

/// Face centers of the domain's boundary with weight `h^(n-1)`.
///
/// Faces are listed cell by cell in flat order, then by axis, backward face
/// before forward face.
pub fn extract_boundary(domain: &GridDomain) -> Result<BoundaryCloud> {
    let l = domain.lattice();
    let n = l.dim();
    let h = l.h();
    let w = h.powi(n as i32 - 1);
    let mut points = Vec::new();
    let mut patches = Vec::new();
    let mut faces = Vec::new();
    for f in domain.cells() {
        let idx = l.unflat(f);
        let c = l.center(idx);
        for axis in 0..n {
            for forward in [false, true] {
                let nb = l.step(idx, axis, forward).expect("outer layer is empty");
                if domain.contains(l.flat(nb)) {
                    continue;
                }
                let mut p = c;
                p[axis] += if forward { 0.5 * h } else { -0.5 * h };
                let mut axes = [[0.0; 3]; 2];
                for (slot, other) in (0..n).filter(|&k| k != axis).enumerate() {
                    axes[slot][other] = 0.5 * h;
                }
                points.push(p);
                patches.push(axes);
                faces.push(Face { cell: f, axis, forward });
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let weights = vec![w; points.len()];
    let mut cloud = BoundaryCloud::with_patches(n, points, weights, patches, h)?;
    cloud.faces = Some(faces);
    Ok(cloud)
}
