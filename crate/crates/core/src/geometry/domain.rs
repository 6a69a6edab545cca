//! Voxelized domains: construction, volume, dilation and translation.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use sha2::{Digest, Sha256};

use super::edt::squared_distance;
use super::lattice::{dist2, Lattice, Point, PAD};
use crate::error::{invalid, Error, Result};
use crate::fft::convolve;

/// A bounded open set approximated by the cells whose centers it contains.
///
/// The outermost layer of the lattice is always empty, so every interior
/// cell has all of its axis neighbours inside the block.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    lattice: Lattice,
    mask: Vec<bool>,
}

impl GridDomain {
    /// Wraps a mask, checking that it is non-empty and clear on the outer layer.
    pub fn new(lattice: Lattice, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != lattice.len() {
            return Err(invalid("mask length does not match lattice"));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptyDomain);
        }
        if lattice
            .indices()
            .any(|idx| mask[lattice.flat(idx)] && lattice.on_outer_layer(idx))
        {
            return Err(invalid("mask touches the outer layer of its lattice"));
        }
        Ok(Self { lattice, mask })
    }

    /// Domain of all cells whose centers satisfy `inside`, on a lattice covering `[lo, hi]`.
    pub fn from_predicate(
        dim: usize,
        h: f64,
        lo: Point,
        hi: Point,
        inside: impl Fn(Point) -> bool,
    ) -> Result<Self> {
        let lattice = Lattice::covering(dim, h, lo, hi, PAD)?;
        let mask = (0..lattice.len())
            .map(|f| inside(lattice.center_flat(f)))
            .collect();
        Self::new(lattice, mask)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn h(&self) -> f64 {
        self.lattice.h()
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.mask[flat]
    }

    /// Whether the global cell `g` is interior.
    pub fn contains_global(&self, g: [i64; 3]) -> bool {
        self.lattice
            .local(g)
            .is_some_and(|idx| self.mask[self.lattice.flat(idx)])
    }

    /// Number of interior cells.
    pub fn cell_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Flat indices of interior cells in increasing order.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(f, &m)| m.then_some(f))
    }

    /// Lebesgue measure: interior cell count times the cell volume.
    pub fn volume(&self) -> f64 {
        self.cell_count() as f64 * self.lattice.cell_volume()
    }

    /// Shift by a whole number of cells along each axis.
    pub fn translated(&self, cells: [i64; 3]) -> GridDomain {
        let l = &self.lattice;
        let mut offset = l.offset();
        for k in 0..l.dim() {
            offset[k] += cells[k];
        }
        let lattice = Lattice::new(l.dim(), l.h(), offset, l.dims()).expect("valid lattice");
        GridDomain { lattice, mask: self.mask.clone() }
    }

    /// Re-embeds the domain into a larger compatible lattice.
    pub fn embedded(&self, target: &Lattice) -> Result<GridDomain> {
        if !self.lattice.compatible(target) {
            return Err(invalid("lattices differ in dimension or cell size"));
        }
        let mut mask = vec![false; target.len()];
        for f in self.cells() {
            let g = self.lattice.global(self.lattice.unflat(f));
            let idx = target
                .local(g)
                .ok_or_else(|| invalid("target lattice does not contain the domain"))?;
            mask[target.flat(idx)] = true;
        }
        GridDomain::new(target.clone(), mask)
    }

    /// Cells whose centers lie within distance `eps` of an interior center.
    pub fn dilate(&self, eps: f64) -> Result<GridDomain> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(invalid(format!("dilation radius must be non-negative, got {eps}")));
        }
        let grow = (eps / self.h()).ceil() as usize;
        let lattice = self.lattice.grown(grow);
        let base = self.embedded(&lattice)?;
        let d2 = squared_distance(&lattice, &base.mask);
        let r = eps / self.h();
        let limit = r * r * (1.0 + 1e-12) + 1e-12;
        let mask = d2.iter().map(|&d| d <= limit).collect();
        GridDomain::new(lattice, mask)
    }

    /// Squared distance (world units) from every cell center to the nearest
    /// exterior center.
    pub fn squared_distance_to_exterior(&self) -> Vec<f64> {
        let outside: Vec<bool> = self.mask.iter().map(|m| !m).collect();
        let h2 = self.h() * self.h();
        squared_distance(&self.lattice, &outside)
            .into_iter()
            .map(|d| d * h2)
            .collect()
    }

    /// Squared distance (world units) from every cell center to the nearest
    /// interior center.
    pub fn squared_distance_to_interior(&self) -> Vec<f64> {
        let h2 = self.h() * self.h();
        squared_distance(&self.lattice, &self.mask)
            .into_iter()
            .map(|d| d * h2)
            .collect()
    }

    /// Writes the `GMT-GRID v1` text form.
    pub fn write_grid<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.grid_text().as_bytes())?;
        Ok(())
    }

    /// The `GMT-GRID v1` text form as a string.
    pub fn grid_text(&self) -> String {
        let l = &self.lattice;
        let n = l.dim();
        let mut s = format!("GMT-GRID v1 {} {}", n, l.h());
        for k in 0..n {
            let _ = write!(s, " {}", l.offset()[k]);
        }
        for k in 0..n {
            let _ = write!(s, " {}", l.dims()[k]);
        }
        s.push('\n');
        let mut runs = Vec::new();
        let mut current = false;
        let mut count = 0usize;
        for &m in &self.mask {
            if m == current {
                count += 1;
            } else {
                runs.push(count);
                current = m;
                count = 1;
            }
        }
        runs.push(count);
        for chunk in runs.chunks(16) {
            let line: Vec<String> = chunk.iter().map(usize::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Content hash of the grid text, used to tie function files to their domain.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.grid_text().as_bytes()))
    }

    /// Reads the `GMT-GRID v1` text form.
    pub fn read_grid<R: BufRead>(mut r: R) -> Result<GridDomain> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() < 3 || tok[0] != "GMT-GRID" || tok[1] != "v1" {
            return Err(Error::Parse("missing GMT-GRID v1 header".into()));
        }
        let n: usize = parse_tok(tok[2])?;
        if !(2..=3).contains(&n) || tok.len() != 4 + 2 * n {
            return Err(Error::Parse("malformed GMT-GRID header".into()));
        }
        let h: f64 = parse_tok(tok[3])?;
        let mut offset = [0i64; 3];
        let mut dims = [1usize; 3];
        for k in 0..n {
            offset[k] = parse_tok(tok[4 + k])?;
            dims[k] = parse_tok(tok[4 + n + k])?;
        }
        let lattice = Lattice::new(n, h, offset, dims)?;
        let mut body = String::new();
        r.read_to_string(&mut body)?;
        let mut mask = Vec::with_capacity(lattice.len());
        let mut value = false;
        for t in body.split_whitespace() {
            let run: usize = parse_tok(t)?;
            if mask.len() + run > lattice.len() {
                return Err(Error::Parse("run lengths exceed the lattice size".into()));
            }
            mask.extend(std::iter::repeat_n(value, run));
            value = !value;
        }
        if mask.len() != lattice.len() {
            return Err(Error::Parse("run lengths do not cover the lattice".into()));
        }
        GridDomain::new(lattice, mask)
    }
}

fn parse_tok<T: std::str::FromStr>(t: &str) -> Result<T> {
    t.parse()
        .map_err(|_| Error::Parse(format!("invalid token `{t}`")))
}

fn check_h(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("cell size must be positive, got {h}")))
    }
}

fn as_point(c: &[f64]) -> Result<Point> {
    if !(2..=3).contains(&c.len()) || c.iter().any(|x| !x.is_finite()) {
        return Err(invalid("points must have 2 or 3 finite coordinates"));
    }
    let mut p = [0.0; 3];
    p[..c.len()].copy_from_slice(c);
    Ok(p)
}

/// Open ball of radius `r` around `center` (2 or 3 coordinates).
pub fn make_ball(center: &[f64], r: f64, h: f64) -> Result<GridDomain> {
    check_h(h)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    let c = as_point(center)?;
    let n = center.len();
    let lo = [c[0] - r, c[1] - r, c[2] - r];
    let hi = [c[0] + r, c[1] + r, c[2] + r];
    GridDomain::from_predicate(n, h, lo, hi, |p| dist2(p, c) < r * r)
}

/// Open annulus `r_inner < |x - center| < r_outer` in the plane.
pub fn make_annulus(center: &[f64], r_inner: f64, r_outer: f64, h: f64) -> Result<GridDomain> {
    check_h(h)?;
    if !(r_inner >= 0.0 && r_outer > r_inner && r_outer.is_finite()) {
        return Err(invalid("annulus radii must satisfy 0 <= inner < outer"));
    }
    let c = as_point(center)?;
    let n = center.len();
    let lo = [c[0] - r_outer, c[1] - r_outer, c[2] - r_outer];
    let hi = [c[0] + r_outer, c[1] + r_outer, c[2] + r_outer];
    GridDomain::from_predicate(n, h, lo, hi, |p| {
        let d = dist2(p, c);
        d > r_inner * r_inner && d < r_outer * r_outer
    })
}

/// Open axis-aligned box `(lo, hi)`.
pub fn make_box(lo: &[f64], hi: &[f64], h: f64) -> Result<GridDomain> {
    check_h(h)?;
    if lo.len() != hi.len() {
        return Err(invalid("box corners must have the same dimension"));
    }
    let a = as_point(lo)?;
    let b = as_point(hi)?;
    let n = lo.len();
    if (0..n).any(|k| a[k] >= b[k]) {
        return Err(invalid("box must have positive extent along every axis"));
    }
    GridDomain::from_predicate(n, h, a, b, |p| (0..n).all(|k| p[k] > a[k] && p[k] < b[k]))
}

/// Interior of a simple polygon given by its vertices in order.
pub fn rasterize_polygon(vertices: &[[f64; 2]], h: f64) -> Result<GridDomain> {
    check_h(h)?;
    if vertices.len() < 3 {
        return Err(invalid("polygon needs at least three vertices"));
    }
    if vertices.iter().flatten().any(|x| !x.is_finite()) {
        return Err(invalid("polygon vertices must be finite"));
    }
    let area2: f64 = (0..vertices.len())
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    if area2.abs() < 1e-14 {
        return Err(invalid("polygon is degenerate (zero area)"));
    }
    if !is_simple(vertices) {
        return Err(invalid("polygon is self-intersecting"));
    }
    let lo = [
        vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min),
        vertices.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min),
        0.0,
    ];
    let hi = [
        vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max),
        vertices.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max),
        0.0,
    ];
    let lattice = Lattice::covering(2, h, lo, hi, PAD)?;
    let dims = lattice.dims();
    let mut mask = vec![false; lattice.len()];
    let mut crossings = Vec::new();
    for j in 0..dims[1] {
        let y = lattice.center([0, j, 0])[1];
        crossings.clear();
        for i in 0..vertices.len() {
            let a = vertices[i];
            let b = vertices[(i + 1) % vertices.len()];
            if (a[1] <= y) != (b[1] <= y) {
                let t = (y - a[1]) / (b[1] - a[1]);
                crossings.push(a[0] + t * (b[0] - a[0]));
            }
        }
        crossings.sort_by(f64::total_cmp);
        for i in 0..dims[0] {
            let x = lattice.center([i, j, 0])[0];
            let left = crossings.iter().filter(|&&c| c < x).count();
            mask[lattice.flat([i, j, 0])] = left % 2 == 1;
        }
    }
    GridDomain::new(lattice, mask)
}

fn is_simple(v: &[[f64; 2]]) -> bool {
    let n = v.len();
    let orient = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        let x = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };
    let on_seg = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    let intersects = |p1, p2, p3, p4| {
        let d1 = orient(p3, p4, p1);
        let d2 = orient(p3, p4, p2);
        let d3 = orient(p1, p2, p3);
        let d4 = orient(p1, p2, p4);
        if d1 * d2 < 0 && d3 * d4 < 0 {
            return true;
        }
        (d1 == 0 && on_seg(p3, p4, p1))
            || (d2 == 0 && on_seg(p3, p4, p2))
            || (d3 == 0 && on_seg(p1, p2, p3))
            || (d4 == 0 && on_seg(p1, p2, p4))
    };
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if intersects(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Lebesgue measure of a domain.
pub fn volume(domain: &GridDomain) -> f64 {
    domain.volume()
}

/// Minkowski sum of the two cell unions.
///
/// Each domain is read as the union of its closed cells; the sum of two such
/// unions is again a union of lattice cells, so the result is exact on the
/// common lattice. Both domains must share dimension and cell size.
pub fn minkowski_sum(a: &GridDomain, b: &GridDomain) -> Result<GridDomain> {
    let (la, lb) = (a.lattice(), b.lattice());
    if !la.compatible(lb) {
        return Err(invalid("Minkowski sum needs a common dimension and cell size"));
    }
    let to_f = |d: &GridDomain| -> Vec<f64> { d.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect() };
    let (conv, cd) = convolve(&to_f(a), la.dims(), &to_f(b), lb.dims());
    let n = la.dim();
    let mut dims = [1usize; 3];
    let mut offset = [0i64; 3];
    for k in 0..n {
        dims[k] = cd[k] + 1;
        offset[k] = la.offset()[k] + lb.offset()[k];
    }
    let lattice = Lattice::new(n, la.h(), offset, dims)?;
    let mut mask = vec![false; lattice.len()];
    let shifts: Vec<[usize; 3]> = (0..1usize << n)
        .map(|bits| {
            let mut s = [0usize; 3];
            for (k, item) in s.iter_mut().enumerate().take(n) {
                *item = (bits >> k) & 1;
            }
            s
        })
        .collect();
    for k in 0..cd[2] {
        for j in 0..cd[1] {
            for i in 0..cd[0] {
                if conv[i + cd[0] * (j + cd[1] * k)] > 0.5 {
                    for s in &shifts {
                        mask[lattice.flat([i + s[0], j + s[1], k + s[2]])] = true;
                    }
                }
            }
        }
    }
    GridDomain::new(lattice, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_volume_is_exact() {
        let d = make_box(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 64.0).unwrap();
        assert_eq!(d.volume(), 1.0);
    }

    #[test]
    fn disk_volume_converges() {
        let d = make_ball(&[0.0, 0.0], 1.0, 0.01).unwrap();
        assert!((d.volume() - std::f64::consts::PI).abs() / std::f64::consts::PI < 1e-3);
    }

    #[test]
    fn polygon_l_shape_area() {
        let v = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let d = rasterize_polygon(&v, 1.0 / 32.0).unwrap();
        assert_eq!(d.volume(), 3.0);
    }

    #[test]
    fn polygon_rejects_bow_tie() {
        let v = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(rasterize_polygon(&v, 0.1).is_err());
    }

    #[test]
    fn polygon_rejects_collinear() {
        let v = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(rasterize_polygon(&v, 0.1).is_err());
    }

    #[test]
    fn outer_layer_is_checked() {
        let l = Lattice::new(2, 1.0, [0; 3], [3, 3, 1]).unwrap();
        let mut m = vec![false; 9];
        m[0] = true;
        assert!(GridDomain::new(l.clone(), m).is_err());
        assert!(matches!(GridDomain::new(l, vec![false; 9]), Err(Error::EmptyDomain)));
    }

    #[test]
    fn dilate_zero_is_identity() {
        let d = make_ball(&[0.0, 0.0], 0.5, 0.05).unwrap();
        let e = d.dilate(0.0).unwrap();
        assert_eq!(e.volume(), d.volume());
        assert_eq!(e.cell_count(), d.cell_count());
    }

    #[test]
    fn grid_text_round_trip() {
        let d = make_ball(&[0.1, -0.2, 0.3], 0.4, 0.1).unwrap();
        let back = GridDomain::read_grid(d.grid_text().as_bytes()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn grid_text_rejects_bad_runs() {
        assert!(GridDomain::read_grid("GMT-GRID v1 2 0.5 0 0 3 3\n4 1 3\n".as_bytes()).is_err());
        assert!(GridDomain::read_grid("GMT-GRID v1 2 0.5 0 0 3 3\n4 1 9\n".as_bytes()).is_err());
        assert!(GridDomain::read_grid("GMT-GRID v2 2 0.5 0 0 3 3\n9\n".as_bytes()).is_err());
    }

    #[test]
    fn box_pair_sum_is_exact() {
        let h = 1.0 / 16.0;
        let a = make_box(&[0.0, 0.0], &[1.0, 2.0], h).unwrap();
        let b = make_box(&[0.0, 0.0], &[2.0, 1.0], h).unwrap();
        assert_eq!(minkowski_sum(&a, &b).unwrap().volume(), 9.0);
    }
}
