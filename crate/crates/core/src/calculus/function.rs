//! Grid functions on a domain and dense fields on a grid box.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::cloud::{extract_boundary, BoundaryCloud};
use crate::geometry::domain::GridDomain;
use crate::geometry::lattice::{Lattice, Point};
use crate::hausdorff::estimate_hm;
use crate::sum::pairwise_sum;

/// A domain together with its extracted boundary cloud.
///
/// Functions on the same region share one `Arc<Region>`.
#[derive(Debug)]
pub struct Region {
    domain: GridDomain,
    cloud: BoundaryCloud,
    calibration: OnceLock<std::result::Result<f64, String>>,
    faces: OnceLock<HashMap<(usize, usize, bool), usize>>,
}

/// Scale, in cells, at which boundary weights are calibrated.
pub const CALIBRATION_CELLS: f64 = 8.0;

impl Region {
    pub fn new(domain: GridDomain) -> Result<Arc<Self>> {
        let cloud = extract_boundary(&domain)?;
        Ok(Arc::new(Self { domain, cloud, calibration: OnceLock::new(), faces: OnceLock::new() }))
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn cloud(&self) -> &BoundaryCloud {
        &self.cloud
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn h(&self) -> f64 {
        self.domain.h()
    }

    /// Ratio of the estimated boundary measure to the raw face weight.
    ///
    /// Face weights count the staircase length of a voxel boundary; the
    /// Hausdorff estimate at a scale of a few cells recovers the length of
    /// the smooth boundary it approximates.
    pub fn calibration_factor(&self) -> Result<f64> {
        self.calibration
            .get_or_init(|| {
                let n = self.dim() as f64;
                estimate_hm(&self.cloud, n - 1.0, CALIBRATION_CELLS * self.h())
                    .map(|e| e.value / self.cloud.total_weight())
                    .map_err(|e| e.to_string())
            })
            .clone()
            .map_err(Error::InvalidArgument)
    }

    /// Boundary cloud with calibrated weights.
    pub fn calibrated_cloud(&self) -> Result<BoundaryCloud> {
        self.cloud.scaled(self.calibration_factor()?)
    }

    /// Sample index of the boundary face of `cell` along `axis`.
    pub fn face_index(&self, cell: usize, axis: usize, forward: bool) -> Option<usize> {
        self.faces
            .get_or_init(|| {
                self.cloud
                    .faces()
                    .unwrap_or_default()
                    .iter()
                    .enumerate()
                    .map(|(i, f)| ((f.cell, f.axis, f.forward), i))
                    .collect()
            })
            .get(&(cell, axis, forward))
            .copied()
    }

    fn same_as(&self, other: &Region) -> bool {
        std::ptr::eq(self, other) || self.domain == other.domain
    }
}

/// Declared modulus of continuity of a function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulus {
    Lipschitz(f64),
}

impl Modulus {
    /// Bound on `|u(x) - u(y)|` for `|x - y| <= t`.
    pub fn omega(&self, t: f64) -> f64 {
        match self {
            Modulus::Lipschitz(l) => l * t,
        }
    }

    /// A scale `delta <= eps` with `omega(delta) <= eps`.
    pub fn delta_for(&self, eps: f64) -> f64 {
        match self {
            Modulus::Lipschitz(l) if *l > 1.0 => eps / l,
            Modulus::Lipschitz(_) => eps,
        }
    }
}

/// A real function on the cells of a domain, with an optional boundary trace.
///
/// Values live on the full grid box and are zero off the domain. The trace,
/// when present, holds one value per boundary sample.
#[derive(Clone, Debug)]
pub struct GridFunction {
    region: Arc<Region>,
    values: Vec<f64>,
    trace: Option<Vec<f64>>,
    modulus: Option<Modulus>,
}

impl GridFunction {
    /// Samples `f` at cell centers and at boundary samples.
    pub fn from_fn(region: &Arc<Region>, f: impl Fn(Point) -> f64) -> Result<Self> {
        let l = region.domain.lattice();
        let mut values = vec![0.0; l.len()];
        for c in region.domain.cells() {
            values[c] = f(l.center_flat(c));
        }
        let trace = region.cloud.points().iter().map(|p| f(*p)).collect();
        Self::from_parts(region, values, Some(trace))
    }

    /// The constant `c` on the domain, trace included.
    pub fn constant(region: &Arc<Region>, c: f64) -> Result<Self> {
        Self::from_fn(region, |_| c)?.with_modulus(Modulus::Lipschitz(0.0))
    }

    /// Wraps raw values; entries off the domain must be zero.
    pub fn from_parts(region: &Arc<Region>, values: Vec<f64>, trace: Option<Vec<f64>>) -> Result<Self> {
        let d = &region.domain;
        if values.len() != d.lattice().len() {
            return Err(invalid("value array does not match the grid box"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("function values must be finite"));
        }
        if values.iter().zip(d.mask()).any(|(v, &m)| !m && *v != 0.0) {
            return Err(invalid("function must vanish off the domain"));
        }
        if let Some(t) = &trace {
            if t.len() != region.cloud.len() {
                return Err(invalid("trace length does not match the boundary cloud"));
            }
            if t.iter().any(|v| !v.is_finite()) {
                return Err(invalid("trace values must be finite"));
            }
        }
        Ok(Self { region: Arc::clone(region), values, trace, modulus: None })
    }

    /// Attaches a modulus after checking it against the trace.
    pub fn with_modulus(mut self, modulus: Modulus) -> Result<Self> {
        if let Some(t) = &self.trace {
            let reach = self.region.h() * (self.region.dim() as f64).sqrt();
            let slack = modulus.omega(reach) + 1e-12 * (1.0 + self.sup_norm());
            if let Some(faces) = self.region.cloud.faces() {
                for (tv, face) in t.iter().zip(faces) {
                    if (tv - self.values[face.cell]).abs() > slack {
                        return Err(invalid("trace is inconsistent with the declared modulus"));
                    }
                }
            }
        }
        self.modulus = Some(modulus);
        Ok(self)
    }

    pub fn region(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn domain(&self) -> &GridDomain {
        &self.region.domain
    }

    pub fn cloud(&self) -> &BoundaryCloud {
        &self.region.cloud
    }

    pub fn lattice(&self) -> &Lattice {
        self.region.domain.lattice()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> Option<&[f64]> {
        self.trace.as_deref()
    }

    pub fn modulus(&self) -> Option<Modulus> {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    pub fn h(&self) -> f64 {
        self.region.h()
    }

    /// Largest absolute value over cells and trace.
    pub fn sup_norm(&self) -> f64 {
        let cells = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let trace = self.trace.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        cells.max(trace)
    }

    /// Whether every cell and trace value is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0) && self.trace.iter().flatten().all(|v| *v >= 0.0)
    }

    /// Applies `f` to every cell and trace value; `f(0)` must be zero.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mask = self.domain().mask();
        let values = self
            .values
            .iter()
            .zip(mask)
            .map(|(v, &m)| if m { f(*v) } else { 0.0 })
            .collect();
        let trace = self.trace.as_ref().map(|t| t.iter().map(|v| f(*v)).collect());
        Self::from_parts(&self.region, values, trace)
    }

    /// `lambda * u`, with the modulus scaled accordingly.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let mut out = self.map(|v| lambda * v)?;
        out.modulus = self.modulus.map(|Modulus::Lipschitz(l)| Modulus::Lipschitz(l * lambda.abs()));
        Ok(out)
    }

    /// Extension by zero to the whole grid box.
    pub fn extend_by_zero(&self) -> BoxField {
        BoxField { lattice: self.lattice().clone(), values: self.values.clone() }
    }

    pub(crate) fn same_region(&self, other: &GridFunction) -> bool {
        self.region.same_as(&other.region)
    }

    pub(crate) fn set_modulus(&mut self, m: Option<Modulus>) {
        self.modulus = m;
    }

    /// Writes the `GMT-FUNC v1` form: a text header naming the domain by
    /// fingerprint, then little-endian `f64` cell values (interior cells in
    /// flat order) and trace values.
    pub fn write_func<W: Write>(&self, mut w: W) -> Result<()> {
        let cells: Vec<usize> = self.domain().cells().collect();
        writeln!(w, "GMT-FUNC v1")?;
        writeln!(w, "domain {}", self.domain().fingerprint())?;
        writeln!(w, "cells {}", cells.len())?;
        match &self.trace {
            Some(t) => writeln!(w, "trace {}", t.len())?,
            None => writeln!(w, "trace none")?,
        }
        for c in cells {
            w.write_all(&self.values[c].to_le_bytes())?;
        }
        for v in self.trace.iter().flatten() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the `GMT-FUNC v1` form for a known region.
    pub fn read_func<R: BufRead>(mut r: R, region: &Arc<Region>) -> Result<Self> {
        let mut line = String::new();
        let mut header = Vec::new();
        for _ in 0..4 {
            line.clear();
            r.read_line(&mut line)?;
            header.push(line.trim_end().to_owned());
        }
        if header[0] != "GMT-FUNC v1" {
            return Err(Error::Parse("missing GMT-FUNC v1 header".into()));
        }
        let field = |i: usize, key: &str| -> Result<String> {
            header[i]
                .strip_prefix(key)
                .map(|s| s.trim().to_owned())
                .ok_or_else(|| Error::Parse(format!("expected `{key}` line")))
        };
        if field(1, "domain")? != region.domain.fingerprint() {
            return Err(Error::Parse("function file refers to a different domain".into()));
        }
        let cells: Vec<usize> = region.domain.cells().collect();
        let count: usize = field(2, "cells")?
            .parse()
            .map_err(|_| Error::Parse("bad cell count".into()))?;
        if count != cells.len() {
            return Err(Error::Parse("cell count does not match the domain".into()));
        }
        let trace_field = field(3, "trace")?;
        let trace_len = if trace_field == "none" {
            None
        } else {
            Some(trace_field.parse::<usize>().map_err(|_| Error::Parse("bad trace count".into()))?)
        };
        let mut read_f64 = || -> Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)
                .map_err(|_| Error::Parse("function file is truncated".into()))?;
            Ok(f64::from_le_bytes(b))
        };
        let mut values = vec![0.0; region.domain.lattice().len()];
        for c in cells {
            values[c] = read_f64()?;
        }
        let trace = match trace_len {
            Some(n) => Some((0..n).map(|_| read_f64()).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        Self::from_parts(region, values, trace)
    }
}

/// A dense field on a whole grid box, read as zero beyond the box.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxField {
    lattice: Lattice,
    values: Vec<f64>,
}

impl BoxField {
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(invalid("field length does not match lattice"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field values must be finite"));
        }
        Ok(Self { lattice, values })
    }

    pub fn from_fn(lattice: Lattice, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = (0..lattice.len()).map(|i| f(lattice.center_flat(i))).collect();
        Self::new(lattice, values)
    }

    /// Indicator function of a domain on the domain's box.
    pub fn indicator(domain: &GridDomain) -> Self {
        let values = domain.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        Self { lattice: domain.lattice().clone(), values }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at global cell `g`, zero outside the box.
    pub fn at_global(&self, g: [i64; 3]) -> f64 {
        self.lattice.local(g).map_or(0.0, |idx| self.values[self.lattice.flat(idx)])
    }

    /// Whether every cell of the outer layer is zero.
    pub fn vanishes_on_outer_layer(&self) -> bool {
        self.lattice
            .indices()
            .all(|idx| !self.lattice.on_outer_layer(idx) || self.values[self.lattice.flat(idx)] == 0.0)
    }

    /// Integral `sum v h^n`.
    pub fn mass(&self) -> f64 {
        pairwise_sum(&self.values) * self.lattice.cell_volume()
    }

    /// `L^q` norm over the box.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        lq_of(&self.values, self.lattice.cell_volume(), q)
    }

    pub fn scaled(&self, lambda: f64) -> BoxField {
        BoxField { lattice: self.lattice.clone(), values: self.values.iter().map(|v| v * lambda).collect() }
    }

    /// Restriction to a region. The trace at a boundary face is the mean of
    /// the two cells it separates.
    pub fn restrict(&self, region: &Arc<Region>) -> Result<GridFunction> {
        let dl = region.domain.lattice();
        if !dl.compatible(&self.lattice) {
            return Err(invalid("field and domain lattices differ"));
        }
        let mut values = vec![0.0; dl.len()];
        for c in region.domain.cells() {
            values[c] = self.at_global(dl.global(dl.unflat(c)));
        }
        let faces = region.cloud.faces().ok_or_else(|| invalid("region cloud lacks faces"))?;
        let trace = faces
            .iter()
            .map(|f| {
                let inner = dl.unflat(f.cell);
                let mut outer = dl.global(inner);
                outer[f.axis] += if f.forward { 1 } else { -1 };
                0.5 * (values[f.cell] + self.at_global(outer))
            })
            .collect();
        GridFunction::from_parts(region, values, Some(trace))
    }
}

pub(crate) fn lq_of(values: &[f64], cell_volume: f64, q: f64) -> Result<f64> {
    if q.is_infinite() && q > 0.0 {
        return Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    if !(q >= 1.0) {
        return Err(invalid(format!("exponent must be at least 1, got {q}")));
    }
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
    Ok((pairwise_sum(&powered) * cell_volume).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::{make_ball, make_box};

    fn square() -> Arc<Region> {
        Region::new(make_box(&[0.0, 0.0], &[1.0, 1.0], 1.0 / 16.0).unwrap()).unwrap()
    }

    #[test]
    fn constant_has_trace_and_modulus() {
        let u = GridFunction::constant(&square(), 2.0).unwrap();
        assert!(u.trace().unwrap().iter().all(|&t| t == 2.0));
        assert_eq!(u.modulus(), Some(Modulus::Lipschitz(0.0)));
    }

    #[test]
    fn modulus_is_checked_against_trace() {
        let r = square();
        let u = GridFunction::from_fn(&r, |p| 10.0 * p[0]).unwrap();
        assert!(u.clone().with_modulus(Modulus::Lipschitz(10.0)).is_ok());
        assert!(u.with_modulus(Modulus::Lipschitz(0.1)).is_err());
    }

    #[test]
    fn values_off_domain_are_rejected() {
        let r = square();
        let vals = vec![1.0; r.domain().lattice().len()];
        assert!(GridFunction::from_parts(&r, vals, None).is_err());
    }

    #[test]
    fn restriction_of_indicator_has_half_trace() {
        let d = make_ball(&[0.0, 0.0], 0.5, 0.05).unwrap();
        let f = BoxField::indicator(&d);
        let r = Region::new(d).unwrap();
        let u = f.restrict(&r).unwrap();
        assert!(u.trace().unwrap().iter().all(|&t| t == 0.5));
    }

    #[test]
    fn func_file_round_trip() {
        let r = square();
        let u = GridFunction::from_fn(&r, |p| p[0] * p[1] - 0.3).unwrap();
        let mut buf = Vec::new();
        u.write_func(&mut buf).unwrap();
        let back = GridFunction::read_func(&buf[..], &r).unwrap();
        assert_eq!(back.values(), u.values());
        assert_eq!(back.trace(), u.trace());
        let other = Region::new(make_box(&[0.0, 0.0], &[1.0, 2.0], 1.0 / 16.0).unwrap()).unwrap();
        assert!(GridFunction::read_func(&buf[..], &other).is_err());
        assert!(GridFunction::read_func(&buf[..buf.len() - 3], &r).is_err());
    }

    #[test]
    fn lq_norm_of_constant() {
        let f = BoxField::from_fn(Lattice::new(2, 0.5, [0; 3], [4, 4, 1]).unwrap(), |_| 2.0).unwrap();
        assert!((f.lq_norm(2.0).unwrap() - 2.0 * 2.0).abs() < 1e-14);
        assert!(f.lq_norm(0.5).is_err());
    }
}
