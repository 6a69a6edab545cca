//! JSON domain descriptions: `{"kind": ..., "params": {...}, "h": ...}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::domain::{make_annulus, make_ball, make_box, rasterize_polygon, GridDomain};
use crate::error::{invalid, Error, Result};

/// Shape family of a domain description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Ball,
    Box,
    Polygon,
    Annulus,
}

/// A serializable domain description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub params: Value,
    pub h: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallParams {
    r: f64,
    #[serde(default)]
    center: Option<Vec<f64>>,
    #[serde(default)]
    n: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxParams {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonParams {
    vertices: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnulusParams {
    r_inner: f64,
    r_outer: f64,
    #[serde(default)]
    center: Option<Vec<f64>>,
}

fn params<T: for<'de> Deserialize<'de>>(v: &Value, kind: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("{kind} params: {e}")))
}

fn center_or_origin(center: Option<Vec<f64>>, n: Option<usize>) -> Result<Vec<f64>> {
    match (center, n) {
        (Some(c), Some(n)) if c.len() != n => Err(invalid("center length disagrees with n")),
        (Some(c), _) => Ok(c),
        (None, n) => Ok(vec![0.0; n.unwrap_or(2)]),
    }
}

impl DomainSpec {
    /// Parses a JSON document, rejecting unknown keys.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("domain JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the parameters without building the grid.
    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(invalid(format!("h must be positive, got {}", self.h)));
        }
        match self.kind {
            DomainKind::Ball => {
                let p: BallParams = params(&self.params, "ball")?;
                center_or_origin(p.center, p.n)?;
            }
            DomainKind::Box => {
                let _: BoxParams = params(&self.params, "box")?;
            }
            DomainKind::Polygon => {
                let _: PolygonParams = params(&self.params, "polygon")?;
            }
            DomainKind::Annulus => {
                let p: AnnulusParams = params(&self.params, "annulus")?;
                center_or_origin(p.center, None)?;
            }
        }
        Ok(())
    }

    /// Same description at a different cell size.
    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..self.clone() }
    }

    /// Rasterizes the description.
    pub fn build(&self) -> Result<GridDomain> {
        self.validate()?;
        let h = self.h;
        match self.kind {
            DomainKind::Ball => {
                let p: BallParams = params(&self.params, "ball")?;
                make_ball(&center_or_origin(p.center, p.n)?, p.r, h)
            }
            DomainKind::Box => {
                let p: BoxParams = params(&self.params, "box")?;
                make_box(&p.lo, &p.hi, h)
            }
            DomainKind::Polygon => {
                let p: PolygonParams = params(&self.params, "polygon")?;
                rasterize_polygon(&p.vertices, h)
            }
            DomainKind::Annulus => {
                let p: AnnulusParams = params(&self.params, "annulus")?;
                make_annulus(&center_or_origin(p.center, None)?, p.r_inner, p.r_outer, h)
            }
        }
    }

    /// Short human-readable name, stable across runs.
    pub fn label(&self) -> String {
        let kind = serde_json::to_value(self.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        format!("{kind}{}", self.params)
    }
}
