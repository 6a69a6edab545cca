//! Step-by-step numerical replay of the covering proof of the boundary-term
//! inequality.
//!
//! For a non-negative `u` with a Lipschitz modulus, the boundary is split
//! into small pieces, a conical barrier is raised around each piece, and `u`
//! is cut down by the barriers so that it vanishes near the boundary. Each
//! intermediate estimate of the argument is then evaluated on the grid.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::checks::{check_mazya, iso_constant, paper_boundary_factor, sobolev_exponent, MazyaMode};
use super::report::ratio;
use super::tolerances::{check_tolerance, BARRIER_QUADRATURE_CELLS, SHELL_MASS_TOL};
use crate::calculus::barrier::truncate;
use crate::calculus::function::{lq_of, GridFunction};
use crate::calculus::ops::grad_l1;
use crate::error::{invalid, Error, Result};
use crate::hausdorff::{build_partition, partition_defect, unit_ball_volume};
use crate::sum::pairwise_sum;

/// The estimates evaluated by [`proof_trace`], in proof order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStep {
    /// Gradient of the truncation is bounded by that of `u` plus the barrier masses.
    #[serde(rename = "main4")]
    TruncatedGradient,
    /// Barrier gradient mass agrees with the closed-form shell mass.
    #[serde(rename = "main5")]
    ShellMass,
    /// Sobolev inequality for the truncation, which vanishes on the boundary.
    #[serde(rename = "main6")]
    InteriorSobolev,
    /// Norm away from the boundary bounded through the piece radii.
    #[serde(rename = "prelim_est")]
    PreliminaryBound,
    /// Piece radii bounded by the boundary integral plus the partition defect.
    #[serde(rename = "hm_sum_estimate")]
    CoveringSum,
    /// The full inequality with the covering boundary factor.
    #[serde(rename = "main3")]
    FullInequality,
}

impl TraceStep {
    /// Stable label used in reports and plot files.
    pub fn label(&self) -> &'static str {
        match self {
            TraceStep::TruncatedGradient => "main4",
            TraceStep::ShellMass => "main5",
            TraceStep::InteriorSobolev => "main6",
            TraceStep::PreliminaryBound => "prelim_est",
            TraceStep::CoveringSum => "hm_sum_estimate",
            TraceStep::FullInequality => "main3",
        }
    }
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One evaluated estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: TraceStep,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub tol: f64,
    pub detail: BTreeMap<String, Value>,
}

/// Result of [`proof_trace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub eps: f64,
    pub s: f64,
    /// Continuity scale: `|u(x) - u(y)| <= eps` whenever `|x - y| <= delta`.
    pub delta: f64,
    /// Diameter bound of the partition pieces, `delta / 2`.
    pub piece_diameter: f64,
    pub pieces: usize,
    pub rd_max: f64,
    pub defect: f64,
    pub calibration_factor: f64,
    pub sentinel: f64,
    pub steps: Vec<StepRecord>,
    pub holds: bool,
}

impl TraceReport {
    pub fn step(&self, step: TraceStep) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.step == step)
    }
}

fn record(step: TraceStep, lhs: f64, rhs: f64, holds: bool, tol: f64, detail: Value) -> StepRecord {
    let detail = match detail {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    StepRecord { step, lhs, rhs, ratio: ratio(lhs, rhs), holds, tol, detail }
}

/// Replays the covering proof for `u` with accuracy `eps` and ramp width `s`.
///
/// `u` must be non-negative and carry a trace and a Lipschitz modulus. The
/// continuity scale is `delta = min(eps, eps / L)`; pieces have diameter at
/// most `delta / 2`, and the ramp must satisfy `0 < s < delta / 2`.
pub fn proof_trace(u: &GridFunction, eps: f64, s: f64) -> Result<TraceReport> {
    if !u.is_nonnegative() {
        return Err(invalid("proof trace needs a non-negative function"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps must be positive"));
    }
    let modulus = u.modulus().ok_or(Error::NoModulus)?;
    let trace = u.trace().ok_or(Error::NoTrace)?;
    let delta = modulus.delta_for(eps);
    let piece_diameter = 0.5 * delta;
    if !(s > 0.0 && s < piece_diameter) {
        return Err(invalid(format!("ramp width must lie in (0, {piece_diameter}), got {s}")));
    }
    let n = u.dim();
    let nf = n as f64;
    let h = u.h();
    let tol = check_tolerance(h);
    let c = iso_constant(n)?;
    let q = sobolev_exponent(n)?;
    let factor = paper_boundary_factor(n)?;
    let omega_face = unit_ball_volume(nf - 1.0)?;
    let region = u.region();
    let kappa = region.calibration_factor()?;
    let cloud = region.calibrated_cloud()?;
    let partition = build_partition(&cloud, nf - 1.0, piece_diameter)?;
    let defect = partition_defect(&partition)?;
    let cut = truncate(u, &partition, eps, s)?;
    let v = &cut.function;

    let grad_u = grad_l1(u);
    let grad_v = grad_l1(v);
    let quad = h.min(s / BARRIER_QUADRATURE_CELLS);
    let masses: Vec<f64> = cut.barriers.iter().map(|b| b.gradient_mass(quad, n)).collect();
    let shells: Vec<f64> = cut.barriers.iter().map(|b| b.shell_mass(n)).collect::<Result<_>>()?;
    let mass = pairwise_sum(&masses);
    let shell = pairwise_sum(&shells);

    let d_ext = u.domain().squared_distance_to_exterior();
    let inner: Vec<f64> = u
        .domain()
        .cells()
        .filter(|&f| d_ext[f].sqrt() - 0.5 * h >= eps)
        .map(|f| u.values()[f])
        .collect();
    let cell_vol = u.lattice().cell_volume();
    let lq_inner = lq_of(&inner, cell_vol, q)?;
    let lq_v = crate::calculus::ops::lq_norm(v, q)?;

    let radii_terms: Vec<f64> = partition
        .cells
        .iter()
        .map(|p| (trace[p.representative] + eps) * omega_face * p.rd.powf(nf - 1.0))
        .collect();
    let radii_sum = pairwise_sum(&radii_terms);
    let sample_terms: Vec<f64> = trace
        .iter()
        .zip(cloud.weights())
        .map(|(t, w)| (t + 2.0 * eps) * w)
        .collect();
    let sup = u.sup_norm();
    let covering_rhs = (sup + eps) * defect + pairwise_sum(&sample_terms);
    let full = check_mazya(u, MazyaMode::PaperFactor)?;

    // Cells of the truncation within half a cell of the boundary.
    let faces = u.cloud().faces().unwrap_or_default();
    let layer_max = faces.iter().map(|f| v.values()[f.cell]).fold(0.0, f64::max);
    let trace_max = v.trace().unwrap_or_default().iter().cloned().fold(0.0, f64::max);

    let steps = vec![
        record(
            TraceStep::TruncatedGradient,
            grad_v,
            grad_u + mass,
            grad_v <= (grad_u + mass) * (1.0 + tol),
            tol,
            json!({"grad_u": grad_u, "barrier_mass": mass, "barriers": cut.barriers.len()}),
        ),
        record(
            TraceStep::ShellMass,
            mass,
            shell,
            (mass - shell).abs() <= SHELL_MASS_TOL * shell,
            SHELL_MASS_TOL,
            json!({"quadrature_spacing": quad}),
        ),
        record(
            TraceStep::InteriorSobolev,
            lq_inner,
            c * grad_v,
            lq_inner <= lq_v * (1.0 + 1e-12) && lq_v <= c * grad_v * (1.0 + tol),
            tol,
            json!({"lq_truncation": lq_v, "boundary_layer_max": layer_max, "trace_max": trace_max}),
        ),
        record(
            TraceStep::PreliminaryBound,
            lq_inner,
            c * (grad_u + factor * radii_sum),
            lq_inner <= c * (grad_u + factor * radii_sum) * (1.0 + tol),
            tol,
            json!({"radii_sum": radii_sum, "boundary_factor": factor}),
        ),
        record(
            TraceStep::CoveringSum,
            radii_sum,
            covering_rhs,
            radii_sum <= covering_rhs * (1.0 + 1e-9),
            1e-9,
            json!({"defect": defect, "sup_norm": sup}),
        ),
        record(
            TraceStep::FullInequality,
            full.lhs,
            full.rhs,
            full.holds,
            full.tol,
            json!({"grad_l1": grad_u, "boundary_integral": full.metadata.get("boundary_integral")}),
        ),
    ];
    let holds = steps.iter().all(|s| s.holds);
    Ok(TraceReport {
        eps,
        s,
        delta,
        piece_diameter,
        pieces: partition.cells.len(),
        rd_max: partition.rd_max(),
        defect,
        calibration_factor: kappa,
        sentinel: cut.sentinel,
        steps,
        holds,
    })
}
