//! Coordinate ascent on the boundary-term quotient.
//!
//! The quotient `|u|_q / (integral |grad u| + integral over the boundary of |u|)`
//! is bounded by the sharp constant `c(n)`. The search perturbs one cell
//! value or trace value at a time and keeps a change only when the quotient
//! strictly increases, so a search that stays below `c(n)` is numerical
//! evidence for the sharp inequality.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checks::{iso_constant, sobolev_exponent};
use super::tolerances::SEARCH_BOUND_SLACK;
use crate::calculus::function::GridFunction;
use crate::calculus::ops::{boundary_integral, cell_gradient, grad_l1, lq_norm, BoundaryWeights};
use crate::error::{invalid, Error, Result};

/// Quotient of `u` with calibrated boundary weights.
pub fn mazya_quotient(u: &GridFunction) -> Result<f64> {
    let q = sobolev_exponent(u.dim())?;
    let abs = crate::calculus::ops::abs_value(u)?;
    let den = grad_l1(u) + boundary_integral(&abs, BoundaryWeights::Calibrated)?.value;
    let num = lq_norm(u, q)?;
    if den <= 0.0 {
        return Err(Error::DegenerateStart("denominator vanishes".into()));
    }
    Ok(num / den)
}

/// Result of [`quotient_search`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: GridFunction,
    pub quotient: f64,
    pub initial: f64,
    /// Quotient after each sweep; never decreasing.
    pub history: Vec<f64>,
    /// `c(n)` times the allowed headroom.
    pub bound: f64,
    pub within_bound: bool,
    pub seed: u64,
}

/// Serializable summary of a search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub initial: f64,
    pub quotient: f64,
    pub constant: f64,
    pub bound: f64,
    pub within_bound: bool,
    pub seed: u64,
    pub history: Vec<f64>,
}

impl SearchResult {
    pub fn summary(&self) -> SearchSummary {
        SearchSummary {
            initial: self.initial,
            quotient: self.quotient,
            constant: self.bound / (1.0 + SEARCH_BOUND_SLACK),
            bound: self.bound,
            within_bound: self.within_bound,
            seed: self.seed,
            history: self.history.clone(),
        }
    }
}

#[derive(Clone, Copy)]
enum Coord {
    Cell(usize),
    Trace(usize),
}

struct State<'a> {
    u: &'a GridFunction,
    values: Vec<f64>,
    trace: Vec<f64>,
    grads: Vec<f64>,
    q: f64,
    cell_vol: f64,
    weights: Vec<f64>,
    sum_q: f64,
    sum_g: f64,
    sum_b: f64,
}

impl<'a> State<'a> {
    fn new(u: &'a GridFunction, kappa: f64, q: f64) -> Result<Self> {
        let trace = u.trace().ok_or(Error::NoTrace)?.to_vec();
        let values = u.values().to_vec();
        let mut grads = vec![0.0; values.len()];
        for c in u.domain().cells() {
            grads[c] = cell_gradient(u, &values, Some(&trace), c);
        }
        let weights: Vec<f64> = u.cloud().weights().iter().map(|w| w * kappa).collect();
        let mut s = Self {
            u,
            values,
            trace,
            grads,
            q,
            cell_vol: u.lattice().cell_volume(),
            weights,
            sum_q: 0.0,
            sum_g: 0.0,
            sum_b: 0.0,
        };
        s.resum();
        Ok(s)
    }

    fn resum(&mut self) {
        let cells: Vec<usize> = self.u.domain().cells().collect();
        let pq: Vec<f64> = cells.iter().map(|&c| self.values[c].abs().powf(self.q)).collect();
        let g: Vec<f64> = cells.iter().map(|&c| self.grads[c]).collect();
        let b: Vec<f64> = self.trace.iter().zip(&self.weights).map(|(t, w)| t.abs() * w).collect();
        self.sum_q = crate::sum::pairwise_sum(&pq);
        self.sum_g = crate::sum::pairwise_sum(&g);
        self.sum_b = crate::sum::pairwise_sum(&b);
    }

    fn quotient(&self) -> f64 {
        let num = (self.sum_q * self.cell_vol).max(0.0).powf(1.0 / self.q);
        num / (self.sum_g * self.cell_vol + self.sum_b)
    }

    /// Interior cells whose gradient depends on the value at `c`.
    fn dependents(&self, c: usize, out: &mut Vec<usize>) {
        out.clear();
        out.push(c);
        let l = self.u.lattice();
        let mask = self.u.domain().mask();
        for axis in 0..l.dim() {
            let b = c - l.stride(axis);
            if mask[b] {
                out.push(b);
            }
        }
    }

    fn regrad(&mut self, cells: &[usize]) -> f64 {
        let mut delta = 0.0;
        for &c in cells {
            let g = cell_gradient(self.u, &self.values, Some(&self.trace), c);
            delta += g - self.grads[c];
            self.grads[c] = g;
        }
        delta
    }

    /// Applies `coord += step`, returning the change in the three sums.
    fn apply(&mut self, coord: Coord, step: f64, scratch: &mut Vec<usize>) -> (f64, f64, f64) {
        match coord {
            Coord::Cell(c) => {
                let old = self.values[c];
                self.values[c] = old + step;
                let dq = self.values[c].abs().powf(self.q) - old.abs().powf(self.q);
                self.dependents(c, scratch);
                let cells = std::mem::take(scratch);
                let dg = self.regrad(&cells);
                *scratch = cells;
                (dq, dg, 0.0)
            }
            Coord::Trace(p) => {
                let old = self.trace[p];
                self.trace[p] = old + step;
                let db = (self.trace[p].abs() - old.abs()) * self.weights[p];
                let cell = self.u.cloud().faces().expect("face cloud")[p].cell;
                let dg = self.regrad(&[cell]);
                (0.0, dg, db)
            }
        }
    }

    fn value(&self, coord: Coord) -> f64 {
        match coord {
            Coord::Cell(c) => self.values[c],
            Coord::Trace(p) => self.trace[p],
        }
    }
}

/// Maximizes the quotient by randomized coordinate ascent.
///
/// Each of `iters` sweeps visits every cell and trace value in a shuffled
/// order (seeded by `seed`) and tries moving it by `+-step * sup|u|`,
/// keeping the move only if the quotient strictly increases and the value
/// stays non-negative. Running sums are recomputed after every sweep; a
/// sweep whose recomputed quotient falls below the previous one is undone.
pub fn quotient_search(u0: &GridFunction, iters: usize, step: f64, seed: u64) -> Result<SearchResult> {
    if !u0.is_nonnegative() {
        return Err(invalid("search needs a non-negative starting function"));
    }
    if !(step >= 0.0 && step.is_finite()) {
        return Err(invalid("step must be non-negative"));
    }
    if u0.sup_norm() == 0.0 {
        return Err(Error::DegenerateStart("starting function is identically zero".into()));
    }
    let n = u0.dim();
    let q = sobolev_exponent(n)?;
    let kappa = u0.region().calibration_factor()?;
    let mut state = State::new(u0, kappa, q)?;
    let initial = state.quotient();
    if !initial.is_finite() {
        return Err(Error::DegenerateStart("quotient is undefined".into()));
    }
    let bound = iso_constant(n)? * (1.0 + SEARCH_BOUND_SLACK);
    let mut coords: Vec<Coord> = u0.domain().cells().map(Coord::Cell).collect();
    coords.extend((0..state.trace.len()).map(Coord::Trace));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut history = Vec::with_capacity(iters);
    let mut best_q = initial;
    let mut scratch = Vec::new();
    for _ in 0..iters {
        let snapshot = (state.values.clone(), state.trace.clone(), state.grads.clone());
        let scale = step * state.values.iter().chain(&state.trace).fold(0.0f64, |m, v| m.max(v.abs()));
        coords.shuffle(&mut rng);
        let mut current = state.quotient();
        if scale > 0.0 {
            for &coord in &coords {
                for dir in [1.0, -1.0] {
                    let d = dir * scale;
                    if state.value(coord) + d < 0.0 {
                        continue;
                    }
                    let (dq, dg, db) = state.apply(coord, d, &mut scratch);
                    state.sum_q += dq;
                    state.sum_g += dg;
                    state.sum_b += db;
                    let trial = state.quotient();
                    if trial > current {
                        current = trial;
                        break;
                    }
                    let (rq, rg, rb) = state.apply(coord, -d, &mut scratch);
                    state.sum_q += rq;
                    state.sum_g += rg;
                    state.sum_b += rb;
                }
            }
        }
        state.resum();
        let fresh = state.quotient();
        if fresh < best_q {
            state.values = snapshot.0;
            state.trace = snapshot.1;
            state.grads = snapshot.2;
            state.resum();
        } else {
            best_q = fresh;
        }
        history.push(best_q);
    }
    let best = GridFunction::from_parts(u0.region(), state.values, Some(state.trace))?;
    let quotient = best_q;
    let within_bound = history.iter().chain(std::iter::once(&initial)).all(|&x| x <= bound);
    Ok(SearchResult { best, quotient, initial, history, bound, within_bound, seed })
}
