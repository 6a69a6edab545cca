//! Check results.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error};

/// Inequalities the laboratory can check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    Mazya,
    MazyaL2,
    Isoperimetric,
    Sobolev,
    SobolevExtended,
    BrunnMinkowski,
    BvBound,
    PerimeterIso,
    /// Fixture that reports a deliberately failing comparison.
    SwapTest,
}

impl InequalityId {
    pub const ALL: [InequalityId; 9] = [
        InequalityId::Mazya,
        InequalityId::MazyaL2,
        InequalityId::Isoperimetric,
        InequalityId::Sobolev,
        InequalityId::SobolevExtended,
        InequalityId::BrunnMinkowski,
        InequalityId::BvBound,
        InequalityId::PerimeterIso,
        InequalityId::SwapTest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Mazya => "mazya",
            InequalityId::MazyaL2 => "mazya_l2",
            InequalityId::Isoperimetric => "isoperimetric",
            InequalityId::Sobolev => "sobolev",
            InequalityId::SobolevExtended => "sobolev_extended",
            InequalityId::BrunnMinkowski => "brunn_minkowski",
            InequalityId::BvBound => "bv_bound",
            InequalityId::PerimeterIso => "perimeter_iso",
            InequalityId::SwapTest => "swap_test",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown inequality id `{s}`")))
    }
}

/// Where the constant in a check comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    /// The sharp isoperimetric constant.
    Optimal,
    /// The sharp constant with the boundary term weighted by the
    /// covering-argument factor.
    PaperFactor,
    /// A constant provided by the caller.
    Supplied,
}

/// Direction of the comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Holds when `lhs <= rhs * (1 + tol)`.
    LhsAtMostRhs,
    /// Holds when `rhs >= lhs * (1 - tol)`.
    RhsAtLeastLhs,
}

/// Outcome of one inequality check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub inequality_id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_mode: ConstantMode,
    pub constant_value: f64,
    /// `lhs / rhs`; zero when both sides vanish.
    pub ratio: f64,
    pub holds: bool,
    pub tol: f64,
    pub relation: Relation,
    pub metadata: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(
        inequality_id: InequalityId,
        lhs: f64,
        rhs: f64,
        constant_mode: ConstantMode,
        constant_value: f64,
        tol: f64,
        relation: Relation,
    ) -> Self {
        let mut r = Self {
            inequality_id,
            lhs,
            rhs,
            constant_mode,
            constant_value,
            ratio: ratio(lhs, rhs),
            holds: false,
            tol,
            relation,
            metadata: BTreeMap::new(),
        };
        r.holds = r.evaluate();
        r
    }

    fn evaluate(&self) -> bool {
        match self.relation {
            Relation::LhsAtMostRhs => self.lhs <= self.rhs * (1.0 + self.tol),
            Relation::RhsAtLeastLhs => self.rhs >= self.lhs * (1.0 - self.tol),
        }
    }

    /// Re-evaluates the verdict under a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.holds = self.evaluate() && self.metadata.get("chain_holds").and_then(Value::as_bool).unwrap_or(true);
        self
    }

    /// Adds a metadata entry.
    pub fn meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_owned(), value.into());
        self
    }
}

pub(crate) fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip_through_strings() {
        for id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
            assert_eq!(serde_json::to_value(id).unwrap(), Value::String(id.as_str().into()));
        }
        assert!("bogus".parse::<InequalityId>().unwrap_err().to_string().contains("bogus"));
    }

    #[test]
    fn verdict_follows_tolerance() {
        let r = Report::new(InequalityId::Sobolev, 1.01, 1.0, ConstantMode::Optimal, 1.0, 0.02, Relation::LhsAtMostRhs);
        assert!(r.holds);
        assert!(!r.with_tol(0.0).holds);
        let g = Report::new(InequalityId::BrunnMinkowski, 2.0, 1.97, ConstantMode::Optimal, 1.0, 0.02, Relation::RhsAtLeastLhs);
        assert!(g.holds);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
    }
}
