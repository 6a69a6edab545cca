//! Hausdorff premeasure estimates and boundary partitions.
//!
//! A covering is scored by its covering sum `omega_d * sum rd^d`, where `rd`
//! is half the diameter of a piece. Partitions split a boundary cloud into
//! disjoint pieces of bounded diameter; comparing each piece's weight with
//! `omega_d * rd^d` gives the partition defect, which vanishes as pieces
//! shrink on a rectifiable boundary.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::cloud::BoundaryCloud;
use crate::geometry::lattice::{dist2, Point};
use crate::sum::{pairwise_map, pairwise_sum};

/// Volume of the unit ball in dimension `d`, `pi^(d/2) / Gamma(d/2 + 1)`.
///
/// Non-integer `d` is allowed, which gives the normalization of the
/// `d`-dimensional Hausdorff measure.
///
/// ```
/// use gmtlab::unit_ball_volume;
/// assert!((unit_ball_volume(2.0).unwrap() - std::f64::consts::PI).abs() < 1e-14);
/// assert!((unit_ball_volume(1.0).unwrap() - 2.0).abs() < 1e-14);
/// ```
pub fn unit_ball_volume(d: f64) -> Result<f64> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(invalid(format!("dimension must be non-negative, got {d}")));
    }
    Ok(PI.powf(d / 2.0) / libm::tgamma(d / 2.0 + 1.0))
}

/// One piece of a covering.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverCell {
    pub center: Point,
    /// Half the diameter of the piece.
    pub rd: f64,
    /// Indices of the cloud samples the piece covers.
    pub members: Vec<usize>,
}

/// A finite covering of a boundary cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct Covering {
    pub d: f64,
    pub cells: Vec<CoverCell>,
}

impl Covering {
    /// Checks that every sample of `cloud` lies in at least one piece.
    pub fn covers(&self, cloud: &BoundaryCloud) -> bool {
        let mut seen = vec![false; cloud.len()];
        for c in &self.cells {
            for &m in &c.members {
                if m < seen.len() {
                    seen[m] = true;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Largest half-diameter over the pieces.
    pub fn rd_max(&self) -> f64 {
        self.cells.iter().map(|c| c.rd).fold(0.0, f64::max)
    }
}

/// Covering sum `omega_d * sum rd^d`.
pub fn cover_sum(covering: &Covering) -> Result<f64> {
    let omega = unit_ball_volume(covering.d)?;
    Ok(omega * pairwise_map(&covering.cells, |c| c.rd.powf(covering.d)))
}

/// Result of [`estimate_hm`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HmEstimate {
    /// The smaller of the two covering sums.
    pub value: f64,
    pub d: f64,
    pub delta: f64,
    /// Covering sum of the axis-aligned box covering.
    pub box_sum: f64,
    /// Covering sum of the farthest-point covering, when one was built.
    pub greedy_sum: Option<f64>,
    pub pieces: usize,
    /// Always true: a covering sum bounds the premeasure from above.
    pub upper_bound: bool,
}

fn check_cloud(cloud: &BoundaryCloud, d: f64) -> Result<()> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if !(d.is_finite() && d >= 0.0) {
        return Err(invalid(format!("measure dimension must be non-negative, got {d}")));
    }
    Ok(())
}

/// Lower corner of the sample bounding box; box grids are anchored there so
/// they move with the cloud.
fn anchor(cloud: &BoundaryCloud) -> Point {
    let mut lo = [f64::INFINITY; 3];
    for p in cloud.points() {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
        }
    }
    lo
}

/// Groups samples by the axis-aligned box of side `side` holding them.
fn box_groups(cloud: &BoundaryCloud, lo: Point, side: f64) -> BTreeMap<[i64; 3], Vec<usize>> {
    let mut groups: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
    for (i, p) in cloud.points().iter().enumerate() {
        let key = [
            ((p[0] - lo[0]) / side).floor() as i64,
            ((p[1] - lo[1]) / side).floor() as i64,
            ((p[2] - lo[2]) / side).floor() as i64,
        ];
        groups.entry(key).or_default().push(i);
    }
    groups
}

fn box_side(cloud: &BoundaryCloud, delta: f64) -> Result<f64> {
    let side = delta / (cloud.dim() as f64).sqrt() - 2.0 * cloud.patch_overhang();
    if side <= 0.0 {
        return Err(Error::Resolution(format!(
            "delta {delta} is too small for samples of resolution {}",
            cloud.resolution()
        )));
    }
    Ok(side)
}

/// Covering by axis-aligned boxes small enough that every piece has diameter at most `delta`.
pub fn box_covering(cloud: &BoundaryCloud, d: f64, delta: f64) -> Result<Covering> {
    check_cloud(cloud, d)?;
    let side = box_side(cloud, delta)?;
    let lo = anchor(cloud);
    let cells = box_groups(cloud, lo, side)
        .into_iter()
        .map(|(key, members)| CoverCell {
            center: [
                lo[0] + (key[0] as f64 + 0.5) * side,
                lo[1] + (key[1] as f64 + 0.5) * side,
                if cloud.dim() == 3 { lo[2] + (key[2] as f64 + 0.5) * side } else { lo[2] },
            ],
            rd: 0.5 * cloud.diameter(&members),
            members,
        })
        .collect();
    Ok(Covering { d, cells })
}

/// Farthest-point covering: centers are picked greedily until every sample
/// lies close enough to a center, then samples join their nearest center.
pub fn greedy_covering(cloud: &BoundaryCloud, d: f64, delta: f64) -> Result<Option<Covering>> {
    check_cloud(cloud, d)?;
    let radius = 0.5 * delta - cloud.patch_radius();
    if radius <= 0.0 {
        return Ok(None);
    }
    let pts = cloud.points();
    let mut centers = vec![0usize];
    let mut nearest: Vec<f64> = pts.iter().map(|p| dist2(*p, pts[0])).collect();
    let mut owner = vec![0usize; pts.len()];
    loop {
        let (far, &far_d) = nearest
            .iter()
            .enumerate()
            .fold((0, &-1.0), |best, cur| if *cur.1 > *best.1 { cur } else { best });
        if far_d <= radius * radius {
            break;
        }
        let slot = centers.len();
        centers.push(far);
        let c = pts[far];
        for (i, p) in pts.iter().enumerate() {
            let dd = dist2(*p, c);
            if dd < nearest[i] {
                nearest[i] = dd;
                owner[i] = slot;
            }
        }
    }
    let mut members = vec![Vec::new(); centers.len()];
    for (i, &o) in owner.iter().enumerate() {
        members[o].push(i);
    }
    let cells = centers
        .iter()
        .zip(members)
        .map(|(&c, m)| CoverCell { center: pts[c], rd: 0.5 * cloud.diameter(&m), members: m })
        .collect();
    Ok(Some(Covering { d, cells }))
}

/// Upper estimate of the `d`-dimensional Hausdorff premeasure at scale `delta`.
///
/// Two coverings with pieces of diameter at most `delta` are built and the
/// smaller covering sum is returned.
pub fn estimate_hm(cloud: &BoundaryCloud, d: f64, delta: f64) -> Result<HmEstimate> {
    check_cloud(cloud, d)?;
    if !(delta.is_finite() && delta >= 2.0 * cloud.resolution()) {
        return Err(Error::Resolution(format!(
            "delta {delta} must be at least twice the sample resolution {}",
            cloud.resolution()
        )));
    }
    let boxes = box_covering(cloud, d, delta)?;
    let box_sum = cover_sum(&boxes)?;
    let greedy = greedy_covering(cloud, d, delta)?;
    let greedy_sum = greedy.as_ref().map(cover_sum).transpose()?;
    let (value, pieces) = match (&greedy, greedy_sum) {
        (Some(g), Some(s)) if s < box_sum => (s, g.cells.len()),
        _ => (box_sum, boxes.cells.len()),
    };
    Ok(HmEstimate { value, d, delta, box_sum, greedy_sum, pieces, upper_bound: true })
}

/// One piece of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionCell {
    pub members: Vec<usize>,
    /// Index of the sample chosen as the piece's representative.
    pub representative: usize,
    pub representative_point: Point,
    /// Half the diameter of the piece.
    pub rd: f64,
    /// Total sample weight of the piece.
    pub hm_est: f64,
}

/// A partition of a boundary cloud into pieces of diameter at most `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub d: f64,
    pub delta: f64,
    pub samples: usize,
    pub cells: Vec<PartitionCell>,
}

impl Partition {
    /// Largest half-diameter over the pieces.
    pub fn rd_max(&self) -> f64 {
        self.cells.iter().map(|c| c.rd).fold(0.0, f64::max)
    }

    /// Checks disjointness, coverage and the diameter bound.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.samples];
        for c in &self.cells {
            if c.members.is_empty() {
                return Err(invalid("partition has an empty piece"));
            }
            if !c.members.contains(&c.representative) {
                return Err(invalid("representative is not a member of its piece"));
            }
            if 2.0 * c.rd > self.delta * (1.0 + 1e-12) {
                return Err(invalid("piece diameter exceeds delta"));
            }
            for &m in &c.members {
                if m >= self.samples || seen[m] {
                    return Err(invalid("pieces overlap or reference unknown samples"));
                }
                seen[m] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("partition does not cover the cloud"));
        }
        Ok(())
    }

    /// Serializes the partition as pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("partition serializes")
    }
}

/// Splits `cloud` into box pieces of diameter at most `delta`.
///
/// Pieces are ordered by box position. The representative of a piece is the
/// member nearest to the members' centroid, ties broken by index.
pub fn build_partition(cloud: &BoundaryCloud, d: f64, delta: f64) -> Result<Partition> {
    check_cloud(cloud, d)?;
    if !(delta.is_finite() && delta >= 4.0 * cloud.resolution()) {
        return Err(Error::Resolution(format!(
            "delta {delta} must be at least four times the sample resolution {}",
            cloud.resolution()
        )));
    }
    let side = box_side(cloud, delta)?;
    let pts = cloud.points();
    let w = cloud.weights();
    let cells = box_groups(cloud, anchor(cloud), side)
        .into_values()
        .map(|members| {
            let inv = 1.0 / members.len() as f64;
            let mut centroid = [0.0; 3];
            for &m in &members {
                for k in 0..3 {
                    centroid[k] += pts[m][k] * inv;
                }
            }
            let representative = *members
                .iter()
                .min_by(|&&a, &&b| dist2(pts[a], centroid).total_cmp(&dist2(pts[b], centroid)).then(a.cmp(&b)))
                .expect("non-empty piece");
            let weights: Vec<f64> = members.iter().map(|&m| w[m]).collect();
            PartitionCell {
                rd: 0.5 * cloud.diameter(&members),
                hm_est: pairwise_sum(&weights),
                representative,
                representative_point: pts[representative],
                members,
            }
        })
        .collect();
    Ok(Partition { d, delta, samples: cloud.len(), cells })
}

/// Sum over pieces of `|weight(C) - omega_d * rd(C)^d|`.
pub fn partition_defect(partition: &Partition) -> Result<f64> {
    let omega = unit_ball_volume(partition.d)?;
    Ok(pairwise_map(&partition.cells, |c| (c.hm_est - omega * c.rd.powf(partition.d)).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_point_has_zero_measure() {
        let c = BoundaryCloud::from_points(2, vec![[0.3, 0.1, 0.0]], vec![1.0], 0.01).unwrap();
        assert_eq!(estimate_hm(&c, 1.0, 0.1).unwrap().value, 0.0);
    }

    #[test]
    fn counting_measure_of_separated_points() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let c = BoundaryCloud::from_points(2, pts, vec![1.0; 3], 0.01).unwrap();
        assert_eq!(estimate_hm(&c, 0.0, 0.1).unwrap().value, 3.0);
    }

    #[test]
    fn empty_cloud_is_rejected() {
        let c = BoundaryCloud::from_points(2, vec![], vec![], 0.01).unwrap();
        assert!(matches!(estimate_hm(&c, 1.0, 0.1), Err(Error::EmptyCloud)));
        assert!(matches!(build_partition(&c, 1.0, 0.1), Err(Error::EmptyCloud)));
    }

    #[test]
    fn too_small_delta_is_rejected() {
        let c = BoundaryCloud::segment([0.0; 3], [1.0, 0.0, 0.0], 0.01).unwrap();
        assert!(matches!(estimate_hm(&c, 1.0, 0.015), Err(Error::Resolution(_))));
        assert!(matches!(build_partition(&c, 1.0, 0.03), Err(Error::Resolution(_))));
    }

    #[test]
    fn partition_of_segment_is_valid() {
        let c = BoundaryCloud::segment([0.0; 3], [1.0, 0.0, 0.0], 0.001).unwrap();
        let p = build_partition(&c, 1.0, 0.05).unwrap();
        p.validate().unwrap();
        let total: f64 = p.cells.iter().map(|c| c.hm_est).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cover_sum_of_empty_covering_is_zero() {
        assert_eq!(cover_sum(&Covering { d: 1.0, cells: vec![] }).unwrap(), 0.0);
    }
}
