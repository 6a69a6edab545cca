//! Numerical laboratory for geometric measure theory on grids.

pub mod calculus;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hausdorff;
pub mod lab;
pub mod sum;
pub mod suite;

mod fft;

pub use calculus::barrier::{barrier, shell_mass, shell_mass_limit, truncate, Barrier, BarrierField, Truncation};
pub use calculus::function::{BoxField, GridFunction, Modulus, Region};
pub use calculus::mollify::{mollify, Mollifier};
pub use calculus::ops::{
    abs_value, boundary_integral, grad_l1, grad_l2_squared, gradient_magnitudes, lq_norm, pointwise_min,
    total_variation, BoundaryIntegral, BoundaryWeights,
};
pub use calculus::steiner::{minkowski_steiner, SteinerEstimate, SteinerPoint};
pub use error::{Error, Result};
pub use expr::Expr;
pub use geometry::cloud::{extract_boundary, BoundaryCloud, Face};
pub use geometry::domain::{
    make_annulus, make_ball, make_box, minkowski_sum, rasterize_polygon, volume, GridDomain,
};
pub use geometry::lattice::{Lattice, Point};
pub use geometry::spec::{DomainKind, DomainSpec};
pub use lab::checks::{
    check_brunn_minkowski, check_bv_bound, check_extended_sobolev, check_isoperimetric, check_mazya,
    check_mazya_l2, check_perimeter_iso, check_sobolev, iso_constant, iso_constant_forms, paper_boundary_factor,
    sobolev_exponent, L2Constant, MazyaMode,
};
pub use lab::report::{ConstantMode, InequalityId, Relation, Report};
pub use lab::search::{mazya_quotient, quotient_search, SearchResult, SearchSummary};
pub use lab::trace::{proof_trace, StepRecord, TraceReport, TraceStep};
pub use hausdorff::{
    box_covering, build_partition, cover_sum, estimate_hm, greedy_covering, partition_defect, unit_ball_volume, CoverCell, Covering,
    HmEstimate, Partition, PartitionCell,
};
pub use suite::{
    csv_string, emit, parse_suite, parse_suite_str, report_label, run_suite, trace_series, tsv_string, CheckError, EntryOutcome, EntryParams,
    Format, FunctionSpec, PlotSeries, RunManifest, RunOptions, SuiteEntry, SuiteError, SuiteSpec,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/domains.md")]
    mod domains {}
    #[doc = include_str!("../../../book/src/hausdorff.md")]
    mod hausdorff {}
    #[doc = include_str!("../../../book/src/functions.md")]
    mod functions {}
    #[doc = include_str!("../../../book/src/perimeter.md")]
    mod perimeter {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/proof-trace.md")]
    mod proof_trace {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
