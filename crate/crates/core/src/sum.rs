//! Deterministic pairwise summation.

const LEAF: usize = 32;

/// Sums a slice by recursive halving.
///
/// The grouping depends only on the slice length, so results are
/// reproducible across runs and thread counts.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of `f` applied to every element.
pub fn pairwise_map<T>(xs: &[T], f: impl Fn(&T) -> f64) -> f64 {
    let vals: Vec<f64> = xs.iter().map(f).collect();
    pairwise_sum(&vals)
}
