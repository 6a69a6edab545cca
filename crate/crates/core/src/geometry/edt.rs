//! Exact squared Euclidean distance transform on a cell lattice.
//!
//! Separable lower-envelope algorithm: one pass of parabola envelopes per
//! axis, linear in the number of cells.

use super::lattice::Lattice;

/// Squared distance, in cell units, from every cell center to the nearest
/// center where `seed` is true. Cells with no seed at all get `f64::INFINITY`.
pub fn squared_distance(lattice: &Lattice, seed: &[bool]) -> Vec<f64> {
    assert_eq!(seed.len(), lattice.len());
    let mut d: Vec<f64> = seed
        .iter()
        .map(|&s| if s { 0.0 } else { f64::INFINITY })
        .collect();
    let dims = lattice.dims();
    for axis in 0..lattice.dim() {
        let n = dims[axis];
        let stride = lattice.stride(axis);
        let mut line = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut v = vec![0usize; n];
        let mut z = vec![0.0; n + 1];
        for start in line_starts(lattice, axis) {
            for (i, x) in line.iter_mut().enumerate() {
                *x = d[start + i * stride];
            }
            envelope(&line, &mut out, &mut v, &mut z);
            for (i, x) in out.iter().enumerate() {
                d[start + i * stride] = *x;
            }
        }
    }
    d
}

/// Flat indices of the first cell of every line along `axis`.
fn line_starts(lattice: &Lattice, axis: usize) -> Vec<usize> {
    let dims = lattice.dims();
    let mut starts = Vec::with_capacity(lattice.len() / dims[axis]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let idx = [i, j, k];
                if idx[axis] == 0 {
                    starts.push(lattice.flat(idx));
                }
            }
        }
    }
    starts
}

fn envelope(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        let mut s = f64::NEG_INFINITY;
        while k >= 0 {
            let p = v[k as usize];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k as usize] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k as usize] = q;
        z[k as usize] = if k == 0 { f64::NEG_INFINITY } else { s };
        z[k as usize + 1] = f64::INFINITY;
    }
    if k < 0 {
        d.fill(f64::INFINITY);
        return;
    }
    let mut j = 0usize;
    for (q, out) in d.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(lattice: &Lattice, seed: &[bool]) -> Vec<f64> {
        let seeds: Vec<[usize; 3]> = lattice.indices().filter(|i| seed[lattice.flat(*i)]).collect();
        lattice
            .indices()
            .map(|i| {
                seeds
                    .iter()
                    .map(|s| {
                        (0..3)
                            .map(|k| (i[k] as f64 - s[k] as f64).powi(2))
                            .sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn matches_brute_force_in_2d_and_3d() {
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % 7 == 0
        };
        for (dim, dims) in [(2, [13, 9, 1]), (3, [6, 7, 5])] {
            let l = Lattice::new(dim, 1.0, [0; 3], dims).unwrap();
            let seed: Vec<bool> = (0..l.len()).map(|_| next()).collect();
            assert_eq!(squared_distance(&l, &seed), brute(&l, &seed));
        }
    }

    #[test]
    fn no_seed_gives_infinity() {
        let l = Lattice::new(2, 1.0, [0; 3], [4, 4, 1]).unwrap();
        assert!(squared_distance(&l, &[false; 16]).iter().all(|d| d.is_infinite()));
    }
}
