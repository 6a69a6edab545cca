//! Full linear convolution of dense 2D/3D arrays through the FFT.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Smallest size `>= n` whose only prime factors are 2, 3 and 5.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Full linear convolution of `a` (shape `da`) with `b` (shape `db`).
///
/// Arrays are flat with axis 0 fastest. The result has shape
/// `da[k] + db[k] - 1` along every axis.
pub(crate) fn convolve(a: &[f64], da: [usize; 3], b: &[f64], db: [usize; 3]) -> (Vec<f64>, [usize; 3]) {
    let out_dims = [da[0] + db[0] - 1, da[1] + db[1] - 1, da[2] + db[2] - 1];
    let pad = [
        smooth_size(out_dims[0]),
        smooth_size(out_dims[1]),
        smooth_size(out_dims[2]),
    ];
    let n = pad[0] * pad[1] * pad[2];
    let mut fa = embed(a, da, pad, n);
    let mut fb = embed(b, db, pad, n);
    let mut planner = FftPlanner::<f64>::new();
    transform(&mut planner, &mut fa, pad, false);
    transform(&mut planner, &mut fb, pad, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    transform(&mut planner, &mut fa, pad, true);
    let scale = 1.0 / n as f64;
    let mut out = vec![0.0; out_dims.iter().product()];
    for k in 0..out_dims[2] {
        for j in 0..out_dims[1] {
            for i in 0..out_dims[0] {
                let src = i + pad[0] * (j + pad[1] * k);
                out[i + out_dims[0] * (j + out_dims[1] * k)] = fa[src].re * scale;
            }
        }
    }
    (out, out_dims)
}

fn embed(src: &[f64], d: [usize; 3], pad: [usize; 3], n: usize) -> Vec<Complex<f64>> {
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for k in 0..d[2] {
        for j in 0..d[1] {
            for i in 0..d[0] {
                buf[i + pad[0] * (j + pad[1] * k)] = Complex::new(src[i + d[0] * (j + d[1] * k)], 0.0);
            }
        }
    }
    buf
}

fn transform(planner: &mut FftPlanner<f64>, buf: &mut [Complex<f64>], dims: [usize; 3], inverse: bool) {
    let strides = [1, dims[0], dims[0] * dims[1]];
    for axis in 0..3 {
        let len = dims[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let stride = strides[axis];
        let mut line = vec![Complex::new(0.0, 0.0); len];
        let total = buf.len();
        for start in 0..total {
            if (start / stride) % len != 0 {
                continue;
            }
            for (t, x) in line.iter_mut().enumerate() {
                *x = buf[start + t * stride];
            }
            fft.process(&mut line);
            for (t, x) in line.iter().enumerate() {
                buf[start + t * stride] = *x;
            }
        }
    }
}
