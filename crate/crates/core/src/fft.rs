//! Thin helpers over `rustfft`: cached plans, n-d transforms along row-major
//! axes and band-limited fractional shifts.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Unnormalized in-place transform: forward uses `e^{-2πi jk/n}`, inverse `e^{+2πi jk/n}`.
pub fn fft(buf: &mut [Complex64], inverse: bool) {
    if buf.len() > 1 {
        plan(buf.len(), inverse).process(buf);
    }
}

/// Unnormalized transform along every axis of a row-major tensor.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    debug_assert_eq!(total, data.len());
    let mut line = Vec::new();
    for axis in 0..shape.len() {
        let len = shape[axis];
        let inner: usize = shape[axis + 1..].iter().product();
        let outer = total / (len * inner);
        line.resize(len, Complex64::new(0.0, 0.0));
        for o in 0..outer {
            for i in 0..inner {
                let base = o * len * inner + i;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * inner];
                }
                fft(&mut line, inverse);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * inner] = *v;
                }
            }
        }
    }
}

/// Storage slot of the signed frequency index `k` in a length-`n` DFT.
pub fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Signed frequency index stored at slot `j`, in `[-n/2, n/2)`.
pub fn signed_index(j: usize, n: usize) -> i64 {
    let j = j as i64;
    let n = n as i64;
    if j >= n / 2 {
        j - n
    } else {
        j
    }
}

/// Band-limited periodic translation: returns samples of `v(x - delta·h)`,
/// with `delta` measured in grid steps. The Nyquist bin is shifted with a
/// cosine so that real input stays real.
pub fn shift(values: &[Complex64], delta: f64) -> Vec<Complex64> {
    let n = values.len();
    if delta == delta.round() {
        let s = (delta as i64).rem_euclid(n as i64) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, v) in values.iter().enumerate() {
            out[(j + s) % n] = *v;
        }
        return out;
    }
    let mut buf = values.to_vec();
    fft(&mut buf, false);
    for (j, v) in buf.iter_mut().enumerate() {
        let k = signed_index(j, n);
        if 2 * k == -(n as i64) {
            *v *= (PI * delta).cos();
        } else {
            *v *= Complex64::from_polar(1.0, -2.0 * PI * k as f64 * delta / n as f64);
        }
    }
    fft(&mut buf, true);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Band-limited periodic translation of a row-major tensor along one axis by
/// `delta` steps, in place.
pub fn shift_axis(data: &mut [Complex64], shape: &[usize], axis: usize, delta: f64) {
    if delta == 0.0 {
        return;
    }
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer = data.len() / (len * inner);
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * len * inner + i;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * inner];
            }
            for (k, v) in shift(&line, delta).into_iter().enumerate() {
                data[base + k * inner] = v;
            }
        }
    }
}
