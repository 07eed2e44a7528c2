//! Multi-dimensional complex FFT plumbing over row-major arrays.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Smallest `m >= n` whose prime factors are 2, 3 or 5.
pub fn next_fast_len(n: usize) -> usize {
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

/// Planned FFTs for every axis of a fixed shape. Shareable across threads.
pub struct NdFft {
    shape: Vec<usize>,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = shape.iter().map(|&s| planner.plan_fft_forward(s)).collect();
        let inv = shape.iter().map(|&s| planner.plan_fft_inverse(s)).collect();
        Self { shape: shape.to_vec(), fwd, inv }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalised transform over all axes.
    pub fn process(&self, data: &mut [Complex64], inverse: bool) {
        for axis in 0..self.shape.len() {
            self.axis(data, axis, inverse, None, None);
        }
    }

    /// Unnormalised transform along one axis, with optional per-index twiddles applied before and
    /// after the FFT.
    pub fn axis(
        &self,
        data: &mut [Complex64],
        axis: usize,
        inverse: bool,
        pre: Option<&[Complex64]>,
        post: Option<&[Complex64]>,
    ) {
        let len = self.shape[axis];
        if len == 1 && pre.is_none() && post.is_none() {
            return;
        }
        let plan = if inverse { &self.inv[axis] } else { &self.fwd[axis] };
        let stride: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        let twiddle = |line: &mut [Complex64], w: Option<&[Complex64]>| {
            if let Some(w) = w {
                line.iter_mut().zip(w).for_each(|(z, t)| *z *= t);
            }
        };
        if stride == 1 {
            for line in data.chunks_exact_mut(len) {
                twiddle(line, pre);
                plan.process_with_scratch(line, &mut scratch);
                twiddle(line, post);
            }
            return;
        }
        // gather a block of lines at once so the strided reads stay cache friendly
        let block = stride.min(64);
        let mut buf = vec![Complex64::default(); len * block];
        for o in 0..outer {
            let base = o * len * stride;
            let mut i0 = 0;
            while i0 < stride {
                let nb = block.min(stride - i0);
                for m in 0..len {
                    let row = base + m * stride + i0;
                    for b in 0..nb {
                        buf[b * len + m] = data[row + b];
                    }
                }
                for line in buf[..nb * len].chunks_exact_mut(len) {
                    twiddle(line, pre);
                    plan.process_with_scratch(line, &mut scratch);
                    twiddle(line, post);
                }
                for m in 0..len {
                    let row = base + m * stride + i0;
                    for b in 0..nb {
                        data[row + b] = buf[b * len + m];
                    }
                }
                i0 += nb;
            }
        }
    }

    /// Continuous-normalised transform along `axis`:
    /// `out[l] = Δp Σ_m z[m] exp(sign·2πI·p_m·q_l)` with `p_m = op + mΔp`, `q_l = oq + l/(NΔp)`.
    pub fn continuous_axis(&self, data: &mut [Complex64], axis: usize, sign: f64, op: f64, dp: f64, oq: f64) {
        let len = self.shape[axis];
        let dq = 1.0 / (len as f64 * dp);
        let pre: Vec<Complex64> =
            (0..len).map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * oq * m as f64 * dp)).collect();
        let post: Vec<Complex64> = (0..len)
            .map(|l| Complex64::from_polar(dp, sign * 2.0 * PI * op * (oq + l as f64 * dq)))
            .collect();
        self.axis(data, axis, sign > 0.0, Some(&pre), Some(&post));
    }
}

/// FFT frequency of bin `l` on a length-`len` axis with spacing `h`, wrapped to `[-1/2h, 1/2h)`.
pub fn fft_freq(l: usize, len: usize, h: f64) -> f64 {
    let k = if l < len.div_ceil(2) { l as f64 } else { l as f64 - len as f64 };
    k / (len as f64 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_lengths() {
        assert_eq!(next_fast_len(127), 128);
        assert_eq!(next_fast_len(31), 32);
        assert_eq!(next_fast_len(46), 48);
        assert_eq!(next_fast_len(7), 8);
        assert_eq!(next_fast_len(1), 1);
    }

    #[test]
    fn matches_direct_dft_on_middle_axis() {
        let shape = [3, 5, 4];
        let n: usize = shape.iter().product();
        let data: Vec<Complex64> =
            (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let mut out = data.clone();
        NdFft::new(&shape).axis(&mut out, 1, false, None, None);
        for a in 0..3 {
            for l in 0..5 {
                for c in 0..4 {
                    let mut s = Complex64::default();
                    for m in 0..5 {
                        s += data[a * 20 + m * 4 + c]
                            * Complex64::from_polar(1.0, -2.0 * PI * (m * l) as f64 / 5.0);
                    }
                    assert!((s - out[a * 20 + l * 4 + c]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn continuous_axis_matches_direct_sum() {
        let len = 6;
        let (op, dp, oq) = (-1.3, 0.4, -0.9);
        let dq = 1.0 / (len as f64 * dp);
        let data: Vec<Complex64> = (0..len).map(|i| Complex64::new(1.0 + i as f64, -(i as f64))).collect();
        for sign in [-1.0, 1.0] {
            let mut out = data.clone();
            NdFft::new(&[len]).continuous_axis(&mut out, 0, sign, op, dp, oq);
            for l in 0..len {
                let q = oq + l as f64 * dq;
                let s: Complex64 = (0..len)
                    .map(|m| data[m] * Complex64::from_polar(dp, sign * 2.0 * PI * (op + m as f64 * dp) * q))
                    .sum();
                assert!((s - out[l]).norm() < 1e-12);
            }
        }
    }
}
