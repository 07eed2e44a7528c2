//! Two-sided quaternion Fourier transform `∫ e^{-2πi u·x} f(x,y) e^{-2πj v·y}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{next_fast_len, NdFft};
use crate::quaternion::Quaternion;
use crate::signal::{Grid, QSignal};
use crate::sum::CompensatedQ;

pub const REFERENCE_NODE_CAP: usize = 4096;

/// Spectrum samples on the centered frequency grid of `space`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSpectrum {
    pub values: QSignal,
    pub space: Grid,
}

impl QSpectrum {
    pub fn freq_grid(&self) -> &Grid {
        &self.values.grid
    }

    /// Samples a closed-form spectrum on the frequency grid dual to `space`.
    pub fn from_fn<F>(space: Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Quaternion + Sync,
    {
        let values = QSignal::from_fn(space.freq_grid(), f);
        Self { values, space }
    }
}

fn two_sided(data: &[Quaternion], src: &Grid, dst: &Grid, sign: f64) -> Vec<Quaternion> {
    let n = src.n;
    let fft = NdFft::new(&src.shape);
    let run = |z: &mut Vec<Complex64>, axes: std::ops::Range<usize>| {
        for a in axes {
            fft.continuous_axis(z, a, sign, src.origin[a], src.spacing[a], dst.origin[a]);
        }
    };
    // right j-kernel: f = (r + j q_j) + i (q_i + j q_k), both brackets commute with e^{jθ}
    let mut c1: Vec<Complex64> = data.iter().map(|q| Complex64::new(q.r, q.j)).collect();
    let mut c2: Vec<Complex64> = data.iter().map(|q| Complex64::new(q.i, q.k)).collect();
    rayon::join(|| run(&mut c1, n..2 * n), || run(&mut c2, n..2 * n));
    // left i-kernel: g = (r + i q_i) + (q_j + i q_k) j
    let mut d1: Vec<Complex64> = c1.iter().zip(&c2).map(|(a, b)| Complex64::new(a.re, b.re)).collect();
    let mut d2: Vec<Complex64> = c1.iter().zip(&c2).map(|(a, b)| Complex64::new(a.im, b.im)).collect();
    drop((c1, c2));
    rayon::join(|| run(&mut d1, 0..n), || run(&mut d2, 0..n));
    d1.iter().zip(&d2).map(|(e1, e2)| Quaternion::new(e1.re, e1.im, e2.re, e2.im)).collect()
}

pub fn qft_forward(f: &QSignal) -> QSpectrum {
    let fg = f.grid.freq_grid();
    let data = two_sided(&f.data, &f.grid, &fg, -1.0);
    QSpectrum { values: QSignal { grid: fg, data }, space: f.grid.clone() }
}

pub fn qft_inverse(spec: &QSpectrum) -> QSignal {
    let data = two_sided(&spec.values.data, &spec.values.grid, &spec.space, 1.0);
    QSignal { grid: spec.space.clone(), data }
}

/// Direct quadrature of the transform at one frequency `w = (u, v)`, kernels in written order.
pub fn qft_at(f: &QSignal, w: &[f64], sign: f64) -> Quaternion {
    let n = f.grid.n;
    let mut x = vec![0.0; f.grid.dims()];
    let mut acc = CompensatedQ::new();
    for (idx, &q) in f.data.iter().enumerate() {
        if q == Quaternion::ZERO {
            continue;
        }
        f.grid.point(idx, &mut x);
        let ux: f64 = (0..n).map(|a| w[a] * x[a]).sum();
        let vy: f64 = (n..2 * n).map(|a| w[a] * x[a]).sum();
        acc.add(Quaternion::exp_i(sign * 2.0 * PI * ux) * q * Quaternion::exp_j(sign * 2.0 * PI * vy));
    }
    acc.value() * f.grid.cell_volume()
}

/// Quadratic-time evaluation of the forward transform on the centered frequency grid.
pub fn qft_reference(f: &QSignal) -> Result<QSpectrum> {
    let nodes = f.grid.len();
    if nodes > REFERENCE_NODE_CAP {
        return Err(Error::GridTooLarge { nodes, cap: REFERENCE_NODE_CAP });
    }
    let fg = f.grid.freq_grid();
    let d = fg.dims();
    let data = (0..nodes)
        .into_par_iter()
        .map(|l| {
            let mut w = vec![0.0; d];
            fg.point(l, &mut w);
            qft_at(f, &w, -1.0)
        })
        .collect();
    Ok(QSpectrum { values: QSignal { grid: fg, data }, space: f.grid.clone() })
}

// e_a · e_b = SIGN[a][b] · e_{PROD[a][b]} for the basis (1, i, j, k)
const PROD: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
const SIGN: [[f64; 4]; 4] =
    [[1., 1., 1., 1.], [1., -1., 1., -1.], [1., -1., -1., 1.], [1., 1., -1., -1.]];

/// Zero-padded linear convolution of quaternion arrays with a fixed left operand, preserving the
/// product order `f(t)·k(x - t)`.
pub(crate) struct PlaneConvolver {
    fft: NdFft,
    shape_f: Vec<usize>,
    shape_k: Vec<usize>,
    f_hat: [Vec<Complex64>; 4],
}

fn embed(src: &[f64], shape: &[usize], pad: &[usize]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); pad.iter().product()];
    let d = shape.len();
    let mut idx = vec![0usize; d];
    for (m, &v) in src.iter().enumerate() {
        let mut rem = m;
        for a in (0..d).rev() {
            idx[a] = rem % shape[a];
            rem /= shape[a];
        }
        let p = idx.iter().zip(pad).fold(0, |acc, (&i, &s)| acc * s + i);
        out[p] = Complex64::new(v, 0.0);
    }
    out
}

impl PlaneConvolver {
    pub fn new(f: &[Vec<f64>; 4], shape_f: &[usize], shape_k: &[usize]) -> Self {
        let pad: Vec<usize> = shape_f.iter().zip(shape_k).map(|(&a, &b)| next_fast_len(a + b - 1)).collect();
        let fft = NdFft::new(&pad);
        let f_hat = std::array::from_fn(|c| {
            let mut z = embed(&f[c], shape_f, &pad);
            fft.process(&mut z, false);
            z
        });
        Self { fft, shape_f: shape_f.to_vec(), shape_k: shape_k.to_vec(), f_hat }
    }

    /// Returns `out[m] = Σ_{m'} f[m']·k[m + offset - m']` for `m` on f's index grid.
    pub fn apply(&self, k: &[Vec<f64>; 4], offset: &[usize]) -> Vec<Quaternion> {
        let pad = self.fft.shape();
        let total = self.fft.len();
        let k_hat: [Vec<Complex64>; 4] = std::array::from_fn(|c| {
            let mut z = embed(&k[c], &self.shape_k, pad);
            self.fft.process(&mut z, false);
            z
        });
        let mut out: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::default(); total]);
        for a in 0..4 {
            for b in 0..4 {
                let (c, s) = (PROD[a][b], SIGN[a][b]);
                let dst = &mut out[c];
                for ((o, x), y) in dst.iter_mut().zip(&self.f_hat[a]).zip(&k_hat[b]) {
                    *o += x * y * s;
                }
            }
        }
        for z in out.iter_mut() {
            self.fft.process(z, true);
        }
        let norm = 1.0 / total as f64;
        let d = self.shape_f.len();
        let count: usize = self.shape_f.iter().product();
        let mut idx = vec![0usize; d];
        (0..count)
            .map(|m| {
                let mut rem = m;
                for a in (0..d).rev() {
                    idx[a] = rem % self.shape_f[a];
                    rem /= self.shape_f[a];
                }
                let p = idx.iter().zip(offset).zip(pad).fold(0, |acc, ((&i, &o), &s)| acc * s + i + o);
                Quaternion::new(out[0][p].re, out[1][p].re, out[2][p].re, out[3][p].re) * norm
            })
            .collect()
    }
}

/// `(f∗g)(x) = Σ_t f(t)·g(x - t) ∏Δt` on f's grid; g must be sampled on a grid of the same spacing
/// that holds x = 0 as a node. Linear (zero-padded), never circular.
pub fn convolve(f: &QSignal, g: &QSignal) -> Result<QSignal> {
    if f.grid.n != g.grid.n || f.grid.spacing != g.grid.spacing {
        return Err(Error::IncompatibleGrids("convolution needs equal n and spacing".into()));
    }
    let mut offset = Vec::with_capacity(g.grid.dims());
    for a in 0..g.grid.dims() {
        let c = -g.grid.origin[a] / g.grid.spacing[a];
        let ci = c.round();
        if (c - ci).abs() > 1e-9 || ci < 0.0 || ci as usize >= g.grid.shape[a] {
            return Err(Error::IncompatibleGrids("second operand's grid must contain x = 0 as a node".into()));
        }
        offset.push(ci as usize);
    }
    let conv = PlaneConvolver::new(&f.planes(), &f.grid.shape, &g.grid.shape);
    let data = conv.apply(&g.planes(), &offset);
    let vol = f.grid.cell_volume();
    Ok(QSignal { grid: f.grid.clone(), data: data.into_iter().map(|q| q * vol).collect() })
}
