//! Forward and inverse continuous quaternion shearlet transform on a discretised group.
//!
//! Slices are `SH f(a, s, ·) = f ∗ ψ*_{a,s,0}` sampled on f's grid. Sampled generators use a
//! zero-padded quaternion convolution; Fourier-multiplier generators (real, separately even ψ) act
//! on each real component plane through their classical spectrum `|a|^{1-1/4n} M(A_aᵀS_sᵀξ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atoms::{check_commutation, grid_density, make_atom, synthesize_atom, ShearletGenerator};
use crate::error::{Error, Result};
use crate::fft::{fft_freq, next_fast_len, NdFft};
use crate::group::{apply_at_st_into, apply_inv_sa_into, GroupPoint, ParamGrid};
use crate::qft::{qft_forward, PlaneConvolver};
use crate::quaternion::Quaternion;
use crate::signal::{inner_q, Grid, QSignal};
use crate::sum::{Compensated, CompensatedQ};

/// Coefficients `SH_ψ f(a, s, t)`: one slice over f's grid per (a, s) node, a-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffStack {
    pub pg: ParamGrid,
    pub grid: Grid,
    pub slices: Vec<Vec<Quaternion>>,
    pub generator: String,
    pub params: Vec<(String, f64)>,
    pub c_grid: f64,
    /// Width in nodes of the band along each face where atoms reach past the grid.
    pub border: usize,
}

impl CoeffStack {
    pub fn slice(&self, idx: usize) -> QSignal {
        QSignal { grid: self.grid.clone(), data: self.slices[idx].clone() }
    }

    /// Haar measure of one (a, s, t) cell.
    pub fn cell_measure(&self, idx: usize) -> f64 {
        self.pg.weights[idx] * self.grid.cell_volume()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.slices.iter_mut().flatten().for_each(|q| *q = *q * c);
        out
    }

    pub fn check_compatible(&self, other: &CoeffStack) -> Result<()> {
        if self.pg.weights != other.pg.weights || !self.grid.same_layout(&other.grid) {
            return Err(Error::IncompatibleGrids("coefficient stacks live on different grids".into()));
        }
        Ok(())
    }
}

fn border_width(psi: &ShearletGenerator, pg: &ParamGrid, grid: &Grid) -> usize {
    let n = pg.n;
    let reach = (0..pg.len())
        .map(|idx| {
            let (a, s) = pg.node(idx);
            let b = a.abs().powf(1.0 / (2 * n) as f64);
            a.abs().max(b * (1.0 + s.iter().map(|x| x.abs()).sum::<f64>()))
        })
        .fold(0.0, f64::max);
    let h = grid.spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let half = grid.shape.iter().min().copied().unwrap_or(0) / 2;
    ((psi.support_radius * reach / h).ceil() as usize).min(half)
}

/// Frequencies of the padded FFT bins, per axis.
fn bin_freqs(pad: &[usize], spacing: &[f64]) -> Vec<Vec<f64>> {
    pad.iter().zip(spacing).map(|(&p, &h)| (0..p).map(|l| fft_freq(l, p, h)).collect()).collect()
}

fn multiplier_on_bins(psi: &ShearletGenerator, a: f64, s: &[f64], freqs: &[Vec<f64>], pad: &[usize]) -> Vec<f64> {
    let d = pad.len();
    let amp = a.abs().powf(1.0 - 1.0 / (4 * psi.n) as f64);
    let total: usize = pad.iter().product();
    let mut xi = vec![0.0; d];
    let mut lam = vec![0.0; d];
    let mut out = Vec::with_capacity(total);
    for m in 0..total {
        let mut rem = m;
        for ax in (0..d).rev() {
            xi[ax] = freqs[ax][rem % pad[ax]];
            rem /= pad[ax];
        }
        apply_at_st_into(a, s, &xi, &mut lam);
        out.push(psi.star_spectrum(&lam).r * amp);
    }
    // even pads leave the Nyquist bins unpaired; averaging with the mirrored bin keeps the kernel real
    let mut idx = vec![0usize; d];
    (0..total)
        .map(|m| {
            let mut rem = m;
            for ax in (0..d).rev() {
                idx[ax] = (pad[ax] - rem % pad[ax]) % pad[ax];
                rem /= pad[ax];
            }
            let mirror = idx.iter().zip(pad).fold(0, |acc, (&i, &p)| acc * p + i);
            0.5 * (out[m] + out[mirror])
        })
        .collect()
}

fn pack(data: &[Quaternion], shape: &[usize], pad: &[usize]) -> [Vec<Complex64>; 2] {
    let total: usize = pad.iter().product();
    let mut out = [vec![Complex64::default(); total], vec![Complex64::default(); total]];
    let d = shape.len();
    let mut idx = vec![0usize; d];
    for (m, q) in data.iter().enumerate() {
        let mut rem = m;
        for a in (0..d).rev() {
            idx[a] = rem % shape[a];
            rem /= shape[a];
        }
        let p = idx.iter().zip(pad).fold(0, |acc, (&i, &s)| acc * s + i);
        out[0][p] = Complex64::new(q.r, q.i);
        out[1][p] = Complex64::new(q.j, q.k);
    }
    out
}

fn unpack(z: &[Vec<Complex64>; 2], shape: &[usize], pad: &[usize], scale: f64) -> Vec<Quaternion> {
    let d = shape.len();
    let count: usize = shape.iter().product();
    let mut idx = vec![0usize; d];
    (0..count)
        .map(|m| {
            let mut rem = m;
            for a in (0..d).rev() {
                idx[a] = rem % shape[a];
                rem /= shape[a];
            }
            let p = idx.iter().zip(pad).fold(0, |acc, (&i, &s)| acc * s + i);
            Quaternion::new(z[0][p].re, z[0][p].im, z[1][p].re, z[1][p].im) * scale
        })
        .collect()
}

/// Samples `ψ_{a,s,0}(x)` (or `conj ψ_{a,s,0}(-x)`) on the difference grid `(j - (N-1))Δ`.
fn kernel_planes(psi: &ShearletGenerator, grid: &Grid, a: f64, s: &[f64], kshape: &[usize], reflect_conj: bool) -> [Vec<f64>; 4] {
    let d = grid.dims();
    let amp = a.abs().powf(1.0 / (4 * psi.n) as f64 - 1.0);
    let total: usize = kshape.iter().product();
    let mut planes: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(total));
    let mut x = vec![0.0; d];
    let mut z = vec![0.0; d];
    for m in 0..total {
        let mut rem = m;
        for ax in (0..d).rev() {
            let j = rem % kshape[ax];
            rem /= kshape[ax];
            let off = j as f64 - ((kshape[ax] - 1) / 2) as f64;
            x[ax] = if reflect_conj { -off } else { off } * grid.spacing[ax];
        }
        apply_inv_sa_into(a, s, &x, &mut z);
        let mut q = psi.eval(&z).expect("sampled generator") * amp;
        if reflect_conj {
            q = q.conj();
        }
        for (p, v) in planes.iter_mut().zip(q.to_array()) {
            p.push(v);
        }
    }
    planes
}

enum Engine {
    Sampled {
        conv: PlaneConvolver,
        kshape: Vec<usize>,
        offset: Vec<usize>,
    },
    Multiplier {
        fft: NdFft,
        pad: Vec<usize>,
        freqs: Vec<Vec<f64>>,
        f_hat: [Vec<Complex64>; 2],
    },
}

struct Slicer<'a> {
    psi: &'a ShearletGenerator,
    grid: Grid,
    engine: Engine,
}

impl<'a> Slicer<'a> {
    fn new(f: &QSignal, psi: &'a ShearletGenerator) -> Self {
        let grid = f.grid.clone();
        let engine = if psi.is_analytic() {
            let kshape: Vec<usize> = grid.shape.iter().map(|&s| 2 * s - 1).collect();
            let offset = grid.shape.iter().map(|&s| s - 1).collect();
            Engine::Sampled { conv: PlaneConvolver::new(&f.planes(), &grid.shape, &kshape), kshape, offset }
        } else {
            let pad: Vec<usize> = grid.shape.iter().map(|&s| next_fast_len(2 * s)).collect();
            let fft = NdFft::new(&pad);
            let mut f_hat = pack(&f.data, &grid.shape, &pad);
            f_hat.iter_mut().for_each(|z| fft.process(z, false));
            let freqs = bin_freqs(&pad, &grid.spacing);
            Engine::Multiplier { fft, pad, freqs, f_hat }
        };
        Self { psi, grid, engine }
    }

    fn slice(&self, a: f64, s: &[f64]) -> Vec<Quaternion> {
        self.slice_with_multiplier(a, s).0
    }

    /// The slice, plus the bin multiplier when the engine is spectral.
    fn slice_with_multiplier(&self, a: f64, s: &[f64]) -> (Vec<Quaternion>, Option<Vec<f64>>) {
        match &self.engine {
            Engine::Sampled { conv, kshape, offset } => {
                let k = kernel_planes(self.psi, &self.grid, a, s, kshape, true);
                let vol = self.grid.cell_volume();
                (conv.apply(&k, offset).into_iter().map(|q| q * vol).collect(), None)
            }
            Engine::Multiplier { fft, pad, freqs, f_hat } => {
                let mult = multiplier_on_bins(self.psi, a, s, freqs, pad);
                let mut z: [Vec<Complex64>; 2] =
                    std::array::from_fn(|c| f_hat[c].iter().zip(&mult).map(|(x, &m)| x * m).collect());
                z.iter_mut().for_each(|v| fft.process(v, true));
                (unpack(&z, &self.grid.shape, pad, 1.0 / fft.len() as f64), Some(mult))
            }
        }
    }
}

/// Accumulates `Σ weight·(SH(a,s,·) ∗ ψ_{a,s,0})` slice by slice.
struct Synthesizer<'a> {
    psi: &'a ShearletGenerator,
    grid: Grid,
    acc: SynthAcc,
}

enum SynthAcc {
    Spatial(Vec<Quaternion>),
    Spectral { fft: NdFft, pad: Vec<usize>, freqs: Vec<Vec<f64>>, acc: [Vec<Complex64>; 2] },
}

impl<'a> Synthesizer<'a> {
    fn new(grid: &Grid, psi: &'a ShearletGenerator) -> Self {
        let acc = if psi.is_analytic() {
            SynthAcc::Spatial(vec![Quaternion::ZERO; grid.len()])
        } else {
            let pad: Vec<usize> = grid.shape.iter().map(|&s| next_fast_len(2 * s)).collect();
            let total = pad.iter().product();
            let freqs = bin_freqs(&pad, &grid.spacing);
            SynthAcc::Spectral {
                fft: NdFft::new(&pad),
                pad,
                freqs,
                acc: [vec![Complex64::default(); total], vec![Complex64::default(); total]],
            }
        };
        Self { psi, grid: grid.clone(), acc }
    }

    fn add(&mut self, a: f64, s: &[f64], weight: f64, slice: &[Quaternion], mult: Option<&[f64]>) {
        match &mut self.acc {
            SynthAcc::Spatial(acc) => {
                let sig = QSignal { grid: self.grid.clone(), data: slice.to_vec() };
                let kshape: Vec<usize> = self.grid.shape.iter().map(|&s| 2 * s - 1).collect();
                let offset: Vec<usize> = self.grid.shape.iter().map(|&s| s - 1).collect();
                let k = kernel_planes(self.psi, &self.grid, a, s, &kshape, false);
                let conv = PlaneConvolver::new(&sig.planes(), &self.grid.shape, &kshape);
                let w = weight * self.grid.cell_volume();
                for (o, q) in acc.iter_mut().zip(conv.apply(&k, &offset)) {
                    *o += q * w;
                }
            }
            SynthAcc::Spectral { fft, pad, freqs, acc } => {
                let owned;
                let mult = match mult {
                    Some(m) => m,
                    None => {
                        owned = multiplier_on_bins(self.psi, a, s, freqs, pad);
                        &owned
                    }
                };
                let mut z = pack(slice, &self.grid.shape, pad);
                z.iter_mut().for_each(|v| fft.process(v, false));
                for c in 0..2 {
                    for ((o, x), &m) in acc[c].iter_mut().zip(&z[c]).zip(mult) {
                        if m != 0.0 {
                            *o += x * (m * weight);
                        }
                    }
                }
            }
        }
    }

    fn merge(&mut self, other: Synthesizer<'a>) {
        match (&mut self.acc, other.acc) {
            (SynthAcc::Spatial(a), SynthAcc::Spatial(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (SynthAcc::Spectral { acc: a, .. }, SynthAcc::Spectral { acc: b, .. }) => {
                for c in 0..2 {
                    a[c].iter_mut().zip(&b[c]).for_each(|(x, y)| *x += y);
                }
            }
            _ => unreachable!("accumulators share a generator"),
        }
    }

    fn finish(self, c_grid: f64) -> QSignal {
        let data = match self.acc {
            SynthAcc::Spatial(acc) => acc.into_iter().map(|q| q * (1.0 / c_grid)).collect(),
            SynthAcc::Spectral { fft, pad, mut acc, .. } => {
                acc.iter_mut().for_each(|v| fft.process(v, true));
                unpack(&acc, &self.grid.shape, &pad, 1.0 / (fft.len() as f64 * c_grid))
            }
        };
        QSignal { grid: self.grid, data }
    }
}

/// Number of slices handled per deterministic accumulation chunk.
const CHUNK: usize = 16;

fn truncated_constant(psi: &ShearletGenerator, pg: &ParamGrid) -> Result<f64> {
    let c = {
        let mut e1 = vec![0.0; 2 * pg.n];
        e1[0] = 1.0;
        crate::atoms::admissibility_group(psi, pg, &e1)?
    };
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidConstant(c));
    }
    Ok(c)
}

fn check_inputs(f: &QSignal, psi: &ShearletGenerator, pg: &ParamGrid) -> Result<()> {
    if f.grid.n != psi.n || pg.n != psi.n {
        return Err(Error::IncompatibleGrids(format!(
            "signal n = {}, generator n = {}, parameter grid n = {}",
            f.grid.n, psi.n, pg.n
        )));
    }
    let report = check_commutation(psi, 64);
    if !report.pass {
        return Err(Error::CommutationRefused { violation: report.max_violation });
    }
    Ok(())
}

/// Forward transform over every (a, s) node of `pg`; also stores the truncation-consistent
/// constant `C_ψ^grid`.
pub fn sh_forward(f: &QSignal, psi: &ShearletGenerator, pg: &ParamGrid) -> Result<CoeffStack> {
    check_inputs(f, psi, pg)?;
    let c_grid = truncated_constant(psi, pg)?;
    let slicer = Slicer::new(f, psi);
    let slices = (0..pg.len())
        .into_par_iter()
        .map(|idx| {
            let (a, s) = pg.node(idx);
            slicer.slice(a, s)
        })
        .collect();
    Ok(CoeffStack {
        pg: pg.clone(),
        grid: f.grid.clone(),
        slices,
        generator: psi.name.clone(),
        params: psi.params.clone(),
        c_grid,
        border: border_width(psi, pg, &f.grid),
    })
}

/// `⟨f, ψ_{a,s,t}⟩` by direct quadrature against the sampled atom.
pub fn sh_direct(f: &QSignal, psi: &ShearletGenerator, g: &GroupPoint) -> Result<Quaternion> {
    inner_q(f, &make_atom(psi, g, &f.grid)?)
}

/// `Σ weight(a,s)·‖slice‖₂²`.
pub fn energy_mu(c: &CoeffStack) -> f64 {
    let vol = c.grid.cell_volume();
    let parts: Vec<f64> = c
        .slices
        .iter()
        .zip(&c.pg.weights)
        .map(|(s, &w)| w * vol * s.iter().map(|q| q.norm_sqr()).collect::<Compensated>().value())
        .collect();
    crate::sum::sum(parts)
}

/// `⟨c₁, c₂⟩_μ = Σ weight·∏Δt·c₁·conj(c₂)`.
pub fn inner_mu(c1: &CoeffStack, c2: &CoeffStack) -> Result<Quaternion> {
    c1.check_compatible(c2)?;
    let mut acc = CompensatedQ::new();
    for (idx, (s1, s2)) in c1.slices.iter().zip(&c2.slices).enumerate() {
        let w = c1.cell_measure(idx);
        let mut part = CompensatedQ::new();
        for (&p, &q) in s1.iter().zip(s2) {
            part.add(p * q.conj());
        }
        acc.add(part.value() * w);
    }
    Ok(acc.value())
}

/// Fourier-side energy `∫ |F_Q f(w)|²·Δ_grid(w) dw` on f's frequency grid.
pub fn energy_oracle(f: &QSignal, psi: &ShearletGenerator, pg: &ParamGrid) -> f64 {
    let spec = qft_forward(f);
    let fg = spec.values.grid.clone();
    let d = fg.dims();
    let parts: Vec<f64> = spec
        .values
        .data
        .par_iter()
        .enumerate()
        .map_init(
            || vec![0.0; d],
            |w, (m, q)| {
                let e = q.norm_sqr();
                if e == 0.0 {
                    return 0.0;
                }
                fg.point(m, w);
                e * grid_density(psi, pg, w)
            },
        )
        .collect();
    crate::sum::sum(parts) * fg.cell_volume()
}

/// `(1/C_ψ^grid) Σ weight·Σ_t ∏Δt·SH(a,s,t)·ψ_{a,s,t}` on the stack's grid.
pub fn sh_reconstruct(c: &CoeffStack, psi: &ShearletGenerator) -> Result<QSignal> {
    if !(c.c_grid > 0.0 && c.c_grid.is_finite()) {
        return Err(Error::InvalidConstant(c.c_grid));
    }
    if psi.n != c.pg.n {
        return Err(Error::IncompatibleGrids("generator and stack disagree on n".into()));
    }
    let chunks: Vec<Synthesizer> = (0..c.pg.len())
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|ids| {
            let mut syn = Synthesizer::new(&c.grid, psi);
            for &idx in ids {
                let (a, s) = c.pg.node(idx);
                syn.add(a, s, c.pg.weights[idx], &c.slices[idx], None);
            }
            syn
        })
        .collect();
    let mut it = chunks.into_iter();
    let mut total = it.next().expect("parameter grid is non-empty");
    for s in it {
        total.merge(s);
    }
    Ok(total.finish(c.c_grid))
}

/// Result of a streamed analysis–synthesis pass that never holds the full stack.
#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub reconstruction: QSignal,
    pub energy_mu: f64,
    pub c_grid: f64,
}

pub fn sh_roundtrip(f: &QSignal, psi: &ShearletGenerator, pg: &ParamGrid) -> Result<RoundTrip> {
    check_inputs(f, psi, pg)?;
    let c_grid = truncated_constant(psi, pg)?;
    let slicer = Slicer::new(f, psi);
    let vol = f.grid.cell_volume();
    let chunks: Vec<(Synthesizer, f64)> = (0..pg.len())
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|ids| {
            let mut syn = Synthesizer::new(&f.grid, psi);
            let mut energy = Compensated::new();
            for &idx in ids {
                let (a, s) = pg.node(idx);
                let (slice, mult) = slicer.slice_with_multiplier(a, s);
                energy.add(pg.weights[idx] * vol * slice.iter().map(|q| q.norm_sqr()).collect::<Compensated>().value());
                syn.add(a, s, pg.weights[idx], &slice, mult.as_deref());
            }
            (syn, energy.value())
        })
        .collect();
    let mut energy = Compensated::new();
    let mut it = chunks.into_iter();
    let (mut total, e0) = it.next().expect("parameter grid is non-empty");
    energy.add(e0);
    for (s, e) in it {
        total.merge(s);
        energy.add(e);
    }
    Ok(RoundTrip { reconstruction: total.finish(c_grid), energy_mu: energy.value(), c_grid })
}

fn cone_nodes(n: usize, cycles: f64) -> usize {
    if n == 1 {
        ((8.0 * cycles) as usize).clamp(200, 2000)
    } else {
        ((4.0 * cycles) as usize).clamp(16, 40)
    }
}

/// `K_ψ(g, g') = ⟨ψ_g, ψ_{g'}⟩ / C_ψ^grid`.
///
/// Sampled generators pair atoms on `grid`; cone-supported multipliers integrate
/// `ψ̂_g·conj(ψ̂_{g'})` over the spectral cone of `ψ_g` with a trapezoid rule in log-radius and
/// slope coordinates.
pub fn kernel(psi: &ShearletGenerator, c_grid: f64, grid: &Grid, g: &GroupPoint, g2: &GroupPoint) -> Result<Quaternion> {
    if !(c_grid > 0.0 && c_grid.is_finite()) {
        return Err(Error::InvalidConstant(c_grid));
    }
    if psi.is_analytic() {
        return Ok(inner_q(&make_atom(psi, g, grid)?, &make_atom(psi, g2, grid)?)? * (1.0 / c_grid));
    }
    let cone = psi.cone.ok_or_else(|| Error::InvalidParameter(format!("generator `{}` has no spectral cone", psi.name)))?;
    let n = psi.n;
    let d = 2 * n;
    let b = crate::group::minor_scale(g.a, n);
    let amp = (g.a.abs() * g2.a.abs()).powf(1.0 - 1.0 / (4 * n) as f64) / crate::group::det_sa(g.a, n);
    let dt: Vec<f64> = g.t.iter().zip(&g2.t).map(|(p, q)| p - q).collect();
    // largest |ξ| on the cone bounds the phase rate
    let xi_max = cone.hi / g.a.abs() + cone.hi * (1.0 + cone.slope) / b.abs() + cone.hi * g.s.iter().map(|x| x.abs()).sum::<f64>() / g.a.abs();
    let cycles = dt.iter().map(|x| x.abs()).sum::<f64>() * xi_max * (cone.hi / cone.lo).ln().max(1.0);
    let k = cone_nodes(n, cycles);
    let (v0, v1) = (cone.lo.ln(), cone.hi.ln());
    let hv = (v1 - v0) / (k + 1) as f64;
    let hr = 2.0 / (k + 1) as f64;
    let inner_dims = d - 1;
    let inner_count = k.pow(inner_dims as u32);
    let mut acc = Compensated::new();
    let mut lam = vec![0.0; d];
    let mut xi = vec![0.0; d];
    let mut lam2 = vec![0.0; d];
    for sign in [-1.0, 1.0] {
        for iv in 1..=k {
            let l1 = sign * (v0 + iv as f64 * hv).exp();
            let jac = l1.abs().powi(d as i32) * cone.slope.powi(inner_dims as i32);
            for ir in 0..inner_count {
                let mut rem = ir;
                lam[0] = l1;
                for p in 1..d {
                    let r = -1.0 + ((rem % k) + 1) as f64 * hr;
                    rem /= k;
                    lam[p] = l1 * cone.slope * r;
                }
                let m1 = psi.star_spectrum(&lam).r;
                if m1 == 0.0 {
                    continue;
                }
                // ξ = (A_aᵀ S_sᵀ)^{-1} λ
                xi[0] = lam[0] / g.a;
                for p in 1..d {
                    xi[p] = lam[p] / b - g.s[p - 1] * xi[0];
                }
                apply_at_st_into(g2.a, &g2.s, &xi, &mut lam2);
                let m2 = psi.star_spectrum(&lam2).r;
                if m2 == 0.0 {
                    continue;
                }
                let phase = -2.0 * PI * xi.iter().zip(&dt).map(|(p, q)| p * q).sum::<f64>();
                acc.add(m1 * m2 * phase.cos() * jac);
            }
        }
    }
    let val = acc.value() * hv * hr.powi(inner_dims as i32) * amp;
    Ok(Quaternion::real(val / c_grid))
}

/// `K_ψ(g, ·)` on every cell of `pg × grid`, computed as `SH_ψ(ψ_g)/C_ψ^grid`.
pub fn kernel_field(psi: &ShearletGenerator, pg: &ParamGrid, grid: &Grid, g: &GroupPoint) -> Result<CoeffStack> {
    let atom = synthesize_atom(psi, g, grid)?;
    let stack = sh_forward(&atom, psi, pg)?;
    let c = stack.c_grid;
    Ok(stack.scale(1.0 / c))
}

/// `⟨SH f, K(g, ·)⟩_μ = Σ weight·∏Δt·SH f(g')·conj(K(g, g'))`.
pub fn reproduce(c: &CoeffStack, kfield: &CoeffStack) -> Result<Quaternion> {
    inner_mu(c, kfield)
}
