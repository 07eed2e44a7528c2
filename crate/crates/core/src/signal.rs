use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::sum::{Compensated, CompensatedQ};

/// Uniform grid on R^(2n). Axes `0..n` pair with the i-kernel, axes `n..2n` with the j-kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("half-dimension n must be at least 1".into()));
        }
        let d = 2 * n;
        if shape.len() != d || spacing.len() != d || origin.len() != d {
            return Err(Error::InvalidParameter(format!(
                "grid descriptors must have {d} entries (shape {}, spacing {}, origin {})",
                shape.len(),
                spacing.len(),
                origin.len()
            )));
        }
        if shape.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter("grid extents must be positive".into()));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter("grid spacing must be positive and finite".into()));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::InvalidParameter("grid node count overflows".into()))?;
        Ok(Self { n, shape, spacing, origin })
    }

    /// Same extent and spacing on every axis, origin at `-⌊N/2⌋·Δx` so that x = 0 is a node.
    pub fn centered(n: usize, size: usize, spacing: f64) -> Result<Self> {
        Self::centered_with(n, vec![size; 2 * n], vec![spacing; 2 * n])
    }

    pub fn centered_with(n: usize, shape: Vec<usize>, spacing: Vec<f64>) -> Result<Self> {
        let origin = shape.iter().zip(&spacing).map(|(&s, &h)| -((s / 2) as f64) * h).collect();
        Self::new(n, shape, spacing, origin)
    }

    pub fn dims(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn coord(&self, axis: usize, idx: usize) -> f64 {
        self.origin[axis] + idx as f64 * self.spacing[axis]
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut st = vec![1; self.shape.len()];
        for a in (0..self.shape.len().saturating_sub(1)).rev() {
            st[a] = st[a + 1] * self.shape[a + 1];
        }
        st
    }

    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.shape.len()).rev() {
            out[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
    }

    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for a in (0..self.shape.len()).rev() {
            let idx = rem % self.shape[a];
            rem /= self.shape[a];
            out[a] = self.coord(a, idx);
        }
    }

    /// Centered frequency grid: `w_k = (k - ⌊N/2⌋)/(N·Δx)`.
    pub fn freq_grid(&self) -> Grid {
        let spacing: Vec<f64> =
            self.shape.iter().zip(&self.spacing).map(|(&s, &h)| 1.0 / (s as f64 * h)).collect();
        let origin = self.shape.iter().zip(&spacing).map(|(&s, &dw)| -((s / 2) as f64) * dw).collect();
        Grid { n: self.n, shape: self.shape.clone(), spacing, origin }
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n == other.n && self.shape == other.shape && self.spacing == other.spacing
    }

    /// True when every axis holds x = 0 at index `⌊N/2⌋`.
    pub fn is_origin_centered(&self) -> bool {
        self.shape.iter().zip(&self.spacing).zip(&self.origin).all(|((&s, &h), &o)| {
            let expect = -((s / 2) as f64) * h;
            (o - expect).abs() <= 1e-12 * h.max(o.abs())
        })
    }

    /// Index of the node at `-x` along one axis of an origin-centered grid (periodic partner for the
    /// unmatched boundary node of even extents).
    pub fn reflect_index(&self, axis: usize, idx: usize) -> usize {
        let s = self.shape[axis];
        (2 * (s / 2) + s - idx) % s
    }

    pub fn check_layout(&self, other: &Grid) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::IncompatibleGrids(format!(
                "shape {:?} spacing {:?} vs shape {:?} spacing {:?}",
                self.shape, self.spacing, other.shape, other.spacing
            )))
        }
    }
}

/// Quaternion-valued samples on a [`Grid`], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QSignal {
    pub grid: Grid,
    pub data: Vec<Quaternion>,
}

impl QSignal {
    pub fn new(grid: Grid, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "data length {} does not match grid node count {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Grid) -> Self {
        let data = vec![Quaternion::ZERO; grid.len()];
        Self { grid, data }
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Quaternion + Sync,
    {
        let d = grid.dims();
        let data = (0..grid.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; d],
                |x, idx| {
                    grid.point(idx, x);
                    f(x)
                },
            )
            .collect();
        Self { grid, data }
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn shape(&self) -> &[usize] {
        &self.grid.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.grid.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.grid.origin
    }

    pub fn planes(&self) -> [Vec<f64>; 4] {
        let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(self.data.len()));
        for q in &self.data {
            for (p, x) in out.iter_mut().zip(q.to_array()) {
                p.push(x);
            }
        }
        out
    }

    pub fn from_planes(grid: Grid, planes: &[Vec<f64>; 4]) -> Result<Self> {
        let data = (0..planes[0].len())
            .map(|m| Quaternion::new(planes[0][m], planes[1][m], planes[2][m], planes[3][m]))
            .collect();
        Self::new(grid, data)
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        Self { grid: self.grid.clone(), data: self.data.iter().map(|&q| f(q)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    pub fn left_mul(&self, a: Quaternion) -> Self {
        self.map(|q| a * q)
    }

    pub fn right_mul(&self, a: Quaternion) -> Self {
        self.map(|q| q * a)
    }

    pub fn add(&self, other: &QSignal) -> Result<Self> {
        self.grid.check_layout(&other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Ok(Self { grid: self.grid.clone(), data })
    }

    pub fn sub(&self, other: &QSignal) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).collect::<Compensated>().value() * self.grid.cell_volume()
    }
}

/// Riemann-sum L^p norm; `p = f64::INFINITY` gives the maximum modulus.
pub fn lp_norm(f: &QSignal, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("L^p norm needs p >= 1, got {p}")));
    }
    let m = f.data.iter().map(|q| q.abs()).fold(0.0, f64::max);
    if p.is_infinite() || m == 0.0 {
        return Ok(m);
    }
    let s: Compensated = f.data.iter().map(|q| (q.abs() / m).powf(p)).collect();
    Ok(m * (s.value() * f.grid.cell_volume()).powf(1.0 / p))
}

/// `Σ f(x)·conj(g(x)) ∏Δx`.
pub fn inner_q(f: &QSignal, g: &QSignal) -> Result<Quaternion> {
    f.grid.check_layout(&g.grid)?;
    let mut acc = CompensatedQ::new();
    for (&a, &b) in f.data.iter().zip(&g.data) {
        acc.add(a * b.conj());
    }
    Ok(acc.value() * f.grid.cell_volume())
}

pub fn inner_sc(f: &QSignal, g: &QSignal) -> Result<f64> {
    Ok(inner_q(f, g)?.sc())
}
