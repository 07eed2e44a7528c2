//! Shearlet generators, atoms `ψ_{a,s,t}`, the reflection `ψ*`, and admissibility estimators.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::group::{apply_at_st_into, apply_inv_sa_into, GroupPoint, ParamGrid};
use crate::qft::{qft_at, qft_forward};
use crate::quaternion::Quaternion;
use crate::signal::{lp_norm, Grid, QSignal};
use crate::sum::Compensated;

pub type Field = Arc<dyn Fn(&[f64]) -> Quaternion + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    AnalyticSample,
    FourierMultiplier,
}

/// A mother shearlet ψ, given either by point evaluation or by its spectrum `F_Q(ψ*)`.
#[derive(Clone)]
pub struct ShearletGenerator {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub n: usize,
    pub kind: GeneratorKind,
    /// Built as `g₁ + j g₂` with real `g₁, g₂` even in the x-block.
    pub structural: bool,
    /// Radius beyond which ψ is negligible in space.
    pub support_radius: f64,
    /// Spectral support cone of a multiplier, when known.
    pub cone: Option<Cone>,
    eval: Option<Field>,
    spectrum: Option<Field>,
    l2_norm: Option<f64>,
    probe: Arc<OnceLock<QSignal>>,
}

impl fmt::Debug for ShearletGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShearletGenerator")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("structural", &self.structural)
            .finish()
    }
}

/// `{lo < |λ₁| < hi, |λ_p| < slope·|λ₁|}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
}

const VALIDATION_TOL: f64 = 1e-12;

impl ShearletGenerator {
    pub fn analytic(name: impl Into<String>, n: usize, eval: Field) -> Self {
        Self {
            name: name.into(),
            params: Vec::new(),
            n,
            kind: GeneratorKind::AnalyticSample,
            structural: false,
            support_radius: 6.0,
            cone: None,
            eval: Some(eval),
            spectrum: None,
            l2_norm: None,
            probe: Arc::default(),
        }
    }

    /// A generator known through `F_Q(ψ*)`. The spectrum must be real-valued and even in each
    /// coordinate block, i.e. ψ is real and separately even.
    pub fn multiplier(name: impl Into<String>, n: usize, spectrum: Field) -> Result<Self> {
        let name = name.into();
        let mut rng = ChaCha8Rng::seed_from_u64(0x3a7e);
        let mut lam = vec![0.0; 2 * n];
        for _ in 0..256 {
            lam.iter_mut().for_each(|x| *x = rng.gen_range(-3.0..3.0));
            let m = spectrum(&lam);
            let scale = m.abs().max(1.0);
            if m.i.abs() + m.j.abs() + m.k.abs() > VALIDATION_TOL * scale {
                return Err(Error::InvalidParameter(format!("multiplier `{name}` must be real-valued")));
            }
            for block in [0..n, n..2 * n] {
                let mut refl = lam.clone();
                refl[block].iter_mut().for_each(|x| *x = -*x);
                if (spectrum(&refl) - m).abs() > VALIDATION_TOL * scale {
                    return Err(Error::InvalidParameter(format!("multiplier `{name}` must be even in each block")));
                }
            }
        }
        Ok(Self {
            name,
            params: Vec::new(),
            n,
            kind: GeneratorKind::FourierMultiplier,
            structural: true,
            support_radius: 6.0,
            cone: None,
            eval: None,
            spectrum: Some(spectrum),
            l2_norm: None,
            probe: Arc::default(),
        })
    }

    pub fn with_spectrum(mut self, spectrum: Field) -> Self {
        self.spectrum = Some(spectrum);
        self
    }

    pub fn with_l2_norm(mut self, norm: f64) -> Self {
        self.l2_norm = Some(norm);
        self
    }

    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn with_cone(mut self, cone: Cone) -> Self {
        self.cone = Some(cone);
        self
    }

    pub fn with_support_radius(mut self, r: f64) -> Self {
        self.support_radius = r;
        self
    }

    /// Marks the generator as `g₁ + j g₂` with both parts even in x, after checking it on the probe
    /// grid.
    pub fn structural(mut self) -> Result<Self> {
        if self.kind == GeneratorKind::AnalyticSample {
            let p = self.probe_signal();
            let scale = p.data.iter().map(|q| q.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let mut idx = vec![0usize; p.grid.dims()];
            for (m, q) in p.data.iter().enumerate() {
                if (q.i.abs() + q.k.abs()) > VALIDATION_TOL * scale {
                    return Err(Error::InvalidParameter("structural generator must lie in span{1, j}".into()));
                }
                p.grid.unravel(m, &mut idx);
                for a in 0..self.n {
                    idx[a] = p.grid.reflect_index(a, idx[a]);
                }
                let r = idx.iter().zip(&p.grid.shape).fold(0, |acc, (&i, &s)| acc * s + i);
                if (p.data[r] - *q).abs() > VALIDATION_TOL * scale {
                    return Err(Error::InvalidParameter("structural generator must be even in x".into()));
                }
            }
        }
        self.structural = true;
        Ok(self)
    }

    pub fn is_analytic(&self) -> bool {
        self.kind == GeneratorKind::AnalyticSample
    }

    pub fn has_spectrum(&self) -> bool {
        self.spectrum.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> Option<Quaternion> {
        self.eval.as_ref().map(|f| f(x))
    }

    /// Odd, origin-symmetric probe grid on which ψ is resolved.
    pub fn probe_grid(&self) -> Grid {
        let nodes = match self.n {
            1 => 129,
            2 => 25,
            _ => 9,
        };
        Grid::centered(self.n, nodes, 2.0 * self.support_radius / (nodes - 1) as f64).expect("valid probe grid")
    }

    fn probe_signal(&self) -> &QSignal {
        self.probe.get_or_init(|| {
            let f = self.eval.clone().expect("probe needs an evaluator");
            QSignal::from_fn(self.probe_grid(), move |x| f(x))
        })
    }

    /// `F_Q(ψ*)(λ)`: closed form when known, otherwise quadrature on the probe grid.
    pub fn star_spectrum(&self, lambda: &[f64]) -> Quaternion {
        match &self.spectrum {
            Some(s) => s(lambda),
            None => {
                let star_probe = star(self.probe_signal()).expect("probe grid is centered");
                qft_at(&star_probe, lambda, -1.0)
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        if let Some(v) = self.l2_norm {
            return v;
        }
        match self.kind {
            GeneratorKind::AnalyticSample => lp_norm(self.probe_signal(), 2.0).expect("p = 2"),
            GeneratorKind::FourierMultiplier => {
                let fg = Grid::centered(self.n, if self.n == 1 { 512 } else { 32 }, 16.0 / 512.0).expect("grid");
                let sp = QSignal::from_fn(fg, |l| self.star_spectrum(l));
                lp_norm(&sp, 2.0).expect("p = 2")
            }
        }
    }

    /// The generator `c·ψ`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.eval = self.eval.clone().map(|f| Arc::new(move |x: &[f64]| f(x) * c) as Field);
        out.spectrum = self.spectrum.clone().map(|f| Arc::new(move |x: &[f64]| f(x) * c) as Field);
        out.l2_norm = Some(self.l2_norm() * c.abs());
        out.probe = Arc::default();
        out.params.push(("gain".into(), c));
        out
    }
}

/// `exp(1 - 1/(1 - u²))` on `|u| < 1`, zero elsewhere; equals 1 at `u = 0`.
pub fn bump(u: f64) -> f64 {
    let v = 1.0 - u * u;
    if v <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / v).exp()
    }
}

/// Trapezoid rule for `∫_{-1}^{1} f`, exact to rounding for smooth integrands vanishing at ±1.
pub(crate) fn bump_integral(f: impl Fn(f64) -> f64) -> f64 {
    let m = 20_000;
    let h = 2.0 / m as f64;
    (1..m).map(|k| f(-1.0 + k as f64 * h)).collect::<Compensated>().value() * h
}

/// Wedge multiplier `gain·bump(log₂|λ₁|/octaves)·∏ bump(λ_p/(slope·λ₁))`, supported in
/// `{2^{-octaves} < |λ₁| < 2^{octaves}, |λ_p| < slope·|λ₁|}`.
pub fn wedge(n: usize, octaves: f64, slope: f64) -> Result<ShearletGenerator> {
    if !(octaves > 0.0 && slope > 0.0 && octaves.is_finite() && slope.is_finite()) {
        return Err(Error::InvalidParameter("wedge needs positive octaves and slope".into()));
    }
    let spectrum: Field = Arc::new(move |l: &[f64]| {
        let l1 = l[0].abs();
        if l1 == 0.0 {
            return Quaternion::ZERO;
        }
        let mut v = bump(l1.log2() / octaves);
        for &lp in &l[1..] {
            if v == 0.0 {
                break;
            }
            v *= bump(lp / (slope * l1));
        }
        Quaternion::real(v)
    });
    let b2 = bump_integral(|u| bump(u).powi(2));
    let radial = 2.0 * octaves * std::f64::consts::LN_2
        * bump_integral(|u| bump(u).powi(2) * 2f64.powf(2.0 * n as f64 * octaves * u));
    let norm = (radial * (slope * b2).powi(2 * n as i32 - 1)).sqrt();
    Ok(ShearletGenerator::multiplier("wedge", n, spectrum)?
        .with_l2_norm(norm)
        .with_support_radius(4.0 / 2f64.powf(-octaves))
        .with_cone(Cone { lo: 2f64.powf(-octaves), hi: 2f64.powf(octaves), slope })
        .with_params(vec![("octaves".into(), octaves), ("slope".into(), slope)]))
}

/// `ψ(x) = ∏ e^{-x_p}` on the positive orthant (n = 1 only).
pub fn paper_exponential(n: usize) -> Result<ShearletGenerator> {
    if n != 1 {
        return Err(Error::InvalidParameter("paper-exponential is defined for n = 1 only".into()));
    }
    let eval: Field = Arc::new(|x: &[f64]| {
        if x.iter().all(|&v| v >= 0.0) {
            Quaternion::real((-x.iter().sum::<f64>()).exp())
        } else {
            Quaternion::ZERO
        }
    });
    let spectrum: Field = Arc::new(|l: &[f64]| {
        let left = Quaternion::new(1.0, 2.0 * PI * l[0], 0.0, 0.0) * (1.0 / (1.0 + 4.0 * PI * PI * l[0] * l[0]));
        let right = Quaternion::new(1.0, 0.0, 2.0 * PI * l[1], 0.0) * (1.0 / (1.0 + 4.0 * PI * PI * l[1] * l[1]));
        left * right
    });
    Ok(ShearletGenerator::analytic("paper-exponential", n, eval)
        .with_spectrum(spectrum)
        .with_l2_norm(0.5f64.powi(n as i32))
        .with_support_radius(20.0))
}

/// `e^{-|x|²/γ²} + j e^{-|x|²}`.
pub fn paper_gaussian_f(n: usize, gamma: f64) -> Result<ShearletGenerator> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let eval: Field = Arc::new(move |x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Quaternion::new((-r2 / (gamma * gamma)).exp(), 0.0, (-r2).exp(), 0.0)
    });
    let nn = n as i32;
    // ψ* = e^{-|x|²/γ²} - j e^{-|x|²}
    let spectrum: Field = Arc::new(move |l: &[f64]| {
        let w2: f64 = l.iter().map(|v| v * v).sum();
        Quaternion::new(
            PI.powi(nn) * gamma.powi(2 * nn) * (-PI * PI * gamma * gamma * w2).exp(),
            0.0,
            -PI.powi(nn) * (-PI * PI * w2).exp(),
            0.0,
        )
    });
    let norm2 = (PI / 2.0).powi(nn) * (gamma.powi(2 * nn) + 1.0);
    ShearletGenerator::analytic("paper-gaussian-f", n, eval)
        .with_spectrum(spectrum)
        .with_l2_norm(norm2.sqrt())
        .with_support_radius(4.5 * gamma.max(1.0))
        .with_params(vec![("gamma".into(), gamma)])
        .structural()
}

/// `ψ*(x) = conj(ψ(-x))` on an origin-centered grid.
pub fn star(psi: &QSignal) -> Result<QSignal> {
    let g = &psi.grid;
    if !g.is_origin_centered() {
        return Err(Error::IncompatibleGrids("reflection needs an origin-centered grid".into()));
    }
    let mut idx = vec![0usize; g.dims()];
    let data = (0..g.len())
        .map(|m| {
            g.unravel(m, &mut idx);
            for a in 0..idx.len() {
                idx[a] = g.reflect_index(a, idx[a]);
            }
            let r = idx.iter().zip(&g.shape).fold(0, |acc, (&i, &s)| acc * s + i);
            psi.data[r].conj()
        })
        .collect();
    Ok(QSignal { grid: g.clone(), data })
}

/// `ψ_{a,s,t}(x) = |a|^{1/4n - 1} ψ(A_a^{-1} S_s^{-1}(x - t))` sampled on `grid`.
pub fn make_atom(psi: &ShearletGenerator, g: &GroupPoint, grid: &Grid) -> Result<QSignal> {
    let eval = psi.eval.clone().ok_or_else(|| Error::NotMaterializable(psi.name.clone()))?;
    check_dims(psi, grid)?;
    let amp = g.a.abs().powf(1.0 / (4 * psi.n) as f64 - 1.0);
    let d = grid.dims();
    let (a, s, t) = (g.a, g.s.clone(), g.t.clone());
    let mut sig = QSignal::from_fn(grid.clone(), move |x| {
        let mut y = [0.0; 16];
        let mut z = [0.0; 16];
        for p in 0..d {
            y[p] = x[p] - t[p];
        }
        apply_inv_sa_into(a, &s, &y[..d], &mut z[..d]);
        eval(&z[..d])
    });
    sig.data.iter_mut().for_each(|q| *q = *q * amp);
    Ok(sig)
}

fn check_dims(psi: &ShearletGenerator, grid: &Grid) -> Result<()> {
    if grid.n != psi.n {
        return Err(Error::IncompatibleGrids(format!("generator has n = {}, grid has n = {}", psi.n, grid.n)));
    }
    if grid.dims() > 16 {
        return Err(Error::InvalidParameter("at most 16 dimensions are supported".into()));
    }
    Ok(())
}

/// `|a|^{1-1/4n} F_Q(ψ*)(A_aᵀ S_sᵀ w)`, the per-(a, s) multiplier.
pub fn fourier_multiplier(psi: &ShearletGenerator, a: f64, s: &[f64], w: &[f64]) -> Quaternion {
    let mut lam = vec![0.0; w.len()];
    apply_at_st_into(a, s, w, &mut lam);
    psi.star_spectrum(&lam) * a.abs().powf(1.0 - 1.0 / (4 * psi.n) as f64)
}

/// Samples an atom of any generator; Fourier multipliers are synthesised from their spectrum,
/// which makes the result periodic over the grid's extent.
pub fn synthesize_atom(psi: &ShearletGenerator, g: &GroupPoint, grid: &Grid) -> Result<QSignal> {
    if psi.is_analytic() {
        return make_atom(psi, g, grid);
    }
    check_dims(psi, grid)?;
    let fg = grid.freq_grid();
    let d = grid.dims();
    let amp = g.a.abs().powf(1.0 - 1.0 / (4 * psi.n) as f64);
    let mut z: Vec<Complex64> = (0..fg.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0; d], vec![0.0; d]),
            |(xi, lam), l| {
                fg.point(l, xi);
                apply_at_st_into(g.a, &g.s, xi, lam);
                let m = psi.star_spectrum(lam).r * amp;
                let phase = -2.0 * PI * xi.iter().zip(&g.t).map(|(p, q)| p * q).sum::<f64>();
                Complex64::from_polar(m, phase)
            },
        )
        .collect();
    let fft = NdFft::new(&grid.shape);
    for a in 0..d {
        fft.continuous_axis(&mut z, a, 1.0, fg.origin[a], fg.spacing[a], grid.origin[a]);
    }
    Ok(QSignal { grid: grid.clone(), data: z.iter().map(|c| Quaternion::real(c.re)).collect() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationReport {
    pub max_violation: f64,
    pub pass: bool,
    pub samples: usize,
}

pub const COMMUTATION_TOL: f64 = 1e-9;

/// Checks both commutation identities required by the QFT convolution theorem, for `g = ψ*`, at
/// seeded samples `(u, v) ∈ [-2, 2]^{2n}`, `t ∈ [-5, 5]^n`. Violations are relative to the largest
/// sampled `|F_Q(g)|`.
pub fn check_commutation(psi: &ShearletGenerator, samples: usize) -> CommutationReport {
    let n = psi.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for _ in 0..samples {
        let w: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mut wr = w.clone();
        wr[..n].iter_mut().for_each(|x| *x = -*x);
        let f = psi.star_spectrum(&w);
        let f_refl = psi.star_spectrum(&wr);
        let vt: f64 = w[n..].iter().zip(&t).map(|(p, q)| p * q).sum();
        let e = Quaternion::exp_j(-2.0 * PI * vt);
        // F_Q(jg)(u, v) = j F_Q(g)(-u, v)
        let fj = Quaternion::J * f_refl;
        let v1 = (f * e - e * f).abs();
        let v2 = (fj * e - Quaternion::J * e * f).abs();
        worst = worst.max(v1).max(v2);
        scale = scale.max(f.abs()).max(f_refl.abs());
    }
    let max_violation = if scale > 0.0 { worst / scale } else { 0.0 };
    CommutationReport { max_violation, pass: max_violation < COMMUTATION_TOL, samples }
}

/// Symmetric frequency box `[-half_width, half_width]^{2n}` with `nodes` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreqBox {
    pub half_width: f64,
    pub nodes: usize,
}

impl FreqBox {
    pub fn default_for(n: usize) -> Self {
        match n {
            1 => Self { half_width: 2.5, nodes: 512 },
            2 => Self { half_width: 2.5, nodes: 48 },
            _ => Self { half_width: 2.5, nodes: 12 },
        }
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::centered(n, self.nodes, 2.0 * self.half_width / self.nodes as f64)
    }
}

/// `C_ψ ≈ Σ |F_Q(ψ*)(λ)|² / |λ₁|^{2n} ∏Δλ`, skipping nodes with `|λ₁| < Δλ₁/2`.
///
/// Generators without a closed-form spectrum are transformed on their probe grid instead of `fb`.
pub fn admissibility_direct(psi: &ShearletGenerator, fb: &FreqBox) -> Result<f64> {
    let (fg, values) = if psi.has_spectrum() {
        let fg = fb.grid(psi.n)?;
        let sp = QSignal::from_fn(fg.clone(), |l| psi.star_spectrum(l));
        (fg, sp.data)
    } else {
        let sp = qft_forward(&star(psi.probe_signal())?).values;
        (sp.grid, sp.data)
    };
    let two_n = 2 * psi.n as i32;
    let h1 = fg.spacing[0];
    let stride = fg.strides()[0];
    let cols = fg.shape[0];
    let mut col_sums = vec![Compensated::new(); cols];
    for (m, q) in values.iter().enumerate() {
        let c = m / stride;
        let l1 = fg.coord(0, c);
        if l1.abs() < 0.5 * h1 {
            continue;
        }
        col_sums[c].add(q.norm_sqr() / l1.abs().powi(two_n));
    }
    let col: Vec<f64> = col_sums.iter().map(|c| c.value() * fg.cell_volume()).collect();
    let total: f64 = crate::sum::sum(col.iter().copied());
    if total == 0.0 {
        return Ok(0.0);
    }
    let min_abs = (0..cols)
        .map(|c| fg.coord(0, c).abs())
        .filter(|&x| x >= 0.5 * h1)
        .fold(f64::INFINITY, f64::min);
    let shell: f64 = (0..cols).filter(|&c| (fg.coord(0, c).abs() - min_abs).abs() < 0.5 * h1).map(|c| col[c]).sum();
    let fraction = shell / total;
    if fraction > 0.1 {
        return Err(Error::NonAdmissibleOrUnresolved { fraction });
    }
    Ok(total)
}

/// `Σ_{(a,s)} |F_Q(ψ*)(A_aᵀ S_sᵀ λ₀)|² Δa Δs / |a|^{(4n²-2n+1)/2n}`, which equals the
/// truncated-box constant seen by every frequency `λ₀` with `λ₀₁ ≠ 0`.
pub fn admissibility_group(psi: &ShearletGenerator, pg: &ParamGrid, lambda0: &[f64]) -> Result<f64> {
    if lambda0.len() != 2 * pg.n || pg.n != psi.n {
        return Err(Error::InvalidParameter("probe frequency must live in R^(2n) of the generator".into()));
    }
    if lambda0[0] == 0.0 {
        return Err(Error::InvalidParameter("probe frequency needs a nonzero first coordinate".into()));
    }
    let terms: Vec<f64> = (0..pg.len())
        .into_par_iter()
        .map(|idx| {
            let (a, s) = pg.node(idx);
            let mut lam = vec![0.0; lambda0.len()];
            apply_at_st_into(a, s, lambda0, &mut lam);
            psi.star_spectrum(&lam).norm_sqr() * pg.group_weight(idx)
        })
        .collect();
    Ok(crate::sum::sum(terms))
}

/// `Δ_grid(w) = Σ weight(a,s)·|a|^{2-1/2n}·|F_Q(ψ*)(A_aᵀS_sᵀ w)|²`, the energy density the
/// discretised group integral assigns to frequency `w`.
pub fn grid_density(psi: &ShearletGenerator, pg: &ParamGrid, w: &[f64]) -> f64 {
    let mut lam = vec![0.0; w.len()];
    let mut acc = Compensated::new();
    for idx in 0..pg.len() {
        let (a, s) = pg.node(idx);
        apply_at_st_into(a, s, w, &mut lam);
        let m = psi.star_spectrum(&lam).norm_sqr();
        if m != 0.0 {
            acc.add(m * pg.group_weight(idx));
        }
    }
    acc.value()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub c_direct: f64,
    pub c_group: f64,
    pub freq_box: FreqBox,
    pub lambda0: Vec<f64>,
    pub param_nodes: usize,
    pub gap: f64,
}

pub fn admissibility_report(psi: &ShearletGenerator, fb: &FreqBox, pg: &ParamGrid, lambda0: &[f64]) -> Result<AdmissibilityReport> {
    let c_direct = admissibility_direct(psi, fb)?;
    let c_group = admissibility_group(psi, pg, lambda0)?;
    Ok(AdmissibilityReport {
        c_direct,
        c_group,
        freq_box: *fb,
        lambda0: lambda0.to_vec(),
        param_nodes: pg.len(),
        gap: (c_direct - c_group).abs() / c_direct.max(c_group),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_param_grid;
    use crate::signal::inner_q;

    fn wedge1() -> ShearletGenerator {
        wedge(1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert!(bump(0.5) > 0.0 && bump(0.5) < 1.0);
        assert_eq!(wedge1().star_spectrum(&[1.0, 0.0]), Quaternion::ONE);
        assert_eq!(wedge1().star_spectrum(&[0.0, 0.3]), Quaternion::ZERO);
        assert_eq!(wedge1().star_spectrum(&[1.0, 1.2]), Quaternion::ZERO);
    }

    #[test]
    fn wedge_norm_matches_spectral_quadrature() {
        let psi = wedge1();
        let fg = Grid::centered(1, 801, 0.006).unwrap();
        let sp = QSignal::from_fn(fg, |l| psi.star_spectrum(l));
        let num = lp_norm(&sp, 2.0).unwrap();
        assert!((num - psi.l2_norm()).abs() / num < 1e-6, "{num} vs {}", psi.l2_norm());
    }

    #[test]
    fn multiplier_must_be_real_and_even() {
        let odd: Field = Arc::new(|l: &[f64]| Quaternion::real(l[0] * (-l[0] * l[0]).exp()));
        assert!(ShearletGenerator::multiplier("odd", 1, odd).is_err());
        let complex: Field = Arc::new(|l: &[f64]| Quaternion::new(0.0, (-l[0] * l[0]).exp(), 0.0, 0.0));
        assert!(ShearletGenerator::multiplier("c", 1, complex).is_err());
    }

    #[test]
    fn generator_values() {
        let e = paper_exponential(1).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]), Some(Quaternion::ONE));
        assert_eq!(e.eval(&[-0.1, 2.0]), Some(Quaternion::ZERO));
        assert!(paper_exponential(2).is_err());
        let g = paper_gaussian_f(1, 1.0).unwrap();
        assert_eq!(g.eval(&[0.0, 0.0]), Some(Quaternion::new(1.0, 0.0, 1.0, 0.0)));
        assert!(g.structural);
        let num = lp_norm(g.probe_signal(), 2.0).unwrap();
        assert!((num - g.l2_norm()).abs() / num < 1e-9);
    }

    #[test]
    fn structural_check_rejects_odd_or_k_parts() {
        let odd: Field = Arc::new(|x: &[f64]| Quaternion::real(x[0] * (-x[0] * x[0] - x[1] * x[1]).exp()));
        assert!(ShearletGenerator::analytic("odd", 1, odd).structural().is_err());
        let kpart: Field = Arc::new(|x: &[f64]| Quaternion::new(0.0, 0.0, 0.0, (-x[0] * x[0] - x[1] * x[1]).exp()));
        assert!(ShearletGenerator::analytic("k", 1, kpart).structural().is_err());
    }

    #[test]
    fn reflection() {
        let g = Grid::centered(1, 7, 0.5).unwrap();
        let even = QSignal::from_fn(g.clone(), |x| Quaternion::real((-x[0] * x[0] - x[1] * x[1]).exp()));
        assert_eq!(star(&even).unwrap(), even);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data = (0..49).map(|_| Quaternion::new(rng.gen(), rng.gen(), rng.gen(), rng.gen())).collect();
        let f = QSignal::new(g.clone(), data).unwrap();
        assert_eq!(star(&star(&f).unwrap()).unwrap(), f);
        let shifted = Grid::new(1, vec![7, 7], vec![0.5, 0.5], vec![0.0, 0.0]).unwrap();
        assert!(star(&QSignal::zeros(shifted)).is_err());
    }

    #[test]
    fn exponential_star_spectrum_matches_quadrature() {
        let psi = paper_exponential(1).unwrap();
        let g = Grid::centered(1, 801, 0.04).unwrap();
        // trapezoid weights on the orthant faces, where ψ jumps
        let mut sampled = make_atom(&psi, &GroupPoint::identity(1), &g).unwrap();
        let mut x = [0.0; 2];
        for m in 0..g.len() {
            g.point(m, &mut x);
            for &c in &x {
                if c == 0.0 {
                    sampled.data[m] = sampled.data[m] * 0.5;
                }
            }
        }
        let star_psi = star(&sampled).unwrap();
        for w in [[0.1, -0.2], [0.35, 0.05], [-0.3, 0.4]] {
            let num = qft_at(&star_psi, &w, -1.0);
            let exact = psi.star_spectrum(&w);
            assert!((num - exact).abs() < 5e-3 * exact.abs(), "{w:?}: {num:?} vs {exact:?}");
        }
    }

    #[test]
    fn atom_identity_and_norms() {
        let psi = paper_gaussian_f(1, 0.8).unwrap();
        let grid = Grid::centered(1, 161, 0.1).unwrap();
        let base = make_atom(&psi, &GroupPoint::identity(1), &grid).unwrap();
        assert_eq!(base, QSignal::from_fn(grid.clone(), |x| psi.eval(x).unwrap()));
        let n2 = lp_norm(&base, 2.0).unwrap();
        for (a, s) in [(0.5, 0.3), (-1.7, -0.6), (2.0, 1.0)] {
            let g = GroupPoint::new(a, vec![s], vec![0.3, -0.2]).unwrap();
            let atom = make_atom(&psi, &g, &grid).unwrap();
            for p in [1.0, 2.0, 4.0] {
                let want = a.abs().powf((0.25 - 1.0) * (p - 2.0) / p) * lp_norm(&base, p).unwrap();
                let got = lp_norm(&atom, p).unwrap();
                assert!((got - want).abs() / want < 1e-3, "a={a} p={p}: {got} vs {want}");
            }
            assert!((lp_norm(&atom, 2.0).unwrap() - n2).abs() / n2 < 1e-6);
        }
    }

    #[test]
    fn atom_pairing_moves_to_inverse() {
        let psi = paper_gaussian_f(1, 0.8).unwrap();
        let phi = paper_gaussian_f(1, 1.3).unwrap();
        let grid = Grid::centered(1, 201, 0.08).unwrap();
        let g = GroupPoint::new(1.6, vec![0.4], vec![0.5, -0.3]).unwrap();
        let gi = crate::group::invert(&g);
        let lhs = inner_q(&make_atom(&psi, &g, &grid).unwrap(), &make_atom(&phi, &GroupPoint::identity(1), &grid).unwrap()).unwrap();
        let rhs = inner_q(&make_atom(&psi, &GroupPoint::identity(1), &grid).unwrap(), &make_atom(&phi, &gi, &grid).unwrap()).unwrap();
        assert!((lhs - rhs).abs() < 1e-8 * lhs.abs(), "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn multiplier_rejects_spatial_sampling() {
        let g = Grid::centered(1, 8, 0.5).unwrap();
        assert!(matches!(make_atom(&wedge1(), &GroupPoint::identity(1), &g), Err(Error::NotMaterializable(_))));
    }

    #[test]
    fn synthesized_wedge_atom_has_generator_norm() {
        let psi = wedge1();
        let grid = Grid::centered(1, 128, 0.2).unwrap();
        let g = GroupPoint::new(0.9, vec![0.3], vec![0.4, -1.0]).unwrap();
        let atom = synthesize_atom(&psi, &g, &grid).unwrap();
        let r = lp_norm(&atom, 2.0).unwrap() / psi.l2_norm();
        assert!((r - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn commutation() {
        let w = check_commutation(&wedge1(), 64);
        assert!(w.pass && w.max_violation <= 1e-12, "{w:?}");
        let g = check_commutation(&paper_gaussian_f(1, 1.3).unwrap(), 64);
        assert!(g.pass && g.max_violation <= 1e-12, "{g:?}");
        let zero = check_commutation(&wedge1().scaled(0.0), 16);
        assert!(zero.pass && zero.max_violation == 0.0);
        let odd: Field = Arc::new(|x: &[f64]| Quaternion::new(0.0, 0.0, 0.0, x[0] * (-x[0] * x[0] - x[1] * x[1]).exp()));
        let bad = check_commutation(&ShearletGenerator::analytic("k-odd", 1, odd).with_support_radius(5.0), 32);
        assert!(!bad.pass && bad.max_violation > 1e-3, "{bad:?}");
        assert!(!check_commutation(&paper_exponential(1).unwrap(), 32).pass);
        let even_real: Field = Arc::new(|x: &[f64]| Quaternion::real((-x[0] * x[0] - 2.0 * x[1] * x[1]).exp()));
        let quad = check_commutation(&ShearletGenerator::analytic("even", 1, even_real).with_support_radius(5.0), 16);
        assert!(quad.max_violation <= 1e-12, "{quad:?}");
    }

    /// Independent closed form for the wedge constant: the |λ₁|^{-2n} weight turns the radial
    /// integral into `2·octaves·ln 2·∫b²`.
    fn wedge_constant(n: usize, octaves: f64, slope: f64) -> f64 {
        let h = 1e-5;
        let b2: f64 = (1..200_000).map(|k| bump(-1.0 + k as f64 * h).powi(2)).sum::<f64>() * h;
        2.0 * octaves * std::f64::consts::LN_2 * b2 * (slope * b2).powi(2 * n as i32 - 1)
    }

    #[test]
    fn admissibility_estimators_agree_with_closed_form() {
        let psi = wedge1();
        let exact = wedge_constant(1, 1.0, 1.0);
        let direct = admissibility_direct(&psi, &FreqBox::default_for(1)).unwrap();
        assert!((direct - exact).abs() / exact < 1e-3, "{direct} vs {exact}");
        let fine = admissibility_direct(&psi, &FreqBox { half_width: 2.5, nodes: 1024 }).unwrap();
        assert!((fine - direct).abs() / direct < 1e-2);
        let pg = make_param_grid(1.0 / 8.0, 2.0, 16, 1.5, 9, 1).unwrap();
        let group = admissibility_group(&psi, &pg, &[1.0, 0.0]).unwrap();
        assert!((group - exact).abs() / exact < 2e-2, "{group} vs {exact}");
        let scaled = admissibility_direct(&psi.scaled(3.0), &FreqBox::default_for(1)).unwrap();
        assert!((scaled - 9.0 * direct).abs() < 1e-12 * scaled);
        assert_eq!(admissibility_group(&psi.scaled(0.0), &pg, &[1.0, 0.0]).unwrap(), 0.0);
        assert!(admissibility_group(&psi, &pg, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn gaussian_is_not_admissible() {
        let g = paper_gaussian_f(1, 1.0).unwrap();
        assert!(matches!(admissibility_direct(&g, &FreqBox::default_for(1)), Err(Error::NonAdmissibleOrUnresolved { .. })));
    }

    #[test]
    fn group_estimator_matches_density() {
        let psi = wedge1();
        let pg = make_param_grid(0.25, 2.0, 6, 1.0, 5, 1).unwrap();
        for w in [[1.0, 0.0], [1.3, -0.2]] {
            let a = admissibility_group(&psi, &pg, &w).unwrap();
            assert!((a - grid_density(&psi, &pg, &w)).abs() < 1e-13 * a);
        }
    }
}
