//! Uncertainty inequalities for shearlet coefficients: Donoho-Stark, Lieb, the logarithmic
//! principle and the entropy bound, each evaluated as a [`VerdictReport`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{grid_density, ShearletGenerator};
use crate::digamma::digamma;
use crate::error::{Error, Result};
use crate::qft::qft_forward;
use crate::signal::{lp_norm, QSignal};
use crate::sum::{sum, Compensated};
use crate::transform::{energy_mu, CoeffStack};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Allowed shortfall `abs + rel·|rhs|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 5e-2 }
    }
}

impl Tolerance {
    pub fn with_rel(rel: f64) -> Self {
        Self { rel, ..Self::default() }
    }

    pub fn margin(&self, rhs: f64) -> f64 {
        self.abs + self.rel * rhs.abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub scales: usize,
    pub shears: usize,
}

impl GridInfo {
    pub fn of(c: &CoeffStack) -> Self {
        Self {
            shape: c.grid.shape.clone(),
            spacing: c.grid.spacing.clone(),
            scales: c.pg.a_nodes.len(),
            shears: c.pg.s_nodes.len(),
        }
    }
}

/// Outcome of one inequality check. `slack` is positive when the inequality holds strictly; the
/// verdict passes when `slack ≥ -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub schema_version: String,
    pub name: String,
    pub input: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub constants: BTreeMap<String, f64>,
    pub grid: GridInfo,
    pub notes: Vec<String>,
}

impl VerdictReport {
    fn new(name: &str, statement: &str, lhs: f64, rhs: f64, slack: f64, tol: &Tolerance, grid: GridInfo) -> Self {
        let tolerance = tol.margin(rhs);
        Self {
            schema_version: SCHEMA_VERSION.into(),
            name: name.into(),
            input: String::new(),
            statement: statement.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance && slack.is_finite(),
            constants: BTreeMap::new(),
            grid,
            notes: Vec::new(),
        }
    }

    /// `lhs ≥ rhs`.
    fn at_least(name: &str, statement: &str, lhs: f64, rhs: f64, tol: &Tolerance, grid: GridInfo) -> Self {
        Self::new(name, statement, lhs, rhs, lhs - rhs, tol, grid)
    }

    /// `lhs ≤ rhs`.
    fn at_most(name: &str, statement: &str, lhs: f64, rhs: f64, tol: &Tolerance, grid: GridInfo) -> Self {
        Self::new(name, statement, lhs, rhs, rhs - lhs, tol, grid)
    }

    /// `lhs = rhs`.
    fn equal(name: &str, statement: &str, lhs: f64, rhs: f64, tol: &Tolerance, grid: GridInfo) -> Self {
        Self::new(name, statement, lhs, rhs, -(lhs - rhs).abs(), tol, grid)
    }

    pub fn with_input(mut self, input: impl Into<String>) -> Self {
        self.input = input.into();
        self
    }

    fn constant(mut self, key: &str, v: f64) -> Self {
        self.constants.insert(key.into(), v);
        self
    }

    fn note(mut self, s: &str) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// A set Σ of (a, s, t) cells carrying all but `xi²` of the coefficient energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationSet {
    /// One flag per cell, slice-major like the stack.
    pub included: Vec<bool>,
    pub measure: f64,
    pub xi: f64,
}

/// Smallest-measure set found greedily: cells enter by decreasing `|SH|²`, then included cells are
/// dropped (largest measure first) while the energy budget still allows it.
pub fn essential_support(c: &CoeffStack, xi: f64) -> Result<ConcentrationSet> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidParameter(format!("concentration defect must lie in [0, 1], got {xi}")));
    }
    let total = energy_mu(c);
    if total <= 0.0 {
        return Err(Error::ZeroInput("essential support of a zero coefficient stack".into()));
    }
    let per = c.grid.len();
    let vol = c.grid.cell_volume();
    let density: Vec<f64> = c.slices.iter().flatten().map(|q| q.norm_sqr()).collect();
    let measure = |cell: usize| c.pg.weights[cell / per] * vol;
    let mut order: Vec<usize> = (0..density.len()).collect();
    order.sort_by(|&x, &y| density[y].total_cmp(&density[x]).then(x.cmp(&y)));

    // excluded energy once the first k cells of `order` are in
    let mut suffix = vec![0.0; order.len() + 1];
    let mut acc = Compensated::new();
    for k in (0..order.len()).rev() {
        acc.add(density[order[k]] * measure(order[k]));
        suffix[k] = acc.value();
    }
    let budget = xi * xi * total;
    let k = (0..=order.len()).find(|&k| suffix[k] <= budget).unwrap_or(order.len());
    let mut included = vec![false; density.len()];
    order[..k].iter().for_each(|&cell| included[cell] = true);

    let mut excluded = suffix[k];
    let mut chosen: Vec<usize> = order[..k].to_vec();
    chosen.sort_by(|&x, &y| measure(y).total_cmp(&measure(x)).then(density[x].total_cmp(&density[y])));
    for cell in chosen {
        let e = density[cell] * measure(cell);
        if excluded + e <= budget {
            included[cell] = false;
            excluded += e;
        }
    }
    let measure_total = sum(included.iter().enumerate().filter(|(_, &b)| b).map(|(cell, _)| measure(cell)));
    Ok(ConcentrationSet { included, measure: measure_total, xi: (excluded / total).max(0.0).sqrt().min(1.0) })
}

pub fn donoho_stark_check(c: &CoeffStack, psi: &ShearletGenerator, xi: f64, tol: &Tolerance) -> Result<VerdictReport> {
    let set = essential_support(c, xi)?;
    let norm = psi.l2_norm();
    let rhs = (1.0 - xi * xi) * c.c_grid / (norm * norm);
    Ok(VerdictReport::at_least("donoho-stark", "mu(Sigma) >= (1 - xi^2) C / ||psi||^2", set.measure, rhs, tol, GridInfo::of(c))
        .constant("xi", xi)
        .constant("achieved_xi", set.xi)
        .constant("c_grid", c.c_grid)
        .constant("psi_norm", norm))
}

/// `‖SH₁·SH₂‖_{p,μ}`.
pub fn lieb_norm(c1: &CoeffStack, c2: &CoeffStack, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("Lieb exponent must be at least 1, got {p}")));
    }
    c1.check_compatible(c2)?;
    let vol = c1.grid.cell_volume();
    let parts: Vec<f64> = c1
        .slices
        .par_iter()
        .zip(&c2.slices)
        .zip(&c1.pg.weights)
        .map(|((s1, s2), &w)| {
            w * vol * s1.iter().zip(s2).map(|(x, y)| (x.abs() * y.abs()).powf(p)).collect::<Compensated>().value()
        })
        .collect();
    Ok(sum(parts).powf(1.0 / p))
}

/// Norms entering the Lieb bound.
#[derive(Clone, Copy, Debug)]
pub struct LiebNorms {
    pub f: f64,
    pub g: f64,
    pub phi: f64,
    pub psi: f64,
}

/// `‖SH_φ f · SH_ψ g‖_{p,μ} ≤ (C_φ C_ψ)^{1/2p} ‖f‖ ‖g‖ (‖φ‖ ‖ψ‖)^{1-1/p}` on precomputed stacks.
pub fn lieb_check(c_phi_f: &CoeffStack, c_psi_g: &CoeffStack, norms: LiebNorms, p: f64, tol: &Tolerance) -> Result<VerdictReport> {
    let lhs = lieb_norm(c_phi_f, c_psi_g, p)?;
    let rhs = (c_phi_f.c_grid * c_psi_g.c_grid).sqrt().powf(1.0 / p) * norms.f * norms.g * (norms.phi * norms.psi).powf(1.0 - 1.0 / p);
    Ok(VerdictReport::at_most(
        "lieb",
        "||SH_phi f SH_psi g||_p <= (C_phi C_psi)^(1/2p) ||f|| ||g|| (||phi|| ||psi||)^(1-1/p)",
        lhs,
        rhs,
        tol,
        GridInfo::of(c_phi_f),
    )
    .constant("p", p)
    .constant("c_grid_phi", c_phi_f.c_grid)
    .constant("c_grid_psi", c_psi_g.c_grid)
    .constant("f_norm", norms.f)
    .constant("g_norm", norms.g)
    .constant("phi_norm", norms.phi)
    .constant("psi_norm", norms.psi))
}

/// Transforms `f` by φ and `g` by ψ, then runs [`lieb_check`].
pub fn lieb_check_signals(
    f: &QSignal,
    g: &QSignal,
    phi: &ShearletGenerator,
    psi: &ShearletGenerator,
    pg: &crate::group::ParamGrid,
    p: f64,
    tol: &Tolerance,
) -> Result<VerdictReport> {
    let c1 = crate::transform::sh_forward(f, phi, pg)?;
    let c2 = crate::transform::sh_forward(g, psi, pg)?;
    let norms = LiebNorms { f: lp_norm(f, 2.0)?, g: lp_norm(g, 2.0)?, phi: phi.l2_norm(), psi: psi.l2_norm() };
    lieb_check(&c1, &c2, norms, p, tol)
}

pub fn lieb_concentration_check(c: &CoeffStack, psi: &ShearletGenerator, xi: f64, p: f64, tol: &Tolerance) -> Result<VerdictReport> {
    if !(p > 2.0) {
        return Err(Error::InvalidParameter(format!("Lieb concentration needs p > 2, got {p}")));
    }
    let set = essential_support(c, xi)?;
    let norm = psi.l2_norm();
    let rhs = (1.0 - xi * xi).powf(p / (p - 2.0)) * c.c_grid / (norm * norm);
    Ok(VerdictReport::at_least(
        "lieb-concentration",
        "mu(Sigma) >= (1 - xi^2)^(p/(p-2)) C / ||psi||^2",
        set.measure,
        rhs,
        tol,
        GridInfo::of(c),
    )
    .constant("xi", xi)
    .constant("achieved_xi", set.xi)
    .constant("p", p)
    .constant("c_grid", c.c_grid)
    .constant("psi_norm", norm))
}

/// `D_{2n} = Γ'(n/2)/Γ(n/2) + ln 2`.
pub fn log_constant(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("half-dimension n must be at least 1".into()));
    }
    Ok(digamma(n as f64 / 2.0) + std::f64::consts::LN_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogMode {
    TOnly,
    Full,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Cell average of `½ ln(extra + |x|²)` over the box `center ± spacing/2`, each axis split at the
/// centre into halves carrying 5-point Gauss rules so no node hits the singularity.
fn log_cell_average(center: &[f64], spacing: &[f64], extra: f64) -> f64 {
    let axis: Vec<Vec<(f64, f64)>> = center
        .iter()
        .zip(spacing)
        .map(|(&c, &h)| {
            [-1.0, 1.0]
                .iter()
                .flat_map(|&side| GL5.iter().map(move |&(x, w)| (c + side * h * (1.0 + x) / 4.0, w / 4.0)))
                .collect()
        })
        .collect();
    let d = center.len();
    let count = 10usize.pow(d as u32);
    let mut acc = Compensated::new();
    for m in 0..count {
        let (mut rem, mut r2, mut w) = (m, extra, 1.0);
        for ax in axis.iter() {
            let (x, wx) = ax[rem % 10];
            rem /= 10;
            r2 += x * x;
            w *= wx;
        }
        acc.add(w * 0.5 * r2.ln());
    }
    acc.value()
}

fn near_origin(x: &[f64], spacing: &[f64]) -> bool {
    x.iter().zip(spacing).all(|(v, h)| v.abs() <= 1.01 * h)
}

/// `ln|x|` per node, cell-averaged around the origin.
fn log_radius_field(grid: &crate::signal::Grid, extra: f64) -> Vec<f64> {
    let mut x = vec![0.0; grid.dims()];
    (0..grid.len())
        .map(|m| {
            grid.point(m, &mut x);
            if near_origin(&x, &grid.spacing) {
                log_cell_average(&x, &grid.spacing, extra)
            } else {
                0.5 * (extra + x.iter().map(|v| v * v).sum::<f64>()).ln()
            }
        })
        .collect()
}

/// `(∫ ln|w|·|F_Q f|²·Δ_grid(w) dw, ∫ ln|w|·|F_Q f|² dw)` on f's frequency grid.
fn fourier_log_terms(f: &QSignal, psi: &ShearletGenerator, pg: &crate::group::ParamGrid) -> (f64, f64) {
    let spec = qft_forward(f);
    let fg = spec.values.grid.clone();
    let logs = log_radius_field(&fg, 0.0);
    let d = fg.dims();
    let parts: Vec<(f64, f64)> = spec
        .values
        .data
        .par_iter()
        .zip(&logs)
        .enumerate()
        .map_init(
            || vec![0.0; d],
            |w, (m, (q, &l))| {
                let e = q.norm_sqr();
                if e == 0.0 {
                    return (0.0, 0.0);
                }
                fg.point(m, w);
                (l * e * grid_density(psi, pg, w), l * e)
            },
        )
        .collect();
    let vol = fg.cell_volume();
    (sum(parts.iter().map(|p| p.0)) * vol, sum(parts.iter().map(|p| p.1)) * vol)
}

/// `Σ weight·∏Δt·L(a,s,t)·|SH|²` with `L = ln|t|` or `ln|(a,s,t)|`.
fn log_coefficient_term(c: &CoeffStack, mode: LogMode) -> f64 {
    let vol = c.grid.cell_volume();
    let t_logs = log_radius_field(&c.grid, 0.0);
    let parts: Vec<f64> = (0..c.pg.len())
        .into_par_iter()
        .map(|idx| {
            let (a, s) = c.pg.node(idx);
            let logs = match mode {
                LogMode::TOnly => None,
                LogMode::Full => Some(log_radius_field(&c.grid, a * a + s.iter().map(|x| x * x).sum::<f64>())),
            };
            let l = logs.as_ref().unwrap_or(&t_logs);
            c.pg.weights[idx] * vol * c.slices[idx].iter().zip(l).map(|(q, &l)| l * q.norm_sqr()).collect::<Compensated>().value()
        })
        .collect();
    sum(parts)
}

/// Logarithmic uncertainty on the computed discretisation:
/// `Σ ∫ ln|t|·|SH f|² dμ + ∫ ln|w|·|F_Q f|²·Δ_grid(w) dw ≥ D_{2n}·‖SH f‖²_μ`.
///
/// The untruncated statement (`C ∫ ln|w|·|F_Q f|² dw` and `D·C‖f‖²`) is reported in `constants`.
pub fn log_up_check(
    f: &QSignal,
    c: &CoeffStack,
    psi: &ShearletGenerator,
    mode: LogMode,
    tol: &Tolerance,
) -> Result<VerdictReport> {
    if !f.grid.same_layout(&c.grid) {
        return Err(Error::IncompatibleGrids("signal and stack grids differ".into()));
    }
    let d = log_constant(c.pg.n)?;
    let coeff = log_coefficient_term(c, mode);
    let (fourier_grid, fourier_plain) = fourier_log_terms(f, psi, &c.pg);
    let energy = energy_mu(c);
    let f2 = f.energy();
    let name = match mode {
        LogMode::TOnly => "log-up-t",
        LogMode::Full => "log-up-full",
    };
    Ok(VerdictReport::at_least(
        name,
        "sum int ln|t| |SH f|^2 dmu + int ln|w| |F_Q f|^2 Delta_grid dw >= D_2n ||SH f||_mu^2",
        coeff + fourier_grid,
        d * energy,
        tol,
        GridInfo::of(c),
    )
    .constant("d_2n", d)
    .constant("d_2n_sharp", digamma(c.pg.n as f64 / 2.0) - std::f64::consts::PI.ln())
    .constant("coefficient_term", coeff)
    .constant("fourier_term", fourier_grid)
    .constant("energy_mu", energy)
    .constant("c_grid", c.c_grid)
    .constant("f_norm", f2.sqrt())
    .constant("untruncated_lhs", coeff + c.c_grid * fourier_plain)
    .constant("untruncated_rhs", d * c.c_grid * f2)
    .note("D_2n = digamma(n/2) + ln 2 as defined; the sharp constant for this transform normalisation is digamma(n/2) - ln(pi)")
    .note("Gaussian-enveloped inputs stand in for Schwartz functions; a pass is a plausibility certificate"))
}

/// `E = -Σ weight·∏Δt·|SH|²·ln|SH|²` with `0·ln 0 = 0`.
pub fn entropy(c: &CoeffStack) -> f64 {
    let vol = c.grid.cell_volume();
    let parts: Vec<f64> = c
        .slices
        .iter()
        .zip(&c.pg.weights)
        .map(|(s, &w)| {
            let v: Compensated = s
                .iter()
                .map(|q| {
                    let e = q.norm_sqr();
                    if e > 0.0 {
                        e * e.ln()
                    } else {
                        0.0
                    }
                })
                .collect();
            -w * vol * v.value()
        })
        .collect();
    sum(parts)
}

/// `E(|SH f|²) ≥ C‖f‖² ln(1/(‖f‖²‖ψ‖²))`.
pub fn entropy_check(f: &QSignal, psi: &ShearletGenerator, c: &CoeffStack, tol: &Tolerance) -> Result<VerdictReport> {
    let f2 = f.energy();
    if f2 == 0.0 {
        return Err(Error::ZeroInput("entropy bound needs a nonzero signal".into()));
    }
    let p2 = psi.l2_norm().powi(2);
    let lhs = entropy(c);
    let rhs = c.c_grid * f2 * (1.0 / (f2 * p2)).ln();
    Ok(VerdictReport::at_least("entropy", "E(|SH f|^2) >= C ||f||^2 ln(1/(||f||^2 ||psi||^2))", lhs, rhs, tol, GridInfo::of(c))
        .constant("c_grid", c.c_grid)
        .constant("f_norm", f2.sqrt())
        .constant("psi_norm", p2.sqrt()))
}

/// `‖SH f‖²_μ = C‖f‖²`, the discretised Plancherel identity.
pub fn plancherel_check(f: &QSignal, c: &CoeffStack, tol: &Tolerance) -> VerdictReport {
    let lhs = energy_mu(c);
    let rhs = c.c_grid * f.energy();
    VerdictReport::equal("plancherel", "||SH f||_mu^2 = C ||f||^2", lhs, rhs, tol, GridInfo::of(c))
        .constant("c_grid", c.c_grid)
        .constant("ratio", if rhs > 0.0 { lhs / rhs } else { f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::wedge;
    use crate::group::{make_param_grid, ParamGrid};
    use crate::quaternion::Quaternion;
    use crate::signal::Grid;
    use crate::transform::sh_forward;

    fn tiny_stack() -> CoeffStack {
        let grid = Grid::centered(1, 4, 0.5).unwrap();
        let pg = ParamGrid::positive(0.5, 2.0, 2, 0.5, 2, 1).unwrap();
        let slices = (0..pg.len())
            .map(|i| (0..grid.len()).map(|m| Quaternion::new(((i * 7 + m * 3) % 5) as f64 * 0.3, (m % 3) as f64 * 0.1, 0.0, 0.0)).collect())
            .collect();
        CoeffStack { pg, grid, slices, generator: "test".into(), params: vec![], c_grid: 1.0, border: 0 }
    }

    #[test]
    fn support_extremes() {
        let c = tiny_stack();
        let all = essential_support(&c, 0.0).unwrap();
        let nonzero: Vec<bool> = c.slices.iter().flatten().map(|q| q.norm_sqr() > 0.0).collect();
        assert_eq!(all.included, nonzero);
        assert_eq!(all.xi, 0.0);
        let none = essential_support(&c, 1.0).unwrap();
        assert_eq!(none.measure, 0.0);
        assert!(none.included.iter().all(|b| !b));
        assert!(essential_support(&c.scale(0.0), 0.5).is_err());
    }

    #[test]
    fn support_beats_random_search() {
        use rand::{Rng, SeedableRng};
        let c = tiny_stack();
        let per = c.grid.len();
        let vol = c.grid.cell_volume();
        let weights = &c.pg.weights;
        let cells: Vec<(f64, f64)> = c
            .slices
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |q| (q.norm_sqr() * weights[i] * vol, weights[i] * vol)))
            .collect();
        assert_eq!(cells.len(), 4 * per);
        let total: f64 = cells.iter().map(|c| c.0).sum();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for xi in [0.2, 0.4, 0.7] {
            let got = essential_support(&c, xi).unwrap();
            assert!(got.xi <= xi + 1e-12);
            for _ in 0..20000 {
                let mask: Vec<bool> = (0..cells.len()).map(|_| rng.gen_bool(0.6)).collect();
                let excl: f64 = cells.iter().zip(&mask).filter(|(_, &m)| !m).map(|(c, _)| c.0).sum();
                if excl <= xi * xi * total {
                    let meas: f64 = cells.iter().zip(&mask).filter(|(_, &m)| m).map(|(c, _)| c.1).sum();
                    assert!(got.measure <= meas + 1e-12);
                }
            }
        }
    }

    #[test]
    fn support_measure_shrinks_with_xi() {
        let c = tiny_stack();
        let ms: Vec<f64> = [0.0, 0.1, 0.3, 0.6, 0.9].iter().map(|&x| essential_support(&c, x).unwrap().measure).collect();
        assert!(ms.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn lieb_norm_special_cases() {
        let c = tiny_stack();
        assert!((lieb_norm(&c, &c, 1.0).unwrap() - energy_mu(&c)).abs() < 1e-14);
        assert_eq!(lieb_norm(&c.scale(0.0), &c, 2.0).unwrap(), 0.0);
        let vol = c.grid.cell_volume();
        let mut direct = 0.0;
        for (i, s) in c.slices.iter().enumerate() {
            for q in s {
                direct += c.pg.weights[i] * vol * q.norm_sqr().powi(2);
            }
        }
        assert!((lieb_norm(&c, &c, 2.0).unwrap() - direct.sqrt()).abs() < 1e-14);
        assert!(lieb_norm(&c, &c, 0.5).is_err());
    }

    #[test]
    fn log_constant_values() {
        let g = 0.577_215_664_901_532_9;
        assert!((log_constant(2).unwrap() - (std::f64::consts::LN_2 - g)).abs() < 1e-12);
        assert!((log_constant(4).unwrap() - (1.0 + std::f64::consts::LN_2 - g)).abs() < 1e-12);
        assert!((log_constant(1).unwrap() + g + std::f64::consts::LN_2).abs() < 1e-12);
        assert!((1..12).all(|n| log_constant(n + 1).unwrap() > log_constant(n).unwrap()));
        assert!(log_constant(0).is_err());
    }

    #[test]
    fn entropy_trivia() {
        let c = tiny_stack();
        assert_eq!(entropy(&c.scale(0.0)), 0.0);
        let mut ones = c.clone();
        ones.slices.iter_mut().flatten().for_each(|q| *q = Quaternion::ONE);
        assert_eq!(entropy(&ones), 0.0);
        let vol = c.grid.cell_volume();
        let mut direct = Compensated::new();
        for (i, s) in c.slices.iter().enumerate() {
            for q in s {
                let e = q.norm_sqr();
                if e > 0.0 {
                    direct.add(-c.pg.weights[i] * vol * e * e.ln());
                }
            }
        }
        assert!((entropy(&c) - direct.value()).abs() < 1e-10 * direct.value().abs());
    }

    #[test]
    fn log_cell_average_is_integrable_mean() {
        // ∫∫_{[-1/2,1/2]²} ½ ln(x²+y²) dx dy = (π/2 - 3 - ln 2)/2
        let want = (std::f64::consts::FRAC_PI_2 - 3.0 - std::f64::consts::LN_2) / 2.0;
        let got = log_cell_average(&[0.0, 0.0], &[1.0, 1.0], 0.0);
        assert!((got - want).abs() < 5e-3, "{got} vs {want}");
    }

    #[test]
    fn full_mode_dominates_t_only() {
        let grid = Grid::centered(1, 32, 0.3).unwrap();
        let psi = wedge(1, 1.0, 1.0).unwrap();
        let pg = make_param_grid(0.25, 2.0, 4, 1.0, 3, 1).unwrap();
        let f = QSignal::from_fn(grid.clone(), |x| Quaternion::real((-(x[0] * x[0] + x[1] * x[1])).exp()) * Quaternion::exp_i(4.0 * x[0]));
        let c = sh_forward(&f, &psi, &pg).unwrap();
        let tol = Tolerance::default();
        let t = log_up_check(&f, &c, &psi, LogMode::TOnly, &tol).unwrap();
        let full = log_up_check(&f, &c, &psi, LogMode::Full, &tol).unwrap();
        assert!(full.lhs >= t.lhs);
        assert_eq!(full.rhs, t.rhs);
    }
}
