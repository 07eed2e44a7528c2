//! Standard test inputs and the verification battery over them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{synthesize_atom, wedge, ShearletGenerator};
use crate::error::{Error, Result};
use crate::group::{make_param_grid, GroupPoint, ParamGrid};
use crate::quaternion::Quaternion;
use crate::signal::{lp_norm, Grid, QSignal};
use crate::transform::{sh_forward, CoeffStack};
use crate::uncertainty::{
    donoho_stark_check, entropy_check, lieb_check, lieb_concentration_check, log_up_check, plancherel_check, LiebNorms, LogMode,
    Tolerance, VerdictReport,
};

/// Families of checks the battery can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Plancherel,
    DonohoStark,
    Lieb,
    LiebConcentration,
    LogUp,
    Entropy,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::Plancherel, Check::DonohoStark, Check::Lieb, Check::LiebConcentration, Check::LogUp, Check::Entropy];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub n: usize,
    pub size: usize,
    pub spacing: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub n_a: usize,
    pub s_max: f64,
    pub n_s: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub checks: Vec<Check>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            n: 1,
            size: 64,
            spacing: 0.2,
            a_min: 0.125,
            a_max: 2.0,
            n_a: 16,
            s_max: 1.5,
            n_s: 9,
            seed: 0,
            tolerance: Tolerance::default(),
            checks: Check::ALL.to_vec(),
        }
    }
}

impl BatteryConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::centered(self.n, self.size, self.spacing)
    }

    pub fn param_grid(&self) -> Result<ParamGrid> {
        make_param_grid(self.a_min, self.a_max, self.n_a, self.s_max, self.n_s, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Gaussian,
    Atom,
    BandLimited,
}

#[derive(Clone, Debug)]
pub struct TestInput {
    pub name: String,
    pub kind: InputKind,
    pub signal: QSignal,
}

/// `e^{-|x-c|²/γ²} + j e^{-|x-c|²}`.
pub fn gaussian_f(grid: &Grid, gamma: f64, center: &[f64]) -> QSignal {
    let c = center.to_vec();
    QSignal::from_fn(grid.clone(), move |x| {
        let r2: f64 = x.iter().zip(&c).map(|(p, q)| (p - q) * (p - q)).sum();
        Quaternion::new((-r2 / (gamma * gamma)).exp(), 0.0, (-r2).exp(), 0.0)
    })
}

/// Sum of six Gaussian wave packets `e^{2πi u·x} q e^{2πj v·y} e^{-|x-x_m|²/2σ²}` whose spectra sit
/// inside the frequency cone the default parameter box covers.
pub fn band_limited_noise(grid: &Grid, seed: u64) -> QSignal {
    let n = grid.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = 1.4;
    let packets: Vec<(Vec<f64>, Vec<f64>, Quaternion)> = (0..6)
        .map(|_| {
            let center: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mut freq: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-0.08..0.08)).collect();
            freq[0] = sign * rng.gen_range(1.8..2.2);
            let q = Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (center, freq, q)
        })
        .collect();
    QSignal::from_fn(grid.clone(), move |x| {
        let mut acc = Quaternion::ZERO;
        for (c, w, q) in &packets {
            let r2: f64 = x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum();
            let env = (-r2 / (2.0 * sigma * sigma)).exp();
            let left: f64 = (0..n).map(|p| w[p] * x[p]).sum();
            let right: f64 = (n..2 * n).map(|p| w[p] * x[p]).sum();
            acc += Quaternion::exp_i(2.0 * PI * left) * *q * Quaternion::exp_j(2.0 * PI * right) * env;
        }
        acc
    })
}

pub fn standard_inputs(cfg: &BatteryConfig, psi: &ShearletGenerator) -> Result<Vec<TestInput>> {
    let grid = cfg.grid()?;
    let n = cfg.n;
    let mut out = Vec::new();
    for gamma in [0.5, 1.0, 2.0] {
        out.push(TestInput { name: format!("gaussian-{gamma}"), kind: InputKind::Gaussian, signal: gaussian_f(&grid, gamma, &vec![0.0; 2 * n]) });
    }
    for c in [[2.5, -1.5], [-3.0, 2.0]] {
        let center: Vec<f64> = (0..2 * n).map(|p| c[p % 2]).collect();
        out.push(TestInput {
            name: format!("shifted-gaussian-{}-{}", c[0], c[1]),
            kind: InputKind::Gaussian,
            signal: gaussian_f(&grid, 1.0, &center),
        });
    }
    let atoms = [(0.7, 0.4, [1.0, -0.5]), (-1.2, -0.3, [0.0, 0.0])];
    for (a, s, t) in atoms {
        let g = GroupPoint::new(a, vec![s; 2 * n - 1], (0..2 * n).map(|p| t[p % 2]).collect())?;
        out.push(TestInput { name: format!("atom-{a}-{s}"), kind: InputKind::Atom, signal: synthesize_atom(psi, &g, &grid)? });
    }
    for k in 0..2 {
        let seed = cfg.seed.wrapping_mul(2).wrapping_add(k);
        out.push(TestInput { name: format!("band-limited-{k}"), kind: InputKind::BandLimited, signal: band_limited_noise(&grid, seed) });
    }
    Ok(out)
}

/// The bundled generator pair: ψ (the primary wedge) and φ (a narrower second wedge).
pub fn standard_generators(n: usize) -> Result<(ShearletGenerator, ShearletGenerator)> {
    Ok((wedge(n, 1.0, 1.0)?, wedge(n, 0.75, 0.8)?))
}

pub const LIEB_EXPONENTS: [f64; 5] = [1.0, 2.5, 3.0, 4.0, 16.0];
pub const DONOHO_STARK_XI: [f64; 3] = [0.0, 0.3, 0.5];

fn sort_key(r: &VerdictReport) -> (String, String, u64, u64) {
    let key = |k: &str| r.constants.get(k).map_or(0, |v| v.to_bits());
    (r.name.clone(), r.input.clone(), key("p"), key("xi"))
}

fn checks_for(
    cfg: &BatteryConfig,
    input: &TestInput,
    partner: &TestInput,
    psi: &ShearletGenerator,
    phi: &ShearletGenerator,
    pg: &ParamGrid,
) -> Result<Vec<VerdictReport>> {
    let tol = &cfg.tolerance;
    let f = &input.signal;
    let want = |c: Check| cfg.checks.contains(&c);
    let stack: CoeffStack = sh_forward(f, psi, pg)?;
    let mut out = Vec::new();
    if want(Check::Plancherel) && input.kind == InputKind::BandLimited {
        out.push(plancherel_check(f, &stack, tol));
    }
    if want(Check::DonohoStark) {
        for xi in DONOHO_STARK_XI {
            out.push(donoho_stark_check(&stack, psi, xi, tol)?);
        }
    }
    if want(Check::LiebConcentration) {
        for p in [3.0, 4.0] {
            for xi in [0.0, 0.5] {
                out.push(lieb_concentration_check(&stack, psi, xi, p, tol)?);
            }
        }
    }
    if want(Check::LogUp) && input.kind == InputKind::Gaussian {
        out.push(log_up_check(f, &stack, psi, LogMode::TOnly, tol)?);
        out.push(log_up_check(f, &stack, psi, LogMode::Full, tol)?);
    }
    if want(Check::Lieb) {
        let g = &partner.signal;
        let c_phi = sh_forward(f, phi, pg)?;
        let c_psi = sh_forward(g, psi, pg)?;
        let norms = LiebNorms { f: lp_norm(f, 2.0)?, g: lp_norm(g, 2.0)?, phi: phi.l2_norm(), psi: psi.l2_norm() };
        for p in LIEB_EXPONENTS {
            let mut r = lieb_check(&c_phi, &c_psi, norms, p, tol)?;
            r.notes.push(format!("g = {}", partner.name));
            out.push(r);
        }
    }
    if want(Check::Entropy) {
        let unit_psi = psi.scaled(1.0 / psi.l2_norm());
        let unit_f = f.scale(1.0 / lp_norm(f, 2.0)?);
        let c_unit = sh_forward(&unit_f, &unit_psi, pg)?;
        let mut r = entropy_check(&unit_f, &unit_psi, &c_unit, tol)?;
        r.notes.push("unit-norm f and psi".into());
        out.push(r);
        let f3 = f.scale(3.0);
        let mut r = entropy_check(&f3, psi, &stack.scale(3.0), tol)?;
        r.notes.push("f rescaled by 3".into());
        out.push(r);
    }
    Ok(out.into_iter().map(|r| r.with_input(input.name.clone())).collect())
}

/// Runs every selected check on every standard input; reports are sorted by check name, then input.
pub fn run_battery(cfg: &BatteryConfig) -> Result<Vec<VerdictReport>> {
    if cfg.checks.is_empty() {
        return Err(Error::InvalidParameter("battery selection is empty".into()));
    }
    let (psi, phi) = standard_generators(cfg.n)?;
    let pg = cfg.param_grid()?;
    let inputs = standard_inputs(cfg, &psi)?;
    let nested: Vec<Vec<VerdictReport>> = (0..inputs.len())
        .into_par_iter()
        .map(|i| checks_for(cfg, &inputs[i], &inputs[(i + 1) % inputs.len()], &psi, &phi, &pg))
        .collect::<Result<_>>()?;
    let mut all: Vec<VerdictReport> = nested.into_iter().flatten().collect();
    all.sort_by_cached_key(sort_key);
    Ok(all)
}
