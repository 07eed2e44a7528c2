use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qshear_core::atoms::ShearletGenerator;
use qshear_core::battery::{BatteryConfig, Check};
use qshear_core::group::{make_param_grid, ParamGrid};
use qshear_core::io::make_generator;
use qshear_core::uncertainty::Tolerance;
use qshear_core::Grid;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self { name: "wedge".into(), params: BTreeMap::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSpec {
    pub a_min: f64,
    pub a_max: f64,
    pub n_a: usize,
    pub s_max: f64,
    pub n_s: usize,
}

impl Default for ParamSpec {
    fn default() -> Self {
        let b = BatteryConfig::default();
        Self { a_min: b.a_min, a_max: b.a_max, n_a: b.n_a, s_max: b.s_max, n_s: b.n_s }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub size: usize,
    pub spacing: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        let b = BatteryConfig::default();
        Self { n: b.n, size: b.size, spacing: b.spacing }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSpec {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatterySpec {
    pub checks: Vec<Check>,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self { checks: Check::ALL.to_vec() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub stack: Option<PathBuf>,
    pub signal: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub generator: GeneratorSpec,
    pub params: ParamSpec,
    pub grid: GridSpec,
    pub tolerance: ToleranceSpec,
    pub battery: BatterySpec,
    pub outputs: OutputSpec,
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Failure::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Failure::Config(format!("{name} must be non-negative and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let (p, g) = (&self.params, &self.grid);
        positive("params.a_min", p.a_min)?;
        positive("params.a_max", p.a_max)?;
        if p.a_min >= p.a_max {
            return Err(Failure::Config(format!("params.a_min ({}) must be below params.a_max ({})", p.a_min, p.a_max)));
        }
        positive("params.s_max", p.s_max)?;
        if p.n_a == 0 || p.n_s == 0 {
            return Err(Failure::Config("params.n_a and params.n_s must be at least 1".into()));
        }
        if g.n == 0 || g.size < 2 {
            return Err(Failure::Config("grid.n must be at least 1 and grid.size at least 2".into()));
        }
        positive("grid.spacing", g.spacing)?;
        if let Some(v) = self.tolerance.abs {
            non_negative("tolerance.abs", v)?;
        }
        if let Some(v) = self.tolerance.rel {
            non_negative("tolerance.rel", v)?;
        }
        if self.battery.checks.is_empty() {
            return Err(Failure::Config("battery.checks is empty".into()));
        }
        for (k, v) in &self.generator.params {
            if !v.is_finite() {
                return Err(Failure::Config(format!("generator.params.{k} must be finite")));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        let d = Tolerance::default();
        Tolerance { abs: self.tolerance.abs.unwrap_or(d.abs), rel: self.tolerance.rel.unwrap_or(d.rel) }
    }

    pub fn grid(&self) -> Result<Grid, Failure> {
        Ok(Grid::centered(self.grid.n, self.grid.size, self.grid.spacing)?)
    }

    pub fn param_grid(&self) -> Result<ParamGrid, Failure> {
        let p = &self.params;
        Ok(make_param_grid(p.a_min, p.a_max, p.n_a, p.s_max, p.n_s, self.grid.n)?)
    }

    pub fn generator(&self) -> Result<ShearletGenerator, Failure> {
        let params: Vec<(String, f64)> = self.generator.params.iter().map(|(k, v)| (k.clone(), *v)).collect();
        Ok(make_generator(&self.generator.name, self.grid.n, &params)?)
    }

    pub fn battery(&self) -> BatteryConfig {
        let (p, g) = (&self.params, &self.grid);
        BatteryConfig {
            n: g.n,
            size: g.size,
            spacing: g.spacing,
            a_min: p.a_min,
            a_max: p.a_max,
            n_a: p.n_a,
            s_max: p.s_max,
            n_s: p.n_s,
            seed: self.seed,
            tolerance: self.tolerance(),
            checks: self.battery.checks.clone(),
        }
    }
}
