mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qshear_core::atoms::{admissibility_report, FreqBox};
use qshear_core::battery::{gaussian_f, run_battery};
use qshear_core::io::{ingest_rgb, make_generator, read_ppm, read_qsig, read_stack, write_qsig, write_stack};
use qshear_core::qft::qft_forward;
use qshear_core::transform::{energy_mu, sh_forward, sh_reconstruct};
use qshear_core::{lp_norm, Error, QSignal};
use serde_json::{json, Value};

use config::RunConfig;

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Config(String),
    Refused(String),
    Verdict(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Refused(_) => 3,
            Failure::Verdict(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Refused(m) => write!(f, "refused: {m}"),
            Failure::Verdict(m) => write!(f, "verdict failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            Error::CommutationRefused { violation } => Failure::Refused(format!(
                "the generator violates the QFT commutation condition F_Q(f*ψ)(w) = F_Q(f)(w)·F_Q(ψ)(w) \
                 (relative violation {violation:.3e}); the sampled convolution route would not compute SH"
            )),
            e @ Error::NonAdmissibleOrUnresolved { .. } => Failure::Refused(e.to_string()),
            e @ Error::InvalidConstant(_) => Failure::Refused(e.to_string()),
            e => Failure::Config(e.to_string()),
        }
    }
}

/// Continuous quaternion shearlet transform and its uncertainty verification suite.
#[derive(Parser, Debug)]
#[command(name = "qshear", version)]
struct Cli {
    /// TOML run configuration; built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for the random battery inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Half dimension: signals live on R^(2n).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Relative verdict tolerance (the absolute floor comes from the config).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Analyse a .qsig (or .ppm) signal into a .qstk coefficient stack.
    Transform,
    /// Synthesise a .qsig signal from a .qstk stack.
    Reconstruct {
        /// Signal to measure the relative reconstruction error against.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Estimate the admissibility constant directly and on the parameter grid.
    Admissibility,
    /// Run the uncertainty verification battery.
    Verify,
    /// Two-sided quaternion Fourier transform of a .qsig signal.
    Qft,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialise"));
            ExitCode::SUCCESS
        }
        Err((e, partial)) => {
            if let Some(v) = partial {
                println!("{}", serde_json::to_string_pretty(&v).expect("json values serialise"));
            }
            eprintln!("qshear: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.n {
        cfg.grid.n = n;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance.rel = Some(t);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_path(cli: &Cli, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf, Failure> {
    cli.output
        .clone()
        .or_else(|| fallback.clone())
        .ok_or_else(|| Failure::Config(format!("no output path for the {what}: pass --output or set it under [outputs]")))
}

fn read_input(path: &Path, spacing: f64) -> Result<QSignal, Failure> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")) {
        Ok(ingest_rgb(&read_ppm(path)?, spacing)?)
    } else {
        Ok(read_qsig(path)?)
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("json values serialise");
    std::fs::write(path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Value, (Failure, Option<Value>)> {
    let cfg = load(cli).map_err(|e| (e, None))?;
    match &cli.cmd {
        Cmd::Transform => transform(cli, &cfg),
        Cmd::Reconstruct { reference } => reconstruct(cli, &cfg, reference.as_deref()),
        Cmd::Admissibility => admissibility(&cfg),
        Cmd::Qft => qft(cli, &cfg),
        Cmd::Verify => return verify(cli, &cfg),
    }
    .map_err(|e| (e, None))
}

fn transform(cli: &Cli, cfg: &RunConfig) -> Result<Value, Failure> {
    let psi = cfg.generator()?;
    let pg = cfg.param_grid()?;
    let (f, source) = match &cli.input {
        Some(p) => (read_input(p, cfg.grid.spacing)?, p.display().to_string()),
        None => (gaussian_f(&cfg.grid()?, 1.0, &vec![0.0; 2 * cfg.grid.n]), "bundled gaussian".to_string()),
    };
    let out = output_path(cli, &cfg.outputs.stack, "coefficient stack")?;
    let c = sh_forward(&f, &psi, &pg)?;
    write_stack(&out, &c)?;
    let e = energy_mu(&c);
    let norm2 = f.energy();
    Ok(json!({
        "command": "transform",
        "input": source,
        "output": out.display().to_string(),
        "generator": c.generator,
        "slices": c.slices.len(),
        "scales": c.pg.a_nodes.len(),
        "shears": c.pg.s_nodes.len(),
        "c_grid": c.c_grid,
        "energy_mu": e,
        "signal_energy": norm2,
        "plancherel_ratio": if norm2 > 0.0 { Some(e / (c.c_grid * norm2)) } else { None },
        "border": c.border,
    }))
}

fn reconstruct(cli: &Cli, cfg: &RunConfig, reference: Option<&Path>) -> Result<Value, Failure> {
    let src = cli.input.as_ref().ok_or_else(|| Failure::Config("reconstruct needs --input <stack.qstk>".into()))?;
    let c = read_stack(src)?;
    let psi = make_generator(&c.generator, c.pg.n, &c.params)?;
    let out = output_path(cli, &cfg.outputs.signal, "reconstructed signal")?;
    let f = sh_reconstruct(&c, &psi)?;
    write_qsig(&out, &f)?;
    let rel = match reference {
        Some(p) => {
            let r = read_input(p, c.grid.spacing[0])?;
            let nr = lp_norm(&r, 2.0)?;
            Some(lp_norm(&f.sub(&r)?, 2.0)? / nr)
        }
        None => None,
    };
    Ok(json!({
        "command": "reconstruct",
        "input": src.display().to_string(),
        "output": out.display().to_string(),
        "generator": c.generator,
        "c_grid": c.c_grid,
        "energy": f.energy(),
        "relative_error": rel,
    }))
}

fn admissibility(cfg: &RunConfig) -> Result<Value, Failure> {
    let psi = cfg.generator()?;
    let pg = cfg.param_grid()?;
    let mut lambda0 = vec![0.0; 2 * cfg.grid.n];
    lambda0[0] = 1.0;
    let r = admissibility_report(&psi, &FreqBox::default_for(cfg.grid.n), &pg, &lambda0)?;
    let mut v = serde_json::to_value(&r).expect("report serialises");
    v["command"] = json!("admissibility");
    v["generator"] = json!(psi.name);
    Ok(v)
}

fn qft(cli: &Cli, cfg: &RunConfig) -> Result<Value, Failure> {
    let src = cli.input.as_ref().ok_or_else(|| Failure::Config("qft needs --input <signal.qsig>".into()))?;
    let f = read_input(src, cfg.grid.spacing)?;
    let out = output_path(cli, &cfg.outputs.signal, "spectrum")?;
    let spec = qft_forward(&f);
    write_qsig(&out, &spec.values)?;
    Ok(json!({
        "command": "qft",
        "input": src.display().to_string(),
        "output": out.display().to_string(),
        "shape": spec.values.grid.shape,
        "frequency_spacing": spec.values.grid.spacing,
        "energy": f.energy(),
        "spectrum_energy": spec.values.energy(),
    }))
}

fn verify(cli: &Cli, cfg: &RunConfig) -> Result<Value, (Failure, Option<Value>)> {
    let reports = run_battery(&cfg.battery()).map_err(|e| (e.into(), None))?;
    let v = serde_json::to_value(&reports).expect("reports serialise");
    if let Some(p) = cli.output.as_ref().or(cfg.outputs.report.as_ref()) {
        write_json(p, &v).map_err(|e| (e, None))?;
    }
    match reports.iter().find(|r| !r.pass) {
        None => Ok(v),
        Some(r) => {
            let failed = reports.iter().filter(|r| !r.pass).count();
            let msg = format!(
                "{} on {} (slack {:.3e} below -{:.3e}); {failed} of {} verdicts failed",
                r.name,
                r.input,
                r.slack,
                r.tolerance,
                reports.len()
            );
            Err((Failure::Verdict(msg), Some(v)))
        }
    }
}
