//! Command-line interface: `run`, `converge` and `ap-check`.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on configuration errors
//! (including usage errors reported by the argument parser) and 3 on
//! numerical failure.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::driver::{ap_check, converge, residual_decay, run};
use crate::error::{Error, Result};
use crate::scenarios::{scenario, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "parity-ap", version, about = "AP IMEX solver for the semiconductor Boltzmann equation in parity form")]
pub struct Cli {
    /// Worker threads for the velocity-node loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario to its final time and write the density profile.
    Run(CommonArgs),
    /// Temporal self-convergence table with the step halved per level.
    Converge(ConvergeArgs),
    /// Compare the small-ε kinetic density with the drift-diffusion reference.
    ApCheck(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, default_value = "test1_kinetic")]
    pub scenario: String,
    /// Flat key=value file applied before the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    #[arg(long)]
    pub tfinal: Option<f64>,
    /// Sets both c_H and c_M.
    #[arg(long)]
    pub cfl: Option<f64>,
    /// Fixed time step, overriding the CFL rule.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub weno: Option<usize>,
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub well_prepared: bool,
    #[arg(long, default_value = "output")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of step halvings, at least 3.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Comma-separated ε values; defaults to the scenario's.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Vec<f64>,
    /// Comma-separated schemes; defaults to --scheme.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Vec<String>,
}

impl CommonArgs {
    pub fn to_config(&self) -> Result<ScenarioConfig> {
        let mut c = scenario(&self.scenario)?;
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            c.apply_text(&text)?;
        }
        if let Some(s) = &self.scheme {
            c.scheme = s.clone();
        }
        if let Some(v) = self.epsilon {
            c.eps = v;
        }
        if let Some(v) = self.nx {
            c.nx = v;
        }
        if let Some(v) = self.nv {
            c.nv = v;
        }
        if let Some(v) = self.tfinal {
            c.t_final = v;
        }
        if let Some(v) = self.cfl {
            c.c_h = v;
            c.c_m = v;
        }
        if let Some(v) = self.dt {
            c.dt = Some(v);
        }
        if let Some(v) = self.weno {
            c.weno = v;
        }
        if let Some(k) = &self.kernel {
            c.kernel = k.parse()?;
        }
        if self.well_prepared {
            c.well_prepared = true;
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn write_text(dir: &std::path::Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

/// Executes a parsed command and returns the text printed on success.
pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Run(a) => {
            let c = a.to_config()?;
            let (report, _) = run(&c)?;
            let csv = report.write_csv(&a.output_dir)?;
            let mut out = report.summary();
            let name = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            write_text(&a.output_dir, &format!("{name}.report"), &out)?;
            out.push_str(&format!("csv={}\n", csv.display()));
            Ok(out)
        }
        Command::Converge(a) => {
            let base = a.common.to_config()?;
            let schemes = if a.schemes.is_empty() { vec![base.scheme.clone()] } else { a.schemes.clone() };
            let epsilons = if a.epsilons.is_empty() { vec![base.eps] } else { a.epsilons.clone() };
            let mut out = String::from("# effective configuration\n");
            out.push_str(&base.echo());
            for s in &schemes {
                for &e in &epsilons {
                    let mut c = base.clone();
                    c.scheme = s.clone();
                    c.eps = e;
                    c.validate()?;
                    let t = converge(&c, a.levels)?;
                    out.push_str(&format!("# scheme={s} epsilon={e}\n"));
                    out.push_str(&t.render());
                }
            }
            Ok(out)
        }
        Command::ApCheck(a) => {
            let c = a.to_config()?;
            let r = ap_check(&c)?;
            let mut out = String::from("# effective configuration\n");
            out.push_str(&c.echo());
            out.push_str(&r.render());
            if let Some((k, factor)) = residual_decay(&r.kinetic.residual_trace) {
                out.push_str(&format!("residual_peak_step={k}\nresidual_decay_factor={factor:e}\n"));
            }
            out.push_str("step,residual\n");
            for (k, v) in r.kinetic.residual_trace.iter().enumerate() {
                out.push_str(&format!("{},{v:e}\n", k + 1));
            }
            Ok(out)
        }
    }
}

/// Parses, configures the thread pool and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
