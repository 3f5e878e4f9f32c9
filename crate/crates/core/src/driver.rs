//! Run loop, temporal self-convergence harness and the small-ε comparison
//! against the drift-diffusion reference.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::current_density;
use crate::imex::{ParityState, Stepper};
use crate::refsolver::{dd_run, DdBoundary, DdConfig};
use crate::scenarios::{initialize, ScenarioBoundary, ScenarioConfig};

/// ε above which the small-ε comparison is reported as not meaningful.
pub const AP_EPS_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub scheme: String,
    pub eps: f64,
    pub nx: usize,
    pub nv: usize,
    pub dt: f64,
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub potential: Vec<f64>,
    pub current: Vec<f64>,
    pub mass_initial: f64,
    pub mass_final: f64,
    /// Relative mass drift, reported on periodic domains only.
    pub conservation_drift: Option<f64>,
    /// Largest density seen at any step, including the initial one.
    pub peak_density: f64,
    /// ‖ρ^{n+1} − ρ^n‖_∞ / Δt after every step.
    pub residual_trace: Vec<f64>,
    pub config_echo: String,
}

impl RunReport {
    pub fn csv_name(&self) -> String {
        format!("{}_{}_t{}.csv", self.scenario, self.scheme, self.final_time)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,rho,potential,current\n");
        for i in 0..self.x.len() {
            s.push_str(&format!("{},{},{},{}\n", self.x[i], self.rho[i], self.potential[i], self.current[i]));
        }
        s
    }

    /// Writes the profile CSV into `dir` and returns its path.
    pub fn write_csv(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(self.csv_name());
        let mut f = fs::File::create(&path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(path)
    }

    pub fn summary(&self) -> String {
        let mut s = String::from("# effective configuration\n");
        s.push_str(&self.config_echo);
        s.push_str("# run\n");
        s.push_str(&format!("dt={}\nsteps={}\nfinal_time={}\nwall_seconds={:.3}\n", self.dt, self.steps, self.final_time, self.wall_seconds));
        s.push_str(&format!("mass_initial={}\nmass_final={}\npeak_density={}\n", self.mass_initial, self.mass_final, self.peak_density));
        if let Some(d) = self.conservation_drift {
            s.push_str(&format!("conservation_drift={d:e}\n"));
        }
        if let Some(r) = self.residual_trace.last() {
            s.push_str(&format!("final_residual={r:e}\n"));
        }
        s
    }
}

/// Runs a configuration to its final time.
pub fn run(config: &ScenarioConfig) -> Result<(RunReport, ParityState)> {
    let start = Instant::now();
    let problem = config.build_problem()?;
    let (dt, steps) = config.time_step(&problem);
    let mut state = initialize(config, &problem)?;
    let dx = problem.grid.dx;
    let mass_initial = state.mass(dx);
    let mut peak = state.rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut trace = Vec::with_capacity(steps);
    let mut stepper = Stepper::new(&problem, dt)?;
    for n in 0..steps {
        let next = stepper.step(&state)?;
        let change = next.rho.iter().zip(&state.rho).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        trace.push(change / dt);
        peak = peak.max(next.rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        state = next;
        // Pin the clock to the step count rather than accumulating round-off.
        state.time = (n + 1) as f64 * dt;
    }
    let field = problem.field_sample(&state.rho)?;
    let mass_final = state.mass(dx);
    let conservation_drift = match config.boundary {
        ScenarioBoundary::Periodic => {
            let expected = mass_initial + config.source * config.t_final * (config.x_hi - config.x_lo);
            Some((mass_final - expected).abs() / expected.abs().max(f64::MIN_POSITIVE))
        }
        ScenarioBoundary::Injection { .. } => None,
    };
    let report = RunReport {
        scenario: config.name.clone(),
        scheme: config.scheme.clone(),
        eps: config.eps,
        nx: config.nx,
        nv: config.nv,
        dt,
        steps,
        final_time: state.time,
        wall_seconds: start.elapsed().as_secs_f64(),
        x: problem.grid.centers(),
        rho: state.rho.clone(),
        potential: field.potential,
        current: current_density(&state.psi, &problem.basis.nodes, &problem.basis.weights, problem.nx(), problem.eps),
        mass_initial,
        mass_final,
        conservation_drift,
        peak_density: peak,
        residual_trace: trace,
        config_echo: config.echo(),
    };
    Ok((report, state))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub dts: Vec<f64>,
    /// Δx Σ|ρ_k − ρ_{k+1}| between successive levels.
    pub errors: Vec<f64>,
    /// log₂ of successive error ratios.
    pub orders: Vec<f64>,
}

impl ConvergenceTable {
    pub fn render(&self) -> String {
        let mut s = String::from("dt,error,order\n");
        for (k, e) in self.errors.iter().enumerate() {
            let o = if k == 0 { String::from("-") } else { format!("{:.3}", self.orders[k - 1]) };
            s.push_str(&format!("{:e},{:e},{}\n", self.dts[k], e, o));
        }
        s
    }

    pub fn last_order(&self) -> Option<f64> {
        self.orders.last().copied()
    }
}

/// Temporal self-convergence: `levels` runs with Δt halved each time.
pub fn converge(config: &ScenarioConfig, levels: usize) -> Result<ConvergenceTable> {
    if levels < 3 {
        return Err(Error::TooFewPoints { needed: 3, found: levels });
    }
    let problem = config.build_problem()?;
    let (dt0, _) = config.time_step(&problem);
    let dx = problem.grid.dx;
    let mut profiles = Vec::with_capacity(levels);
    let mut dts = Vec::with_capacity(levels);
    for k in 0..levels {
        let mut c = config.clone();
        c.dt = Some(dt0 / (1u64 << k) as f64);
        let (r, _) = run(&c)?;
        dts.push(r.dt);
        profiles.push(r.rho);
    }
    let errors: Vec<f64> = profiles
        .windows(2)
        .map(|w| dx * w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).sum::<f64>())
        .collect();
    let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ConvergenceTable { dts, errors, orders })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApReport {
    pub eps: f64,
    pub dx: f64,
    pub l1: f64,
    pub linf: f64,
    pub kinetic: RunReport,
    pub reference: Vec<f64>,
    /// Set when ε is too large for the comparison to mean anything.
    pub note: Option<String>,
}

impl ApReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        if let Some(n) = &self.note {
            s.push_str(&format!("note: {n}\n"));
        }
        s.push_str(&format!("epsilon={}\ndx={}\nl1={:e}\nlinf={:e}\n", self.eps, self.dx, self.l1, self.linf));
        s
    }
}

/// Kinetic run versus the drift-diffusion reference on the same grid.
pub fn ap_check(config: &ScenarioConfig) -> Result<ApReport> {
    let problem = config.build_problem()?;
    let (kinetic, _) = run(config)?;
    let bc = match config.boundary {
        ScenarioBoundary::Periodic => DdBoundary::Periodic,
        ScenarioBoundary::Injection { left, right, .. } => DdBoundary::Dirichlet { left, right },
    };
    let init = initialize(config, &problem)?;
    let dd = DdConfig {
        grid: problem.grid,
        bc,
        d: problem.kernel.diffusion_d,
        eta: problem.kernel.mobility(),
        field: config.field.clone(),
        source: config.source,
        rho0: init.rho,
        t_final: config.t_final,
        safety: 0.5,
    };
    let reference = dd_run(&dd, 0)?.last().rho.clone();
    let dx = problem.grid.dx;
    let l1 = dx * kinetic.rho.iter().zip(&reference).map(|(a, b)| (a - b).abs()).sum::<f64>();
    let linf = kinetic.rho.iter().zip(&reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let note = (config.eps > AP_EPS_THRESHOLD).then(|| "kinetic regime, AP check not meaningful".to_string());
    Ok(ApReport { eps: config.eps, dx, l1, linf, kinetic, reference, note })
}

/// Index of the largest residual and the factor by which the final one is below it.
pub fn residual_decay(trace: &[f64]) -> Option<(usize, f64)> {
    let (k, peak) = trace.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &r)| if r > b.1 { (i, r) } else { b });
    let last = *trace.last()?;
    Some((k, peak / last))
}
