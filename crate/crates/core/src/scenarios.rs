//! Canned configurations for the slab, diode and smooth periodic problems.

use std::fmt;

use crate::boundary::{BoundarySpec, InjectionData};
use crate::collision::{build_kernel, KernelKind, DEFAULT_EPI_CONSTANT};
use crate::error::{Error, Result};
use crate::field::{test1_constant, DopingProfile, FieldSpec, Prescribed};
use crate::imex::{well_prepared_psi, DoubleButcherTableau, ParityState, Problem};
use crate::quadrature::build_basis;
use crate::spatial::{SpatialGrid, WenoOrder};

pub const SCENARIO_NAMES: [&str; 6] = ["test1_kinetic", "test1_fluid", "test2_kinetic", "test2_fluid", "test3", "smooth_periodic"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioBoundary {
    Periodic,
    /// Incoming Maxwellians of the given densities on the left and right.
    Injection { left: f64, right: f64, psi_neumann: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialKind {
    /// f₀ = c M, so φ ≡ c.
    Maxwellian(f64),
    /// φ = mean + amplitude sin(2πx).
    Sine { mean: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub nx: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub nv: usize,
    pub eps: f64,
    pub kernel: KernelKind,
    pub epi_constant: f64,
    pub beta: f64,
    pub scheme: String,
    pub t_final: f64,
    pub c_h: f64,
    pub c_m: f64,
    pub field: FieldSpec,
    pub source: f64,
    pub boundary: ScenarioBoundary,
    pub initial: InitialKind,
    pub well_prepared: bool,
    pub weno: usize,
    /// Fixed step, bypassing the CFL rule.
    pub dt: Option<f64>,
}

fn base(name: &str) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        nx: 50,
        x_lo: 0.0,
        x_hi: 1.0,
        nv: 16,
        eps: 1.0,
        kernel: KernelKind::Rta,
        epi_constant: DEFAULT_EPI_CONSTANT,
        beta: 1.0,
        scheme: "ars222".into(),
        t_final: 0.1,
        c_h: 0.5,
        c_m: 0.5,
        field: FieldSpec::Prescribed(Prescribed::Zero),
        source: 0.0,
        boundary: ScenarioBoundary::Injection { left: 1.0, right: 1.0, psi_neumann: false },
        initial: InitialKind::Maxwellian(1.0),
        well_prepared: false,
        weno: 3,
        dt: None,
    }
}

pub fn scenario(name: &str) -> Result<ScenarioConfig> {
    let well = FieldSpec::Prescribed(Prescribed::GaussianWell { c: test1_constant() });
    let slab = |c: &mut ScenarioConfig| {
        c.field = FieldSpec::Prescribed(Prescribed::Linear { slope: 1.0 });
        c.source = 1.0;
        c.initial = InitialKind::Maxwellian(0.0);
        c.boundary = ScenarioBoundary::Injection { left: 0.0, right: 0.0, psi_neumann: false };
    };
    let cfg = match name {
        "test1_kinetic" => ScenarioConfig { t_final: 0.08, field: well, ..base(name) },
        "test1_fluid" => ScenarioConfig { eps: 0.002, t_final: 0.03, field: well, ..base(name) },
        "test2_kinetic" => {
            let mut c = ScenarioConfig { t_final: 0.5, ..base(name) };
            slab(&mut c);
            c
        }
        "test2_fluid" => {
            let mut c = ScenarioConfig { eps: 0.001, t_final: 0.1, nx: 20, ..base(name) };
            slab(&mut c);
            c
        }
        "test3" => ScenarioConfig {
            eps: 0.001,
            c_m: 0.1,
            t_final: 0.04,
            field: FieldSpec::SelfConsistent {
                debye_gamma: 0.002,
                applied_v: 5.0,
                doping: DopingProfile { s: 0.02, m: 0.001, x1: 0.3, x2: 0.7 },
            },
            boundary: ScenarioBoundary::Injection { left: 1.0, right: 1.0, psi_neumann: true },
            ..base(name)
        },
        "smooth_periodic" => ScenarioConfig {
            nx: 64,
            t_final: 0.05,
            field: FieldSpec::Prescribed(Prescribed::Sinusoidal { amplitude: 0.5 }),
            boundary: ScenarioBoundary::Periodic,
            initial: InitialKind::Sine { mean: 1.0, amplitude: 0.5 },
            well_prepared: true,
            ..base(name)
        },
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    Ok(cfg)
}

fn weno_order(order: usize) -> Result<WenoOrder> {
    WenoOrder::from_order(order).ok_or_else(|| Error::Config(format!("WENO order must be 3 or 5, got {order}")))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad value '{value}' for '{key}'"))),
    }
}

impl ScenarioConfig {
    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "scenario" | "name" => {
                if value.trim() != self.name {
                    return Err(Error::Config("the scenario must be chosen before overrides".into()));
                }
            }
            "nx" => self.nx = parse(key, value)?,
            "nv" => self.nv = parse(key, value)?,
            "epsilon" | "eps" => self.eps = parse(key, value)?,
            "kernel" => self.kernel = value.trim().parse()?,
            "epi_constant" => self.epi_constant = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "scheme" => self.scheme = value.trim().to_string(),
            "tfinal" | "t_final" => self.t_final = parse(key, value)?,
            "cfl" => {
                let c: f64 = parse(key, value)?;
                self.c_h = c;
                self.c_m = c;
            }
            "c_h" => self.c_h = parse(key, value)?,
            "c_m" => self.c_m = parse(key, value)?,
            "source" => self.source = parse(key, value)?,
            "well_prepared" => self.well_prepared = parse_bool(key, value)?,
            "weno" => self.weno = parse(key, value)?,
            "dt" => self.dt = Some(parse(key, value)?),
            other => return Err(Error::Config(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies the `key=value` lines of a flat configuration text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nx", self.nx as f64),
            ("nv", self.nv as f64),
            ("epsilon", self.eps),
            ("tfinal", self.t_final),
            ("c_h", self.c_h),
            ("c_m", self.c_m),
            ("beta", self.beta),
            ("epi_constant", self.epi_constant),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("'{k}' must be positive, got {v}")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::Config(format!("'dt' must be positive, got {dt}")));
            }
        }
        if !self.nv.is_multiple_of(2) {
            return Err(Error::Config(format!("nv must be even, got {}", self.nv)));
        }
        if !(self.x_hi > self.x_lo) {
            return Err(Error::Config("empty domain".into()));
        }
        weno_order(self.weno)?;
        DoubleButcherTableau::by_name(&self.scheme)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.nx, self.x_lo, self.x_hi)
    }

    pub fn boundary_spec(&self) -> BoundarySpec {
        match self.boundary {
            ScenarioBoundary::Periodic => BoundarySpec::Periodic,
            ScenarioBoundary::Injection { left, right, psi_neumann } => {
                BoundarySpec::Injection { injection: InjectionData::maxwellian(self.nv, left, right), psi_neumann }
            }
        }
    }

    /// Builds the discrete problem; the time step comes from [`time_step`].
    pub fn build_problem(&self) -> Result<Problem> {
        self.validate()?;
        let basis = build_basis(self.nv)?;
        let kernel = build_kernel(self.kernel, &basis, self.epi_constant, self.beta)?;
        let tableau = DoubleButcherTableau::by_name(&self.scheme)?;
        let mut p = Problem::new(basis, kernel, self.grid()?, self.eps, self.field.clone(), self.source, self.boundary_spec(), tableau)?;
        p.weno = weno_order(self.weno)?;
        Ok(p)
    }

    /// Step size and count: the fixed `dt` if given, otherwise the hyperbolic
    /// rule c_H ε Δx/vmax when ε ≥ Δx and c_M Δx below; either way shrunk so
    /// that an integer number of steps lands on `t_final`.
    pub fn time_step(&self, problem: &Problem) -> (f64, usize) {
        let raw = self.dt.unwrap_or_else(|| problem.cfl_dt(self.c_h, self.c_m));
        let n = ((self.t_final / raw) - 1e-9).ceil().max(1.0) as usize;
        (self.t_final / n as f64, n)
    }

    /// Flat `key=value` echo of the effective configuration.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let field = match &self.field {
            FieldSpec::Prescribed(p) => format!("{p:?}"),
            FieldSpec::SelfConsistent { debye_gamma, applied_v, doping } => format!(
                "poisson(gamma={debye_gamma}, v={applied_v}, s={}, m={}, x1={}, x2={})",
                doping.s, doping.m, doping.x1, doping.x2
            ),
        };
        let dt = self.dt.map(|d| d.to_string()).unwrap_or_else(|| "auto".into());
        for (k, v) in [
            ("scenario", self.name.clone()),
            ("scheme", self.scheme.clone()),
            ("epsilon", self.eps.to_string()),
            ("nx", self.nx.to_string()),
            ("nv", self.nv.to_string()),
            ("kernel", self.kernel.to_string()),
            ("epi_constant", self.epi_constant.to_string()),
            ("beta", self.beta.to_string()),
            ("tfinal", self.t_final.to_string()),
            ("c_h", self.c_h.to_string()),
            ("c_m", self.c_m.to_string()),
            ("dt", dt),
            ("field", field),
            ("source", self.source.to_string()),
            ("boundary", format!("{:?}", self.boundary)),
            ("initial", format!("{:?}", self.initial)),
            ("well_prepared", self.well_prepared.to_string()),
            ("weno", self.weno.to_string()),
        ] {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.echo())
    }
}

/// Initial parity state; ψ solves the discrete limit relation when well prepared.
pub fn initialize(config: &ScenarioConfig, problem: &Problem) -> Result<ParityState> {
    let nx = problem.nx();
    let col: Vec<f64> = match config.initial {
        InitialKind::Maxwellian(c) => vec![c; nx],
        InitialKind::Sine { mean, amplitude } => {
            let tp = 2.0 * std::f64::consts::PI;
            problem.grid.centers().iter().map(|x| mean + amplitude * (tp * x).sin()).collect()
        }
    };
    let phi: Vec<f64> = (0..problem.nv()).flat_map(|_| col.iter().copied()).collect();
    let psi = if config.well_prepared { well_prepared_psi(problem, &phi)? } else { vec![0.0; phi.len()] };
    ParityState::from_fields(nx, phi, psi, 0.0, &problem.basis)
}
