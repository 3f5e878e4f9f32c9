//! Scalar prototype system used to study the modified viscosities:
//!
//!   u_t = −(v + μ u_x)_x + μ u_xx,    ε² v_t = u − u_x − v,
//!
//! on a periodic unit interval. The u-transport is explicit, the diffusion
//! and the v relaxation are implicit (first-order IMEX).

use crate::error::{Error, Result};
use crate::linalg::{BandedSolver, SparseRows};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrototypeFlux {
    /// α_u = 1/ε, α_v = ε.
    Physical,
    /// α_u = 1, α_v = ε².
    Modified,
}

impl PrototypeFlux {
    pub fn alphas(self, eps: f64) -> (f64, f64) {
        match self {
            PrototypeFlux::Physical => (1.0 / eps, eps),
            PrototypeFlux::Modified => (1.0, eps * eps),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PrototypeConfig {
    pub nx: usize,
    pub eps: f64,
    pub mu: f64,
    pub dt: f64,
    pub steps: usize,
    pub flux: PrototypeFlux,
}

#[derive(Debug, Clone)]
pub struct PrototypeOutcome {
    pub initial_max: f64,
    pub final_max: f64,
    /// Largest `max|u|` seen over the run, infinite once a value blows up.
    pub peak: f64,
}

impl PrototypeOutcome {
    pub fn growth(&self) -> f64 {
        self.peak / self.initial_max
    }

    pub fn bounded(&self, factor: f64) -> bool {
        self.peak.is_finite() && self.growth() <= factor
    }
}

fn periodic_tridiag(n: usize, diag: f64, off: f64) -> Result<BandedSolver> {
    let mut a = SparseRows::new(n);
    for i in 0..n {
        a.add(i, i, diag);
        a.add(i, (i + 1) % n, off);
        a.add(i, (i + n - 1) % n, off);
    }
    BandedSolver::factor(&a, 1)
}

pub fn run_prototype(cfg: &PrototypeConfig) -> Result<PrototypeOutcome> {
    let n = cfg.nx;
    if n < 4 || !(cfg.eps > 0.0) || !(cfg.dt > 0.0) {
        return Err(Error::InvalidParameter("prototype needs nx ≥ 4, ε > 0, Δt > 0".into()));
    }
    let dx = 1.0 / n as f64;
    let dt = cfg.dt;
    let eps2 = cfg.eps * cfg.eps;
    let (au, av) = cfg.flux.alphas(cfg.eps);
    let up = |i: usize| (i + 1) % n;
    let dn = |i: usize| (i + n - 1) % n;

    let tp = 2.0 * std::f64::consts::PI;
    let mut u: Vec<f64> = (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) * dx;
            1.0 + 0.5 * (tp * x).sin() + if i % 2 == 0 { 1e-3 } else { -1e-3 }
        })
        .collect();
    let mut v = vec![0.0; n];

    let r = dt / (dx * dx);
    let u_solver = periodic_tridiag(n, 1.0 + 2.0 * cfg.mu * r, -cfg.mu * r)?;
    let kv = dt * av / (2.0 * dx);
    let v_solver = periodic_tridiag(n, eps2 + dt + 2.0 * kv, -kv)?;

    let initial_max = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut peak = initial_max;
    for _ in 0..cfg.steps {
        // V-flux divergence of (u, v) gives the discrete u_x used in v*.
        let vflux = |i: usize, u: &[f64], v: &[f64]| 0.5 * ((u[up(i)] + u[i]) - av * (v[up(i)] - v[i]));
        let vstar: Vec<f64> = (0..n)
            .map(|i| v[i] + cfg.mu * (vflux(i, &u, &v) - vflux(dn(i), &u, &v)) / dx)
            .collect();
        let uflux = |i: usize| 0.5 * ((vstar[up(i)] + vstar[i]) - au * (u[up(i)] - u[i]));
        let mut rhs: Vec<f64> = (0..n).map(|i| u[i] - dt * (uflux(i) - uflux(dn(i))) / dx).collect();
        u_solver.solve_in_place(&mut rhs);
        u = rhs;

        let mut rv: Vec<f64> = (0..n)
            .map(|i| eps2 * v[i] + dt * u[i] - dt * (u[up(i)] - u[dn(i)]) / (2.0 * dx))
            .collect();
        v_solver.solve_in_place(&mut rv);
        v = rv;

        let m = u.iter().fold(0.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY });
        peak = peak.max(m);
        if !peak.is_finite() || peak > 1e12 {
            peak = f64::INFINITY;
            break;
        }
    }
    let final_max = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(PrototypeOutcome { initial_max, final_max, peak })
}
