//! Explicit conservative drift-diffusion solver,
//!
//!   ρ_t = (D ρ_x + η ρ E)_x + G,
//!
//! used as the small-ε reference for the kinetic solver.

use crate::error::{Error, Result};
use crate::field::{prescribed_field, solve_poisson, FieldSpec};
use crate::spatial::SpatialGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusionState {
    pub rho: Vec<f64>,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DdBoundary {
    Periodic,
    /// Wall densities, imposed through ghosts 2ρ_w − ρ_0.
    Dirichlet { left: f64, right: f64 },
}

/// Largest stable step for the diffusive part, Δx²/(2D).
pub fn parabolic_limit(dx: f64, d: f64) -> f64 {
    dx * dx / (2.0 * d)
}

/// E at the nx + 1 faces from cell-centred Φ and the wall potentials.
pub fn face_field_from_potential(potential: &[f64], lo: f64, hi: f64, grid: &SpatialGrid) -> Vec<f64> {
    let n = potential.len();
    let h = grid.dx;
    let mut e = Vec::with_capacity(n + 1);
    e.push(-(potential[0] - lo) / (0.5 * h));
    for i in 0..n - 1 {
        e.push(-(potential[i + 1] - potential[i]) / h);
    }
    e.push(-(hi - potential[n - 1]) / (0.5 * h));
    e
}

/// One forward-Euler step. `e_faces` holds E at the nx + 1 faces; on a
/// periodic grid the first and last faces coincide.
#[allow(clippy::too_many_arguments)]
pub fn dd_step(
    state: &DriftDiffusionState,
    dt: f64,
    d: f64,
    eta: f64,
    e_faces: &[f64],
    source: f64,
    grid: &SpatialGrid,
    bc: DdBoundary,
) -> Result<DriftDiffusionState> {
    let n = grid.nx;
    if state.rho.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: state.rho.len() });
    }
    if e_faces.len() != n + 1 {
        return Err(Error::LengthMismatch { expected: n + 1, found: e_faces.len() });
    }
    if !(dt > 0.0) || dt > parabolic_limit(grid.dx, d) * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} violates the parabolic limit {}",
            parabolic_limit(grid.dx, d)
        )));
    }
    let rho = &state.rho;
    let h = grid.dx;
    let (ghost_l, ghost_r) = match bc {
        DdBoundary::Periodic => (rho[n - 1], rho[0]),
        DdBoundary::Dirichlet { left, right } => (2.0 * left - rho[0], 2.0 * right - rho[n - 1]),
    };
    let at = |i: isize| -> f64 {
        if i < 0 {
            ghost_l
        } else if i as usize >= n {
            ghost_r
        } else {
            rho[i as usize]
        }
    };
    let flux: Vec<f64> = (0..=n as isize)
        .map(|f| {
            let (l, r) = (at(f - 1), at(f));
            d * (r - l) / h + eta * e_faces[f as usize] * 0.5 * (l + r)
        })
        .collect();
    let next: Vec<f64> = (0..n).map(|i| rho[i] + dt * ((flux[i + 1] - flux[i]) / h + source)).collect();
    if next.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "drift-diffusion density".into(), time: state.time + dt });
    }
    Ok(DriftDiffusionState { rho: next, time: state.time + dt })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdConfig {
    pub grid: SpatialGrid,
    pub bc: DdBoundary,
    pub d: f64,
    pub eta: f64,
    pub field: FieldSpec,
    pub source: f64,
    pub rho0: Vec<f64>,
    pub t_final: f64,
    /// Fraction of the stable step actually used.
    pub safety: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdTrajectory {
    pub states: Vec<DriftDiffusionState>,
    pub steps: usize,
}

impl DdTrajectory {
    pub fn last(&self) -> &DriftDiffusionState {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn faces_for(cfg: &DdConfig, rho: &[f64]) -> Result<Vec<f64>> {
    let g = &cfg.grid;
    match &cfg.field {
        FieldSpec::Prescribed(mode) => Ok((0..=g.nx).map(|f| prescribed_field(mode, g.x_lo + f as f64 * g.dx).1).collect()),
        FieldSpec::SelfConsistent { debye_gamma, applied_v, doping } => {
            let s = solve_poisson(rho, *debye_gamma, *applied_v, doping, g)?;
            Ok(face_field_from_potential(&s.potential, 0.0, *applied_v, g))
        }
    }
}

/// Integrates to `t_final`; `record_every` > 0 keeps every such step.
pub fn dd_run(cfg: &DdConfig, record_every: usize) -> Result<DdTrajectory> {
    if cfg.rho0.len() != cfg.grid.nx {
        return Err(Error::LengthMismatch { expected: cfg.grid.nx, found: cfg.rho0.len() });
    }
    if !(cfg.d > 0.0) || !(cfg.safety > 0.0 && cfg.safety <= 1.0) || !(cfg.t_final >= 0.0) {
        return Err(Error::InvalidParameter("drift-diffusion configuration".into()));
    }
    let h = cfg.grid.dx;
    let mut state = DriftDiffusionState { rho: cfg.rho0.clone(), time: 0.0 };
    let mut states = vec![state.clone()];
    let mut steps = 0;
    while state.time < cfg.t_final * (1.0 - 1e-14) {
        let e = faces_for(cfg, &state.rho)?;
        let emax = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // Forward Euler with central drift also needs Δt ≤ 2D/(ηE)².
        let mut dt = cfg.safety * parabolic_limit(h, cfg.d);
        if emax > 0.0 {
            dt = dt.min(cfg.safety * cfg.d / (cfg.eta * emax).powi(2));
        }
        dt = dt.min(cfg.t_final - state.time);
        state = dd_step(&state, dt, cfg.d, cfg.eta, &e, cfg.source, &cfg.grid, cfg.bc)?;
        steps += 1;
        if record_every > 0 && steps % record_every == 0 {
            states.push(state.clone());
        }
    }
    if states.last().map(|s| s.time) != Some(state.time) {
        states.push(state);
    }
    Ok(DdTrajectory { states, steps })
}
