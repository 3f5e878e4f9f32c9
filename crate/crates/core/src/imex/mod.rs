//! IMEX Runge-Kutta integration of the penalized parity system.
//!
//! Unknowns are stored node-major: value `(i, j)` (cell `i`, velocity node
//! `j`) lives at `j * nx + i`.

pub mod stepper;
pub mod tableau;

pub use stepper::{step, well_prepared_psi, Stepper};
pub use tableau::{
    classify, tableau_ars222, tableau_bpr353, tableau_euler, DoubleButcherTableau, SchemeClassification, SchemeKind,
};

use crate::boundary::{BoundarySpec, Regime, WallContext};
use crate::collision::KernelSpec;
use crate::error::{Error, Result};
use crate::field::{sample_prescribed, solve_poisson, FieldSample, FieldSpec};
use crate::quadrature::GaussHermiteBasis;
use crate::spatial::{viscosity_pair, SpatialGrid, ViscosityPair, WenoOrder};

#[derive(Debug, Clone, PartialEq)]
pub struct ParityState {
    pub nx: usize,
    pub nv: usize,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub time: f64,
    pub rho: Vec<f64>,
}

/// ρ_i = Σ_j w_j φ_ij, summed in node order.
pub fn compute_density(phi: &[f64], nx: usize, basis: &GaussHermiteBasis) -> Vec<f64> {
    let mut rho = vec![0.0; nx];
    for (j, w) in basis.weights.iter().enumerate() {
        for (r, p) in rho.iter_mut().zip(&phi[j * nx..(j + 1) * nx]) {
            *r += w * p;
        }
    }
    rho
}

impl ParityState {
    pub fn zeros(nx: usize, nv: usize) -> Self {
        Self { nx, nv, phi: vec![0.0; nx * nv], psi: vec![0.0; nx * nv], time: 0.0, rho: vec![0.0; nx] }
    }

    pub fn from_fields(nx: usize, phi: Vec<f64>, psi: Vec<f64>, time: f64, basis: &GaussHermiteBasis) -> Result<Self> {
        let nv = basis.nv;
        for len in [phi.len(), psi.len()] {
            if len != nx * nv {
                return Err(Error::LengthMismatch { expected: nx * nv, found: len });
            }
        }
        let rho = compute_density(&phi, nx, basis);
        Ok(Self { nx, nv, phi, psi, time, rho })
    }

    pub fn refresh_density(&mut self, basis: &GaussHermiteBasis) {
        self.rho = compute_density(&self.phi, self.nx, basis);
    }

    pub fn phi_node(&self, j: usize) -> &[f64] {
        &self.phi[j * self.nx..(j + 1) * self.nx]
    }

    pub fn psi_node(&self, j: usize) -> &[f64] {
        &self.psi[j * self.nx..(j + 1) * self.nx]
    }

    pub fn phi_at(&self, i: usize, j: usize) -> f64 {
        self.phi[j * self.nx + i]
    }

    pub fn psi_at(&self, i: usize, j: usize) -> f64 {
        self.psi[j * self.nx + i]
    }

    /// Σ_i ρ_i Δx.
    pub fn mass(&self, dx: f64) -> f64 {
        self.rho.iter().sum::<f64>() * dx
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.phi.iter().chain(&self.psi).all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { what: "parity state".into(), time: self.time })
        }
    }
}

/// Everything a step needs besides the state.
#[derive(Debug, Clone)]
pub struct Problem {
    pub basis: GaussHermiteBasis,
    pub kernel: KernelSpec,
    pub grid: SpatialGrid,
    pub eps: f64,
    /// Diffusion switch μ ∈ {0, 1}.
    pub mu: f64,
    pub visc: ViscosityPair,
    pub field: FieldSpec,
    pub source: f64,
    pub bc: BoundarySpec,
    pub tableau: DoubleButcherTableau,
    pub weno: WenoOrder,
    /// Order of the central Φ_xx stencil, 2 or 4.
    pub laplacian_order: usize,
    /// Wall extrapolation order, 2 or 3.
    pub bc_order: usize,
}

impl Problem {
    /// Defaults: μ = 1 iff ε < Δx, viscosities from ε, WENO3, and
    /// Laplacian/boundary orders matched to the tableau order.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        basis: GaussHermiteBasis,
        kernel: KernelSpec,
        grid: SpatialGrid,
        eps: f64,
        field: FieldSpec,
        source: f64,
        bc: BoundarySpec,
        tableau: DoubleButcherTableau,
    ) -> Result<Self> {
        if kernel.nv() != basis.nv {
            return Err(Error::LengthMismatch { expected: basis.nv, found: kernel.nv() });
        }
        let visc = viscosity_pair(eps)?;
        classify(&tableau)?;
        let mu = if eps < grid.dx { 1.0 } else { 0.0 };
        let third = tableau.order >= 3;
        Ok(Self {
            basis,
            kernel,
            grid,
            eps,
            mu,
            visc,
            field,
            source,
            bc,
            tableau,
            weno: WenoOrder::Three,
            laplacian_order: if third { 4 } else { 2 },
            bc_order: if third { 3 } else { 2 },
        })
    }

    pub fn nx(&self) -> usize {
        self.grid.nx
    }

    pub fn nv(&self) -> usize {
        self.basis.nv
    }

    pub fn regime(&self) -> Regime {
        if self.mu > 0.0 {
            Regime::Diffusive
        } else {
            Regime::Kinetic
        }
    }

    pub fn wall_ctx(&self, e_wall: [f64; 2]) -> WallContext<'_> {
        WallContext {
            grid: &self.grid,
            basis: &self.basis,
            kernel: &self.kernel,
            eps: self.eps,
            order: self.bc_order,
            regime: self.regime(),
            e_wall,
        }
    }

    pub fn field_sample(&self, rho: &[f64]) -> Result<FieldSample> {
        match &self.field {
            FieldSpec::Prescribed(mode) => Ok(sample_prescribed(mode, &self.grid)),
            FieldSpec::SelfConsistent { debye_gamma, applied_v, doping } => {
                solve_poisson(rho, *debye_gamma, *applied_v, doping, &self.grid)
            }
        }
    }

    /// Hyperbolic step c_H ε Δx / vmax when ε ≥ Δx, otherwise c_M Δx.
    pub fn cfl_dt(&self, c_h: f64, c_m: f64) -> f64 {
        if self.eps >= self.grid.dx {
            c_h * self.eps * self.grid.dx / self.basis.vmax
        } else {
            c_m * self.grid.dx
        }
    }
}
