//! Scattering kernels and the collision/penalization operators in
//! φ-representation (r = φM).

use crate::error::{Error, Result};
use crate::quadrature::GaussHermiteBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Rta,
    Epi,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rta" => Ok(KernelKind::Rta),
            "epi" => Ok(KernelKind::Epi),
            other => Err(Error::Config(format!("unknown kernel '{other}'"))),
        }
    }
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelKind::Rta => "rta",
            KernelKind::Epi => "epi",
        })
    }
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub epi_constant: f64,
    pub penalty_beta: f64,
    /// Row-major `nv × nv`.
    pub sigma_matrix: Vec<f64>,
    pub lambda: Vec<f64>,
    pub diffusion_d: f64,
    nv: usize,
    /// σ_ij w_j, the weighted rows used by Q̃.
    weighted: Vec<f64>,
}

pub const DEFAULT_EPI_CONSTANT: f64 = 0.1;

fn smoothed_delta(x: f64, c: f64) -> f64 {
    (-c * x * x).exp()
}

pub fn build_kernel(kind: KernelKind, basis: &GaussHermiteBasis, c: f64, beta: f64) -> Result<KernelSpec> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("EPI constant must be positive, got {c}")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("penalty beta must be positive, got {beta}")));
    }
    let nv = basis.nv;
    let mut sigma = vec![0.0; nv * nv];
    for i in 0..nv {
        for j in 0..nv {
            sigma[i * nv + j] = match kind {
                KernelKind::Rta => 1.0,
                KernelKind::Epi => {
                    let d = basis.nodes[i].powi(2) - basis.nodes[j].powi(2);
                    smoothed_delta(d + 1.0, c) + smoothed_delta(d - 1.0, c)
                }
            };
        }
    }
    let mut weighted = vec![0.0; nv * nv];
    let mut lambda = vec![0.0; nv];
    for i in 0..nv {
        for j in 0..nv {
            weighted[i * nv + j] = sigma[i * nv + j] * basis.weights[j];
        }
        lambda[i] = weighted[i * nv..(i + 1) * nv].iter().sum();
    }
    let diffusion_d = (0..nv).map(|j| basis.weights[j] * basis.nodes[j].powi(2) / lambda[j]).sum();
    Ok(KernelSpec {
        kind,
        epi_constant: c,
        penalty_beta: beta,
        sigma_matrix: sigma,
        lambda,
        diffusion_d,
        nv,
        weighted,
    })
}

impl KernelSpec {
    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn sigma(&self, i: usize, j: usize) -> f64 {
        self.sigma_matrix[i * self.nv + j]
    }

    /// Mobility η = 2D.
    pub fn mobility(&self) -> f64 {
        2.0 * self.diffusion_d
    }

    /// Q̃(φ)_i = Σ_j σ_ij w_j (φ_j − φ_i), which equals Σ_j σ_ij w_j φ_j − λ_i φ_i.
    pub fn apply_q(&self, phi: &[f64]) -> Result<Vec<f64>> {
        if phi.len() != self.nv {
            return Err(Error::LengthMismatch { expected: self.nv, found: phi.len() });
        }
        let mut out = vec![0.0; self.nv];
        self.apply_q_into(phi, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_q_into(&self, phi: &[f64], out: &mut [f64]) {
        let nv = self.nv;
        for i in 0..nv {
            let row = &self.weighted[i * nv..(i + 1) * nv];
            let pi = phi[i];
            out[i] = row.iter().zip(phi).map(|(s, p)| s * (p - pi)).sum();
        }
    }
}

pub fn apply_q(kernel: &KernelSpec, _basis: &GaussHermiteBasis, phi: &[f64]) -> Result<Vec<f64>> {
    kernel.apply_q(phi)
}

/// Penalization L̃(φ)_i = β(ρ − φ_i).
pub fn apply_l(phi: &[f64], rho: f64, beta: f64) -> Vec<f64> {
    phi.iter().map(|p| beta * (rho - p)).collect()
}

/// (Q̃ − L̃)(φ) with L̃ in deviation form β Σ_j w_j (φ_j − φ_i), so that the
/// difference vanishes identically for RTA with β = 1. Pair exchanges are
/// formed once and applied antisymmetrically, so Σ_i w_i out_i cancels to
/// round-off of the exchanges themselves.
pub(crate) fn q_minus_l_into(kernel: &KernelSpec, basis: &GaussHermiteBasis, phi: &[f64], out: &mut [f64]) {
    let nv = kernel.nv;
    let beta = kernel.penalty_beta;
    let w = &basis.weights;
    out[..nv].fill(0.0);
    for i in 0..nv {
        for j in i + 1..nv {
            let f = (kernel.sigma_matrix[i * nv + j] - beta) * (w[i] * w[j]) * (phi[j] - phi[i]);
            out[i] += f;
            out[j] -= f;
        }
    }
    for i in 0..nv {
        out[i] /= w[i];
    }
}

/// β Σ_j w_j (φ_j − φ_i) in the same antisymmetric pair form.
pub(crate) fn penalty_into(beta: f64, weights: &[f64], phi: &[f64], out: &mut [f64]) {
    let nv = weights.len();
    out[..nv].fill(0.0);
    for i in 0..nv {
        for j in i + 1..nv {
            let f = beta * (weights[i] * weights[j]) * (phi[j] - phi[i]);
            out[i] += f;
            out[j] -= f;
        }
    }
    for i in 0..nv {
        out[i] /= weights[i];
    }
}
