//! Gauss-Hermite velocity discretization.
//!
//! With 2θ = 1 the maxwellian M(v) = π^{-1/2} e^{-v²} is the Gauss-Hermite
//! weight itself, so nodes are used unscaled and the weights absorb M.
//! The velocity derivative is spectral: a nodal function is expanded in the
//! orthonormal Hermite polynomials H̃_k and differentiated exactly.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussHermiteBasis {
    pub nv: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major `nv × nv`, entry `(i, j)` is `c_j(v_i)`.
    pub deriv_coeffs: Vec<f64>,
    pub vmax: f64,
}

/// Orthonormal Hermite values `H̃_0(v) .. H̃_{n-1}(v)` for the weight `π^{-1/2}e^{-v²}`.
pub fn hermite_orthonormal(n: usize, v: f64) -> Vec<f64> {
    let mut h = vec![0.0; n];
    if n == 0 {
        return h;
    }
    h[0] = 1.0;
    if n > 1 {
        h[1] = std::f64::consts::SQRT_2 * v;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        h[k + 1] = (std::f64::consts::SQRT_2 * v * h[k] - kf.sqrt() * h[k - 1]) / (kf + 1.0).sqrt();
    }
    h
}

/// `H̃_n(v)` and its derivative `√(2n) H̃_{n-1}(v)`.
fn hermite_with_derivative(n: usize, v: f64) -> (f64, f64) {
    let h = hermite_orthonormal(n + 1, v);
    (h[n], (2.0 * n as f64).sqrt() * h[n - 1])
}

pub fn build_basis(nv: usize) -> Result<GaussHermiteBasis> {
    if nv < 2 || !nv.is_multiple_of(2) {
        return Err(Error::InvalidNodeCount(nv));
    }

    // Golub-Welsch: the Jacobi matrix of the orthonormal recurrence.
    let mut jacobi = DMatrix::<f64>::zeros(nv, nv);
    for k in 1..nv {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    raw.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Newton polish on H̃_nv, then enforce exact ± pairing.
    for x in raw.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = hermite_with_derivative(nv, *x);
            if dp == 0.0 {
                break;
            }
            *x -= p / dp;
        }
    }
    let half = nv / 2;
    let mut nodes = vec![0.0; nv];
    for k in 0..half {
        let a = 0.5 * (raw[nv - 1 - k] - raw[k]);
        nodes[k] = -a;
        nodes[nv - 1 - k] = a;
    }

    // Christoffel numbers, symmetrized and normalized to unit mass.
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&v| 1.0 / hermite_orthonormal(nv, v).iter().map(|h| h * h).sum::<f64>())
        .collect();
    for k in 0..half {
        let w = 0.5 * (weights[k] + weights[nv - 1 - k]);
        weights[k] = w;
        weights[nv - 1 - k] = w;
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }

    let table: Vec<Vec<f64>> = nodes.iter().map(|&v| hermite_orthonormal(nv, v)).collect();
    let mut deriv_coeffs = vec![0.0; nv * nv];
    for i in 0..nv {
        for j in 0..nv {
            let mut c = 0.0;
            for k in 1..nv {
                c += (2.0 * k as f64).sqrt() * table[j][k] * table[i][k - 1];
            }
            deriv_coeffs[i * nv + j] = c * weights[j];
        }
    }

    let vmax = nodes[nv - 1];
    Ok(GaussHermiteBasis { nv, nodes, weights, deriv_coeffs, vmax })
}

impl GaussHermiteBasis {
    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nv {
            return Err(Error::LengthMismatch { expected: self.nv, found: len });
        }
        Ok(())
    }

    /// Σ_j w_j φ_j.
    pub fn density(&self, phi: &[f64]) -> Result<f64> {
        self.check_len(phi.len())?;
        Ok(self.weights.iter().zip(phi).map(|(w, p)| w * p).sum())
    }

    /// Spectral ∂_v at every node.
    pub fn velocity_derivative(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(g.len())?;
        Ok((0..self.nv)
            .map(|i| {
                let row = &self.deriv_coeffs[i * self.nv..(i + 1) * self.nv];
                row.iter().zip(g).map(|(c, x)| c * x).sum()
            })
            .collect())
    }

    /// `c_j(v_i)`.
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        self.deriv_coeffs[i * self.nv + j]
    }
}

pub fn density(basis: &GaussHermiteBasis, phi: &[f64]) -> Result<f64> {
    basis.density(phi)
}

pub fn velocity_derivative(basis: &GaussHermiteBasis, g: &[f64]) -> Result<Vec<f64>> {
    basis.velocity_derivative(g)
}
