//! Space discretization: cell-centred grid, modified Lax-Friedrichs
//! transport with WENO reconstruction, central second differences and
//! one-sided wall gradients.

pub mod prototype;
pub mod weno;

pub use weno::WenoOrder;

use crate::error::{Error, Result};

pub const GHOST: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub nx: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub dx: f64,
    pub ghost: usize,
}

impl SpatialGrid {
    pub fn new(nx: usize, x_lo: f64, x_hi: f64) -> Result<Self> {
        if nx == 0 || !(x_hi > x_lo) {
            return Err(Error::InvalidParameter(format!("bad grid nx={nx} [{x_lo}, {x_hi}]")));
        }
        Ok(Self { nx, x_lo, x_hi, dx: (x_hi - x_lo) / nx as f64, ghost: GHOST })
    }

    pub fn unit(nx: usize) -> Result<Self> {
        Self::new(nx, 0.0, 1.0)
    }

    /// Cell centre of (possibly ghost) cell `i`.
    pub fn x(&self, i: isize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.nx as isize).map(|i| self.x(i)).collect()
    }
}

/// A per-cell field with `g` ghost cells on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct Padded {
    pub data: Vec<f64>,
    pub g: usize,
}

impl Padded {
    pub fn zeros(nx: usize, g: usize) -> Self {
        Self { data: vec![0.0; nx + 2 * g], g }
    }

    pub fn from_interior(interior: &[f64], g: usize) -> Self {
        let mut p = Self::zeros(interior.len(), g);
        p.data[g..g + interior.len()].copy_from_slice(interior);
        p
    }

    pub fn nx(&self) -> usize {
        self.data.len() - 2 * self.g
    }

    #[inline]
    pub fn at(&self, i: isize) -> f64 {
        self.data[(i + self.g as isize) as usize]
    }

    #[inline]
    pub fn set(&mut self, i: isize, v: f64) {
        self.data[(i + self.g as isize) as usize] = v;
    }

    pub fn interior(&self) -> &[f64] {
        &self.data[self.g..self.g + self.nx()]
    }

    /// Periodic ghost fill.
    pub fn wrap(&mut self) {
        let n = self.nx() as isize;
        for k in 1..=self.g as isize {
            let l = self.at(n - k);
            let r = self.at(k - 1);
            self.set(-k, l);
            self.set(n - 1 + k, r);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscosityPair {
    pub alpha_u: f64,
    pub alpha_v: f64,
}

pub fn viscosity_pair(eps: f64) -> Result<ViscosityPair> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    Ok(ViscosityPair { alpha_u: (1.0 / eps).min(1.0), alpha_v: eps.min(eps * eps) })
}

/// Γ(h, k, α)_i = (H_{i+1/2} − H_{i−1/2})/Δx with
/// H = v/2 (h⁻ + h⁺) − α|v|/2 (k_{i+1} − k_i).
pub fn transport_divergence(
    grid: &SpatialGrid,
    v: f64,
    h: &Padded,
    k: &Padded,
    alpha: f64,
    order: WenoOrder,
) -> Result<Vec<f64>> {
    let need = order.radius();
    if h.g < need || k.g < 1 {
        return Err(Error::InsufficientGhosts { needed: need, available: h.g.min(k.g) });
    }
    let mut out = vec![0.0; grid.nx];
    transport_divergence_into(grid, v, h, k, alpha, order, &mut out);
    Ok(out)
}

pub(crate) fn transport_divergence_into(
    grid: &SpatialGrid,
    v: f64,
    h: &Padded,
    k: &Padded,
    alpha: f64,
    order: WenoOrder,
    out: &mut [f64],
) {
    let nx = grid.nx as isize;
    let diss = 0.5 * alpha * v.abs();
    let flux = |i: isize| {
        let (m, p) = weno::face_values(order, |c| h.at(c), i);
        0.5 * v * (m + p) - diss * (k.at(i + 1) - k.at(i))
    };
    let mut left = flux(-1);
    for i in 0..nx {
        let right = flux(i);
        out[i as usize] = (right - left) / grid.dx;
        left = right;
    }
}

/// Central weights of the second derivative as `(offset, weight·Δx²)`.
pub fn laplacian_stencil(order: usize) -> Result<&'static [(isize, f64)]> {
    const O2: [(isize, f64); 3] = [(-1, 1.0), (0, -2.0), (1, 1.0)];
    const O4: [(isize, f64); 5] =
        [(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)];
    match order {
        2 => Ok(&O2),
        4 => Ok(&O4),
        o => Err(Error::UnsupportedOrder(o)),
    }
}

pub fn second_derivative(grid: &SpatialGrid, f: &Padded, order: usize) -> Result<Vec<f64>> {
    let st = laplacian_stencil(order)?;
    let need = order / 2;
    if f.g < need {
        return Err(Error::InsufficientGhosts { needed: need, available: f.g });
    }
    let inv = 1.0 / (grid.dx * grid.dx);
    Ok((0..grid.nx as isize)
        .map(|i| st.iter().map(|&(o, w)| w * f.at(i + o)).sum::<f64>() * inv)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Outward normal sign.
    pub fn normal(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Weights `ℓ_m(x)` of the Lagrange interpolant through `nodes`.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .map(|(_, &xm)| (x - xm) / (nodes[j] - xm))
                .product()
        })
        .collect()
}

/// Weights `ℓ_m'(x)` of the Lagrange interpolant derivative.
pub fn lagrange_derivative_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|j| {
            let denom: f64 = (0..n).filter(|&m| m != j).map(|m| nodes[j] - nodes[m]).product();
            let mut s = 0.0;
            for l in 0..n {
                if l == j {
                    continue;
                }
                let mut p = 1.0;
                for m in 0..n {
                    if m != j && m != l {
                        p *= x - nodes[m];
                    }
                }
                s += p;
            }
            s / denom
        })
        .collect()
}

/// Wall-face gradient weights on the first `order + 1` interior cells,
/// ordered from the wall inward.
pub fn one_sided_weights(grid: &SpatialGrid, side: Side, order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let npts = order + 1;
    if grid.nx < npts {
        return Err(Error::TooFewPoints { needed: npts, found: grid.nx });
    }
    // Distances inward from the wall, in units of Δx.
    let s: Vec<f64> = (0..npts).map(|m| m as f64 + 0.5).collect();
    let w = lagrange_derivative_weights(&s, 0.0);
    // d/dx = −n d/ds, with s measured inward.
    Ok(w.iter().map(|c| -side.normal() * c / grid.dx).collect())
}

pub fn one_sided_gradient(grid: &SpatialGrid, field: &[f64], side: Side, order: usize) -> Result<f64> {
    if field.len() != grid.nx {
        return Err(Error::LengthMismatch { expected: grid.nx, found: field.len() });
    }
    let w = one_sided_weights(grid, side, order)?;
    Ok(w.iter()
        .enumerate()
        .map(|(m, c)| match side {
            Side::Left => c * field[m],
            Side::Right => c * field[grid.nx - 1 - m],
        })
        .sum())
}
