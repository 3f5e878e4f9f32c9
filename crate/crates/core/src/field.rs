//! Electric potential and field: prescribed profiles and the
//! self-consistent Poisson equation γ Φ'' = ρ − ρ_d with Φ(0)=0, Φ(1)=V.

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::spatial::SpatialGrid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopingProfile {
    pub s: f64,
    pub m: f64,
    pub x1: f64,
    pub x2: f64,
}

impl DopingProfile {
    pub fn uniform() -> Self {
        Self { s: 1.0, m: 1.0, x1: 0.25, x2: 0.75 }
    }
}

pub fn doping_density(p: &DopingProfile, x: f64) -> f64 {
    1.0 - 0.5 * (1.0 - p.m) * (((x - p.x1) / p.s).tanh() - ((x - p.x2) / p.s).tanh())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prescribed {
    /// Φ = exp(−c(1/4 − x)²).
    GaussianWell { c: f64 },
    /// Φ = a x, E = −a.
    Linear { slope: f64 },
    /// Φ = 0.
    Zero,
    /// E = a sin(2πx), Φ = (a/2π) cos(2πx).
    Sinusoidal { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Prescribed(Prescribed),
    SelfConsistent { debye_gamma: f64, applied_v: f64, doping: DopingProfile },
}

impl FieldSpec {
    pub fn is_self_consistent(&self) -> bool {
        matches!(self, FieldSpec::SelfConsistent { .. })
    }
}

pub fn test1_constant() -> f64 {
    50.0 * std::f64::consts::E
}

/// Analytic (Φ, E = −Φ').
pub fn prescribed_field(mode: &Prescribed, x: f64) -> (f64, f64) {
    match *mode {
        Prescribed::GaussianWell { c } => {
            let d = 0.25 - x;
            let phi = (-c * d * d).exp();
            (phi, -2.0 * c * d * phi)
        }
        Prescribed::Linear { slope } => (slope * x, -slope),
        Prescribed::Zero => (0.0, 0.0),
        Prescribed::Sinusoidal { amplitude } => {
            let tp = 2.0 * std::f64::consts::PI;
            (amplitude / tp * (tp * x).cos(), amplitude * (tp * x).sin())
        }
    }
}

/// Potential and field at the cell centres plus E at the two walls.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub potential: Vec<f64>,
    pub efield: Vec<f64>,
    pub e_wall: [f64; 2],
}

pub fn sample_prescribed(mode: &Prescribed, grid: &SpatialGrid) -> FieldSample {
    let (potential, efield) = grid.centers().iter().map(|&x| prescribed_field(mode, x)).unzip();
    FieldSample {
        potential,
        efield,
        e_wall: [prescribed_field(mode, grid.x_lo).1, prescribed_field(mode, grid.x_hi).1],
    }
}

/// Cell-centred second-order Poisson solve, Dirichlet walls through mirrored ghosts.
pub fn solve_poisson(rho: &[f64], gamma: f64, v: f64, profile: &DopingProfile, grid: &SpatialGrid) -> Result<FieldSample> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("Debye length must be positive, got {gamma}")));
    }
    let n = grid.nx;
    if rho.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: rho.len() });
    }
    let (lo, hi) = (0.0, v);
    let h2 = grid.dx * grid.dx;
    let mut a = vec![1.0; n];
    let mut b = vec![-2.0; n];
    let mut c = vec![1.0; n];
    let mut d: Vec<f64> = (0..n).map(|i| h2 * (rho[i] - doping_density(profile, grid.x(i as isize))) / gamma).collect();
    a[0] = 0.0;
    c[n - 1] = 0.0;
    // Ghosts Φ_{−1} = 2Φ_L − Φ_0 and Φ_n = 2Φ_R − Φ_{n−1}.
    b[0] -= 1.0;
    d[0] -= 2.0 * lo;
    b[n - 1] -= 1.0;
    d[n - 1] -= 2.0 * hi;
    let potential = solve_tridiagonal(&a, &b, &c, &d)?;
    let efield = gradient_field(&potential, lo, hi, grid);
    let e_wall = [
        -(-8.0 * lo + 9.0 * potential[0] - potential[1]) / (3.0 * grid.dx),
        -(8.0 * hi - 9.0 * potential[n - 1] + potential[n - 2]) / (3.0 * grid.dx),
    ];
    Ok(FieldSample { potential, efield, e_wall })
}

/// E = −Φ' by central differences, end cells through the wall values.
pub fn gradient_field(potential: &[f64], lo: f64, hi: f64, grid: &SpatialGrid) -> Vec<f64> {
    let n = potential.len();
    let h = grid.dx;
    (0..n)
        .map(|i| {
            let left = if i == 0 { None } else { Some(potential[i - 1]) };
            let right = if i + 1 == n { None } else { Some(potential[i + 1]) };
            let d = match (left, right) {
                (Some(l), Some(r)) => (r - l) / (2.0 * h),
                // Quadratic through the wall (distance h/2) and two cells.
                (None, Some(r)) => (-4.0 * lo + 3.0 * potential[i] + r) / (3.0 * h),
                (Some(l), None) => (4.0 * hi - 3.0 * potential[i] - l) / (3.0 * h),
                (None, None) => (hi - lo) / h,
            };
            -d
        })
        .collect()
}

/// Diagnostic current J = ε Σ_j w_j v_j ψ_j at every cell, `psi` node-major.
pub fn current_density(psi: &[f64], nodes: &[f64], weights: &[f64], nx: usize, eps: f64) -> Vec<f64> {
    (0..nx)
        .map(|i| eps * nodes.iter().zip(weights).enumerate().map(|(j, (v, w))| w * v * psi[j * nx + i]).sum::<f64>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test3_doping() -> DopingProfile {
        DopingProfile { s: 0.02, m: 0.001, x1: 0.3, x2: 0.7 }
    }

    #[test]
    fn doping_examples() {
        let p = test3_doping();
        assert!((doping_density(&p, 0.0) - 1.0).abs() < 1e-9);
        assert!((doping_density(&p, 0.5) - 0.001).abs() < 1e-7);
        let flat = DopingProfile { m: 1.0, ..p };
        for x in [0.0, 0.31, 0.5, 1.0] {
            assert_eq!(doping_density(&flat, x), 1.0);
        }
    }

    #[test]
    fn poisson_neutral_zero_bias() {
        let g = SpatialGrid::unit(40).unwrap();
        let p = test3_doping();
        let rho: Vec<f64> = g.centers().iter().map(|&x| doping_density(&p, x)).collect();
        let f = solve_poisson(&rho, 0.002, 0.0, &p, &g).unwrap();
        assert!(f.potential.iter().all(|x| x.abs() < 1e-12));
        assert!(f.efield.iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn poisson_linear_bias() {
        let g = SpatialGrid::unit(40).unwrap();
        let p = test3_doping();
        let rho: Vec<f64> = g.centers().iter().map(|&x| doping_density(&p, x)).collect();
        let f = solve_poisson(&rho, 0.002, 5.0, &p, &g).unwrap();
        for (phi, x) in f.potential.iter().zip(g.centers()) {
            assert!((phi - 5.0 * x).abs() < 1e-10);
        }
        assert!(f.efield.iter().all(|e| (e + 5.0).abs() < 1e-8));
        assert!(f.e_wall.iter().all(|e| (e + 5.0).abs() < 1e-8));
    }

    #[test]
    fn poisson_rejects_bad_gamma() {
        let g = SpatialGrid::unit(4).unwrap();
        assert!(solve_poisson(&[1.0; 4], 0.0, 0.0, &DopingProfile::uniform(), &g).is_err());
    }

    #[test]
    fn poisson_manufactured_second_order() {
        // Φ = sin(πx) x (1 − x) + V x, with ρ = ρ_d + γ Φ''.
        let (gamma, v) = (0.3, 1.5);
        let p = DopingProfile::uniform();
        let pi = std::f64::consts::PI;
        let exact = |x: f64| (pi * x).sin() * x * (1.0 - x) + v * x;
        let d2 = |x: f64| {
            let s = (pi * x).sin();
            let c = (pi * x).cos();
            -pi * pi * s * x * (1.0 - x) + 2.0 * pi * c * (1.0 - 2.0 * x) - 2.0 * s
        };
        let err = |nx: usize| {
            let g = SpatialGrid::unit(nx).unwrap();
            let rho: Vec<f64> = g.centers().iter().map(|&x| 1.0 + gamma * d2(x)).collect();
            let f = solve_poisson(&rho, gamma, v, &p, &g).unwrap();
            let mut r = 0.0f64;
            for (phi, x) in f.potential.iter().zip(g.centers()) {
                r = r.max((phi - exact(x)).abs());
            }
            r
        };
        let rate = (err(40) / err(80)).log2();
        assert!(rate > 1.9, "rate {rate}");
    }

    #[test]
    fn prescribed_examples() {
        assert_eq!(prescribed_field(&Prescribed::Linear { slope: 1.0 }, 0.3).1, -1.0);
        let c = test1_constant();
        assert!((c - 135.914).abs() < 1e-3);
        let (phi, e) = prescribed_field(&Prescribed::GaussianWell { c }, 0.25);
        assert_eq!(phi, 1.0);
        assert_eq!(e, 0.0);
        // Analytic derivative against a central-difference oracle.
        let h = 1e-6;
        let x = 0.2;
        let fd = (prescribed_field(&Prescribed::GaussianWell { c }, x + h).0
            - prescribed_field(&Prescribed::GaussianWell { c }, x - h).0)
            / (2.0 * h);
        assert!((prescribed_field(&Prescribed::GaussianWell { c }, x).1 + fd).abs() < 1e-5);
    }

    #[test]
    fn gradient_consistent_with_potential() {
        let g = SpatialGrid::unit(20).unwrap();
        let pot: Vec<f64> = g.centers().iter().map(|x| x * x).collect();
        let e = gradient_field(&pot, 0.0, 1.0, &g);
        for (ei, x) in e.iter().zip(g.centers()) {
            assert!((ei + 2.0 * x).abs() < 1e-12);
        }
    }
}
