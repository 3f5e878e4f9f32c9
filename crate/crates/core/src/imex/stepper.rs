//! Stage-by-stage IMEX step.
//!
//! Stage k solves, per node j and cell i,
//!
//!   (1 + c) Φ_j − d_j Δ_h Φ_j = known_j + c P,   P = Σ_j w_j Φ_j,
//!
//! with c = Δt a_kk β/ε² and d_j = Δt a_kk μ v_j²/λ_j, and then the
//! tridiagonal Ψ system
//!
//!   (1 + bλ_j) Ψ_j − b q_j δ²Ψ_j = known_j − b [Γ_c(Φ_j) − E (∂_vΦ − 2vΦ)_j],
//!
//! with b = Δt a_kk/ε² and q_j = α_u |v_j|/(2Δx). The density coupling is
//! closed exactly through the scaled Schur complement
//!
//!   [I − c Σ_j w_j d̂_j N_j⁻¹ L_j] P = Σ_j w_j N_j⁻¹ k̃_j,   N_j = I − d̂_j L_j,
//!
//! where d̂_j = d_j/(1+c), Δ_h = L_j + b_j and k̃_j = known_j + d_j b_j.
//! Implicit increments are recovered from the solved stages, never by
//! evaluating the O(1/ε²) operators directly.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{compute_density, ParityState, Problem};
use crate::boundary::{GhostExpr, GhostRules};
use crate::collision::{penalty_into, q_minus_l_into};
use crate::error::{Error, Result};
use crate::field::FieldSample;
use crate::linalg::{BandedSolver, SparseRows};
use crate::spatial::{laplacian_stencil, transport_divergence_into, Padded};

const D2: [(isize, f64); 3] = [(-1, 1.0), (0, -2.0), (1, 1.0)];

/// Rows of `u ↦ Σ_o w_o u_{i+o}` with ghosts substituted by `rules`.
fn assemble(nx: usize, stencil: &[(isize, f64)], scale: f64, rules: &GhostRules) -> SparseRows {
    let mut a = SparseRows::new(nx);
    for i in 0..nx {
        for &(o, w) in stencil {
            let e: GhostExpr = rules.expr(nx, i as isize + o);
            for (col, c) in e.terms {
                a.add(i, col, scale * w * c);
            }
        }
    }
    a
}

/// Affine part of the stencil under `rules`.
fn stencil_offsets(nx: usize, stencil: &[(isize, f64)], scale: f64, rules: &GhostRules) -> Vec<f64> {
    let p = rules.pad(&vec![0.0; nx]);
    (0..nx as isize).map(|i| scale * stencil.iter().map(|&(o, w)| w * p.at(i + o)).sum::<f64>()).collect()
}

/// Half-bandwidth ignoring entries that wrap around a periodic domain.
fn local_band(a: &SparseRows) -> usize {
    let n = a.n;
    let mut b = 1;
    for (i, r) in a.rows.iter().enumerate() {
        for &(j, _) in r {
            let d = i.abs_diff(j);
            if d < n / 2 {
                b = b.max(d);
            }
        }
    }
    b
}

fn factor(a: &SparseRows) -> Result<BandedSolver> {
    BandedSolver::factor(a, local_band(a))
}

struct PhiFactor {
    c: f64,
    d: Vec<f64>,
    n: Vec<BandedSolver>,
    schur: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

struct PsiFactor {
    b: f64,
    solvers: Vec<BandedSolver>,
}

struct Carry {
    time: f64,
    dt: f64,
    dtf2: Vec<f64>,
    gt: Vec<f64>,
}

pub struct Stepper<'p> {
    p: &'p Problem,
    dt: f64,
    /// Homogeneous Φ_xx operator per node, with 1/Δx² included.
    lap: Vec<SparseRows>,
    /// Homogeneous δ² operator per node for ψ.
    d2: Vec<SparseRows>,
    phi_factors: Vec<(f64, PhiFactor)>,
    psi_factors: Vec<(f64, PsiFactor)>,
    carry: Option<Carry>,
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

impl<'p> Stepper<'p> {
    pub fn new(p: &'p Problem, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let nx = p.nx();
        let nv = p.nv();
        let ctx = p.wall_ctx([0.0; 2]);
        let zeros = vec![0.0; nx];
        let lst = laplacian_stencil(p.laplacian_order)?;
        let inv_dx2 = 1.0 / (p.grid.dx * p.grid.dx);
        let mut lap = Vec::with_capacity(nv);
        let mut d2 = Vec::with_capacity(nv);
        for j in 0..nv {
            lap.push(assemble(nx, lst, inv_dx2, &p.bc.phi_rules(&ctx, j, &zeros)?));
            d2.push(assemble(nx, &D2, 1.0, &p.bc.psi_rules(&ctx, j, &zeros)?));
        }
        let mut s = Self { p, dt, lap, d2, phi_factors: Vec::new(), psi_factors: Vec::new(), carry: None };
        let t = &p.tableau;
        for k in 0..t.nu {
            let a = t.im(k, k);
            if a != 0.0 && !s.phi_factors.iter().any(|(x, _)| *x == a) {
                let pf = s.build_phi_factor(a)?;
                s.phi_factors.push((a, pf));
                let qf = s.build_psi_factor(a)?;
                s.psi_factors.push((a, qf));
            }
        }
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn problem(&self) -> &Problem {
        self.p
    }

    fn build_phi_factor(&self, a: f64) -> Result<PhiFactor> {
        let p = self.p;
        let nx = p.nx();
        let c = self.dt * a * p.kernel.penalty_beta / (p.eps * p.eps);
        let d: Vec<f64> = (0..p.nv())
            .map(|j| self.dt * a * p.mu * p.basis.nodes[j].powi(2) / p.kernel.lambda[j])
            .collect();
        let n: Vec<BandedSolver> = (0..p.nv())
            .into_par_iter()
            .map(|j| {
                let dhat = d[j] / (1.0 + c);
                let mut m = SparseRows::new(nx);
                for i in 0..nx {
                    m.add(i, i, 1.0);
                    for &(col, v) in &self.lap[j].rows[i] {
                        m.add(i, col, -dhat * v);
                    }
                }
                factor(&m)
            })
            .collect::<Result<_>>()?;
        let mut schur = DMatrix::<f64>::identity(nx, nx);
        if p.mu > 0.0 {
            let parts: Vec<DMatrix<f64>> = (0..p.nv())
                .into_par_iter()
                .map(|j| {
                    let coef = c * p.basis.weights[j] * d[j] / (1.0 + c);
                    let dense = self.lap[j].to_dense();
                    let mut out = DMatrix::<f64>::zeros(nx, nx);
                    for col in 0..nx {
                        let mut x: Vec<f64> = dense.column(col).iter().copied().collect();
                        n[j].solve_in_place(&mut x);
                        for (r, xv) in x.iter().enumerate() {
                            out[(r, col)] = coef * xv;
                        }
                    }
                    out
                })
                .collect();
            for part in &parts {
                schur -= part;
            }
        }
        let schur = schur.lu();
        if !schur.is_invertible() {
            return Err(Error::SingularSystem("density Schur complement".into()));
        }
        Ok(PhiFactor { c, d, n, schur })
    }

    fn build_psi_factor(&self, a: f64) -> Result<PsiFactor> {
        let p = self.p;
        let nx = p.nx();
        let b = self.dt * a / (p.eps * p.eps);
        let solvers = (0..p.nv())
            .into_par_iter()
            .map(|j| {
                let q = b * p.visc.alpha_u * p.basis.nodes[j].abs() / (2.0 * p.grid.dx);
                let mut m = SparseRows::new(nx);
                for i in 0..nx {
                    m.add(i, i, 1.0 + b * p.kernel.lambda[j]);
                    for &(col, v) in &self.d2[j].rows[i] {
                        m.add(i, col, -q * v);
                    }
                }
                factor(&m)
            })
            .collect::<Result<_>>()?;
        Ok(PsiFactor { b, solvers })
    }

    fn col<'a>(&self, u: &'a [f64], j: usize) -> &'a [f64] {
        let nx = self.p.nx();
        &u[j * nx..(j + 1) * nx]
    }

    /// Φ at node `j` with ghosts, using the current ψ for the kinetic wall.
    fn phi_padded(&self, j: usize, phi: &[f64], psi: &[f64], e_wall: [f64; 2]) -> Result<Padded> {
        let ctx = self.p.wall_ctx(e_wall);
        Ok(self.p.bc.phi_rules(&ctx, j, self.col(psi, j))?.pad(self.col(phi, j)))
    }

    fn psi_padded(&self, j: usize, psi: &[f64], phi: &[f64], e_wall: [f64; 2]) -> Result<Padded> {
        let ctx = self.p.wall_ctx(e_wall);
        Ok(self.p.bc.psi_rules(&ctx, j, self.col(phi, j))?.pad(self.col(psi, j)))
    }

    /// E_i (∂_v u − 2 v u)_ij for node-major `u`.
    fn velocity_term(&self, u: &[f64], efield: &[f64]) -> Vec<f64> {
        let p = self.p;
        let (nx, nv) = (p.nx(), p.nv());
        let mut out = vec![0.0; nx * nv];
        for j in 0..nv {
            let v = p.basis.nodes[j];
            let o = &mut out[j * nx..(j + 1) * nx];
            for m in 0..nv {
                let c = p.basis.deriv(j, m);
                if m == j {
                    axpy(o, c - 2.0 * v, &u[m * nx..(m + 1) * nx]);
                } else {
                    axpy(o, c, &u[m * nx..(m + 1) * nx]);
                }
            }
            for (oi, e) in o.iter_mut().zip(efield) {
                *oi *= e;
            }
        }
        out
    }

    /// Central transport Γ(Φ, ·, 0) at every node.
    fn central_transport(&self, phi: &[f64], psi: &[f64], e_wall: [f64; 2]) -> Result<Vec<Vec<f64>>> {
        let p = self.p;
        (0..p.nv())
            .into_par_iter()
            .map(|j| {
                let h = self.phi_padded(j, phi, psi, e_wall)?;
                let mut out = vec![0.0; p.nx()];
                transport_divergence_into(&p.grid, p.basis.nodes[j], &h, &h, 0.0, p.weno, &mut out);
                Ok(out)
            })
            .collect()
    }

    /// Δt f₁: explicit transport of Ψ*, field term, source and (Q̃ − L̃)/ε².
    fn explicit_rhs(&self, phi: &[f64], psi: &[f64], field: &FieldSample) -> Result<Vec<f64>> {
        let p = self.p;
        let (nx, nv) = (p.nx(), p.nv());
        let ew = field.e_wall;
        let free = p.bc.free_rules(&p.grid, p.bc_order)?;
        let transport: Vec<Vec<f64>> = (0..nv)
            .into_par_iter()
            .map(|j| {
                let v = p.basis.nodes[j];
                let ph = self.phi_padded(j, phi, psi, ew)?;
                let mut star = self.col(psi, j).to_vec();
                if p.mu > 0.0 {
                    let ps = self.psi_padded(j, psi, phi, ew)?;
                    let mut g = vec![0.0; nx];
                    transport_divergence_into(&p.grid, v, &ph, &ps, p.visc.alpha_u, p.weno, &mut g);
                    axpy(&mut star, p.mu / p.kernel.lambda[j], &g);
                }
                let star = free.pad(&star);
                let mut out = vec![0.0; nx];
                transport_divergence_into(&p.grid, v, &star, &ph, p.visc.alpha_v, p.weno, &mut out);
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut rhs = self.velocity_term(psi, &field.efield);
        let inv_eps2 = 1.0 / (p.eps * p.eps);
        let mut slice = vec![0.0; nv];
        let mut ql = vec![0.0; nv];
        for i in 0..nx {
            for j in 0..nv {
                slice[j] = phi[j * nx + i];
            }
            q_minus_l_into(&p.kernel, &p.basis, &slice, &mut ql);
            for j in 0..nv {
                let k = j * nx + i;
                rhs[k] = self.dt * (rhs[k] - transport[j][i] + p.source + inv_eps2 * ql[j]);
            }
        }
        Ok(rhs)
    }

    /// Δt f₂ evaluated directly: (β/ε²) L̃(φ) + μ (v²/λ) Δ_h φ.
    fn stiff_phi_direct(&self, phi: &[f64], psi: &[f64], field: &FieldSample) -> Result<Vec<f64>> {
        let p = self.p;
        let (nx, nv) = (p.nx(), p.nv());
        let beta = p.kernel.penalty_beta / (p.eps * p.eps);
        let mut out = vec![0.0; nx * nv];
        let lst = laplacian_stencil(p.laplacian_order)?;
        let inv_dx2 = 1.0 / (p.grid.dx * p.grid.dx);
        let mut slice = vec![0.0; nv];
        let mut dev = vec![0.0; nv];
        for i in 0..nx {
            for j in 0..nv {
                slice[j] = phi[j * nx + i];
            }
            penalty_into(beta, &p.basis.weights, &slice, &mut dev);
            for j in 0..nv {
                out[j * nx + i] = dev[j];
            }
        }
        for j in 0..nv {
            let o = &mut out[j * nx..(j + 1) * nx];
            if p.mu > 0.0 {
                let ph = self.phi_padded(j, phi, psi, field.e_wall)?;
                let coef = p.mu * p.basis.nodes[j].powi(2) / p.kernel.lambda[j];
                for i in 0..nx as isize {
                    let l: f64 = lst.iter().map(|&(o, w)| w * ph.at(i + o)).sum::<f64>() * inv_dx2;
                    o[i as usize] += coef * l;
                }
            }
        }
        Ok(out.into_iter().map(|x| self.dt * x).collect())
    }

    /// (Δt/ε²)[λψ + Γ(φ, ψ, α_u) − E(∂_vφ − 2vφ)] evaluated directly.
    fn stiff_psi_direct(&self, phi: &[f64], psi: &[f64], field: &FieldSample) -> Result<Vec<f64>> {
        let p = self.p;
        let (nx, nv) = (p.nx(), p.nv());
        let vel = self.velocity_term(phi, &field.efield);
        let scale = self.dt / (p.eps * p.eps);
        let cols: Vec<Vec<f64>> = (0..nv)
            .into_par_iter()
            .map(|j| {
                let ph = self.phi_padded(j, phi, psi, field.e_wall)?;
                let ps = self.psi_padded(j, psi, phi, field.e_wall)?;
                let mut g = vec![0.0; nx];
                transport_divergence_into(&p.grid, p.basis.nodes[j], &ph, &ps, p.visc.alpha_u, p.weno, &mut g);
                Ok((0..nx)
                    .map(|i| scale * (p.kernel.lambda[j] * psi[j * nx + i] + g[i] - vel[j * nx + i]))
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(cols.concat())
    }

    /// Implicit Φ stage; returns (Φ, P). `psi` supplies the lagged kinetic wall data.
    pub fn solve_phi_stage(&self, known: &[f64], a_kk: f64, e_wall: [f64; 2], psi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let p = self.p;
        let (nx, nv) = (p.nx(), p.nv());
        if known.len() != nx * nv {
            return Err(Error::LengthMismatch { expected: nx * nv, found: known.len() });
        }
        if a_kk == 0.0 {
            return Ok((known.to_vec(), compute_density(known, nx, &p.basis)));
        }
        let f = &self
            .phi_factors
            .iter()
            .find(|(a, _)| *a == a_kk)
            .ok_or_else(|| Error::InvalidParameter(format!("no factorization for a_kk = {a_kk}")))?
            .1;
        let c = f.c;
        if p.mu == 0.0 {
            let pk = compute_density(known, nx, &p.basis);
            let mut phi = vec![0.0; nx * nv];
            for j in 0..nv {
                for i in 0..nx {
                    phi[j * nx + i] = (known[j * nx + i] + c * pk[i]) / (1.0 + c);
                }
            }
            return Ok((phi, pk));
        }
        let ctx = p.wall_ctx(e_wall);
        let lst = laplacian_stencil(p.laplacian_order)?;
        let inv_dx2 = 1.0 / (p.grid.dx * p.grid.dx);
        // k̃_j and y_j = N_j⁻¹ k̃_j.
        let ys: Vec<Vec<f64>> = (0..nv)
            .into_par_iter()
            .map(|j| {
                let rules = p.bc.phi_rules(&ctx, j, self.col(psi, j))?;
                let b = stencil_offsets(nx, lst, inv_dx2, &rules);
                let mut y: Vec<f64> = self.col(known, j).iter().zip(&b).map(|(k, bi)| k + f.d[j] * bi).collect();
                f.n[j].solve_in_place(&mut y);
                Ok(y)
            })
            .collect::<Result<_>>()?;
        let mut rhs = vec![0.0; nx];
        for (j, y) in ys.iter().enumerate() {
            axpy(&mut rhs, p.basis.weights[j], y);
        }
        let pk: Vec<f64> = f
            .schur
            .solve(&DVector::from_vec(rhs))
            .ok_or_else(|| Error::SingularSystem("density Schur complement".into()))?
            .iter()
            .copied()
            .collect();
        let cols: Vec<Vec<f64>> = ys
            .into_par_iter()
            .enumerate()
            .map(|(j, y)| {
                let mut z = pk.clone();
                f.n[j].solve_in_place(&mut z);
                y.iter().zip(&z).map(|(yi, zi)| (yi + c * zi) / (1.0 + c)).collect()
            })
            .collect();
        Ok((cols.concat(), pk))
    }

    /// Implicit Ψ stage given Φ of the same stage.
    pub fn solve_psi_stage(&self, known: &[f64], a_kk: f64, phi: &[f64], field: &FieldSample, psi_lag: &[f64]) -> Result<Vec<f64>> {
        let p = self.p;
        let (nx, nv) = (p.nx(), p.nv());
        if known.len() != nx * nv || phi.len() != nx * nv {
            return Err(Error::LengthMismatch { expected: nx * nv, found: known.len().min(phi.len()) });
        }
        if a_kk == 0.0 {
            return Ok(known.to_vec());
        }
        let f = &self
            .psi_factors
            .iter()
            .find(|(a, _)| *a == a_kk)
            .ok_or_else(|| Error::InvalidParameter(format!("no factorization for a_kk = {a_kk}")))?
            .1;
        let b = f.b;
        let vel = self.velocity_term(phi, &field.efield);
        let gc = self.central_transport(phi, psi_lag, field.e_wall)?;
        let ctx = p.wall_ctx(field.e_wall);
        let cols: Vec<Vec<f64>> = (0..nv)
            .into_par_iter()
            .map(|j| {
                let q = b * p.visc.alpha_u * p.basis.nodes[j].abs() / (2.0 * p.grid.dx);
                let rules = p.bc.psi_rules(&ctx, j, self.col(phi, j))?;
                let off = stencil_offsets(nx, &D2, 1.0, &rules);
                let mut r: Vec<f64> = (0..nx)
                    .map(|i| known[j * nx + i] - b * (gc[j][i] - vel[j * nx + i]) + q * off[i])
                    .collect();
                f.solvers[j].solve_in_place(&mut r);
                Ok(r)
            })
            .collect::<Result<_>>()?;
        Ok(cols.concat())
    }

    pub fn field_for(&self, rho: &[f64]) -> Result<FieldSample> {
        self.p.field_sample(rho)
    }

    /// Advances `state` by one step.
    pub fn step(&mut self, state: &ParityState) -> Result<ParityState> {
        let p = self.p;
        let t = &p.tableau;
        let (nx, nv) = (p.nx(), p.nv());
        let gsa = t.is_gsa();
        let mut field = p.field_sample(&state.rho)?;
        let mut dtf1: Vec<Option<Vec<f64>>> = Vec::with_capacity(t.nu);
        let mut dtf2: Vec<Vec<f64>> = Vec::with_capacity(t.nu);
        let mut gt: Vec<Vec<f64>> = Vec::with_capacity(t.nu);
        let mut psi_lag = state.psi.clone();
        let mut phi_k = state.phi.clone();
        let mut psi_k = state.psi.clone();

        for k in 0..t.nu {
            let mut known = state.phi.clone();
            for l in 0..k {
                if t.ex(k, l) != 0.0 {
                    axpy(&mut known, t.ex(k, l), dtf1[l].as_ref().expect("explicit stage stored"));
                }
                if t.im(k, l) != 0.0 {
                    axpy(&mut known, t.im(k, l), &dtf2[l]);
                }
            }
            let a = t.im(k, k);
            let (phi_s, pk) = self.solve_phi_stage(&known, a, field.e_wall, &psi_lag)?;
            if p.field.is_self_consistent() {
                field = p.field_sample(&pk)?;
            }
            let mut kpsi = state.psi.clone();
            for m in 0..k {
                if t.im(k, m) != 0.0 {
                    axpy(&mut kpsi, -t.im(k, m), &gt[m]);
                }
            }
            let psi_s = self.solve_psi_stage(&kpsi, a, &phi_s, &field, &psi_lag)?;

            if a != 0.0 {
                dtf2.push(phi_s.iter().zip(&known).map(|(x, y)| (x - y) / a).collect());
                gt.push(kpsi.iter().zip(&psi_s).map(|(x, y)| (x - y) / a).collect());
            } else {
                let carried = match &self.carry {
                    Some(c) if k == 0 && gsa && c.time == state.time && c.dt == self.dt => {
                        Some((c.dtf2.clone(), c.gt.clone()))
                    }
                    _ => None,
                };
                match carried {
                    Some((f2, g)) => {
                        dtf2.push(f2);
                        gt.push(g);
                    }
                    None => {
                        dtf2.push(self.stiff_phi_direct(&phi_s, &psi_s, &field)?);
                        gt.push(self.stiff_psi_direct(&phi_s, &psi_s, &field)?);
                    }
                }
            }

            let needed = (k + 1..t.nu).any(|m| t.ex(m, k) != 0.0) || (!gsa && t.w_ex[k] != 0.0);
            dtf1.push(if needed { Some(self.explicit_rhs(&phi_s, &psi_s, &field)?) } else { None });
            psi_lag = psi_s.clone();
            phi_k = phi_s;
            psi_k = psi_s;
        }

        let (phi, psi) = if gsa {
            (phi_k, psi_k)
        } else {
            let mut phi = state.phi.clone();
            let mut psi = state.psi.clone();
            for k in 0..t.nu {
                if t.w_ex[k] != 0.0 {
                    axpy(&mut phi, t.w_ex[k], dtf1[k].as_ref().expect("weighted stage stored"));
                }
                axpy(&mut phi, t.w_im[k], &dtf2[k]);
                axpy(&mut psi, -t.w_im[k], &gt[k]);
            }
            (phi, psi)
        };
        let next = ParityState::from_fields(nx, phi, psi, state.time + self.dt, &p.basis)?;
        debug_assert_eq!(next.nv, nv);
        next.check_finite()?;
        self.carry = Some(Carry {
            time: next.time,
            dt: self.dt,
            dtf2: dtf2.pop().expect("at least one stage"),
            gt: gt.pop().expect("at least one stage"),
        });
        Ok(next)
    }
}

/// One step with a freshly factored stepper.
pub fn step(state: &ParityState, dt: f64, problem: &Problem) -> Result<ParityState> {
    Stepper::new(problem, dt)?.step(state)
}

/// ψ solving the discrete limit relation λψ + Γ(φ, ψ, α_u) − E(∂_vφ − 2vφ) = 0.
pub fn well_prepared_psi(problem: &Problem, phi: &[f64]) -> Result<Vec<f64>> {
    let p = problem;
    let (nx, nv) = (p.nx(), p.nv());
    let rho = compute_density(phi, nx, &p.basis);
    let field = p.field_sample(&rho)?;
    let ctx = p.wall_ctx(field.e_wall);
    let zeros = vec![0.0; nx * nv];
    // Reuse the stepper's explicit pieces without factoring any stage.
    let helper = Stepper {
        p,
        dt: 1.0,
        lap: Vec::new(),
        d2: Vec::new(),
        phi_factors: Vec::new(),
        psi_factors: Vec::new(),
        carry: None,
    };
    let vel = helper.velocity_term(phi, &field.efield);
    let gc = helper.central_transport(phi, &zeros, field.e_wall)?;
    let cols: Vec<Vec<f64>> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let q = p.visc.alpha_u * p.basis.nodes[j].abs() / (2.0 * p.grid.dx);
            let rules = p.bc.psi_rules(&ctx, j, &phi[j * nx..(j + 1) * nx])?;
            let rows = assemble(nx, &D2, 1.0, &rules);
            let off = stencil_offsets(nx, &D2, 1.0, &rules);
            let mut m = SparseRows::new(nx);
            for i in 0..nx {
                m.add(i, i, p.kernel.lambda[j]);
                for &(col, v) in &rows.rows[i] {
                    m.add(i, col, -q * v);
                }
            }
            let mut r: Vec<f64> = (0..nx).map(|i| -gc[j][i] + vel[j * nx + i] + q * off[i]).collect();
            factor(&m)?.solve_in_place(&mut r);
            Ok(r)
        })
        .collect::<Result<_>>()?;
    Ok(cols.concat())
}

#[cfg(test)]
mod tests;
