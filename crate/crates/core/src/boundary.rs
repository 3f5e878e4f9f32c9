//! Maxwellian-injection boundary conditions and ghost-cell management.
//!
//! Ghost values are affine maps of interior values (`GhostExpr`), so that
//! the same rules fill ghosts for explicit operators and fold into the
//! matrices of the implicit stage solves.
//!
//! Kinetic regime: the incoming half of f is prescribed, the outgoing half
//! is extrapolated from the interior, and (φ, ψ) at the wall follow from
//! the parity formulas r = (f(v)+f(−v))/2, j = (f(v)−f(−v))/(2ε).
//! Diffusive regime: φ satisfies the Robin relation
//! r − (ε/λ)(v ∂_x r − E ∂_v F) = F for the incoming velocity.

use crate::collision::KernelSpec;
use crate::error::{Error, Result};
use crate::quadrature::GaussHermiteBasis;
use crate::spatial::{lagrange_weights, one_sided_weights, Padded, Side, SpatialGrid};

/// `offset + Σ c · u[index]` over interior values `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostExpr {
    pub offset: f64,
    pub terms: Vec<(usize, f64)>,
}

impl GhostExpr {
    pub fn constant(offset: f64) -> Self {
        Self { offset, terms: Vec::new() }
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.offset + self.terms.iter().map(|&(i, c)| c * u[i]).sum::<f64>()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { offset: s * self.offset, terms: self.terms.iter().map(|&(i, c)| (i, s * c)).collect() }
    }

    pub fn add(&mut self, other: &GhostExpr) {
        self.offset += other.offset;
        for &(i, c) in &other.terms {
            match self.terms.iter_mut().find(|t| t.0 == i) {
                Some(t) => t.1 += c,
                None => self.terms.push((i, c)),
            }
        }
    }
}

/// Ghost rules, `left[k]` fills cell `−1−k` and `right[k]` fills `nx+k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostRules {
    pub left: Vec<GhostExpr>,
    pub right: Vec<GhostExpr>,
}

impl GhostRules {
    pub fn pad(&self, interior: &[f64]) -> Padded {
        let g = self.left.len();
        let mut p = Padded::from_interior(interior, g);
        self.fill(&mut p);
        p
    }

    pub fn fill(&self, p: &mut Padded) {
        let n = p.nx() as isize;
        let interior = p.interior().to_vec();
        for (k, e) in self.left.iter().enumerate() {
            p.set(-1 - k as isize, e.eval(&interior));
        }
        for (k, e) in self.right.iter().enumerate() {
            p.set(n + k as isize, e.eval(&interior));
        }
    }

    /// Expression for cell `i`, interior or ghost.
    pub fn expr(&self, nx: usize, i: isize) -> GhostExpr {
        if i < 0 {
            self.left[(-1 - i) as usize].clone()
        } else if i as usize >= nx {
            self.right[i as usize - nx].clone()
        } else {
            GhostExpr { offset: 0.0, terms: vec![(i as usize, 1.0)] }
        }
    }

    pub fn periodic(nx: usize, g: usize) -> Self {
        let left = (0..g).map(|k| GhostExpr { offset: 0.0, terms: vec![((nx as isize - 1 - k as isize).rem_euclid(nx as isize) as usize, 1.0)] }).collect();
        let right = (0..g).map(|k| GhostExpr { offset: 0.0, terms: vec![(k % nx, 1.0)] }).collect();
        Self { left, right }
    }

    /// Zero normal derivative by reflection.
    pub fn mirror(nx: usize, g: usize) -> Self {
        let left = (0..g).map(|k| GhostExpr { offset: 0.0, terms: vec![(k.min(nx - 1), 1.0)] }).collect();
        let right = (0..g).map(|k| GhostExpr { offset: 0.0, terms: vec![(nx - 1 - k.min(nx - 1), 1.0)] }).collect();
        Self { left, right }
    }

    /// Polynomial extrapolation through the first `npts` interior cells.
    pub fn extrapolated(nx: usize, g: usize, npts: usize) -> Result<Self> {
        if nx < npts || npts == 0 {
            return Err(Error::TooFewPoints { needed: npts, found: nx });
        }
        let s: Vec<f64> = (0..npts).map(|m| m as f64 + 0.5).collect();
        let side = |right: bool| {
            (0..g)
                .map(|k| {
                    let w = lagrange_weights(&s, -(k as f64) - 0.5);
                    let terms = w.iter().enumerate().map(|(m, &c)| (if right { nx - 1 - m } else { m }, c)).collect();
                    GhostExpr { offset: 0.0, terms }
                })
                .collect()
        };
        Ok(Self { left: side(false), right: side(true) })
    }

    /// Polynomial through the wall value and `order − 1` interior cells.
    pub fn through_wall(nx: usize, g: usize, order: usize, wall: [GhostExpr; 2]) -> Result<Self> {
        let ncell = order.max(2) - 1;
        if nx < ncell {
            return Err(Error::TooFewPoints { needed: ncell, found: nx });
        }
        let mut s = vec![0.0];
        s.extend((0..ncell).map(|m| m as f64 + 0.5));
        let build = |side: Side, wall: &GhostExpr| {
            (0..g)
                .map(|k| {
                    let w = lagrange_weights(&s, -(k as f64) - 0.5);
                    let mut e = wall.scale(w[0]);
                    for (m, &c) in w[1..].iter().enumerate() {
                        let idx = match side {
                            Side::Left => m,
                            Side::Right => nx - 1 - m,
                        };
                        e.add(&GhostExpr { offset: 0.0, terms: vec![(idx, c)] });
                    }
                    e
                })
                .collect()
        };
        Ok(Self { left: build(Side::Left, &wall[0]), right: build(Side::Right, &wall[1]) })
    }
}

/// Weights extrapolating interior cells to the wall face, from the wall inward.
pub fn wall_extrapolation_weights(npts: usize) -> Vec<f64> {
    let s: Vec<f64> = (0..npts).map(|m| m as f64 + 0.5).collect();
    lagrange_weights(&s, 0.0)
}

fn wall_index(nx: usize, side: Side, m: usize) -> usize {
    match side {
        Side::Left => m,
        Side::Right => nx - 1 - m,
    }
}

/// Wall extrapolation of interior values as an expression.
pub fn wall_extrapolation(nx: usize, side: Side, npts: usize) -> GhostExpr {
    let w = wall_extrapolation_weights(npts);
    GhostExpr { offset: 0.0, terms: w.iter().enumerate().map(|(m, &c)| (wall_index(nx, side, m), c)).collect() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectionData {
    /// Per-node values of F_L/M, used at the incoming nodes v > 0.
    pub left: Vec<f64>,
    /// Per-node values of F_R/M, used at the incoming nodes v < 0.
    pub right: Vec<f64>,
}

impl InjectionData {
    pub fn maxwellian(nv: usize, c_left: f64, c_right: f64) -> Self {
        Self { left: vec![c_left; nv], right: vec![c_right; nv] }
    }

    fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// F/M at the incoming velocity of the same speed as node `j`.
    pub fn incoming(&self, basis: &GaussHermiteBasis, side: Side, j: usize) -> f64 {
        self.side(side)[incoming_node(basis, side, j)]
    }
}

/// Node index of the incoming velocity `−n|v_j|`.
pub fn incoming_node(basis: &GaussHermiteBasis, side: Side, j: usize) -> usize {
    let incoming_sign = -side.normal();
    if basis.nodes[j].signum() == incoming_sign {
        j
    } else {
        basis.nv - 1 - j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    Periodic,
    Injection { injection: InjectionData, psi_neumann: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Kinetic,
    Diffusive,
}

impl Regime {
    /// Same switch as μ: diffusive iff ε < Δx.
    pub fn select(eps: f64, dx: f64) -> Self {
        if eps < dx {
            Regime::Diffusive
        } else {
            Regime::Kinetic
        }
    }
}

/// Everything the wall formulas need besides the fields themselves.
#[derive(Debug, Clone, Copy)]
pub struct WallContext<'a> {
    pub grid: &'a SpatialGrid,
    pub basis: &'a GaussHermiteBasis,
    pub kernel: &'a KernelSpec,
    pub eps: f64,
    /// Extrapolation order, 2 (linear) or 3 (quadratic).
    pub order: usize,
    pub regime: Regime,
    /// Electric field at the left and right walls.
    pub e_wall: [f64; 2],
}

fn sides() -> [Side; 2] {
    [Side::Left, Side::Right]
}

impl BoundarySpec {
    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundarySpec::Periodic)
    }

    /// Ghost rules for φ at node `j`; `psi` is the current (lagged) ψ at that node.
    pub fn phi_rules(&self, ctx: &WallContext, j: usize, psi: &[f64]) -> Result<GhostRules> {
        let nx = ctx.grid.nx;
        let g = ctx.grid.ghost;
        let BoundarySpec::Injection { injection, .. } = self else {
            return Ok(GhostRules::periodic(nx, g));
        };
        let walls = match ctx.regime {
            Regime::Kinetic => sides().map(|side| kinetic_phi_wall(ctx, injection, side, j, psi)),
            Regime::Diffusive => {
                let mut out = [GhostExpr::constant(0.0), GhostExpr::constant(0.0)];
                for (k, side) in sides().into_iter().enumerate() {
                    out[k] = robin_phi_wall(ctx, injection, side, j)?;
                }
                out
            }
        };
        GhostRules::through_wall(nx, g, ctx.order, walls)
    }

    /// Ghost rules for ψ at node `j` once Φ at that node is known.
    pub fn psi_rules(&self, ctx: &WallContext, j: usize, phi: &[f64]) -> Result<GhostRules> {
        let nx = ctx.grid.nx;
        let g = ctx.grid.ghost;
        match self {
            BoundarySpec::Periodic => Ok(GhostRules::periodic(nx, g)),
            BoundarySpec::Injection { psi_neumann: true, .. } => Ok(GhostRules::mirror(nx, g)),
            BoundarySpec::Injection { injection, .. } => {
                let walls = match ctx.regime {
                    Regime::Kinetic => sides().map(|side| kinetic_psi_wall(ctx, injection, side, j, phi)),
                    Regime::Diffusive => {
                        let mut out = [GhostExpr::constant(0.0), GhostExpr::constant(0.0)];
                        for (k, side) in sides().into_iter().enumerate() {
                            out[k] = GhostExpr::constant(diffusive_psi_wall(ctx, injection, side, j, phi)?);
                        }
                        out
                    }
                };
                GhostRules::through_wall(nx, g, ctx.order, walls)
            }
        }
    }

    /// Rules for derived fields with no boundary condition of their own.
    pub fn free_rules(&self, grid: &SpatialGrid, order: usize) -> Result<GhostRules> {
        match self {
            BoundarySpec::Periodic => Ok(GhostRules::periodic(grid.nx, grid.ghost)),
            _ => GhostRules::extrapolated(grid.nx, grid.ghost, order),
        }
    }
}

/// φ_w = ½(F + E[φ]) + ½ nσ ε E[ψ], affine in φ with ψ lagged.
fn kinetic_phi_wall(ctx: &WallContext, inj: &InjectionData, side: Side, j: usize, psi: &[f64]) -> GhostExpr {
    let nx = ctx.grid.nx;
    let ns = side.normal() * ctx.basis.nodes[j].signum();
    let c = inj.incoming(ctx.basis, side, j);
    let ext = wall_extrapolation(nx, side, ctx.order);
    let mut e = ext.scale(0.5);
    e.offset = 0.5 * c + 0.5 * ns * ctx.eps * ext.eval(psi);
    e
}

/// ψ_w = −nσ (F − E[φ])/(2ε) + ½ E[ψ], affine in ψ with Φ known.
fn kinetic_psi_wall(ctx: &WallContext, inj: &InjectionData, side: Side, j: usize, phi: &[f64]) -> GhostExpr {
    let nx = ctx.grid.nx;
    let ns = side.normal() * ctx.basis.nodes[j].signum();
    let c = inj.incoming(ctx.basis, side, j);
    let ext = wall_extrapolation(nx, side, ctx.order);
    let mut e = ext.scale(0.5);
    e.offset = -ns * (c - ext.eval(phi)) / (2.0 * ctx.eps);
    e
}

/// Robin wall value φ_w = c − n κ (∂_x φ − E(c' − 2 v_in c)/v_in), κ = ε|v|/λ,
/// with the gradient from one-sided interior differences.
fn robin_phi_wall(ctx: &WallContext, inj: &InjectionData, side: Side, j: usize) -> Result<GhostExpr> {
    let nx = ctx.grid.nx;
    let b = ctx.basis;
    let jin = incoming_node(b, side, j);
    let vin = b.nodes[jin];
    let c = inj.side(side)[jin];
    let dc = b.velocity_derivative(inj.side(side))?[jin];
    let e_w = ctx.e_wall[if side == Side::Left { 0 } else { 1 }];
    let kappa = ctx.eps / ctx.kernel.lambda[jin];
    // φ_w = c + κ (v_in φ_x − E(c' − 2 v_in c))
    let gw = one_sided_weights(ctx.grid, side, ctx.order)?;
    let terms = gw.iter().enumerate().map(|(m, &w)| (wall_index(nx, side, m), kappa * vin * w)).collect();
    Ok(GhostExpr { offset: c - kappa * e_w * (dc - 2.0 * vin * c), terms })
}

/// ψ_w = −(1/λ)(v φ_x − E(∂_vφ − 2vφ)) at the wall, with ∂_vφ ≈ ∂_v(F/M).
fn diffusive_psi_wall(ctx: &WallContext, inj: &InjectionData, side: Side, j: usize, phi: &[f64]) -> Result<f64> {
    let b = ctx.basis;
    let v = b.nodes[j];
    let e_w = ctx.e_wall[if side == Side::Left { 0 } else { 1 }];
    let grad: f64 = {
        let gw = one_sided_weights(ctx.grid, side, ctx.order)?;
        gw.iter().enumerate().map(|(m, &w)| w * phi[wall_index(ctx.grid.nx, side, m)]).sum()
    };
    let phi_w = robin_phi_wall(ctx, inj, side, j)?.eval(phi);
    let dc = b.velocity_derivative(inj.side(side))?[j];
    Ok(-(v * grad - e_w * (dc - 2.0 * v * phi_w)) / ctx.kernel.lambda[j])
}

/// φ and ψ with ghosts, one `Padded` per velocity node.
#[derive(Debug, Clone)]
pub struct GhostedFields {
    pub phi: Vec<Padded>,
    pub psi: Vec<Padded>,
}

fn node_columns(values: &[f64], nx: usize, nv: usize) -> Vec<&[f64]> {
    (0..nv).map(|j| &values[j * nx..(j + 1) * nx]).collect()
}

/// Kinetic injection: ghost-filled φ and ψ per node. `phi`, `psi` are node-major.
pub fn apply_kinetic_bc(
    phi: &[f64],
    psi: &[f64],
    injection: &InjectionData,
    ctx: &WallContext,
) -> Result<GhostedFields> {
    let nx = ctx.grid.nx;
    let nv = ctx.basis.nv;
    let spec = BoundarySpec::Injection { injection: injection.clone(), psi_neumann: false };
    let kctx = WallContext { regime: Regime::Kinetic, ..*ctx };
    let (pc, sc) = (node_columns(phi, nx, nv), node_columns(psi, nx, nv));
    let mut out = GhostedFields { phi: Vec::with_capacity(nv), psi: Vec::with_capacity(nv) };
    for j in 0..nv {
        out.phi.push(spec.phi_rules(&kctx, j, sc[j])?.pad(pc[j]));
        out.psi.push(spec.psi_rules(&kctx, j, pc[j])?.pad(sc[j]));
    }
    Ok(out)
}

/// Diffusive injection: Robin wall values `[left, right]` of φ per node.
pub fn apply_diffusive_bc(phi: &[f64], injection: &InjectionData, ctx: &WallContext) -> Result<Vec<[f64; 2]>> {
    let nx = ctx.grid.nx;
    let cols = node_columns(phi, nx, ctx.basis.nv);
    (0..ctx.basis.nv)
        .map(|j| {
            Ok([
                robin_phi_wall(ctx, injection, Side::Left, j)?.eval(cols[j]),
                robin_phi_wall(ctx, injection, Side::Right, j)?.eval(cols[j]),
            ])
        })
        .collect()
}

/// Zero normal derivative ghosts for ψ, one `Padded` per node.
pub fn apply_flux_neumann_psi(psi: &[f64], grid: &SpatialGrid, nv: usize) -> Vec<Padded> {
    let rules = GhostRules::mirror(grid.nx, grid.ghost);
    node_columns(psi, grid.nx, nv).into_iter().map(|c| rules.pad(c)).collect()
}
