//! Forward-Euler nodal DG for Navier-Stokes with Bassi-Rebay gradients.

use rayon::prelude::*;

use crate::error::{Error, Location, Result};
use crate::fluid::halfmoment::HalfLine;
use crate::fluid::kfvs::{kfvs_half_flux, kfvs_interface_flux, maxwellian_half_flux, navier_stokes_flux, Flux};
use crate::kinetic::BoundaryKind;
use crate::mesh::{Dim, Side};
use crate::problem::Problem;
use crate::real::Real;
use crate::velocity::{transport_coefficients, Conserved, Moments, PrimitiveGradients};

/// Gradient of the conservative variables: `g[a][c] = d U_c / d x_a`.
pub type Gradient<R> = [[R; 4]; 2];

/// Conservative nodal values and their reconstructed gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState<R> {
    pub u: Vec<Conserved<R>>,
    pub grad: Vec<Gradient<R>>,
    pub time: R,
}

impl<R: Real> FluidState<R> {
    /// Builds a state and reconstructs its gradients.
    pub fn new(problem: &Problem<R>, u: Vec<Conserved<R>>, time: R) -> Result<Self> {
        if u.len() != problem.space.num_points() {
            return Err(Error::config("one conservative state per space node is required"));
        }
        for (p, c) in u.iter().enumerate() {
            Moments::from_conserved(c).map_err(|e| fail_at(problem, p, e))?;
        }
        let grad = gradient_reconstruct(problem, &u);
        Ok(Self { u, grad, time })
    }

    pub fn from_moments(problem: &Problem<R>, moments: &[Moments<R>]) -> Result<Self> {
        Self::new(problem, moments.iter().map(Moments::to_conserved).collect(), R::zero())
    }

    pub fn moments(&self) -> Result<Vec<Moments<R>>> {
        self.u.iter().map(Moments::from_conserved).collect()
    }
}

fn fail_at<R: Real>(problem: &Problem<R>, point: usize, e: Error) -> Error {
    let npc = problem.space.nodes_per_cell();
    Error::StepFailure {
        location: Location {
            cell: point / npc,
            node: point % npc,
        },
        reason: e.to_string(),
    }
}

/// Value of the conservative polynomial of `cell` at a face node.
pub fn trace_conserved<R: Real>(
    problem: &Problem<R>,
    u: &[Conserved<R>],
    cell: usize,
    axis: usize,
    side: Side,
    face_node: usize,
) -> Conserved<R> {
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let mut acc = [R::zero(); 4];
    for (k, &phi) in space.basis(axis).trace_vector(side).iter().enumerate() {
        let v = &u[cell * npc + space.line_node(axis, face_node, k)].0;
        for c in 0..4 {
            acc[c] = acc[c] + phi * v[c];
        }
    }
    Conserved(acc)
}

/// Value of the gradient polynomial of `cell` at a face node.
pub fn trace_gradient<R: Real>(
    problem: &Problem<R>,
    grad: &[Gradient<R>],
    cell: usize,
    axis: usize,
    side: Side,
    face_node: usize,
) -> Gradient<R> {
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let mut acc = [[R::zero(); 4]; 2];
    for (k, &phi) in space.basis(axis).trace_vector(side).iter().enumerate() {
        let g = &grad[cell * npc + space.line_node(axis, face_node, k)];
        for a in 0..2 {
            for c in 0..4 {
                acc[a][c] = acc[a][c] + phi * g[a][c];
            }
        }
    }
    acc
}

/// Bassi-Rebay gradients with the central interface value `(U- + U+)/2`.
///
/// On non-periodic domain boundaries the interior trace is used.
pub fn gradient_reconstruct<R: Real>(problem: &Problem<R>, u: &[Conserved<R>]) -> Vec<Gradient<R>> {
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let mut out = vec![[[R::zero(); 4]; 2]; u.len()];
    out.par_chunks_mut(npc).enumerate().for_each(|(cell, block)| {
        for axis in space.dim().axes() {
            let basis = space.basis(axis);
            let n = basis.len();
            let inv_h = R::one() / space.width(cell, axis);
            for f in 0..space.face_nodes(axis) {
                let mut hat = [[R::zero(); 4]; 2];
                for side in [Side::Low, Side::High] {
                    let own = trace_conserved(problem, u, cell, axis, side, f);
                    hat[side.index()] = match problem.neighbor(cell, axis, side) {
                        Some(nb) => {
                            let other = trace_conserved(problem, u, nb, axis, side.opposite(), f);
                            let mut h = [R::zero(); 4];
                            for c in 0..4 {
                                h[c] = R::half() * (own.0[c] + other.0[c]);
                            }
                            h
                        }
                        None => own.0,
                    };
                }
                for k in 0..n {
                    let node = space.line_node(axis, f, k);
                    let lo = basis.lift(Side::Low, k);
                    let hi = basis.lift(Side::High, k);
                    let mut s = [R::zero(); 4];
                    for l in 0..n {
                        let st = basis.stiff(k, l);
                        let v = &u[cell * npc + space.line_node(axis, f, l)].0;
                        for c in 0..4 {
                            s[c] = s[c] - st * v[c];
                        }
                    }
                    for c in 0..4 {
                        block[node][axis][c] = (s[c] + hi * hat[1][c] - lo * hat[0][c]) * inv_h;
                    }
                }
            }
        }
    });
    out
}

/// Replaces the interface flux on selected faces.
pub trait FaceFluxOverride<R: Real>: Sync {
    /// Flux through face `(axis, side, face_node)` of `cell`, or `None` to use
    /// the fluid interface flux.
    fn face_flux(&self, cell: usize, axis: usize, side: Side, face_node: usize) -> Option<Result<Flux<R>>>;
}

/// Every cell is a fluid cell.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllFluid;

impl<R: Real> FaceFluxOverride<R> for AllFluid {
    fn face_flux(&self, _: usize, _: usize, _: Side, _: usize) -> Option<Result<Flux<R>>> {
        None
    }
}

/// Flux through a non-periodic domain boundary from the interior trace.
#[allow(clippy::too_many_arguments)]
pub fn wall_flux<R: Real>(
    dim: Dim,
    kind: &BoundaryKind<R>,
    axis: usize,
    side: Side,
    position: [R; 2],
    m: &Moments<R>,
    g: &PrimitiveGradients<R>,
    epsilon: R,
) -> Result<Flux<R>> {
    let (own_half, wall_half) = match side {
        Side::Low => (HalfLine::Negative, HalfLine::Positive),
        Side::High => (HalfLine::Positive, HalfLine::Negative),
    };
    let add = |a: Flux<R>, b: Flux<R>, s: R| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
    match *kind {
        BoundaryKind::Outflow => kfvs_interface_flux(dim, (m, g), (m, g), epsilon, axis),
        BoundaryKind::Periodic => Err(Error::config("periodic faces have no wall flux")),
        BoundaryKind::EvaporatingWall { temp, pressure } => {
            let own = kfvs_half_flux(dim, m, g, epsilon, axis, own_half)?;
            let wall = maxwellian_half_flux(dim, &Moments::at_rest(pressure / temp, temp), axis, wall_half)?;
            Ok(add(own, wall, R::one()))
        }
        BoundaryKind::DiffuseMovingWall { temp, velocity } => {
            let s = if dim == Dim::Two { position[1 - axis] } else { R::zero() };
            let own = kfvs_half_flux(dim, m, g, epsilon, axis, own_half)?;
            let unit = maxwellian_half_flux(dim, &Moments::new(R::one(), velocity, temp.at(s)), axis, wall_half)?;
            if unit[0] == R::zero() {
                return Err(Error::invalid("wall Maxwellian carries no incoming mass flux"));
            }
            let sigma = -own[0] / unit[0];
            Ok(add(own, unit, sigma))
        }
    }
}

/// Interface flux seen by `cell` on face `(axis, side, face_node)`.
fn face_flux<R: Real, O: FaceFluxOverride<R>>(
    problem: &Problem<R>,
    state: &FluidState<R>,
    over: &O,
    cell: usize,
    axis: usize,
    side: Side,
    face_node: usize,
) -> Result<Flux<R>> {
    if let Some(f) = over.face_flux(cell, axis, side, face_node) {
        return f;
    }
    let dim = problem.dim();
    let eps = problem.epsilon();
    let primitive = |c: usize, s: Side| -> Result<(Moments<R>, PrimitiveGradients<R>)> {
        let u = trace_conserved(problem, &state.u, c, axis, s, face_node);
        let m = Moments::from_conserved(&u).map_err(|e| Error::StepFailure {
            location: Location { cell: c, node: face_node },
            reason: format!("face trace: {e}"),
        })?;
        let g = trace_gradient(problem, &state.grad, c, axis, s, face_node);
        Ok((m, PrimitiveGradients::from_conserved(&m, &g)))
    };
    match problem.neighbor(cell, axis, side) {
        Some(nb) => {
            let (lo_cell, hi_cell) = match side {
                Side::High => (cell, nb),
                Side::Low => (nb, cell),
            };
            let (ml, gl) = primitive(lo_cell, Side::High)?;
            let (mr, gr) = primitive(hi_cell, Side::Low)?;
            kfvs_interface_flux(dim, (&ml, &gl), (&mr, &gr), eps, axis)
        }
        None => {
            let (m, g) = primitive(cell, side)?;
            let pos = problem.space.face_point(cell, axis, side, face_node);
            wall_flux(dim, problem.bc.kind(axis, side), axis, side, pos, &m, &g, eps)
        }
    }
}

/// Stable step for the fluid solver over the active cells.
///
/// Per cell: `dt * sum_a (|u_a| + c)(2K_a+1)/h_a <= 0.9` and
/// `dt * sum_a 2 eps mu (2K_a+1)^2 / h_a^2 <= 0.9`, with `c = sqrt(5T/3)`
/// and `mu` the largest nodal viscosity of the cell.
pub fn fluid_dt_limit<R: Real>(problem: &Problem<R>, u: &[Conserved<R>], active: Option<&[bool]>) -> Result<R> {
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let eps = problem.epsilon();
    let mut limit = R::infinity();
    for cell in 0..space.num_cells() {
        if active.is_some_and(|a| !a[cell]) {
            continue;
        }
        let mut adv = R::zero();
        let mut mu_max = R::zero();
        let mut speed = [R::zero(); 2];
        for p in cell * npc..(cell + 1) * npc {
            let m = Moments::from_conserved(&u[p]).map_err(|e| fail_at(problem, p, e))?;
            let c = (R::lit(5.0 / 3.0) * m.temp).sqrt();
            for a in 0..2 {
                speed[a] = speed[a].max(m.u[a].abs() + c);
            }
            let (mu, _) = transport_coefficients(&m, problem.coeffs.beta)?;
            mu_max = mu_max.max(mu);
        }
        let mut diff = R::zero();
        for a in space.dim().axes() {
            let k = R::from_count(2 * space.basis(a).order() + 1);
            let h = space.width(cell, a);
            adv = adv + speed[a] * k / h;
            diff = diff + R::two() * eps * mu_max * k * k / (h * h);
        }
        let cap = R::lit(0.9);
        limit = limit.min(cap / adv);
        if diff > R::zero() {
            limit = limit.min(cap / diff);
        }
    }
    Ok(limit)
}

/// Advances the active cells by one forward-Euler DG step using the stored
/// gradients; inactive cells keep their values.
pub fn ns_advance<R: Real, O: FaceFluxOverride<R>>(
    problem: &Problem<R>,
    state: &FluidState<R>,
    dt: R,
    over: &O,
    active: Option<&[bool]>,
) -> Result<Vec<Conserved<R>>> {
    let limit = fluid_dt_limit(problem, &state.u, active)?;
    if !(dt > R::zero()) || dt > limit * (R::one() + R::lit(1e-12)) {
        return Err(Error::Cfl {
            dt: dt.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let dim = problem.dim();
    let eps = problem.epsilon();
    let beta = problem.coeffs.beta;
    let mut out = state.u.clone();
    let results: Vec<Result<()>> = out
        .par_chunks_mut(npc)
        .enumerate()
        .map(|(cell, block)| {
            if active.is_some_and(|a| !a[cell]) {
                return Ok(());
            }
            let base = cell * npc;
            let mut nodal: Vec<[Flux<R>; 2]> = Vec::with_capacity(npc);
            for p in base..base + npc {
                let m = Moments::from_conserved(&state.u[p]).map_err(|e| fail_at(problem, p, e))?;
                let g = PrimitiveGradients::from_conserved(&m, &state.grad[p]);
                let mut f = [[R::zero(); 4]; 2];
                for a in dim.axes() {
                    f[a] = navier_stokes_flux(dim, &m, &g, eps, beta, a)?;
                }
                nodal.push(f);
            }
            for axis in dim.axes() {
                let basis = space.basis(axis);
                let n = basis.len();
                let coef = dt / space.width(cell, axis);
                for fnode in 0..space.face_nodes(axis) {
                    let lo_flux = face_flux(problem, state, over, cell, axis, Side::Low, fnode)?;
                    let hi_flux = face_flux(problem, state, over, cell, axis, Side::High, fnode)?;
                    for k in 0..n {
                        let node = space.line_node(axis, fnode, k);
                        let lo = basis.lift(Side::Low, k);
                        let hi = basis.lift(Side::High, k);
                        let mut acc = [R::zero(); 4];
                        for c in 0..4 {
                            acc[c] = lo * lo_flux[c] - hi * hi_flux[c];
                        }
                        for l in 0..n {
                            let st = basis.stiff(k, l);
                            let fl = &nodal[space.line_node(axis, fnode, l)][axis];
                            for c in 0..4 {
                                acc[c] = acc[c] + st * fl[c];
                            }
                        }
                        for c in 0..4 {
                            block[node].0[c] = block[node].0[c] + coef * acc[c];
                        }
                    }
                }
            }
            for (node, c) in block.iter().enumerate() {
                Moments::from_conserved(c).map_err(|e| fail_at(problem, base + node, e))?;
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<()>>()?;
    Ok(out)
}

/// One full fluid step: advance, then reconstruct gradients of the new state.
pub fn ns_step<R: Real, O: FaceFluxOverride<R>>(
    problem: &Problem<R>,
    state: &FluidState<R>,
    dt: R,
    over: &O,
) -> Result<FluidState<R>> {
    let u = ns_advance(problem, state, dt, over, None)?;
    let grad = gradient_reconstruct(problem, &u);
    Ok(FluidState {
        u,
        grad,
        time: state.time + dt,
    })
}
