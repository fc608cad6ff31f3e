//! First-order IMEX nodal DG scheme for the Chu-reduced BGK system.
//!
//! One step is an explicit upwind DG transport stage `R = f - dt v.grad f`
//! followed by the implicit relaxation
//! `f = (eps R + nu dt M(U)) / (eps + nu dt)` with `U` the discrete moments
//! of `R`, which needs no iteration because relaxation conserves `U`.

use rayon::prelude::*;

use crate::error::{Error, Location, Result};
use crate::mesh::{Dim, Side};
use crate::problem::Problem;
use crate::real::Real;
use crate::velocity::{
    collision_frequency, conserved_moments, fill_chapman_enskog, fill_discrete_maxwellian, fill_maxwellian,
    Conserved, Moments, PrimitiveGradients, ReducedDistribution, VelocityGrid,
};

/// Wall temperature along the wall-tangential coordinate `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallTemperature<R> {
    Constant(R),
    /// `mean - amplitude * cos(2 pi s)`
    Cosine { mean: R, amplitude: R },
}

impl<R: Real> WallTemperature<R> {
    pub fn at(&self, s: R) -> R {
        match *self {
            WallTemperature::Constant(t) => t,
            WallTemperature::Cosine { mean, amplitude } => mean - amplitude * (R::two() * R::PI() * s).cos(),
        }
    }

    fn min_value(&self) -> R {
        match *self {
            WallTemperature::Constant(t) => t,
            WallTemperature::Cosine { mean, amplitude } => mean - amplitude.abs(),
        }
    }
}

/// Boundary condition on one side of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind<R> {
    /// Saturated vapour at rest with the given temperature and pressure.
    EvaporatingWall { temp: R, pressure: R },
    /// Diffuse reflection from a wall moving with `velocity`.
    DiffuseMovingWall { temp: WallTemperature<R>, velocity: [R; 2] },
    Outflow,
    Periodic,
}

impl<R: Real> BoundaryKind<R> {
    pub fn is_wall(&self) -> bool {
        matches!(
            self,
            BoundaryKind::EvaporatingWall { .. } | BoundaryKind::DiffuseMovingWall { .. }
        )
    }
}

/// Boundary conditions indexed by `[axis][side]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec<R> {
    sides: [[BoundaryKind<R>; 2]; 2],
}

impl<R: Real> BoundarySpec<R> {
    pub fn new_1d(low: BoundaryKind<R>, high: BoundaryKind<R>) -> Self {
        Self {
            sides: [[low, high], [BoundaryKind::Periodic, BoundaryKind::Periodic]],
        }
    }

    pub fn new_2d(x: [BoundaryKind<R>; 2], y: [BoundaryKind<R>; 2]) -> Self {
        Self { sides: [x, y] }
    }

    pub fn periodic() -> Self {
        Self::new_1d(BoundaryKind::Periodic, BoundaryKind::Periodic)
    }

    pub fn uniform(kind: BoundaryKind<R>) -> Self {
        Self::new_2d([kind; 2], [kind; 2])
    }

    pub fn kind(&self, axis: usize, side: Side) -> &BoundaryKind<R> {
        &self.sides[axis][side.index()]
    }

    pub fn validate(&self, dim: Dim) -> Result<()> {
        for axis in dim.axes() {
            let [lo, hi] = &self.sides[axis];
            if matches!(lo, BoundaryKind::Periodic) != matches!(hi, BoundaryKind::Periodic) {
                return Err(Error::config(format!("axis {axis}: periodic boundaries must come in pairs")));
            }
            for b in [lo, hi] {
                match *b {
                    BoundaryKind::EvaporatingWall { temp, pressure } if !(temp > R::zero() && pressure > R::zero()) => {
                        return Err(Error::config("evaporating wall needs positive temperature and pressure"));
                    }
                    BoundaryKind::DiffuseMovingWall { temp, .. } if !(temp.min_value() > R::zero()) => {
                        return Err(Error::config("diffuse wall temperature must stay positive"));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Collision frequency used by the relaxation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollisionModel<R> {
    /// `nu = 2 rho / sqrt(pi)`.
    Bgk,
    /// A fixed value; `Fixed(0)` turns the scheme into pure transport.
    Fixed(R),
}

impl<R: Real> CollisionModel<R> {
    fn frequency(&self, m: &Moments<R>) -> Result<R> {
        match *self {
            CollisionModel::Bgk => collision_frequency(m),
            CollisionModel::Fixed(nu) => Ok(nu),
        }
    }
}

/// Distribution at one time level together with its nodal moments.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticState<R> {
    pub dist: ReducedDistribution<R>,
    pub moments: Vec<Moments<R>>,
    pub time: R,
}

impl<R: Real> KineticState<R> {
    /// Local (discretely normalised) Maxwellians of the given nodal moments.
    pub fn equilibrium(problem: &Problem<R>, moments: Vec<Moments<R>>) -> Result<Self> {
        let grid = &problem.grid;
        if moments.len() != problem.space.num_points() {
            return Err(Error::config("one macroscopic state per space node is required"));
        }
        let mut dist = ReducedDistribution::zeros(moments.len(), grid.len());
        for (p, m) in moments.iter().enumerate() {
            let (a, b) = dist.point_mut(p);
            fill_discrete_maxwellian(m, grid, a, b)?;
        }
        Self::from_distribution(problem, dist, R::zero())
    }

    /// Wraps a distribution, computing its moments.
    pub fn from_distribution(problem: &Problem<R>, dist: ReducedDistribution<R>, time: R) -> Result<Self> {
        let npc = problem.space.nodes_per_cell();
        let mut moments = Vec::with_capacity(dist.num_points());
        for p in 0..dist.num_points() {
            let (a, b) = dist.point(p);
            let m = Moments::from_conserved(&conserved_moments(&problem.grid, a, b)).map_err(|e| {
                Error::StepFailure {
                    location: Location { cell: p / npc, node: p % npc },
                    reason: e.to_string(),
                }
            })?;
            moments.push(m);
        }
        Ok(Self { dist, moments, time })
    }

    pub fn conserved(&self) -> Vec<Conserved<R>> {
        self.moments.iter().map(Moments::to_conserved).collect()
    }
}

/// `v f-` for `v >= 0`, otherwise `v f+`.
#[inline]
pub fn upwind_flux<R: Real>(v: R, f_minus: R, f_plus: R) -> R {
    if v >= R::zero() {
        v * f_minus
    } else {
        v * f_plus
    }
}

/// Supplies neighbour data that is not held as a distribution.
pub trait ExteriorSource<R: Real>: Sync {
    /// Macroscopic trace of a fluid cell on its face `(axis, side, face_node)`,
    /// or `None` if `cell` is kinetic.
    fn fluid_trace(
        &self,
        cell: usize,
        axis: usize,
        side: Side,
        face_node: usize,
    ) -> Option<Result<(Moments<R>, PrimitiveGradients<R>)>>;
}

/// Every cell holds a distribution.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllKinetic;

impl<R: Real> ExteriorSource<R> for AllKinetic {
    fn fluid_trace(&self, _: usize, _: usize, _: Side, _: usize) -> Option<Result<(Moments<R>, PrimitiveGradients<R>)>> {
        None
    }
}

/// Trace of a cell's distribution at one face node, for both components.
pub fn cell_trace<R: Real>(
    problem: &Problem<R>,
    dist: &ReducedDistribution<R>,
    cell: usize,
    axis: usize,
    side: Side,
    face_node: usize,
    out1: &mut [R],
    out2: &mut [R],
) {
    let space = &problem.space;
    let basis = space.basis(axis);
    let npc = space.nodes_per_cell();
    let tr = basis.trace_vector(side);
    out1.iter_mut().for_each(|x| *x = R::zero());
    out2.iter_mut().for_each(|x| *x = R::zero());
    for (k, &phi) in tr.iter().enumerate() {
        let p = cell * npc + space.line_node(axis, face_node, k);
        let (a, b) = dist.point(p);
        for j in 0..out1.len() {
            out1[j] = out1[j] + phi * a[j];
            out2[j] = out2[j] + phi * b[j];
        }
    }
}

/// Ghost (exterior) trace on a non-periodic domain boundary.
///
/// `side` is the side of the domain the face lies on; `position` is the
/// physical location of the face node.
#[allow(clippy::too_many_arguments)]
pub fn apply_boundary<R: Real>(
    kind: &BoundaryKind<R>,
    axis: usize,
    side: Side,
    position: [R; 2],
    grid: &VelocityGrid<R>,
    interior1: &[R],
    interior2: &[R],
    ghost1: &mut [R],
    ghost2: &mut [R],
) -> Result<()> {
    ghost1.copy_from_slice(interior1);
    ghost2.copy_from_slice(interior2);
    let incoming = |v: R| match side {
        Side::Low => v > R::zero(),
        Side::High => v < R::zero(),
    };
    match *kind {
        BoundaryKind::Outflow => Ok(()),
        BoundaryKind::Periodic => Err(Error::config("periodic faces have no ghost state")),
        BoundaryKind::EvaporatingWall { temp, pressure } => {
            let wall = Moments::at_rest(pressure / temp, temp);
            let mut m1 = vec![R::zero(); grid.len()];
            let mut m2 = vec![R::zero(); grid.len()];
            fill_maxwellian(&wall, grid, &mut m1, &mut m2)?;
            for j in 0..grid.len() {
                if incoming(grid.point(j)[axis]) {
                    ghost1[j] = m1[j];
                    ghost2[j] = m2[j];
                }
            }
            Ok(())
        }
        BoundaryKind::DiffuseMovingWall { temp, velocity } => {
            let s = if grid.dim() == Dim::Two { position[1 - axis] } else { R::zero() };
            let wall = Moments::new(R::one(), velocity, temp.at(s));
            let mut m1 = vec![R::zero(); grid.len()];
            let mut m2 = vec![R::zero(); grid.len()];
            fill_maxwellian(&wall, grid, &mut m1, &mut m2)?;
            let sigma = diffuse_wall_density(axis, side, grid, interior1, &m1)?;
            for j in 0..grid.len() {
                if incoming(grid.point(j)[axis]) {
                    ghost1[j] = sigma * m1[j];
                    ghost2[j] = sigma * m2[j];
                }
            }
            Ok(())
        }
    }
}

/// Wall density balancing the discrete normal mass flux.
///
/// `unit_wall` is the wall Maxwellian at unit density.
pub fn diffuse_wall_density<R: Real>(
    axis: usize,
    side: Side,
    grid: &VelocityGrid<R>,
    interior: &[R],
    unit_wall: &[R],
) -> Result<R> {
    let mut out = R::zero();
    let mut inc = R::zero();
    for j in 0..grid.len() {
        let v = grid.point(j)[axis];
        let leaving = match side {
            Side::Low => v < R::zero(),
            Side::High => v > R::zero(),
        };
        if leaving {
            out = out + v.abs() * interior[j];
        } else if v != R::zero() {
            inc = inc + v.abs() * unit_wall[j];
        }
    }
    if !(inc > R::zero()) {
        return Err(Error::invalid("wall Maxwellian has no incoming flux on this lattice"));
    }
    Ok(out / inc)
}

fn check_cfl<R: Real>(problem: &Problem<R>, dt: R) -> Result<()> {
    let limit = problem.kinetic_dt_limit();
    if !(dt > R::zero()) || dt > limit * (R::one() + R::lit(1e-12)) {
        return Err(Error::Cfl {
            dt: dt.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Exterior trace of `cell` across face `(axis, side, face_node)`.
#[allow(clippy::too_many_arguments)]
fn exterior_trace<R: Real, S: ExteriorSource<R>>(
    problem: &Problem<R>,
    dist: &ReducedDistribution<R>,
    source: &S,
    cell: usize,
    axis: usize,
    side: Side,
    face_node: usize,
    own1: &[R],
    own2: &[R],
    out1: &mut [R],
    out2: &mut [R],
) -> Result<()> {
    match problem.neighbor(cell, axis, side) {
        Some(n) => match source.fluid_trace(n, axis, side.opposite(), face_node) {
            Some(state) => {
                let (m, g) = state?;
                fill_chapman_enskog(&m, &g, problem.epsilon(), &problem.grid, out1, out2)
            }
            None => {
                cell_trace(problem, dist, n, axis, side.opposite(), face_node, out1, out2);
                Ok(())
            }
        },
        None => {
            let pos = problem.space.face_point(cell, axis, side, face_node);
            apply_boundary(problem.bc.kind(axis, side), axis, side, pos, &problem.grid, own1, own2, out1, out2)
        }
    }
}

/// Scratch vectors for one cell's face traces.
struct FaceScratch<R> {
    own: [[Vec<R>; 2]; 2],
    ext: [[Vec<R>; 2]; 2],
    flux: [[Vec<R>; 2]; 2],
}

impl<R: Real> FaceScratch<R> {
    fn new(n: usize) -> Self {
        let z = || [vec![R::zero(); n], vec![R::zero(); n]];
        Self {
            own: [z(), z()],
            ext: [z(), z()],
            flux: [z(), z()],
        }
    }
}

/// Upwind flux of both components for one face node, per velocity.
///
/// `low` is the state on the low side of the face, `high` on the high side.
pub fn face_upwind<R: Real>(
    grid: &VelocityGrid<R>,
    axis: usize,
    low: (&[R], &[R]),
    high: (&[R], &[R]),
    out1: &mut [R],
    out2: &mut [R],
) {
    for (j, p) in grid.points().iter().enumerate() {
        let v = p[axis];
        out1[j] = upwind_flux(v, low.0[j], high.0[j]);
        out2[j] = upwind_flux(v, low.1[j], high.1[j]);
    }
}

/// Transport stage into a preallocated buffer. Cells with `active == false`
/// are left untouched.
pub fn transport_into<R: Real, S: ExteriorSource<R>>(
    problem: &Problem<R>,
    dist: &ReducedDistribution<R>,
    dt: R,
    source: &S,
    active: Option<&[bool]>,
    out: &mut ReducedDistribution<R>,
) -> Result<()> {
    check_cfl(problem, dt)?;
    let space = &problem.space;
    let grid = &problem.grid;
    let nvel = grid.len();
    let npc = space.nodes_per_cell();
    let block = npc * nvel;
    let (o1, o2) = out.components_mut();

    let results: Vec<Result<()>> = o1
        .par_chunks_mut(block)
        .zip(o2.par_chunks_mut(block))
        .enumerate()
        .map_init(
            || FaceScratch::new(nvel),
            |scratch, (cell, (r1, r2))| {
                if active.is_some_and(|a| !a[cell]) {
                    return Ok(());
                }
                let (f1, f2) = dist.block(cell * npc, npc);
                r1.copy_from_slice(f1);
                r2.copy_from_slice(f2);
                for axis in space.dim().axes() {
                    transport_axis(problem, dist, source, cell, axis, dt, scratch, (f1, f2), (r1, r2))?;
                }
                Ok(())
            },
        )
        .collect();
    results.into_iter().collect()
}

#[allow(clippy::too_many_arguments)]
fn transport_axis<R: Real, S: ExteriorSource<R>>(
    problem: &Problem<R>,
    dist: &ReducedDistribution<R>,
    source: &S,
    cell: usize,
    axis: usize,
    dt: R,
    sc: &mut FaceScratch<R>,
    f: (&[R], &[R]),
    r: (&mut [R], &mut [R]),
) -> Result<()> {
    let space = &problem.space;
    let grid = &problem.grid;
    let nvel = grid.len();
    let basis = space.basis(axis);
    let n = basis.len();
    let coef = dt / space.width(cell, axis);
    let (r1, r2) = r;
    for fnode in 0..space.face_nodes(axis) {
        for side in [Side::Low, Side::High] {
            let s = side.index();
            let [o1, o2] = &mut sc.own[s];
            cell_trace(problem, dist, cell, axis, side, fnode, o1, o2);
            let [e1, e2] = &mut sc.ext[s];
            exterior_trace(problem, dist, source, cell, axis, side, fnode, o1, o2, e1, e2)?;
        }
        {
            let [fl1, fl2] = &mut sc.flux[0];
            face_upwind(
                grid,
                axis,
                (&sc.ext[0][0], &sc.ext[0][1]),
                (&sc.own[0][0], &sc.own[0][1]),
                fl1,
                fl2,
            );
            let [fh1, fh2] = &mut sc.flux[1];
            face_upwind(
                grid,
                axis,
                (&sc.own[1][0], &sc.own[1][1]),
                (&sc.ext[1][0], &sc.ext[1][1]),
                fh1,
                fh2,
            );
        }
        for k in 0..n {
            let node = space.line_node(axis, fnode, k);
            let lo = basis.lift(Side::Low, k);
            let hi = basis.lift(Side::High, k);
            let row1 = &mut r1[node * nvel..(node + 1) * nvel];
            let row2 = &mut r2[node * nvel..(node + 1) * nvel];
            for j in 0..nvel {
                let acc1 = lo * sc.flux[0][0][j] - hi * sc.flux[1][0][j];
                let acc2 = lo * sc.flux[0][1][j] - hi * sc.flux[1][1][j];
                row1[j] = row1[j] + coef * acc1;
                row2[j] = row2[j] + coef * acc2;
            }
            for l in 0..n {
                let st = basis.stiff(k, l);
                if st == R::zero() {
                    continue;
                }
                let src = space.line_node(axis, fnode, l);
                let s1 = &f.0[src * nvel..(src + 1) * nvel];
                let s2 = &f.1[src * nvel..(src + 1) * nvel];
                let c = coef * st;
                for (j, p) in grid.points().iter().enumerate() {
                    let cv = c * p[axis];
                    row1[j] = row1[j] + cv * s1[j];
                    row2[j] = row2[j] + cv * s2[j];
                }
            }
        }
    }
    Ok(())
}

/// `R = f - dt * DG divergence of the upwind flux`, for every cell.
pub fn transport_stage<R: Real>(
    problem: &Problem<R>,
    state: &KineticState<R>,
    dt: R,
) -> Result<ReducedDistribution<R>> {
    let mut out = ReducedDistribution::zeros(state.dist.num_points(), problem.grid.len());
    transport_into(problem, &state.dist, dt, &AllKinetic, None, &mut out)?;
    Ok(out)
}

/// Implicit relaxation of `stage` in place, returning the new nodal moments
/// of active points (inactive points keep `previous`).
pub fn relax_in_place<R: Real>(
    problem: &Problem<R>,
    stage: &mut ReducedDistribution<R>,
    dt: R,
    collision: CollisionModel<R>,
    active: Option<&[bool]>,
    previous: &[Moments<R>],
) -> Result<Vec<Moments<R>>> {
    let grid = &problem.grid;
    let eps = problem.epsilon();
    let npc = problem.space.nodes_per_cell();
    let nvel = grid.len();
    let (s1, s2) = stage.components_mut();
    let results: Vec<Result<Moments<R>>> = s1
        .par_chunks_mut(nvel)
        .zip(s2.par_chunks_mut(nvel))
        .enumerate()
        .map_init(
            || (vec![R::zero(); nvel], vec![R::zero(); nvel]),
            |(m1, m2), (p, (a, b))| {
                let cell = p / npc;
                if active.is_some_and(|act| !act[cell]) {
                    return Ok(previous[p]);
                }
                let fail = |e: Error| Error::StepFailure {
                    location: Location { cell, node: p % npc },
                    reason: e.to_string(),
                };
                let m = Moments::from_conserved(&conserved_moments(grid, a, b)).map_err(fail)?;
                let nu = collision.frequency(&m).map_err(fail)?;
                let ndt = nu * dt;
                if ndt == R::zero() {
                    return Ok(m);
                }
                fill_discrete_maxwellian(&m, grid, m1, m2).map_err(fail)?;
                let denom = eps + ndt;
                let wr = eps / denom;
                let wm = ndt / denom;
                for j in 0..nvel {
                    a[j] = wr * a[j] + wm * m1[j];
                    b[j] = wr * b[j] + wm * m2[j];
                }
                Ok(m)
            },
        )
        .collect();
    results.into_iter().collect()
}

/// Relaxation step applied to a transported distribution.
pub fn imex_update<R: Real>(
    problem: &Problem<R>,
    state: &KineticState<R>,
    stage: ReducedDistribution<R>,
    dt: R,
    collision: CollisionModel<R>,
) -> Result<KineticState<R>> {
    let mut stage = stage;
    let moments = relax_in_place(problem, &mut stage, dt, collision, None, &state.moments)?;
    Ok(KineticState {
        dist: stage,
        moments,
        time: state.time + dt,
    })
}

/// One full kinetic time step.
pub fn kinetic_step<R: Real>(
    problem: &Problem<R>,
    state: &KineticState<R>,
    dt: R,
    collision: CollisionModel<R>,
) -> Result<KineticState<R>> {
    let stage = transport_stage(problem, state, dt)?;
    imex_update(problem, state, stage, dt, collision)
}
