//! Hybrid time stepping: kinetic and fluid regions advanced together with
//! shared interface fluxes, followed by a region update.
//!
//! The conservative field `U` (and its gradient `S`) is kept for every cell;
//! kinetic cells store the discrete moments of their distribution there. The
//! distribution is only meaningful on kinetic cells.

use rayon::prelude::*;

use crate::decomposition::{
    cell_lambdas, compression_distance, fluid_breakdown, forced_mask, primitive_gradients, update_regions,
    CellCriteria, DecompositionConfig, Region, RegionMap,
};
use crate::error::{Error, Result};
use crate::fluid::dg::{gradient_reconstruct, ns_advance, ns_step, trace_conserved, trace_gradient};
use crate::fluid::{AllFluid, FaceFluxOverride, FluidState, Flux, Gradient};
use crate::kinetic::{
    cell_trace, face_upwind, relax_in_place, transport_into, AllKinetic, CollisionModel, ExteriorSource,
};
use crate::mesh::Side;
use crate::problem::Problem;
use crate::real::Real;
use crate::velocity::{
    conserved_moments, fill_chapman_enskog, fill_discrete_maxwellian, Conserved, Moments, PrimitiveGradients,
    ReducedDistribution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Hybrid,
    FullKinetic,
    FullFluid,
}

/// Complete solver state.
#[derive(Debug, Clone)]
pub struct HybridState<R> {
    pub mode: Mode,
    pub regions: RegionMap,
    pub dist: ReducedDistribution<R>,
    pub fluid: FluidState<R>,
    pub time: R,
    pub step: usize,
    pub config: DecompositionConfig<R>,
    pub collision: CollisionModel<R>,
}

impl<R: Real> HybridState<R> {
    /// Initial state from nodal macroscopic data.
    ///
    /// Kinetic representations start at local Maxwellians. In hybrid mode
    /// every cell starts kinetic and the region criteria are applied once.
    pub fn new(
        problem: &Problem<R>,
        moments: &[Moments<R>],
        mode: Mode,
        config: DecompositionConfig<R>,
    ) -> Result<Self> {
        config.validate()?;
        let n = problem.space.num_points();
        if moments.len() != n {
            return Err(Error::config("one macroscopic state per space node is required"));
        }
        let cells = problem.space.num_cells();
        let (regions, dist, fluid) = match mode {
            Mode::FullFluid => (
                RegionMap::uniform(Region::Fluid, vec![false; cells]),
                ReducedDistribution::zeros(0, problem.grid.len()),
                FluidState::from_moments(problem, moments)?,
            ),
            Mode::FullKinetic | Mode::Hybrid => {
                let forced = if mode == Mode::Hybrid {
                    forced_mask(problem, config.forced_band)
                } else {
                    vec![false; cells]
                };
                let mut dist = ReducedDistribution::zeros(n, problem.grid.len());
                let mut u = Vec::with_capacity(n);
                for (p, m) in moments.iter().enumerate() {
                    let (a, b) = dist.point_mut(p);
                    fill_discrete_maxwellian(m, &problem.grid, a, b)?;
                    u.push(conserved_moments(&problem.grid, a, b));
                }
                (
                    RegionMap::uniform(Region::Kinetic, forced),
                    dist,
                    FluidState::new(problem, u, R::zero())?,
                )
            }
        };
        let mut state = Self {
            mode,
            regions,
            dist,
            fluid,
            time: R::zero(),
            step: 0,
            config,
            collision: CollisionModel::Bgk,
        };
        if mode == Mode::Hybrid {
            state.update_regions(problem)?;
        }
        Ok(state)
    }

    /// Nodal macroscopic states of every cell.
    pub fn moments(&self) -> Result<Vec<Moments<R>>> {
        self.fluid.moments()
    }

    /// Integrals of `(rho, rho u1, rho u2, E)` over the domain.
    pub fn totals(&self, problem: &Problem<R>) -> [R; 4] {
        conserved_totals(problem, &self.fluid.u)
    }

    /// Advances by `dt` and, every `period` steps, updates the regions.
    pub fn step(&mut self, problem: &Problem<R>, dt: R) -> Result<()> {
        match self.mode {
            Mode::FullKinetic => {
                let mut stage = ReducedDistribution::zeros(self.dist.num_points(), problem.grid.len());
                transport_into(problem, &self.dist, dt, &AllKinetic, None, &mut stage)?;
                let previous = self.fluid.moments()?;
                let moments = relax_in_place(problem, &mut stage, dt, self.collision, None, &previous)?;
                self.dist = stage;
                let u: Vec<_> = moments.iter().map(Moments::to_conserved).collect();
                self.fluid = FluidState {
                    grad: gradient_reconstruct(problem, &u),
                    u,
                    time: self.fluid.time + dt,
                };
            }
            Mode::FullFluid => {
                self.fluid = ns_step(problem, &self.fluid, dt, &AllFluid)?;
            }
            Mode::Hybrid => self.hybrid_advance(problem, dt)?,
        }
        self.time = self.time + dt;
        self.step += 1;
        if self.mode == Mode::Hybrid && self.step.is_multiple_of(self.config.period) {
            self.update_regions(problem)?;
        }
        Ok(())
    }

    fn hybrid_advance(&mut self, problem: &Problem<R>, dt: R) -> Result<()> {
        let kin = self.regions.kinetic_mask();
        let flu = self.regions.fluid_mask();
        let coupling = Coupling {
            problem,
            regions: &self.regions,
            dist: &self.dist,
            fluid: &self.fluid,
        };

        let mut stage = ReducedDistribution::zeros(self.dist.num_points(), problem.grid.len());
        transport_into(problem, &self.dist, dt, &coupling, Some(&kin), &mut stage)?;
        let mut u = ns_advance(problem, &self.fluid, dt, &coupling, Some(&flu))?;

        let previous = self.fluid.moments()?;
        let moments = relax_in_place(problem, &mut stage, dt, self.collision, Some(&kin), &previous)?;
        let npc = problem.space.nodes_per_cell();
        for (p, m) in moments.iter().enumerate() {
            if kin[p / npc] {
                u[p] = m.to_conserved();
            }
        }
        self.dist = stage;
        self.fluid = FluidState {
            grad: gradient_reconstruct(problem, &u),
            u,
            time: self.fluid.time + dt,
        };
        Ok(())
    }

    /// Evaluates both criteria and switches cells accordingly.
    pub fn update_regions(&mut self, problem: &Problem<R>) -> Result<()> {
        let criteria = self.criteria(problem)?;
        let next = update_regions(&self.regions, &criteria, self.step);
        let mut changed = false;
        let mut fallback = Vec::new();
        for cell in 0..next.len() {
            let from = self.regions.label(cell);
            let to = next.label(cell);
            if from != to {
                if switch_cell(problem, cell, from, to, &mut self.dist, &mut self.fluid.u, &self.fluid.grad)? {
                    changed = true;
                } else {
                    fallback.push(cell);
                }
            }
        }
        let mut next = next;
        for cell in fallback {
            next.set(cell, Region::Kinetic, self.step);
        }
        self.regions = next;
        if changed {
            self.fluid.grad = gradient_reconstruct(problem, &self.fluid.u);
        }
        Ok(())
    }

    /// Criteria for every cell under the current map.
    pub fn criteria(&self, problem: &Problem<R>) -> Result<Vec<CellCriteria>> {
        let lambdas = cell_lambdas(problem, &self.fluid.u, &self.fluid.grad)?;
        let moments = self.fluid.moments()?;
        let grads = primitive_gradients(&moments, &self.fluid.grad);
        let npc = problem.space.nodes_per_cell();
        (0..problem.space.num_cells())
            .into_par_iter()
            .map(|cell| {
                Ok(match self.regions.label(cell) {
                    Region::Fluid => CellCriteria {
                        breakdown: Some(fluid_breakdown(lambdas[cell], &self.config)),
                        compression: None,
                    },
                    Region::Kinetic if self.regions.is_forced(cell) => CellCriteria::default(),
                    Region::Kinetic => {
                        let r = cell * npc..(cell + 1) * npc;
                        let d = compression_distance(problem, &self.dist, cell, &moments[r.clone()], &grads[r])?;
                        CellCriteria {
                            breakdown: None,
                            compression: Some(d <= self.config.delta0),
                        }
                    }
                })
            })
            .collect()
    }
}

/// Sum over cells of `volume * sum_node w_node U`.
pub fn conserved_totals<R: Real>(problem: &Problem<R>, u: &[Conserved<R>]) -> [R; 4] {
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let mut total = [R::zero(); 4];
    for cell in 0..space.num_cells() {
        let mut s = [R::zero(); 4];
        for node in 0..npc {
            let w = space.node_weight(node);
            for c in 0..4 {
                s[c] = s[c] + w * u[cell * npc + node].0[c];
            }
        }
        let v = space.volume(cell);
        for c in 0..4 {
            total[c] = total[c] + v * s[c];
        }
    }
    total
}

/// Transfers a cell between representations.
///
/// Fluid to kinetic fills the truncated pair from the nodal `(U, S)`; kinetic
/// to fluid keeps `U` as the discrete moments of the distribution. Returns
/// `false` (and changes nothing) when a kinetic cell's moments are invalid.
pub fn switch_cell<R: Real>(
    problem: &Problem<R>,
    cell: usize,
    from: Region,
    to: Region,
    dist: &mut ReducedDistribution<R>,
    u: &mut [Conserved<R>],
    grad: &[Gradient<R>],
) -> Result<bool> {
    let npc = problem.space.nodes_per_cell();
    let range = cell * npc..(cell + 1) * npc;
    match (from, to) {
        (Region::Fluid, Region::Kinetic) => {
            for p in range {
                let m = Moments::from_conserved(&u[p])?;
                let g = PrimitiveGradients::from_conserved(&m, &grad[p]);
                let (a, b) = dist.point_mut(p);
                fill_chapman_enskog(&m, &g, problem.epsilon(), &problem.grid, a, b)?;
                u[p] = conserved_moments(&problem.grid, a, b);
            }
            Ok(true)
        }
        (Region::Kinetic, Region::Fluid) => {
            let mut new_u = Vec::with_capacity(npc);
            for p in range.clone() {
                let (a, b) = dist.point(p);
                let c = conserved_moments(&problem.grid, a, b);
                if Moments::from_conserved(&c).is_err() {
                    return Ok(false);
                }
                new_u.push(c);
            }
            u[range].copy_from_slice(&new_u);
            Ok(true)
        }
        _ => Ok(true),
    }
}

/// Interface data exchange between the two regions.
struct Coupling<'a, R> {
    problem: &'a Problem<R>,
    regions: &'a RegionMap,
    dist: &'a ReducedDistribution<R>,
    fluid: &'a FluidState<R>,
}

impl<R: Real> Coupling<'_, R> {
    fn fluid_face_state(
        &self,
        cell: usize,
        axis: usize,
        side: Side,
        face_node: usize,
    ) -> Result<(Moments<R>, PrimitiveGradients<R>)> {
        let u = trace_conserved(self.problem, &self.fluid.u, cell, axis, side, face_node);
        let m = Moments::from_conserved(&u).map_err(|e| Error::StepFailure {
            location: crate::error::Location { cell, node: face_node },
            reason: format!("face trace: {e}"),
        })?;
        let g = trace_gradient(self.problem, &self.fluid.grad, cell, axis, side, face_node);
        Ok((m, PrimitiveGradients::from_conserved(&m, &g)))
    }
}

impl<R: Real> ExteriorSource<R> for Coupling<'_, R> {
    fn fluid_trace(
        &self,
        cell: usize,
        axis: usize,
        side: Side,
        face_node: usize,
    ) -> Option<Result<(Moments<R>, PrimitiveGradients<R>)>> {
        if self.regions.is_kinetic(cell) {
            return None;
        }
        Some(self.fluid_face_state(cell, axis, side, face_node))
    }
}

impl<R: Real> FaceFluxOverride<R> for Coupling<'_, R> {
    fn face_flux(&self, cell: usize, axis: usize, side: Side, face_node: usize) -> Option<Result<Flux<R>>> {
        let nb = self.problem.neighbor(cell, axis, side)?;
        if !self.regions.is_kinetic(nb) {
            return None;
        }
        Some(mixed_interface_flux(self, cell, nb, axis, side, face_node))
    }
}

/// Fluid-side flux across a fluid/kinetic face: velocity moments of the same
/// per-velocity upwind fluxes the kinetic neighbour uses.
fn mixed_interface_flux<R: Real>(
    c: &Coupling<'_, R>,
    cell: usize,
    nb: usize,
    axis: usize,
    side: Side,
    face_node: usize,
) -> Result<Flux<R>> {
    let grid = &c.problem.grid;
    let n = grid.len();
    let (m, g) = c.fluid_face_state(cell, axis, side, face_node)?;
    let mut own1 = vec![R::zero(); n];
    let mut own2 = vec![R::zero(); n];
    fill_chapman_enskog(&m, &g, c.problem.epsilon(), grid, &mut own1, &mut own2)?;
    let mut k1 = vec![R::zero(); n];
    let mut k2 = vec![R::zero(); n];
    cell_trace(c.problem, c.dist, nb, axis, side.opposite(), face_node, &mut k1, &mut k2);
    let mut f1 = vec![R::zero(); n];
    let mut f2 = vec![R::zero(); n];
    match side {
        Side::High => face_upwind(grid, axis, (&own1, &own2), (&k1, &k2), &mut f1, &mut f2),
        Side::Low => face_upwind(grid, axis, (&k1, &k2), (&own1, &own2), &mut f1, &mut f2),
    }
    Ok(conserved_moments(grid, &f1, &f2).0)
}
