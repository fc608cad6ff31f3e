//! Regime indicators and the per-cell kinetic/fluid region map.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fluid::Gradient;
use crate::mesh::Side;
use crate::problem::Problem;
use crate::real::Real;
use crate::velocity::{fill_chapman_enskog, Conserved, Moments, PrimitiveGradients, ReducedDistribution};

/// Thresholds and forcing for the domain decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionConfig<R> {
    /// Fluid-breakdown threshold on `lambda`.
    pub eta0: R,
    /// Kinetic-compression threshold on the distance to the truncated pair.
    pub delta0: R,
    /// Width of the always-kinetic band next to each wall.
    pub forced_band: R,
    /// Re-evaluate regions every `period` steps.
    pub period: usize,
}

impl<R: Real> Default for DecompositionConfig<R> {
    fn default() -> Self {
        Self {
            eta0: R::lit(1e-3),
            delta0: R::lit(1e-3),
            forced_band: R::zero(),
            period: 1,
        }
    }
}

impl<R: Real> DecompositionConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta0 > R::zero()) {
            return Err(Error::config("eta0 must be positive"));
        }
        if !(self.delta0 > R::zero()) {
            return Err(Error::config("delta0 must be positive"));
        }
        if !(self.forced_band >= R::zero()) {
            return Err(Error::config("forced band width must be non-negative"));
        }
        if self.period == 0 {
            return Err(Error::config("re-evaluation period must be at least one step"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Kinetic,
    Fluid,
}

impl Region {
    pub fn letter(self) -> char {
        match self {
            Region::Kinetic => 'K',
            Region::Fluid => 'F',
        }
    }
}

/// Per-cell labels plus the forced-kinetic mask.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    labels: Vec<Region>,
    forced: Vec<bool>,
    last_change: Vec<usize>,
}

impl RegionMap {
    pub fn uniform(region: Region, forced: Vec<bool>) -> Self {
        let n = forced.len();
        let labels = forced
            .iter()
            .map(|&f| if f { Region::Kinetic } else { region })
            .collect();
        Self {
            labels,
            forced,
            last_change: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, cell: usize) -> Region {
        self.labels[cell]
    }

    pub fn labels(&self) -> &[Region] {
        &self.labels
    }

    pub fn is_kinetic(&self, cell: usize) -> bool {
        self.labels[cell] == Region::Kinetic
    }

    pub fn is_forced(&self, cell: usize) -> bool {
        self.forced[cell]
    }

    pub fn forced(&self) -> &[bool] {
        &self.forced
    }

    pub fn last_change(&self, cell: usize) -> usize {
        self.last_change[cell]
    }

    pub fn kinetic_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|&r| r == Region::Kinetic).collect()
    }

    pub fn fluid_mask(&self) -> Vec<bool> {
        self.labels.iter().map(|&r| r == Region::Fluid).collect()
    }

    pub fn kinetic_count(&self) -> usize {
        self.labels.iter().filter(|&&r| r == Region::Kinetic).count()
    }

    /// Fraction of cells labelled kinetic.
    pub fn kinetic_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.kinetic_count() as f64 / self.labels.len() as f64
    }

    /// Sets a label directly; forced cells cannot become fluid.
    pub fn set(&mut self, cell: usize, region: Region, step: usize) {
        if self.forced[cell] && region == Region::Fluid {
            return;
        }
        if self.labels[cell] != region {
            self.labels[cell] = region;
            self.last_change[cell] = step;
        }
    }
}

/// Outcome of the criteria for one cell. Each criterion is only evaluated
/// for cells of the model it guards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCriteria {
    /// `lambda > eta0` on a fluid cell.
    pub breakdown: Option<bool>,
    /// Distribution within `delta0` of its truncated pair on a kinetic cell.
    pub compression: Option<bool>,
}

/// Second derivatives used by the indicator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecondDerivatives<R> {
    /// Componentwise Laplacian of the velocity.
    pub lap_u: [R; 2],
    pub lap_rho: R,
}

/// `lambda = eps^2 (|grad T|^2 / T + |grad u|_F^2 + sqrt((|lap u|^2 + (lap rho / rho)^2)(1 + T^2)))`.
pub fn indicator_lambda<R: Real>(
    m: &Moments<R>,
    d1: &PrimitiveGradients<R>,
    d2: &SecondDerivatives<R>,
    epsilon: R,
) -> Result<R> {
    let m = m.validate()?;
    let gt = d1.dtemp[0] * d1.dtemp[0] + d1.dtemp[1] * d1.dtemp[1];
    let mut gu = R::zero();
    for row in &d1.du {
        for &v in row {
            gu = gu + v * v;
        }
    }
    let lu = d2.lap_u[0] * d2.lap_u[0] + d2.lap_u[1] * d2.lap_u[1];
    let lr = d2.lap_rho / m.rho;
    let root = ((lu + lr * lr) * (R::one() + m.temp * m.temp)).sqrt();
    Ok(epsilon * epsilon * (gt / m.temp + gu + root))
}

/// Strict threshold `lambda > eta0`.
pub fn fluid_breakdown<R: Real>(lambda: R, config: &DecompositionConfig<R>) -> bool {
    lambda > config.eta0
}

/// Discrete L2 distance between a cell's distribution and the truncated
/// pair built from its own nodal moments and gradients.
///
/// `sqrt(sum_node w_node sum_j w_v (d1^2 + d2^2))`
pub fn compression_distance<R: Real>(
    problem: &Problem<R>,
    dist: &ReducedDistribution<R>,
    cell: usize,
    moments: &[Moments<R>],
    grads: &[PrimitiveGradients<R>],
) -> Result<R> {
    let space = &problem.space;
    let grid = &problem.grid;
    let npc = space.nodes_per_cell();
    let mut t1 = vec![R::zero(); grid.len()];
    let mut t2 = vec![R::zero(); grid.len()];
    let mut total = R::zero();
    for node in 0..npc {
        let p = cell * npc + node;
        fill_chapman_enskog(&moments[node], &grads[node], problem.epsilon(), grid, &mut t1, &mut t2)?;
        let (a, b) = dist.point(p);
        let mut s = R::zero();
        for j in 0..grid.len() {
            let d1 = a[j] - t1[j];
            let d2 = b[j] - t2[j];
            s = s + d1 * d1 + d2 * d2;
        }
        total = total + space.node_weight(node) * s * grid.weight();
    }
    Ok(total.sqrt())
}

/// True when the cell's distribution is close enough to its truncated pair.
pub fn kinetic_compression<R: Real>(
    problem: &Problem<R>,
    dist: &ReducedDistribution<R>,
    cell: usize,
    moments: &[Moments<R>],
    grads: &[PrimitiveGradients<R>],
    config: &DecompositionConfig<R>,
) -> Result<bool> {
    Ok(compression_distance(problem, dist, cell, moments, grads)? <= config.delta0)
}

/// Applies the criteria: breakdown sends fluid cells to kinetic, compression
/// sends non-forced kinetic cells to fluid. Everything else is unchanged.
pub fn update_regions(map: &RegionMap, criteria: &[CellCriteria], step: usize) -> RegionMap {
    let mut next = map.clone();
    for (cell, c) in criteria.iter().enumerate() {
        match map.label(cell) {
            Region::Fluid if c.breakdown == Some(true) => next.set(cell, Region::Kinetic, step),
            Region::Kinetic if c.compression == Some(true) && !map.is_forced(cell) => {
                next.set(cell, Region::Fluid, step)
            }
            _ => {}
        }
        if map.is_forced(cell) {
            next.labels[cell] = Region::Kinetic;
        }
    }
    next
}

/// Cells whose centre lies within `band` of a wall boundary.
pub fn forced_mask<R: Real>(problem: &Problem<R>, band: R) -> Vec<bool> {
    let space = &problem.space;
    let mesh = space.mesh();
    (0..space.num_cells())
        .map(|cell| {
            let center = space.cell_center(cell);
            problem.dim().axes().any(|axis| {
                let (lo, hi) = mesh.extent(axis);
                let near_lo = problem.bc.kind(axis, Side::Low).is_wall() && center[axis] - lo < band;
                let near_hi = problem.bc.kind(axis, Side::High).is_wall() && hi - center[axis] < band;
                near_lo || near_hi
            })
        })
        .collect()
}

/// Nodal primitive gradients from conservative values and gradients.
pub fn primitive_gradients<R: Real>(moments: &[Moments<R>], grad: &[Gradient<R>]) -> Vec<PrimitiveGradients<R>> {
    moments
        .iter()
        .zip(grad)
        .map(|(m, g)| PrimitiveGradients::from_conserved(m, g))
        .collect()
}

/// Cell-centre state and first derivatives, from the nodal polynomials.
pub fn cell_centers<R: Real>(
    problem: &Problem<R>,
    u: &[Conserved<R>],
    grad: &[Gradient<R>],
) -> Result<Vec<(Moments<R>, Gradient<R>)>> {
    let space = &problem.space;
    let npc = space.nodes_per_cell();
    let w = space.center_weights();
    (0..space.num_cells())
        .map(|cell| {
            let mut uc = [R::zero(); 4];
            let mut gc = [[R::zero(); 4]; 2];
            for (node, &wn) in w.iter().enumerate() {
                let p = cell * npc + node;
                for c in 0..4 {
                    uc[c] = uc[c] + wn * u[p].0[c];
                    for a in 0..2 {
                        gc[a][c] = gc[a][c] + wn * grad[p][a][c];
                    }
                }
            }
            Ok((Moments::from_conserved(&Conserved(uc))?, gc))
        })
        .collect()
}

/// Cell-centre moments, first and second derivatives entering `lambda`.
///
/// First derivatives come from the reconstructed gradients; second
/// derivatives from differences of neighbouring cell-centre gradients
/// (central in the interior, one-sided at non-periodic boundaries).
/// Center state, first and second derivatives of one cell.
pub type IndicatorInput<R> = (Moments<R>, PrimitiveGradients<R>, SecondDerivatives<R>);

pub fn indicator_inputs<R: Real>(
    problem: &Problem<R>,
    u: &[Conserved<R>],
    grad: &[Gradient<R>],
) -> Result<Vec<IndicatorInput<R>>> {
    let centers = cell_centers(problem, u, grad)?;
    let prim: Vec<PrimitiveGradients<R>> = centers
        .iter()
        .map(|(m, g)| PrimitiveGradients::from_conserved(m, g))
        .collect();
    let space = &problem.space;
    Ok((0..space.num_cells())
        .into_par_iter()
        .map(|cell| {
            let mut d2 = SecondDerivatives::default();
            for axis in problem.dim().axes() {
                let h = space.width(cell, axis);
                let lo = problem.neighbor(cell, axis, Side::Low);
                let hi = problem.neighbor(cell, axis, Side::High);
                let dist = |n: usize| R::half() * (h + space.width(n, axis));
                let diff = |f: &dyn Fn(usize) -> R| -> R {
                    match (lo, hi) {
                        (Some(l), Some(r)) => (f(r) - f(l)) / (dist(l) + dist(r)),
                        (None, Some(r)) => (f(r) - f(cell)) / dist(r),
                        (Some(l), None) => (f(cell) - f(l)) / dist(l),
                        (None, None) => R::zero(),
                    }
                };
                d2.lap_rho = d2.lap_rho + diff(&|c| centers[c].1[axis][0]);
                for b in 0..2 {
                    d2.lap_u[b] = d2.lap_u[b] + diff(&|c| prim[c].du[axis][b]);
                }
            }
            (centers[cell].0, prim[cell], d2)
        })
        .collect())
}

/// `lambda` at every cell centre.
pub fn cell_lambdas<R: Real>(problem: &Problem<R>, u: &[Conserved<R>], grad: &[Gradient<R>]) -> Result<Vec<R>> {
    let eps = problem.epsilon();
    indicator_inputs(problem, u, grad)?
        .iter()
        .map(|(m, d1, d2)| indicator_lambda(m, d1, d2, eps))
        .collect()
}
