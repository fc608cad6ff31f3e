//! Discretization shared by the kinetic, fluid and hybrid solvers.

use crate::error::{Error, Result};
use crate::kinetic::{BoundaryKind, BoundarySpec};
use crate::mesh::{DgSpace, Dim, Side};
use crate::real::Real;
use crate::velocity::{FluidCoefficients, VelocityGrid};

/// Space discretization, velocity lattice, boundaries and model parameters.
#[derive(Debug, Clone)]
pub struct Problem<R> {
    pub space: DgSpace<R>,
    pub grid: VelocityGrid<R>,
    pub bc: BoundarySpec<R>,
    pub coeffs: FluidCoefficients<R>,
}

impl<R: Real> Problem<R> {
    pub fn new(space: DgSpace<R>, grid: VelocityGrid<R>, bc: BoundarySpec<R>, epsilon: R) -> Result<Self> {
        if space.dim() != grid.dim() {
            return Err(Error::config("space and velocity dimensions differ"));
        }
        if !(epsilon >= R::zero() && epsilon.is_finite()) {
            return Err(Error::config(format!("epsilon must be non-negative, got {epsilon}")));
        }
        bc.validate(space.dim())?;
        Ok(Self {
            space,
            grid,
            bc,
            coeffs: FluidCoefficients::bgk(epsilon),
        })
    }

    pub fn dim(&self) -> Dim {
        self.space.dim()
    }

    pub fn epsilon(&self) -> R {
        self.coeffs.epsilon
    }

    /// Neighbour across a face, wrapping on periodic axes.
    pub fn neighbor(&self, cell: usize, axis: usize, side: Side) -> Option<usize> {
        match self.space.neighbor(cell, axis, side) {
            Some(c) => Some(c),
            None if matches!(self.bc.kind(axis, side), BoundaryKind::Periodic) => {
                Some(self.space.periodic_neighbor(cell, axis, side))
            }
            None => None,
        }
    }

    /// Largest stable kinetic step: `dt * vcut * sum_a (2 K_a + 1) / h_a <= 1`
    /// in every cell.
    pub fn kinetic_dt_limit(&self) -> R {
        let vc = self.grid.vcut();
        let mut limit = R::infinity();
        for c in 0..self.space.num_cells() {
            let mut s = R::zero();
            for a in self.dim().axes() {
                let k = R::from_count(2 * self.space.basis(a).order() + 1);
                s = s + k / self.space.width(c, a);
            }
            limit = limit.min(R::one() / (vc * s));
        }
        limit
    }
}
