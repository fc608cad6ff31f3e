//! Built-in problem setups.
//!
//! Geometry conventions:
//! * evaporation runs on `[0, 1]` with a graded mesh, `nx/4` cells in each
//!   `0.05` wall band and `nx/2` cells across the centre;
//! * the Riemann problem runs on `[-1/2, 1/2]^2` with the four states meeting
//!   at the origin;
//! * the ghost-effect walls sit at `y = 0` and `y = 1` with the temperature
//!   profile and the wall motion along `x`, which is periodic.

use std::fmt;
use std::str::FromStr;

use crate::decomposition::DecompositionConfig;
use crate::error::{Error, Result};
use crate::fluid::fluid_dt_limit;
use crate::hybrid::Mode;
use crate::kinetic::{BoundaryKind, BoundarySpec, WallTemperature};
use crate::mesh::{DgSpace, Dim, Mesh};
use crate::problem::Problem;
use crate::real::Real;
use crate::velocity::{Moments, VelocityGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    EvapWeak,
    EvapStrong,
    Riemann2d,
    Ghost2d,
    /// Smooth periodic 1D wave.
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::EvapWeak,
        ScenarioKind::EvapStrong,
        ScenarioKind::Riemann2d,
        ScenarioKind::Ghost2d,
        ScenarioKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::EvapWeak => "evap_weak",
            ScenarioKind::EvapStrong => "evap_strong",
            ScenarioKind::Riemann2d => "riemann2d",
            ScenarioKind::Ghost2d => "ghost2d",
            ScenarioKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown scenario `{s}`")))
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hybrid" => Ok(Mode::Hybrid),
            "kinetic" | "full_kinetic" => Ok(Mode::FullKinetic),
            "fluid" | "full_fluid" => Ok(Mode::FullFluid),
            _ => Err(Error::config(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Hybrid => "hybrid",
            Mode::FullKinetic => "full_kinetic",
            Mode::FullFluid => "full_fluid",
        })
    }
}

/// Optional replacements for scenario defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScenarioOverrides {
    pub epsilon: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub nv: Option<usize>,
    pub vcut: Option<f64>,
    pub order: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub eta0: Option<f64>,
    pub delta0: Option<f64>,
    pub forced_band: Option<f64>,
    pub mode: Option<Mode>,
}

/// A fully built run: discretization, initial data and run parameters.
#[derive(Debug, Clone)]
pub struct ScenarioSpec<R> {
    pub kind: ScenarioKind,
    pub problem: Problem<R>,
    /// Macroscopic initial state at every space node.
    pub initial: Vec<Moments<R>>,
    pub dt: R,
    pub t_final: R,
    pub mode: Mode,
    pub decomposition: DecompositionConfig<R>,
}

struct Defaults {
    epsilon: f64,
    nx: usize,
    ny: usize,
    nv: usize,
    vcut: f64,
    order: usize,
    dt: Option<f64>,
    /// Fraction of the kinetic limit used when `dt` is not given.
    safety: f64,
    t_final: f64,
    forced_band: f64,
}

fn defaults(kind: ScenarioKind) -> Defaults {
    match kind {
        ScenarioKind::EvapWeak | ScenarioKind::EvapStrong => Defaults {
            epsilon: 1e-3,
            nx: 40,
            ny: 1,
            nv: 32,
            vcut: 8.0,
            order: 1,
            dt: None,
            safety: 0.9,
            t_final: 100.0,
            forced_band: 0.1,
        },
        ScenarioKind::Riemann2d => Defaults {
            epsilon: 1e-3,
            nx: 80,
            ny: 80,
            nv: 64,
            vcut: 8.0,
            order: 0,
            dt: None,
            safety: 0.9,
            t_final: 0.35,
            forced_band: 0.0,
        },
        ScenarioKind::Ghost2d => Defaults {
            epsilon: 0.02,
            nx: 40,
            ny: 40,
            nv: 16,
            vcut: 8.0,
            order: 1,
            dt: Some(1.0 / 5000.0),
            safety: 0.9,
            t_final: 80.0,
            forced_band: 0.1,
        },
        ScenarioKind::Custom => Defaults {
            epsilon: 1e-2,
            nx: 40,
            ny: 1,
            nv: 32,
            vcut: 8.0,
            order: 1,
            dt: None,
            // Forward Euler with P1 transport drifts unstable near the limit.
            safety: 0.45,
            t_final: 1.0,
            forced_band: 0.0,
        },
    }
}

/// Wall data `(T_left, p_left, T_right, p_right)` of the evaporation runs.
pub fn evaporation_walls(weak: bool) -> (f64, f64, f64, f64) {
    if weak {
        (1.0, 1.0, 1.002, 1.02)
    } else {
        (0.5, 0.01, 1.0, 1.0)
    }
}

/// Graded evaporation mesh edges on `[0, 1]`.
pub fn evaporation_edges<R: Real>(nx: usize) -> Result<Vec<R>> {
    if nx == 0 || !nx.is_multiple_of(4) {
        return Err(Error::Validation {
            key: "nx".into(),
            message: format!("evaporation mesh needs a positive multiple of 4 cells, got {nx}"),
        });
    }
    let q = nx / 4;
    let band = R::lit(0.05);
    let mut e = Vec::with_capacity(nx + 1);
    for i in 0..q {
        e.push(band * R::from_count(i) / R::from_count(q));
    }
    let mid = R::one() - R::two() * band;
    for i in 0..2 * q {
        e.push(band + mid * R::from_count(i) / R::from_count(2 * q));
    }
    for i in 0..=q {
        e.push(R::one() - band + band * R::from_count(i) / R::from_count(q));
    }
    e[nx] = R::one();
    Ok(e)
}

/// Riemann quadrant state `(rho, p, u, v)` at `(x, y)`.
pub fn riemann_state(x: f64, y: f64) -> (f64, f64, f64, f64) {
    match (x >= 0.0, y >= 0.0) {
        (true, true) => (1.5, 1.5, 0.0, 0.0),
        (false, true) => (0.6429, 0.3, 1.0328, 0.0),
        (false, false) => (0.1891, 0.0143, 1.0328, 1.0328),
        (true, false) => (0.6429, 0.3, 0.0, 1.0328),
    }
}

/// Ghost-effect wall temperature `1 - 0.5 cos(2 pi x)`.
pub fn ghost_wall_temperature<R: Real>() -> WallTemperature<R> {
    WallTemperature::Cosine {
        mean: R::one(),
        amplitude: R::half(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Validation {
            key: key.into(),
            message: format!("must be positive, got {v}"),
        })
    }
}

fn nonzero(key: &str, v: usize) -> Result<usize> {
    if v > 0 {
        Ok(v)
    } else {
        Err(Error::Validation {
            key: key.into(),
            message: "must be at least 1".into(),
        })
    }
}

/// Builds a scenario with the given overrides and validates it.
pub fn build<R: Real>(kind: ScenarioKind, o: &ScenarioOverrides) -> Result<ScenarioSpec<R>> {
    let d = defaults(kind);
    let epsilon = o.epsilon.unwrap_or(d.epsilon);
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Validation {
            key: "epsilon".into(),
            message: format!("must be positive, got {epsilon}"),
        });
    }
    let nx = nonzero("nx", o.nx.unwrap_or(d.nx))?;
    let ny = nonzero("ny", o.ny.unwrap_or(d.ny))?;
    let nv = nonzero("nv", o.nv.unwrap_or(d.nv))?;
    let vcut = positive("vcut", o.vcut.unwrap_or(d.vcut))?;
    let order = o.order.unwrap_or(d.order);
    if order > 8 {
        return Err(Error::Validation {
            key: "order".into(),
            message: format!("polynomial order {order} is not supported"),
        });
    }
    let t_final = positive("t_final", o.t_final.unwrap_or(d.t_final))?;
    let band = o.forced_band.unwrap_or(d.forced_band);
    if !(0.0..0.5).contains(&band) {
        return Err(Error::Validation {
            key: "forced_band".into(),
            message: format!("must lie in [0, 0.5), got {band}"),
        });
    }
    let decomposition = DecompositionConfig {
        eta0: R::lit(positive("eta0", o.eta0.unwrap_or(1e-3))?),
        delta0: R::lit(positive("delta0", o.delta0.unwrap_or(1e-3))?),
        forced_band: R::lit(band),
        period: 1,
    };
    let mode = o.mode.unwrap_or(Mode::Hybrid);
    let lit = R::lit;

    let (space, dim, bc) = match kind {
        ScenarioKind::EvapWeak | ScenarioKind::EvapStrong => {
            let (tl, pl, tr, pr) = evaporation_walls(kind == ScenarioKind::EvapWeak);
            let mesh = Mesh::new_1d(evaporation_edges(nx)?)?;
            let bc = BoundarySpec::new_1d(
                BoundaryKind::EvaporatingWall {
                    temp: lit(tl),
                    pressure: lit(pl),
                },
                BoundaryKind::EvaporatingWall {
                    temp: lit(tr),
                    pressure: lit(pr),
                },
            );
            (DgSpace::new(mesh, [order, 0]), Dim::One, bc)
        }
        ScenarioKind::Riemann2d => {
            if nx < 2 || ny < 2 {
                return Err(Error::Validation {
                    key: "nx".into(),
                    message: "the Riemann problem needs at least 2 cells per axis".into(),
                });
            }
            let h = lit(0.5);
            let mesh = Mesh::uniform_2d((-h, h), nx, (-h, h), ny)?;
            (
                DgSpace::new(mesh, [order, order]),
                Dim::Two,
                BoundarySpec::uniform(BoundaryKind::Outflow),
            )
        }
        ScenarioKind::Ghost2d => {
            let mesh = Mesh::uniform_2d((R::zero(), R::one()), nx, (R::zero(), R::one()), ny)?;
            let wall = BoundaryKind::DiffuseMovingWall {
                temp: ghost_wall_temperature(),
                velocity: [lit(epsilon), R::zero()],
            };
            let bc = BoundarySpec::new_2d([BoundaryKind::Periodic; 2], [wall; 2]);
            (DgSpace::new(mesh, [order, order]), Dim::Two, bc)
        }
        ScenarioKind::Custom => {
            let mesh = Mesh::uniform_1d(R::zero(), R::one(), nx)?;
            (DgSpace::new(mesh, [order, 0]), Dim::One, BoundarySpec::periodic())
        }
    };
    let grid = VelocityGrid::new(dim, lit(vcut), nv)?;
    let problem = Problem::new(space, grid, bc, lit(epsilon))?;

    let initial = initial_state(kind, &problem);
    for m in &initial {
        m.validate()?;
    }

    let kin_limit = problem.kinetic_dt_limit();
    let u0: Vec<_> = initial.iter().map(Moments::to_conserved).collect();
    let flu_limit = fluid_dt_limit(&problem, &u0, None)?;
    let limit = match mode {
        Mode::FullKinetic => kin_limit,
        Mode::FullFluid => flu_limit,
        Mode::Hybrid => kin_limit.min(flu_limit),
    };
    let default_dt = (lit(d.safety) * kin_limit).min(flu_limit);
    let dt = match o.dt.or(d.dt) {
        Some(v) => lit(positive("dt", v)?),
        None => default_dt,
    };
    if dt > limit * (R::one() + lit(1e-12)) {
        return Err(Error::Cfl {
            dt: dt.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    Ok(ScenarioSpec {
        kind,
        problem,
        initial,
        dt,
        t_final: lit(t_final),
        mode,
        decomposition,
    })
}

fn initial_state<R: Real>(kind: ScenarioKind, problem: &Problem<R>) -> Vec<Moments<R>> {
    let space = &problem.space;
    let mut out = Vec::with_capacity(space.num_points());
    for cell in 0..space.num_cells() {
        for node in 0..space.nodes_per_cell() {
            let [x, y] = space.point(cell, node);
            let (xf, yf) = (x.to_f64_lossy(), y.to_f64_lossy());
            let m = match kind {
                ScenarioKind::EvapWeak | ScenarioKind::EvapStrong => {
                    let (tl, pl, tr, pr) = evaporation_walls(kind == ScenarioKind::EvapWeak);
                    let t = tl + (tr - tl) * xf;
                    let p = pl + (pr - pl) * xf;
                    Moments::at_rest(R::lit(p / t), R::lit(t))
                }
                ScenarioKind::Riemann2d => {
                    let (rho, p, u, v) = riemann_state(xf, yf);
                    Moments::new(R::lit(rho), [R::lit(u), R::lit(v)], R::lit(p / rho))
                }
                ScenarioKind::Ghost2d => Moments::at_rest(R::one(), ghost_wall_temperature::<R>().at(x)),
                ScenarioKind::Custom => {
                    let s = (2.0 * std::f64::consts::PI * xf).sin();
                    Moments::new(R::lit(1.0 + 0.2 * s), [R::lit(0.1 * s), R::zero()], R::lit(1.0 - 0.1 * s))
                }
            };
            out.push(m);
        }
    }
    out
}

/// Evaporation scenario with default resolution parameters.
pub fn build_evaporation<R: Real>(weak: bool, nx: usize, epsilon: f64) -> Result<ScenarioSpec<R>> {
    let kind = if weak { ScenarioKind::EvapWeak } else { ScenarioKind::EvapStrong };
    build(
        kind,
        &ScenarioOverrides {
            nx: Some(nx),
            epsilon: Some(epsilon),
            ..Default::default()
        },
    )
}

/// 2D Riemann problem on an `n x n` mesh.
pub fn build_riemann2d<R: Real>(n: usize, epsilon: f64) -> Result<ScenarioSpec<R>> {
    build(
        ScenarioKind::Riemann2d,
        &ScenarioOverrides {
            nx: Some(n),
            ny: Some(n),
            epsilon: Some(epsilon),
            ..Default::default()
        },
    )
}

/// Ghost-effect problem on an `n x n` mesh.
pub fn build_ghost2d<R: Real>(n: usize, epsilon: f64) -> Result<ScenarioSpec<R>> {
    build(
        ScenarioKind::Ghost2d,
        &ScenarioOverrides {
            nx: Some(n),
            ny: Some(n),
            epsilon: Some(epsilon),
            ..Default::default()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::BoundaryKind;
    use crate::mesh::Side;

    #[test]
    fn evaporation_setup() {
        let s = build_evaporation::<f64>(true, 40, 1e-3).unwrap();
        match s.problem.bc.kind(0, Side::Low) {
            BoundaryKind::EvaporatingWall { temp, pressure } => assert_eq!((*temp, *pressure), (1.0, 1.0)),
            _ => panic!("expected a wall"),
        }
        match s.problem.bc.kind(0, Side::High) {
            BoundaryKind::EvaporatingWall { temp, pressure } => assert_eq!((*temp, *pressure), (1.002, 1.02)),
            _ => panic!("expected a wall"),
        }
        let mesh = s.problem.space.mesh();
        let e = mesh.edges(0);
        assert_eq!(e.len(), 41);
        assert!((e[10] - 0.05).abs() < 1e-15 && (e[30] - 0.95).abs() < 1e-15);
        assert!((0..10).all(|i| (mesh.width(0, i) - 0.005).abs() < 1e-15));
        assert!((10..30).all(|i| (mesh.width(0, i) - 0.045).abs() < 1e-14));
        let total: f64 = (0..40).map(|i| mesh.width(0, i)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(s.problem.space.basis(0).order(), 1);

        let strong = build_evaporation::<f64>(false, 40, 1e-3).unwrap();
        assert!(matches!(
            strong.problem.bc.kind(0, Side::Low),
            BoundaryKind::EvaporatingWall { temp, pressure } if *temp == 0.5 && *pressure == 0.01
        ));
        assert!(build_evaporation::<f64>(true, 42, 1e-3).is_err());
    }

    #[test]
    fn riemann_setup() {
        let s = build_riemann2d::<f64>(8, 1e-3).unwrap();
        let (rho, p, _, _) = riemann_state(0.3, 0.3);
        assert_eq!((rho, p / rho), (1.5, 1.0));
        let (rho, p, _, _) = riemann_state(-0.3, -0.3);
        assert!((p / rho - 0.075_621_364).abs() < 1e-8);
        assert_eq!(s.problem.space.basis(0).order(), 0);
        assert_eq!(s.problem.grid.per_axis(), 64);
        let d = build::<f64>(ScenarioKind::Riemann2d, &ScenarioOverrides::default()).unwrap();
        assert_eq!(d.problem.space.nx(), 80);
    }

    #[test]
    fn ghost_setup() {
        let s = build_ghost2d::<f64>(8, 0.02).unwrap();
        assert_eq!(ghost_wall_temperature::<f64>().at(0.0), 0.5);
        assert_eq!(s.dt, 1.0 / 5000.0);
        match s.problem.bc.kind(1, Side::Low) {
            BoundaryKind::DiffuseMovingWall { velocity, .. } => assert_eq!(velocity[0], 0.02),
            _ => panic!("expected a wall"),
        }
    }

    #[test]
    fn validation_errors() {
        let bad = ScenarioOverrides {
            epsilon: Some(-1.0),
            ..Default::default()
        };
        assert!(build::<f64>(ScenarioKind::Custom, &bad).is_err());
        let bad = ScenarioOverrides {
            dt: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(build::<f64>(ScenarioKind::Custom, &bad), Err(Error::Cfl { .. })));
        assert!("nope".parse::<ScenarioKind>().is_err());
        assert_eq!("riemann2d".parse::<ScenarioKind>().unwrap(), ScenarioKind::Riemann2d);
    }
}
