//! Discrete velocity lattice, Chu-reduced distributions and their moments.
//!
//! The reduced model keeps `d` velocity components explicitly (`d = 1` or
//! `d = 2`) and folds the remaining `t = 3 - d` transverse components into a
//! second unknown carrying their kinetic energy. With `M1` the
//! `d`-dimensional Maxwellian, the equilibrium pair is `(M1, (t/2) T M1)`.

use crate::error::{Error, Result};
use crate::mesh::Dim;
use crate::real::Real;

/// Uniform mid-point lattice on `[-vcut, vcut]^d`.
///
/// Points are numbered `j1 + n * j2` in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid<R> {
    dim: Dim,
    vcut: R,
    n: usize,
    nodes: Vec<R>,
    points: Vec<[R; 2]>,
    weight: R,
}

impl<R: Real> VelocityGrid<R> {
    pub fn new(dim: Dim, vcut: R, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("velocity grid needs at least one point per axis"));
        }
        if !(vcut > R::zero() && vcut.is_finite()) {
            return Err(Error::config("velocity cut-off must be positive"));
        }
        let dv = R::two() * vcut / R::from_count(n);
        let nodes: Vec<R> = (0..n)
            .map(|j| -vcut + dv * (R::from_count(j) + R::half()))
            .collect();
        let points = match dim {
            Dim::One => nodes.iter().map(|&v| [v, R::zero()]).collect(),
            Dim::Two => {
                let mut p = Vec::with_capacity(n * n);
                for &v2 in &nodes {
                    for &v1 in &nodes {
                        p.push([v1, v2]);
                    }
                }
                p
            }
        };
        let weight = match dim {
            Dim::One => dv,
            Dim::Two => dv * dv,
        };
        Ok(Self {
            dim,
            vcut,
            n,
            nodes,
            points,
            weight,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn vcut(&self) -> R {
        self.vcut
    }

    pub fn per_axis(&self) -> usize {
        self.n
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One-dimensional node coordinates.
    pub fn nodes(&self) -> &[R] {
        &self.nodes
    }

    pub fn points(&self) -> &[[R; 2]] {
        &self.points
    }

    #[inline]
    pub fn point(&self, j: usize) -> [R; 2] {
        self.points[j]
    }

    /// Mid-point weight `(2 vcut / n)^d`, identical for every point.
    pub fn weight(&self) -> R {
        self.weight
    }

    /// Number of velocity components folded into the second unknown.
    pub fn transverse(&self) -> usize {
        3 - self.dim.count()
    }
}

/// Pointwise macroscopic state. `u[1]` is zero in 1D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<R> {
    pub rho: R,
    pub u: [R; 2],
    pub temp: R,
}

impl<R: Real> Moments<R> {
    pub fn new(rho: R, u: [R; 2], temp: R) -> Self {
        Self { rho, u, temp }
    }

    pub fn at_rest(rho: R, temp: R) -> Self {
        Self::new(rho, [R::zero(); 2], temp)
    }

    /// `E = rho |u|^2 / 2 + (3/2) rho T`.
    pub fn energy(&self) -> R {
        let ke = self.u[0] * self.u[0] + self.u[1] * self.u[1];
        R::half() * self.rho * ke + R::lit(1.5) * self.rho * self.temp
    }

    pub fn pressure(&self) -> R {
        self.rho * self.temp
    }

    pub fn is_valid(&self) -> bool {
        self.rho > R::zero()
            && self.temp > R::zero()
            && self.rho.is_finite()
            && self.temp.is_finite()
            && self.u[0].is_finite()
            && self.u[1].is_finite()
    }

    pub fn validate(self) -> Result<Self> {
        if self.rho.is_nan() || self.rho <= R::zero() {
            return Err(Error::invalid(format!("non-positive density {}", self.rho)));
        }
        if self.temp.is_nan() || self.temp <= R::zero() {
            return Err(Error::invalid(format!("non-positive temperature {}", self.temp)));
        }
        if !self.is_valid() {
            return Err(Error::invalid("non-finite macroscopic state"));
        }
        Ok(self)
    }

    pub fn to_conserved(&self) -> Conserved<R> {
        Conserved([
            self.rho,
            self.rho * self.u[0],
            self.rho * self.u[1],
            self.energy(),
        ])
    }

    pub fn from_conserved(c: &Conserved<R>) -> Result<Self> {
        let [rho, m1, m2, e] = c.0;
        if rho.is_nan() || rho <= R::zero() {
            return Err(Error::invalid(format!("non-positive density {rho}")));
        }
        let u = [m1 / rho, m2 / rho];
        let temp = R::lit(2.0 / 3.0) * (e / rho - R::half() * (u[0] * u[0] + u[1] * u[1]));
        Self::new(rho, u, temp).validate()
    }
}

/// Conservative variables `(rho, rho u1, rho u2, E)`; `rho u2 = 0` in 1D.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved<R>(pub [R; 4]);

impl<R: Real> Conserved<R> {
    pub fn zero() -> Self {
        Self([R::zero(); 4])
    }
}

/// Spatial derivatives of the primitive variables.
///
/// `du[a][b]` is `d u_b / d x_a`; `dtemp[a]` is `d T / d x_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveGradients<R> {
    pub du: [[R; 2]; 2],
    pub dtemp: [R; 2],
}

impl<R: Real> Default for PrimitiveGradients<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Real> PrimitiveGradients<R> {
    pub fn zero() -> Self {
        Self {
            du: [[R::zero(); 2]; 2],
            dtemp: [R::zero(); 2],
        }
    }

    /// 1D gradients `(du1/dx, dT/dx)`.
    pub fn one_d(du1: R, dtemp: R) -> Self {
        let mut g = Self::zero();
        g.du[0][0] = du1;
        g.dtemp[0] = dtemp;
        g
    }

    /// Chain rule from gradients of the conservative variables.
    ///
    /// `grad[a][c]` is the derivative of component `c` of `U` along `x_a`.
    pub fn from_conserved(m: &Moments<R>, grad: &[[R; 4]; 2]) -> Self {
        let mut g = Self::zero();
        let e_over_rho = m.energy() / m.rho;
        for a in 0..2 {
            let d = &grad[a];
            let mut u_du = R::zero();
            for b in 0..2 {
                g.du[a][b] = (d[1 + b] - m.u[b] * d[0]) / m.rho;
                u_du = u_du + m.u[b] * g.du[a][b];
            }
            let de = (d[3] - e_over_rho * d[0]) / m.rho;
            g.dtemp[a] = R::lit(2.0 / 3.0) * (de - u_du);
        }
        g
    }

    pub fn divergence(&self) -> R {
        self.du[0][0] + self.du[1][1]
    }

    /// Exchanges the roles of the two coordinate axes.
    pub fn swapped(&self) -> Self {
        Self {
            du: [[self.du[1][1], self.du[1][0]], [self.du[0][1], self.du[0][0]]],
            dtemp: [self.dtemp[1], self.dtemp[0]],
        }
    }
}

/// Knudsen number and Prandtl parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidCoefficients<R> {
    pub epsilon: R,
    pub beta: R,
}

impl<R: Real> FluidCoefficients<R> {
    pub fn bgk(epsilon: R) -> Self {
        Self {
            epsilon,
            beta: R::zero(),
        }
    }

    pub fn prandtl(&self) -> R {
        R::one() / (R::one() - self.beta)
    }
}

/// `nu = 2 rho / sqrt(pi)`.
pub fn collision_frequency<R: Real>(m: &Moments<R>) -> Result<R> {
    if m.rho.is_nan() || m.rho <= R::zero() {
        return Err(Error::invalid(format!("non-positive density {}", m.rho)));
    }
    Ok(R::two() * m.rho / R::PI().sqrt())
}

/// Viscosity and heat conductivity `(mu, kappa)` of the BGK model.
pub fn transport_coefficients<R: Real>(m: &Moments<R>, beta: R) -> Result<(R, R)> {
    if beta >= R::one() {
        return Err(Error::config(format!("Prandtl parameter must be below 1, got {beta}")));
    }
    if m.temp.is_nan() || m.temp < R::zero() {
        return Err(Error::invalid(format!("negative temperature {}", m.temp)));
    }
    let nu = collision_frequency(m)?;
    let rt = m.rho * m.temp;
    Ok((rt / ((R::one() - beta) * nu), R::lit(2.5) * rt / nu))
}

/// Reduced distribution over space points and velocity points.
///
/// Storage is point-major: entry `point * nvel + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDistribution<R> {
    nvel: usize,
    first: Vec<R>,
    second: Vec<R>,
}

impl<R: Real> ReducedDistribution<R> {
    pub fn zeros(points: usize, nvel: usize) -> Self {
        Self {
            nvel,
            first: vec![R::zero(); points * nvel],
            second: vec![R::zero(); points * nvel],
        }
    }

    pub fn nvel(&self) -> usize {
        self.nvel
    }

    pub fn num_points(&self) -> usize {
        self.first.len().checked_div(self.nvel).unwrap_or(0)
    }

    pub fn first(&self) -> &[R] {
        &self.first
    }

    pub fn second(&self) -> &[R] {
        &self.second
    }

    pub fn components_mut(&mut self) -> (&mut [R], &mut [R]) {
        (&mut self.first, &mut self.second)
    }

    #[inline]
    pub fn point(&self, p: usize) -> (&[R], &[R]) {
        let r = p * self.nvel..(p + 1) * self.nvel;
        (&self.first[r.clone()], &self.second[r])
    }

    #[inline]
    pub fn point_mut(&mut self, p: usize) -> (&mut [R], &mut [R]) {
        let r = p * self.nvel..(p + 1) * self.nvel;
        (&mut self.first[r.clone()], &mut self.second[r])
    }

    /// Contiguous block of `count` points starting at `p`.
    pub fn block(&self, p: usize, count: usize) -> (&[R], &[R]) {
        let r = p * self.nvel..(p + count) * self.nvel;
        (&self.first[r.clone()], &self.second[r])
    }

    pub fn block_mut(&mut self, p: usize, count: usize) -> (&mut [R], &mut [R]) {
        let r = p * self.nvel..(p + count) * self.nvel;
        (&mut self.first[r.clone()], &mut self.second[r])
    }
}

/// Discrete conserved moments `(rho, rho u, E)` of one velocity vector pair.
///
/// Summation runs in lattice order so results are reproducible.
pub fn conserved_moments<R: Real>(grid: &VelocityGrid<R>, f1: &[R], f2: &[R]) -> Conserved<R> {
    let mut acc = [R::zero(); 4];
    for ((p, &a), &b) in grid.points().iter().zip(f1).zip(f2) {
        acc[0] = acc[0] + a;
        acc[1] = acc[1] + p[0] * a;
        acc[2] = acc[2] + p[1] * a;
        acc[3] = acc[3] + R::half() * (p[0] * p[0] + p[1] * p[1]) * a + b;
    }
    let w = grid.weight();
    Conserved([acc[0] * w, acc[1] * w, acc[2] * w, acc[3] * w])
}

/// Moments of a reduced pair of either dimension.
pub fn moments_of<R: Real>(grid: &VelocityGrid<R>, f1: &[R], f2: &[R]) -> Result<Moments<R>> {
    Moments::from_conserved(&conserved_moments(grid, f1, f2))
}

/// Moments of a 1D reduced pair `(h1, h2)`.
pub fn moments_from_h<R: Real>(grid: &VelocityGrid<R>, h1: &[R], h2: &[R]) -> Result<Moments<R>> {
    if grid.dim() != Dim::One {
        return Err(Error::config("moments_from_h needs a one-dimensional velocity grid"));
    }
    moments_of(grid, h1, h2)
}

/// Moments of a 2D reduced pair `(g1, g2)`.
pub fn moments_from_g<R: Real>(grid: &VelocityGrid<R>, g1: &[R], g2: &[R]) -> Result<Moments<R>> {
    if grid.dim() != Dim::Two {
        return Err(Error::config("moments_from_g needs a two-dimensional velocity grid"));
    }
    moments_of(grid, g1, g2)
}

/// Writes the reduced Maxwellian pair of `m` into `out1`, `out2`.
pub fn fill_maxwellian<R: Real>(m: &Moments<R>, grid: &VelocityGrid<R>, out1: &mut [R], out2: &mut [R]) -> Result<()> {
    let m = m.validate()?;
    let d = grid.dim().count();
    let two_t = R::two() * m.temp;
    let norm = match d {
        1 => m.rho / (R::PI() * two_t).sqrt(),
        _ => m.rho / (R::PI() * two_t),
    };
    let ratio = R::half() * R::from_count(grid.transverse()) * m.temp;
    for ((p, a), b) in grid.points().iter().zip(out1.iter_mut()).zip(out2.iter_mut()) {
        let c0 = p[0] - m.u[0];
        let c1 = if d == 1 { R::zero() } else { p[1] - m.u[1] };
        let v = norm * (-(c0 * c0 + c1 * c1) / two_t).exp();
        *a = v;
        *b = ratio * v;
    }
    Ok(())
}

/// Maxwellian pair rescaled so its discrete density equals `m.rho` exactly.
pub fn fill_discrete_maxwellian<R: Real>(
    m: &Moments<R>,
    grid: &VelocityGrid<R>,
    out1: &mut [R],
    out2: &mut [R],
) -> Result<()> {
    fill_maxwellian(m, grid, out1, out2)?;
    let mass = out1.iter().copied().sum::<R>() * grid.weight();
    if !(mass > R::zero()) {
        return Err(Error::invalid("Maxwellian not resolved by the velocity grid"));
    }
    let s = m.rho / mass;
    out1.iter_mut().for_each(|x| *x = *x * s);
    out2.iter_mut().for_each(|x| *x = *x * s);
    Ok(())
}

fn maxwellian_pair<R: Real>(m: &Moments<R>, grid: &VelocityGrid<R>) -> Result<(Vec<R>, Vec<R>)> {
    let mut a = vec![R::zero(); grid.len()];
    let mut b = vec![R::zero(); grid.len()];
    fill_maxwellian(m, grid, &mut a, &mut b)?;
    Ok((a, b))
}

/// `(M[h]1, T M[h]1)` on a 1D lattice.
pub fn reduced_maxwellian_h<R: Real>(m: &Moments<R>, grid: &VelocityGrid<R>) -> Result<(Vec<R>, Vec<R>)> {
    if grid.dim() != Dim::One {
        return Err(Error::config("reduced_maxwellian_h needs a one-dimensional velocity grid"));
    }
    maxwellian_pair(m, grid)
}

/// `(M[g]1, (T/2) M[g]1)` on a 2D lattice.
pub fn reduced_maxwellian_g<R: Real>(m: &Moments<R>, grid: &VelocityGrid<R>) -> Result<(Vec<R>, Vec<R>)> {
    if grid.dim() != Dim::Two {
        return Err(Error::config("reduced_maxwellian_g needs a two-dimensional velocity grid"));
    }
    maxwellian_pair(m, grid)
}

/// First-order Chapman-Enskog factors as polynomials in the peculiar
/// velocity `V = (v - u) / sqrt(T)`.
///
/// The truncated pair is `(M1 * P1(V), T * M1 * P2(V))`; `c1[i][k]` is the
/// coefficient of `V1^i V2^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CePolynomial<R> {
    pub c1: [[R; 4]; 4],
    pub c2: [[R; 4]; 4],
}

impl<R: Real> CePolynomial<R> {
    /// `scale` is `epsilon / nu`; gradients must already be expressed in the
    /// axis order the polynomial will be evaluated in.
    pub fn new(dim: Dim, m: &Moments<R>, grad: &PrimitiveGradients<R>, scale: R) -> Self {
        let z = R::zero();
        let mut c1 = [[z; 4]; 4];
        let mut c2 = [[z; 4]; 4];
        let t = R::from_count(3 - dim.count());
        let third = R::one() / R::lit(3.0);
        let half = R::half();
        let two_d = dim == Dim::Two;
        let sq = m.temp.sqrt();
        let mut a = [[z; 2]; 2];
        let mut q = [z; 2];
        for i in dim.axes() {
            q[i] = scale * grad.dtemp[i] / sq;
            for k in dim.axes() {
                a[i][k] = scale * grad.du[i][k];
            }
        }
        let tr = a[0][0] + a[1][1];

        // P1 = 1 - [sum_ab A_ab V_a V_b - tr(A) (|V|^2 + t)/3 + (|V|^2 + t - 5) V.q / 2]
        c1[0][0] = R::one() + tr * t * third;
        c1[2][0] = -a[0][0] + tr * third;
        c1[1][0] = -half * (t - R::lit(5.0)) * q[0];
        c1[3][0] = -half * q[0];
        if two_d {
            c1[0][2] = -a[1][1] + tr * third;
            c1[1][1] = -(a[0][1] + a[1][0]);
            c1[0][1] = -half * (t - R::lit(5.0)) * q[1];
            c1[1][2] = -half * q[0];
            c1[2][1] = -half * q[1];
            c1[0][3] = -half * q[1];
        }

        // P2 = (t/2) P1 + (t/3) tr(A) - (t/2) V.q
        for i in 0..4 {
            for k in 0..4 {
                c2[i][k] = half * t * c1[i][k];
            }
        }
        c2[0][0] = c2[0][0] + t * third * tr;
        c2[1][0] = c2[1][0] - half * t * q[0];
        if two_d {
            c2[0][1] = c2[0][1] - half * t * q[1];
        }
        Self { c1, c2 }
    }

    pub fn equilibrium(dim: Dim) -> Self {
        let z = R::zero();
        let mut c1 = [[z; 4]; 4];
        let mut c2 = [[z; 4]; 4];
        c1[0][0] = R::one();
        c2[0][0] = R::half() * R::from_count(3 - dim.count());
        Self { c1, c2 }
    }

    #[inline]
    pub fn eval(&self, v1: R, v2: R) -> (R, R) {
        let p1 = [R::one(), v1, v1 * v1, v1 * v1 * v1];
        let p2 = [R::one(), v2, v2 * v2, v2 * v2 * v2];
        let mut a = R::zero();
        let mut b = R::zero();
        for i in 0..4 {
            let mut ra = R::zero();
            let mut rb = R::zero();
            for k in 0..4 {
                ra = ra + self.c1[i][k] * p2[k];
                rb = rb + self.c2[i][k] * p2[k];
            }
            a = a + ra * p1[i];
            b = b + rb * p1[i];
        }
        (a, b)
    }
}

/// Writes the truncated Chapman-Enskog pair into `out1`, `out2`.
pub fn fill_chapman_enskog<R: Real>(
    m: &Moments<R>,
    grad: &PrimitiveGradients<R>,
    epsilon: R,
    grid: &VelocityGrid<R>,
    out1: &mut [R],
    out2: &mut [R],
) -> Result<()> {
    let m = m.validate()?;
    let nu = collision_frequency(&m)?;
    let dim = grid.dim();
    let poly = CePolynomial::new(dim, &m, grad, epsilon / nu);
    fill_maxwellian(&m, grid, out1, out2)?;
    let inv_sq = R::one() / m.temp.sqrt();
    for ((p, a), b) in grid.points().iter().zip(out1.iter_mut()).zip(out2.iter_mut()) {
        let v1 = (p[0] - m.u[0]) * inv_sq;
        let v2 = if dim == Dim::Two { (p[1] - m.u[1]) * inv_sq } else { R::zero() };
        let (p1, p2) = poly.eval(v1, v2);
        let mx = *a;
        *a = mx * p1;
        *b = m.temp * mx * p2;
    }
    Ok(())
}

/// Truncated pair `(h1T, h2T)` on a 1D lattice.
pub fn chapman_enskog_h<R: Real>(
    m: &Moments<R>,
    grad: &PrimitiveGradients<R>,
    epsilon: R,
    grid: &VelocityGrid<R>,
) -> Result<(Vec<R>, Vec<R>)> {
    if grid.dim() != Dim::One {
        return Err(Error::config("chapman_enskog_h needs a one-dimensional velocity grid"));
    }
    let mut a = vec![R::zero(); grid.len()];
    let mut b = vec![R::zero(); grid.len()];
    fill_chapman_enskog(m, grad, epsilon, grid, &mut a, &mut b)?;
    Ok((a, b))
}

/// Truncated pair `(g1T, g2T)` on a 2D lattice.
pub fn chapman_enskog_g<R: Real>(
    m: &Moments<R>,
    grad: &PrimitiveGradients<R>,
    epsilon: R,
    grid: &VelocityGrid<R>,
) -> Result<(Vec<R>, Vec<R>)> {
    if grid.dim() != Dim::Two {
        return Err(Error::config("chapman_enskog_g needs a two-dimensional velocity grid"));
    }
    let mut a = vec![R::zero(); grid.len()];
    let mut b = vec![R::zero(); grid.len()];
    fill_chapman_enskog(m, grad, epsilon, grid, &mut a, &mut b)?;
    Ok((a, b))
}
