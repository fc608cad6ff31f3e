//! Kinetic flux-vector splitting built from the truncated Chapman-Enskog pair.
//!
//! Each half flux is the velocity integral of `v_n (Phi(v) g1T + e_E g2T)`
//! over one half line of the normal velocity, taken in closed form. The
//! truncated pair is a Gaussian times a cubic polynomial in the peculiar
//! velocity, so every term reduces to a split Gaussian moment along the
//! normal direction times a full normal moment along the tangent.

use crate::error::Result;
use crate::fluid::halfmoment::{normal_moment, HalfLine, SplitMoments};
use crate::mesh::Dim;
use crate::real::Real;
use crate::velocity::{collision_frequency, CePolynomial, Moments, PrimitiveGradients};

/// Flux vector `(mass, momentum_1, momentum_2, energy)`.
pub type Flux<R> = [R; 4];

/// Swaps the two in-plane axes of a state.
fn swap_state<R: Real>(m: &Moments<R>) -> Moments<R> {
    Moments::new(m.rho, [m.u[1], m.u[0]], m.temp)
}

fn swap_flux<R: Real>(f: Flux<R>) -> Flux<R> {
    [f[0], f[2], f[1], f[3]]
}

/// Half flux of one side through a face normal to `axis`.
///
/// `side` selects which sign of the normal velocity is integrated:
/// [`HalfLine::Positive`] for the state left of the face and
/// [`HalfLine::Negative`] for the state to its right.
pub fn kfvs_half_flux<R: Real>(
    dim: Dim,
    m: &Moments<R>,
    grad: &PrimitiveGradients<R>,
    epsilon: R,
    axis: usize,
    side: HalfLine,
) -> Result<Flux<R>> {
    let m = m.validate()?;
    if axis == 1 {
        let f = kfvs_half_flux(dim, &swap_state(&m), &grad.swapped(), epsilon, 0, side)?;
        return Ok(swap_flux(f));
    }
    let nu = collision_frequency(&m)?;
    let poly = CePolynomial::new(dim, &m, grad, epsilon / nu);
    Ok(half_flux_with(dim, &m, &poly, side))
}

/// Half flux of the Maxwellian of `m` (no gradient correction).
pub fn maxwellian_half_flux<R: Real>(dim: Dim, m: &Moments<R>, axis: usize, side: HalfLine) -> Result<Flux<R>> {
    let m = m.validate()?;
    if axis == 1 {
        return Ok(swap_flux(maxwellian_half_flux(dim, &swap_state(&m), 0, side)?));
    }
    Ok(half_flux_with(dim, &m, &CePolynomial::equilibrium(dim), side))
}

fn half_flux_with<R: Real>(dim: Dim, m: &Moments<R>, poly: &CePolynomial<R>, side: HalfLine) -> Flux<R> {
    let sm = SplitMoments::new(m.rho, m.u[0], m.temp, side).values;
    let two_d = dim == Dim::Two;
    let kmax = if two_d { 4 } else { 1 };
    let e = |b: usize| normal_moment::<R>(b);
    let sq = m.temp.sqrt();
    let u2 = m.u[1];
    let h = R::half();
    let mut f = [R::zero(); 4];
    for i in 0..4 {
        for k in 0..kmax {
            let c1 = poly.c1[i][k];
            let c2 = poly.c2[i][k];
            if c1 == R::zero() && c2 == R::zero() {
                continue;
            }
            f[0] = f[0] + c1 * sm[1][i] * e(k);
            f[1] = f[1] + c1 * sm[2][i] * e(k);
            let mut en = h * sm[3][i] * e(k);
            if two_d {
                f[2] = f[2] + c1 * sm[1][i] * (u2 * e(k) + sq * e(k + 1));
                en = en + h * sm[1][i] * (u2 * u2 * e(k) + R::two() * u2 * sq * e(k + 1) + m.temp * e(k + 2));
            }
            f[3] = f[3] + c1 * en + m.temp * c2 * sm[1][i] * e(k);
        }
    }
    f
}

/// Interface flux from a left and a right truncated state.
pub fn kfvs_interface_flux<R: Real>(
    dim: Dim,
    left: (&Moments<R>, &PrimitiveGradients<R>),
    right: (&Moments<R>, &PrimitiveGradients<R>),
    epsilon: R,
    axis: usize,
) -> Result<Flux<R>> {
    let a = kfvs_half_flux(dim, left.0, left.1, epsilon, axis, HalfLine::Positive)?;
    let b = kfvs_half_flux(dim, right.0, right.1, epsilon, axis, HalfLine::Negative)?;
    Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
}

/// 1D interface flux `(mass, momentum, energy)`.
pub fn kfvs_interface_flux_1d<R: Real>(
    ml: &Moments<R>,
    dl: &PrimitiveGradients<R>,
    mr: &Moments<R>,
    dr: &PrimitiveGradients<R>,
    epsilon: R,
) -> Result<[R; 3]> {
    let f = kfvs_interface_flux(Dim::One, (ml, dl), (mr, dr), epsilon, 0)?;
    Ok([f[0], f[1], f[3]])
}

/// 2D interface flux through a face normal to `axis`.
pub fn kfvs_interface_flux_2d<R: Real>(
    ml: &Moments<R>,
    dl: &PrimitiveGradients<R>,
    mr: &Moments<R>,
    dr: &PrimitiveGradients<R>,
    epsilon: R,
    axis: usize,
) -> Result<Flux<R>> {
    kfvs_interface_flux(Dim::Two, (ml, dl), (mr, dr), epsilon, axis)
}

/// Inviscid flux along `axis`.
pub fn euler_flux<R: Real>(m: &Moments<R>, axis: usize) -> Flux<R> {
    let p = m.pressure();
    let un = m.u[axis];
    let mut f = [
        m.rho * un,
        m.rho * un * m.u[0],
        m.rho * un * m.u[1],
        un * (m.energy() + p),
    ];
    f[1 + axis] = f[1 + axis] + p;
    f
}

/// Trace-free deformation tensor `grad u + grad u^T - (2/3) div u I` in the
/// three-dimensional sense, restricted to the in-plane block.
pub fn deformation<R: Real>(dim: Dim, grad: &PrimitiveGradients<R>) -> [[R; 2]; 2] {
    let mut d = [[R::zero(); 2]; 2];
    let div = match dim {
        Dim::One => grad.du[0][0],
        Dim::Two => grad.divergence(),
    };
    let c = R::lit(2.0 / 3.0) * div;
    for a in dim.axes() {
        for b in dim.axes() {
            d[a][b] = grad.du[a][b] + grad.du[b][a];
        }
        d[a][a] = d[a][a] - c;
    }
    d
}

/// Dissipative flux `F^d = (0, mu D, mu D u + kappa grad T)` along `axis`.
///
/// The total flux is `F^a - epsilon F^d`, which equals the first moment of
/// the truncated Chapman-Enskog distribution.
pub fn viscous_volume_flux<R: Real>(
    dim: Dim,
    m: &Moments<R>,
    grad: &PrimitiveGradients<R>,
    beta: R,
    axis: usize,
) -> Result<Flux<R>> {
    let (mu, kappa) = crate::velocity::transport_coefficients(m, beta)?;
    let d = deformation(dim, grad);
    let mut f = [R::zero(); 4];
    f[1] = mu * d[axis][0];
    f[2] = mu * d[axis][1];
    f[3] = mu * (d[axis][0] * m.u[0] + d[axis][1] * m.u[1]) + kappa * grad.dtemp[axis];
    Ok(f)
}

/// Physical Navier-Stokes flux `F^a - epsilon F^d`.
pub fn navier_stokes_flux<R: Real>(
    dim: Dim,
    m: &Moments<R>,
    grad: &PrimitiveGradients<R>,
    epsilon: R,
    beta: R,
    axis: usize,
) -> Result<Flux<R>> {
    let a = euler_flux(m, axis);
    let d = viscous_volume_flux(dim, m, grad, beta, axis)?;
    Ok([
        a[0] - epsilon * d[0],
        a[1] - epsilon * d[1],
        a[2] - epsilon * d[2],
        a[3] - epsilon * d[3],
    ])
}
