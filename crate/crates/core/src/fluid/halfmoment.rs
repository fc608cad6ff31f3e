//! Closed-form half-range Gaussian moments.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::velocity::Moments;

/// Largest supported power in [`half_moment`].
pub const MAX_HALF_MOMENT: usize = 6;

/// Which half of the velocity line to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLine {
    /// `v >= 0`
    Positive,
    /// `v < 0`
    Negative,
}

/// `I_n(s) = int_s^inf z^n exp(-z^2) dz` for `n <= 6`.
pub fn half_moment<R: Real>(n: usize, s: R) -> Result<R> {
    if n > MAX_HALF_MOMENT {
        return Err(Error::config(format!("half moment order {n} exceeds {MAX_HALF_MOMENT}")));
    }
    Ok(half_moments(s)[n])
}

/// All of `I_0(s) .. I_6(s)` at once.
///
/// Uses `I_n = s^(n-1) e^(-s^2) / 2 + (n-1)/2 I_(n-2)`, written out term by
/// term so the polynomial prefactors match the classical closed forms.
pub fn half_moments<R: Real>(s: R) -> [R; 7] {
    let e = (-s * s).exp();
    let g = R::PI().sqrt() * R::half() * s.erfc();
    let h = R::half();
    let s2 = s * s;
    let i0 = g;
    let i1 = h * e;
    let i2 = h * (s * e + g);
    let i3 = h * (R::one() + s2) * e;
    let i4 = h * ((s2 + R::lit(1.5)) * s * e + R::lit(1.5) * g);
    let i5 = (R::one() + s2 + h * s2 * s2) * e;
    let i6 = h * s2 * s2 * s * e + R::lit(2.5) * i4;
    [i0, i1, i2, i3, i4, i5, i6]
}

/// Full-line moments `int z^n exp(-z^2) dz`.
pub fn full_moment<R: Real>(n: usize) -> R {
    if n % 2 == 1 {
        return R::zero();
    }
    // Gamma((n+1)/2) for even n.
    let mut v = R::PI().sqrt();
    let mut k = 1;
    while k < n {
        v = v * R::from_count(k) * R::half();
        k += 2;
    }
    v
}

/// Moments `E[Z^b]` of a standard normal variable, `b <= 7`.
pub fn normal_moment<R: Real>(b: usize) -> R {
    const TABLE: [f64; 8] = [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0];
    R::lit(TABLE[b])
}

/// Binomial coefficients up to `n = 3`.
const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

/// Per-side table of all `split_gaussian_moment(n, m)` values for `n, m <= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitMoments<R> {
    pub values: [[R; 4]; 4],
}

impl<R: Real> SplitMoments<R> {
    /// `values[n][m] = rho / sqrt(2 pi T) int_side v^n ((v - u)/sqrt T)^m exp(-(v-u)^2 / 2T) dv`.
    pub fn new(rho: R, u: R, temp: R, side: HalfLine) -> Self {
        let st = (R::two() * temp).sqrt();
        let s = -u / st;
        // Integrals over the requested half, in the variable z = (v - u)/sqrt(2T).
        let iz: [R; 7] = match side {
            HalfLine::Positive => half_moments(s),
            HalfLine::Negative => {
                let r = half_moments(-s);
                let mut out = r;
                for (p, o) in out.iter_mut().enumerate() {
                    if p % 2 == 1 {
                        *o = -*o;
                    }
                }
                out
            }
        };
        let pre = rho / R::PI().sqrt();
        let sqrt2 = R::two().sqrt();
        let mut upow = [R::one(); 4];
        let mut spow = [R::one(); 4];
        let mut r2pow = [R::one(); 4];
        for k in 1..4 {
            upow[k] = upow[k - 1] * u;
            spow[k] = spow[k - 1] * st;
            r2pow[k] = r2pow[k - 1] * sqrt2;
        }
        let mut values = [[R::zero(); 4]; 4];
        for (n, row) in values.iter_mut().enumerate() {
            for (m, out) in row.iter_mut().enumerate() {
                let mut acc = R::zero();
                for k in 0..=n {
                    acc = acc + R::lit(BINOM[n][k]) * upow[n - k] * spow[k] * iz[k + m];
                }
                *out = pre * r2pow[m] * acc;
            }
        }
        Self { values }
    }
}

/// Half-line Gaussian moment of order `(n, m)`, both at most 3.
pub fn split_gaussian_moment<R: Real>(n: usize, m: usize, state: &Moments<R>, side: HalfLine) -> Result<R> {
    if n > 3 || m > 3 {
        return Err(Error::config(format!("split moment orders ({n}, {m}) exceed 3")));
    }
    let s = state.validate()?;
    Ok(SplitMoments::new(s.rho, s.u[0], s.temp, side).values[n][m])
}
