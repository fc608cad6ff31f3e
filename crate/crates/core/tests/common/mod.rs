//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the solver's numerics; the oracles are written
//! from the underlying definitions.

#![allow(dead_code)]

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature with absolute tolerance `tol`.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth > 50 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// `int_s^inf z^n exp(-z^2) dz` by adaptive quadrature.
pub fn half_moment_quadrature(n: usize, s: f64) -> f64 {
    let f = |z: f64| z.powi(n as i32) * (-z * z).exp();
    let top = s.max(0.0) + 14.0;
    // Split at 0 and at the peak of z^n e^{-z^2} to keep panels smooth.
    let mut cuts = vec![s];
    for c in [0.0, (n as f64 / 2.0).sqrt(), -(n as f64 / 2.0).sqrt()] {
        if c > s && c < top {
            cuts.push(c);
        }
    }
    cuts.push(top);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.windows(2).map(|w| adaptive(&f, w[0], w[1], 1e-16)).sum()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre rule on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((c + 0.5 * h * xi, 0.5 * h * wi));
        }
    }
    out
}

/// Brute-force normal velocity rule: `n` nodes on `[-vc, vc]`, split at 0.
pub fn split_velocity_rule(vc: f64, n: usize) -> Vec<(f64, f64)> {
    let order = 8;
    let panels = n / (2 * order);
    let mut r = composite_rule(-vc, 0.0, panels, order);
    r.extend(composite_rule(0.0, vc, panels, order));
    r
}

/// Standard normal Gauss-Hermite rules, exact for polynomials of degree
/// `2n - 1` against `exp(-z^2/2)/sqrt(2 pi)`.
pub fn normal_rule(n: usize) -> Vec<(f64, f64)> {
    match n {
        3 => {
            let a = 3f64.sqrt();
            vec![(-a, 1.0 / 6.0), (0.0, 2.0 / 3.0), (a, 1.0 / 6.0)]
        }
        4 => {
            let a = (3.0 - 6f64.sqrt()).sqrt();
            let b = (3.0 + 6f64.sqrt()).sqrt();
            let wa = 1.0 / (4.0 * (3.0 - 6f64.sqrt()));
            let wb = 1.0 / (4.0 * (3.0 + 6f64.sqrt()));
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        _ => panic!("unsupported rule"),
    }
}

/// Macroscopic state for the oracles.
#[derive(Debug, Clone, Copy)]
pub struct State {
    pub rho: f64,
    pub u: [f64; 2],
    pub temp: f64,
}

impl State {
    pub fn energy(&self) -> f64 {
        0.5 * self.rho * (self.u[0] * self.u[0] + self.u[1] * self.u[1]) + 1.5 * self.rho * self.temp
    }

    pub fn pressure(&self) -> f64 {
        self.rho * self.temp
    }

    pub fn conserved(&self) -> [f64; 4] {
        [self.rho, self.rho * self.u[0], self.rho * self.u[1], self.energy()]
    }

    pub fn from_conserved(c: [f64; 4]) -> Self {
        let rho = c[0];
        let u = [c[1] / rho, c[2] / rho];
        let temp = (2.0 / 3.0) * (c[3] / rho - 0.5 * (u[0] * u[0] + u[1] * u[1]));
        State { rho, u, temp }
    }
}

/// BGK collision frequency of the model.
pub fn bgk_frequency(rho: f64) -> f64 {
    2.0 * rho / PI.sqrt()
}

/// Gradients: `du[a][b] = d u_b / d x_a`, `dt[a] = d T / d x_a`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Grad {
    pub du: [[f64; 2]; 2],
    pub dt: [f64; 2],
}

/// First-order Chapman-Enskog distribution of the 3D BGK equation at
/// velocity `v`, with `dims` resolved space directions.
pub fn chapman_enskog_3d(s: &State, g: &Grad, eps: f64, dims: usize, v: [f64; 3]) -> f64 {
    let st = s.temp.sqrt();
    let u = [s.u[0], if dims == 2 { s.u[1] } else { 0.0 }, 0.0];
    let c: Vec<f64> = (0..3).map(|i| (v[i] - u[i]) / st).collect();
    let c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    let m = s.rho / (2.0 * PI * s.temp).powf(1.5) * (-0.5 * c2).exp();
    let scale = eps / bgk_frequency(s.rho);
    let mut shear = 0.0;
    let mut div = 0.0;
    let mut heat = 0.0;
    for a in 0..dims {
        div += g.du[a][a];
        heat += c[a] * g.dt[a] / st;
        for b in 0..dims {
            shear += g.du[a][b] * c[a] * c[b];
        }
    }
    m * (1.0 - scale * (shear - div * c2 / 3.0 + 0.5 * (c2 - 5.0) * heat))
}

/// Kinetic flux of `(1, v1, v2, |v|^2/2)` through a face normal to `axis`,
/// from the positive half of `left` and the negative half of `right`.
pub fn kinetic_interface_flux(
    left: (&State, &Grad),
    right: (&State, &Grad),
    eps: f64,
    dims: usize,
    axis: usize,
) -> [f64; 4] {
    let normal = split_velocity_rule(12.0, 512);
    let mut out = [0.0; 4];
    for (side, (s, g)) in [left, right].into_iter().enumerate() {
        let rt = s.temp.sqrt();
        let ux = if dims == 2 { s.u[1 - axis] } else { 0.0 };
        let tr: Vec<(f64, f64)> = if dims == 2 {
            normal_rule(4).into_iter().map(|(z, w)| (ux + rt * z, w)).collect()
        } else {
            normal_rule(3).into_iter().map(|(z, w)| (rt * z, w)).collect()
        };
        let off = normal_rule(3);
        for &(vn, wn) in &normal {
            if (side == 0) != (vn > 0.0) {
                continue;
            }
            for &(vt, wt) in &tr {
                for &(z3, w3) in &off {
                    let v3 = rt * z3;
                    let mut v = [0.0; 3];
                    v[axis] = vn;
                    v[1 - axis] = vt;
                    v[2] = v3;
                    let (vv, gg) = (v, *g);
                    // Remove the Gaussian weight built into the transverse rules.
                    let gauss_t = (-(vt - ux).powi(2) / (2.0 * s.temp)).exp() / (2.0 * PI * s.temp).sqrt();
                    let gauss_3 = (-v3 * v3 / (2.0 * s.temp)).exp() / (2.0 * PI * s.temp).sqrt();
                    let f = chapman_enskog_3d(s, &gg, eps, dims, vv) / (gauss_t * gauss_3);
                    let w = wn * wt * w3 * vn * f;
                    let e = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                    out[0] += w;
                    out[1] += w * v[0];
                    out[2] += w * v[1];
                    out[3] += w * e;
                }
            }
        }
    }
    if dims == 1 {
        out[2] = 0.0;
    }
    out
}

/// Euler flux normal to `axis`.
pub fn euler_flux(s: &State, axis: usize) -> [f64; 4] {
    let p = s.pressure();
    let un = s.u[axis];
    let mut f = [s.rho * un, s.rho * un * s.u[0], s.rho * un * s.u[1], un * (s.energy() + p)];
    f[1 + axis] += p;
    f
}

/// Half-range Maxwellian flux of `(1, v, v^2/2 + T)` in 1D by adaptive
/// quadrature; `positive` selects `v > 0`.
pub fn maxwellian_half_flux_1d(s: &State, positive: bool) -> [f64; 3] {
    let rt = s.temp.sqrt();
    let m = |v: f64| s.rho / (2.0 * PI * s.temp).sqrt() * (-(v - s.u[0]).powi(2) / (2.0 * s.temp)).exp();
    let (a, b) = if positive {
        (0.0, s.u[0].max(0.0) + 14.0 * rt)
    } else {
        (s.u[0].min(0.0) - 14.0 * rt, 0.0)
    };
    let tol = 1e-15 * s.rho.max(1.0);
    [
        adaptive(&|v| v * m(v), a, b, tol),
        adaptive(&|v| v * v * m(v), a, b, tol),
        adaptive(&|v| v * (0.5 * v * v + s.temp) * m(v), a, b, tol),
    ]
}

/// First-order finite-volume KFVS Euler step on a periodic 1D mesh.
pub fn fv_kfvs_euler_step(cells: &[State], h: &[f64], dt: f64) -> Vec<State> {
    let n = cells.len();
    let plus: Vec<[f64; 3]> = cells.iter().map(|s| maxwellian_half_flux_1d(s, true)).collect();
    let minus: Vec<[f64; 3]> = cells.iter().map(|s| maxwellian_half_flux_1d(s, false)).collect();
    // flux[i] is the face between cell i and cell i+1.
    let flux: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let r = (i + 1) % n;
            [plus[i][0] + minus[r][0], plus[i][1] + minus[r][1], plus[i][2] + minus[r][2]]
        })
        .collect();
    (0..n)
        .map(|i| {
            let l = (i + n - 1) % n;
            let c = cells[i].conserved();
            let k = dt / h[i];
            State::from_conserved([
                c[0] - k * (flux[i][0] - flux[l][0]),
                c[1] - k * (flux[i][1] - flux[l][1]),
                0.0,
                c[3] - k * (flux[i][2] - flux[l][2]),
            ])
        })
        .collect()
}

/// Midpoint velocity lattice on `[-vc, vc]`.
pub fn midpoint_lattice(vc: f64, n: usize) -> (Vec<f64>, f64) {
    let dv = 2.0 * vc / n as f64;
    ((0..n).map(|j| -vc + (j as f64 + 0.5) * dv).collect(), dv)
}

/// Discrete moments `(rho, rho u, E)` of a 1D reduced pair.
pub fn reduced_moments_1d(v: &[f64], dv: f64, h1: &[f64], h2: &[f64]) -> State {
    let mut c = [0.0; 4];
    for j in 0..v.len() {
        c[0] += h1[j];
        c[1] += v[j] * h1[j];
        c[3] += 0.5 * v[j] * v[j] * h1[j] + h2[j];
    }
    State::from_conserved([c[0] * dv, c[1] * dv, 0.0, c[3] * dv])
}

/// 1D reduced Maxwellian pair rescaled to the discrete density `s.rho`.
pub fn reduced_maxwellian_1d(v: &[f64], dv: f64, s: &State) -> (Vec<f64>, Vec<f64>) {
    let h1: Vec<f64> = v
        .iter()
        .map(|&vj| (-(vj - s.u[0]).powi(2) / (2.0 * s.temp)).exp())
        .collect();
    let mass: f64 = h1.iter().sum::<f64>() * dv;
    let h1: Vec<f64> = h1.iter().map(|x| x * s.rho / mass).collect();
    let h2 = h1.iter().map(|x| x * s.temp).collect();
    (h1, h2)
}

/// First-order upwind finite-volume step of the 1D reduced BGK system on a
/// periodic mesh, followed by implicit relaxation (`relax = false` skips it).
#[allow(clippy::too_many_arguments)]
pub fn fv_upwind_bgk_step(
    h1: &[Vec<f64>],
    h2: &[Vec<f64>],
    v: &[f64],
    dv: f64,
    width: &[f64],
    dt: f64,
    eps: f64,
    relax: bool,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = h1.len();
    let nv = v.len();
    let face = |f: &[Vec<f64>], i: usize, j: usize| -> f64 {
        // Face between cell i and i+1.
        let r = (i + 1) % n;
        if v[j] >= 0.0 {
            v[j] * f[i][j]
        } else {
            v[j] * f[r][j]
        }
    };
    let mut out1 = vec![vec![0.0; nv]; n];
    let mut out2 = vec![vec![0.0; nv]; n];
    for i in 0..n {
        let l = (i + n - 1) % n;
        for j in 0..nv {
            out1[i][j] = h1[i][j] - dt / width[i] * (face(h1, i, j) - face(h1, l, j));
            out2[i][j] = h2[i][j] - dt / width[i] * (face(h2, i, j) - face(h2, l, j));
        }
        if relax {
            let s = reduced_moments_1d(v, dv, &out1[i], &out2[i]);
            let ndt = bgk_frequency(s.rho) * dt;
            let (m1, m2) = reduced_maxwellian_1d(v, dv, &s);
            for j in 0..nv {
                out1[i][j] = (eps * out1[i][j] + ndt * m1[j]) / (eps + ndt);
                out2[i][j] = (eps * out2[i][j] + ndt * m2[j]) / (eps + ndt);
            }
        }
    }
    (out1, out2)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
