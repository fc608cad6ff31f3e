//! Tensor-product meshes and nodal (Lagrange) discontinuous Galerkin machinery.
//!
//! Each cell is mapped affinely to the reference interval `(-1/2, 1/2)` per
//! axis. Unknowns are nodal values at the `K + 1` Gauss-Legendre points of
//! that interval, so quadrature weights on the reference element sum to one
//! and the mass matrix is diagonal (`width * weight`).

use crate::error::{Error, Result};
use crate::real::Real;

/// Number of space (and velocity) dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn count(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn axes(self) -> std::ops::Range<usize> {
        0..self.count()
    }
}

/// Low (left/bottom) or high (right/top) side of a cell or of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Low => 0,
            Side::High => 1,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Low => Side::High,
            Side::High => Side::Low,
        }
    }
}

/// Rectangular tensor-product mesh given by explicit edge lists.
///
/// A 1D mesh carries a single dummy cell `[0, 1]` along `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<R> {
    dim: Dim,
    edges: [Vec<R>; 2],
}

impl<R: Real> Mesh<R> {
    pub fn new_1d(x_edges: Vec<R>) -> Result<Self> {
        check_edges(&x_edges, "x")?;
        Ok(Self {
            dim: Dim::One,
            edges: [x_edges, vec![R::zero(), R::one()]],
        })
    }

    pub fn new_2d(x_edges: Vec<R>, y_edges: Vec<R>) -> Result<Self> {
        check_edges(&x_edges, "x")?;
        check_edges(&y_edges, "y")?;
        Ok(Self {
            dim: Dim::Two,
            edges: [x_edges, y_edges],
        })
    }

    pub fn uniform_1d(a: R, b: R, n: usize) -> Result<Self> {
        Self::new_1d(uniform_edges(a, b, n)?)
    }

    pub fn uniform_2d(x: (R, R), nx: usize, y: (R, R), ny: usize) -> Result<Self> {
        Self::new_2d(uniform_edges(x.0, x.1, nx)?, uniform_edges(y.0, y.1, ny)?)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn edges(&self, axis: usize) -> &[R] {
        &self.edges[axis]
    }

    pub fn cells_along(&self, axis: usize) -> usize {
        self.edges[axis].len() - 1
    }

    pub fn width(&self, axis: usize, i: usize) -> R {
        self.edges[axis][i + 1] - self.edges[axis][i]
    }

    pub fn center(&self, axis: usize, i: usize) -> R {
        R::half() * (self.edges[axis][i + 1] + self.edges[axis][i])
    }

    pub fn extent(&self, axis: usize) -> (R, R) {
        let e = &self.edges[axis];
        (e[0], e[e.len() - 1])
    }

    pub fn min_width(&self, axis: usize) -> R {
        (0..self.cells_along(axis))
            .map(|i| self.width(axis, i))
            .fold(R::infinity(), R::min)
    }
}

fn check_edges<R: Real>(edges: &[R], name: &str) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::config(format!("{name}-axis needs at least one cell")));
    }
    if edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::config(format!("{name}-axis edges must be finite")));
    }
    if edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(format!("{name}-axis edges must be strictly increasing")));
    }
    Ok(())
}

fn uniform_edges<R: Real>(a: R, b: R, n: usize) -> Result<Vec<R>> {
    if n == 0 {
        return Err(Error::config("a mesh axis needs at least one cell"));
    }
    let h = (b - a) / R::from_count(n);
    let mut edges: Vec<R> = (0..=n).map(|i| a + h * R::from_count(i)).collect();
    edges[n] = b;
    Ok(edges)
}

/// Gauss-Legendre nodes and weights on the reference element `(-1/2, 1/2)`.
///
/// Newton iteration on the Legendre recurrence, then an affine rescale from
/// `(-1, 1)`. Nodes are returned in increasing order and made exactly
/// symmetric.
pub fn gauss_legendre<R: Real>(order: usize) -> (Vec<R>, Vec<R>) {
    let n = order + 1;
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let one = R::one();
    let two = R::two();
    let tol = R::epsilon() * R::lit(4.0);
    for i in 0..n.div_ceil(2) {
        // Largest root first; mirrored below.
        let guess = (R::PI() * (R::from_count(i) + R::lit(0.75)) / (R::from_count(n) + R::half())).cos();
        let mut x = guess;
        let mut dp = one;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= tol {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != R::zero() {
            dp = d;
        }
        let w = two / ((one - x * x) * dp * dp);
        nodes[n - 1 - i] = x / two;
        nodes[i] = -x / two;
        weights[i] = w / two;
        weights[n - 1 - i] = w / two;
    }
    if n % 2 == 1 {
        nodes[n / 2] = R::zero();
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    if n == 0 {
        return (R::one(), R::zero());
    }
    for k in 2..=n {
        let kf = R::from_count(k);
        let p2 = ((R::two() * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = R::from_count(n);
    let dp = nf * (x * p1 - p0) / (x * x - R::one());
    (p1, dp)
}

/// Lagrange basis on the Gauss nodes of the reference element.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalBasis<R> {
    order: usize,
    nodes: Vec<R>,
    weights: Vec<R>,
    /// Row-major: `diff[k * n + l] = d phi_l / d xi` at node `k`.
    diff: Vec<R>,
    /// `phi_k(-1/2)` and `phi_k(+1/2)`.
    traces: [Vec<R>; 2],
    /// `stiff[k * n + l] = w_l * D[l][k] / w_k`.
    stiff: Vec<R>,
    /// `phi_k(side) / w_k`.
    lift: [Vec<R>; 2],
}

impl<R: Real> NodalBasis<R> {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre::<R>(order);
        let n = order + 1;
        let diff = diff_matrix(&nodes);
        let traces = [
            lagrange_values(&nodes, -R::half()),
            lagrange_values(&nodes, R::half()),
        ];
        let mut stiff = vec![R::zero(); n * n];
        for k in 0..n {
            for l in 0..n {
                stiff[k * n + l] = weights[l] * diff[l * n + k] / weights[k];
            }
        }
        let lift = [
            (0..n).map(|k| traces[0][k] / weights[k]).collect(),
            (0..n).map(|k| traces[1][k] / weights[k]).collect(),
        ];
        Self {
            order,
            nodes,
            weights,
            diff,
            traces,
            stiff,
            lift,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[R] {
        &self.nodes
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    /// `d phi_l / d xi` evaluated at node `k`.
    pub fn diff(&self, k: usize, l: usize) -> R {
        self.diff[k * self.len() + l]
    }

    /// `w_l * D[l][k] / w_k`, the volume part of [`weak_divergence`](Self::weak_divergence).
    #[inline]
    pub fn stiff(&self, k: usize, l: usize) -> R {
        self.stiff[k * self.len() + l]
    }

    /// `phi_k(side) / w_k`, the surface part of [`weak_divergence`](Self::weak_divergence).
    #[inline]
    pub fn lift(&self, side: Side, k: usize) -> R {
        self.lift[side.index()][k]
    }

    /// Basis values at the low or high end of the reference element.
    pub fn trace_vector(&self, side: Side) -> &[R] {
        &self.traces[side.index()]
    }

    /// Basis values `phi_k(xi)` at an arbitrary reference coordinate.
    pub fn values_at(&self, xi: R) -> Vec<R> {
        lagrange_values(&self.nodes, xi)
    }

    /// Value of the interpolant at an end of the element.
    #[inline]
    pub fn trace(&self, side: Side, values: &[R]) -> R {
        dot(&self.traces[side.index()], values)
    }

    /// Same as [`trace`](Self::trace) for values stored with a stride.
    #[inline]
    pub fn trace_strided(&self, side: Side, values: &[R], offset: usize, stride: usize) -> R {
        let t = &self.traces[side.index()];
        let mut acc = R::zero();
        for (k, &tk) in t.iter().enumerate() {
            acc = acc + tk * values[offset + k * stride];
        }
        acc
    }

    /// Weak-form divergence along one line of nodes.
    ///
    /// For nodal fluxes `flux[l]` and numerical fluxes at the two ends, this
    /// returns at node `k`
    /// `(1 / (w_k h)) * (sum_l w_l D[l][k] flux[l] - (F_high phi_k(1/2) - F_low phi_k(-1/2)))`,
    /// which is the exact Galerkin projection of `-d(flux)/dx` with upwinding
    /// carried by the end fluxes.
    #[inline]
    pub fn weak_divergence(&self, width: R, flux: &[R], flux_low: R, flux_high: R, out: &mut [R]) {
        let n = self.len();
        let inv_h = R::one() / width;
        for k in 0..n {
            let row = &self.stiff[k * n..(k + 1) * n];
            let mut acc = dot(row, flux);
            acc = acc - self.lift[1][k] * flux_high + self.lift[0][k] * flux_low;
            out[k] = acc * inv_h;
        }
    }
}

#[inline]
fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).fold(R::zero(), |acc, (&x, &y)| acc + x * y)
}

fn lagrange_values<R: Real>(nodes: &[R], xi: R) -> Vec<R> {
    let n = nodes.len();
    (0..n)
        .map(|k| {
            let mut v = R::one();
            for m in 0..n {
                if m != k {
                    v = v * (xi - nodes[m]) / (nodes[k] - nodes[m]);
                }
            }
            v
        })
        .collect()
}

/// Barycentric differentiation matrix; diagonal fixed by the zero row sum.
fn diff_matrix<R: Real>(nodes: &[R]) -> Vec<R> {
    let n = nodes.len();
    let bary: Vec<R> = (0..n)
        .map(|j| {
            let mut p = R::one();
            for m in 0..n {
                if m != j {
                    p = p * (nodes[j] - nodes[m]);
                }
            }
            R::one() / p
        })
        .collect();
    let mut d = vec![R::zero(); n * n];
    for k in 0..n {
        let mut diag = R::zero();
        for l in 0..n {
            if l != k {
                let v = (bary[l] / bary[k]) / (nodes[k] - nodes[l]);
                d[k * n + l] = v;
                diag = diag - v;
            }
        }
        d[k * n + k] = diag;
    }
    d
}

/// Differentiation matrix as nested rows: `m[k][l] = d phi_l / d xi (xi_k)`.
pub fn lagrange_diff_matrix<R: Real>(basis: &NodalBasis<R>) -> Vec<Vec<R>> {
    let n = basis.len();
    (0..n).map(|k| (0..n).map(|l| basis.diff(k, l)).collect()).collect()
}

/// A mesh together with the nodal basis used along each axis.
#[derive(Debug, Clone)]
pub struct DgSpace<R> {
    mesh: Mesh<R>,
    bases: [NodalBasis<R>; 2],
}

impl<R: Real> DgSpace<R> {
    /// `orders` gives the polynomial degree per axis; the `y` entry is
    /// ignored (forced to zero) on 1D meshes.
    pub fn new(mesh: Mesh<R>, orders: [usize; 2]) -> Self {
        let ky = if mesh.dim() == Dim::One { 0 } else { orders[1] };
        Self {
            mesh,
            bases: [NodalBasis::new(orders[0]), NodalBasis::new(ky)],
        }
    }

    pub fn mesh(&self) -> &Mesh<R> {
        &self.mesh
    }

    pub fn dim(&self) -> Dim {
        self.mesh.dim()
    }

    pub fn basis(&self, axis: usize) -> &NodalBasis<R> {
        &self.bases[axis]
    }

    pub fn nx(&self) -> usize {
        self.mesh.cells_along(0)
    }

    pub fn ny(&self) -> usize {
        self.mesh.cells_along(1)
    }

    pub fn num_cells(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.bases[0].len() * self.bases[1].len()
    }

    pub fn num_points(&self) -> usize {
        self.num_cells() * self.nodes_per_cell()
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i + self.nx() * j
    }

    #[inline]
    pub fn cell_ij(&self, cell: usize) -> (usize, usize) {
        (cell % self.nx(), cell / self.nx())
    }

    /// Cell position index along `axis`.
    #[inline]
    pub fn cell_coord(&self, cell: usize, axis: usize) -> usize {
        let (i, j) = self.cell_ij(cell);
        if axis == 0 {
            i
        } else {
            j
        }
    }

    #[inline]
    pub fn node_index(&self, kx: usize, ky: usize) -> usize {
        kx + self.bases[0].len() * ky
    }

    #[inline]
    pub fn node_kk(&self, node: usize) -> (usize, usize) {
        let n0 = self.bases[0].len();
        (node % n0, node / n0)
    }

    /// Number of Gauss nodes on a face normal to `axis`.
    pub fn face_nodes(&self, axis: usize) -> usize {
        self.bases[1 - axis].len()
    }

    /// Node index of the `k`-th node along an `axis` line through face node `f`.
    #[inline]
    pub fn line_node(&self, axis: usize, face_node: usize, k: usize) -> usize {
        if axis == 0 {
            self.node_index(k, face_node)
        } else {
            self.node_index(face_node, k)
        }
    }

    /// Stride between consecutive line nodes inside a cell's node block.
    #[inline]
    pub fn line_stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.bases[0].len()
        }
    }

    pub fn width(&self, cell: usize, axis: usize) -> R {
        self.mesh.width(axis, self.cell_coord(cell, axis))
    }

    /// Cell volume (length in 1D).
    pub fn volume(&self, cell: usize) -> R {
        match self.dim() {
            Dim::One => self.width(cell, 0),
            Dim::Two => self.width(cell, 0) * self.width(cell, 1),
        }
    }

    /// Reference quadrature weight of a node (weights sum to one per cell).
    pub fn node_weight(&self, node: usize) -> R {
        let (kx, ky) = self.node_kk(node);
        self.bases[0].weights()[kx] * self.bases[1].weights()[ky]
    }

    /// Physical coordinates of a cell node (`y = 0` in 1D).
    pub fn point(&self, cell: usize, node: usize) -> [R; 2] {
        let (i, j) = self.cell_ij(cell);
        let (kx, ky) = self.node_kk(node);
        let x = self.mesh.center(0, i) + self.mesh.width(0, i) * self.bases[0].nodes()[kx];
        let y = match self.dim() {
            Dim::One => R::zero(),
            Dim::Two => self.mesh.center(1, j) + self.mesh.width(1, j) * self.bases[1].nodes()[ky],
        };
        [x, y]
    }

    /// Coordinate along the face of face node `f` on a face normal to `axis`.
    pub fn face_point(&self, cell: usize, axis: usize, side: Side, face_node: usize) -> [R; 2] {
        let (i, j) = self.cell_ij(cell);
        let mut p = [R::zero(); 2];
        let t = 1 - axis;
        let idx = [i, j];
        p[axis] = self.mesh.edges(axis)[idx[axis] + side.index()];
        if self.dim() == Dim::Two {
            p[t] = self.mesh.center(t, idx[t]) + self.mesh.width(t, idx[t]) * self.bases[t].nodes()[face_node];
        }
        p
    }

    pub fn cell_center(&self, cell: usize) -> [R; 2] {
        let (i, j) = self.cell_ij(cell);
        match self.dim() {
            Dim::One => [self.mesh.center(0, i), R::zero()],
            Dim::Two => [self.mesh.center(0, i), self.mesh.center(1, j)],
        }
    }

    /// Neighbouring cell across a face, `None` on the domain boundary.
    pub fn neighbor(&self, cell: usize, axis: usize, side: Side) -> Option<usize> {
        let (i, j) = self.cell_ij(cell);
        let n = self.mesh.cells_along(axis);
        let pos = if axis == 0 { i } else { j };
        let next = match side {
            Side::Low if pos == 0 => return None,
            Side::Low => pos - 1,
            Side::High if pos + 1 == n => return None,
            Side::High => pos + 1,
        };
        Some(if axis == 0 {
            self.cell_index(next, j)
        } else {
            self.cell_index(i, next)
        })
    }

    /// Neighbour with periodic wrap-around.
    pub fn periodic_neighbor(&self, cell: usize, axis: usize, side: Side) -> usize {
        if let Some(c) = self.neighbor(cell, axis, side) {
            return c;
        }
        let (i, j) = self.cell_ij(cell);
        let n = self.mesh.cells_along(axis);
        let wrapped = match side {
            Side::Low => n - 1,
            Side::High => 0,
        };
        if axis == 0 {
            self.cell_index(wrapped, j)
        } else {
            self.cell_index(i, wrapped)
        }
    }

    /// Interpolation weights of the cell centre (`xi = 0` on each axis).
    pub fn center_weights(&self) -> Vec<R> {
        let wx = self.bases[0].values_at(R::zero());
        let wy = self.bases[1].values_at(R::zero());
        let mut w = vec![R::zero(); self.nodes_per_cell()];
        for (ky, &b) in wy.iter().enumerate() {
            for (kx, &a) in wx.iter().enumerate() {
                w[self.node_index(kx, ky)] = a * b;
            }
        }
        w
    }

    /// Interpolation weights for an arbitrary reference point `(xi, eta)`.
    pub fn point_weights(&self, xi: [R; 2]) -> Vec<R> {
        let wx = self.bases[0].values_at(xi[0]);
        let wy = self.bases[1].values_at(if self.dim() == Dim::One { R::zero() } else { xi[1] });
        let mut w = vec![R::zero(); self.nodes_per_cell()];
        for (ky, &b) in wy.iter().enumerate() {
            for (kx, &a) in wx.iter().enumerate() {
                w[self.node_index(kx, ky)] = a * b;
            }
        }
        w
    }
}

/// Scalar DG field: one value per (cell, node).
#[derive(Debug, Clone, PartialEq)]
pub struct Field<R> {
    nodes_per_cell: usize,
    data: Vec<R>,
}

impl<R: Real> Field<R> {
    pub fn zeros(space: &DgSpace<R>) -> Self {
        Self {
            nodes_per_cell: space.nodes_per_cell(),
            data: vec![R::zero(); space.num_points()],
        }
    }

    pub fn from_values(space: &DgSpace<R>, data: Vec<R>) -> Result<Self> {
        if data.len() != space.num_points() {
            return Err(Error::config(format!(
                "field has {} values, space needs {}",
                data.len(),
                space.num_points()
            )));
        }
        Ok(Self {
            nodes_per_cell: space.nodes_per_cell(),
            data,
        })
    }

    pub fn values(&self) -> &[R] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [R] {
        &mut self.data
    }

    pub fn cell(&self, cell: usize) -> &[R] {
        &self.data[cell * self.nodes_per_cell..(cell + 1) * self.nodes_per_cell]
    }

    pub fn get(&self, cell: usize, node: usize) -> R {
        self.data[cell * self.nodes_per_cell + node]
    }

    /// `sum_cells volume * sum_nodes w_node * value`.
    pub fn integrate(&self, space: &DgSpace<R>) -> R {
        let mut total = R::zero();
        for c in 0..space.num_cells() {
            let mut cell_sum = R::zero();
            for (n, &v) in self.cell(c).iter().enumerate() {
                cell_sum = cell_sum + space.node_weight(n) * v;
            }
            total = total + space.volume(c) * cell_sum;
        }
        total
    }
}

/// Nodal interpolation of a pointwise function.
pub fn project<R: Real>(f: impl Fn([R; 2]) -> R, space: &DgSpace<R>) -> Field<R> {
    let npc = space.nodes_per_cell();
    let mut data = Vec::with_capacity(space.num_points());
    for c in 0..space.num_cells() {
        for n in 0..npc {
            data.push(f(space.point(c, n)));
        }
    }
    Field {
        nodes_per_cell: npc,
        data,
    }
}

/// Left/right limits at one face node of an interior interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePair<R> {
    pub minus: R,
    pub plus: R,
}

/// Traces at every interior interface normal to `axis`.
///
/// Output is ordered by the low-side cell index, then by face node.
pub fn edge_traces<R: Real>(field: &Field<R>, space: &DgSpace<R>, axis: usize) -> Vec<TracePair<R>> {
    let basis = space.basis(axis);
    let stride = space.line_stride(axis);
    let mut out = Vec::new();
    for c in 0..space.num_cells() {
        let Some(right) = space.neighbor(c, axis, Side::High) else {
            continue;
        };
        for f in 0..space.face_nodes(axis) {
            let start = space.line_node(axis, f, 0);
            let minus = basis.trace_strided(Side::High, field.cell(c), start, stride);
            let plus = basis.trace_strided(Side::Low, field.cell(right), start, stride);
            out.push(TracePair { minus, plus });
        }
    }
    out
}
