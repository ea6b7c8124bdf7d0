//! Gauss–Legendre rules on intervals, unit cells and simplices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gauss–Legendre nodes and weights on `[0, 1]`, computed in `f64`.
///
/// Newton iteration on the three-term Legendre recurrence; exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess for the i-th root on [-1, 1].
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // Map [-1, 1] -> [0, 1].
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n == 1 {
        nodes[0] = 0.5;
        weights[0] = 1.0;
    }
    (nodes, weights)
}

/// Number of Gauss points per axis that integrates a degree-`degree`
/// polynomial exactly.
pub fn gauss_order_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// Quadrature rule on the reference simplex with vertices `0, e_1, …, e_d`
/// (collapsed-coordinate product rule). Points are barycentric weights
/// `λ_0..λ_d`; weights sum to the reference volume `1/d!`.
#[derive(Clone, Debug)]
pub struct SimplexRule<T> {
    pub dim: usize,
    pub barycentric: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> SimplexRule<T> {
    /// Rule exact for polynomials of total degree `degree` on a `dim`-simplex.
    pub fn new(dim: usize, degree: usize) -> Self {
        // The collapse Jacobian adds up to `dim - 1` to the degree in the
        // first collapsed coordinate.
        let n = gauss_order_for_degree(degree + dim.saturating_sub(1));
        let (gx, gw) = gauss_legendre_unit(n);
        let mut barycentric = Vec::new();
        let mut weights = Vec::new();
        let total = n.pow(dim as u32);
        for flat in 0..total {
            let mut idx = flat;
            let mut lambda = vec![0.0f64; dim + 1];
            let mut rest = 1.0f64;
            let mut w = 1.0f64;
            for axis in 0..dim {
                let k = idx % n;
                idx /= n;
                let u = gx[k];
                w *= gw[k] * (1.0 - u).powi((dim - 1 - axis) as i32);
                lambda[axis] = rest * u;
                rest *= 1.0 - u;
            }
            lambda[dim] = rest;
            barycentric.push(lambda.into_iter().map(T::of).collect());
            weights.push(T::of(w));
        }
        Self {
            dim,
            barycentric,
            weights,
        }
    }

    /// Visit every node of the rule mapped onto `vertices`, with its weight
    /// already scaled to the simplex of the given (unsigned) volume.
    pub fn for_each_node<F>(&self, vertices: &[Vec<T>], volume: T, mut f: F)
    where
        F: FnMut(&[T], T),
    {
        let d = self.dim;
        let scale = volume * T::of(factorial(d) as f64);
        let mut point = vec![T::zero(); d];
        for (lam, &w) in self.barycentric.iter().zip(&self.weights) {
            for (i, p) in point.iter_mut().enumerate() {
                *p = (0..=d).fold(T::zero(), |s, k| s + lam[k] * vertices[k][i]);
            }
            f(&point, w * scale);
        }
    }

    /// Integrate `f` over the simplex spanned by `vertices` (`dim + 1` points).
    pub fn integrate<F>(&self, vertices: &[Vec<T>], volume: T, mut f: F) -> T
    where
        F: FnMut(&[T]) -> T,
    {
        let d = self.dim;
        let scale = volume * T::of(factorial(d) as f64);
        let mut point = vec![T::zero(); d];
        let mut acc = T::zero();
        for (lam, &w) in self.barycentric.iter().zip(&self.weights) {
            for (i, p) in point.iter_mut().enumerate() {
                *p = (0..=d).fold(T::zero(), |s, k| s + lam[k] * vertices[k][i]);
            }
            acc = acc + w * f(&point);
        }
        acc * scale
    }
}

pub(crate) fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

/// Signed volume of a simplex given as `dim + 1` vertices.
pub fn simplex_volume<T: Scalar>(vertices: &[Vec<T>]) -> T {
    let d = vertices.len() - 1;
    let mut m = vec![vec![T::zero(); d]; d];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = vertices[r + 1][c] - vertices[0][c];
        }
    }
    determinant(m) / T::of(factorial(d) as f64)
}

pub(crate) fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = det * m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[r][c] = m[r][c] - f * v;
            }
        }
    }
    det
}

/// Node/weight list on the unit cell `[0, 1]^d`.
///
/// Either a tensor Gauss rule, or a composite simplex rule on the cells of a
/// simplicial partition (exact for piecewise-polynomial integrands whose
/// breaks follow that partition).
#[derive(Clone, Debug)]
pub struct CellQuadrature<T> {
    dim: usize,
    nodes: Vec<Vec<T>>,
    weights: Vec<T>,
    degree: usize,
    layout: CellLayout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellLayout {
    Tensor,
    Simplicial,
}

impl<T: Scalar> CellQuadrature<T> {
    /// Tensor Gauss–Legendre rule with `order` points per axis.
    pub fn tensor(dim: usize, order: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) || order == 0 {
            return Err(Error::InvalidParameter(format!(
                "cell quadrature needs dim in 1..=3 and order >= 1, got dim={dim}, order={order}"
            )));
        }
        let (gx, gw) = gauss_legendre_unit(order);
        let total = order.pow(dim as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut idx = flat;
            let mut node = vec![T::zero(); dim];
            let mut w = 1.0;
            // Last axis fastest, matching lattice storage order.
            for axis in (0..dim).rev() {
                let k = idx % order;
                idx /= order;
                node[axis] = T::of(gx[k]);
                w *= gw[k];
            }
            nodes.push(node);
            weights.push(T::of(w));
        }
        Ok(Self {
            dim,
            nodes,
            weights,
            degree: 2 * order - 1,
            layout: CellLayout::Tensor,
        })
    }

    /// Composite rule over the simplices of a partition of the unit cell,
    /// exact for polynomials of total degree `degree` on each simplex.
    pub fn on_simplices(dim: usize, simplices: &[Vec<Vec<T>>], degree: usize) -> Result<Self> {
        let rule = SimplexRule::<T>::new(dim, degree);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for s in simplices {
            let vol = simplex_volume(s).abs();
            let scale = vol * T::of(factorial(dim) as f64);
            for (lam, &w) in rule.barycentric.iter().zip(&rule.weights) {
                let node: Vec<T> = (0..dim)
                    .map(|i| (0..=dim).fold(T::zero(), |acc, k| acc + lam[k] * s[k][i]))
                    .collect();
                nodes.push(node);
                weights.push(w * scale);
            }
        }
        Ok(Self {
            dim,
            nodes,
            weights,
            degree,
            layout: CellLayout::Simplicial,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Vec<T>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Total polynomial degree integrated exactly (per axis for tensor rules).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn layout(&self) -> CellLayout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(&[T]) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (x, &w)| acc + w * f(x))
    }
}
