//! Convex polytopes in H-representation, their pairwise intersections and a
//! decomposition of the intersection into simplices.
//!
//! Used to integrate products of two piecewise polynomials exactly: the
//! integrand is a single polynomial on each intersection of a piece of one
//! factor with a piece of the other.

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub(crate) struct Polytope<T> {
    /// Half-spaces `n·y <= c` with unit normals.
    planes: Vec<(Vec<T>, T)>,
    lo: Vec<T>,
    hi: Vec<T>,
}

pub(crate) fn solve_small<T: Scalar>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs() <= T::epsilon() * T::of(16.0) {
            return None;
        }
        m.swap(pivot, col);
        rhs.swap(pivot, col);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                let v = m[col][c];
                m[r][c] = m[r][c] - f * v;
            }
            let v = rhs[col];
            rhs[r] = rhs[r] - f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let s = (r + 1..n).fold(rhs[r], |acc, c| acc - m[r][c] * x[c]);
        x[r] = s / m[r][r];
    }
    Some(x)
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

fn normalized<T: Scalar>(n: Vec<T>, c: T) -> (Vec<T>, T) {
    let len = dot(&n, &n).sqrt();
    (n.into_iter().map(|v| v / len).collect(), c / len)
}

impl<T: Scalar> Polytope<T> {
    pub fn from_box(lo: Vec<T>, hi: Vec<T>) -> Self {
        let d = lo.len();
        let mut planes = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut n = vec![T::zero(); d];
            n[i] = T::one();
            planes.push((n.clone(), hi[i]));
            n[i] = -T::one();
            planes.push((n, -lo[i]));
        }
        Self { planes, lo, hi }
    }

    /// Simplex from `d + 1` vertices; `None` if degenerate.
    pub fn from_simplex(vertices: &[Vec<T>]) -> Option<Self> {
        let d = vertices.len() - 1;
        let v0 = &vertices[0];
        // Rows of E^{-1} give the barycentric coordinates λ_1..λ_d.
        let mut inv_rows = vec![vec![T::zero(); d]; d];
        for col in 0..d {
            // Solve E^T r = e_col is awkward; instead invert E column by column.
            let e: Vec<Vec<T>> = (0..d)
                .map(|r| (0..d).map(|c| vertices[c + 1][r] - v0[r]).collect())
                .collect();
            let mut unit = vec![T::zero(); d];
            unit[col] = T::one();
            // Column `col` of E^{-1}.
            let x = solve_small(e, unit)?;
            for (r, &xv) in x.iter().enumerate() {
                inv_rows[r][col] = xv;
            }
        }
        let mut planes = Vec::with_capacity(d + 1);
        let mut sum = vec![T::zero(); d];
        for row in &inv_rows {
            // λ_k = row·(y - v0) >= 0  <=>  -row·y <= -row·v0
            let n: Vec<T> = row.iter().map(|&v| -v).collect();
            let c = -dot(row, v0);
            planes.push(normalized(n, c));
            for (s, &r) in sum.iter_mut().zip(row) {
                *s = *s + r;
            }
        }
        // λ_0 = 1 - Σ λ_k >= 0  <=>  sum·y <= 1 + sum·v0
        let c = T::one() + dot(&sum, v0);
        planes.push(normalized(sum, c));
        let lo = (0..d)
            .map(|i| vertices.iter().map(|v| v[i]).fold(T::infinity(), T::min))
            .collect();
        let hi = (0..d)
            .map(|i| {
                vertices
                    .iter()
                    .map(|v| v[i])
                    .fold(T::neg_infinity(), T::max)
            })
            .collect();
        Some(Self { planes, lo, hi })
    }

    /// `{ y : x - y ∈ self }`.
    pub fn reflected_about(&self, x: &[T]) -> Self {
        let planes = self
            .planes
            .iter()
            .map(|(n, c)| (n.iter().map(|&v| -v).collect(), *c - dot(n, x)))
            .collect();
        let lo = x.iter().zip(&self.hi).map(|(&xi, &h)| xi - h).collect();
        let hi = x.iter().zip(&self.lo).map(|(&xi, &l)| xi - l).collect();
        Self { planes, lo, hi }
    }

    pub fn bbox_overlaps(&self, other: &Self, eps: T) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((&l1, &h1), (&l2, &h2))| l1.max(l2) < h1.min(h2) - eps)
    }

    /// Decompose `self ∩ other` into simplices (each `d + 1` vertices).
    pub fn intersection_simplices(&self, other: &Self) -> Vec<Vec<Vec<T>>> {
        let d = self.lo.len();
        let eps = T::geom_eps() * T::of(32.0);
        if !self.bbox_overlaps(other, eps) {
            return Vec::new();
        }
        let planes: Vec<&(Vec<T>, T)> = self.planes.iter().chain(&other.planes).collect();
        let verts = enumerate_vertices(d, &planes, eps);
        if verts.len() < d + 1 {
            return Vec::new();
        }
        let centroid: Vec<T> = (0..d)
            .map(|i| verts.iter().map(|v| v[i]).sum::<T>() / T::of_usize(verts.len()))
            .collect();
        let min_volume = eps * eps;
        let keep = |s: Vec<Vec<T>>| {
            let vol = crate::quadrature::simplex_volume(&s).abs();
            (vol > min_volume).then_some(s)
        };
        match d {
            1 => {
                let lo = verts.iter().map(|v| v[0]).fold(T::infinity(), T::min);
                let hi = verts.iter().map(|v| v[0]).fold(T::neg_infinity(), T::max);
                keep(vec![vec![lo], vec![hi]]).into_iter().collect()
            }
            2 => {
                let mut ring = verts;
                sort_by_angle(
                    &mut ring,
                    &centroid,
                    &[T::one(), T::zero()],
                    &[T::zero(), T::one()],
                );
                (0..ring.len())
                    .filter_map(|i| {
                        keep(vec![
                            centroid.clone(),
                            ring[i].clone(),
                            ring[(i + 1) % ring.len()].clone(),
                        ])
                    })
                    .collect()
            }
            _ => {
                let mut out = Vec::new();
                let mut seen: Vec<(Vec<T>, T)> = Vec::new();
                for (n, c) in planes {
                    if seen.iter().any(|(m, e)| {
                        (*e - *c).abs() <= eps
                            && m.iter().zip(n).all(|(&a, &b)| (a - b).abs() <= eps)
                    }) {
                        continue;
                    }
                    seen.push((n.clone(), *c));
                    let mut facet: Vec<Vec<T>> = verts
                        .iter()
                        .filter(|v| (dot(n, v) - *c).abs() <= eps)
                        .cloned()
                        .collect();
                    if facet.len() < 3 {
                        continue;
                    }
                    let fc: Vec<T> = (0..d)
                        .map(|i| facet.iter().map(|v| v[i]).sum::<T>() / T::of_usize(facet.len()))
                        .collect();
                    let (u, w) = plane_basis(n);
                    sort_by_angle(&mut facet, &fc, &u, &w);
                    for i in 0..facet.len() {
                        if let Some(s) = keep(vec![
                            centroid.clone(),
                            fc.clone(),
                            facet[i].clone(),
                            facet[(i + 1) % facet.len()].clone(),
                        ]) {
                            out.push(s);
                        }
                    }
                }
                out
            }
        }
    }
}

fn enumerate_vertices<T: Scalar>(d: usize, planes: &[&(Vec<T>, T)], eps: T) -> Vec<Vec<T>> {
    let k = planes.len();
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let m: Vec<Vec<T>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs: Vec<T> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(p) = solve_small(m, rhs) {
            let feasible = planes.iter().all(|(n, c)| dot(n, &p) <= *c + eps);
            let fresh = !out
                .iter()
                .any(|q| q.iter().zip(&p).all(|(&a, &b)| (a - b).abs() <= eps));
            if feasible && fresh {
                out.push(p);
            }
        }
        // Next combination in lexicographic order.
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < k - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn plane_basis<T: Scalar>(n: &[T]) -> (Vec<T>, Vec<T>) {
    // Pick the coordinate axis least aligned with n.
    let axis = (0..3)
        .min_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).unwrap())
        .unwrap();
    let mut e = vec![T::zero(); 3];
    e[axis] = T::one();
    let proj = dot(&e, n);
    let mut u: Vec<T> = e.iter().zip(n).map(|(&a, &b)| a - proj * b).collect();
    let len = dot(&u, &u).sqrt();
    u.iter_mut().for_each(|v| *v = *v / len);
    let w = vec![
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    (u, w)
}

fn sort_by_angle<T: Scalar>(points: &mut [Vec<T>], center: &[T], u: &[T], w: &[T]) {
    let angle = |p: &Vec<T>| {
        let rel: Vec<T> = p.iter().zip(center).map(|(&a, &b)| a - b).collect();
        dot(&rel, w).atan2(dot(&rel, u))
    };
    points.sort_by(|a, b| {
        angle(a)
            .partial_cmp(&angle(b))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::simplex_volume;

    fn total_volume(parts: &[Vec<Vec<f64>>]) -> f64 {
        parts.iter().map(|s| simplex_volume(s).abs()).sum()
    }

    #[test]
    fn box_box_intersection_volumes() {
        let a = Polytope::from_box(vec![0.0, 0.0], vec![1.0, 1.0]);
        let b = Polytope::from_box(vec![0.25, -1.0], vec![2.0, 0.5]);
        assert!((total_volume(&a.intersection_simplices(&b)) - 0.375).abs() < 1e-14);

        let a3 = Polytope::from_box(vec![0.0; 3], vec![1.0; 3]);
        let b3 = Polytope::from_box(vec![0.5, 0.25, -1.0], vec![3.0, 3.0, 0.5]);
        assert!((total_volume(&a3.intersection_simplices(&b3)) - 0.5 * 0.75 * 0.5).abs() < 1e-14);
    }

    #[test]
    fn disjoint_or_touching_pieces_have_no_intersection() {
        let a = Polytope::from_box(vec![0.0, 0.0], vec![1.0, 1.0]);
        let b = Polytope::from_box(vec![1.0, 0.0], vec![2.0, 1.0]);
        assert!(a.intersection_simplices(&b).is_empty());
    }

    #[test]
    fn simplex_triangle_overlap() {
        // Unit square ∩ triangle {x, y >= 0, x + y <= 1} shifted by (0.5, 0).
        let sq = Polytope::from_box(vec![0.0, 0.0], vec![1.0, 1.0]);
        let tri =
            Polytope::from_simplex(&[vec![0.5, 0.0], vec![1.5, 0.0], vec![0.5, 1.0]]).unwrap();
        // Region x in [0.5,1], y in [0, 1.5 - x]: area 0.5*(1 + 0.5)/2 = 0.375.
        assert!((total_volume(&sq.intersection_simplices(&tri)) - 0.375).abs() < 1e-14);
    }

    #[test]
    fn tetrahedron_cube_overlap() {
        let cube = Polytope::from_box(vec![0.0; 3], vec![1.0; 3]);
        let tet = Polytope::from_simplex(&[
            vec![0.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        // Cube ∩ {x+y+z <= 2}: 1 - 1/6 (corner cut at (1,1,1)).
        assert!((total_volume(&cube.intersection_simplices(&tet)) - 5.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn reflection_maps_box_correctly() {
        let a = Polytope::from_box(vec![0.0f64], vec![1.0]);
        let r = a.reflected_about(&[0.25]);
        // { y : 0.25 - y in [0,1] } = [-0.75, 0.25]
        let whole = Polytope::from_box(vec![-5.0], vec![5.0]);
        let parts = r.intersection_simplices(&whole);
        assert_eq!(parts.len(), 1);
        let (lo, hi) = (parts[0][0][0], parts[0][1][0]);
        assert!((lo + 0.75).abs() < 1e-15 && (hi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        assert!(
            Polytope::<f64>::from_simplex(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]])
                .is_none()
        );
    }
}
