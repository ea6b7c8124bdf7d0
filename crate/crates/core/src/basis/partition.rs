use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::simplex_volume;
use crate::scalar::Scalar;

use super::polytope::solve_small;

/// A subdivision of the unit cell `[0,1]^d` into simplices. Its integer
/// translates form a simplicial partition of `R^d`.
#[derive(Clone, Debug)]
pub struct SimplicialPartition<T> {
    dim: usize,
    name: &'static str,
    simplices: Vec<Vec<Vec<T>>>,
    /// Per simplex, the rows of `E^{-1}` where `E = [v_1 - v_0, …]`.
    inverse: Vec<Vec<Vec<T>>>,
}

/// Outcome of [`SimplicialPartition::check`].
#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub volume_sum: f64,
    pub min_volume: f64,
    pub tiles_cell: bool,
    pub symmetric: bool,
    pub periodic_faces_match: bool,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        (self.volume_sum - 1.0).abs() <= 1e-12
            && self.min_volume > 0.0
            && self.tiles_cell
            && self.symmetric
            && self.periodic_faces_match
    }
}

impl<T: Scalar> SimplicialPartition<T> {
    /// Build from explicit simplices (vertices in `[0,1]^d`).
    pub fn new(dim: usize, name: &'static str, simplices: Vec<Vec<Vec<T>>>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "partition dimension {dim}"
            )));
        }
        let mut inverse = Vec::with_capacity(simplices.len());
        for (index, s) in simplices.iter().enumerate() {
            if s.len() != dim + 1 || s.iter().any(|v| v.len() != dim) {
                return Err(Error::InvalidPartition(format!(
                    "simplex #{index} must have {} vertices of dimension {dim}",
                    dim + 1
                )));
            }
            let vol = simplex_volume(s);
            if vol.abs() <= T::geom_eps() {
                return Err(Error::DegenerateSimplex {
                    index,
                    volume: vol.to_f64_lossy(),
                });
            }
            inverse.push(edge_inverse(s).ok_or(Error::DegenerateSimplex {
                index,
                volume: vol.to_f64_lossy(),
            })?);
        }
        Ok(Self {
            dim,
            name,
            simplices,
            inverse,
        })
    }

    /// The only partition in 1D: the cell itself.
    pub fn interval() -> Self {
        Self::new(1, "interval", vec![vec![vec![T::zero()], vec![T::one()]]]).unwrap()
    }

    /// Each unit square cut by both diagonals into four triangles about the
    /// cell center.
    pub fn crisscross() -> Self {
        let c = vec![T::of(0.5), T::of(0.5)];
        let corners = [
            vec![T::zero(), T::zero()],
            vec![T::one(), T::zero()],
            vec![T::one(), T::one()],
            vec![T::zero(), T::one()],
        ];
        let simplices = (0..4)
            .map(|i| vec![c.clone(), corners[i].clone(), corners[(i + 1) % 4].clone()])
            .collect();
        Self::new(2, "crisscross", simplices).unwrap()
    }

    /// Kuhn (Freudenthal) subdivision into `d!` simplices along the main
    /// diagonal: one simplex `{x_{π(1)} >= … >= x_{π(d)}}` per permutation.
    pub fn kuhn(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "Kuhn partition for d = {dim}"
            )));
        }
        let mut simplices = Vec::new();
        for perm in permutations(dim) {
            let mut v = vec![T::zero(); dim];
            let mut s = vec![v.clone()];
            for &axis in &perm {
                v[axis] = T::one();
                s.push(v.clone());
            }
            simplices.push(s);
        }
        Self::new(dim, "kuhn", simplices)
    }

    /// The shipped partition for each dimension: interval, crisscross,
    /// and the six-tetrahedra Kuhn subdivision of the cube.
    pub fn standard(dim: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self::interval()),
            2 => Ok(Self::crisscross()),
            3 => Self::kuhn(3),
            _ => Err(Error::InvalidParameter(format!(
                "no partition for d = {dim}"
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn simplices(&self) -> &[Vec<Vec<T>>] {
        &self.simplices
    }

    /// Barycentric coordinates of a cell-local point in simplex `s`.
    pub fn barycentric(&self, s: usize, t: &[T]) -> Vec<T> {
        let v0 = &self.simplices[s][0];
        let inv = &self.inverse[s];
        let mut lam = Vec::with_capacity(self.dim + 1);
        let mut rest = T::one();
        for row in inv {
            let l = row
                .iter()
                .zip(t.iter().zip(v0))
                .fold(T::zero(), |acc, (&r, (&ti, &vi))| acc + r * (ti - vi));
            rest = rest - l;
            lam.push(l);
        }
        lam.insert(0, rest);
        lam
    }

    /// Gradients of the barycentric coordinates on simplex `s`.
    pub fn barycentric_gradients(&self, s: usize) -> Vec<Vec<T>> {
        let inv = &self.inverse[s];
        let mut g0 = vec![T::zero(); self.dim];
        for row in inv {
            for (a, &r) in g0.iter_mut().zip(row) {
                *a = *a - r;
            }
        }
        let mut out = vec![g0];
        out.extend(inv.iter().cloned());
        out
    }

    /// First simplex (in list order) containing the cell-local point.
    pub fn locate(&self, t: &[T]) -> Option<(usize, Vec<T>)> {
        let tol = T::geom_eps();
        let mut best: Option<(usize, Vec<T>, T)> = None;
        for s in 0..self.simplices.len() {
            let lam = self.barycentric(s, t);
            let worst = lam.iter().copied().fold(T::infinity(), T::min);
            if worst >= -tol {
                return Some((s, lam));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((s, lam, worst));
            }
        }
        // Round-off outside every simplex: take the nearest.
        best.map(|(s, lam, _)| (s, lam))
    }

    /// Verify the geometric invariants: non-degenerate simplices with
    /// volumes summing to one, a tiling with disjoint interiors, central
    /// symmetry (`1 - t` maps the set onto itself) and matching faces on
    /// opposite sides of the cell.
    pub fn check(&self) -> PartitionReport {
        let vols: Vec<f64> = self
            .simplices
            .iter()
            .map(|s| simplex_volume(s).abs().to_f64_lossy())
            .collect();
        let volume_sum = vols.iter().sum();
        let min_volume = vols.iter().copied().fold(f64::INFINITY, f64::min);

        // Every probe point strictly inside exactly one simplex.
        let probes = halton_points(self.dim, 512);
        let tol = T::of(1e-9);
        let tiles_cell = probes.iter().all(|p| {
            let pt: Vec<T> = p.iter().map(|&v| T::of(v)).collect();
            let inside = (0..self.simplices.len())
                .filter(|&s| self.barycentric(s, &pt).iter().all(|&l| l > -tol))
                .count();
            let strictly = (0..self.simplices.len())
                .filter(|&s| self.barycentric(s, &pt).iter().all(|&l| l > tol))
                .count();
            inside >= 1 && strictly <= 1
        });

        let key = |s: &[Vec<T>]| -> Vec<Vec<i64>> {
            let mut k: Vec<Vec<i64>> = s
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|&x| (x.to_f64_lossy() * 1e9).round() as i64)
                        .collect()
                })
                .collect();
            k.sort();
            k
        };
        let mut keys: Vec<_> = self.simplices.iter().map(|s| key(s)).collect();
        keys.sort();
        let mut reflected: Vec<_> = self
            .simplices
            .iter()
            .map(|s| {
                let r: Vec<Vec<T>> = s
                    .iter()
                    .map(|v| v.iter().map(|&x| T::one() - x).collect())
                    .collect();
                key(&r)
            })
            .collect();
        reflected.sort();
        let symmetric = keys == reflected;

        // Faces lying on x_i = 0 must reappear, shifted by e_i, on x_i = 1.
        let mut faces_lo: Vec<Vec<Vec<Vec<i64>>>> = vec![Vec::new(); self.dim];
        let mut faces_hi: Vec<Vec<Vec<Vec<i64>>>> = vec![Vec::new(); self.dim];
        for s in &self.simplices {
            for skip in 0..=self.dim {
                let face: Vec<Vec<T>> = s
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, v)| v.clone())
                    .collect();
                for axis in 0..self.dim {
                    if face.iter().all(|v| v[axis] == T::zero()) {
                        faces_lo[axis].push(key(&face));
                    }
                    if face.iter().all(|v| v[axis] == T::one()) {
                        let shifted: Vec<Vec<T>> = face
                            .iter()
                            .map(|v| {
                                let mut w = v.clone();
                                w[axis] = T::zero();
                                w
                            })
                            .collect();
                        faces_hi[axis].push(key(&shifted));
                    }
                }
            }
        }
        let periodic_faces_match = (0..self.dim).all(|a| {
            faces_lo[a].sort();
            faces_hi[a].sort();
            faces_lo[a] == faces_hi[a]
        });

        PartitionReport {
            volume_sum,
            min_volume,
            tiles_cell,
            symmetric,
            periodic_faces_match,
        }
    }
}

fn edge_inverse<T: Scalar>(s: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let d = s.len() - 1;
    let e: Vec<Vec<T>> = (0..d)
        .map(|r| (0..d).map(|c| s[c + 1][r] - s[0][r]).collect())
        .collect();
    let mut rows = vec![vec![T::zero(); d]; d];
    for col in 0..d {
        let mut unit = vec![T::zero(); d];
        unit[col] = T::one();
        let x = solve_small(e.clone(), unit)?;
        for (r, &v) in x.iter().enumerate() {
            rows[r][col] = v;
        }
    }
    Some(rows)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Deterministic low-discrepancy probe points in the open unit cell.
pub(crate) fn halton_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 3] = [2, 3, 5];
    (1..=count as u64)
        .map(|i| {
            (0..dim)
                .map(|a| {
                    let b = PRIMES[a];
                    let (mut f, mut r, mut k) = (1.0, 0.0, i);
                    while k > 0 {
                        f /= b as f64;
                        r += f * (k % b) as f64;
                        k /= b;
                    }
                    r
                })
                .collect()
        })
        .collect()
}
