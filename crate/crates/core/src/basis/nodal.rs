use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::custom::{BasisFile, CustomBasis};
use super::partition::SimplicialPartition;
use super::polytope::Polytope;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    Q1,
    P1,
    ExtendedHat1D,
    Custom,
}

#[derive(Clone, Debug)]
enum Kind<T> {
    Q1,
    P1(SimplicialPartition<T>),
    ExtendedHat,
    Custom(CustomBasis<T>),
}

/// The nodal basis function `ζ̄` generating the first-order interpolant
/// `ū(x) = Σ_ξ u(ξ) ζ̄(x − ξ)`.
///
/// Gradients are only defined almost everywhere. On a breakpoint the limit
/// from the lexicographically smaller cell is returned: along each axis the
/// one-sided limit from the left. For P1 bases, ties between simplices of
/// the same cell go to the first simplex in the partition's list.
#[derive(Clone, Debug)]
pub struct NodalBasis<T> {
    dim: usize,
    kind: Kind<T>,
}

/// Q1 hat `max(0, 1 − |t|)`.
#[inline]
fn hat<T: Scalar>(t: T) -> T {
    (T::one() - t.abs()).max(T::zero())
}

/// Left-limit slope of the hat.
#[inline]
fn hat_slope<T: Scalar>(t: T) -> T {
    if t > -T::one() && t <= T::zero() {
        T::one()
    } else if t > T::zero() && t <= T::one() {
        -T::one()
    } else {
        T::zero()
    }
}

impl<T: Scalar> NodalBasis<T> {
    /// Tensor-product hat `Π max(0, 1 − |x_i|)`.
    pub fn q1(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: Kind::Q1,
        })
    }

    /// Piecewise-linear basis on the integer translates of `partition`.
    ///
    /// Partition vertices that are not lattice points (the crisscross
    /// centers) carry the Q1 interpolant of the lattice nodal values, so only
    /// lattice sites are degrees of freedom.
    pub fn p1(partition: SimplicialPartition<T>) -> Result<Self> {
        let report = partition.check();
        if !report.passed() {
            return Err(Error::InvalidPartition(format!("{report:?}")));
        }
        Ok(Self {
            dim: partition.dim(),
            kind: Kind::P1(partition),
        })
    }

    /// P1 on the shipped partition for `dim`.
    pub fn p1_standard(dim: usize) -> Result<Self> {
        Self::p1(SimplicialPartition::standard(dim)?)
    }

    /// The 1D function equal to `1/3` on `[−1, 1]`, decaying linearly to 0
    /// at `±2`. Satisfies (Z1)–(Z3) but not the nodal property, so the map
    /// `u ↦ ū` is not injective.
    pub fn extended_hat() -> Self {
        Self {
            dim: 1,
            kind: Kind::ExtendedHat,
        }
    }

    pub fn custom(file: &BasisFile) -> Result<Self> {
        let custom = CustomBasis::from_spec(&file.spec)?;
        Ok(Self {
            dim: custom.dim(),
            kind: Kind::Custom(custom),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flavor(&self) -> Flavor {
        match self.kind {
            Kind::Q1 => Flavor::Q1,
            Kind::P1(_) => Flavor::P1,
            Kind::ExtendedHat => Flavor::ExtendedHat1D,
            Kind::Custom(_) => Flavor::Custom,
        }
    }

    /// Short name used in reports, e.g. `q1`, `p1-crisscross`, `exthat`.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Q1 => "q1".into(),
            Kind::P1(p) => format!("p1-{}", p.name()),
            Kind::ExtendedHat => "exthat".into(),
            Kind::Custom(_) => "custom".into(),
        }
    }

    pub fn partition(&self) -> Option<&SimplicialPartition<T>> {
        match &self.kind {
            Kind::P1(p) => Some(p),
            _ => None,
        }
    }

    /// `false` for bases known to violate the nodal property (Z4).
    pub fn is_nodal_by_construction(&self) -> bool {
        !matches!(self.kind, Kind::ExtendedHat | Kind::Custom(_))
    }

    /// `r` with `supp ζ̄ ⊂ [−r, r]^d`.
    pub fn support_radius(&self) -> T {
        match &self.kind {
            Kind::Q1 | Kind::P1(_) => T::one(),
            Kind::ExtendedHat => T::of(2.0),
            Kind::Custom(c) => c.support_radius(),
        }
    }

    /// Integer bound on the support radius, for lattice enumeration.
    pub fn support_cells(&self) -> i64 {
        self.support_radius().ceil().to_i64().unwrap_or(0)
    }

    /// An upper bound for `sup |∇ζ̄|` (Euclidean), i.e. a Lipschitz constant.
    pub fn lipschitz_bound(&self) -> T {
        match &self.kind {
            Kind::Q1 => T::of_usize(self.dim).sqrt(),
            Kind::P1(_) => {
                let mut best = T::zero();
                let mut g = vec![T::zero(); self.dim];
                for cell in corner_cells(self.dim) {
                    let p = self.partition().unwrap();
                    for (s, simplex) in p.simplices().iter().enumerate() {
                        // Interior point of the simplex in this cell.
                        let bc: Vec<T> = (0..self.dim)
                            .map(|i| {
                                simplex.iter().map(|v| v[i]).sum::<T>() / T::of_usize(self.dim + 1)
                                    + T::of_i64(cell[i])
                            })
                            .collect();
                        let _ = s;
                        self.gradient(&bc, &mut g);
                        best = best.max(g.iter().fold(T::zero(), |a, &v| a + v * v).sqrt());
                    }
                }
                best
            }
            Kind::ExtendedHat => T::one() / T::of(3.0),
            Kind::Custom(c) => c.lipschitz_bound(),
        }
    }

    pub fn value(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            Kind::Q1 => x.iter().fold(T::one(), |acc, &t| acc * hat(t)),
            Kind::P1(p) => p1_eval(p, x, None),
            Kind::ExtendedHat => {
                let a = x[0].abs();
                let third = T::one() / T::of(3.0);
                if a <= T::one() {
                    third
                } else if a < T::of(2.0) {
                    (T::of(2.0) - a) * third
                } else {
                    T::zero()
                }
            }
            Kind::Custom(c) => c.value(x),
        }
    }

    pub fn gradient(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(out.len(), self.dim);
        match &self.kind {
            Kind::Q1 => {
                for i in 0..self.dim {
                    out[i] = x.iter().enumerate().fold(T::one(), |acc, (j, &t)| {
                        acc * if i == j { hat_slope(t) } else { hat(t) }
                    });
                }
            }
            Kind::P1(p) => {
                p1_eval(p, x, Some(out));
            }
            Kind::ExtendedHat => {
                let t = x[0];
                let third = T::one() / T::of(3.0);
                let two = T::of(2.0);
                out[0] = if t > -two && t <= -T::one() {
                    third
                } else if t > T::one() && t <= two {
                    -third
                } else {
                    T::zero()
                };
            }
            Kind::Custom(c) => c.gradient(x, out),
        }
    }

    /// Value (`order = 0`, one entry) or gradient (`order = 1`, `d` entries).
    pub fn derivative(&self, x: &[T], order: usize, out: &mut [T]) -> Result<()> {
        match order {
            0 => {
                out[0] = self.value(x);
                Ok(())
            }
            1 => {
                self.gradient(x, out);
                Ok(())
            }
            _ => Err(Error::UnsupportedOrder {
                requested: order,
                max: 1,
            }),
        }
    }

    /// Convex pieces covering the support, on each of which `ζ̄` is a
    /// polynomial of total degree at most [`Self::piece_degree`].
    pub(crate) fn pieces(&self) -> Vec<Polytope<T>> {
        match &self.kind {
            Kind::Q1 => corner_cells(self.dim)
                .into_iter()
                .map(|c| {
                    let lo: Vec<T> = c.iter().map(|&v| T::of_i64(v)).collect();
                    let hi = lo.iter().map(|&v| v + T::one()).collect();
                    Polytope::from_box(lo, hi)
                })
                .collect(),
            Kind::P1(p) => {
                let mut out = Vec::new();
                for c in corner_cells(self.dim) {
                    for s in p.simplices() {
                        let verts: Vec<Vec<T>> = s
                            .iter()
                            .map(|v| v.iter().zip(&c).map(|(&a, &o)| a + T::of_i64(o)).collect())
                            .collect();
                        if verts.iter().all(|v| self.value(v) == T::zero()) {
                            continue;
                        }
                        out.extend(Polytope::from_simplex(&verts));
                    }
                }
                out
            }
            Kind::ExtendedHat => [(-2.0, -1.0), (-1.0, 1.0), (1.0, 2.0)]
                .iter()
                .map(|&(a, b)| Polytope::from_box(vec![T::of(a)], vec![T::of(b)]))
                .collect(),
            Kind::Custom(c) => c.pieces(),
        }
    }

    pub(crate) fn piece_degree(&self) -> usize {
        match &self.kind {
            Kind::Q1 => self.dim,
            Kind::P1(_) | Kind::ExtendedHat => 1,
            Kind::Custom(c) => c.piece_degree(),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "basis dimension {dim} not in 1..=3"
        )));
    }
    Ok(())
}

/// The `2^d` unit cells `c + [0,1]^d`, `c ∈ {−1, 0}^d`, around the origin.
fn corner_cells(dim: usize) -> Vec<Vec<i64>> {
    (0..1usize << dim)
        .map(|bits| {
            (0..dim)
                .map(|i| if bits >> i & 1 == 1 { 0 } else { -1 })
                .collect()
        })
        .collect()
}

/// Evaluate the P1 basis (and optionally its gradient) at `x`.
fn p1_eval<T: Scalar>(p: &SimplicialPartition<T>, x: &[T], grad: Option<&mut [T]>) -> T {
    let d = x.len();
    let zero_grad = |g: Option<&mut [T]>| {
        if let Some(g) = g {
            g.iter_mut().for_each(|v| *v = T::zero());
        }
    };
    if x.iter().any(|&t| t.abs() > T::one()) {
        zero_grad(grad);
        return T::zero();
    }
    // Cell with x in c + (0, 1]^d: the smaller cell wins on faces.
    let cell: Vec<T> = x.iter().map(|&t| t.ceil() - T::one()).collect();
    let local: Vec<T> = x.iter().zip(&cell).map(|(&t, &c)| t - c).collect();
    let Some((s, lam)) = p.locate(&local) else {
        zero_grad(grad);
        return T::zero();
    };
    let nodal: Vec<T> = p.simplices()[s]
        .iter()
        .map(|v| {
            v.iter()
                .zip(&cell)
                .fold(T::one(), |acc, (&vi, &ci)| acc * hat(vi + ci))
        })
        .collect();
    if let Some(g) = grad {
        let bg = p.barycentric_gradients(s);
        for i in 0..d {
            g[i] = nodal
                .iter()
                .zip(&bg)
                .fold(T::zero(), |a, (&n, gk)| a + n * gk[i]);
        }
    }
    nodal
        .iter()
        .zip(&lam)
        .fold(T::zero(), |a, (&n, &l)| a + n * l)
}
