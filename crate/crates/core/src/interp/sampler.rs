use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::quadrature::CellQuadrature;
use crate::scalar::Scalar;

use super::field::FieldBasis;

/// Which unit cells `c + [0,1)^d` a norm runs over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellSet {
    /// Every cell of the periodic box.
    All,
    /// Cells with `lo ≤ c < hi` componentwise, in literal (unwrapped)
    /// coordinates; coefficients are still read periodically.
    Window { lo: Vec<i64>, hi: Vec<i64> },
}

impl CellSet {
    pub fn cells(&self, domain: &LatticeDomain) -> Result<Vec<Vec<i64>>> {
        match self {
            CellSet::All => Ok(domain.sites().collect()),
            CellSet::Window { lo, hi } => {
                let d = domain.dim();
                if lo.len() != d || hi.len() != d || lo.iter().zip(hi).any(|(a, b)| a >= b) {
                    return Err(Error::InvalidParameter(format!(
                        "bad cell window {lo:?}..{hi:?}"
                    )));
                }
                let sides: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| (b - a) as usize).collect();
                let total: usize = sides.iter().product();
                Ok((0..total)
                    .map(|mut flat| {
                        let mut c = vec![0i64; d];
                        for i in (0..d).rev() {
                            c[i] = lo[i] + (flat % sides[i]) as i64;
                            flat /= sides[i];
                        }
                        c
                    })
                    .collect())
            }
        }
    }

    pub fn len(&self, domain: &LatticeDomain) -> usize {
        match self {
            CellSet::All => domain.len(),
            CellSet::Window { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| (b - a).max(0) as usize)
                .product(),
        }
    }
}

/// Basis derivatives tabulated at fixed cell-local points for every lattice
/// offset that reaches the cell. Since the basis is translation invariant the
/// table serves every cell, and a field value at `c + t_q` is a short dot
/// product with coefficients around `c`.
pub(crate) struct CellSampler<T> {
    dim: usize,
    block: usize,
    points: Vec<Vec<T>>,
    weights: Vec<T>,
    /// Per point: `(offset δ, ∇^k ζ(t_q − δ))` for non-vanishing entries.
    taps: Vec<Vec<(Vec<i64>, Vec<T>)>>,
}

impl<T: Scalar> CellSampler<T> {
    /// Quadrature nodes, plus (if `corners`) the `2^d` cell corners moved a
    /// hair inside so that piecewise fields are read from this cell's piece.
    /// Corner points carry zero weight.
    pub fn new(
        basis: &FieldBasis<T>,
        order: usize,
        quad: &CellQuadrature<T>,
        corners: bool,
    ) -> Result<Self> {
        basis.check_order(order)?;
        let d = basis.dim();
        if quad.dim() != d {
            return Err(Error::InvalidParameter(format!(
                "quadrature dimension {} vs field dimension {d}",
                quad.dim()
            )));
        }
        let mut points: Vec<Vec<T>> = quad.nodes().to_vec();
        let mut weights: Vec<T> = quad.weights().to_vec();
        if corners {
            let eta = T::epsilon() * T::of(1e4);
            for bits in 0..1usize << d {
                points.push(
                    (0..d)
                        .map(|i| {
                            if bits >> i & 1 == 1 {
                                T::one() - eta
                            } else {
                                eta
                            }
                        })
                        .collect(),
                );
                weights.push(T::zero());
            }
        }
        let block = d.pow(order as u32);
        let r = basis.support_cells();
        let side = (2 * r + 2) as usize;
        let offsets: Vec<Vec<i64>> = (0..side.pow(d as u32))
            .map(|mut flat| {
                let mut o = vec![0i64; d];
                for i in (0..d).rev() {
                    o[i] = (flat % side) as i64 - r;
                    flat /= side;
                }
                o
            })
            .collect();
        let taps = points
            .par_iter()
            .map(|t| -> Result<Vec<(Vec<i64>, Vec<T>)>> {
                let mut row = Vec::new();
                let mut tensor = vec![T::zero(); block];
                for off in &offsets {
                    let x: Vec<T> = t
                        .iter()
                        .zip(off)
                        .map(|(&ti, &o)| ti - T::of_i64(o))
                        .collect();
                    if x.iter().any(|v| v.abs() >= T::of_i64(r)) {
                        continue;
                    }
                    basis.derivative(&x, order, &mut tensor)?;
                    if tensor.iter().any(|&v| v != T::zero()) {
                        row.push((off.clone(), tensor.clone()));
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: d,
            block,
            points,
            weights,
            taps,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, q: usize) -> &[T] {
        &self.points[q]
    }

    pub fn weight(&self, q: usize) -> T {
        self.weights[q]
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// `∇^k f(c + t_q)` for coefficients `u`, written to `out` (`m·d^k`).
    pub fn eval(&self, u: &LatticeFunction<T>, cell: &[i64], q: usize, out: &mut [T]) {
        let m = u.components();
        let dom = u.domain();
        out.iter_mut().for_each(|v| *v = T::zero());
        let mut site = vec![0i64; self.dim];
        for (off, tensor) in &self.taps[q] {
            for i in 0..self.dim {
                site[i] = cell[i] + off[i];
            }
            let coeff = u.at(dom.index(&site));
            for c in 0..m {
                let a = coeff[c];
                if a == T::zero() {
                    continue;
                }
                let dst = &mut out[c * self.block..(c + 1) * self.block];
                for (o, &t) in dst.iter_mut().zip(tensor) {
                    *o = *o + a * t;
                }
            }
        }
    }
}
