use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::scalar::Scalar;

use super::operator::ConvolutionOperator;

/// The inverse kernel `g = ℱ⁻¹(1/m̂)` truncated to `|ξ|_∞ ≤ radius`.
#[derive(Clone, Debug, Serialize)]
pub struct InverseKernel {
    pub dim: usize,
    pub radius: i64,
    /// Extent of the periodic box `g` was computed on.
    pub box_extent: usize,
    /// `g(ξ)` for `ξ ∈ [−R, R]^d`, row-major.
    pub values: Vec<f64>,
    /// `ℓ¹` mass of `g` outside the truncation radius.
    pub tail_bound: f64,
    /// `‖g‖_{ℓ¹}` over the whole box.
    pub l1_norm: f64,
    pub sum: f64,
}

impl InverseKernel {
    fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    /// `g(ξ)`, zero beyond the truncation radius.
    pub fn get(&self, xi: &[i64]) -> f64 {
        if xi.iter().any(|c| c.abs() > self.radius) {
            return 0.0;
        }
        let side = self.side();
        let flat = xi
            .iter()
            .fold(0usize, |acc, &c| acc * side + (c + self.radius) as usize);
        self.values[flat]
    }

    /// Largest `|g|` on the shell `|ξ|_∞ = s`, for `s = 0..=R`.
    pub fn shell_maxima(&self) -> Vec<f64> {
        let side = self.side();
        let mut out = vec![0.0f64; self.radius as usize + 1];
        for (flat, &v) in self.values.iter().enumerate() {
            let mut rest = flat;
            let mut shell = 0;
            for _ in 0..self.dim {
                let c = (rest % side) as i64 - self.radius;
                rest /= side;
                shell = shell.max(c.abs());
            }
            out[shell as usize] = out[shell as usize].max(v.abs());
        }
        out
    }

    /// Whether the shell maxima decrease from shell `from` on.
    pub fn envelope_is_monotone(&self, from: usize) -> bool {
        let m = self.shell_maxima();
        m.windows(2).skip(from).all(|w| w[1] <= w[0])
    }

    /// `g ∗ f` with the truncated kernel, an alternative to the spectral solve.
    pub fn apply<T: Scalar>(&self, f: &LatticeFunction<T>) -> Result<LatticeFunction<T>> {
        if f.domain().dim() != self.dim {
            return Err(Error::InvalidParameter(
                "kernel and data dimensions differ".into(),
            ));
        }
        let dom = f.domain();
        let m = f.components();
        let side = self.side();
        let taps: Vec<(Vec<i64>, T)> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(flat, &v)| {
                let mut rest = flat;
                let mut xi = vec![0i64; self.dim];
                for slot in xi.iter_mut().rev() {
                    *slot = (rest % side) as i64 - self.radius;
                    rest /= side;
                }
                (xi, T::of(v))
            })
            .collect();
        let mut out = vec![T::zero(); dom.len() * m];
        for (i, site) in dom.sites().enumerate() {
            let mut src = vec![0i64; self.dim];
            for (xi, w) in &taps {
                for k in 0..self.dim {
                    src[k] = site[k] - xi[k];
                }
                for (c, &v) in f.get(&src).iter().enumerate() {
                    out[i * m + c] = out[i * m + c] + *w * v;
                }
            }
        }
        LatticeFunction::new(dom.clone(), m, out)
    }
}

/// Box extent used to approximate the infinite-lattice kernel.
fn kernel_box(dim: usize, radius: i64) -> usize {
    let floor = match dim {
        1 => 256,
        2 => 64,
        _ => 32,
    };
    floor.max(4 * radius as usize + 8)
}

/// Compute `g` on a large cube with the operator's basis and truncate.
///
/// Errors with `NonInvertible` when the multiplier has a zero mode.
pub fn inverse_kernel<T: Scalar>(
    op: &ConvolutionOperator<T>,
    radius: i64,
) -> Result<InverseKernel> {
    if radius < 0 {
        return Err(Error::InvalidParameter(format!(
            "kernel radius {radius} < 0"
        )));
    }
    let d = op.domain().dim();
    let n = kernel_box(d, radius);
    let dom = LatticeDomain::cube(d, n)?;
    let big = ConvolutionOperator::from_smoothed(op.smoothed().clone(), dom.clone())?;
    let origin = vec![0i64; d];
    let delta = LatticeFunction::from_scalar_fn(dom.clone(), |s| {
        if s == origin.as_slice() {
            T::one()
        } else {
            T::zero()
        }
    })?;
    let g = big.solve(&delta)?;
    let side = (2 * radius + 1) as usize;
    let mut values = vec![0.0f64; side.pow(d as u32)];
    let mut l1 = 0.0f64;
    let mut inside = 0.0f64;
    let mut sum = 0.0f64;
    for (i, site) in dom.sites().enumerate() {
        let c = dom.centered(&site);
        let v = g.at(i)[0].to_f64_lossy();
        l1 += v.abs();
        sum += v;
        if c.iter().all(|x| x.abs() <= radius) {
            let flat = c
                .iter()
                .fold(0usize, |acc, &x| acc * side + (x + radius) as usize);
            values[flat] = v;
            inside += v.abs();
        }
    }
    Ok(InverseKernel {
        dim: d,
        radius,
        box_extent: n,
        values,
        tail_bound: (l1 - inside).max(0.0),
        l1_norm: l1,
        sum,
    })
}
