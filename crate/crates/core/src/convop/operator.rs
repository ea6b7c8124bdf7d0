use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::basis::{NodalBasis, SmoothedBasis};
use crate::error::{Error, Result};
use crate::interp::InterpolantField;
use crate::lattice::{LatticeDomain, LatticeFunction};
use crate::scalar::Scalar;

use super::fft::FftNd;

/// Multipliers at or below this are treated as zero modes by [`ConvolutionOperator::solve`].
pub const MIN_MULTIPLIER_TOL: f64 = 1e-10;

/// The lattice operator `(𝒞u)(ξ) = ũ(ξ) = Σ_η m(ξ − η) u(η)` on a periodic
/// box, with stencil `m(δ) = ζ̃(δ)` and its DFT multiplier `m̂`.
///
/// Immutable after construction; `apply` and `solve` allocate their own
/// work buffers and can run concurrently on a shared operator.
#[derive(Clone, Debug)]
pub struct ConvolutionOperator<T: Scalar> {
    domain: LatticeDomain,
    smoothed: Arc<SmoothedBasis<T>>,
    stencil: Vec<(Vec<i64>, T)>,
    radius: i64,
    multiplier: Vec<T>,
    min_multiplier: T,
    fft: FftNd<T>,
}

impl<T: Scalar> ConvolutionOperator<T> {
    /// Build `𝒞` for `basis` on `domain`.
    ///
    /// Stencil entries are `ζ̃` at lattice points, evaluated by the smoothed
    /// basis backend (exact piecewise integration). Errors with
    /// `DomainTooSmall` if the stencil would wrap onto itself.
    pub fn new(basis: &NodalBasis<T>, domain: LatticeDomain) -> Result<Self> {
        Self::from_smoothed(Arc::new(SmoothedBasis::new(basis.clone())), domain)
    }

    pub fn from_smoothed(smoothed: Arc<SmoothedBasis<T>>, domain: LatticeDomain) -> Result<Self> {
        let d = smoothed.dim();
        if domain.dim() != d {
            return Err(Error::InvalidParameter(format!(
                "{d}-dimensional basis on a {}-dimensional domain",
                domain.dim()
            )));
        }
        let reach = smoothed.support_cells() - 1;
        domain.require_extent((2 * reach + 1) as usize)?;

        let side = (2 * reach + 1) as usize;
        let mut stencil = Vec::new();
        let mut radius = 0;
        for mut flat in 0..side.pow(d as u32) {
            let mut delta = vec![0i64; d];
            for slot in delta.iter_mut().rev() {
                *slot = (flat % side) as i64 - reach;
                flat /= side;
            }
            let x: Vec<T> = delta.iter().map(|&v| T::of_i64(v)).collect();
            let v = smoothed.value(&x);
            if v != T::zero() {
                radius = radius.max(delta.iter().map(|c| c.abs()).max().unwrap_or(0));
                stencil.push((delta, v));
            }
        }
        // Enforce the exact symmetry m(δ) = m(−δ) the theory relies on.
        let lookup: std::collections::HashMap<Vec<i64>, T> = stencil.iter().cloned().collect();
        for (delta, v) in stencil.iter_mut() {
            let neg: Vec<i64> = delta.iter().map(|c| -c).collect();
            if let Some(&w) = lookup.get(&neg) {
                *v = (*v + w) * T::of(0.5);
            }
        }

        let fft = FftNd::new(domain.extent());
        let mut spectrum = vec![Complex::new(T::zero(), T::zero()); domain.len()];
        for (delta, v) in &stencil {
            let idx = domain.index(delta);
            spectrum[idx].re = spectrum[idx].re + *v;
        }
        fft.forward(&mut spectrum);
        // Real by symmetry of the stencil; average k and −k to remove round-off.
        let mut multiplier = vec![T::zero(); domain.len()];
        for (i, m) in multiplier.iter_mut().enumerate() {
            let k = domain.site(i);
            let neg: Vec<i64> = k.iter().map(|c| -c).collect();
            let j = domain.index(&neg);
            *m = (spectrum[i].re + spectrum[j].re) * T::of(0.5);
        }
        let min_multiplier = multiplier.iter().copied().fold(T::infinity(), T::min);
        Ok(Self {
            domain,
            smoothed,
            stencil,
            radius,
            multiplier,
            min_multiplier,
            fft,
        })
    }

    pub fn domain(&self) -> &LatticeDomain {
        &self.domain
    }

    pub fn smoothed(&self) -> &Arc<SmoothedBasis<T>> {
        &self.smoothed
    }

    /// Non-zero stencil entries `(δ, m(δ))`.
    pub fn stencil(&self) -> &[(Vec<i64>, T)] {
        &self.stencil
    }

    pub fn stencil_at(&self, delta: &[i64]) -> T {
        self.stencil
            .iter()
            .find(|(d, _)| d.as_slice() == delta)
            .map_or(T::zero(), |(_, v)| *v)
    }

    /// Largest `|δ|_∞` with `m(δ) ≠ 0`.
    pub fn stencil_radius(&self) -> i64 {
        self.radius
    }

    /// `m̂(k)` for every frequency `k` of the DFT grid, in storage order.
    pub fn multiplier(&self) -> &[T] {
        &self.multiplier
    }

    pub fn min_multiplier(&self) -> T {
        self.min_multiplier
    }

    pub fn is_invertible(&self) -> bool {
        self.min_multiplier > T::of(MIN_MULTIPLIER_TOL)
    }

    /// `𝒞u` by direct periodic stencil convolution, componentwise.
    pub fn apply(&self, u: &LatticeFunction<T>) -> Result<LatticeFunction<T>> {
        self.domain.ensure_same(u.domain())?;
        let m = u.components();
        let n = self.domain.len();
        let blocks: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let site = self.domain.site(i);
                let mut acc = vec![T::zero(); m];
                let mut src = vec![0i64; site.len()];
                for (delta, w) in &self.stencil {
                    for k in 0..site.len() {
                        src[k] = site[k] - delta[k];
                    }
                    for (a, &v) in acc.iter_mut().zip(u.get(&src)) {
                        *a = *a + *w * v;
                    }
                }
                acc
            })
            .collect();
        LatticeFunction::new(self.domain.clone(), m, blocks.concat())
    }

    /// `𝒞⁻¹f` by division in Fourier space.
    pub fn solve(&self, f: &LatticeFunction<T>) -> Result<LatticeFunction<T>> {
        self.spectral(f, -1)
    }

    /// `𝒞f` through the multiplier (used to cross-check `apply`).
    pub fn apply_spectral(&self, f: &LatticeFunction<T>) -> Result<LatticeFunction<T>> {
        self.spectral(f, 1)
    }

    fn spectral(&self, f: &LatticeFunction<T>, power: i32) -> Result<LatticeFunction<T>> {
        self.domain.ensure_same(f.domain())?;
        if power < 0 && !self.is_invertible() {
            return Err(Error::NonInvertible {
                min_multiplier: self.min_multiplier.to_f64_lossy(),
            });
        }
        let m = f.components();
        let n = self.domain.len();
        let mut out = vec![T::zero(); n * m];
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        for c in 0..m {
            for (i, b) in buf.iter_mut().enumerate() {
                *b = Complex::new(f.at(i)[c], T::zero());
            }
            self.fft.forward(&mut buf);
            for (b, &mh) in buf.iter_mut().zip(&self.multiplier) {
                *b = if power < 0 { *b / mh } else { *b * mh };
            }
            self.fft.inverse(&mut buf);
            for (i, b) in buf.iter().enumerate() {
                out[i * m + c] = b.re;
            }
        }
        LatticeFunction::new(self.domain.clone(), m, out)
    }
}

/// `Ĩu = (𝒞⁻¹u)~`: the smooth field interpolating `u` at the lattice sites.
pub fn smooth_nodal_interpolant<T: Scalar>(
    op: &ConvolutionOperator<T>,
    u: &LatticeFunction<T>,
) -> Result<InterpolantField<T>> {
    let coefficients = op.solve(u)?;
    InterpolantField::tilde(coefficients, op.smoothed().clone())
}
