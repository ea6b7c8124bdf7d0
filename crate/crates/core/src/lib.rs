//! Continuous interpolants and quasi-interpolants of functions on the
//! integer lattice `Z^d` (`d ≤ 3`).
//!
//! * [`basis`] — nodal basis functions `ζ̄` (Q1, P1, an extended hat,
//!   user-defined), the smoothed basis `ζ̃ = ζ̄ ∗ ζ̄`, assumption audits.
//! * [`interp`] — the fields `ū`, `ũ`, their derivatives and `L^p` norms.
//! * [`convop`] — the convolution operator `𝒞`, its multiplier and inverse,
//!   and the smooth nodal interpolant `Ĩ`.
//! * [`quasi`] — the dual basis `ζ̃*`, the quasi-interpolant `J̃` and cubic
//!   reproduction.
//! * [`lattice`] — lattice functions on periodic boxes.
//!
//! Everything is generic over the scalar type ([`Scalar`]: `f32` or `f64`);
//! the `*64` / `*32` aliases below fix it.

pub mod basis;
pub mod convop;
pub mod error;
pub mod interp;
pub mod lattice;
pub mod quadrature;
pub mod quasi;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type LatticeFunction64 = lattice::LatticeFunction<f64>;
pub type NodalBasis64 = basis::NodalBasis<f64>;
pub type SmoothedBasis64 = basis::SmoothedBasis<f64>;
pub type InterpolantField64 = interp::InterpolantField<f64>;
pub type ConvolutionOperator64 = convop::ConvolutionOperator<f64>;
pub type DualBasis64 = quasi::DualBasis<f64>;
pub type Polynomial64 = quasi::Polynomial<f64>;

pub type LatticeFunction32 = lattice::LatticeFunction<f32>;
pub type NodalBasis32 = basis::NodalBasis<f32>;
pub type SmoothedBasis32 = basis::SmoothedBasis<f32>;
pub type InterpolantField32 = interp::InterpolantField<f32>;
pub type ConvolutionOperator32 = convop::ConvolutionOperator<f32>;
