use crate::error::Result;
use crate::lattice::LatticeFunction;
use crate::scalar::Scalar;

/// Marker for operations that only see the equivalence class
/// `[u] = { u + t : t ∈ R^m constant }`.
///
/// Implementors promise `apply(u) == apply(u + t)`; the quotient by
/// translations is kept implicit and no representative is ever chosen.
pub trait TranslationInvariant<T: Scalar> {
    type Output;

    fn apply(&self, u: &LatticeFunction<T>) -> Result<Self::Output>;
}

/// Maximum deviation `|apply(u) - apply(u + t)|` for scalar-valued
/// invariant operations.
pub fn translation_defect<T, Op>(op: &Op, u: &LatticeFunction<T>, t: &[T]) -> Result<T>
where
    T: Scalar,
    Op: TranslationInvariant<T, Output = T>,
{
    let a = op.apply(u)?;
    let b = op.apply(&u.translate(t)?)?;
    Ok((a - b).abs())
}

/// The periodic forward difference along one axis.
#[derive(Clone, Copy, Debug)]
pub struct ForwardDifference {
    pub axis: usize,
}

impl<T: Scalar> TranslationInvariant<T> for ForwardDifference {
    type Output = LatticeFunction<T>;

    fn apply(&self, u: &LatticeFunction<T>) -> Result<LatticeFunction<T>> {
        u.forward_difference(self.axis)
    }
}

/// `ℓ^p` norm of the discrete gradient `(D_1 u, …, D_d u)`.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteGradientNorm {
    pub p: f64,
}

impl<T: Scalar> TranslationInvariant<T> for DiscreteGradientNorm {
    type Output = T;

    fn apply(&self, u: &LatticeFunction<T>) -> Result<T> {
        let d = u.domain().dim();
        let parts: Vec<_> = (0..d)
            .map(|k| u.forward_difference(k))
            .collect::<Result<_>>()?;
        let m = u.components();
        let mut values = Vec::with_capacity(u.values().len() * d);
        for i in 0..u.domain().len() {
            for part in &parts {
                values.extend_from_slice(&part.values()[i * m..(i + 1) * m]);
            }
        }
        LatticeFunction::new(u.domain().clone(), m * d, values)?.lp_norm(self.p)
    }
}
