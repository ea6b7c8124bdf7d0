use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

/// Separable N-dimensional complex FFT on row-major data. Forward is
/// unnormalized; `inverse` scales by `1/N`.
#[derive(Clone)]
pub(crate) struct FftNd<T: Scalar> {
    extent: Vec<usize>,
    forward: Vec<Arc<dyn Fft<T>>>,
    inverse: Vec<Arc<dyn Fft<T>>>,
}

impl<T: Scalar> std::fmt::Debug for FftNd<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftNd")
            .field("extent", &self.extent)
            .finish()
    }
}

impl<T: Scalar> FftNd<T> {
    pub fn new(extent: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            extent: extent.to_vec(),
            forward: extent
                .iter()
                .map(|&n| planner.plan_fft_forward(n))
                .collect(),
            inverse: extent
                .iter()
                .map(|&n| planner.plan_fft_inverse(n))
                .collect(),
        }
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.inverse);
        let scale = T::one() / T::of_usize(data.len());
        for v in data.iter_mut() {
            *v = *v * scale;
        }
    }

    fn run(&self, data: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>]) {
        let d = self.extent.len();
        let total: usize = self.extent.iter().product();
        debug_assert_eq!(data.len(), total);
        for axis in 0..d {
            let n = self.extent[axis];
            let stride: usize = self.extent[axis + 1..].iter().product();
            let plan = &plans[axis];
            let mut scratch =
                vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
            if stride == 1 {
                // Lines are contiguous.
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let mut line = vec![Complex::new(T::zero(), T::zero()); n];
            let outer = total / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for (k, l) in line.iter_mut().enumerate() {
                        *l = data[base + k * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (k, l) in line.iter().enumerate() {
                        data[base + k * stride] = *l;
                    }
                }
            }
        }
    }
}
