use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A periodic box `Z^d / (N_1 Z × … × N_d Z)`.
///
/// Sites are stored row-major with the last axis fastest. Any integer site
/// is accepted by [`LatticeDomain::index`]; it is wrapped into the box.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDomain {
    extent: Vec<usize>,
}

impl LatticeDomain {
    pub fn new(extent: impl Into<Vec<usize>>) -> Result<Self> {
        let extent = extent.into();
        if !(1..=3).contains(&extent.len()) {
            return Err(Error::InvalidParameter(format!(
                "lattice dimension must be 1, 2 or 3, got {}",
                extent.len()
            )));
        }
        if let Some(axis) = extent.iter().position(|&n| n == 0) {
            return Err(Error::InvalidParameter(format!(
                "extent on axis {axis} is zero"
            )));
        }
        Ok(Self { extent })
    }

    /// Cube `[0, n)^dim`.
    pub fn cube(dim: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    /// Number of sites.
    pub fn len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Storage slot of an arbitrary integer site (periodic wrap).
    #[inline]
    pub fn index(&self, site: &[i64]) -> usize {
        debug_assert_eq!(site.len(), self.dim());
        let mut idx = 0usize;
        for (&s, &n) in site.iter().zip(&self.extent) {
            idx = idx * n + s.rem_euclid(n as i64) as usize;
        }
        idx
    }

    /// Canonical representative in `[0, N_1) × … × [0, N_d)` of a slot.
    pub fn site(&self, mut index: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.dim()];
        for axis in (0..self.dim()).rev() {
            let n = self.extent[axis];
            out[axis] = (index % n) as i64;
            index /= n;
        }
        out
    }

    /// Canonical sites in storage order.
    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.site(i))
    }

    /// Representative of `site` closest to the origin, each coordinate in
    /// `(-N/2, N/2]`.
    pub fn centered(&self, site: &[i64]) -> Vec<i64> {
        site.iter()
            .zip(&self.extent)
            .map(|(&s, &n)| {
                let n = n as i64;
                let r = s.rem_euclid(n);
                if 2 * r > n {
                    r - n
                } else {
                    r
                }
            })
            .collect()
    }

    /// Errors unless every extent is at least `required`.
    pub fn require_extent(&self, required: usize) -> Result<()> {
        for (axis, &n) in self.extent.iter().enumerate() {
            if n < required {
                return Err(Error::DomainTooSmall {
                    axis,
                    extent: n,
                    required,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::DomainMismatch {
                left: self.extent.clone(),
                right: other.extent.clone(),
            });
        }
        Ok(())
    }
}
