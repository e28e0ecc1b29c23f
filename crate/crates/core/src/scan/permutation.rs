use serde::{Deserialize, Serialize};

use super::ScanError;
use crate::Dims;

/// A bijection on the pixel indices `0..M·N`.
///
/// Applying the map gathers: `out[i] = pixels[forward[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationMap {
    forward: Vec<usize>,
    dims: Dims,
}

impl PermutationMap {
    pub fn new(forward: Vec<usize>, dims: Dims) -> Result<Self, ScanError> {
        let n = dims.0 * dims.1;
        if forward.len() != n {
            return Err(ScanError::Length {
                expected: n,
                got: forward.len(),
            });
        }
        let mut seen = vec![false; n];
        for &i in &forward {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(ScanError::NotBijective(i));
            }
        }
        Ok(PermutationMap { forward, dims })
    }

    pub(crate) fn from_trusted(forward: Vec<usize>, dims: Dims) -> Self {
        debug_assert!(PermutationMap::new(forward.clone(), dims).is_ok());
        PermutationMap { forward, dims }
    }

    pub fn identity(dims: Dims) -> Self {
        PermutationMap {
            forward: (0..dims.0 * dims.1).collect(),
            dims,
        }
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &f)| i == f)
    }

    pub fn inverse(&self) -> PermutationMap {
        let mut inv = vec![0; self.forward.len()];
        for (i, &f) in self.forward.iter().enumerate() {
            inv[f] = i;
        }
        PermutationMap {
            forward: inv,
            dims: self.dims,
        }
    }

    /// The map equivalent to applying `self` and then `next`.
    pub fn then(&self, next: &PermutationMap) -> PermutationMap {
        assert_eq!(self.len(), next.len(), "composing maps of different sizes");
        PermutationMap {
            forward: next.forward.iter().map(|&j| self.forward[j]).collect(),
            dims: self.dims,
        }
    }

    /// `self` applied `k` times.
    pub fn power(&self, k: usize) -> PermutationMap {
        let mut out = PermutationMap::identity(self.dims);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        out
    }

    pub fn apply<T: Copy>(&self, data: &[T]) -> Result<Vec<T>, ScanError> {
        self.check_len(data.len())?;
        Ok(self.forward.iter().map(|&i| data[i]).collect())
    }

    /// Undoes [`PermutationMap::apply`] without materialising the inverse.
    pub fn apply_inverse<T: Copy + Default>(&self, data: &[T]) -> Result<Vec<T>, ScanError> {
        self.check_len(data.len())?;
        let mut out = vec![T::default(); data.len()];
        for (&f, &v) in self.forward.iter().zip(data) {
            out[f] = v;
        }
        Ok(out)
    }

    fn check_len(&self, got: usize) -> Result<(), ScanError> {
        if got == self.forward.len() {
            Ok(())
        } else {
            Err(ScanError::Length {
                expected: self.forward.len(),
                got,
            })
        }
    }
}

pub fn apply_permutation<T: Copy>(pixels: &[T], p: &PermutationMap) -> Result<Vec<T>, ScanError> {
    p.apply(pixels)
}

pub fn invert_permutation(p: &PermutationMap) -> PermutationMap {
    p.inverse()
}
