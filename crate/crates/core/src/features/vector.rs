use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Identifies the ordered feature list a vector was built against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceId(pub u64);

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl std::str::FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        u64::from_str_radix(s, 16)
            .map(SpaceId)
            .map_err(|_| Error::format("space id", format!("`{s}` is not 16 hex digits")))
    }
}

/// Sparse vector of `(position, weight)` pairs with strictly increasing
/// positions and no stored zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SparseVector<F: Scalar> {
    entries: Vec<(usize, F)>,
    space: Option<SpaceId>,
}

impl<F: Scalar> Default for SparseVector<F> {
    fn default() -> Self {
        SparseVector {
            entries: Vec::new(),
            space: None,
        }
    }
}

impl<F: Scalar> SparseVector<F> {
    /// Builds a vector from sorted entries; zero weights are dropped.
    pub fn new(entries: Vec<(usize, F)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid(
                "entries",
                "positions must be strictly increasing",
            ));
        }
        if entries.iter().any(|(_, w)| !w.is_finite()) {
            return Err(Error::invalid("entries", "weights must be finite"));
        }
        Ok(SparseVector {
            entries: entries.into_iter().filter(|(_, w)| !w.is_zero()).collect(),
            space: None,
        })
    }

    pub fn from_dense(values: &[F]) -> Self {
        SparseVector {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, &v)| (i, v))
                .collect(),
            space: None,
        }
    }

    pub fn with_space(mut self, space: SpaceId) -> Self {
        self.space = Some(space);
        self
    }

    pub fn space(&self) -> Option<SpaceId> {
        self.space
    }

    pub fn entries(&self) -> &[(usize, F)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// One past the largest stored position.
    pub fn extent(&self) -> usize {
        self.entries.last().map_or(0, |&(p, _)| p + 1)
    }

    pub fn dot(&self, other: &Self) -> F {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut sum = F::zero();
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum = sum + a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        sum
    }

    pub fn squared_norm(&self) -> F {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn norm(&self) -> F {
        self.squared_norm().sqrt()
    }

    pub fn squared_distance(&self, other: &Self) -> F {
        let d = self.squared_norm() + other.squared_norm() - F::lit(2.0) * self.dot(other);
        d.max(F::zero())
    }

    /// Dense copy of length `dim`; entries at or past `dim` are ignored.
    pub fn to_dense(&self, dim: usize) -> Vec<F> {
        let mut out = vec![F::zero(); dim];
        for &(p, w) in &self.entries {
            if p < dim {
                out[p] = w;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_distance() {
        let a = SparseVector::new(vec![(0, 1.0), (3, 2.0)]).unwrap();
        let b = SparseVector::new(vec![(1, 5.0), (3, -1.0)]).unwrap();
        assert_eq!(a.dot(&b), -2.0);
        assert_eq!(a.squared_distance(&b), 1.0 + 25.0 + 9.0);
        assert_eq!(a.extent(), 4);
        assert_eq!(a.to_dense(4), vec![1.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn rejects_unsorted_and_drops_zeros() {
        assert!(SparseVector::new(vec![(2, 1.0_f64), (2, 1.0)]).is_err());
        assert!(SparseVector::new(vec![(3, 1.0_f64), (1, 1.0)]).is_err());
        let v = SparseVector::new(vec![(0, 0.0_f64), (1, 1.0)]).unwrap();
        assert_eq!(v.entries(), &[(1, 1.0)]);
    }

    #[test]
    fn space_id_text() {
        let id = SpaceId(0xdead_beef);
        assert_eq!(id.to_string(), "00000000deadbeef");
        assert_eq!("00000000deadbeef".parse::<SpaceId>().unwrap(), id);
    }
}
