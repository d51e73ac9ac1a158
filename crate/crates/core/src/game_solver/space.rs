use serde::Serialize;

use crate::error::{Error, Result};

/// A finite set of loss vectors in `[0, 1]^N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteLossSpace {
    n: usize,
    vectors: Vec<Vec<f64>>,
    symmetric: bool,
}

impl FiniteLossSpace {
    /// Validates and deduplicates `vectors`; records whether the set is closed
    /// under permutations of the actions.
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let n = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::domain("empty loss space"))?;
        if n < 2 {
            return Err(Error::domain("loss vectors need at least two actions"));
        }
        let mut uniq: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != n || v.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::domain(format!(
                    "loss vector {v:?} is not in [0,1]^{n}"
                )));
            }
            if !uniq.contains(&v) {
                uniq.push(v);
            }
        }
        let symmetric = (0..n - 1).all(|i| {
            uniq.iter().all(|v| {
                let mut w = v.clone();
                w.swap(i, i + 1);
                uniq.contains(&w)
            })
        });
        Ok(FiniteLossSpace {
            n,
            vectors: uniq,
            symmetric,
        })
    }

    /// `{e_1, ..., e_N}`.
    pub fn basis(n: usize) -> Self {
        Self::new((0..n).map(|i| unit(n, i)).collect()).expect("valid basis space")
    }

    /// `{0, 1}^N`.
    pub fn binary(n: usize) -> Self {
        let vectors = (0..1u32 << n)
            .map(|mask| (0..n).map(|i| f64::from((mask >> i) & 1)).collect())
            .collect();
        Self::new(vectors).expect("valid binary space")
    }

    /// `{1 - e_1, ..., 1 - e_N}`.
    pub fn complemented_basis(n: usize) -> Self {
        Self::new(
            (0..n)
                .map(|i| unit(n, i).iter().map(|x| 1.0 - x).collect())
                .collect(),
        )
        .expect("valid complemented basis")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        self.vectors.iter().any(|v| v.as_slice() == z)
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_spaces() {
        assert_eq!(FiniteLossSpace::basis(3).len(), 3);
        assert_eq!(FiniteLossSpace::binary(3).len(), 8);
        let c = FiniteLossSpace::complemented_basis(3);
        assert!(c.contains(&[0.0, 1.0, 1.0]));
        assert!(c.is_symmetric());
    }

    #[test]
    fn symmetry_detection_and_validation() {
        let s = FiniteLossSpace::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(!s.is_symmetric());
        assert!(FiniteLossSpace::new(vec![vec![1.5, 0.0]]).is_err());
        assert!(FiniteLossSpace::new(vec![]).is_err());
        let dup = FiniteLossSpace::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(dup.len(), 1);
    }
}
