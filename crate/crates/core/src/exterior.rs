//! Pure wedges and how block-scalar torus elements stretch them.

use num_traits::One;

use crate::lattice_space::TorusElement;
use crate::rat::Rat;
use crate::rational_linalg::{gram_det, rref, LinalgError, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExteriorError {
    #[error("degree {k} out of range 1..={n}")]
    DegreeOutOfRange { k: usize, n: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `v = v_1 ∧ ... ∧ v_k` for independent rational vectors, with `‖v‖²` cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureWedge {
    vectors: Vec<Vec<Rat>>,
    sq_norm: Rat,
}

impl PureWedge {
    pub fn new(vectors: Vec<Vec<Rat>>) -> Result<Self, ExteriorError> {
        let sq_norm = gram_det(&vectors)?;
        Ok(PureWedge { vectors, sq_norm })
    }

    pub fn degree(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Rat>] {
        &self.vectors
    }

    pub fn sq_norm(&self) -> &Rat {
        &self.sq_norm
    }

    /// Reduced echelon basis of the span `L_v`.
    pub fn span(&self) -> RatMatrix {
        let n = self.vectors[0].len();
        rref(&RatMatrix::from_rows(n, self.vectors.iter().cloned()))
    }

    /// `s · v`, the wedge of the scaled spanning vectors.
    pub fn apply(&self, s: &TorusElement) -> PureWedge {
        let scaled: Vec<Vec<Rat>> = self.vectors.iter().map(|v| s.apply_vector(v)).collect();
        PureWedge::new(scaled).expect("torus elements are invertible")
    }
}

/// Smallest and largest factor by which `s` can multiply the norm of a
/// degree-`k` pure wedge: products of the `k` smallest and `k` largest
/// diagonal entries of `s`, counted with multiplicity.
pub fn wedge_scaling_range(s: &TorusElement, k: usize) -> Result<(Rat, Rat), ExteriorError> {
    let mut d = s.diagonal();
    let n = d.len();
    if k == 0 || k > n {
        return Err(ExteriorError::DegreeOutOfRange { k, n });
    }
    d.sort();
    let lo = d[..k].iter().fold(Rat::one(), |acc, x| acc * x);
    let hi = d[n - k..].iter().fold(Rat::one(), |acc, x| acc * x);
    Ok((lo, hi))
}

/// `C_1(s) = max_k 1 / min_factor(s, k)`: `‖s·v‖ >= ‖v‖ / C_1` for every pure
/// wedge `v`.
pub fn contraction_constant(s: &TorusElement) -> Rat {
    let n = s.diagonal().len();
    (1..=n)
        .map(|k| wedge_scaling_range(s, k).expect("k in range").0.recip())
        .max()
        .expect("n >= 1")
}
