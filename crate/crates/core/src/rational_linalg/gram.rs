use num_traits::Zero;

use super::elimination::det;
use super::matrix::{dot, RatMatrix};
use super::LinalgError;
use crate::rat::Rat;

/// Gram matrix `G_ij = <v_i, v_j>` of a list of vectors.
pub fn gram_matrix(vectors: &[Vec<Rat>]) -> RatMatrix {
    let k = vectors.len();
    let mut g = RatMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let d = dot(&vectors[i], &vectors[j]);
            g[(j, i)] = d.clone();
            g[(i, j)] = d;
        }
    }
    g
}

/// Squared norm of the pure wedge `v_1 ∧ ... ∧ v_k`, i.e. the determinant of
/// the Gram matrix.
pub fn gram_det(vectors: &[Vec<Rat>]) -> Result<Rat, LinalgError> {
    if vectors.is_empty() {
        return Err(LinalgError::Empty);
    }
    let d = det(&gram_matrix(vectors));
    if d.is_zero() {
        Err(LinalgError::DependentVectors)
    } else {
        Ok(d)
    }
}

/// `rows * g * rows^T` for an integer (or rational) coordinate matrix and a
/// Gram matrix `g`.
pub fn congruence(rows: &RatMatrix, g: &RatMatrix) -> RatMatrix {
    &(rows * g) * &rows.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn v(xs: &[Rat]) -> Vec<Rat> {
        xs.to_vec()
    }

    #[test]
    fn examples() {
        let (o, l) = (rat_int(0), rat_int(1));
        let e1 = v(&[l.clone(), o.clone(), o.clone()]);
        let e2 = v(&[o.clone(), l.clone(), o.clone()]);
        assert_eq!(gram_det(&[e1, e2]).unwrap(), rat_int(1));

        // hand expansion: det [[2,1],[1,2]] = 3
        let a = v(&[l.clone(), l.clone(), o.clone()]);
        let b = v(&[o.clone(), l.clone(), l.clone()]);
        assert_eq!(gram_det(&[a.clone(), b]).unwrap(), rat_int(3));

        let c = v(&[rat_int(2), o.clone()]);
        let d = v(&[o.clone(), rat(1, 2)]);
        assert_eq!(gram_det(&[c, d]).unwrap(), rat_int(1));

        assert_eq!(gram_det(&[a.clone(), a]), Err(LinalgError::DependentVectors));
    }
}
