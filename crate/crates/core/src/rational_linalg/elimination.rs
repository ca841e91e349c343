//! Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use super::matrix::RatMatrix;
use crate::rat::Rat;

/// Reduced row echelon form, keeping only the non-zero rows. Two matrices have
/// the same row space over Q iff their reduced forms are equal.
pub fn rref(m: &RatMatrix) -> RatMatrix {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a[(r, c)].recip();
        for j in c..cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let t = &f * &a[(r, j)];
                a[(i, j)] -= t;
            }
        }
        r += 1;
    }
    a.select_rows(0..r)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).rows()
}

pub fn det(m: &RatMatrix) -> Rat {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap_rows(p, c);
            d = -d;
        }
        let piv = a[(c, c)].clone();
        d *= &piv;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &piv;
            for j in c..n {
                let t = &f * &a[(c, j)];
                a[(i, j)] -= t;
            }
        }
    }
    d
}

pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut aug = RatMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = Rat::one();
    }
    let red = rref(&aug);
    if red.rows() < n || (0..n).any(|i| red[(i, i)] != Rat::one()) {
        return None;
    }
    Some(RatMatrix::from_fn(n, n, |i, j| red[(i, n + j)].clone()))
}

/// Reduces `v` against the rows of a matrix already in reduced row echelon
/// form; the result is zero iff `v` lies in its row space.
pub fn reduce_against(echelon: &RatMatrix, v: &[Rat]) -> Vec<Rat> {
    let mut out = v.to_vec();
    for r in echelon.iter_rows() {
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if out[p].is_zero() {
            continue;
        }
        let f = out[p].clone();
        for (o, x) in out.iter_mut().zip(r) {
            if !x.is_zero() {
                *o -= &f * x;
            }
        }
    }
    out
}

pub fn in_row_space(echelon: &RatMatrix, v: &[Rat]) -> bool {
    reduce_against(echelon, v).iter().all(Zero::is_zero)
}

/// Whether the symmetric matrix `s` is positive semidefinite, by checking
/// every principal minor. Intended for small matrices.
pub fn is_psd(s: &RatMatrix) -> bool {
    let n = s.rows();
    assert!(n <= 16);
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub = RatMatrix::from_fn(idx.len(), idx.len(), |i, j| s[(idx[i], idx[j])].clone());
        det(&sub) >= Rat::zero()
    })
}
