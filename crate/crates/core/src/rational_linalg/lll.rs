//! Exact LLL reduction of a positive definite quadratic form.
//!
//! Works on the Gram matrix directly so it applies equally to a lattice and
//! to the projection of a lattice onto the orthogonal complement of a
//! sublattice.

use num_traits::{One, Zero};

use super::matrix::{IntMatrix, RatMatrix};
use crate::rat::{rat, round_half_up, Int, Rat};

/// Gram–Schmidt data of a Gram matrix: `mu[i][j]` for `j < i` and the squared
/// lengths of the orthogonalised vectors.
#[derive(Debug, Clone)]
pub struct Gso {
    pub mu: RatMatrix,
    pub bstar: Vec<Rat>,
}

pub fn gso(g: &RatMatrix) -> Gso {
    let n = g.rows();
    let mut mu = RatMatrix::zeros(n, n);
    let mut bstar: Vec<Rat> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..i {
            let mut s = g[(i, j)].clone();
            for l in 0..j {
                if !mu[(j, l)].is_zero() && !mu[(i, l)].is_zero() {
                    s -= &mu[(j, l)] * &mu[(i, l)] * &bstar[l];
                }
            }
            mu[(i, j)] = s / &bstar[j];
        }
        let mut b = g[(i, i)].clone();
        for l in 0..i {
            if !mu[(i, l)].is_zero() {
                b -= &mu[(i, l)] * &mu[(i, l)] * &bstar[l];
            }
        }
        assert!(b > Rat::zero(), "quadratic form is not positive definite");
        bstar.push(b);
        mu[(i, i)] = Rat::one();
    }
    Gso { mu, bstar }
}

/// Result of reducing a Gram matrix: `gram = t * original * t^T`.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub gram: RatMatrix,
    pub t: IntMatrix,
}

fn sub_row_col(g: &mut RatMatrix, k: usize, j: usize, q: &Rat) {
    // basis b_k <- b_k - q b_j
    let n = g.rows();
    for c in 0..n {
        let t = q * &g[(j, c)];
        g[(k, c)] -= t;
    }
    for r in 0..n {
        let t = q * &g[(r, j)];
        g[(r, k)] -= t;
    }
}

fn swap_row_col(g: &mut RatMatrix, a: usize, b: usize) {
    g.swap_rows(a, b);
    for r in 0..g.rows() {
        let x = g[(r, a)].clone();
        g[(r, a)] = g[(r, b)].clone();
        g[(r, b)] = x;
    }
}

/// LLL with parameter 3/4.
pub fn lll_gram(g: &RatMatrix) -> Reduced {
    let n = g.rows();
    let mut g = g.clone();
    let mut t = IntMatrix::identity(n);
    let delta = rat(3, 4);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let mu = gso(&g).mu[(k, j)].clone();
            let q: Int = round_half_up(&mu);
            if q.is_zero() {
                continue;
            }
            sub_row_col(&mut g, k, j, &Rat::from_integer(q.clone()));
            for c in 0..n {
                let x = &q * &t[(j, c)];
                t[(k, c)] -= x;
            }
        }
        let d = gso(&g);
        let m = &d.mu[(k, k - 1)];
        if d.bstar[k] >= (&delta - m * m) * &d.bstar[k - 1] {
            k += 1;
        } else {
            swap_row_col(&mut g, k, k - 1);
            t.swap_rows(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Reduced { gram: g, t }
}
