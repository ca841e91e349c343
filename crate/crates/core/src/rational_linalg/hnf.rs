//! Hermite normal form and the saturation/kernels built from it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::elimination::inverse;
use super::matrix::IntMatrix;
use crate::rat::Int;

/// Row-style Hermite normal form `h = u * m` together with the unimodular
/// transform `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Column index of each pivot, one per non-zero row of `h`.
    pub pivots: Vec<usize>,
}

impl Hnf {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn combine_rows(m: &mut IntMatrix, r: usize, i: usize, coeffs: [&Int; 4]) {
    // (row r, row i) <- (a*r + b*i, c*r + d*i)
    let [a, b, c, d] = coeffs;
    for j in 0..m.cols() {
        let x = m[(r, j)].clone();
        let y = m[(i, j)].clone();
        m[(r, j)] = a * &x + b * &y;
        m[(i, j)] = c * &x + d * &y;
    }
}

fn sub_multiple(m: &mut IntMatrix, target: usize, src: usize, q: &Int) {
    for j in 0..m.cols() {
        let t = q * &m[(src, j)];
        m[(target, j)] -= t;
    }
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in m.row_mut(r) {
        *x = -x.clone();
    }
}

/// Hermite normal form: row echelon, positive pivots, entries above each pivot
/// reduced into `[0, pivot)`, zero rows last.
pub fn hnf(m: &IntMatrix) -> Hnf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[(i, c)].is_zero() {
                continue;
            }
            let (p, q) = (h[(r, c)].clone(), h[(i, c)].clone());
            let eg = p.extended_gcd(&q);
            let (a, b) = (&p / &eg.gcd, &q / &eg.gcd);
            let coeffs = [&eg.x, &eg.y, &-b, &a];
            combine_rows(&mut h, r, i, coeffs);
            combine_rows(&mut u, r, i, coeffs);
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let p = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&p);
            if !q.is_zero() {
                sub_multiple(&mut h, i, r, &q);
                sub_multiple(&mut u, i, r, &q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Hnf { h, u, pivots }
}

/// The non-zero rows of the Hermite normal form.
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    let f = hnf(m);
    f.h.select_rows(0..f.rank())
}

/// Basis (as rows) of the integer right kernel `{x in Z^cols : m x = 0}`.
/// Integer kernels are always saturated.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let t = m.transpose();
    let f = hnf(&t);
    let r = f.rank();
    f.u.select_rows(r..t.rows())
}

/// Basis of `(Q-span of rows of m) ∩ Z^cols`, in Hermite normal form.
pub fn saturate(m: &IntMatrix) -> IntMatrix {
    let cols = m.cols();
    if m.rows() == 0 || m.is_zero() {
        return IntMatrix::zeros(0, cols);
    }
    let k = integer_kernel(m);
    let s = if k.rows() == 0 { IntMatrix::identity(cols) } else { integer_kernel(&k) };
    hnf_basis(&s)
}

pub fn is_saturated(m: &IntMatrix) -> bool {
    hnf_basis(m) == saturate(m)
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    inverse(&m.to_rat())?.to_int()
}

/// Extends the rows of a saturated full-rank `b x n` matrix to a basis of
/// `Z^n`; returns the `(n-b) x n` completing rows.
pub fn unimodular_completion(basis: &IntMatrix) -> IntMatrix {
    let n = basis.cols();
    let b = basis.rows();
    if b == 0 {
        return IntMatrix::identity(n);
    }
    // u * basis^T = [t; 0] with t a unimodular b x b block when basis is saturated
    let f = hnf(&basis.transpose());
    assert_eq!(f.rank(), b, "completion of a rank-deficient basis");
    let v = unimodular_inverse(&f.u).expect("hnf transform is unimodular").transpose();
    v.select_rows(b..n)
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a Int>) -> Int {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides a row by the gcd of its entries and normalises the sign of the
/// first non-zero entry to be positive.
pub fn primitive_row(v: &[Int]) -> Vec<Int> {
    let g = gcd_all(v);
    if g.is_zero() {
        return v.to_vec();
    }
    let mut out: Vec<Int> = v.iter().map(|x| x / &g).collect();
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        out.iter_mut().for_each(|x| *x = -x.clone());
    }
    out
}

pub fn is_unimodular(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && super::elimination::det(&m.to_rat()).abs().is_one()
}
