#![allow(dead_code)]

use nondiv_core::rat::{rat, Int, Rat};
use num_traits::{One, Zero};

/// Cofactor expansion along the first row.
pub fn laplace_det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut total = Rat::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rat>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * laplace_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Sum of squares of all maximal minors of the `k × n` matrix `rows`.
pub fn cauchy_binet(rows: &[Vec<Rat>]) -> Rat {
    let k = rows.len();
    let n = rows[0].len();
    combinations(n, k)
        .into_iter()
        .map(|cols| {
            let sub: Vec<Vec<Rat>> = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
            let d = laplace_det(&sub);
            &d * &d
        })
        .fold(Rat::zero(), |a, b| a + b)
}

pub fn sq(v: &[Rat]) -> Rat {
    v.iter().map(|x| x * x).fold(Rat::zero(), |a, b| a + b)
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn rats(v: &[(i64, i64)]) -> Vec<Rat> {
    v.iter().map(|&(p, q)| rat(p, q)).collect()
}

/// All integer vectors in `[-r, r]^n`.
pub fn box_vectors(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}
