//! Exact Fincke–Pohst enumeration on a positive definite Gram matrix.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::EnumerationError;
use crate::rat::{ceil_sub_sqrt, floor_add_sqrt, Int, Rat};
use crate::rational_linalg::{gso, lll_gram, RatMatrix};

/// A lattice vector in the coordinates of the input Gram matrix, with its
/// exact squared length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortVector {
    pub coords: Vec<Int>,
    pub norm_sq: Rat,
}

struct Walk<'a> {
    mu: &'a RatMatrix,
    bstar: &'a [Rat],
    bound: &'a Rat,
    budget: usize,
    y: Vec<Int>,
    out: Vec<(Vec<Int>, Rat)>,
}

impl Walk<'_> {
    fn descend(&mut self, i: usize, used: Rat, top_zero: bool) -> Result<(), EnumerationError> {
        let n = self.y.len();
        let mut c = Rat::zero();
        for l in i + 1..n {
            if !self.y[l].is_zero() && !self.mu[(l, i)].is_zero() {
                c -= &self.mu[(l, i)] * Rat::from_integer(self.y[l].clone());
            }
        }
        let r = (self.bound - &used) / &self.bstar[i];
        if r.is_negative() {
            return Ok(());
        }
        let mut lo = ceil_sub_sqrt(&c, &r);
        let hi = floor_add_sqrt(&c, &r);
        if top_zero && lo.is_negative() {
            lo = BigInt::zero();
        }
        let mut v = lo;
        while v <= hi {
            let t = Rat::from_integer(v.clone()) - &c;
            let next = &used + &self.bstar[i] * &t * &t;
            if &next <= self.bound {
                self.y[i] = v.clone();
                let zero_here = top_zero && v.is_zero();
                if i == 0 {
                    if !zero_here {
                        if self.out.len() >= self.budget {
                            return Err(EnumerationError::BudgetExceeded { budget: self.budget });
                        }
                        self.out.push((self.y.clone(), next));
                    }
                } else {
                    self.descend(i - 1, next, zero_here)?;
                }
            }
            v += 1;
        }
        self.y[i] = BigInt::zero();
        Ok(())
    }
}

fn normalise_sign(v: &mut [Int]) {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        v.iter_mut().for_each(|x| *x = -x.clone());
    }
}

/// All non-zero vectors `x` with `x^T g x <= bound`, one of each `±x` pair
/// (first non-zero coordinate positive), sorted by length then coordinates.
pub fn short_vectors_gram(
    g: &RatMatrix,
    bound: &Rat,
    budget: usize,
) -> Result<Vec<ShortVector>, EnumerationError> {
    let n = g.rows();
    if n == 0 || !bound.is_positive() {
        return Ok(vec![]);
    }
    let red = lll_gram(g);
    let d = gso(&red.gram);
    let mut walk = Walk {
        mu: &d.mu,
        bstar: &d.bstar,
        bound,
        budget,
        y: vec![BigInt::zero(); n],
        out: vec![],
    };
    walk.descend(n - 1, Rat::zero(), true)?;
    // x = t^T y maps reduced coordinates back to the input ones
    let mut out: Vec<ShortVector> = walk
        .out
        .into_iter()
        .map(|(y, norm_sq)| {
            let mut coords: Vec<Int> = (0..n)
                .map(|j| (0..n).fold(BigInt::zero(), |acc, i| acc + &y[i] * &red.t[(i, j)]))
                .collect();
            normalise_sign(&mut coords);
            ShortVector { coords, norm_sq }
        })
        .collect();
    out.sort_by(|a, b| a.norm_sq.cmp(&b.norm_sq).then_with(|| a.coords.cmp(&b.coords)));
    Ok(out)
}

/// A shortest non-zero vector of the form `g` and its squared length.
pub fn shortest_in_gram(g: &RatMatrix) -> (Vec<Int>, Rat) {
    let red = lll_gram(g);
    let bound = red.gram[(0, 0)].clone();
    let v = short_vectors_gram(g, &bound, usize::MAX)
        .expect("unbounded budget")
        .into_iter()
        .next()
        .expect("the first reduced basis vector is within the bound");
    (v.coords, v.norm_sq)
}
