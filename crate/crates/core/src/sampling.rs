//! Seeded random lattices and subspaces for tests, benchmarks and the CLI.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use crate::lattice_space::{RationalSubspace, Scenario, TorusElement, UnimodularLattice};
use crate::rat::{rat, Rat};
use crate::rational_linalg::{IntMatrix, RatMatrix};

/// `p/q` with `|p| <= max` and `1 <= q <= max`.
pub fn small_rational(rng: &mut impl Rng, max: i64) -> Rat {
    rat(rng.random_range(-max..=max), rng.random_range(1..=max))
}

fn positive_rational(rng: &mut impl Rng, max: i64) -> Rat {
    rat(rng.random_range(1..=max), rng.random_range(1..=max))
}

/// A random basis with determinant exactly 1, as `L·D·U` with unit triangular
/// `L`, `U` and positive diagonal `D`, all factor entries bounded by `max`.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, max: i64) -> UnimodularLattice {
    let lower = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => small_rational(rng, max),
        std::cmp::Ordering::Equal => Rat::one(),
        std::cmp::Ordering::Less => rat(0, 1),
    });
    let upper = RatMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => small_rational(rng, max),
        std::cmp::Ordering::Equal => Rat::one(),
        std::cmp::Ordering::Greater => rat(0, 1),
    });
    let mut diag: Vec<Rat> = (0..n - 1).map(|_| positive_rational(rng, max)).collect();
    let prod = diag.iter().fold(Rat::one(), |acc, x| acc * x);
    diag.push(prod.recip());
    let b = &(&lower * &RatMatrix::diagonal(&diag)) * &upper;
    UnimodularLattice::new(b).expect("determinant is one by construction")
}

/// A lattice `s_t·[[1, u], [0, A]]` for the `R ⊕ R^3` scenario: `u` an
/// integer row, `A` random unimodular, `s_t = diag(t³, 1/t, 1/t, 1/t)`.
pub fn random_sl4_lattice(rng: &mut impl Rng, max: i64, t: &Rat) -> UnimodularLattice {
    let a = random_unimodular(rng, 3, max);
    let u: Vec<Rat> = (0..3).map(|_| rat(rng.random_range(-2..=2), 1)).collect();
    let b = RatMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 0) => Rat::one(),
        (0, _) => u[j - 1].clone(),
        (_, 0) => rat(0, 1),
        _ => a.basis()[(i - 1, j - 1)].clone(),
    });
    let s = TorusElement::for_scenario(&Scenario::sl4_so21(), vec![t.pow(3), t.recip()]).expect("valid");
    s.apply(&UnimodularLattice::new(b).expect("unimodular"))
}

/// A random non-zero proper subspace of `Q^n` of dimension `k`, given by
/// integer coordinate rows with entries in `[-max, max]`.
pub fn random_subspace(rng: &mut impl Rng, n: usize, k: usize, max: i64) -> RationalSubspace {
    assert!(k >= 1 && k <= n);
    loop {
        let rows = IntMatrix::from_rows(
            n,
            (0..k).map(|_| (0..n).map(|_| BigInt::from(rng.random_range(-max..=max))).collect()),
        );
        if let Some(w) = RationalSubspace::from_generators(&rows) {
            if w.dim() == k {
                return w;
            }
        }
    }
}

/// A random diagonal torus element for the trivial scenario on `R^n` with
/// power-of-two entries `2^{e_i}`, `Σ e_i = 0`, `|e_i| <= spread`.
pub fn random_dyadic_torus(rng: &mut impl Rng, n: usize, spread: i32) -> TorusElement {
    let mut e: Vec<i32> = (0..n - 1).map(|_| rng.random_range(-spread..=spread)).collect();
    e.push(-e.iter().sum::<i32>());
    let scalars = e.iter().map(|&x| rat(2, 1).pow(x)).collect();
    TorusElement::new(scalars, vec![1; n]).expect("determinant one")
}
