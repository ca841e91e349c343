//! Brute-force reference for `delta_m`: every saturated Hermite normal form
//! with small entries, tested one by one. Shares no search code with the
//! main path; determinants are Laplace expansions and saturation is checked
//! through maximal minors.

use num_integer::Integer;
use num_traits::{One, Zero};

use super::DeltaResult;
use crate::lattice_space::{RationalSubspace, Scenario, UnimodularLattice};
use crate::rat::{lcm_upto, Int, Rat};
use crate::rational_linalg::IntMatrix;

fn laplace_det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    match n {
        0 => Rat::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Rat::zero();
            for (j, a) in m[0].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rat>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = a * laplace_det(&minor);
                if j % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, n, k, &mut vec![], &mut out);
    out
}

fn minors(rows: &[Vec<Rat>], size: usize) -> impl Iterator<Item = Rat> + '_ {
    let n = rows[0].len();
    combinations(n, size).into_iter().map(move |cols| {
        let sub: Vec<Vec<Rat>> = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        laplace_det(&sub)
    })
}

fn saturated(h: &[Vec<Rat>]) -> bool {
    let g = minors(h, h.len()).fold(Int::zero(), |g, m| g.gcd(&m.to_integer()));
    g.is_one()
}

fn real_rows(lat: &UnimodularLattice, h: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let b = lat.basis();
    let n = lat.dim();
    h.iter()
        .map(|r| (0..n).map(|i| (0..n).fold(Rat::zero(), |acc, j| acc + &b[(i, j)] * &r[j])).collect())
        .collect()
}

fn stable(real: &[Vec<Rat>], sc: &Scenario) -> bool {
    let n = real[0].len();
    sc.m_generators().iter().all(|g| {
        real.iter().all(|v| {
            let gv: Vec<Rat> = (0..n).map(|i| (0..n).fold(Rat::zero(), |acc, j| acc + &g[(i, j)] * &v[j])).collect();
            let mut ext = real.to_vec();
            ext.push(gv);
            let dependent = minors(&ext, ext.len()).all(|m| m.is_zero());
            dependent
        })
    })
}

fn gram_det(real: &[Vec<Rat>]) -> Rat {
    let g: Vec<Vec<Rat>> = real
        .iter()
        .map(|a| real.iter().map(|b| a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)).collect())
        .collect();
    laplace_det(&g)
}

/// All `k x n` Hermite normal forms with pivots in `1..=bound`, entries above
/// pivots in `[0, pivot)` and remaining entries in `[-bound, bound]`.
fn hnf_family(n: usize, k: usize, bound: i64, mut f: impl FnMut(&[Vec<Rat>])) {
    for pivots in combinations(n, k) {
        // (row, column, whether the column holds a later pivot)
        let mut slots: Vec<(usize, usize, bool)> = vec![];
        for (i, &p) in pivots.iter().enumerate() {
            slots.push((i, p, false));
            for c in p + 1..n {
                slots.push((i, c, pivots.contains(&c)));
            }
        }
        let mut h = vec![vec![Rat::zero(); n]; k];
        fill(&mut h, &slots, 0, &pivots, bound, &mut f);
    }
}

fn fill(
    h: &mut Vec<Vec<Rat>>,
    slots: &[(usize, usize, bool)],
    idx: usize,
    pivots: &[usize],
    bound: i64,
    f: &mut impl FnMut(&[Vec<Rat>]),
) {
    if idx == slots.len() {
        f(h);
        return;
    }
    let (i, c, above) = slots[idx];
    let range: Vec<i64> = if pivots[i] == c {
        (1..=bound).collect()
    } else if above {
        // the pivot below is filled later; reduced_above_pivots filters afterwards
        (0..bound).collect()
    } else {
        (-bound..=bound).collect()
    };
    for v in range {
        h[i][c] = Rat::from_integer(Int::from(v));
        fill(h, slots, idx + 1, pivots, bound, f);
    }
    h[i][c] = Rat::zero();
}

fn reduced_above_pivots(h: &[Vec<Rat>], pivots: &[usize]) -> bool {
    pivots.iter().enumerate().all(|(r, &p)| (0..r).all(|i| h[i][p] < h[r][p]))
}

fn canonical_key(h: &[Vec<Rat>]) -> (usize, Vec<usize>, Vec<Rat>) {
    let pivots = h.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect();
    (h.len(), pivots, h.iter().flatten().cloned().collect())
}

/// Minimises `q(W)` over every eligible `W` whose saturated HNF has entries
/// bounded by `hnf_entry_bound` (and over the full space). The result is an
/// upper bound for `δ_M` and is flagged incomplete.
pub fn oracle_delta_m(lat: &UnimodularLattice, sc: &Scenario, hnf_entry_bound: i64) -> DeltaResult {
    let n = lat.dim();
    let l = lcm_upto(n);
    let mut best_q = Rat::one();
    let mut best: Option<Vec<Vec<Rat>>> = None;
    for k in 1..n {
        hnf_family(n, k, hnf_entry_bound, |h| {
            let pivots: Vec<usize> = h.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect();
            if !reduced_above_pivots(h, &pivots) || !saturated(h) {
                return;
            }
            let real = real_rows(lat, h);
            if !stable(&real, sc) {
                return;
            }
            let q = gram_det(&real).pow((l / k as u32) as i32);
            let better = q < best_q
                || (q == best_q && best.as_ref().is_none_or(|b| canonical_key(h) < canonical_key(b)));
            if better {
                best_q = q;
                best = Some(h.to_vec());
            }
        });
    }
    let witness = match best {
        None => RationalSubspace::full(n),
        Some(h) => {
            let m = IntMatrix::from_rows(n, h.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()));
            RationalSubspace::from_canonical_basis(m).expect("oracle keeps saturated HNFs only")
        }
    };
    DeltaResult::for_witness(lat, witness, false)
}
