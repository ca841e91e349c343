//! Complete search for M-stable rational subspaces of small covolume.
//!
//! The search runs in the quotient `Λ / Λ_{W0}` by a saturated base subspace
//! `W0` (possibly zero), realised as the orthogonal projection of `Λ` onto
//! `W0^⊥`. For `U ⊇ W0` saturated, `‖Λ_U‖² = ‖Λ_{W0}‖² · ‖π(Λ_U)‖²`, so every
//! question about superspaces of `W0` becomes one about sublattices of the
//! projected lattice.
//!
//! A rank-`r` lattice with squared covolume `c` has a non-zero vector with
//! `‖v‖^{2r} <= γ_r^r c` (Hermite). Each search state `S` is extended by every
//! such vector of `Λ / Λ_S` and closed under M, so every candidate `U ⊋ S` is
//! reached through the shortest vector of `π_S(Λ_U)`.

use std::collections::HashSet;

use num_traits::One;

use super::fincke_pohst::short_vectors_gram;
use super::EnumerationError;
use crate::lattice_space::{covolume_sq, RationalSubspace, Scenario, UnimodularLattice};
use crate::rat::{rat, root_upper, Int, Rat};
use crate::rational_linalg::{
    congruence, in_row_space, inverse, lll_gram, rref, unimodular_completion, IntMatrix, RatMatrix,
};

/// `γ_k^k`, the k-th power of Hermite's constant. Exact values are known for
/// `k <= 8`; beyond that the bound `γ_k <= (4/3)^{(k-1)/2}` is used.
pub fn hermite_power(k: usize) -> Rat {
    match k {
        0 | 1 => Rat::one(),
        2 => rat(4, 3),
        3 => rat(2, 1),
        4 => rat(4, 1),
        5 => rat(8, 1),
        6 => rat(64, 3),
        7 => rat(64, 1),
        8 => rat(256, 1),
        _ => rat(4, 3).pow((k * (k - 1) / 2) as i32),
    }
}

/// What the search is minimising or collecting. Covolumes passed around are
/// squared covolumes in the quotient lattice.
pub trait Objective {
    /// Upper bound on the squared covolume of a rank-`k` candidate worth
    /// finding, or `None` when rank `k` cannot contribute.
    fn cap_upper(&self, k: usize) -> Option<Rat>;
    /// Given a lower bound `x` on the squared covolume of a rank-`k`
    /// candidate, whether such a candidate could still be accepted.
    fn admits(&self, k: usize, x: &Rat) -> bool;
    fn offer(&mut self, w: RationalSubspace, quotient_covol_sq: Rat);
}

/// The lattice `Λ` seen from a saturated M-stable base `W0`, searched through
/// its quotients.
pub struct SearchSpace<'a> {
    lat: &'a UnimodularLattice,
    gens: Vec<RatMatrix>,
    base: Option<RationalSubspace>,
    base_covol_sq: Rat,
    rank: usize,
    budget: usize,
    used: usize,
}

/// Integer completion of `W` to a basis and the Gram matrix of the
/// projection of the completion onto `W^⊥`.
fn quotient(lat: &UnimodularLattice, w: Option<&RationalSubspace>) -> (IntMatrix, RatMatrix) {
    let g = lat.gram();
    match w {
        None => (IntMatrix::identity(lat.dim()), g),
        Some(w) => {
            let h = w.integral_basis().to_rat();
            let c_int = unimodular_completion(w.integral_basis());
            let c = c_int.to_rat();
            let a = congruence(&c, &g);
            let b = &(&c * &g) * &h.transpose();
            let d = congruence(&h, &g);
            let dinv = inverse(&d).expect("subspace Gram is invertible");
            let proj = &(&b * &dinv) * &b.transpose();
            let gram = RatMatrix::from_fn(a.rows(), a.cols(), |i, j| &a[(i, j)] - &proj[(i, j)]);
            (c_int, gram)
        }
    }
}

fn lift(completion: &IntMatrix, v: &[Int]) -> Vec<Rat> {
    (0..completion.cols())
        .map(|j| {
            let s: Int = v.iter().enumerate().map(|(i, y)| y * &completion[(i, j)]).sum();
            Rat::from_integer(s)
        })
        .collect()
}

impl<'a> SearchSpace<'a> {
    pub fn new(
        lat: &'a UnimodularLattice,
        sc: &Scenario,
        base: Option<RationalSubspace>,
        budget: usize,
    ) -> Result<Self, EnumerationError> {
        let gens = sc.m_generators().iter().map(|m| lat.in_lattice_coordinates(m)).collect();
        let base_covol_sq = base.as_ref().map_or(Rat::one(), |w| covolume_sq(lat, w));
        let rank = lat.dim() - base.as_ref().map_or(0, |w| w.dim());
        Ok(SearchSpace { lat, gens, base, base_covol_sq, rank, budget, used: 0 })
    }

    /// Rank of the quotient `Λ / Λ_{W0}`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base_covol_sq(&self) -> &Rat {
        &self.base_covol_sq
    }

    fn charge(&mut self, n: usize) -> Result<(), EnumerationError> {
        self.used += n;
        if self.used > self.budget {
            return Err(EnumerationError::BudgetExceeded { budget: self.budget });
        }
        Ok(())
    }

    /// Reduced echelon basis of the smallest M-stable subspace containing
    /// the rows of `ech` (already in reduced form).
    fn m_closure(&self, mut ech: RatMatrix, max_dim: usize) -> Option<RatMatrix> {
        loop {
            let mut grew = false;
            for a in &self.gens {
                let images: Vec<Vec<Rat>> = ech.iter_rows().map(|r| a.mul_vec(r)).collect();
                for w in images {
                    if !in_row_space(&ech, &w) {
                        ech.push_row(w);
                        ech = rref(&ech);
                        grew = true;
                        if ech.rows() > max_dim {
                            return None;
                        }
                    }
                }
            }
            if !grew {
                return Some(ech);
            }
        }
    }

    /// Quotient-rank-`k` search. Every M-stable saturated `U ⊇ W0` of
    /// quotient rank `k` that the objective admits is offered exactly once.
    pub fn search_rank(&mut self, k: usize, obj: &mut impl Objective) -> Result<(), EnumerationError> {
        assert!(k >= 1 && k <= self.rank);
        let mut visited = HashSet::new();
        let base = self.base.clone();
        self.descend(base.as_ref(), Rat::one(), 0, k, obj, &mut visited)
    }

    /// Extends the M-stable `S` (quotient rank `d`, quotient covolume `s`)
    /// by the shortest vector of `π_S(Λ_U)` for each candidate `U`. That
    /// vector has `‖v‖^{2r} <= γ_r^r · c / s` with `r = k - d`.
    fn descend(
        &mut self,
        state: Option<&RationalSubspace>,
        s: Rat,
        d: usize,
        k: usize,
        obj: &mut impl Objective,
        visited: &mut HashSet<Vec<Rat>>,
    ) -> Result<(), EnumerationError> {
        let r = k - d;
        let gamma = hermite_power(r);
        let (completion, gram) = quotient(self.lat, state);
        let b = self.base.as_ref().map_or(0, |w| w.dim());
        let ech = state.map_or_else(|| RatMatrix::zeros(0, self.lat.dim()), |w| w.echelon());
        // grow the radius from a short known vector so that a small cap
        // found early keeps the enumeration small
        let reduced = lll_gram(&gram).gram;
        let mut radius = (0..reduced.rows()).map(|i| reduced[(i, i)].clone()).min().expect("rank >= 1");
        let mut done: Option<Rat> = None;
        loop {
            let Some(cap) = obj.cap_upper(k) else {
                return Ok(());
            };
            let bound = root_upper(&(&gamma * &cap / &s), r as u32);
            let cur = radius.clone().min(bound.clone());
            if done.as_ref().is_some_and(|x| &cur <= x) {
                return Ok(());
            }
            let vs = short_vectors_gram(&gram, &cur, self.budget.saturating_sub(self.used))
                .map_err(|_| EnumerationError::BudgetExceeded { budget: self.budget })?;
            self.charge(vs.len())?;
            for v in vs {
                if done.as_ref().is_some_and(|x| &v.norm_sq <= x) {
                    continue;
                }
                let lb = &s * v.norm_sq.pow(r as i32) / &gamma;
                if !obj.admits(k, &lb) {
                    // sorted by length, and the bound only grows
                    return Ok(());
                }
                let mut e = ech.clone();
                e.push_row(lift(&completion, &v.coords));
                let Some(closed) = self.m_closure(rref(&e), b + k) else {
                    continue;
                };
                if !visited.insert(closed.entries().to_vec()) {
                    continue;
                }
                self.charge(1)?;
                let t = RationalSubspace::from_rational_rows(&closed).expect("non-zero");
                let c = covolume_sq(self.lat, &t) / &self.base_covol_sq;
                if closed.rows() == b + k {
                    obj.offer(t, c);
                } else {
                    self.descend(Some(&t), c, closed.rows() - b, k, obj, visited)?;
                }
            }
            if cur >= bound {
                return Ok(());
            }
            done = Some(cur.clone());
            radius = cur * Rat::from_integer(Int::from(4));
        }
    }
}

/// Minimises `q(W) = ‖Λ_W‖^{2L/dim W}`, starting from the full space.
pub struct DeltaObjective {
    pub l: u32,
    pub best_q: Rat,
    pub best: RationalSubspace,
}

impl Objective for DeltaObjective {
    fn cap_upper(&self, k: usize) -> Option<Rat> {
        Some(root_upper(&self.best_q, self.l / k as u32))
    }

    fn admits(&self, k: usize, x: &Rat) -> bool {
        x.pow((self.l / k as u32) as i32) <= self.best_q
    }

    fn offer(&mut self, w: RationalSubspace, c: Rat) {
        let q = c.pow((self.l / w.dim() as u32) as i32);
        if q < self.best_q || (q == self.best_q && w.canonical_cmp(&self.best).is_lt()) {
            self.best_q = q;
            self.best = w;
        }
    }
}

/// Smallest quotient covolume strictly below `cap`.
pub struct BelowCapObjective {
    pub cap: Rat,
    pub best: Option<(Rat, RationalSubspace)>,
}

impl Objective for BelowCapObjective {
    fn cap_upper(&self, _k: usize) -> Option<Rat> {
        Some(self.best.as_ref().map_or(self.cap.clone(), |(c, _)| c.clone()))
    }

    fn admits(&self, _k: usize, x: &Rat) -> bool {
        x < &self.cap && self.best.as_ref().is_none_or(|(c, _)| x <= c)
    }

    fn offer(&mut self, w: RationalSubspace, c: Rat) {
        if c >= self.cap {
            return;
        }
        let better = match &self.best {
            None => true,
            Some((bc, bw)) => c < *bc || (c == *bc && w.canonical_cmp(bw).is_lt()),
        };
        if better {
            self.best = Some((c, w));
        }
    }
}

/// Everything with quotient covolume at most `cap`.
pub struct CollectObjective {
    pub cap: Rat,
    pub found: Vec<(RationalSubspace, Rat)>,
}

impl Objective for CollectObjective {
    fn cap_upper(&self, _k: usize) -> Option<Rat> {
        Some(self.cap.clone())
    }

    fn admits(&self, _k: usize, x: &Rat) -> bool {
        x <= &self.cap
    }

    fn offer(&mut self, w: RationalSubspace, c: Rat) {
        if c <= self.cap {
            self.found.push((w, c));
        }
    }
}

/// Smallest-covolume M-stable `U ⊋ base` (the full space included) with
/// `‖Λ_U‖² < ratio_cap · ‖Λ_base‖²`, with its squared covolume.
pub fn smallest_superspace_below(
    lat: &UnimodularLattice,
    sc: &Scenario,
    base: &RationalSubspace,
    ratio_cap: &Rat,
    budget: usize,
) -> Result<Option<(RationalSubspace, Rat)>, EnumerationError> {
    let mut space = SearchSpace::new(lat, sc, Some(base.clone()), budget)?;
    let mut obj = BelowCapObjective { cap: ratio_cap.clone(), best: None };
    for k in 1..space.rank() {
        space.search_rank(k, &mut obj)?;
    }
    let full_ratio = space.base_covol_sq().recip();
    obj.offer(RationalSubspace::full(lat.dim()), full_ratio);
    Ok(obj.best.map(|(c, w)| {
        let covol = c * space.base_covol_sq();
        (w, covol)
    }))
}
