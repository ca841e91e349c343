//! Short-vector enumeration and the exhaustive search behind `δ_M`.

mod fincke_pohst;
mod oracle;
pub mod search;

pub use fincke_pohst::{short_vectors_gram, shortest_in_gram, ShortVector};
pub use oracle::oracle_delta_m;

use crate::lattice_space::{covolume_sq, RationalSubspace, Scenario, UnimodularLattice};
use crate::rat::{lcm_upto, log2_rat, Int, Rat};
use search::{CollectObjective, DeltaObjective, SearchSpace};

/// Default cap on the number of vectors (and search states) enumerated.
pub const DEFAULT_VECTOR_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerationError {
    #[error("enumeration budget of {budget} vectors exceeded")]
    BudgetExceeded { budget: usize },
}

/// The minimiser of `‖Λ_W‖^{1/dim W}` over eligible `W`, certified exactly by
/// `delta_sq_pow = ‖Λ_W‖^{2L/dim W}` with `L = lcm(1..N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaResult {
    pub delta_sq_pow: Rat,
    pub exponent: u32,
    pub covolume_sq: Rat,
    pub delta_float: f64,
    pub witness: RationalSubspace,
    pub complete: bool,
}

impl DeltaResult {
    pub fn for_witness(lat: &UnimodularLattice, witness: RationalSubspace, complete: bool) -> Self {
        let l = lcm_upto(lat.dim());
        let c = covolume_sq(lat, &witness);
        let k = witness.dim();
        DeltaResult {
            delta_sq_pow: c.pow((l / k as u32) as i32),
            exponent: l,
            delta_float: (log2_rat(&c) / (2 * k) as f64).exp2(),
            covolume_sq: c,
            witness,
            complete,
        }
    }
}

/// All non-zero lattice vectors (integer coordinates in the lattice basis)
/// with squared length at most `bound_sq`, up to sign, sorted by length.
pub fn short_vectors(lat: &UnimodularLattice, bound_sq: &Rat) -> Result<Vec<Vec<Int>>, EnumerationError> {
    short_vectors_with_budget(lat, bound_sq, DEFAULT_VECTOR_BUDGET)
        .map(|vs| vs.into_iter().map(|v| v.coords).collect())
}

pub fn short_vectors_with_budget(
    lat: &UnimodularLattice,
    bound_sq: &Rat,
    budget: usize,
) -> Result<Vec<ShortVector>, EnumerationError> {
    short_vectors_gram(&lat.gram(), bound_sq, budget)
}

/// Every proper, non-zero, M-stable rational subspace with squared covolume
/// at most `covol_sq_cap`, ordered by covolume then canonically.
pub fn eligible_subspaces(
    lat: &UnimodularLattice,
    sc: &Scenario,
    covol_sq_cap: &Rat,
) -> Result<Vec<RationalSubspace>, EnumerationError> {
    eligible_subspaces_with_budget(lat, sc, covol_sq_cap, DEFAULT_VECTOR_BUDGET)
}

pub fn eligible_subspaces_with_budget(
    lat: &UnimodularLattice,
    sc: &Scenario,
    covol_sq_cap: &Rat,
    budget: usize,
) -> Result<Vec<RationalSubspace>, EnumerationError> {
    let mut space = SearchSpace::new(lat, sc, None, budget)?;
    let mut obj = CollectObjective { cap: covol_sq_cap.clone(), found: vec![] };
    for k in 1..lat.dim() {
        space.search_rank(k, &mut obj)?;
    }
    let mut found = obj.found;
    found.sort_by(|(a, ca), (b, cb)| ca.cmp(cb).then_with(|| a.canonical_cmp(b)));
    Ok(found.into_iter().map(|(w, _)| w).collect())
}

/// `δ_M(Λ)` with its witness, using the default budget.
pub fn delta_m(lat: &UnimodularLattice, sc: &Scenario) -> DeltaResult {
    delta_m_with_budget(lat, sc, DEFAULT_VECTOR_BUDGET)
}

/// `δ_M(Λ)`; when the budget runs out the best subspace found so far is
/// returned with `complete = false` (an upper bound).
pub fn delta_m_with_budget(lat: &UnimodularLattice, sc: &Scenario, budget: usize) -> DeltaResult {
    let n = lat.dim();
    let mut obj = DeltaObjective { l: lcm_upto(n), best_q: Rat::from_integer(1.into()), best: RationalSubspace::full(n) };
    let complete = (|| {
        let mut space = SearchSpace::new(lat, sc, None, budget)?;
        for k in 1..n {
            space.search_rank(k, &mut obj)?;
        }
        Ok::<(), EnumerationError>(())
    })()
    .is_ok();
    DeltaResult::for_witness(lat, obj.best, complete)
}
