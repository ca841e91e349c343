//! Expansion elements, protection subspaces, a single push-out step and the
//! driver that iterates it until `δ_M >= η₀`.
//!
//! Everything is phrased with squared quantities. For a lattice of rank `N`
//! with `L = lcm(1..N)`, `δ_M` is carried as `q = δ_M^{2L}`, so "`δ` grew by
//! at least `G`" reads `q_after >= G^{2L} q_before`.

use num_traits::{One, Signed, Zero};

use crate::enumeration::search::smallest_superspace_below;
use crate::enumeration::{delta_m_with_budget, DeltaResult, EnumerationError, DEFAULT_VECTOR_BUDGET};
use crate::exterior::contraction_constant;
use crate::lattice_space::{
    covolume_sq, shortest_vector_sq, LatticeError, RationalSubspace, Scenario, TorusElement,
    UnimodularLattice,
};
use crate::rat::{lcm_upto, log2_rat, rat, Int, Rat};
use crate::rational_linalg::{integer_kernel, inverse, is_psd, rank, IntMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PushoutError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the full space has no expansion element")]
    WholeSpace,
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("enumeration budget exhausted before the search could be certified")]
    IncompleteSearch,
    #[error("δ_M is not below η₀; no push-out is needed")]
    NotBelowEta0,
    #[error("protection chain reached the full space at iteration {iteration}")]
    ChainReachedWholeSpace { iteration: usize },
    #[error("growth not certified: q_after = {after}, required {required}")]
    GrowthNotCertified { after: String, required: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<EnumerationError> for PushoutError {
    fn from(_: EnumerationError) -> Self {
        PushoutError::IncompleteSearch
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushoutConfig {
    /// `λ` is at least `lambda_multiplier · C_W²`; must exceed 1.
    pub lambda_multiplier: Rat,
    /// Fixed `η₀`; when absent it is derived from the first step's constants.
    pub eta0: Option<Rat>,
    pub max_steps: usize,
    pub vector_budget: usize,
}

impl Default for PushoutConfig {
    fn default() -> Self {
        PushoutConfig {
            lambda_multiplier: rat(2, 1),
            eta0: None,
            max_steps: 64,
            vector_budget: DEFAULT_VECTOR_BUDGET,
        }
    }
}

impl PushoutConfig {
    pub fn validate(&self) -> Result<(), PushoutError> {
        if self.lambda_multiplier <= Rat::one() {
            return Err(PushoutError::InvalidConfig("lambda_multiplier must exceed 1".into()));
        }
        if let Some(e) = &self.eta0 {
            if !e.is_positive() || e >= &Rat::one() {
                return Err(PushoutError::InvalidConfig("eta0 must lie in (0, 1)".into()));
            }
        }
        if self.vector_budget == 0 {
            return Err(PushoutError::InvalidConfig("vector_budget must be positive".into()));
        }
        Ok(())
    }
}

/// The torus element expanding a subspace `W`, with the constants it achieves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionCertificate {
    pub s: TorusElement,
    /// Block indices (0-based) on which `s` acts by `λ`.
    pub index_set: Vec<usize>,
    pub c_w_sq: Rat,
    pub lambda: Rat,
    pub achieved_c1: Rat,
    pub achieved_c2_sq: Rat,
}

impl ExpansionCertificate {
    /// `min(C_2², 4)`, the squared expansion actually relied on.
    pub fn capped_c2_sq(&self) -> Rat {
        self.achieved_c2_sq.clone().min(rat(4, 1))
    }

    /// Squared protection constant `(C_1 C_2)²` this element needs.
    pub fn guard_constant_sq(&self) -> Rat {
        &self.achieved_c1 * &self.achieved_c1 * self.capped_c2_sq()
    }

    /// `G^{2L}` where `G = min(C_2², 4)^{1/(2N)}` is the certified growth of `δ_M`.
    pub fn growth_pow(&self, n: usize) -> Rat {
        self.capped_c2_sq().pow((lcm_upto(n) / n as u32) as i32)
    }
}

fn real_rows(lat: &UnimodularLattice, w: &RationalSubspace) -> RatMatrix {
    RatMatrix::from_rows(lat.dim(), lat.real_basis(w))
}

fn integral_rows(m: &RatMatrix) -> IntMatrix {
    IntMatrix::from_rows(
        m.cols(),
        m.iter_rows().map(|r| {
            let den = r.iter().fold(Int::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            r.iter().map(|x| (x * &den).to_integer()).collect()
        }),
    )
}

fn block_cols(sc: &Scenario, blocks: &[usize]) -> Vec<usize> {
    blocks.iter().flat_map(|&b| sc.blocks()[b].clone()).collect()
}

/// Blocks `I` with `π_I|_W` bijective onto `V_I`: repeatedly take the first
/// block on which the current kernel projects non-trivially and pass to the
/// kernel of that projection.
pub fn select_index_set(
    w: &RationalSubspace,
    lat: &UnimodularLattice,
    sc: &Scenario,
) -> Result<Vec<usize>, PushoutError> {
    let real = real_rows(lat, w);
    let mut k = integral_rows(&real);
    let mut chosen = vec![];
    while k.rows() > 0 {
        let next = (0..sc.blocks().len()).find(|b| {
            !chosen.contains(b) && sc.blocks()[*b].clone().any(|c| k.iter_rows().any(|r| !r[c].is_zero()))
        });
        let Some(b) = next else {
            return Err(PushoutError::InternalInvariantViolation("kernel chain stalled".into()));
        };
        chosen.push(b);
        let proj = k.select_cols(&sc.blocks()[b].clone().collect::<Vec<_>>());
        let coeffs = integer_kernel(&proj.transpose());
        k = &coeffs * &k;
    }
    chosen.sort_unstable();
    let cols = block_cols(sc, &chosen);
    if cols.len() != w.dim() || rank(&real.select_cols(&cols)) != w.dim() {
        return Err(PushoutError::InternalInvariantViolation(format!(
            "projection onto blocks {chosen:?} is not bijective on W"
        )));
    }
    Ok(chosen)
}

/// Certified rational upper bound for the largest eigenvalue of a symmetric
/// positive semidefinite matrix, by bisection on `u·I - s ⪰ 0`.
pub fn largest_eigenvalue_upper(s: &RatMatrix) -> Rat {
    let n = s.rows();
    let trace = (0..n).fold(Rat::zero(), |acc, i| acc + &s[(i, i)]);
    if trace.is_zero() {
        return trace;
    }
    let shifted = |u: &Rat| RatMatrix::from_fn(n, n, |i, j| if i == j { u - &s[(i, j)] } else { -s[(i, j)].clone() });
    let (mut lo, mut hi) = (Rat::zero(), trace);
    let tol = rat(1, 1 << 24);
    for _ in 0..64 {
        if &hi - &lo <= &hi * &tol {
            break;
        }
        let mid = (&lo + &hi) / Rat::from_integer(Int::from(2));
        if is_psd(&shifted(&mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn expansion_for(
    index_set: Vec<usize>,
    c_w_sq: Rat,
    sc: &Scenario,
    cfg: &PushoutConfig,
) -> Result<ExpansionCertificate, PushoutError> {
    let n = sc.dim();
    let d_i = block_cols(sc, &index_set).len();
    if d_i == 0 || d_i >= n {
        return Err(PushoutError::WholeSpace);
    }
    let target = &cfg.lambda_multiplier * &c_w_sq;
    let mut rho = rat(2, 1);
    while rho.pow((n - d_i) as i32) < target {
        rho *= rat(2, 1);
    }
    let lambda = rho.pow((n - d_i) as i32);
    let mu = rho.pow(-(d_i as i32));
    let scalars = (0..sc.blocks().len())
        .map(|b| if index_set.contains(&b) { lambda.clone() } else { mu.clone() })
        .collect();
    let s = TorusElement::for_scenario(sc, scalars)?;
    let ratio = &lambda / &c_w_sq;
    Ok(ExpansionCertificate {
        achieved_c1: contraction_constant(&s),
        achieved_c2_sq: &ratio * &ratio,
        s,
        index_set,
        c_w_sq,
        lambda,
    })
}

/// `s ∈ S` with `‖s·w₀‖² >= achieved_c2_sq · ‖w₀‖²` for every `w₀ ∈ W`.
///
/// `W` is the graph of `φ: V_I → V_{I^c}`; `C_W² = 1 + σ²` with `σ²` a
/// rational upper bound for the top eigenvalue of `φ φ^T`, and `s` acts by
/// `λ = ρ^{N-d_I}` on `V_I` and `ρ^{-d_I}` elsewhere, `ρ` the least power of
/// two with `λ >= lambda_multiplier · C_W²`.
pub fn expansion_element(
    w: &RationalSubspace,
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
) -> Result<ExpansionCertificate, PushoutError> {
    if w.is_full() {
        return Err(PushoutError::WholeSpace);
    }
    let index_set = select_index_set(w, lat, sc)?;
    expansion_with_index_set(w, lat, sc, cfg, index_set)
}

/// As `expansion_element`, for a given `I` with `π_I|_W` bijective.
fn expansion_with_index_set(
    w: &RationalSubspace,
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
    index_set: Vec<usize>,
) -> Result<ExpansionCertificate, PushoutError> {
    let real = real_rows(lat, w);
    let cols_i = block_cols(sc, &index_set);
    let cols_c: Vec<usize> = (0..lat.dim()).filter(|c| !cols_i.contains(c)).collect();
    let r_i = real.select_cols(&cols_i);
    let r_c = real.select_cols(&cols_c);
    let Some(r_i_inv) = inverse(&r_i) else {
        return Err(PushoutError::InternalInvariantViolation(format!(
            "projection onto blocks {index_set:?} is not bijective on W"
        )));
    };
    let f = &r_i_inv * &r_c;
    let s = &f * &f.transpose();
    let c_w_sq = Rat::one() + largest_eigenvalue_upper(&s);
    expansion_for(index_set, c_w_sq, sc, cfg)
}

/// Every `I` (ascending subsets of blocks) on which `W` projects bijectively.
fn bijective_index_sets(w: &RationalSubspace, lat: &UnimodularLattice, sc: &Scenario) -> Vec<Vec<usize>> {
    let real = real_rows(lat, w);
    let nb = sc.blocks().len();
    (1u32..1 << nb)
        .map(|mask| (0..nb).filter(|b| mask & (1 << b) != 0).collect::<Vec<_>>())
        .filter(|set| {
            let cols = block_cols(sc, set);
            cols.len() == w.dim() && rank(&real.select_cols(&cols)) == w.dim()
        })
        .collect()
}

/// `W∞` together with the chain `W_1 ⊂ ... ⊂ W_l = W∞` that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtectRecord {
    pub w_infinity: RationalSubspace,
    pub chain: Vec<RationalSubspace>,
    pub chain_covol_sq: Vec<Rat>,
    pub c1c2_sq: Rat,
}

impl ProtectRecord {
    pub fn iterations(&self) -> usize {
        self.chain.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Protection {
    NotNeeded,
    Protected(ProtectRecord),
}

fn below_eta0(delta: &DeltaResult, eta0_sq: &Rat) -> bool {
    delta.delta_sq_pow < eta0_sq.pow(delta.exponent as i32)
}

fn default_eta0_sq(c1c2_sq: &Rat, n: usize) -> Rat {
    c1c2_sq.pow(-(n as i32))
}

fn protect_from(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
    c1c2_sq: &Rat,
    eta0_sq: &Rat,
    delta: &DeltaResult,
) -> Result<Protection, PushoutError> {
    if !below_eta0(delta, eta0_sq) {
        return Ok(Protection::NotNeeded);
    }
    if !delta.complete {
        return Err(PushoutError::IncompleteSearch);
    }
    let mut current = delta.witness.clone();
    let mut chain = vec![current.clone()];
    let mut chain_covol_sq = vec![delta.covolume_sq.clone()];
    loop {
        match smallest_superspace_below(lat, sc, &current, c1c2_sq, cfg.vector_budget)? {
            None => break,
            Some((u, _)) if u.is_full() => {
                return Err(PushoutError::ChainReachedWholeSpace { iteration: chain.len() });
            }
            Some((u, c)) => {
                current = u;
                chain.push(current.clone());
                chain_covol_sq.push(c);
            }
        }
        if chain.len() > lat.dim() {
            return Err(PushoutError::InternalInvariantViolation("protection chain too long".into()));
        }
    }
    Ok(Protection::Protected(ProtectRecord {
        w_infinity: current,
        chain,
        chain_covol_sq,
        c1c2_sq: c1c2_sq.clone(),
    }))
}

/// A proper eligible `W∞` such that every eligible `W ⊄ W∞` has
/// `‖Λ_W + Λ_{W∞}‖² >= c1c2_sq · ‖Λ_{W∞}‖²`, or `NotNeeded` when `δ_M >= η₀`
/// (`η₀ = cfg.eta0`, else `c1c2_sq^{-N/2}`).
pub fn protect(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
    c1c2_sq: &Rat,
) -> Result<Protection, PushoutError> {
    cfg.validate()?;
    if c1c2_sq <= &Rat::one() {
        return Err(PushoutError::InvalidConfig("c1c2_sq must exceed 1".into()));
    }
    let eta0_sq = match &cfg.eta0 {
        Some(e) => e * e,
        None => default_eta0_sq(c1c2_sq, lat.dim()),
    };
    let delta = delta_m_with_budget(lat, sc, cfg.vector_budget);
    protect_from(lat, sc, cfg, c1c2_sq, &eta0_sq, &delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// the new minimiser lies inside `W∞`
    I,
    /// it does not
    II,
    /// the new minimiser is the full space
    None,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub protection: ProtectRecord,
    /// the subspace `expansion` was built for; `W∞` unless the guard failed
    pub expanded: RationalSubspace,
    pub expansion: ExpansionCertificate,
    /// whether `c1c2_sq` dominates the constant the chosen `s` needs
    pub guard_certified: bool,
    /// a priori `G^{2L}`
    pub growth_pow: Rat,
    pub delta_before: DeltaResult,
    pub delta_after: DeltaResult,
    /// exact `q_after / q_before`
    pub ratio_pow: Rat,
    pub case_tag: CaseTag,
}

struct Calibrated {
    protection: Protection,
    expansion: Option<ExpansionCertificate>,
    guard_certified: bool,
    c1c2_sq: Rat,
}

/// Picks `(C_1C_2)²` consistent with the element that ends up being used:
/// start from the expansion of the `δ_M` witness and raise the constant until
/// the element chosen for `W∞` needs no more. If the chain would swallow the
/// whole space the constant is relaxed instead, and the step is marked as
/// not a priori certified.
fn calibrate(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
    delta: &DeltaResult,
    eta0_sq: Option<&Rat>,
) -> Result<Calibrated, PushoutError> {
    let n = lat.dim();
    let seed = if delta.witness.is_full() {
        expansion_for(vec![0], Rat::one(), sc, cfg)?
    } else {
        expansion_element(&delta.witness, lat, sc, cfg)?
    };
    let mut k2 = seed.guard_constant_sq();
    let eta = |k2: &Rat| eta0_sq.cloned().unwrap_or_else(|| default_eta0_sq(k2, n));
    for _ in 0..n + 4 {
        match protect_from(lat, sc, cfg, &k2, &eta(&k2), delta) {
            Ok(Protection::NotNeeded) => {
                return Ok(Calibrated { protection: Protection::NotNeeded, expansion: None, guard_certified: true, c1c2_sq: k2 });
            }
            Ok(Protection::Protected(rec)) => {
                let e = expansion_element(&rec.w_infinity, lat, sc, cfg)?;
                let need = e.guard_constant_sq();
                if need <= k2 {
                    return Ok(Calibrated {
                        protection: Protection::Protected(rec),
                        expansion: Some(e),
                        guard_certified: true,
                        c1c2_sq: k2,
                    });
                }
                k2 = need;
            }
            Err(PushoutError::ChainReachedWholeSpace { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    // relax towards 1 until the chain stays proper
    let eta_fixed = eta(&k2);
    for _ in 0..64 {
        match protect_from(lat, sc, cfg, &k2, &eta_fixed, delta) {
            Ok(Protection::NotNeeded) => {
                return Ok(Calibrated { protection: Protection::NotNeeded, expansion: None, guard_certified: true, c1c2_sq: k2 });
            }
            Ok(Protection::Protected(rec)) => {
                let e = expansion_element(&rec.w_infinity, lat, sc, cfg)?;
                let certified = e.guard_constant_sq() <= k2;
                return Ok(Calibrated {
                    protection: Protection::Protected(rec),
                    expansion: Some(e),
                    guard_certified: certified,
                    c1c2_sq: k2,
                });
            }
            Err(PushoutError::ChainReachedWholeSpace { .. }) => {
                k2 = Rat::one() + (&k2 - Rat::one()) / Rat::from_integer(Int::from(16));
            }
            Err(e) => return Err(e),
        }
    }
    Err(PushoutError::InternalInvariantViolation("no proper protection subspace found".into()))
}

/// Candidates for the step element: the one for `W∞`, then, only when the
/// guard is not certified, every other bijective `I` for each chain member.
fn step_candidates(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
    protection: &ProtectRecord,
    primary: ExpansionCertificate,
    certified: bool,
) -> Result<Vec<(RationalSubspace, ExpansionCertificate)>, PushoutError> {
    let mut out = vec![(protection.w_infinity.clone(), primary)];
    if certified {
        return Ok(out);
    }
    for w in protection.chain.iter().rev() {
        for set in bijective_index_sets(w, lat, sc) {
            let e = expansion_with_index_set(w, lat, sc, cfg, set)?;
            if out.iter().all(|(_, o)| o.s != e.s) {
                out.push((w.clone(), e));
            }
        }
    }
    Ok(out)
}

fn step_from(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
    delta: DeltaResult,
    eta0_sq: Option<&Rat>,
) -> Result<(UnimodularLattice, StepRecord, Rat), PushoutError> {
    let cal = calibrate(lat, sc, cfg, &delta, eta0_sq)?;
    let Protection::Protected(protection) = cal.protection else {
        return Err(PushoutError::NotBelowEta0);
    };
    let primary = cal.expansion.expect("set when protected");
    let candidates = step_candidates(lat, sc, cfg, &protection, primary, cal.guard_certified)?;
    let mut first_failure = None;
    for (expanded, expansion) in candidates {
        let next = expansion.s.apply(lat);
        let after = delta_m_with_budget(&next, sc, cfg.vector_budget);
        if !after.complete {
            return Err(PushoutError::IncompleteSearch);
        }
        let growth_pow = expansion.growth_pow(lat.dim());
        let required = (&growth_pow * &delta.delta_sq_pow).min(Rat::one());
        if after.delta_sq_pow < required {
            first_failure.get_or_insert(PushoutError::GrowthNotCertified {
                after: crate::rat::format_rat(&after.delta_sq_pow),
                required: crate::rat::format_rat(&required),
            });
            continue;
        }
        let case_tag = if after.witness.is_full() {
            CaseTag::None
        } else if protection.w_infinity.contains(&after.witness) {
            CaseTag::I
        } else {
            CaseTag::II
        };
        let ratio_pow = &after.delta_sq_pow / &delta.delta_sq_pow;
        let record = StepRecord {
            protection,
            expanded,
            expansion,
            guard_certified: cal.guard_certified,
            growth_pow,
            delta_before: delta,
            delta_after: after,
            ratio_pow,
            case_tag,
        };
        return Ok((next, record, cal.c1c2_sq));
    }
    Err(first_failure.expect("at least one candidate"))
}

/// One push-out: protect, expand, and verify the growth of `δ_M` exactly.
pub fn pushout_step(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
) -> Result<(UnimodularLattice, StepRecord), PushoutError> {
    cfg.validate()?;
    let delta = delta_m_with_budget(lat, sc, cfg.vector_budget);
    if !delta.complete {
        return Err(PushoutError::IncompleteSearch);
    }
    let eta0_sq = cfg.eta0.as_ref().map(|e| e * e);
    step_from(lat, sc, cfg, delta, eta0_sq.as_ref()).map(|(l, r, _)| (l, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEta0,
    MaxSteps,
    Incomplete,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedEta0 => "ReachedEta0",
            Termination::MaxSteps => "MaxSteps",
            Termination::Incomplete => "Incomplete",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushoutCertificate {
    pub eta0_sq: Rat,
    pub eta0_overridden: bool,
    pub initial_delta: DeltaResult,
    pub steps: Vec<StepRecord>,
    pub terminated: Termination,
    /// product of the step elements
    pub composed: TorusElement,
    pub final_lattice: UnimodularLattice,
    pub final_delta: DeltaResult,
    pub shortest_vector_sq: Rat,
}

impl PushoutCertificate {
    pub fn eta0_float(&self) -> f64 {
        (log2_rat(&self.eta0_sq) / 2.0).exp2()
    }

    /// `ceil(log(η₀/δ₀) / log G_min)` over the recorded steps, or `None`
    /// without steps.
    pub fn step_bound(&self) -> Option<u64> {
        let g_min = self.steps.iter().map(|s| s.growth_pow.clone()).min()?;
        let l = self.initial_delta.exponent as f64;
        let log_eta = log2_rat(&self.eta0_sq) / 2.0;
        let log_delta = log2_rat(&self.initial_delta.delta_sq_pow) / (2.0 * l);
        let log_g = log2_rat(&g_min) / (2.0 * l);
        Some(((log_eta - log_delta) / log_g - 1e-9).ceil().max(0.0) as u64)
    }
}

/// Iterates push-out steps from `lat` until `δ_M >= η₀` or `max_steps`.
pub fn drive(
    lat: &UnimodularLattice,
    sc: &Scenario,
    cfg: &PushoutConfig,
) -> Result<PushoutCertificate, PushoutError> {
    cfg.validate()?;
    let initial = delta_m_with_budget(lat, sc, cfg.vector_budget);
    let mut cert = PushoutCertificate {
        eta0_sq: Rat::one(),
        eta0_overridden: cfg.eta0.is_some(),
        initial_delta: initial.clone(),
        steps: vec![],
        terminated: Termination::Incomplete,
        composed: TorusElement::identity(sc),
        final_lattice: lat.clone(),
        final_delta: initial.clone(),
        shortest_vector_sq: shortest_vector_sq(lat),
    };
    if !initial.complete {
        return Ok(cert);
    }
    cert.eta0_sq = match &cfg.eta0 {
        Some(e) => e * e,
        None => {
            let cal = calibrate(lat, sc, cfg, &initial, None)?;
            default_eta0_sq(&cal.c1c2_sq, lat.dim())
        }
    };
    let mut current = lat.clone();
    let mut delta = initial;
    loop {
        if !below_eta0(&delta, &cert.eta0_sq) {
            cert.terminated = Termination::ReachedEta0;
            break;
        }
        if cert.steps.len() >= cfg.max_steps {
            cert.terminated = Termination::MaxSteps;
            break;
        }
        match step_from(&current, sc, cfg, delta.clone(), Some(&cert.eta0_sq)) {
            Ok((next, record, _)) => {
                cert.composed = cert.composed.compose(&record.expansion.s);
                delta = record.delta_after.clone();
                current = next;
                cert.steps.push(record);
            }
            Err(PushoutError::IncompleteSearch) => {
                cert.terminated = Termination::Incomplete;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    cert.shortest_vector_sq = shortest_vector_sq(&current);
    cert.final_lattice = current;
    cert.final_delta = delta;
    Ok(cert)
}

/// `‖Λ_W‖²` of each subspace in a protection chain, recomputed.
pub fn chain_covolumes(lat: &UnimodularLattice, chain: &[RationalSubspace]) -> Vec<Rat> {
    chain.iter().map(|w| covolume_sq(lat, w)).collect()
}
