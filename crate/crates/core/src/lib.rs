//! Exact-arithmetic toolkit for the non-divergence push-out on the space of
//! unimodular lattices.

pub mod enumeration;
pub mod exterior;
pub mod lattice_space;
pub mod pushout;
pub mod rat;
pub mod rational_linalg;
pub mod sampling;

pub use enumeration::{
    delta_m, delta_m_with_budget, eligible_subspaces, oracle_delta_m, short_vectors, DeltaResult,
    EnumerationError, DEFAULT_VECTOR_BUDGET,
};
pub use exterior::{contraction_constant, wedge_scaling_range, ExteriorError, PureWedge};
pub use lattice_space::{
    apply_group, covolume_sq, is_m_stable, shortest_vector_sq, subspace_intersect, subspace_sum,
    LatticeError, RationalSubspace, Scenario, ScenarioError, TorusElement, UnimodularLattice,
};
pub use pushout::{
    drive, expansion_element, protect, pushout_step, select_index_set, CaseTag, ExpansionCertificate,
    Protection, PushoutCertificate, PushoutConfig, PushoutError, StepRecord, Termination,
};
pub use rat::{format_rat, parse_rat, Int, Rat};
pub use rational_linalg::{IntMatrix, RatMatrix};
