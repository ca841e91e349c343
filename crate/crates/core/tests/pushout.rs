mod common;

use common::sq;
use nondiv_core::enumeration::eligible_subspaces;
use nondiv_core::exterior::PureWedge;
use nondiv_core::lattice_space::unsaturated_sum_covolume_sq;
use nondiv_core::pushout::{chain_covolumes, ProtectRecord};
use nondiv_core::rat::{parse_rat, rat, Rat};
use nondiv_core::rational_linalg::{rank, RatMatrix};
use nondiv_core::sampling::{random_dyadic_torus, random_sl4_lattice, random_subspace, random_unimodular};
use nondiv_core::*;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sl4_t(t: Rat) -> UnimodularLattice {
    let sc = Scenario::sl4_so21();
    TorusElement::for_scenario(&sc, vec![t.pow(3), t.recip()]).unwrap().apply(&UnimodularLattice::standard(4))
}

fn lattice(rows: &[&[&str]]) -> UnimodularLattice {
    let n = rows.len();
    UnimodularLattice::new(RatMatrix::from_rows(n, rows.iter().map(|r| r.iter().map(|x| parse_rat(x).unwrap()).collect())))
        .unwrap()
}

fn eta(e: Rat) -> PushoutConfig {
    PushoutConfig { eta0: Some(e), ..Default::default() }
}

/// A random vector of `W` in real coordinates.
fn random_member(rng: &mut impl Rng, lat: &UnimodularLattice, w: &RationalSubspace) -> Vec<Rat> {
    let basis = lat.real_basis(w);
    loop {
        let c: Vec<i64> = (0..basis.len()).map(|_| rng.random_range(-5..=5)).collect();
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        return (0..lat.dim())
            .map(|j| basis.iter().zip(&c).map(|(b, &x)| &b[j] * rat(x, 1)).fold(Rat::from_integer(0.into()), |a, b| a + b))
            .collect();
    }
}

fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Rat> {
    (0..n).map(|_| rat(rng.random_range(-6..=6), rng.random_range(1..=4))).collect()
}

fn check_expansion(rng: &mut impl Rng, lat: &UnimodularLattice, w: &RationalSubspace, e: &ExpansionCertificate) {
    assert!(e.lambda > e.c_w_sq);
    assert!(e.achieved_c2_sq > Rat::one());
    assert!(e.achieved_c1 >= Rat::one());
    for _ in 0..20 {
        let v = random_member(rng, lat, w);
        assert!(sq(&e.s.apply_vector(&v)) >= &e.achieved_c2_sq * sq(&v));
    }
    for j in 1..=w.dim() {
        for _ in 0..5 {
            let vs: Vec<Vec<Rat>> = (0..j).map(|_| random_member(rng, lat, w)).collect();
            let Ok(v) = PureWedge::new(vs) else { continue };
            let sv = v.apply(&e.s);
            assert!(sv.sq_norm() >= &(&e.achieved_c2_sq * v.sq_norm()));
            assert!(sv.sq_norm() >= &(e.achieved_c2_sq.pow(j as i32) * v.sq_norm()));
        }
    }
    let n = lat.dim();
    for j in 1..=n {
        for _ in 0..5 {
            let vs: Vec<Vec<Rat>> = (0..j).map(|_| random_vector(rng, n)).collect();
            let Ok(v) = PureWedge::new(vs) else { continue };
            let c1 = &e.achieved_c1;
            assert!(v.apply(&e.s).sq_norm() * c1 * c1 >= *v.sq_norm());
        }
    }
}

#[test]
fn index_set_examples() {
    let sc = Scenario::sl4_so21();
    let z4 = UnimodularLattice::standard(4);
    assert_eq!(select_index_set(&RationalSubspace::coordinate(4, [0]).unwrap(), &z4, &sc).unwrap(), vec![0]);
    assert_eq!(select_index_set(&RationalSubspace::coordinate(4, 1..4).unwrap(), &z4, &sc).unwrap(), vec![1]);
    let diag = RationalSubspace::from_generators(&IntMatrix::from_i64(&[&[1, 1]])).unwrap();
    assert_eq!(select_index_set(&diag, &UnimodularLattice::standard(2), &Scenario::trivial(2)).unwrap(), vec![0]);
}

#[test]
fn index_sets_project_bijectively() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..60 {
        let n = rng.random_range(2..=5);
        let sc = Scenario::trivial(n);
        let lat = random_unimodular(&mut rng, n, 8);
        let k = rng.random_range(1..n);
        let w = random_subspace(&mut rng, n, k, 3);
        let set = select_index_set(&w, &lat, &sc).unwrap();
        let cols: Vec<usize> = set.iter().flat_map(|&b| sc.blocks()[b].clone()).collect();
        assert_eq!(cols.len(), w.dim());
        let real = RatMatrix::from_rows(n, lat.real_basis(&w));
        assert_eq!(rank(&real.select_cols(&cols)), w.dim());
    }
    let sc = Scenario::sl4_so21();
    let lat = random_sl4_lattice(&mut rng, 4, &rat(1, 2));
    let d = delta_m(&lat, &sc);
    if !d.witness.is_full() {
        let set = select_index_set(&d.witness, &lat, &sc).unwrap();
        let dim: usize = set.iter().map(|&b| sc.blocks()[b].len()).sum();
        assert_eq!(dim, d.witness.dim());
    }
}

#[test]
fn expansion_examples() {
    let cfg = PushoutConfig::default();
    let diag = RationalSubspace::from_generators(&IntMatrix::from_i64(&[&[1, 1]])).unwrap();
    let z2 = UnimodularLattice::standard(2);
    let e = expansion_element(&diag, &z2, &Scenario::trivial(2), &cfg).unwrap();
    assert_eq!(e.index_set, vec![0]);
    assert_eq!(e.c_w_sq, rat(2, 1));
    assert_eq!(e.lambda, rat(4, 1));
    assert_eq!(e.s.scalars(), &[rat(4, 1), rat(1, 4)]);
    let v = [rat(1, 1), rat(1, 1)];
    assert_eq!(sq(&e.s.apply_vector(&v)) / sq(&v), rat(257, 32));
    assert!(rat(257, 32) >= e.achieved_c2_sq);
    assert_eq!(e.achieved_c2_sq, rat(4, 1));

    let sc = Scenario::sl4_so21();
    let z4 = UnimodularLattice::standard(4);
    let e = expansion_element(&RationalSubspace::coordinate(4, [0]).unwrap(), &z4, &sc, &cfg).unwrap();
    assert_eq!(e.c_w_sq, Rat::one());
    assert_eq!(e.lambda, rat(8, 1));
    assert_eq!(e.s.diagonal(), vec![rat(8, 1), rat(1, 2), rat(1, 2), rat(1, 2)]);
    assert_eq!(e.s, TorusElement::for_scenario(&sc, vec![rat(8, 1), rat(1, 2)]).unwrap());

    let z3 = UnimodularLattice::standard(3);
    let coord = RationalSubspace::coordinate(3, [1, 2]).unwrap();
    assert_eq!(expansion_element(&coord, &z3, &Scenario::trivial(3), &cfg).unwrap().c_w_sq, Rat::one());
    assert!(matches!(
        expansion_element(&RationalSubspace::full(3), &z3, &Scenario::trivial(3), &cfg),
        Err(PushoutError::WholeSpace)
    ));
}

#[test]
fn expansion_bounds_hold_on_random_subspaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let cfg = PushoutConfig::default();
    for _ in 0..40 {
        let n = rng.random_range(2..=5);
        let sc = Scenario::trivial(n);
        let lat = random_unimodular(&mut rng, n, 8);
        let k = rng.random_range(1..n);
        let w = random_subspace(&mut rng, n, k, 3);
        let e = expansion_element(&w, &lat, &sc, &cfg).unwrap();
        check_expansion(&mut rng, &lat, &w, &e);
    }
    let sc = Scenario::sl4_so21();
    for t in [rat(1, 2), rat(2, 1)] {
        let lat = random_sl4_lattice(&mut rng, 4, &t);
        let w = delta_m(&lat, &sc).witness;
        if !w.is_full() {
            let e = expansion_element(&w, &lat, &sc, &cfg).unwrap();
            check_expansion(&mut rng, &lat, &w, &e);
        }
    }
}

/// The guard inequality checked against an independently enumerated family.
fn check_guard(lat: &UnimodularLattice, sc: &Scenario, rec: &ProtectRecord) {
    let n = lat.dim();
    let k2 = &rec.c1c2_sq;
    let winf = &rec.w_infinity;
    assert!(!winf.is_full());
    assert!(is_m_stable(winf, lat, sc));
    assert!(rec.iterations() <= n);
    let base = covolume_sq(lat, winf);
    assert!(base < Rat::one());
    assert!(Rat::one() >= k2 * &base);
    for w in eligible_subspaces(lat, sc, k2).unwrap() {
        if !winf.contains(&w) {
            assert!(unsaturated_sum_covolume_sq(lat, &w, winf) >= k2 * &base, "{w:?}");
        }
    }
    // equivalently: no saturated superspace is cheaper than the cap
    for u in eligible_subspaces(lat, sc, &(k2 * &base)).unwrap() {
        if u.contains(winf) && u != *winf {
            assert!(covolume_sq(lat, &u) >= k2 * &base);
        }
    }
    // chain: W_1 ⊂ W_2 ⊂ ..., each step below the working constant
    let covols = chain_covolumes(lat, &rec.chain);
    assert_eq!(covols, rec.chain_covol_sq);
    for i in 1..rec.chain.len() {
        assert!(rec.chain[i].contains(&rec.chain[i - 1]) && rec.chain[i] != rec.chain[i - 1]);
        assert!(covols[i] < k2 * &covols[i - 1]);
    }
}

#[test]
fn protect_examples() {
    let sc = Scenario::sl4_so21();
    let cfg = eta(rat(1, 2));
    assert_eq!(protect(&UnimodularLattice::standard(4), &sc, &cfg, &rat(16, 1)).unwrap(), Protection::NotNeeded);
    let lat = sl4_t(rat(1, 2));
    let Protection::Protected(rec) = protect(&lat, &sc, &cfg, &rat(16, 1)).unwrap() else { panic!("protected") };
    let v1 = RationalSubspace::coordinate(4, [0]).unwrap();
    let v2 = RationalSubspace::coordinate(4, 1..4).unwrap();
    assert_eq!(rec.w_infinity, v1);
    assert_eq!(unsaturated_sum_covolume_sq(&lat, &v2, &v1), Rat::one());
    assert!(Rat::one() >= rat(16, 1) * covolume_sq(&lat, &v1));
    check_guard(&lat, &sc, &rec);
    assert!(protect(&lat, &sc, &cfg, &rat(1, 1)).is_err());
}

#[test]
fn protect_guard_on_random_lattices() {
    let sc = Scenario::trivial(3);
    let cfg = eta(rat(1, 2));
    let mut checked = 0;
    for seed in 0..24u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_unimodular(&mut rng, 3, 8);
        let s = random_dyadic_torus(&mut rng, 3, 6);
        let lat = s.apply(&base).lll_reduced().0;
        for k2 in [rat(4, 1), rat(16, 1), rat(64, 1)] {
            match protect(&lat, &sc, &cfg, &k2) {
                Ok(Protection::Protected(rec)) => {
                    check_guard(&lat, &sc, &rec);
                    checked += 1;
                }
                Ok(Protection::NotNeeded) | Err(PushoutError::ChainReachedWholeSpace { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(checked >= 12, "{checked}");
}

#[test]
fn adversarial_chain_fixture() {
    // found by a seeded search over N = 3 lattices with K² = 64, η₀ = 1/2
    let lat = lattice(&[&["0", "0", "32"], &["0", "16/7", "0"], &["7/512", "-73/10752", "-23/5376"]]);
    let sc = Scenario::trivial(3);
    let k2 = rat(64, 1);
    let Protection::Protected(rec) = protect(&lat, &sc, &eta(rat(1, 2)), &k2).unwrap() else { panic!("protected") };
    let w1 = RationalSubspace::coordinate(3, [0]).unwrap();
    let w2 = RationalSubspace::coordinate(3, [0, 1]).unwrap();
    assert_eq!(rec.chain, vec![w1, w2]);
    assert_eq!(rec.chain_covol_sq, vec![rat(49, 262144), rat(1, 1024)]);
    let l = rec.iterations() as i32;
    assert!((2..=3).contains(&l));
    for (i, c) in rec.chain_covol_sq.iter().enumerate() {
        assert!(c < &Rat::one());
        assert!(c <= &(k2.pow(i as i32) * &rec.chain_covol_sq[0]));
    }
    assert!(k2.pow(l) * &rec.chain_covol_sq[0] < Rat::one());
    check_guard(&lat, &sc, &rec);
}

#[test]
fn step_examples() {
    let sc = Scenario::sl4_so21();
    let (next, rec) = pushout_step(&sl4_t(rat(1, 2)), &sc, &eta(rat(1, 2))).unwrap();
    assert_eq!(rec.expansion.s.diagonal(), vec![rat(8, 1), rat(1, 2), rat(1, 2), rat(1, 2)]);
    assert_eq!(next, UnimodularLattice::standard(4));
    assert_eq!(rec.delta_before.delta_float, 0.125);
    assert_eq!(rec.delta_after.delta_sq_pow, Rat::one());
    assert_eq!(rec.case_tag, CaseTag::I);
    assert!(matches!(pushout_step(&UnimodularLattice::standard(4), &sc, &eta(rat(1, 2))), Err(PushoutError::NotBelowEta0)));
}

#[test]
fn growth_on_random_inputs() {
    let sc = Scenario::trivial(3);
    let cfg = PushoutConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut done = 0;
    while done < 12 {
        let lat = random_dyadic_torus(&mut rng, 3, 10).apply(&random_unimodular(&mut rng, 3, 16));
        match pushout_step(&lat, &sc, &cfg) {
            Ok((next, rec)) => {
                done += 1;
                assert!(rec.guard_certified);
                let required = (&rec.growth_pow * &rec.delta_before.delta_sq_pow).min(Rat::one());
                assert!(rec.delta_after.delta_sq_pow >= required);
                assert_eq!(rec.delta_after.delta_sq_pow, delta_m(&next, &sc).delta_sq_pow);
                assert_eq!(rec.ratio_pow, &rec.delta_after.delta_sq_pow / &rec.delta_before.delta_sq_pow);
                assert!(rec.growth_pow > Rat::one());
            }
            Err(PushoutError::NotBelowEta0) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn case_two_is_tagged() {
    // an overridden η₀ outside the provable range: the guard is not
    // certified and the new minimiser leaves W∞
    let lat = lattice(&[&["1/3", "-1", "0"], &["1/3", "7/8", "-9/16"], &["16/105", "4/35", "10/7"]]);
    let sc = Scenario::trivial(3);
    let (_, rec) = pushout_step(&lat, &sc, &eta(rat(1, 2))).unwrap();
    assert_eq!(rec.case_tag, CaseTag::II);
    assert!(!rec.guard_certified);
    assert!(!rec.protection.w_infinity.contains(&rec.delta_after.witness));
    assert!(rec.delta_after.delta_sq_pow >= (&rec.growth_pow * &rec.delta_before.delta_sq_pow).min(Rat::one()));

    let (_, rec) = pushout_step(&sl4_t(rat(1, 4)), &Scenario::sl4_so21(), &eta(rat(1, 2))).unwrap();
    assert_eq!(rec.case_tag, CaseTag::I);
}

#[test]
fn drive_examples() {
    let sc = Scenario::sl4_so21();
    let c = drive(&UnimodularLattice::standard(4), &sc, &PushoutConfig::default()).unwrap();
    assert_eq!(c.terminated, Termination::ReachedEta0);
    assert!(c.steps.is_empty());

    for (t, steps) in [(rat(1, 2), 1), (rat(1, 4), 2), (rat(1, 8), 3)] {
        let start = sl4_t(t);
        let c = drive(&start, &sc, &eta(rat(1, 2))).unwrap();
        assert_eq!(c.terminated, Termination::ReachedEta0);
        assert_eq!(c.steps.len(), steps);
        assert!(c.steps.len() as u64 <= c.step_bound().unwrap());
        assert!(c.final_delta.delta_sq_pow >= c.eta0_sq.pow(c.final_delta.exponent as i32));
        assert_eq!(c.composed.apply(&start), c.final_lattice);
        assert_eq!(delta_m(&c.final_lattice, &sc).delta_sq_pow, c.final_delta.delta_sq_pow);
        let ds: Vec<f64> = c.steps.iter().map(|s| s.delta_after.delta_float).collect();
        assert!(ds.windows(2).all(|w| w[0] <= w[1]));
    }

    let sc = Scenario::trivial(2);
    for k in 1..=12 {
        let eps = rat(1, 2).pow(k);
        let start = UnimodularLattice::diagonal(&[eps.clone(), eps.recip()]).unwrap();
        let c = drive(&start, &sc, &PushoutConfig::default()).unwrap();
        assert_eq!(c.terminated, Termination::ReachedEta0);
        assert!(c.steps.len() as u64 <= c.step_bound().unwrap_or(0));
        assert!(c.final_delta.delta_sq_pow >= c.eta0_sq.pow(c.final_delta.exponent as i32));
        // trivial M: δ <= λ₁, so the shortest vector is bounded below by η₀
        assert!(c.shortest_vector_sq >= c.eta0_sq);
    }
}

#[test]
fn drive_respects_max_steps() {
    let sc = Scenario::sl4_so21();
    let cfg = PushoutConfig { max_steps: 0, ..eta(rat(1, 2)) };
    let c = drive(&sl4_t(rat(1, 4)), &sc, &cfg).unwrap();
    assert_eq!(c.terminated, Termination::MaxSteps);
    assert!(c.steps.is_empty());
    let cfg = PushoutConfig { max_steps: 1, ..eta(rat(1, 2)) };
    assert_eq!(drive(&sl4_t(rat(1, 8)), &sc, &cfg).unwrap().terminated, Termination::MaxSteps);
}

#[test]
fn drive_reports_budget_exhaustion() {
    let cfg = PushoutConfig { vector_budget: 1, ..eta(rat(1, 2)) };
    let c = drive(&sl4_t(rat(1, 4)), &Scenario::sl4_so21(), &cfg).unwrap();
    assert_eq!(c.terminated, Termination::Incomplete);
}

#[test]
fn drive_is_deterministic() {
    let sc = Scenario::trivial(3);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let lat = random_dyadic_torus(&mut rng, 3, 8).apply(&random_unimodular(&mut rng, 3, 8));
    let a = drive(&lat, &sc, &eta(rat(1, 2)));
    let b = drive(&lat, &sc, &eta(rat(1, 2)));
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn config_validation() {
    let lat = UnimodularLattice::standard(2);
    let sc = Scenario::trivial(2);
    for cfg in [
        PushoutConfig { lambda_multiplier: Rat::one(), ..Default::default() },
        eta(rat(3, 2)),
        eta(rat(0, 1)),
        PushoutConfig { vector_budget: 0, ..Default::default() },
    ] {
        assert!(matches!(drive(&lat, &sc, &cfg), Err(PushoutError::InvalidConfig(_))));
    }
}
