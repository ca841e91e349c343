//! Acceptance run: one PASS/FAIL line per criterion, with its time limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nondiv_cli::report::{parse_trajectory_csv, DeltaCertificate, DriveCertificate, OracleReport, ShortVectorReport};
use nondiv_core::exterior::PureWedge;
use nondiv_core::lattice_space::unsaturated_sum_covolume_sq;
use nondiv_core::pushout::ProtectRecord;
use nondiv_core::rat::{parse_rat, rat};
use nondiv_core::rational_linalg::{dot, inverse};
use nondiv_core::sampling::{random_dyadic_torus, random_sl4_lattice, random_subspace, random_unimodular};
use nondiv_core::*;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sq(v: &[Rat]) -> Rat {
    dot(v, v)
}

fn sl4_t(t: &Rat) -> UnimodularLattice {
    let sc = Scenario::sl4_so21();
    TorusElement::for_scenario(&sc, vec![t.pow(3), t.recip()]).unwrap().apply(&UnimodularLattice::standard(4))
}

fn eta(e: Rat) -> PushoutConfig {
    PushoutConfig { eta0: Some(e), ..Default::default() }
}

/// The subspace spanned by real coordinate vectors `e_j`, `j` in `cols`, in
/// lattice coordinates.
fn real_coordinate_subspace(lat: &UnimodularLattice, cols: &[usize]) -> RationalSubspace {
    let binv = inverse(lat.basis()).unwrap().transpose();
    RationalSubspace::from_rational_rows(&binv.select_rows(cols.iter().copied())).unwrap()
}

fn criterion_1() -> Outcome {
    for n in 2..=5 {
        let start = Instant::now();
        let d = delta_m(&UnimodularLattice::standard(n), &Scenario::trivial(n));
        let t = start.elapsed();
        ensure(d.delta_sq_pow == Rat::one() && d.complete, || format!("N={n}: δ^(2L) = {}", d.delta_sq_pow))?;
        ensure(t < Duration::from_secs(1), || format!("N={n} took {t:?}"))?;
    }
    Ok("δ(Z^N) = 1 exactly for N = 2..5".into())
}

fn criterion_2() -> Outcome {
    let sc = Scenario::trivial(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        // same lattice, reduced basis, so the oracle's HNF box covers the minimiser
        let lat = random_unimodular(&mut rng, 3, 16).lll_reduced().0;
        let d = delta_m(&lat, &sc);
        let o = oracle_delta_m(&lat, &sc, 2);
        ensure(d.complete && d.delta_sq_pow == o.delta_sq_pow && d.witness == o.witness, || {
            format!("N=3 sample {i} disagrees: {lat:?}")
        })?;
    }
    let sc = Scenario::sl4_so21();
    let ts = [rat(1, 2), rat(1, 3), rat(2, 1), rat(3, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let lat = random_sl4_lattice(&mut rng, 4, &ts[i % ts.len()]);
        let d = delta_m(&lat, &sc);
        let o = oracle_delta_m(&lat, &sc, 2);
        ensure(d.complete && d.delta_sq_pow == o.delta_sq_pow && d.witness == o.witness, || {
            format!("SL4 sample {i} disagrees: {lat:?}")
        })?;
    }
    Ok("200 N=3 and 50 SL4 lattices, 0 disagreements".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let n = rng.random_range(2..=5);
        let lat = random_unimodular(&mut rng, n, 16);
        let (k1, k2) = (rng.random_range(1..=n), rng.random_range(1..=n));
        let w1 = random_subspace(&mut rng, n, k1, 2);
        let w2 = random_subspace(&mut rng, n, k2, 2);
        let cap = subspace_intersect(&w1, &w2).map_or(Rat::one(), |c| covolume_sq(&lat, &c));
        let lhs = cap * unsaturated_sum_covolume_sq(&lat, &w1, &w2);
        let rhs = covolume_sq(&lat, &w1) * covolume_sq(&lat, &w2);
        ensure(lhs <= rhs, || format!("triple {i} violates the inequality"))?;
    }
    Ok("1000 triples, inequality holds exactly".into())
}

fn random_member(rng: &mut impl Rng, basis: &[Vec<Rat>]) -> Vec<Rat> {
    let n = basis[0].len();
    loop {
        let c: Vec<i64> = (0..basis.len()).map(|_| rng.random_range(-4..=4)).collect();
        if c.iter().any(|&x| x != 0) {
            return (0..n)
                .map(|j| basis.iter().zip(&c).fold(Rat::from_integer(0.into()), |a, (b, &x)| a + &b[j] * rat(x, 1)))
                .collect();
        }
    }
}

fn check_expansion(rng: &mut impl Rng, lat: &UnimodularLattice, w: &RationalSubspace, sc: &Scenario) -> Result<(), String> {
    let e = expansion_element(w, lat, sc, &PushoutConfig::default()).map_err(|e| e.to_string())?;
    let basis = lat.real_basis(w);
    let n = lat.dim();
    ensure(e.achieved_c2_sq > Rat::one() && e.achieved_c1 >= Rat::one(), || "constants out of range".into())?;
    for _ in 0..4 {
        let v = random_member(rng, &basis);
        ensure(sq(&e.s.apply_vector(&v)) >= &e.achieved_c2_sq * sq(&v), || format!("per-vector bound fails on {w:?}"))?;
    }
    for j in 2..=w.dim() {
        let vs: Vec<Vec<Rat>> = (0..j).map(|_| random_member(rng, &basis)).collect();
        if let Ok(v) = PureWedge::new(vs) {
            ensure(v.apply(&e.s).sq_norm() >= &(&e.achieved_c2_sq * v.sq_norm()), || {
                format!("per-wedge bound fails on {w:?}")
            })?;
        }
    }
    for j in 1..=n {
        let vs: Vec<Vec<Rat>> =
            (0..j).map(|_| (0..n).map(|_| rat(rng.random_range(-5..=5), rng.random_range(1..=3))).collect()).collect();
        if let Ok(v) = PureWedge::new(vs) {
            let c1 = &e.achieved_c1;
            ensure(v.apply(&e.s).sq_norm() * c1 * c1 >= *v.sq_norm(), || format!("global bound fails on {w:?}"))?;
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for _ in 0..400 {
        let n = rng.random_range(2..=5);
        let lat = random_unimodular(&mut rng, n, 16);
        let k = rng.random_range(1..n);
        let w = random_subspace(&mut rng, n, k, 3);
        check_expansion(&mut rng, &lat, &w, &Scenario::trivial(n))?;
        count += 1;
    }
    let sc = Scenario::sl4_so21();
    let ts = [rat(1, 2), rat(2, 1), rat(1, 3), rat(3, 1), rat(1, 1)];
    for i in 0..50 {
        let lat = random_sl4_lattice(&mut rng, 4, &ts[i % ts.len()]);
        for cols in [&[0][..], &[1, 2, 3][..]] {
            check_expansion(&mut rng, &lat, &real_coordinate_subspace(&lat, cols), &sc)?;
            count += 1;
        }
    }
    Ok(format!("{count} subspaces (trivial N=2..5 and SL4 V1/V2), all bounds hold"))
}

fn check_guard(lat: &UnimodularLattice, sc: &Scenario, rec: &ProtectRecord) -> Result<(), String> {
    let k2 = &rec.c1c2_sq;
    let winf = &rec.w_infinity;
    let base = covolume_sq(lat, winf);
    ensure(rec.iterations() <= lat.dim(), || format!("{} iterations", rec.iterations()))?;
    ensure(!winf.is_full() && is_m_stable(winf, lat, sc) && base < Rat::one(), || "W∞ is not proper eligible".into())?;
    ensure(Rat::one() >= k2 * &base, || "guard fails against the full space".into())?;
    // a violator W yields the eligible U = sat(W + W∞) ⊋ W∞ with
    // ‖Λ_U‖² < K²‖Λ_W∞‖², so this family is exhaustive
    let family = eligible_subspaces(lat, sc, &(k2 * &base)).map_err(|e| e.to_string())?;
    for w in family.iter().filter(|w| !winf.contains(w)) {
        ensure(unsaturated_sum_covolume_sq(lat, w, winf) >= k2 * &base, || format!("guard fails for {w:?}"))?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let cfg = eta(rat(1, 2));
    let sc = Scenario::trivial(3);
    for seed in 0..16u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = random_dyadic_torus(&mut rng, 3, 6).apply(&random_unimodular(&mut rng, 3, 8)).lll_reduced().0;
        for k2 in [rat(4, 1), rat(16, 1), rat(64, 1)] {
            match protect(&lat, &sc, &cfg, &k2) {
                Ok(Protection::Protected(rec)) => {
                    check_guard(&lat, &sc, &rec)?;
                    checked += 1;
                }
                Ok(Protection::NotNeeded) | Err(PushoutError::ChainReachedWholeSpace { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    let sl4 = Scenario::sl4_so21();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in [rat(1, 2), rat(1, 3), rat(2, 1), rat(3, 1)] {
        let lat = random_sl4_lattice(&mut rng, 4, &t);
        if let Protection::Protected(rec) = protect(&lat, &sl4, &cfg, &rat(16, 1)).map_err(|e| e.to_string())? {
            check_guard(&lat, &sl4, &rec)?;
            checked += 1;
        }
    }
    ensure(checked >= 12, || format!("only {checked} protected inputs"))?;

    // frozen adversarial N=3 fixture: a chain of length 2
    let rows: [[&str; 3]; 3] = [["0", "0", "32"], ["0", "16/7", "0"], ["7/512", "-73/10752", "-23/5376"]];
    let basis = RatMatrix::from_rows(3, rows.iter().map(|r| r.iter().map(|x| parse_rat(x).unwrap()).collect()));
    let lat = UnimodularLattice::new(basis).unwrap();
    let k2 = rat(64, 1);
    let Protection::Protected(rec) = protect(&lat, &sc, &cfg, &k2).map_err(|e| e.to_string())? else {
        return Err("adversarial fixture needs no protection".into());
    };
    let l = rec.iterations();
    let w1 = &rec.chain_covol_sq[0];
    ensure(l == 2, || format!("adversarial chain has length {l}"))?;
    for (i, c) in rec.chain_covol_sq.iter().enumerate() {
        ensure(c <= &(k2.pow(i as i32) * w1), || format!("chain member {i} exceeds K^(2i)·‖W1‖²"))?;
    }
    ensure(k2.pow(l as i32) * w1 < Rat::one(), || "K^(2l)·‖W1‖² >= 1".into())?;
    check_guard(&lat, &sc, &rec)?;
    Ok(format!("{checked} protected inputs certified; adversarial chain l = {l}, K^(2l)‖W1‖² = {}", k2.pow(l as i32) * w1))
}

fn criterion_6() -> Outcome {
    let sc = Scenario::trivial(3);
    let cfg = PushoutConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut done, mut skipped) = (0, 0);
    let mut worst = f64::INFINITY;
    while done < 100 {
        ensure(skipped < 2000, || format!("only {done} inputs below η₀"))?;
        let lat = random_dyadic_torus(&mut rng, 3, 10).apply(&random_unimodular(&mut rng, 3, 16));
        match pushout_step(&lat, &sc, &cfg) {
            Ok((_, rec)) => {
                ensure(rec.growth_pow > Rat::one(), || "a priori G <= 1".into())?;
                ensure(rec.ratio_pow >= rec.growth_pow, || {
                    format!("input {done}: ratio {} below G {}", rec.ratio_pow, rec.growth_pow)
                })?;
                worst = worst.min(nondiv_core::rat::log2_rat(&(&rec.ratio_pow / &rec.growth_pow)));
                done += 1;
            }
            Err(PushoutError::NotBelowEta0) => skipped += 1,
            Err(e) => return Err(format!("input {done}: {e}")),
        }
    }
    Ok(format!("100 steps, ratio ≥ G in all; min log2((ratio/G)^(2L)) = {worst:.3}"))
}

fn drive_ok(start: &UnimodularLattice, sc: &Scenario, cfg: &PushoutConfig, label: &str) -> Result<usize, String> {
    let c = drive(start, sc, cfg).map_err(|e| format!("{label}: {e}"))?;
    ensure(c.terminated == Termination::ReachedEta0, || format!("{label}: {:?}", c.terminated))?;
    ensure(c.final_delta.delta_sq_pow >= c.eta0_sq.pow(c.final_delta.exponent as i32), || format!("{label}: final δ < η₀"))?;
    let bound = c.step_bound().unwrap_or(0);
    ensure(c.steps.len() as u64 <= bound, || format!("{label}: {} steps > bound {bound}", c.steps.len()))?;
    Ok(c.steps.len())
}

fn criterion_7() -> Outcome {
    let sl4 = Scenario::sl4_so21();
    let mut counts = vec![];
    for t in [rat(1, 2), rat(1, 4), rat(1, 8)] {
        let start = sl4_t(&t);
        drive_ok(&start, &sl4, &PushoutConfig::default(), &format!("SL4 t={t}"))?;
        counts.push(drive_ok(&start, &sl4, &eta(rat(1, 2)), &format!("SL4 t={t}, η₀=1/2"))?);
    }
    let tr = Scenario::trivial(2);
    for k in 1..=12 {
        let e = rat(1, 2).pow(k);
        let start = UnimodularLattice::diagonal(&[e.clone(), e.recip()]).unwrap();
        counts.push(drive_ok(&start, &tr, &PushoutConfig::default(), &format!("ε=2^-{k}"))?);
    }
    Ok(format!("all reach η₀ within the step bound; step counts {counts:?}"))
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn nondiv(args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_nondiv")).args(args).env_remove("NONDIV_VECTOR_BUDGET").output().unwrap();
    (o.status.code(), String::from_utf8(o.stdout).unwrap())
}

fn exact<T: serde::Serialize + for<'de> serde::Deserialize<'de>>(text: &str) -> Result<T, String> {
    let v: T = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    ensure(again == text, || "re-serialisation differs".into())?;
    Ok(v)
}

fn criterion_8() -> Outcome {
    let sl4 = fixture("sl4_so21.json");
    let tr3 = fixture("trivial3.json");
    let z4 = fixture("z4.json");
    let seeded = fixture("random_n3_seed_7.json");
    let mut emitted = 0;
    for lat in ["z4.json", "sl4_pushed_t_half.json"] {
        let (code, out) = nondiv(&["delta", "--scenario", &sl4, "--lattice", &fixture(lat)]);
        ensure(code == Some(0), || format!("delta {lat}: exit {code:?}"))?;
        let d: DeltaCertificate = exact(&out)?;
        let l: nondiv_cli::files::LatticeFile =
            serde_json::from_str(&std::fs::read_to_string(fixture(lat)).unwrap()).unwrap();
        d.validate("delta", &l.validate(lat).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        emitted += 1;
    }
    for (lat, args) in [
        ("sl4_pushed_t_quarter.json", vec!["--eta0", "1/2"]),
        ("sl4_pushed_t_eighth.json", vec!["--eta0", "1/2"]),
        ("z4.json", vec![]),
    ] {
        let l = fixture(lat);
        let mut a = vec!["drive", "--scenario", &sl4, "--lattice", &l];
        a.extend(args.iter());
        let (code, out) = nondiv(&a);
        ensure(code == Some(0), || format!("drive {lat}: exit {code:?}"))?;
        let c: DriveCertificate = exact(&out)?;
        c.validate().map_err(|e| e.to_string())?;
        a.extend(["--format", "csv"]);
        let (_, csv) = nondiv(&a);
        ensure(parse_trajectory_csv(&csv).map_err(|e| e.to_string())? == c.trajectory, || "CSV differs".into())?;
        emitted += 2;
    }
    let (code, out) = nondiv(&["oracle", "--scenario", &tr3, "--lattice", &seeded]);
    ensure(code == Some(0) && exact::<OracleReport>(&out)?.verdict == "AGREE", || "oracle on the seed fixture".into())?;
    let (_, out) = nondiv(&["shortvec", "--scenario", &tr3, "--lattice", &seeded]);
    exact::<ShortVectorReport>(&out)?;
    emitted += 2;

    let errors = [
        ("overlapping blocks", nondiv(&["delta", "--scenario", &fixture("error_overlapping_blocks.json"), "--lattice", &z4]).0),
        ("dimension 6", nondiv(&["oracle", "--scenario", &fixture("trivial6.json"), "--lattice", &fixture("z6.json")]).0),
        ("wrong determinant", nondiv(&["delta", "--scenario", &tr3, "--lattice", &fixture("error_wrong_determinant.json")]).0),
    ];
    for (name, code) in errors {
        ensure(code == Some(2), || format!("{name}: exit {code:?}, expected 2"))?;
    }
    Ok(format!("{emitted} certificates re-parse bit-exactly; 3 error fixtures exit 2"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "δ normalisation", 4, criterion_1),
        (2, "oracle equivalence", 60, criterion_2),
        (3, "submultiplicativity", 30, criterion_3),
        (4, "expansion certificate", 60, criterion_4),
        (5, "protection contract", 30, criterion_5),
        (6, "push-out growth", 120, criterion_6),
        (7, "driver termination", 60, criterion_7),
        (8, "CLI round-trip", 5, criterion_8),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let result = match result {
            Ok(_) if secs > limit as f64 => Err(format!("exceeded time limit ({secs:.2}s > {limit}s)")),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {id} [{tag}] {name}: {detail} ({secs:.2}s, limit {limit}s)");
        failed += result.is_err() as usize;
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
