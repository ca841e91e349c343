//! Emitted certificates. Every decision-bearing number is a canonical `p/q`
//! string; `*_float` fields are summaries only.

use nondiv_core::pushout::ProtectRecord;
use nondiv_core::rat::{format_rat, log2_rat, parse_rat};
use nondiv_core::{
    covolume_sq, DeltaResult, Int, IntMatrix, PushoutCertificate, Rat, RationalSubspace, StepRecord, TorusElement,
    UnimodularLattice,
};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::LatticeFile;

pub const CSV_HEADER: [&str; 7] =
    ["step", "delta_num", "delta_den_pow", "delta_float", "case_tag", "torus_scalars", "witness_hnf"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaCertificate {
    /// `‖Λ_W‖^{2L/dim W}`; `δ_M` is its `2L`-th root.
    pub delta_sq_pow: String,
    pub exponent: u32,
    pub covolume_sq: String,
    pub delta_float: f64,
    pub witness_dim: usize,
    /// Saturated HNF rows, in the coordinates of the lattice basis.
    pub witness_hnf: Vec<Vec<String>>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepCertificate {
    pub step: usize,
    pub index_set: Vec<usize>,
    pub c_w_sq: String,
    pub lambda: String,
    pub achieved_c1: String,
    pub achieved_c2_sq: String,
    pub torus_scalars: Vec<String>,
    pub c1c2_sq: String,
    pub chain_hnf: Vec<Vec<Vec<String>>>,
    pub chain_covol_sq: Vec<String>,
    pub w_infinity_hnf: Vec<Vec<String>>,
    pub expanded_hnf: Vec<Vec<String>>,
    pub guard_certified: bool,
    pub growth_pow: String,
    pub ratio_pow: String,
    pub case_tag: String,
    pub delta_before: DeltaCertificate,
    pub delta_after: DeltaCertificate,
}

/// One row per push-out step: the state after the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRow {
    pub step: usize,
    pub delta_sq_pow: String,
    pub exponent: u32,
    pub delta_float: f64,
    pub case_tag: String,
    pub torus_scalars: Vec<String>,
    pub witness_hnf: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveCertificate {
    pub terminated: String,
    pub eta0_sq: String,
    pub eta0_float: f64,
    pub eta0_overridden: bool,
    pub step_bound: Option<u64>,
    pub block_dims: Vec<usize>,
    pub initial_lattice: LatticeFile,
    pub initial_delta: DeltaCertificate,
    pub steps: Vec<StepCertificate>,
    pub composed_scalars: Vec<String>,
    pub final_lattice: LatticeFile,
    pub final_delta: DeltaCertificate,
    pub shortest_vector_sq: String,
    pub trajectory: Vec<TrajectoryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleReport {
    pub hnf_bound: i64,
    pub delta_m: DeltaCertificate,
    pub oracle: DeltaCertificate,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortVectorEntry {
    pub coords: Vec<String>,
    pub norm_sq: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortVectorReport {
    pub shortest_sq: String,
    pub bound_sq: String,
    pub complete: bool,
    /// Up to sign, in the coordinates of the lattice basis.
    pub vectors: Vec<ShortVectorEntry>,
}

fn strs(xs: &[Rat]) -> Vec<String> {
    xs.iter().map(format_rat).collect()
}

pub fn hnf_strings(w: &RationalSubspace) -> Vec<Vec<String>> {
    w.integral_basis().iter_rows().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

impl DeltaCertificate {
    pub fn from_result(d: &DeltaResult) -> Self {
        DeltaCertificate {
            delta_sq_pow: format_rat(&d.delta_sq_pow),
            exponent: d.exponent,
            covolume_sq: format_rat(&d.covolume_sq),
            delta_float: d.delta_float,
            witness_dim: d.witness.dim(),
            witness_hnf: hnf_strings(&d.witness),
            complete: d.complete,
        }
    }
}

fn step_certificate(i: usize, r: &StepRecord) -> StepCertificate {
    let e = &r.expansion;
    let p: &ProtectRecord = &r.protection;
    StepCertificate {
        step: i + 1,
        index_set: e.index_set.clone(),
        c_w_sq: format_rat(&e.c_w_sq),
        lambda: format_rat(&e.lambda),
        achieved_c1: format_rat(&e.achieved_c1),
        achieved_c2_sq: format_rat(&e.achieved_c2_sq),
        torus_scalars: strs(e.s.scalars()),
        c1c2_sq: format_rat(&p.c1c2_sq),
        chain_hnf: p.chain.iter().map(hnf_strings).collect(),
        chain_covol_sq: strs(&p.chain_covol_sq),
        w_infinity_hnf: hnf_strings(&p.w_infinity),
        expanded_hnf: hnf_strings(&r.expanded),
        guard_certified: r.guard_certified,
        growth_pow: format_rat(&r.growth_pow),
        ratio_pow: format_rat(&r.ratio_pow),
        case_tag: r.case_tag.as_str().to_string(),
        delta_before: DeltaCertificate::from_result(&r.delta_before),
        delta_after: DeltaCertificate::from_result(&r.delta_after),
    }
}

impl DriveCertificate {
    pub fn new(start: &UnimodularLattice, c: &PushoutCertificate) -> Self {
        let steps: Vec<StepCertificate> = c.steps.iter().enumerate().map(|(i, r)| step_certificate(i, r)).collect();
        let trajectory = steps
            .iter()
            .map(|s| TrajectoryRow {
                step: s.step,
                delta_sq_pow: s.delta_after.delta_sq_pow.clone(),
                exponent: s.delta_after.exponent,
                delta_float: s.delta_after.delta_float,
                case_tag: s.case_tag.clone(),
                torus_scalars: s.torus_scalars.clone(),
                witness_hnf: s.delta_after.witness_hnf.clone(),
            })
            .collect();
        DriveCertificate {
            terminated: c.terminated.as_str().to_string(),
            eta0_sq: format_rat(&c.eta0_sq),
            eta0_float: c.eta0_float(),
            eta0_overridden: c.eta0_overridden,
            step_bound: c.step_bound(),
            block_dims: c.composed.block_dims().to_vec(),
            initial_lattice: LatticeFile::from_lattice(start, None),
            initial_delta: DeltaCertificate::from_result(&c.initial_delta),
            steps,
            composed_scalars: strs(c.composed.scalars()),
            final_lattice: LatticeFile::from_lattice(&c.final_lattice, None),
            final_delta: DeltaCertificate::from_result(&c.final_delta),
            shortest_vector_sq: format_rat(&c.shortest_vector_sq),
            trajectory,
        }
    }
}

// ---- re-validation ----

const CERT: &str = "certificate";

fn bad(field: &str, message: impl Into<String>) -> CliError {
    CliError::input(CERT, field, message)
}

/// Parses a rational that must already be in canonical `p/q` form.
pub fn canonical_rat(field: &str, s: &str) -> Result<Rat, CliError> {
    let x = parse_rat(s).map_err(|_| bad(field, format!("invalid rational {s:?}")))?;
    if format_rat(&x) != s {
        return Err(bad(field, format!("{s:?} is not in lowest-terms p/q form")));
    }
    Ok(x)
}

fn canonical_rats(field: &str, xs: &[String]) -> Result<Vec<Rat>, CliError> {
    xs.iter().enumerate().map(|(i, s)| canonical_rat(&format!("{field}[{i}]"), s)).collect()
}

fn check(cond: bool, field: &str, message: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(bad(field, message))
    }
}

pub fn parse_hnf(field: &str, rows: &[Vec<String>], n: usize) -> Result<RationalSubspace, CliError> {
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        check(r.len() == n, field, "row length differs from the dimension")?;
        let row = r
            .iter()
            .map(|s| {
                let x: Int = s.parse().map_err(|_| bad(&format!("{field}[{i}]"), format!("invalid integer {s:?}")))?;
                check(x.to_string() == *s, field, "integer not in canonical form")?;
                Ok(x)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        parsed.push(row);
    }
    RationalSubspace::from_canonical_basis(IntMatrix::from_rows(n, parsed)).map_err(|e| bad(field, e.to_string()))
}

impl DeltaCertificate {
    /// Re-parses every field and checks it against `lat`.
    pub fn validate(&self, field: &str, lat: &UnimodularLattice) -> Result<DeltaResult, CliError> {
        let n = lat.dim();
        let w = parse_hnf(&format!("{field}.witness_hnf"), &self.witness_hnf, n)?;
        check(w.dim() == self.witness_dim, field, "witness_dim does not match the witness")?;
        let delta_sq_pow = canonical_rat(&format!("{field}.delta_sq_pow"), &self.delta_sq_pow)?;
        let covol = canonical_rat(&format!("{field}.covolume_sq"), &self.covolume_sq)?;
        let d = DeltaResult::for_witness(lat, w, self.complete);
        check(d.exponent == self.exponent, field, "exponent is not lcm(1..N)")?;
        check(d.covolume_sq == covol, field, "covolume_sq does not match the witness")?;
        check(d.delta_sq_pow == delta_sq_pow, field, "delta_sq_pow does not match the witness")?;
        check(d.delta_float == self.delta_float, field, "delta_float does not match delta_sq_pow")?;
        Ok(d)
    }
}

impl DriveCertificate {
    /// Re-validates the whole trajectory from the recorded start lattice.
    pub fn validate(&self) -> Result<(), CliError> {
        let start = self.initial_lattice.validate(CERT)?;
        let end = self.final_lattice.validate(CERT)?;
        let eta0_sq = canonical_rat("eta0_sq", &self.eta0_sq)?;
        check(eta0_sq.is_positive(), "eta0_sq", "must be positive")?;
        check(((log2_rat(&eta0_sq) / 2.0).exp2()) == self.eta0_float, "eta0_float", "does not match eta0_sq")?;
        check(
            ["ReachedEta0", "MaxSteps", "Incomplete"].contains(&self.terminated.as_str()),
            "terminated",
            "unknown status",
        )?;
        let mut before = self.initial_delta.validate("initial_delta", &start)?;
        let mut lat = start.clone();
        let mut composed: Option<TorusElement> = None;
        check(self.trajectory.len() == self.steps.len(), "trajectory", "one row per step expected")?;
        for (i, s) in self.steps.iter().enumerate() {
            let f = format!("steps[{i}]");
            check(s.step == i + 1, &f, "steps out of order")?;
            let scalars = canonical_rats(&format!("{f}.torus_scalars"), &s.torus_scalars)?;
            let t = TorusElement::new(scalars, self.block_dims.clone()).map_err(|e| bad(&f, e.to_string()))?;
            check(s.delta_before == DeltaCertificate::from_result(&before), &f, "delta_before differs from the previous state")?;
            let next = t.apply(&lat);
            let after = s.delta_after.validate(&format!("{f}.delta_after"), &next)?;
            let ratio = canonical_rat(&format!("{f}.ratio_pow"), &s.ratio_pow)?;
            check(ratio == &after.delta_sq_pow / &before.delta_sq_pow, &f, "ratio_pow is not after/before")?;
            let growth = canonical_rat(&format!("{f}.growth_pow"), &s.growth_pow)?;
            check(
                after.delta_sq_pow >= (&growth * &before.delta_sq_pow).min(Rat::one()),
                &f,
                "recorded growth is not achieved",
            )?;
            for (field, x) in [
                ("c_w_sq", &s.c_w_sq),
                ("lambda", &s.lambda),
                ("achieved_c1", &s.achieved_c1),
                ("achieved_c2_sq", &s.achieved_c2_sq),
                ("c1c2_sq", &s.c1c2_sq),
            ] {
                canonical_rat(&format!("{f}.{field}"), x)?;
            }
            let n = lat.dim();
            let chain = s
                .chain_hnf
                .iter()
                .enumerate()
                .map(|(j, h)| parse_hnf(&format!("{f}.chain_hnf[{j}]"), h, n))
                .collect::<Result<Vec<_>, _>>()?;
            let covols = canonical_rats(&format!("{f}.chain_covol_sq"), &s.chain_covol_sq)?;
            let actual: Vec<Rat> = chain.iter().map(|w| covolume_sq(&lat, w)).collect();
            check(covols == actual, &f, "chain covolumes do not match")?;
            let winf = parse_hnf(&format!("{f}.w_infinity_hnf"), &s.w_infinity_hnf, n)?;
            check(chain.last() == Some(&winf), &f, "chain does not end at w_infinity")?;
            parse_hnf(&format!("{f}.expanded_hnf"), &s.expanded_hnf, n)?;
            check(["I", "II", "none"].contains(&s.case_tag.as_str()), &f, "unknown case tag")?;
            let row = &self.trajectory[i];
            check(
                row.step == s.step
                    && row.delta_sq_pow == s.delta_after.delta_sq_pow
                    && row.exponent == s.delta_after.exponent
                    && row.delta_float == s.delta_after.delta_float
                    && row.case_tag == s.case_tag
                    && row.torus_scalars == s.torus_scalars
                    && row.witness_hnf == s.delta_after.witness_hnf,
                &format!("trajectory[{i}]"),
                "row differs from its step",
            )?;
            composed = Some(match composed {
                Some(c) => c.compose(&t),
                None => t,
            });
            lat = next;
            before = after;
        }
        check(lat == end, "final_lattice", "is not the composed element applied to the start")?;
        let scalars = canonical_rats("composed_scalars", &self.composed_scalars)?;
        if let Some(c) = &composed {
            check(c.scalars() == scalars.as_slice(), "composed_scalars", "is not the product of the steps")?;
        } else {
            check(scalars.iter().all(One::is_one), "composed_scalars", "must be the identity without steps")?;
        }
        check(self.final_delta == DeltaCertificate::from_result(&before), "final_delta", "differs from the last state")?;
        canonical_rat("shortest_vector_sq", &self.shortest_vector_sq)?;
        Ok(())
    }
}

/// Writes the trajectory as CSV with the fixed header. `delta_num` is the
/// exact `p/q` power and `delta_den_pow` the root taken: `δ = delta_num^{1/delta_den_pow}`.
pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let hnf: Vec<String> = r.witness_hnf.iter().map(|row| row.join(" ")).collect();
        w.write_record([
            r.step.to_string(),
            r.delta_sq_pow.clone(),
            (2 * r.exponent).to_string(),
            r.delta_float.to_string(),
            r.case_tag.clone(),
            r.torus_scalars.join(" "),
            hnf.join(";"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Parses CSV written by [`trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::input("csv", "header", e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::input("csv", "header", "unexpected columns"));
    }
    let mut out = vec![];
    for (i, rec) in r.records().enumerate() {
        let line = format!("line {}", i + 2);
        let rec = rec.map_err(|e| CliError::input("csv", &line, e.to_string()))?;
        let num = |k: usize| rec[k].parse::<u64>().map_err(|_| CliError::input("csv", &line, format!("bad {}", CSV_HEADER[k])));
        let den_pow = num(2)?;
        if den_pow % 2 != 0 {
            return Err(CliError::input("csv", &line, "delta_den_pow must be even"));
        }
        canonical_rat(&line, &rec[1])?;
        let words = |s: &str| s.split(' ').filter(|w| !w.is_empty()).map(str::to_string).collect::<Vec<_>>();
        out.push(TrajectoryRow {
            step: num(0)? as usize,
            delta_sq_pow: rec[1].to_string(),
            exponent: (den_pow / 2) as u32,
            delta_float: rec[3].parse().map_err(|_| CliError::input("csv", &line, "bad delta_float"))?,
            case_tag: rec[4].to_string(),
            torus_scalars: words(&rec[5]),
            witness_hnf: rec[6].split(';').map(words).collect(),
        });
    }
    Ok(out)
}
