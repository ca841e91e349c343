//! Subcommand implementations. Each returns the text to emit and the exit code.

use nondiv_core::enumeration::short_vectors_with_budget;
use nondiv_core::rat::{format_rat, parse_rat};
use nondiv_core::sampling::random_unimodular;
use nondiv_core::{
    delta_m_with_budget, drive, oracle_delta_m, shortest_vector_sq, EnumerationError, Rat, Termination,
    UnimodularLattice,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{exit, CliError};
use crate::files::{load_lattice, load_scenario, LatticeFile, LoadedScenario};
use crate::report::{
    trajectory_csv, DeltaCertificate, DriveCertificate, OracleReport, ShortVectorEntry, ShortVectorReport,
};

/// Largest dimension the brute-force oracle accepts.
pub const ORACLE_MAX_DIM: usize = 5;
/// Entry bound for seeded random lattices.
pub const SAMPLE_ENTRY_BOUND: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Inputs shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub scenario: Option<String>,
    pub lattice: Option<String>,
    pub seed: Option<u64>,
    pub vector_budget: Option<usize>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
    /// Extra status for stderr.
    pub note: Option<String>,
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// A seeded random unimodular lattice of dimension `n`, LLL-reduced.
pub fn sample_lattice(n: usize, seed: u64) -> UnimodularLattice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unimodular(&mut rng, n, SAMPLE_ENTRY_BOUND).lll_reduced().0
}

struct Inputs {
    loaded: LoadedScenario,
    lattice: UnimodularLattice,
}

fn inputs(c: &Common) -> Result<Inputs, CliError> {
    let path = c.scenario.as_deref().ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
    let mut loaded = load_scenario(path)?;
    if let Some(b) = c.vector_budget {
        if b == 0 {
            return Err(CliError::Usage("--vector-budget must be positive".into()));
        }
        loaded.config.vector_budget = b;
    }
    let n = loaded.scenario.dim();
    let lattice = match (&c.lattice, c.seed) {
        (Some(p), _) => load_lattice(p)?,
        (None, Some(seed)) => sample_lattice(n, seed),
        (None, None) => return Err(CliError::Usage("--lattice or --seed is required".into())),
    };
    if lattice.dim() != n {
        return Err(CliError::Usage(format!(
            "lattice dimension {} does not match scenario dimension {n}",
            lattice.dim()
        )));
    }
    Ok(Inputs { loaded, lattice })
}

fn json_only(c: &Common, command: &str) -> Result<(), CliError> {
    match c.format {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Usage(format!("--format csv is only available for drive, not {command}"))),
    }
}

pub fn cmd_delta(c: &Common) -> Result<Outcome, CliError> {
    json_only(c, "delta")?;
    let i = inputs(c)?;
    let d = delta_m_with_budget(&i.lattice, &i.loaded.scenario, i.loaded.config.vector_budget);
    let code = if d.complete { exit::OK } else { exit::BUDGET_EXCEEDED };
    let note = (!d.complete).then(|| "vector budget exceeded; delta_sq_pow is an upper bound".to_string());
    Ok(Outcome { text: json(&DeltaCertificate::from_result(&d)), code, note })
}

#[derive(Debug, Clone, Default)]
pub struct DriveFlags {
    pub max_steps: Option<usize>,
    pub eta0: Option<String>,
}

pub fn cmd_drive(c: &Common, flags: &DriveFlags) -> Result<Outcome, CliError> {
    let i = inputs(c)?;
    let mut cfg = i.loaded.config.clone();
    if let Some(m) = flags.max_steps {
        cfg.max_steps = m;
    }
    if let Some(e) = &flags.eta0 {
        cfg.eta0 = Some(parse_rat(e).map_err(|_| CliError::Usage(format!("--eta0: invalid rational {e:?}")))?);
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let cert = drive(&i.lattice, &i.loaded.scenario, &cfg)?;
    let code = match cert.terminated {
        Termination::ReachedEta0 => exit::OK,
        Termination::MaxSteps => exit::MAX_STEPS,
        Termination::Incomplete => exit::INCOMPLETE,
    };
    let report = DriveCertificate::new(&i.lattice, &cert);
    let text = match c.format {
        Format::Json => json(&report),
        Format::Csv => trajectory_csv(&report.trajectory),
    };
    let note = Some(format!("terminated: {} after {} step(s)", report.terminated, report.steps.len()));
    Ok(Outcome { text, code, note })
}

pub fn cmd_oracle(c: &Common, hnf_bound: i64) -> Result<Outcome, CliError> {
    json_only(c, "oracle")?;
    if hnf_bound < 1 {
        return Err(CliError::Usage("--hnf-bound must be at least 1".into()));
    }
    let i = inputs(c)?;
    let n = i.lattice.dim();
    if n > ORACLE_MAX_DIM {
        return Err(CliError::Usage(format!("oracle supports dimension at most {ORACLE_MAX_DIM}, got {n}")));
    }
    let sc = &i.loaded.scenario;
    let d = delta_m_with_budget(&i.lattice, sc, i.loaded.config.vector_budget);
    let o = oracle_delta_m(&i.lattice, sc, hnf_bound);
    let agree = d.complete && d.delta_sq_pow == o.delta_sq_pow && d.witness == o.witness;
    let verdict = if agree { "AGREE" } else { "DISAGREE" };
    let code = match (d.complete, agree) {
        (false, _) => exit::BUDGET_EXCEEDED,
        (true, true) => exit::OK,
        (true, false) => exit::FAILURE,
    };
    let report = OracleReport {
        hnf_bound,
        delta_m: DeltaCertificate::from_result(&d),
        oracle: DeltaCertificate::from_result(&o),
        verdict: verdict.to_string(),
    };
    Ok(Outcome { text: json(&report), code, note: Some(verdict.to_string()) })
}

pub fn cmd_shortvec(c: &Common, bound: Option<&str>) -> Result<Outcome, CliError> {
    json_only(c, "shortvec")?;
    let i = inputs(c)?;
    let shortest = shortest_vector_sq(&i.lattice);
    let bound: Rat = match bound {
        Some(b) => parse_rat(b).map_err(|_| CliError::Usage(format!("--bound: invalid rational {b:?}")))?,
        None => shortest.clone(),
    };
    let (vectors, complete) = match short_vectors_with_budget(&i.lattice, &bound, i.loaded.config.vector_budget) {
        Ok(vs) => (vs, true),
        Err(EnumerationError::BudgetExceeded { .. }) => (vec![], false),
    };
    let report = ShortVectorReport {
        shortest_sq: format_rat(&shortest),
        bound_sq: format_rat(&bound),
        complete,
        vectors: vectors
            .iter()
            .map(|v| ShortVectorEntry {
                coords: v.coords.iter().map(|x| x.to_string()).collect(),
                norm_sq: format_rat(&v.norm_sq),
            })
            .collect(),
    };
    let code = if complete { exit::OK } else { exit::BUDGET_EXCEEDED };
    Ok(Outcome { text: json(&report), code, note: None })
}

/// Writes a seeded random lattice file of dimension `n`.
pub fn cmd_sample(n: usize, seed: u64) -> Result<Outcome, CliError> {
    if !(2..=8).contains(&n) {
        return Err(CliError::Usage(format!("--dimension must lie in 2..=8, got {n}")));
    }
    let lat = sample_lattice(n, seed);
    Ok(Outcome { text: json(&LatticeFile::from_lattice(&lat, Some(seed))), code: exit::OK, note: None })
}
