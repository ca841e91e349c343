//! Scenario and lattice files.

use nondiv_core::rat::{format_rat, parse_rat};
use nondiv_core::rational_linalg::det;
use nondiv_core::{
    PushoutConfig, Rat, RatMatrix, Scenario, ScenarioError, UnimodularLattice,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FULL_BLOCK_SCALAR: &str = "full-block-scalar";

fn default_torus() -> String {
    FULL_BLOCK_SCALAR.to_string()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_multiplier: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_budget: Option<usize>,
}

/// Block structure, generators of `M` and push-out configuration. Blocks are
/// 1-based inclusive `[start, end]` ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dimension: usize,
    pub blocks: Vec<[usize; 2]>,
    #[serde(default)]
    pub m_generators: Vec<Vec<Vec<String>>>,
    #[serde(default = "default_torus")]
    pub torus: String,
    #[serde(default)]
    pub config: ConfigFile,
}

/// A lattice basis stored column by column, with its determinant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub dimension: usize,
    pub basis_columns: Vec<Vec<String>>,
    pub determinant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated scenario file.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub config: PushoutConfig,
}

pub fn read_text(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::input(file, format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

fn field_rat(file: &str, field: &str, s: &str) -> Result<Rat, CliError> {
    parse_rat(s).map_err(|_| CliError::input(file, field, format!("invalid rational {s:?}")))
}

fn block_text(b: &[usize; 2]) -> String {
    format!("[{},{}]", b[0], b[1])
}

impl ScenarioFile {
    pub fn validate(&self, file: &str) -> Result<LoadedScenario, CliError> {
        let n = self.dimension;
        if n < 2 {
            return Err(CliError::input(file, "dimension", format!("dimension {n} is below 2")));
        }
        if self.torus != FULL_BLOCK_SCALAR {
            return Err(CliError::input(file, "torus", format!("unsupported torus {:?}", self.torus)));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b[0] < 1 || b[0] > b[1] || b[1] > n {
                return Err(CliError::input(
                    file,
                    format!("blocks[{i}]"),
                    format!("range {} is not a non-empty range inside 1..{n}", block_text(b)),
                ));
            }
            for (j, c) in self.blocks[..i].iter().enumerate() {
                if b[0] <= c[1] && c[0] <= b[1] {
                    return Err(CliError::input(
                        file,
                        format!("blocks[{i}]"),
                        format!("range {} overlaps blocks[{j}] = {}", block_text(b), block_text(c)),
                    ));
                }
            }
        }
        let mut generators = Vec::with_capacity(self.m_generators.len());
        for (g, m) in self.m_generators.iter().enumerate() {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(CliError::input(file, format!("m_generators[{g}]"), format!("expected a {n}x{n} matrix")));
            }
            let mut rows = Vec::with_capacity(n);
            for (i, r) in m.iter().enumerate() {
                let row = r
                    .iter()
                    .enumerate()
                    .map(|(j, s)| field_rat(file, &format!("m_generators[{g}][{i}][{j}]"), s))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
            }
            generators.push(RatMatrix::from_rows(n, rows));
        }
        let blocks = self.blocks.iter().map(|b| b[0] - 1..b[1]).collect();
        let scenario = Scenario::new(n, blocks, generators).map_err(|e| scenario_error(file, e))?;

        let mut config = PushoutConfig::default();
        let c = &self.config;
        if let Some(s) = &c.lambda_multiplier {
            config.lambda_multiplier = field_rat(file, "config.lambda_multiplier", s)?;
        }
        if let Some(s) = &c.eta0 {
            config.eta0 = Some(field_rat(file, "config.eta0", s)?);
        }
        if let Some(m) = c.max_steps {
            config.max_steps = m;
        }
        if let Some(b) = c.vector_budget {
            config.vector_budget = b;
        }
        config.validate().map_err(|e| CliError::input(file, "config", e.to_string()))?;
        Ok(LoadedScenario { scenario, config })
    }

    /// The file describing `sc` with default configuration.
    pub fn from_scenario(sc: &Scenario) -> Self {
        ScenarioFile {
            dimension: sc.dim(),
            blocks: sc.blocks().iter().map(|b| [b.start + 1, b.end]).collect(),
            m_generators: sc.m_generators().iter().map(matrix_strings).collect(),
            torus: default_torus(),
            config: ConfigFile::default(),
        }
    }
}

fn scenario_error(file: &str, e: ScenarioError) -> CliError {
    let location = match &e {
        ScenarioError::DimensionTooSmall(_) => "dimension".to_string(),
        ScenarioError::BadBlock { index, .. } => format!("blocks[{index}]"),
        ScenarioError::NotPartition { .. } => "blocks".to_string(),
        ScenarioError::GeneratorShape { index, .. }
        | ScenarioError::GeneratorNotBlockDiagonal { index, .. }
        | ScenarioError::GeneratorDeterminant { index, .. } => format!("m_generators[{index}]"),
    };
    CliError::input(file, location, e.to_string())
}

pub fn matrix_strings(m: &RatMatrix) -> Vec<Vec<String>> {
    m.iter_rows().map(|r| r.iter().map(format_rat).collect()).collect()
}

impl LatticeFile {
    pub fn validate(&self, file: &str) -> Result<UnimodularLattice, CliError> {
        let n = self.dimension;
        if self.basis_columns.len() != n {
            return Err(CliError::input(
                file,
                "basis_columns",
                format!("expected {n} columns, found {}", self.basis_columns.len()),
            ));
        }
        let mut cols = Vec::with_capacity(n);
        for (j, c) in self.basis_columns.iter().enumerate() {
            if c.len() != n {
                return Err(CliError::input(
                    file,
                    format!("basis_columns[{j}]"),
                    format!("expected {n} entries, found {}", c.len()),
                ));
            }
            let col = c
                .iter()
                .enumerate()
                .map(|(i, s)| field_rat(file, &format!("basis_columns[{j}][{i}]"), s))
                .collect::<Result<Vec<_>, _>>()?;
            cols.push(col);
        }
        let basis = RatMatrix::from_rows(n, cols).transpose();
        let recorded = field_rat(file, "determinant", &self.determinant)?;
        let actual = det(&basis);
        if actual != recorded {
            return Err(CliError::input(
                file,
                "determinant",
                format!("recorded {} but the basis has determinant {}", self.determinant, format_rat(&actual)),
            ));
        }
        UnimodularLattice::new(basis).map_err(|e| CliError::input(file, "basis_columns", e.to_string()))
    }

    pub fn from_lattice(lat: &UnimodularLattice, seed: Option<u64>) -> Self {
        LatticeFile {
            dimension: lat.dim(),
            basis_columns: matrix_strings(&lat.basis().transpose()),
            determinant: format_rat(&det(lat.basis())),
            seed,
        }
    }
}

pub fn load_scenario(path: &str) -> Result<LoadedScenario, CliError> {
    let text = read_text(path)?;
    parse_json::<ScenarioFile>(path, &text)?.validate(path)
}

pub fn load_lattice(path: &str) -> Result<UnimodularLattice, CliError> {
    let text = read_text(path)?;
    parse_json::<LatticeFile>(path, &text)?.validate(path)
}
