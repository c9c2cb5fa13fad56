//! Config parsing, validation, and canonical serialization.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eprb::{BipartiteState, MeasurementOrder};
use crate::error::Error;
use crate::hilbert::{qubit_basis, ComplexMatrix, ObservableBasis, StateVector};
use crate::tol;

use super::ScenarioError;

/// Which experiment a config requests. Names match the `scenario` strings
/// accepted in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Theorem1,
    Theorem2,
    Retrodiction,
    Eprb,
    DualEnsemble,
    Chain,
}

impl Scenario {
    pub fn parse(name: &str) -> Result<Self, ScenarioError> {
        match name {
            "theorem1" => Ok(Self::Theorem1),
            "theorem2" => Ok(Self::Theorem2),
            "retrodiction" => Ok(Self::Retrodiction),
            "eprb" => Ok(Self::Eprb),
            "dual-ensemble" => Ok(Self::DualEnsemble),
            "chain" => Ok(Self::Chain),
            other => Err(ScenarioError::UnknownScenario(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Theorem1 => "theorem1",
            Self::Theorem2 => "theorem2",
            Self::Retrodiction => "retrodiction",
            Self::Eprb => "eprb",
            Self::DualEnsemble => "dual-ensemble",
            Self::Chain => "chain",
        }
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self, Self::Eprb | Self::DualEnsemble | Self::Chain)
    }
}

/// Validated input data of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioInput {
    Single { state: StateVector, basis: ObservableBasis },
    Bipartite { state: BipartiteState, order: MeasurementOrder },
}

/// Fully validated scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    /// Bounded by `i64::MAX`, the largest integer TOML can carry; the
    /// parser never produces more and [`Config::canonical_toml`] relies
    /// on it.
    pub trials: u64,
    /// Bounded by `i64::MAX`, like `trials`.
    pub seed: u64,
    /// Extra repeated channel-1 measurements in the chain scenario.
    pub steps: usize,
    /// Support threshold for the statement scenarios.
    pub eps: f64,
    pub out: Option<PathBuf>,
    pub records: Option<PathBuf>,
    pub input: ScenarioInput,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_STEPS: usize = 1;

/// Raw config file layout. Scalar keys come before the table sections so
/// the canonical serialization is valid TOML.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    records: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<StateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<BasisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis1: Option<BasisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis2: Option<BasisSection>,
}

/// Complex numbers appear in configs as `[re, im]` pairs.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// A basis is either a two-dimensional analyzer `angle` shorthand or an
/// explicit eigenvalue list plus one eigenvector per row.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<[f64; 2]>>>,
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn from_complex(amps: &[Complex64]) -> Vec<[f64; 2]> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

fn build_basis(section: &BasisSection, dim: Option<usize>) -> Result<ObservableBasis, ScenarioError> {
    match (&section.angle, &section.vectors, &section.eigenvalues) {
        (Some(angle), None, None) => {
            if let Some(d) = dim {
                if d != 2 {
                    return Err(ScenarioError::Config(Error::DimensionMismatch {
                        left: d,
                        right: 2,
                    }));
                }
            }
            Ok(qubit_basis(*angle))
        }
        (None, Some(vectors), Some(eigenvalues)) => {
            let eigenvectors = vectors
                .iter()
                .map(|row| StateVector::new(to_complex(row)))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(ObservableBasis::new(eigenvectors, eigenvalues.clone())?)
        }
        _ => Err(ScenarioError::Syntax(
            "a basis needs either `angle` or both `vectors` and `eigenvalues`".to_string(),
        )),
    }
}

fn basis_section(basis: &ObservableBasis) -> BasisSection {
    BasisSection {
        angle: None,
        eigenvalues: Some(basis.eigenvalues().to_vec()),
        vectors: Some(basis.eigenvectors().iter().map(|v| from_complex(v.amplitudes())).collect()),
    }
}

/// Parses and validates a config file. Defaults: `trials` 100000, `seed`
/// 42, `steps` 1, `eps` the support threshold, computational bases.
pub fn parse_config(text: &str) -> Result<Config, ScenarioError> {
    let raw: ConfigFile =
        toml::from_str(text).map_err(|e| ScenarioError::Syntax(e.to_string()))?;
    let scenario = Scenario::parse(&raw.scenario)?;
    let trials = raw.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = raw.seed.unwrap_or(DEFAULT_SEED);
    let steps = raw.steps.unwrap_or(DEFAULT_STEPS);
    let eps = raw.eps.unwrap_or(tol::SUPPORT_EPS);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(ScenarioError::Syntax(format!("eps must lie in (0, 1), got {eps}")));
    }

    let state_section = raw
        .state
        .as_ref()
        .ok_or_else(|| ScenarioError::Syntax("missing [state] section".to_string()))?;

    let input = if scenario.is_bipartite() {
        let matrix = state_section.matrix.as_ref().ok_or_else(|| {
            ScenarioError::Syntax("bipartite scenarios need state.matrix".to_string())
        })?;
        let rows: Vec<Vec<Complex64>> = matrix.iter().map(|row| to_complex(row)).collect();
        let amplitudes = ComplexMatrix::from_rows(rows)?;
        let (d1, d2) = (amplitudes.rows(), amplitudes.cols());
        check_dims(&raw.dims, &[d1, d2])?;
        let basis1 = match &raw.basis1 {
            Some(section) => build_basis(section, Some(d1))?,
            None => ObservableBasis::computational(d1),
        };
        let basis2 = match &raw.basis2 {
            Some(section) => build_basis(section, Some(d2))?,
            None => ObservableBasis::computational(d2),
        };
        let order = match raw.order.as_deref() {
            None | Some("1-then-2") => MeasurementOrder::Channel1First,
            Some("2-then-1") => MeasurementOrder::Channel2First,
            Some(other) => {
                return Err(ScenarioError::Syntax(format!(
                    "order must be \"1-then-2\" or \"2-then-1\", got {other:?}"
                )))
            }
        };
        let state = BipartiteState::new(amplitudes, basis1, basis2)?;
        ScenarioInput::Bipartite { state, order }
    } else {
        let vector = state_section.vector.as_ref().ok_or_else(|| {
            ScenarioError::Syntax("single-system scenarios need state.vector".to_string())
        })?;
        let state = StateVector::new(to_complex(vector))?;
        check_dims(&raw.dims, &[state.dim()])?;
        let basis = match &raw.basis {
            Some(section) => build_basis(section, Some(state.dim()))?,
            None => ObservableBasis::computational(state.dim()),
        };
        if basis.dim() != state.dim() {
            return Err(ScenarioError::Config(Error::DimensionMismatch {
                left: basis.dim(),
                right: state.dim(),
            }));
        }
        ScenarioInput::Single { state, basis }
    };

    Ok(Config {
        scenario,
        trials,
        seed,
        steps,
        eps,
        out: raw.out.map(PathBuf::from),
        records: raw.records.map(PathBuf::from),
        input,
    })
}

fn check_dims(declared: &Option<Vec<usize>>, actual: &[usize]) -> Result<(), ScenarioError> {
    if let Some(dims) = declared {
        if dims != actual {
            return Err(ScenarioError::Config(Error::DimensionMismatch {
                left: dims.first().copied().unwrap_or(0),
                right: actual[0],
            }));
        }
    }
    Ok(())
}

impl Config {
    /// Canonical TOML form: every default made explicit and every basis
    /// expanded to eigenvalues plus eigenvectors, so that parsing the
    /// output reproduces this config exactly.
    pub fn canonical_toml(&self) -> String {
        let mut raw = ConfigFile {
            scenario: self.scenario.name().to_string(),
            trials: Some(self.trials),
            seed: Some(self.seed),
            steps: Some(self.steps),
            eps: Some(self.eps),
            out: self.out.as_ref().map(|p| p.display().to_string()),
            records: self.records.as_ref().map(|p| p.display().to_string()),
            ..ConfigFile::default()
        };
        match &self.input {
            ScenarioInput::Single { state, basis } => {
                raw.dims = Some(vec![state.dim()]);
                raw.state = Some(StateSection {
                    vector: Some(from_complex(state.amplitudes())),
                    matrix: None,
                });
                raw.basis = Some(basis_section(basis));
            }
            ScenarioInput::Bipartite { state, order } => {
                raw.dims = Some(vec![state.d1(), state.d2()]);
                raw.order = Some(
                    match order {
                        MeasurementOrder::Channel1First => "1-then-2",
                        MeasurementOrder::Channel2First => "2-then-1",
                    }
                    .to_string(),
                );
                let matrix: Vec<Vec<[f64; 2]>> = (0..state.d1())
                    .map(|i| (0..state.d2()).map(|j| {
                        let z = state.amplitude(i, j);
                        [z.re, z.im]
                    })
                    .collect())
                    .collect();
                raw.state = Some(StateSection { vector: None, matrix: Some(matrix) });
                raw.basis1 = Some(basis_section(state.basis1()));
                raw.basis2 = Some(basis_section(state.basis2()));
            }
        }
        toml::to_string(&raw).expect("canonical config serializes")
    }

    /// Hex digest of the canonical form; identifies the effective config in
    /// reports.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let hash = Sha256::digest(self.canonical_toml().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
