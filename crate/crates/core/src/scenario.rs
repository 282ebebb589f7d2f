//! Scenario files: a model or explicit generator, a time grid, tolerances,
//! a seed and the analyses to run.
//!
//! ```toml
//! name = "dephasing"
//! seed = 7
//! analyses = ["cptp", "split", "pointer"]
//!
//! [model]
//! name = "dephasing_qubit"
//! gamma = 1.0
//!
//! [t_grid]
//! kind = "geometric"
//! t_start = 1e-3
//! t_end = 10.0
//! points = 25
//! ```
//!
//! Complex entries are `[re, im]` pairs; matrices are lists of rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contraction::DEFAULT_SEARCH_BUDGET;
use crate::error::{Error, Result};
use crate::lindblad::{LindbladGenerator, TimeGrid};
use crate::models::{random_density, ModelPreset, PRESET_NAMES};
use crate::numkernel::{c, pauli_z, CMatrix, CVector, DensityMatrix, HermitianOperator};
use crate::seed::stream_rng;
use crate::tolerance::ToleranceConfig;

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &CMatrix) -> MatrixLiteral {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn decode_matrix(rows: &MatrixLiteral, field: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!(
            "{field}: expected a non-empty square matrix"
        )));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        c(rows[i][j][0], rows[i][j][1])
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Cptp,
    Split,
    Pointer,
    Contraction,
    FixedPoint,
    Entropy,
    /// Cross-check of classical pointer states against a unique fixed state.
    Equivalence,
}

impl Analysis {
    pub const ALL: [Analysis; 7] = [
        Analysis::Cptp,
        Analysis::Split,
        Analysis::Pointer,
        Analysis::Contraction,
        Analysis::FixedPoint,
        Analysis::Entropy,
        Analysis::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Cptp => "cptp",
            Analysis::Split => "split",
            Analysis::Pointer => "pointer",
            Analysis::Contraction => "contraction",
            Analysis::FixedPoint => "fixed_point",
            Analysis::Entropy => "entropy",
            Analysis::Equivalence => "equivalence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixLiteral>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixLiteral>,
    #[serde(default)]
    pub jump_ops: Vec<MatrixLiteral>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContractionOptions {
    pub search_budget: usize,
    /// Defaults to the first grid time at or after `0.1 / rate_scale`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    pub orbit_samples: usize,
    pub gauge_samples: usize,
}

impl Default for ContractionOptions {
    fn default() -> Self {
        Self {
            search_budget: DEFAULT_SEARCH_BUDGET,
            t_min: None,
            orbit_samples: 20,
            gauge_samples: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    analyses: Option<Vec<Analysis>>,
    #[serde(default)]
    initial_states: Option<Vec<String>>,
    #[serde(default)]
    model: Option<ModelSpec>,
    #[serde(default)]
    system: Option<SystemSpec>,
    #[serde(default)]
    t_grid: Option<TimeGrid>,
    #[serde(default)]
    tolerances: Option<toml::Table>,
    #[serde(default)]
    contraction: Option<ContractionOptions>,
}

pub const DEFAULT_INITIAL_STATES: [&str; 3] = ["plus", "maximally_mixed", "excited"];

/// Named states: `ground` (|0⟩), `excited` (|d−1⟩), `plus` ((|0⟩+|1⟩)/√2),
/// `maximally_mixed` (I/d), `basis_k` (|k⟩) and `random` (seeded).
pub fn named_state(name: &str, d: usize, seed: u64) -> Result<DensityMatrix> {
    let ket = |k: usize| {
        let mut v = CVector::zeros(d);
        v[k] = c(1.0, 0.0);
        v
    };
    match name {
        "ground" => DensityMatrix::pure(&ket(0)),
        "excited" => DensityMatrix::pure(&ket(d - 1)),
        "plus" if d >= 2 => DensityMatrix::pure(&(ket(0) + ket(1))),
        "maximally_mixed" => Ok(DensityMatrix::maximally_mixed(d)),
        "random" => Ok(random_density(d, &mut stream_rng(seed, u64::MAX))),
        _ => match name
            .strip_prefix("basis_")
            .and_then(|k| k.parse::<usize>().ok())
        {
            Some(k) if k < d => DensityMatrix::pure(&ket(k)),
            _ => Err(Error::InvalidInput(format!(
                "unknown initial state '{name}' for dimension {d}"
            ))),
        },
    }
}

/// A validated scenario with its generator expanded to explicit matrices.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: Option<ModelSpec>,
    pub generator: LindbladGenerator,
    pub t_grid: TimeGrid,
    pub tolerances: ToleranceConfig,
    pub seed: u64,
    /// Deduplicated, in execution order.
    pub analyses: Vec<Analysis>,
    pub initial_states: Vec<(String, DensityMatrix)>,
    pub contraction: ContractionOptions,
}

/// Where defaults come from when the scenario file leaves them out.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Replaces any seed given in the file.
    pub seed_override: Option<u64>,
    /// Used when the file gives no seed.
    pub default_seed: Option<u64>,
    pub base_tolerances: Option<ToleranceConfig>,
}

fn expand_model(spec: &ModelSpec) -> Result<ModelPreset> {
    let gamma = spec.gamma.unwrap_or(1.0);
    let preset = match spec.name.as_str() {
        "dephasing_qubit" => ModelPreset::DephasingQubit { gamma },
        "amplitude_damping_qubit" => ModelPreset::AmplitudeDampingQubit { gamma },
        "depolarizing_qubit" => ModelPreset::DepolarizingQubit { gamma },
        "unitary" => ModelPreset::Unitary {
            hamiltonian: match &spec.hamiltonian {
                Some(h) => decode_matrix(h, "model.hamiltonian")?,
                None => pauli_z(),
            },
        },
        "block_dephasing" => ModelPreset::BlockDephasing {
            blocks: spec.blocks.clone().ok_or_else(|| {
                Error::InvalidInput("model.blocks: required for block_dephasing".into())
            })?,
            gamma,
        },
        other => {
            return Err(Error::InvalidInput(format!(
                "model.name: unknown preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    if let Some(d) = spec.dim {
        if d != preset.dim() {
            return Err(Error::InvalidInput(format!(
                "model.dim: {d} does not match preset dimension {}",
                preset.dim()
            )));
        }
    }
    Ok(preset)
}

fn build_system(sys: &SystemSpec) -> Result<LindbladGenerator> {
    let d = sys.dim;
    if d == 0 {
        return Err(Error::InvalidInput("system.dim: must be positive".into()));
    }
    let check = |m: CMatrix, field: &str| -> Result<CMatrix> {
        if m.nrows() != d {
            return Err(Error::InvalidInput(format!(
                "{field}: expected {d}x{d}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    };
    let h = match &sys.hamiltonian {
        Some(h) => check(
            decode_matrix(h, "system.hamiltonian")?,
            "system.hamiltonian",
        )?,
        None => CMatrix::zeros(d, d),
    };
    let h = HermitianOperator::new(h, 1e-12)
        .map_err(|e| Error::InvalidInput(format!("system.hamiltonian: {e}")))?;
    let jumps = sys
        .jump_ops
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let field = format!("system.jump_ops[{k}]");
            check(decode_matrix(m, &field)?, &field)
        })
        .collect::<Result<Vec<_>>>()?;
    LindbladGenerator::new(h, jumps)
}

fn merge_tolerances(
    base: ToleranceConfig,
    overrides: Option<&toml::Table>,
) -> Result<ToleranceConfig> {
    let Some(over) = overrides else {
        return Ok(base);
    };
    let mut table = toml::Table::try_from(base).map_err(|e| Error::Inconsistency(e.to_string()))?;
    for (k, v) in over {
        table.insert(k.clone(), v.clone());
    }
    ToleranceConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| Error::InvalidInput(format!("tolerances: {}", e.to_string().trim())))
}

impl Scenario {
    /// Parses and validates scenario text. `origin` names the source in
    /// diagnostics.
    pub fn parse(text: &str, origin: &str, opts: &LoadOptions) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: origin.to_string(),
            message,
        };
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| parse_err(e.to_string().trim_end().to_string()))?;
        Self::from_file(file, opts).map_err(|e| match e {
            Error::Parse { .. } => e,
            other => parse_err(other.to_string()),
        })
    }

    fn from_file(file: ScenarioFile, opts: &LoadOptions) -> Result<Self> {
        let generator = match (&file.model, &file.system) {
            (Some(m), None) => expand_model(m)?.generator()?,
            (None, Some(s)) => build_system(s)?,
            _ => {
                return Err(Error::InvalidInput(
                    "exactly one of [model] or [system] is required".into(),
                ))
            }
        };
        let t_grid = file.t_grid.unwrap_or_else(|| generator.default_time_grid());
        t_grid.validate()?;
        let seed = opts
            .seed_override
            .or(file.seed)
            .or(opts.default_seed)
            .unwrap_or(0);
        let tolerances = merge_tolerances(
            opts.base_tolerances.unwrap_or_default(),
            file.tolerances.as_ref(),
        )?;
        let mut analyses = file.analyses.unwrap_or_else(|| Analysis::ALL.to_vec());
        analyses.sort();
        analyses.dedup();
        let d = generator.dim();
        let names: Vec<String> = file.initial_states.unwrap_or_else(|| {
            DEFAULT_INITIAL_STATES
                .iter()
                .map(|s| s.to_string())
                .collect()
        });
        let initial_states = names
            .into_iter()
            .map(|n| named_state(&n, d, seed).map(|s| (n, s)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidInput(format!("initial_states: {e}")))?;
        let contraction = file.contraction.unwrap_or_default();
        if contraction.search_budget == 0 {
            return Err(Error::InvalidInput(
                "contraction.search_budget: must be positive".into(),
            ));
        }
        Ok(Scenario {
            name: file.name,
            model: file.model,
            generator,
            t_grid,
            tolerances,
            seed,
            analyses,
            initial_states,
            contraction,
        })
    }

    /// Scenario for a built-in preset with every analysis and default
    /// settings.
    pub fn for_model(name: &str, spec: ModelSpec) -> Result<Self> {
        let file = ScenarioFile {
            name: name.to_string(),
            seed: None,
            analyses: None,
            initial_states: None,
            model: Some(spec),
            system: None,
            t_grid: None,
            tolerances: None,
            contraction: None,
        };
        Self::from_file(file, &LoadOptions::default())
    }

    pub fn times(&self) -> Vec<f64> {
        self.t_grid.times().expect("grid validated on load")
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }
}

pub fn load_scenario(path: &Path, opts: &LoadOptions) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::parse(&text, &path.display().to_string(), opts)
}
