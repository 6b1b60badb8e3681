//! Run configuration: a JSON config file merged with command-line overrides.

use std::path::Path;

use dfcert::{gamma_from_matrix, DfMap, GraphError, InfluenceWeights, InteractionMatrix, SimplexError, SolverConfig};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub gamma: Option<Vec<f64>>,
    pub interaction_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub solver: SolverOverrides,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub picard_tol: Option<f64>,
    pub picard_max_iters: Option<usize>,
    pub newton_tol: Option<f64>,
    pub newton_max_iters: Option<usize>,
    pub multistart_count: Option<usize>,
    pub cluster_radius: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Gamma(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

/// Resolved configuration shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: ModelSource,
    pub solver: SolverConfig,
}

/// Flag values that override the config file.
#[derive(Debug, Default, Clone)]
pub struct FlagOverrides {
    pub gamma: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub multistarts: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid config: {e}")))
    }
}

impl RunConfig {
    pub fn resolve(file: Option<ConfigFile>, flags: FlagOverrides) -> Result<Self, CliError> {
        let file = file.unwrap_or_default();
        let source = match (flags.gamma, file.gamma, file.interaction_matrix) {
            (Some(g), _, _) => ModelSource::Gamma(g),
            (None, Some(_), Some(_)) => {
                return Err(CliError::Parse(
                    "config provides both gamma and interaction_matrix".into(),
                ))
            }
            (None, Some(g), None) => ModelSource::Gamma(g),
            (None, None, Some(m)) => ModelSource::Matrix(m),
            (None, None, None) => {
                return Err(CliError::Parse(
                    "no model given: pass --gamma or a config with gamma or interaction_matrix".into(),
                ))
            }
        };

        let mut solver = SolverConfig::default();
        let o = file.solver;
        if let Some(v) = o.picard_tol {
            solver.picard_tol = v;
        }
        if let Some(v) = o.picard_max_iters {
            solver.picard_max_iters = v;
        }
        if let Some(v) = o.newton_tol {
            solver.newton_tol = v;
        }
        if let Some(v) = o.newton_max_iters {
            solver.newton_max_iters = v;
        }
        if let Some(v) = o.multistart_count {
            solver.multistart_count = v;
        }
        if let Some(v) = o.cluster_radius {
            solver.cluster_radius = v;
        }
        if let Some(v) = flags.seed.or(file.seed).or(o.seed) {
            solver.seed = v;
        }
        if let Some(v) = flags.delta.or(file.delta) {
            solver.delta = v;
        }
        if let Some(v) = flags.multistarts {
            solver.multistart_count = v;
        }
        solver.validate().map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(Self { source, solver })
    }

    pub fn build_map(&self) -> Result<DfMap, CliError> {
        let weights = match &self.source {
            ModelSource::Gamma(g) => InfluenceWeights::new(g.clone()).map_err(weights_error)?,
            ModelSource::Matrix(rows) => {
                let c = InteractionMatrix::new(rows.clone()).map_err(|e| CliError::Invariant(e.to_string()))?;
                gamma_from_matrix(&c).map_err(graph_error)?
            }
        };
        if self.solver.delta >= 1.0 / weights.dim() as f64 {
            return Err(CliError::Invariant(format!(
                "delta {} must be below 1/{}",
                self.solver.delta,
                weights.dim()
            )));
        }
        Ok(DfMap::new(weights))
    }
}

fn weights_error(e: SimplexError) -> CliError {
    match e {
        SimplexError::StarGraphWeight { .. } => CliError::Inadmissible(e.to_string()),
        other => CliError::Invariant(other.to_string()),
    }
}

fn graph_error(e: GraphError) -> CliError {
    match e {
        GraphError::StarGraphDetected { .. } | GraphError::NotStronglyConnected => {
            CliError::Inadmissible(e.to_string())
        }
        GraphError::Weights(w) => weights_error(w),
        other => CliError::Invariant(other.to_string()),
    }
}

/// A comma-separated vector argument.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

pub fn parse_coords(s: &str) -> Result<Coords, String> {
    parse_vector(s).map(Coords)
}

/// Parses `a,b,c` into floats.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
        .collect()
}
