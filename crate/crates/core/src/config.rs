//! Experiment configuration (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleFamily, EnsembleSpec};
use crate::error::{Error, Result};
use crate::motif::{Builtin, Motif};
use crate::scalar::parse_ratio;
use crate::Rational;

pub const SCHEMA_VERSION: u32 = 1;

/// A motif given by built-in name or by edge-list file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MotifRef {
    Name(Builtin),
    Builtin { builtin: Builtin },
    File { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleChoice {
    Dependent,
    Independent,
    BlockDependent,
    BlockIndependent,
}

impl EnsembleChoice {
    pub fn is_block(self) -> bool {
        matches!(self, EnsembleChoice::BlockDependent | EnsembleChoice::BlockIndependent)
    }
}

/// Block layout: block `c` has `weights[c] * n` vertices; `p[i][j]` is the
/// density (dependent) or edge probability (independent) between blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockConfig {
    pub weights: Vec<u32>,
    pub p: Vec<Vec<String>>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_bootstrap() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub motifs: Vec<MotifRef>,
    pub ensembles: Vec<EnsembleChoice>,
    /// Edge density as `"p/q"` or a decimal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    /// Fixed edge count for the dependent ensemble, used instead of `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<u64>,
    pub n_grid: Vec<u32>,
    pub replicas: u64,
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockConfig>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_resamples: usize,
    /// Directory that relative motif paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_probability(text: &str, what: &str) -> Result<Rational> {
    let p = parse_ratio(text).ok_or_else(|| config_err(format!("{what}: cannot parse {text:?} as a number")))?;
    if p < Rational::from_integer(0.into()) || p > Rational::from_integer(1.into()) {
        return Err(config_err(format!("{what}: {text} is not in [0, 1]")));
    }
    Ok(p)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| config_err(format!("malformed config: {e}")))?;
        Ok(config)
    }

    /// Read and validate a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn density(&self) -> Result<Option<Rational>> {
        self.p.as_deref().map(|p| parse_probability(p, "p")).transpose()
    }

    pub fn resolve_motifs(&self) -> Result<Vec<Motif>> {
        self.motifs
            .iter()
            .map(|r| match r {
                MotifRef::Name(b) | MotifRef::Builtin { builtin: b } => Ok(b.motif()),
                MotifRef::File { file } => {
                    let path = self.base_dir.join(file);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| config_err(format!("motif file {}: {e}", path.display())))?;
                    let name = file.file_stem().map(|s| s.to_string_lossy().into_owned());
                    Motif::parse_edge_list(&text, name)
                        .map_err(|e| config_err(format!("motif file {}: {e}", path.display())))
                }
            })
            .collect()
    }

    /// The family simulated for one ensemble choice.
    pub fn family(&self, choice: EnsembleChoice) -> Result<EnsembleFamily> {
        let density = || self.density()?.ok_or_else(|| config_err(format!("{choice:?} ensemble needs p")));
        let block = || {
            let block = self
                .block
                .as_ref()
                .ok_or_else(|| config_err("block ensembles need a block section"))?;
            let p = block
                .p
                .iter()
                .map(|row| row.iter().map(|x| parse_probability(x, "block.p")).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok::<_, Error>((block.weights.clone(), p))
        };
        Ok(match choice {
            EnsembleChoice::Dependent => match self.edges {
                Some(edges) => EnsembleFamily::FixedEdges { edges },
                None => EnsembleFamily::Dependent { p: density()? },
            },
            EnsembleChoice::Independent => EnsembleFamily::Independent { p: density()? },
            EnsembleChoice::BlockDependent => {
                let (weights, densities) = block()?;
                EnsembleFamily::BlockDependent { weights, densities }
            }
            EnsembleChoice::BlockIndependent => {
                let (weights, p) = block()?;
                EnsembleFamily::BlockIndependent { weights, p }
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.motifs.is_empty() {
            return Err(config_err("no motifs given"));
        }
        if self.ensembles.is_empty() {
            return Err(config_err("no ensembles given"));
        }
        if self.n_grid.is_empty() {
            return Err(config_err("n_grid is empty"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("n_grid must be strictly increasing"));
        }
        if self.replicas == 0 {
            return Err(config_err("replicas must be at least 1"));
        }
        self.resolve_motifs()?;
        self.density()?;
        if let Some(block) = &self.block {
            if block.weights.is_empty() || block.weights.contains(&0) {
                return Err(config_err("block.weights must be nonempty and positive"));
            }
            let b = block.weights.len();
            if block.p.len() != b || block.p.iter().any(|row| row.len() != b) {
                return Err(config_err("block.p must be a square matrix matching block.weights"));
            }
        }
        for &choice in &self.ensembles {
            let family = self.family(choice)?;
            for &n in &self.n_grid {
                let spec: EnsembleSpec = family.at(n).map_err(|e| config_err(format!("n={n}: {e}")))?;
                spec.validate().map_err(|e| config_err(format!("n={n}: {e}")))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "schema_version": 1,
        "motifs": ["triangle", {"builtin": "square"}],
        "ensembles": ["dependent", "independent", "block_dependent"],
        "p": "3/10",
        "n_grid": [8, 12],
        "replicas": 200,
        "master_seed": 7,
        "output_dir": "results",
        "block": {"weights": [1, 1], "p": [["1/2", "1/10"], ["1/10", "1/2"]]}
    }"#;

    #[test]
    fn parse_validate_round_trip() {
        let config = ExperimentConfig::from_json(SAMPLE).unwrap();
        config.validate().unwrap();
        let again = ExperimentConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(config, again);
        assert_eq!(config.resolve_motifs().unwrap().len(), 2);
        assert_eq!(config.bootstrap_resamples, 1000);
    }

    #[test]
    fn rejects_bad_configs() {
        let tweak = |from: &str, to: &str| {
            let text = SAMPLE.replace(from, to);
            ExperimentConfig::from_json(&text).and_then(|c| c.validate())
        };
        for (from, to) in [
            ("\"n_grid\": [8, 12]", "\"n_grid\": []"),
            ("\"n_grid\": [8, 12]", "\"n_grid\": [12, 8]"),
            ("\"replicas\": 200", "\"replicas\": 0"),
            ("\"3/10\"", "\"3/2\""),
            ("\"3/10\"", "\"abc\""),
            ("\"schema_version\": 1", "\"schema_version\": 9"),
            ("\"triangle\"", "\"pentagon\""),
            ("\"weights\": [1, 1]", "\"weights\": [1]"),
            ("\"master_seed\": 7", "\"master_seed\": 7, \"extra\": 1"),
        ] {
            let err = tweak(from, to).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{from} -> {to}: {err}");
        }
        let err = tweak("\"p\": \"3/10\",", "\"edges\": 10,").unwrap_err();
        assert!(err.to_string().contains("needs p"), "{err}");
    }

    #[test]
    fn motif_files_resolve_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("path3.txt"), "4\n0 1\n1 2\n2 3\n").unwrap();
        let text = SAMPLE.replace("{\"builtin\": \"square\"}", "{\"file\": \"path3.txt\"}");
        let path = dir.path().join("config.json");
        std::fs::write(&path, text).unwrap();
        let config = ExperimentConfig::load(&path).unwrap();
        let motifs = config.resolve_motifs().unwrap();
        assert_eq!(motifs[1].edge_count(), 3);
        assert_eq!(motifs[1].name(), Some("path3"));
        std::fs::remove_file(dir.path().join("path3.txt")).unwrap();
        assert_eq!(ExperimentConfig::load(&path).unwrap_err().exit_code(), 2);
    }
}
