//! Pipeline configuration: defaults, flat key=value config files, and
//! command-line overrides (flags win over file values).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use graphlid::walks::WalkVariant;
use serde::Serialize;

use crate::CliError;

/// Full sweep configuration for the `pipeline` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub graph: PathBuf,
    #[serde(serialize_with = "serialize_variants")]
    pub variants: Vec<WalkVariant>,
    pub dims: Vec<usize>,
    pub ps: Vec<f64>,
    pub qs: Vec<f64>,
    pub num_walks: u32,
    pub walk_length: u32,
    pub seeds: Vec<u64>,
    pub alpha: f64,
    #[serde(skip)] // report location, not part of the scientific config
    pub out: PathBuf,
    pub threads: usize,
    pub deterministic: bool,
    /// Sweep the p/q grid for the lid variants too, instead of running them
    /// at the (p, q) tuned on plain node2vec.
    pub sweep_lid: bool,
}

fn serialize_variants<S: serde::Serializer>(
    variants: &[WalkVariant],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(variants.iter().map(|v| v.to_string()))
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            graph: PathBuf::new(),
            variants: vec![WalkVariant::Node2vec, WalkVariant::LidRw, WalkVariant::LidRwPq],
            dims: vec![10, 25, 50, 100, 200],
            ps: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            qs: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            num_walks: 10,
            walk_length: 80,
            seeds: vec![1, 2, 3, 4, 5],
            alpha: 1.0,
            out: PathBuf::from("."),
            threads: 0,
            deterministic: true,
            sweep_lid: false,
        }
    }
}

impl PipelineConfig {
    /// Parse a flat `key = value` config file; `#` lines are comments.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        let mut pairs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("config line {}: expected key=value", i + 1)))?;
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }
        for (key, value) in pairs {
            self.apply_pair(&key, &value)
                .map_err(|e| CliError::Input(format!("config key '{key}': {e}")))?;
        }
        Ok(())
    }

    /// Apply one key=value pair; also used for flag overrides.
    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "graph" => self.graph = PathBuf::from(value),
            "variants" => {
                self.variants = split_list(value)
                    .map(|t| t.parse::<WalkVariant>())
                    .collect::<Result<_, _>>()?
            }
            "dims" => self.dims = parse_list(value)?,
            "ps" => self.ps = parse_list(value)?,
            "qs" => self.qs = parse_list(value)?,
            "walks" => self.num_walks = parse_one(value)?,
            "length" => self.walk_length = parse_one(value)?,
            "seeds" => self.seeds = parse_list(value)?,
            "alpha" => self.alpha = parse_one(value)?,
            "out" => self.out = PathBuf::from(value),
            "threads" => self.threads = parse_one(value)?,
            "deterministic" => self.deterministic = parse_bool(value)?,
            "sweep_lid" => self.sweep_lid = parse_bool(value)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Input(msg.to_string()));
        if self.graph.as_os_str().is_empty() {
            return bad("pipeline requires a graph (flag --graph or config key graph)");
        }
        if self.dims.is_empty() || self.ps.is_empty() || self.qs.is_empty() || self.seeds.is_empty() {
            return bad("dims, ps, qs and seeds must be nonempty");
        }
        if self.variants.is_empty() {
            return bad("at least one variant required");
        }
        if self.dims.contains(&0) {
            return bad("dims must be >= 1");
        }
        if self.ps.iter().chain(&self.qs).any(|&x| x <= 0.0) {
            return bad("p and q values must be > 0");
        }
        if self.num_walks == 0 || self.walk_length < 2 {
            return bad("walks must be >= 1 and length >= 2");
        }
        if self.alpha <= 0.0 {
            return bad("alpha must be > 0");
        }
        Ok(())
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    split_list(value)
        .map(|t| t.parse::<T>().map_err(|e| format!("bad value '{t}': {e}")))
        .collect()
}

fn parse_one<T: std::str::FromStr>(value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("bad value '{value}': {e}"))
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("bad boolean '{other}'")),
    }
}

/// Graph name for report rows: the file stem of the edge-list path.
pub fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".to_string())
}
