//! JSON config schemas for the subcommands.

use serde::Deserialize;

fn default_retain() -> f64 {
    0.8
}

fn default_slope() -> f64 {
    0.2
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Er,
    Ba,
}

/// Grid of random graphs: one cell per (size, degree) pair.
#[derive(Deserialize, Clone)]
pub struct DatasetSpec {
    pub family: Family,
    pub sizes: Vec<usize>,
    /// Target average degrees; ER uses p = d/(V-1), BA uses m = round(d).
    #[serde(default)]
    pub degrees: Vec<f64>,
    /// Direct ER edge probabilities; extra cells alongside `degrees`.
    #[serde(default)]
    pub probs: Vec<f64>,
    pub count_per_cell: usize,
}

#[derive(Deserialize)]
pub struct GenDataConfig {
    #[serde(flatten)]
    pub spec: DatasetSpec,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TrainerKind {
    Dpg,
    Crts,
    Dqn,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureName {
    Ones,
    Utilities,
    Degree,
}

#[derive(Deserialize)]
pub struct ArchConfig {
    /// Layer widths g0..gL; the output width must match the trainer kind.
    pub dims: Vec<usize>,
    #[serde(default = "default_slope")]
    pub slope: f64,
    /// Per-vertex MLP instead of a GCN (the ablation architecture).
    #[serde(default)]
    pub mlp: bool,
    /// Identity start (theta0 = 1, theta1 = 0) for 1-layer scalar models.
    #[serde(default)]
    pub identity_start: bool,
}

#[derive(Deserialize)]
pub struct TrainCommandConfig {
    pub trainer: TrainerKind,
    /// Directory of graph JSON files.
    pub dataset: String,
    pub arch: ArchConfig,
    #[serde(default)]
    pub init_model: Option<String>,
    // dpg settings
    #[serde(default = "TrainCommandConfig::default_alpha")]
    pub alpha: f64,
    #[serde(default = "TrainCommandConfig::default_epochs")]
    pub epochs: usize,
    #[serde(default = "TrainCommandConfig::default_batch")]
    pub batch_size: usize,
    #[serde(default = "TrainCommandConfig::default_val_fraction")]
    pub validation_fraction: f64,
    #[serde(default)]
    pub momentum: Option<f64>,
    #[serde(default)]
    pub grad_clip: Option<f64>,
    #[serde(default = "TrainCommandConfig::default_reset")]
    pub reset_period: usize,
    #[serde(default = "TrainCommandConfig::default_features")]
    pub features: FeatureName,
    // crts settings
    #[serde(default = "TrainCommandConfig::default_branches")]
    pub branches: usize,
    // dqn settings
    #[serde(default = "TrainCommandConfig::default_episodes")]
    pub episodes: usize,
}

impl TrainCommandConfig {
    fn default_alpha() -> f64 {
        0.001
    }
    fn default_epochs() -> usize {
        25
    }
    fn default_batch() -> usize {
        32
    }
    fn default_val_fraction() -> f64 {
        0.05
    }
    fn default_reset() -> usize {
        1
    }
    fn default_features() -> FeatureName {
        FeatureName::Ones
    }
    fn default_branches() -> usize {
        32
    }
    fn default_episodes() -> usize {
        200
    }
}

#[derive(Deserialize, Default)]
pub struct ModelPaths {
    /// Scalar-embedding model for gcn-lgs / gcn-lgs-it / gcn-crs.
    #[serde(default)]
    pub scalar: Option<String>,
    /// Q-value model for gcn-cgs.
    #[serde(default)]
    pub q: Option<String>,
    /// 2B-logit model for gcn-crts.
    #[serde(default)]
    pub crts: Option<String>,
    /// Per-vertex MLP ablation model.
    #[serde(default)]
    pub mlp: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum TestSet {
    /// Directory of graph files generated earlier.
    Dir(String),
    /// Generate instances on the fly.
    Spec(DatasetSpec),
}

#[derive(Deserialize)]
pub struct EvalConfig {
    pub test_set: TestSet,
    /// Solver names: cgs, lgs, lgs-<N>, gcn-lgs, gcn-lgs-it, gcn-crs-v,
    /// gcn-crs-e, gcn-cgs, gcn-crts, random-lgs, mlp-lgs.
    pub solvers: Vec<String>,
    #[serde(default)]
    pub models: ModelPaths,
    #[serde(default = "EvalConfig::default_branching")]
    pub branching: usize,
    #[serde(default = "EvalConfig::default_crts_timeout")]
    pub crts_timeout: f64,
    #[serde(default = "EvalConfig::default_crts_backtrack")]
    pub crts_backtrack: f64,
    #[serde(default = "EvalConfig::default_oracle_nodes")]
    pub oracle_node_limit: u64,
    #[serde(default = "EvalConfig::default_oracle_seconds")]
    pub oracle_time_limit: f64,
}

impl EvalConfig {
    fn default_branching() -> usize {
        32
    }
    fn default_crts_timeout() -> f64 {
        10.0
    }
    fn default_crts_backtrack() -> f64 {
        0.02
    }
    fn default_oracle_nodes() -> u64 {
        20_000_000
    }
    fn default_oracle_seconds() -> f64 {
        30.0
    }
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum UtilityName {
    MinQR,
    QTimesR,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Single,
    Joint,
    Sequential,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LoadName {
    Oversaturated,
    Lambda { value: f64 },
    Utilization { value: f64 },
    InverseRatio { value: f64 },
}

#[derive(Deserialize)]
pub struct SimulateConfig {
    #[serde(default = "SimulateConfig::default_networks")]
    pub networks: usize,
    #[serde(default = "SimulateConfig::default_users")]
    pub users: usize,
    #[serde(default = "SimulateConfig::default_area")]
    pub area: f64,
    #[serde(default = "SimulateConfig::default_link_radius")]
    pub link_radius: f64,
    #[serde(default = "SimulateConfig::default_interf_radius")]
    pub interf_radius: f64,
    #[serde(default = "SimulateConfig::default_slots")]
    pub slots: usize,
    #[serde(default = "SimulateConfig::default_instances")]
    pub instances_per_network: usize,
    #[serde(default = "SimulateConfig::default_channels")]
    pub channels: usize,
    pub modes: Vec<ModeName>,
    pub utility: UtilityName,
    pub loads: Vec<LoadName>,
    pub schedulers: Vec<String>,
    #[serde(default)]
    pub models: ModelPaths,
    #[serde(default = "default_retain")]
    pub retain_prob: f64,
    #[serde(default = "EvalConfig::default_oracle_nodes")]
    pub oracle_node_limit: u64,
    #[serde(default = "EvalConfig::default_oracle_seconds")]
    pub oracle_time_limit: f64,
    #[serde(default = "EvalConfig::default_branching")]
    pub branching: usize,
}

impl SimulateConfig {
    fn default_networks() -> usize {
        50
    }
    fn default_users() -> usize {
        100
    }
    fn default_area() -> f64 {
        250.0
    }
    fn default_link_radius() -> f64 {
        1.0
    }
    fn default_interf_radius() -> f64 {
        4.0
    }
    fn default_slots() -> usize {
        200
    }
    fn default_instances() -> usize {
        1
    }
    fn default_channels() -> usize {
        1
    }
}
