//! Key = value configuration files and the typed run/sweep configurations
//! built from them.
//!
//! The file format is one `key = value` pair per line with `#` comments.
//! Defaults live in `defaults.cfg` (embedded at compile time); a config
//! file overrides the defaults and command-line flags override the file.

use std::collections::BTreeMap;
use std::path::Path;

use catperc::nn::TrainConfig;
use catperc::stimuli::{GridSpec, StimulusSpec};
use catperc::Probe;

use crate::error::{HarnessError, Result};
use crate::pipeline::mix_seed;

/// Embedded calibrated defaults.
pub const DEFAULTS: &str = include_str!("../defaults.cfg");

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "n",
    "k",
    "n_values",
    "k_values",
    "a",
    "b",
    "per_category",
    "hidden_dim",
    "hidden_divisor",
    "seed",
    "seeds",
    "seed_count",
    "probe",
    "batch_size",
    "noise_flip_prob",
    "target_accuracy",
    "unsup_learning_rate",
    "unsup_epochs",
    "sup_learning_rate",
    "sup_epochs",
    "grid_edge",
    "patch_edge",
];

/// Flat key = value map with typed getters.
#[derive(Debug, Clone, Default)]
pub struct KvConfig {
    map: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(HarnessError::Config(format!(
                    "line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            map.insert(key.to_string(), value.to_string());
        }
        Ok(KvConfig { map })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn defaults() -> Self {
        Self::parse(DEFAULTS).expect("embedded defaults parse")
    }

    /// Layering: entries in `overlay` replace entries in `self`.
    pub fn merged(mut self, overlay: &KvConfig) -> Self {
        for (k, v) in &overlay.map {
            self.map.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        debug_assert!(KNOWN_KEYS.contains(&key), "unknown key {key}");
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                HarnessError::Config(format!("key {key}: cannot parse {raw:?}: {e}"))
            }),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parse_value::<usize>(key)?.unwrap_or(default))
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.parse_value::<u64>(key)?.unwrap_or(default))
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parse_value::<f64>(key)?.unwrap_or(default))
    }

    pub fn get_f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.parse_value::<f64>(key)
    }

    pub fn get_usize_opt(&self, key: &str) -> Result<Option<usize>> {
        self.parse_value::<usize>(key)
    }

    pub fn get_list_usize(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|e| {
                        HarnessError::Config(format!("key {key}: bad entry {tok:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<usize>>>()
                .map(Some),
        }
    }

    pub fn get_list_u64(&self, key: &str) -> Result<Option<Vec<u64>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<u64>().map_err(|e| {
                        HarnessError::Config(format!("key {key}: bad entry {tok:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<u64>>>()
                .map(Some),
        }
    }

    pub fn get_probe(&self) -> Result<Probe> {
        match self.map.get("probe") {
            None => Ok(Probe::PreActivation),
            Some(raw) => raw
                .parse::<Probe>()
                .map_err(|e| HarnessError::Config(e.to_string())),
        }
    }
}

/// Which stimulus family a scenario draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Plain +-1 vectors, full-salience covariants (a = 1 by default).
    Vector,
    /// Narrowed covariant salience (a = 0.6 by default).
    VectorNarrowed,
    /// Binary images assembled from micro-feature patches.
    Grid,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Vector => "vector",
            Scenario::VectorNarrowed => "vector_narrowed",
            Scenario::Grid => "grid",
        }
    }

    fn default_salience(self) -> f64 {
        match self {
            Scenario::VectorNarrowed => 0.6,
            _ => 1.0,
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vector" => Ok(Scenario::Vector),
            "vector_narrowed" => Ok(Scenario::VectorNarrowed),
            "grid" => Ok(Scenario::Grid),
            other => Err(HarnessError::Config(format!("unknown scenario {other:?}"))),
        }
    }
}

/// The stimulus family of a single run.
#[derive(Debug, Clone, PartialEq)]
pub enum StimulusConfig {
    Vector(StimulusSpec<f64>),
    Grid(GridSpec),
}

impl StimulusConfig {
    pub fn input_dim(&self) -> usize {
        match self {
            StimulusConfig::Vector(s) => s.n_dims,
            StimulusConfig::Grid(s) => s.n_pixels(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            StimulusConfig::Vector(s) => s.n_dims,
            StimulusConfig::Grid(s) => s.n_microfeatures,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            StimulusConfig::Vector(s) => s.n_covariant,
            StimulusConfig::Grid(s) => s.n_covariant,
        }
    }

    pub fn salience(&self) -> f64 {
        match self {
            StimulusConfig::Vector(s) => s.covariant_salience,
            StimulusConfig::Grid(_) => 1.0,
        }
    }

    pub fn magnitude(&self) -> f64 {
        match self {
            StimulusConfig::Vector(s) => s.random_magnitude,
            StimulusConfig::Grid(_) => 1.0,
        }
    }
}

/// Everything one pipeline run needs. The `seed` is the master seed; the
/// seeds inside the two train configs are replaced by values derived from
/// it when the pipeline executes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub stimulus: StimulusConfig,
    pub per_category: usize,
    pub hidden_dim: usize,
    pub unsup_cfg: TrainConfig<f64>,
    pub sup_cfg: TrainConfig<f64>,
    pub probe: Probe,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match &self.stimulus {
            StimulusConfig::Vector(s) => s.validate()?,
            StimulusConfig::Grid(s) => s.validate()?,
        }
        if self.per_category == 0 {
            return Err(HarnessError::Config("per_category must be >= 1".into()));
        }
        if self.hidden_dim == 0 {
            return Err(HarnessError::Config("hidden_dim must be >= 1".into()));
        }
        self.unsup_cfg.validate()?;
        self.sup_cfg.validate()?;
        Ok(())
    }

    /// Builds a single-run configuration from layered key = value settings.
    pub fn from_kv(kv: &KvConfig) -> Result<RunConfig> {
        let scenario: Scenario = kv
            .get("scenario")
            .unwrap_or("vector")
            .parse()?;
        let sweep = SweepConfig::from_kv_with_scenario(kv, scenario)?;
        let n = kv.get_usize("n", 20)?;
        let k = kv.get_usize("k", n / 2)?;
        let seed = kv.get_u64("seed", 42)?;
        sweep.build_run(n, k, seed)
    }
}

/// A sweep over (N, k, seed) cells of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub n_values: Vec<usize>,
    /// Explicit per-sweep k grid; `None` selects the default halving grid.
    pub k_values: Option<Vec<usize>>,
    pub a: f64,
    pub b: f64,
    pub seeds: Vec<u64>,
    pub per_category: usize,
    pub hidden_divisor: usize,
    /// Per-run hidden width override; normally derived from the input size.
    pub hidden_dim: Option<usize>,
    pub probe: Probe,
    pub grid_edge: usize,
    pub patch_edge: usize,
    pub batch_size: usize,
    pub noise_flip_prob: f64,
    pub target_accuracy: f64,
    pub unsup_learning_rate: f64,
    pub unsup_epochs: usize,
    pub sup_learning_rate: f64,
    pub sup_epochs: usize,
}

impl SweepConfig {
    pub fn from_kv(kv: &KvConfig) -> Result<SweepConfig> {
        let scenario: Scenario = kv.get("scenario").unwrap_or("vector").parse()?;
        Self::from_kv_with_scenario(kv, scenario)
    }

    fn from_kv_with_scenario(kv: &KvConfig, scenario: Scenario) -> Result<SweepConfig> {
        let n_values = match kv.get_list_usize("n_values")? {
            Some(v) => v,
            None => match scenario {
                Scenario::Grid => vec![4],
                _ => vec![10, 20, 50, 100],
            },
        };
        let seeds = match kv.get_list_u64("seeds")? {
            Some(v) => v,
            None => {
                let base = kv.get_u64("seed", 42)?;
                let count = kv.get_usize("seed_count", 10)?;
                (0..count as u64).map(|i| base + i).collect()
            }
        };
        if seeds.is_empty() {
            return Err(HarnessError::Config("need at least one seed".into()));
        }
        let cfg = SweepConfig {
            scenario,
            n_values,
            k_values: kv.get_list_usize("k_values")?,
            a: kv.get_f64("a", scenario.default_salience())?,
            b: kv.get_f64("b", 1.0)?,
            seeds,
            per_category: kv.get_usize("per_category", 200)?,
            hidden_divisor: kv.get_usize("hidden_divisor", 2)?,
            hidden_dim: kv.get_usize_opt("hidden_dim")?,
            probe: kv.get_probe()?,
            grid_edge: kv.get_usize("grid_edge", 2)?,
            patch_edge: kv.get_usize("patch_edge", 3)?,
            batch_size: kv.get_usize("batch_size", 16)?,
            noise_flip_prob: kv.get_f64("noise_flip_prob", 0.1)?,
            target_accuracy: kv.get_f64("target_accuracy", 0.99)?,
            unsup_learning_rate: kv.get_f64("unsup_learning_rate", 0.02)?,
            unsup_epochs: kv.get_usize("unsup_epochs", 300)?,
            sup_learning_rate: kv.get_f64("sup_learning_rate", 0.5)?,
            sup_epochs: kv.get_usize("sup_epochs", 500)?,
        };
        if cfg.hidden_divisor == 0 {
            return Err(HarnessError::Config("hidden_divisor must be >= 1".into()));
        }
        Ok(cfg)
    }

    /// The k values swept for dimension `n`: the explicit grid filtered to
    /// `k <= n`, or a halving grid from `n/2` down through 2 and 1.
    pub fn k_grid(&self, n: usize) -> Vec<usize> {
        if let Some(ks) = &self.k_values {
            return ks.iter().copied().filter(|&k| k >= 1 && k <= n).collect();
        }
        match self.scenario {
            Scenario::Grid => (1..=n).rev().collect(),
            _ => {
                let mut ks = Vec::new();
                let mut k = n / 2;
                while k > 2 {
                    ks.push(k);
                    k /= 2;
                }
                if n >= 2 && !ks.contains(&2) {
                    ks.push(2);
                }
                ks.push(1);
                ks
            }
        }
    }

    /// Builds the run configuration of one sweep cell.
    pub fn build_run(&self, n: usize, k: usize, seed: u64) -> Result<RunConfig> {
        let stimulus = match self.scenario {
            Scenario::Grid => StimulusConfig::Grid(GridSpec::random(
                n,
                k,
                self.patch_edge,
                self.grid_edge,
                mix_seed(seed, 2),
            )?),
            _ => StimulusConfig::Vector(StimulusSpec::with_magnitude(n, k, self.a, self.b)?),
        };
        let hidden_dim = self
            .hidden_dim
            .unwrap_or_else(|| (stimulus.input_dim() / self.hidden_divisor).max(1));
        let cfg = RunConfig {
            per_category: self.per_category,
            hidden_dim,
            unsup_cfg: TrainConfig {
                learning_rate: self.unsup_learning_rate,
                max_epochs: self.unsup_epochs,
                batch_size: self.batch_size,
                seed: 0,
                target_accuracy: self.target_accuracy,
                noise_flip_prob: self.noise_flip_prob,
            },
            sup_cfg: TrainConfig {
                learning_rate: self.sup_learning_rate,
                max_epochs: self.sup_epochs,
                batch_size: self.batch_size,
                seed: 0,
                target_accuracy: self.target_accuracy,
                noise_flip_prob: 0.0,
            },
            probe: self.probe,
            seed,
            stimulus,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// All (n, k, seed) cells in deterministic sweep order.
    pub fn cells(&self) -> Vec<(usize, usize, u64)> {
        let mut cells = Vec::new();
        for &n in &self.n_values {
            for k in self.k_grid(n) {
                for &seed in &self.seeds {
                    cells.push((n, k, seed));
                }
            }
        }
        cells
    }
}
