//! Scenario configuration.
//!
//! The text format is one `section.key = value` assignment per line, with `#`
//! starting a comment. Every key is optional; missing keys take the defaults
//! listed in [`SimConfig::default`]. Keys:
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `topology.kind` | `lattice` | `lattice`, `random` or `explicit` |
//! | `topology.n` | `20` | number of paintings |
//! | `topology.k` | `4` | lattice degree (lattice) |
//! | `topology.p` | `0.1` | rewiring probability (lattice) |
//! | `topology.m` | `2n` | edge count (random) |
//! | `topology.edges` | | `u-v` pairs separated by spaces (explicit) |
//! | `topology.seed` | derived from the run seed | graph seed |
//! | `gallery.style_dims` | `6` | style categories |
//! | `gallery.capacity` | `3` | capacity of every painting |
//! | `gallery.capacities` | | comma-separated per-painting capacities |
//! | `gallery.info_count` | `1` | info nodes per painting |
//! | `gallery.info_service_time` | `5` | minutes at an info node |
//! | `gallery.info_relief` | `1` | capacity relief per info node |
//! | `gallery.hop_time` | `1` | minutes per painting-graph hop |
//! | `population.visitors` | `50` | |
//! | `population.quick_fraction` | `0.5` | |
//! | `population.arrival_rate` | `0.5` | visitors per minute |
//! | `population.quick_median`, `population.quick_dispersion` | `8`, `0.4` | |
//! | `population.slow_median`, `population.slow_dispersion` | `28`, `0.4` | |
//! | `population.quick_budget`, `population.slow_budget` | `90`, `240` | minutes |
//! | `population.interest_skew` | `1` | Zipf exponent of dominant interests |
//! | `policy.kind` | `swn_guided` | `unguided_random`, `hotspot`, `swn_guided` |
//! | `policy.epsilon` | `0.1` | exploration probability |
//! | `policy.scope` | `neighbors` | `neighbors` or `all` |
//! | `sim.horizon` | `600` | minutes |
//! | `sim.seed` | `7` | default run seed |

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gallery::{build_gallery, Gallery, GalleryError, InfoSpec};
use crate::netgraph::{random_graph, ring_lattice, ws_rewire, Graph, GraphError};
use crate::routing::{Policy, Scope};
use crate::visitors::{sample_population, PopulationSpec, Visitor, VisitorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given more than once")]
    DuplicateKey(String),
    #[error("`{key}`: expected {expected}, got {value:?}")]
    Type {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("`{key}`: {msg}")]
    Range { key: String, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gallery(#[from] GalleryError),
    #[error(transparent)]
    Population(#[from] VisitorError),
}

fn range(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        key: key.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Lattice { n: usize, k: usize, p: f64 },
    Random { n: usize, m: usize },
    Explicit(Graph),
}

impl Topology {
    pub fn node_count(&self) -> usize {
        match self {
            Topology::Lattice { n, .. } | Topology::Random { n, .. } => *n,
            Topology::Explicit(g) => g.node_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalleryConfig {
    pub style_dims: usize,
    pub capacity: u32,
    /// Overrides `capacity` painting by painting.
    pub capacities: Option<Vec<u32>>,
    pub info: InfoSpec,
    pub hop_time: u32,
}

impl Default for GalleryConfig {
    fn default() -> Self {
        GalleryConfig {
            style_dims: 6,
            capacity: 3,
            capacities: None,
            info: InfoSpec::default(),
            hop_time: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolicyKind {
    UnguidedRandom,
    Hotspot,
    SwnGuided,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::UnguidedRandom, PolicyKind::Hotspot, PolicyKind::SwnGuided];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::UnguidedRandom => "unguided_random",
            PolicyKind::Hotspot => "hotspot",
            PolicyKind::SwnGuided => "swn_guided",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown policy {s:?} (expected unguided_random, hotspot or swn_guided)"))
    }
}

/// Policy selection plus the guidance parameters, which are kept even when
/// another policy is selected so a sweep can switch between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub epsilon: f64,
    pub scope: Scope,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            kind: PolicyKind::SwnGuided,
            epsilon: 0.1,
            scope: Scope::Neighbors,
        }
    }
}

impl PolicyConfig {
    pub fn policy(&self) -> Policy {
        self.with_kind(self.kind)
    }

    pub fn with_kind(&self, kind: PolicyKind) -> Policy {
        match kind {
            PolicyKind::UnguidedRandom => Policy::UnguidedRandom,
            PolicyKind::Hotspot => Policy::Hotspot,
            PolicyKind::SwnGuided => Policy::SwnGuided {
                epsilon: self.epsilon,
                scope: self.scope,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub topology: Topology,
    pub topology_seed: Option<u64>,
    pub gallery: GalleryConfig,
    /// `style_dims` here always mirrors `gallery.style_dims`.
    pub population: PopulationSpec,
    pub policy: PolicyConfig,
    pub horizon: u32,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            topology: Topology::Lattice { n: 20, k: 4, p: 0.1 },
            topology_seed: None,
            gallery: GalleryConfig::default(),
            population: PopulationSpec::default(),
            policy: PolicyConfig::default(),
            horizon: 600,
            seed: 7,
        }
    }
}

/// Everything one run needs, drawn from a config and a seed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub gallery: Gallery,
    pub visitors: Vec<Visitor>,
    pub sim_seed: u64,
}

const STREAM_TOPOLOGY: u64 = 1;
const STREAM_STYLES: u64 = 2;
const STREAM_POPULATION: u64 = 3;
const STREAM_SIM: u64 = 4;

/// Independent sub-seed for one random stream of a run (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Style vectors for `n` paintings: i.i.d. uniform weights with one random
/// category raised to 1.
pub fn random_styles(n: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut v: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
            v[rng.random_range(0..dims)] = 1.0;
            v
        })
        .collect()
}

impl SimConfig {
    /// Painting graph for a run seed.
    pub fn painting_graph(&self, seed: u64) -> Result<Graph, ConfigError> {
        let seed = self.topology_seed.unwrap_or_else(|| derive_seed(seed, STREAM_TOPOLOGY));
        Ok(match &self.topology {
            Topology::Lattice { n, k, p } => ws_rewire(&ring_lattice(*n, *k)?, *p, seed)?,
            Topology::Random { n, m } => random_graph(*n, *m, seed)?,
            Topology::Explicit(g) => g.clone(),
        })
    }

    pub fn build_gallery(&self, graph: Graph, seed: u64) -> Result<Gallery, ConfigError> {
        let n = graph.node_count();
        let styles = random_styles(n, self.gallery.style_dims, derive_seed(seed, STREAM_STYLES));
        let caps = self
            .gallery
            .capacities
            .clone()
            .unwrap_or_else(|| vec![self.gallery.capacity; n]);
        Ok(build_gallery(graph, styles, &caps, &vec![self.gallery.info; n], self.gallery.hop_time)?)
    }

    pub fn sample_visitors(&self, seed: u64) -> Result<Vec<Visitor>, ConfigError> {
        let spec = PopulationSpec {
            style_dims: self.gallery.style_dims,
            ..self.population.clone()
        };
        Ok(sample_population(&spec, derive_seed(seed, STREAM_POPULATION))?)
    }

    pub fn instantiate(&self, seed: u64) -> Result<Scenario, ConfigError> {
        let graph = self.painting_graph(seed)?;
        self.instantiate_on(graph, seed)
    }

    /// Same as [`instantiate`](Self::instantiate) on a pre-built painting graph.
    pub fn instantiate_on(&self, graph: Graph, seed: u64) -> Result<Scenario, ConfigError> {
        Ok(Scenario {
            gallery: self.build_gallery(graph, seed)?,
            visitors: self.sample_visitors(seed)?,
            sim_seed: derive_seed(seed, STREAM_SIM),
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match &self.topology {
            Topology::Lattice { n, k, p } => {
                if *n < 3 {
                    return Err(range("topology.n", "lattice needs at least 3 paintings"));
                }
                if *k < 2 || k % 2 != 0 || k >= n {
                    return Err(range("topology.k", format!("must be even with 2 <= k < n, got {k}")));
                }
                if !(0.0..=1.0).contains(p) {
                    return Err(range("topology.p", format!("{p} is outside [0, 1]")));
                }
            }
            Topology::Random { n, m } => {
                if *n == 0 {
                    return Err(range("topology.n", "must be at least 1"));
                }
                if *m > n * (n - 1) / 2 {
                    return Err(range("topology.m", format!("{n} paintings allow at most {} edges", n * (n - 1) / 2)));
                }
            }
            Topology::Explicit(g) => {
                if g.node_count() == 0 {
                    return Err(range("topology.n", "must be at least 1"));
                }
            }
        }
        let n = self.topology.node_count();
        let gal = &self.gallery;
        if gal.style_dims == 0 {
            return Err(range("gallery.style_dims", "must be at least 1"));
        }
        if gal.capacity == 0 {
            return Err(range("gallery.capacity", "must be at least 1"));
        }
        if let Some(caps) = &gal.capacities {
            if caps.len() != n {
                return Err(range("gallery.capacities", format!("expected {n} entries, got {}", caps.len())));
            }
            if caps.contains(&0) {
                return Err(range("gallery.capacities", "every capacity must be at least 1"));
            }
        }
        if gal.info.count > 0 && gal.info.service_time == 0 {
            return Err(range("gallery.info_service_time", "must be at least 1"));
        }
        if gal.hop_time == 0 {
            return Err(range("gallery.hop_time", "must be at least 1"));
        }
        let spec = PopulationSpec {
            style_dims: gal.style_dims,
            ..self.population.clone()
        };
        if let Err(VisitorError::InvalidSpec { field, reason }) = spec.validate() {
            return Err(range(&format!("population.{}", population_key(field)), reason));
        }
        if !(0.0..=1.0).contains(&self.policy.epsilon) {
            return Err(range("policy.epsilon", format!("{} is outside [0, 1]", self.policy.epsilon)));
        }
        if self.horizon == 0 {
            return Err(range("sim.horizon", "must be at least 1"));
        }
        Ok(())
    }

    /// Canonical text form; parsing it yields `self` again.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        match &self.topology {
            Topology::Lattice { n, k, p } => {
                kv("topology.kind", "lattice".into());
                kv("topology.n", n.to_string());
                kv("topology.k", k.to_string());
                kv("topology.p", p.to_string());
            }
            Topology::Random { n, m } => {
                kv("topology.kind", "random".into());
                kv("topology.n", n.to_string());
                kv("topology.m", m.to_string());
            }
            Topology::Explicit(g) => {
                kv("topology.kind", "explicit".into());
                kv("topology.n", g.node_count().to_string());
                let edges: Vec<String> = g.edges().map(|(u, v)| format!("{u}-{v}")).collect();
                kv("topology.edges", edges.join(" "));
            }
        }
        if let Some(seed) = self.topology_seed {
            kv("topology.seed", seed.to_string());
        }
        let gal = &self.gallery;
        kv("gallery.style_dims", gal.style_dims.to_string());
        kv("gallery.capacity", gal.capacity.to_string());
        if let Some(caps) = &gal.capacities {
            let caps: Vec<String> = caps.iter().map(u32::to_string).collect();
            kv("gallery.capacities", caps.join(","));
        }
        kv("gallery.info_count", gal.info.count.to_string());
        kv("gallery.info_service_time", gal.info.service_time.to_string());
        kv("gallery.info_relief", gal.info.relief.to_string());
        kv("gallery.hop_time", gal.hop_time.to_string());
        let pop = &self.population;
        kv("population.visitors", pop.visitor_count.to_string());
        kv("population.quick_fraction", pop.quick_fraction.to_string());
        kv("population.arrival_rate", pop.arrival_rate.to_string());
        kv("population.quick_median", pop.dwell.quick.median.to_string());
        kv("population.quick_dispersion", pop.dwell.quick.dispersion.to_string());
        kv("population.slow_median", pop.dwell.slow.median.to_string());
        kv("population.slow_dispersion", pop.dwell.slow.dispersion.to_string());
        kv("population.quick_budget", pop.quick_budget.to_string());
        kv("population.slow_budget", pop.slow_budget.to_string());
        kv("population.interest_skew", pop.interest_skew.to_string());
        kv("policy.kind", self.policy.kind.name().into());
        kv("policy.epsilon", self.policy.epsilon.to_string());
        kv(
            "policy.scope",
            match self.policy.scope {
                Scope::Neighbors => "neighbors",
                Scope::AllPaintings => "all",
            }
            .into(),
        );
        kv("sim.horizon", self.horizon.to_string());
        kv("sim.seed", self.seed.to_string());
        out
    }
}

fn population_key(field: &str) -> &str {
    match field {
        "visitor_count" => "visitors",
        other => other,
    }
}

fn value<T: FromStr>(key: &str, raw: &str, expected: &'static str) -> Result<T, ConfigError> {
    raw.parse().map_err(|_| ConfigError::Type {
        key: key.to_string(),
        value: raw.to_string(),
        expected,
    })
}

fn parse_edges(raw: &str) -> Result<Vec<(usize, usize)>, ConfigError> {
    raw.split_whitespace()
        .map(|pair| {
            let (u, v) = pair.split_once('-').ok_or_else(|| ConfigError::Type {
                key: "topology.edges".into(),
                value: pair.into(),
                expected: "`u-v` node pairs",
            })?;
            Ok((value("topology.edges", u, "node id")?, value("topology.edges", v, "node id")?))
        })
        .collect()
}

/// Parses and validates configuration text, filling defaults for absent keys.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::default();
    let mut seen = HashSet::new();
    let (mut kind, mut n, mut k, mut p, mut m, mut edges) = ("lattice".to_string(), 20usize, 4usize, 0.1, None, None);

    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, raw) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: idx + 1,
            msg: format!("expected `section.key = value`, got {line:?}"),
        })?;
        let (key, raw) = (key.trim(), raw.trim());
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey(key.to_string()));
        }
        let pop = &mut cfg.population;
        match key {
            "topology.kind" => match raw {
                "lattice" | "random" | "explicit" => kind = raw.to_string(),
                _ => {
                    return Err(ConfigError::Type {
                        key: key.into(),
                        value: raw.into(),
                        expected: "lattice, random or explicit",
                    })
                }
            },
            "topology.n" => n = value(key, raw, "non-negative integer")?,
            "topology.k" => k = value(key, raw, "non-negative integer")?,
            "topology.p" => p = value(key, raw, "number")?,
            "topology.m" => m = Some(value(key, raw, "non-negative integer")?),
            "topology.edges" => edges = Some(parse_edges(raw)?),
            "topology.seed" => cfg.topology_seed = Some(value(key, raw, "non-negative integer")?),
            "gallery.style_dims" => cfg.gallery.style_dims = value(key, raw, "non-negative integer")?,
            "gallery.capacity" => cfg.gallery.capacity = value(key, raw, "non-negative integer")?,
            "gallery.capacities" => {
                cfg.gallery.capacities = Some(
                    raw.split(',')
                        .map(|c| value(key, c.trim(), "comma-separated integers"))
                        .collect::<Result<_, _>>()?,
                )
            }
            "gallery.info_count" => cfg.gallery.info.count = value(key, raw, "non-negative integer")?,
            "gallery.info_service_time" => cfg.gallery.info.service_time = value(key, raw, "non-negative integer")?,
            "gallery.info_relief" => cfg.gallery.info.relief = value(key, raw, "non-negative integer")?,
            "gallery.hop_time" => cfg.gallery.hop_time = value(key, raw, "non-negative integer")?,
            "population.visitors" => pop.visitor_count = value(key, raw, "non-negative integer")?,
            "population.quick_fraction" => pop.quick_fraction = value(key, raw, "number")?,
            "population.arrival_rate" => pop.arrival_rate = value(key, raw, "number")?,
            "population.quick_median" => pop.dwell.quick.median = value(key, raw, "number")?,
            "population.quick_dispersion" => pop.dwell.quick.dispersion = value(key, raw, "number")?,
            "population.slow_median" => pop.dwell.slow.median = value(key, raw, "number")?,
            "population.slow_dispersion" => pop.dwell.slow.dispersion = value(key, raw, "number")?,
            "population.quick_budget" => pop.quick_budget = value(key, raw, "number")?,
            "population.slow_budget" => pop.slow_budget = value(key, raw, "number")?,
            "population.interest_skew" => pop.interest_skew = value(key, raw, "number")?,
            "policy.kind" => {
                cfg.policy.kind = raw.parse().map_err(|_| ConfigError::Type {
                    key: key.into(),
                    value: raw.into(),
                    expected: "unguided_random, hotspot or swn_guided",
                })?
            }
            "policy.epsilon" => cfg.policy.epsilon = value(key, raw, "number")?,
            "policy.scope" => {
                cfg.policy.scope = match raw {
                    "neighbors" => Scope::Neighbors,
                    "all" => Scope::AllPaintings,
                    _ => {
                        return Err(ConfigError::Type {
                            key: key.into(),
                            value: raw.into(),
                            expected: "neighbors or all",
                        })
                    }
                }
            }
            "sim.horizon" => cfg.horizon = value(key, raw, "non-negative integer")?,
            "sim.seed" => cfg.seed = value(key, raw, "non-negative integer")?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
    }

    cfg.topology = match kind.as_str() {
        "lattice" => Topology::Lattice { n, k, p },
        "random" => Topology::Random { n, m: m.unwrap_or(2 * n) },
        _ => {
            let edges = edges.ok_or_else(|| range("topology.edges", "required for explicit topology"))?;
            let g = Graph::from_edges(n, edges).map_err(|e| range("topology.edges", e.to_string()))?;
            Topology::Explicit(g)
        }
    };
    cfg.population.style_dims = cfg.gallery.style_dims;
    cfg.validate()?;
    Ok(cfg)
}
