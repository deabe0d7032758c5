//! Experiment orchestration: many seeded sampler runs per strategy, metric
//! curves at checkpoints, aggregation to mean/std, dataset summaries and the
//! hub-coverage comparison.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::community::{detect_cnm, detect_rak, load_partition, CommunityError, Partition, DEFAULT_RAK_SWEEPS};
use crate::graph::{Graph, GraphError, IdMap, NodeId};
use crate::metrics::{
    average_local_clustering, evaluate_checkpoints, top_hubs, DegreeMode, Metric, MetricContext, MetricError,
    DEFAULT_HUB_COUNT,
};
use crate::sampling::{sample, SampleError, SamplerConfig, Strategy, DEFAULT_BURN_PROBABILITY};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NETSAMPLE_THREADS";
pub const DEFAULT_SEEDS: usize = 100;
pub const EXACT_PATH_LENGTH_LIMIT: usize = 50_000;
pub const PATH_LENGTH_SOURCES: usize = 1_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Serialize for Strategy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Strategy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Checkpoint schedule.
#[derive(Clone, Debug, PartialEq)]
pub enum Checkpoints {
    Sizes(Vec<usize>),
    /// Fractions of the node count.
    Fractions(Vec<f64>),
    /// `count` log-spaced sizes from max(10, 0.1% of n) to 20% of n.
    LogSpaced {
        count: usize,
    },
}

impl Default for Checkpoints {
    fn default() -> Self {
        Checkpoints::LogSpaced { count: 20 }
    }
}

impl Checkpoints {
    /// Concrete ascending, distinct, positive sizes for a graph of `n` nodes.
    pub fn resolve(&self, n: usize) -> Vec<usize> {
        let mut sizes: Vec<usize> = match self {
            Checkpoints::Sizes(s) => s.clone(),
            Checkpoints::Fractions(f) => f.iter().map(|x| (x * n as f64).round() as usize).collect(),
            Checkpoints::LogSpaced { count } => {
                let hi = ((0.2 * n as f64).floor() as usize).max(1);
                let lo = (10usize.max((0.001 * n as f64).ceil() as usize)).min(hi);
                let count = (*count).max(1);
                (0..count)
                    .map(|i| {
                        if count == 1 {
                            return hi;
                        }
                        let t = i as f64 / (count - 1) as f64;
                        (lo as f64 * (hi as f64 / lo as f64).powf(t)).round() as usize
                    })
                    .collect()
            }
        };
        sizes.retain(|&s| s > 0);
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartitionSource {
    Detect,
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommunityAlgo {
    Rak,
    Cnm,
}

impl CommunityAlgo {
    pub fn name(self) -> &'static str {
        match self {
            CommunityAlgo::Rak => "rak",
            CommunityAlgo::Cnm => "cnm",
        }
    }
}

impl std::str::FromStr for CommunityAlgo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rak" => Ok(CommunityAlgo::Rak),
            "cnm" => Ok(CommunityAlgo::Cnm),
            other => Err(format!("unknown community algorithm {other:?} (rak|cnm)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub strategies: Vec<Strategy>,
    pub metrics: Vec<Metric>,
    pub checkpoints: Checkpoints,
    pub seeds: usize,
    pub hub_count: usize,
    /// Use min(K, n/10) hubs, for toy graphs.
    pub scale_hubs: bool,
    pub burn_probability: f64,
    pub master_seed: u64,
    pub degree_mode: DegreeMode,
    /// Draw seeds from the largest component only.
    pub largest_component: bool,
    pub rak: Option<PartitionSource>,
    pub cnm: Option<PartitionSource>,
    pub community_seed: u64,
    pub partition_cache: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            strategies: Strategy::ALL[..7].to_vec(),
            metrics: vec![Metric::DistSim, Metric::Hubs, Metric::CcLoc, Metric::CcGlb, Metric::Dq],
            checkpoints: Checkpoints::default(),
            seeds: DEFAULT_SEEDS,
            hub_count: DEFAULT_HUB_COUNT,
            scale_hubs: false,
            burn_probability: DEFAULT_BURN_PROBABILITY,
            master_seed: 0,
            degree_mode: DegreeMode::Induced,
            largest_component: true,
            rak: None,
            cnm: None,
            community_seed: 0,
            partition_cache: None,
        }
    }
}

/// On-disk form of [`ExperimentConfig`] (TOML key/value file).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    strategies: Option<Vec<Strategy>>,
    metrics: Option<Vec<Metric>>,
    checkpoints: Option<Vec<usize>>,
    checkpoint_fractions: Option<Vec<f64>>,
    checkpoint_count: Option<usize>,
    seeds: Option<usize>,
    hub_count: Option<usize>,
    scale_hubs: Option<bool>,
    ffs_p: Option<f64>,
    master_seed: Option<u64>,
    sample_degrees: Option<String>,
    largest_component: Option<bool>,
    rak: Option<String>,
    cnm: Option<String>,
    community_seed: Option<u64>,
    partition_cache: Option<PathBuf>,
}

fn partition_source(value: String) -> PartitionSource {
    if value == "detect" {
        PartitionSource::Detect
    } else {
        PartitionSource::File(PathBuf::from(value))
    }
}

impl ExperimentConfig {
    /// Parses a TOML key/value configuration; absent keys take defaults.
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut cfg = ExperimentConfig::default();
        if let Some(s) = file.strategies {
            cfg.strategies = s;
        }
        if let Some(m) = file.metrics {
            cfg.metrics = m;
        }
        cfg.checkpoints = match (file.checkpoints, file.checkpoint_fractions, file.checkpoint_count) {
            (Some(s), None, None) => Checkpoints::Sizes(s),
            (None, Some(f), None) => Checkpoints::Fractions(f),
            (None, None, Some(count)) => Checkpoints::LogSpaced { count },
            (None, None, None) => Checkpoints::default(),
            _ => {
                return Err(HarnessError::Config(
                    "set only one of checkpoints, checkpoint_fractions, checkpoint_count".into(),
                ))
            }
        };
        if let Some(v) = file.seeds {
            cfg.seeds = v;
        }
        if let Some(v) = file.hub_count {
            cfg.hub_count = v;
        }
        if let Some(v) = file.scale_hubs {
            cfg.scale_hubs = v;
        }
        if let Some(v) = file.ffs_p {
            cfg.burn_probability = v;
        }
        if let Some(v) = file.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = file.sample_degrees {
            cfg.degree_mode = v.parse().map_err(HarnessError::Config)?;
        }
        if let Some(v) = file.largest_component {
            cfg.largest_component = v;
        }
        cfg.rak = file.rak.map(partition_source);
        cfg.cnm = file.cnm.map(partition_source);
        if let Some(v) = file.community_seed {
            cfg.community_seed = v;
        }
        cfg.partition_cache = file.partition_cache;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds == 0 {
            return Err(HarnessError::Config("seeds must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(HarnessError::Config("no strategies selected".into()));
        }
        if !(self.burn_probability > 0.0 && self.burn_probability <= 1.0) {
            return Err(HarnessError::Config("ffs_p must lie in (0, 1]".into()));
        }
        if self.hub_count == 0 {
            return Err(HarnessError::Config("hub_count must be at least 1".into()));
        }
        if let Checkpoints::Sizes(s) = &self.checkpoints {
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HarnessError::Config("checkpoints must be strictly ascending".into()));
            }
        }
        for (metric, source) in [(Metric::CommReachRak, &self.rak), (Metric::CommReachCnm, &self.cnm)] {
            if self.metrics.contains(&metric) && source.is_none() {
                return Err(HarnessError::Config(format!(
                    "metric {metric} needs a partition source"
                )));
            }
        }
        Ok(())
    }

    /// Hub count after optional scaling, never above `n`.
    pub fn effective_hub_count(&self, n: usize) -> usize {
        let k = if self.scale_hubs {
            self.hub_count.min(n / 10).max(1)
        } else {
            self.hub_count
        };
        k.min(n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    /// The sample ended before this checkpoint.
    Exhausted,
    /// The sampler failed.
    Error,
}

/// One `(strategy, seed, checkpoint, metric)` observation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub strategy: Strategy,
    pub seed_index: usize,
    pub seed_node: String,
    pub checkpoint: usize,
    pub metric: Metric,
    pub value: Option<f64>,
    pub status: RunStatus,
}

/// Runs `f` on a pool capped by [`THREADS_ENV`] when it is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    match cap {
        Some(threads) if threads > 0 => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

fn run_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Seed nodes for `count` runs: drawn without replacement from `pool`,
/// cycling through fresh permutations once the pool is used up.
pub fn draw_seeds(pool: &[NodeId], count: usize, master_seed: u64) -> Vec<NodeId> {
    let mut rng = run_rng(master_seed, u64::MAX);
    let mut seeds = Vec::with_capacity(count);
    let mut perm = pool.to_vec();
    while seeds.len() < count && !perm.is_empty() {
        perm.shuffle(&mut rng);
        seeds.extend(perm.iter().take(count - seeds.len()));
    }
    seeds
}

fn seed_pool(g: &Graph, largest_component: bool) -> Result<Vec<NodeId>, HarnessError> {
    if largest_component {
        Ok(g.largest_component()?)
    } else if g.is_empty() {
        Err(GraphError::NoNodes.into())
    } else {
        Ok((0..g.node_count()).collect())
    }
}

/// Partitions that community-reach metrics are measured against.
#[derive(Clone, Debug, Default)]
pub struct Partitions {
    pub rak: Option<Partition>,
    pub cnm: Option<Partition>,
}

fn read_file(path: &Path) -> Result<String, HarnessError> {
    let mut text = String::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| HarnessError::File {
            path: path.to_owned(),
            source,
        })?;
    Ok(text)
}

/// Runs community detection. RAK draws from a stream seeded by `seed`.
pub fn detect_partition(g: &Graph, algo: CommunityAlgo, seed: u64) -> Result<Partition, HarnessError> {
    Ok(match algo {
        CommunityAlgo::Rak => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            detect_rak(g, &mut rng, DEFAULT_RAK_SWEEPS)?.partition
        }
        CommunityAlgo::Cnm => detect_cnm(g)?,
    })
}

/// Loads, detects or reuses a cached partition.
///
/// With a cache directory, detected partitions are stored as
/// `<cache>/<key>.<algo>[.<seed>].part` and read back on later runs.
pub fn obtain_partition(
    g: &Graph,
    labels: &IdMap,
    algo: CommunityAlgo,
    source: &PartitionSource,
    seed: u64,
    cache: Option<(&Path, &str)>,
) -> Result<Partition, HarnessError> {
    let detect_path = cache.map(|(dir, key)| {
        let name = match algo {
            CommunityAlgo::Rak => format!("{key}.rak.{seed}.part"),
            CommunityAlgo::Cnm => format!("{key}.cnm.part"),
        };
        dir.join(name)
    });
    let path = match source {
        PartitionSource::File(p) => Some(p.clone()),
        PartitionSource::Detect => detect_path.clone().filter(|p| p.exists()),
    };
    if let Some(path) = path {
        let text = read_file(&path)?;
        return Ok(load_partition(text.as_bytes(), labels)?);
    }
    let part = detect_partition(g, algo, seed)?;
    if let Some(path) = detect_path {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut out = Vec::new();
        part.write(&mut out, labels)?;
        fs::write(&path, out).map_err(|source| HarnessError::File { path, source })?;
    }
    Ok(part)
}

/// Every (strategy, seed) run, with one row per checkpoint and metric.
///
/// Seed nodes are shared by all strategies. Each run draws from its own
/// random stream derived from the master seed, the strategy and the seed
/// index, so results do not depend on scheduling.
pub fn run_experiment(
    g: &Graph,
    labels: &IdMap,
    cfg: &ExperimentConfig,
    partitions: &Partitions,
) -> Result<Vec<RawRow>, HarnessError> {
    cfg.validate()?;
    let n = g.node_count();
    let checkpoints = cfg.checkpoints.resolve(n);
    let max_size = checkpoints.last().copied().unwrap_or(1).max(1);
    let pool = seed_pool(g, cfg.largest_component)?;
    let seeds = draw_seeds(&pool, cfg.seeds, cfg.master_seed);
    let mut ctx = MetricContext::new(g);
    ctx.degree_mode = cfg.degree_mode;
    ctx.hub_count = cfg.effective_hub_count(n);
    ctx.rak = partitions.rak.as_ref();
    ctx.cnm = partitions.cnm.as_ref();
    if cfg.metrics.contains(&Metric::CommReachRak) && ctx.rak.is_none()
        || cfg.metrics.contains(&Metric::CommReachCnm) && ctx.cnm.is_none()
    {
        return Err(HarnessError::Config(
            "community reach requested without a partition".into(),
        ));
    }

    let runs: Vec<(Strategy, usize)> = cfg
        .strategies
        .iter()
        .flat_map(|&s| (0..seeds.len()).map(move |i| (s, i)))
        .collect();
    let per_run = |&(strategy, seed_index): &(Strategy, usize)| -> Result<Vec<RawRow>, HarnessError> {
        let seed = seeds[seed_index];
        let stream = ((strategy.index() as u64) << 32) | seed_index as u64;
        let mut rng = run_rng(cfg.master_seed, stream);
        let sampler = SamplerConfig::new(strategy).with_burn_probability(cfg.burn_probability);
        let row = |checkpoint: usize, metric: Metric, value: Option<f64>, status: RunStatus| RawRow {
            strategy,
            seed_index,
            seed_node: labels.label(seed).to_owned(),
            checkpoint,
            metric,
            value,
            status,
        };
        let mut rows = Vec::with_capacity(checkpoints.len() * cfg.metrics.len());
        match sample(g, seed, max_size, &sampler, &mut rng) {
            Ok(s) => {
                let report = evaluate_checkpoints::<f64>(&ctx, s.trace(), &checkpoints, &cfg.metrics)?;
                let mut values = report.values.into_iter();
                for &c in &checkpoints {
                    for &m in &cfg.metrics {
                        if c <= s.len() {
                            let v = values.next().expect("one value per reached checkpoint and metric");
                            debug_assert_eq!((v.size, v.metric), (c, m));
                            rows.push(row(c, m, Some(v.value), RunStatus::Ok));
                        } else {
                            rows.push(row(c, m, None, RunStatus::Exhausted));
                        }
                    }
                }
            }
            Err(_) => {
                for &c in &checkpoints {
                    for &m in &cfg.metrics {
                        rows.push(row(c, m, None, RunStatus::Error));
                    }
                }
            }
        }
        Ok(rows)
    };
    let results: Vec<Result<Vec<RawRow>, HarnessError>> = with_thread_cap(|| runs.par_iter().map(per_run).collect());
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_raw<W: Write>(rows: &[RawRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_raw<R: Read>(input: R) -> Result<Vec<RawRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub strategy: Strategy,
    pub metric: Metric,
    pub checkpoint: usize,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// Sample mean and standard deviation (`n − 1` denominator, zero for a
/// single value). Values are summed in sorted order so the result does not
/// depend on input order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean).powi(2)).collect();
    dev.sort_by(f64::total_cmp);
    (mean, (dev.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

/// Groups `Ok` rows by (strategy, metric, checkpoint). Groups with no
/// successful run are omitted.
pub fn aggregate(rows: &[RawRow]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(Strategy, Metric, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        if let (RunStatus::Ok, Some(v)) = (r.status, r.value) {
            groups.entry((r.strategy, r.metric, r.checkpoint)).or_default().push(v);
        }
    }
    groups
        .into_iter()
        .map(|((strategy, metric, checkpoint), values)| {
            let (mean, std) = mean_std(&values);
            AggregateRow {
                strategy,
                metric,
                checkpoint,
                mean,
                std,
                count: values.len(),
            }
        })
        .collect()
}

pub fn write_aggregate<W: Write>(rows: &[AggregateRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// gnuplot data: one indexed block per (strategy, metric) with
/// `checkpoint mean std` columns.
pub fn write_gnuplot<W: Write>(rows: &[AggregateRow], mut out: W) -> std::io::Result<()> {
    let mut current = None;
    for r in rows {
        let key = (r.strategy, r.metric);
        if current != Some(key) {
            if current.is_some() {
                writeln!(out, "\n")?;
            }
            writeln!(out, "# {} {}", r.strategy, r.metric)?;
            current = Some(key);
        }
        writeln!(out, "{} {} {}", r.checkpoint, r.mean, r.std)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMethod {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub avg_degree: f64,
    /// Mean local clustering over nodes of degree at least two.
    pub clustering: f64,
    /// Mean local clustering with degree < 2 nodes counted as zero.
    pub clustering_all: f64,
    pub path_length: f64,
    pub path_method: PathMethod,
    pub largest_component: usize,
}

fn bfs_distance_sum(g: &Graph, source: NodeId, dist: &mut [u32], queue: &mut Vec<NodeId>) -> (u64, u64) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push(source);
    let (mut sum, mut reached) = (0u64, 0u64);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &w in g.adjacency(u) {
            if dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                sum += dist[w] as u64;
                reached += 1;
                queue.push(w);
            }
        }
    }
    (sum, reached)
}

/// Mean shortest-path length over ordered pairs in the largest component:
/// exact up to [`EXACT_PATH_LENGTH_LIMIT`] nodes, otherwise estimated from
/// [`PATH_LENGTH_SOURCES`] uniformly drawn sources.
pub fn characteristic_path_length(g: &Graph, seed: u64) -> Result<(f64, PathMethod), HarnessError> {
    let lcc = g.largest_component()?;
    let (sources, method) = if lcc.len() <= EXACT_PATH_LENGTH_LIMIT {
        (lcc.clone(), PathMethod::Exact)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picked = rand::seq::index::sample(&mut rng, lcc.len(), PATH_LENGTH_SOURCES);
        (picked.into_iter().map(|i| lcc[i]).collect(), PathMethod::Sampled)
    };
    let (sum, pairs) = with_thread_cap(|| {
        sources
            .par_iter()
            .map_init(
                || (vec![u32::MAX; g.node_count()], Vec::new()),
                |(dist, queue), &s| bfs_distance_sum(g, s, dist, queue),
            )
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    });
    let pl = if pairs == 0 { 0.0 } else { sum as f64 / pairs as f64 };
    Ok((pl, method))
}

pub fn dataset_summary(g: &Graph) -> Result<DatasetSummary, HarnessError> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphError::NoNodes.into());
    }
    let m = g.edge_count();
    let links = crate::metrics::neighbor_links(g);
    let (mut cc_sum, mut eligible) = (0.0, 0usize);
    for (v, &l) in links.iter().enumerate() {
        let d = g.deg(v) as f64;
        if g.deg(v) >= 2 {
            cc_sum += 2.0 * l as f64 / (d * (d - 1.0));
            eligible += 1;
        }
    }
    let (path_length, path_method) = characteristic_path_length(g, 0)?;
    Ok(DatasetSummary {
        nodes: n,
        edges: m,
        density: if n > 1 {
            2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
        } else {
            0.0
        },
        avg_degree: 2.0 * m as f64 / n as f64,
        clustering: if eligible == 0 { 0.0 } else { cc_sum / eligible as f64 },
        clustering_all: average_local_clustering::<f64>(g)?,
        path_length,
        path_method,
        largest_component: g.largest_component()?.len(),
    })
}

/// Smallest prefix length whose hub count reaches each target, or `None`
/// when the trace never gets there. A target of zero is met by the first
/// node.
pub fn coverage_sizes(trace: &[NodeId], is_hub: &[bool], hub_total: usize, targets: &[f64]) -> Vec<Option<usize>> {
    let mut first_reach = Vec::with_capacity(hub_total + 1);
    first_reach.push(1);
    for (i, &v) in trace.iter().enumerate() {
        if is_hub[v] {
            first_reach.push(i + 1);
        }
    }
    targets
        .iter()
        .map(|&f| {
            // hits needed: smallest h with h / total >= f
            let needed = ((f * hub_total as f64) - 1e-9).ceil().max(0.0) as usize;
            if needed == 0 && trace.is_empty() {
                return None;
            }
            first_reach.get(needed).copied()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutbreakConfig {
    pub strategies: Vec<Strategy>,
    pub hub_count: usize,
    pub seeds: usize,
    pub master_seed: u64,
    pub targets: Vec<f64>,
    /// Runs stop here; unmet targets are censored at this size.
    pub max_size: usize,
    pub burn_probability: f64,
    pub largest_component: bool,
}

impl OutbreakConfig {
    pub fn default_targets() -> Vec<f64> {
        (1..=10).map(|i| i as f64 / 10.0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutbreakRow {
    pub strategy: Strategy,
    pub target: f64,
    /// Mean over runs of the sample size reaching the target, with censored
    /// runs counted at `max_size`.
    pub mean_size: f64,
    pub std: f64,
    pub censored: usize,
    pub runs: usize,
    /// Mean number of node draws (ACQ) or walk steps (RW) per run.
    pub mean_draws: f64,
}

/// Sample size needed by each strategy to collect growing fractions of the
/// top-`K` hubs.
pub fn outbreak_comparison(g: &Graph, cfg: &OutbreakConfig) -> Result<Vec<OutbreakRow>, HarnessError> {
    if cfg.strategies.is_empty() {
        return Err(HarnessError::Config("no strategies selected".into()));
    }
    if cfg.seeds == 0 || cfg.max_size == 0 {
        return Err(HarnessError::Config("seeds and max_size must be positive".into()));
    }
    let hubs = top_hubs(g, cfg.hub_count)?;
    let mut is_hub = vec![false; g.node_count()];
    for &h in &hubs {
        is_hub[h] = true;
    }
    let pool = seed_pool(g, cfg.largest_component)?;
    let seeds = draw_seeds(&pool, cfg.seeds, cfg.master_seed);
    let runs: Vec<(Strategy, usize)> = cfg
        .strategies
        .iter()
        .flat_map(|&s| (0..seeds.len()).map(move |i| (s, i)))
        .collect();
    // per run: size reaching each target, and draws used
    type RunCoverage = Result<(Vec<Option<usize>>, u64), HarnessError>;
    let results: Vec<RunCoverage> = with_thread_cap(|| {
        runs.par_iter()
            .map(|&(strategy, i)| {
                let stream = ((strategy.index() as u64) << 32) | i as u64;
                let mut rng = run_rng(cfg.master_seed, stream);
                let sampler = SamplerConfig::new(strategy).with_burn_probability(cfg.burn_probability);
                let s = sample(g, seeds[i], cfg.max_size, &sampler, &mut rng)?;
                Ok((coverage_sizes(s.trace(), &is_hub, hubs.len(), &cfg.targets), s.draws()))
            })
            .collect()
    });

    let mut out = Vec::new();
    let mut results = results.into_iter();
    for &strategy in &cfg.strategies {
        let mut per_target: Vec<Vec<f64>> = vec![Vec::new(); cfg.targets.len()];
        let mut censored = vec![0usize; cfg.targets.len()];
        let mut draws = Vec::new();
        for _ in 0..seeds.len() {
            let (sizes, d) = results.next().expect("one result per run")?;
            draws.push(d as f64);
            for (t, size) in sizes.into_iter().enumerate() {
                match size {
                    Some(s) => per_target[t].push(s as f64),
                    None => {
                        censored[t] += 1;
                        per_target[t].push(cfg.max_size as f64);
                    }
                }
            }
        }
        let (mean_draws, _) = mean_std(&draws);
        for (t, &target) in cfg.targets.iter().enumerate() {
            let (mean_size, std) = mean_std(&per_target[t]);
            out.push(OutbreakRow {
                strategy,
                target,
                mean_size,
                std,
                censored: censored[t],
                runs: seeds.len(),
                mean_draws,
            });
        }
    }
    Ok(out)
}

pub fn write_outbreak<W: Write>(rows: &[OutbreakRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Random stream helper for callers that need a generator tied to the
/// master seed, e.g. community detection.
pub fn stream_rng(master_seed: u64, stream: u64) -> impl Rng {
    run_rng(master_seed, stream)
}
