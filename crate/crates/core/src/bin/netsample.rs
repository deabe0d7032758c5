use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netsample::community::modularity;
use netsample::harness::{
    aggregate, dataset_summary, obtain_partition, outbreak_comparison, read_raw, run_experiment, with_thread_cap,
    write_aggregate, write_gnuplot, write_outbreak, write_raw, CommunityAlgo, ExperimentConfig, HarnessError,
    OutbreakConfig, PartitionSource, Partitions, RunStatus,
};
use netsample::synth::{
    gen_chung_lu, gen_planted_partition, power_law_weights, run_degree_order_experiment, run_expansion_experiment,
    CandidateRule, DegreeOrderExperiment, ExpansionExperiment, PlantedPartitionConfig, Z_99,
};
use netsample::{load_edge_list, sample, Graph, IdMap, SampleStatus, SamplerConfig, Strategy};

/// Link-trace network sampling experiments.
#[derive(Parser)]
#[command(name = "netsample", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one sampler and print the trace, one node per line.
    Sample(SampleArgs),
    /// Run a configured experiment and write raw per-run rows.
    Eval(EvalArgs),
    /// Reduce raw rows to mean and standard deviation per checkpoint.
    Aggregate(AggregateArgs),
    /// Detect communities and write a partition file.
    Communities(CommunitiesArgs),
    /// Generate synthetic graphs.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Monte Carlo checks of the expansion and degree-order results.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Dataset statistics: size, density, degree, clustering, path length.
    Summary(SummaryArgs),
    /// Sample size needed to collect fractions of the top hubs.
    Outbreak(OutbreakArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    strategy: Strategy,
    /// Seed node label as it appears in the edge list.
    #[arg(long)]
    seed_node: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    /// Forest-fire burn probability.
    #[arg(long, default_value_t = 0.7)]
    p: f64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// TOML key/value experiment configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured master seed.
    #[arg(long)]
    rng: Option<u64>,
    /// Draw seeds from every component instead of the largest one.
    #[arg(long)]
    all_components: bool,
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write gnuplot data blocks here.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Rak,
    Cnm,
}

impl From<AlgoArg> for CommunityAlgo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Rak => CommunityAlgo::Rak,
            AlgoArg::Cnm => CommunityAlgo::Cnm,
        }
    }
}

#[derive(Args)]
struct CommunitiesArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Equal-size planted communities with fixed intra/inter stub counts.
    Planted(PlantedArgs),
    /// Expected-degree random graph with power-law or listed weights.
    Chunglu(ChungLuArgs),
}

#[derive(Args)]
struct PlantedArgs {
    #[arg(long)]
    communities: usize,
    #[arg(long)]
    size: usize,
    #[arg(long)]
    e_in: usize,
    #[arg(long)]
    e_out: usize,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out_graph: PathBuf,
    #[arg(long)]
    out_partition: PathBuf,
}

#[derive(Args)]
struct ChungLuArgs {
    /// One weight per line; overrides the power-law options.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 200.0)]
    max_degree: f64,
    #[arg(long, default_value_t = 1.0)]
    min_degree: f64,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out_graph: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CandidateArg {
    Frontier,
    All,
}

impl From<CandidateArg> for CandidateRule {
    fn from(c: CandidateArg) -> Self {
        match c {
            CandidateArg::Frontier => CandidateRule::Frontier,
            CandidateArg::All => CandidateRule::AllOutside,
        }
    }
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// New-community versus current-community expansion on planted graphs.
    XsExpansion(XsExpansionArgs),
    /// Induced degree into a fixed sample by expected-degree class.
    SecOrder(SecOrderArgs),
}

#[derive(Args)]
struct XsExpansionArgs {
    #[arg(long, default_value_t = 10)]
    communities: usize,
    #[arg(long, default_value_t = 100)]
    size: usize,
    #[arg(long, default_value_t = 20)]
    e_in: usize,
    #[arg(long, default_value_t = 2)]
    e_out: usize,
    #[arg(long, default_value_t = 5)]
    sample_size: usize,
    #[arg(long, default_value_t = 1)]
    current_members: usize,
    #[arg(long, value_enum, default_value_t = CandidateArg::Frontier)]
    candidates: CandidateArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SecOrderArgs {
    /// Node classes in id order as `weight:count`, comma separated.
    #[arg(long, default_value = "2:10,8:10,10:20")]
    classes: String,
    /// Zero-based index into `--classes` of the class forming the sample.
    #[arg(long, default_value_t = 2)]
    sample_class: usize,
    #[arg(long, value_enum, default_value_t = CandidateArg::Frontier)]
    candidates: CandidateArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummaryArgs {
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct OutbreakArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "sec,acq")]
    strategies: Vec<Strategy>,
    #[arg(long = "K", default_value_t = 100)]
    hubs: usize,
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    /// Runs stop at this size; defaults to the node count.
    #[arg(long)]
    max_size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.7)]
    p: f64,
    #[arg(long)]
    all_components: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad arguments or configuration rather than bad data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

enum Outcome {
    Complete,
    Partial(String),
}

fn load_graph(path: &Path) -> Result<(Graph, IdMap)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_edge_list(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn cmd_sample(a: SampleArgs) -> Result<Outcome> {
    let (g, labels) = load_graph(&a.graph)?;
    let seed = labels
        .get(&a.seed_node)
        .ok_or_else(|| anyhow!("seed node {:?} is not in the graph", a.seed_node))?;
    let cfg = SamplerConfig::new(a.strategy).with_burn_probability(a.p);
    let mut rng = ChaCha8Rng::seed_from_u64(a.rng);
    let s = sample(&g, seed, a.k, &cfg, &mut rng)?;
    let mut out = output(None)?;
    for &v in s.trace() {
        writeln!(out, "{}", labels.label(v))?;
    }
    out.flush()?;
    Ok(match s.status() {
        SampleStatus::Complete => Outcome::Complete,
        SampleStatus::Exhausted => Outcome::Partial(format!("sample stopped at {} of {} nodes", s.len(), a.k)),
    })
}

fn cmd_eval(a: EvalArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let mut cfg = ExperimentConfig::from_toml(&text)?;
    if let Some(seed) = a.rng {
        cfg.master_seed = seed;
    }
    if a.all_components {
        cfg.largest_component = false;
    }
    let (g, labels) = load_graph(&a.graph)?;
    let key = a
        .graph
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    let cache = cfg.partition_cache.as_deref().map(|dir| (dir, key.as_str()));
    let mut partitions = Partitions::default();
    if let Some(src) = &cfg.rak {
        partitions.rak = Some(obtain_partition(
            &g,
            &labels,
            CommunityAlgo::Rak,
            src,
            cfg.community_seed,
            cache,
        )?);
    }
    if let Some(src) = &cfg.cnm {
        partitions.cnm = Some(obtain_partition(
            &g,
            &labels,
            CommunityAlgo::Cnm,
            src,
            cfg.community_seed,
            cache,
        )?);
    }
    let rows = run_experiment(&g, &labels, &cfg, &partitions)?;
    write_raw(&rows, output(a.out.as_deref())?)?;
    let incomplete = rows.iter().filter(|r| r.status != RunStatus::Ok).count();
    Ok(if incomplete == 0 {
        Outcome::Complete
    } else {
        Outcome::Partial(format!("{incomplete} rows exhausted or failed"))
    })
}

fn cmd_aggregate(a: AggregateArgs) -> Result<Outcome> {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let raw = read_raw(BufReader::new(file))?;
    if raw.is_empty() {
        return Err(anyhow!("{} has no rows", a.input.display()));
    }
    let agg = aggregate(&raw);
    write_aggregate(&agg, output(a.out.as_deref())?)?;
    if let Some(path) = &a.gnuplot {
        let mut out = create(path)?;
        write_gnuplot(&agg, &mut out)?;
        out.flush()?;
    }
    Ok(Outcome::Complete)
}

fn cmd_communities(a: CommunitiesArgs) -> Result<Outcome> {
    let (g, labels) = load_graph(&a.graph)?;
    let part = obtain_partition(&g, &labels, a.algo.into(), &PartitionSource::Detect, a.rng, None)?;
    let q: f64 = modularity(&g, &part)?;
    eprintln!("communities={} modularity={q:.6}", part.community_count());
    let mut out = output(a.out.as_deref())?;
    part.write(&mut out, &labels)?;
    out.flush()?;
    Ok(Outcome::Complete)
}

fn cmd_planted(a: PlantedArgs) -> Result<Outcome> {
    let cfg = PlantedPartitionConfig {
        communities: a.communities,
        community_size: a.size,
        e_in: a.e_in,
        e_out: a.e_out,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.rng);
    let planted = gen_planted_partition(&cfg, &mut rng)?;
    let labels = IdMap::identity(cfg.node_count());
    let mut out = create(&a.out_graph)?;
    planted.graph.write_edge_list(&mut out, None)?;
    out.flush()?;
    let mut out = create(&a.out_partition)?;
    planted.partition.write(&mut out, &labels)?;
    out.flush()?;
    eprintln!(
        "realized_in={:.4} realized_out={:.4} unpaired_stubs={} parity_drops={}",
        planted.realized_in,
        planted.realized_out,
        planted.unpaired_stubs,
        planted.parity_drops.len()
    );
    Ok(Outcome::Complete)
}

fn cmd_chunglu(a: ChungLuArgs) -> Result<Outcome> {
    let weights = match &a.weights {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .enumerate()
                .map(|(i, l)| l.parse::<f64>().with_context(|| format!("weight {}: {l:?}", i + 1)))
                .collect::<Result<Vec<f64>>>()?
        }
        None => power_law_weights(a.n, a.gamma, a.avg_degree, a.max_degree, a.min_degree)
            .map_err(|e| usage(e.to_string()))?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.rng);
    let cl = gen_chung_lu(&weights, &mut rng)?;
    let mut out = create(&a.out_graph)?;
    cl.graph.write_edge_list(&mut out, None)?;
    out.flush()?;
    eprintln!(
        "nodes={} edges={} capped_pairs={}",
        cl.graph.node_count(),
        cl.graph.edge_count(),
        cl.capped_pairs
    );
    Ok(Outcome::Complete)
}

fn candidate_name(c: CandidateArg) -> &'static str {
    match c {
        CandidateArg::Frontier => "frontier",
        CandidateArg::All => "all",
    }
}

fn cmd_xs_expansion(a: XsExpansionArgs) -> Result<Outcome> {
    let exp = ExpansionExperiment {
        planted: PlantedPartitionConfig {
            communities: a.communities,
            community_size: a.size,
            e_in: a.e_in,
            e_out: a.e_out,
        },
        sample_size: a.sample_size,
        current_members: a.current_members,
        candidates: a.candidates.into(),
        trials: a.trials,
        master_seed: a.rng,
    };
    let r = run_expansion_experiment(&exp).map_err(|e| usage(e.to_string()))?;
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record([
        "communities",
        "community_size",
        "e_in",
        "e_out",
        "sample_size",
        "current_members",
        "candidates",
        "trials",
        "rng",
        "bound",
        "condition_holds",
        "mean_new",
        "mean_curr",
        "se_new",
        "se_curr",
        "mean_diff",
        "se_diff",
        "diff_ci99_low",
        "diff_ci99_high",
        "diff_lower_99",
        "trials_used",
        "trials_skipped",
        "realized_in",
        "realized_out",
    ])?;
    // two-sided 99% interval uses the 0.995 quantile
    let z = 2.575_829_303_548_901;
    w.write_record([
        a.communities.to_string(),
        a.size.to_string(),
        a.e_in.to_string(),
        a.e_out.to_string(),
        a.sample_size.to_string(),
        a.current_members.to_string(),
        candidate_name(a.candidates).to_string(),
        a.trials.to_string(),
        a.rng.to_string(),
        r.bound.to_string(),
        r.condition_holds.to_string(),
        r.mean_new.to_string(),
        r.mean_curr.to_string(),
        r.se_new.to_string(),
        r.se_curr.to_string(),
        r.mean_diff.to_string(),
        r.se_diff.to_string(),
        (r.mean_diff - z * r.se_diff).to_string(),
        (r.mean_diff + z * r.se_diff).to_string(),
        r.diff_lower_99.to_string(),
        r.trials_used.to_string(),
        r.trials_skipped.to_string(),
        r.realized_in.to_string(),
        r.realized_out.to_string(),
    ])?;
    w.flush()?;
    Ok(if r.trials_used == 0 {
        Outcome::Partial("every trial lacked a candidate pair".into())
    } else {
        Outcome::Complete
    })
}

fn parse_classes(spec: &str) -> Result<Vec<(f64, usize)>> {
    spec.split(',')
        .map(|part| {
            let (w, c) = part
                .split_once(':')
                .ok_or_else(|| usage(format!("class {part:?} is not weight:count")))?;
            let w: f64 = w.trim().parse().map_err(|_| usage(format!("bad weight in {part:?}")))?;
            let c: usize = c.trim().parse().map_err(|_| usage(format!("bad count in {part:?}")))?;
            Ok((w, c))
        })
        .collect()
}

fn cmd_sec_order(a: SecOrderArgs) -> Result<Outcome> {
    let classes = parse_classes(&a.classes)?;
    if a.sample_class >= classes.len() {
        return Err(usage("--sample-class is out of range"));
    }
    let mut weights = Vec::new();
    let mut sample = Vec::new();
    for (i, &(w, count)) in classes.iter().enumerate() {
        if i == a.sample_class {
            sample.extend(weights.len()..weights.len() + count);
        }
        weights.extend(std::iter::repeat_n(w, count));
    }
    let exp = DegreeOrderExperiment {
        weights,
        sample,
        candidates: a.candidates.into(),
        trials: a.trials,
        master_seed: a.rng,
    };
    let r = run_degree_order_experiment(&exp).map_err(|e| usage(e.to_string()))?;
    let join = |f: &dyn Fn(&netsample::synth::WeightClassStats) -> String| {
        r.classes.iter().map(f).collect::<Vec<_>>().join(";")
    };
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record([
        "classes",
        "sample_class",
        "candidates",
        "trials",
        "rng",
        "class_weights",
        "class_mean_induced",
        "class_se_induced",
        "class_mean_degree",
        "ordered_fraction",
        "min_separation",
        "z99",
        "trials_used",
        "trials_skipped",
    ])?;
    w.write_record([
        a.classes.clone(),
        a.sample_class.to_string(),
        candidate_name(a.candidates).to_string(),
        a.trials.to_string(),
        a.rng.to_string(),
        join(&|c| c.weight.to_string()),
        join(&|c| c.mean_induced.to_string()),
        join(&|c| c.se_induced.to_string()),
        join(&|c| c.mean_degree.to_string()),
        r.ordered_fraction.to_string(),
        r.min_separation.to_string(),
        Z_99.to_string(),
        r.trials_used.to_string(),
        r.trials_skipped.to_string(),
    ])?;
    w.flush()?;
    Ok(if r.trials_used == 0 {
        Outcome::Partial("no trial had two candidate classes".into())
    } else {
        Outcome::Complete
    })
}

fn cmd_summary(a: SummaryArgs) -> Result<Outcome> {
    let (g, _) = load_graph(&a.graph)?;
    let s = dataset_summary(&g)?;
    let mut w = csv::Writer::from_writer(output(None)?);
    w.serialize(&s)?;
    w.flush()?;
    Ok(Outcome::Complete)
}

fn cmd_outbreak(a: OutbreakArgs) -> Result<Outcome> {
    let (g, _) = load_graph(&a.graph)?;
    let cfg = OutbreakConfig {
        strategies: a.strategies,
        hub_count: a.hubs,
        seeds: a.seeds,
        master_seed: a.rng,
        targets: a.targets.unwrap_or_else(OutbreakConfig::default_targets),
        max_size: a.max_size.unwrap_or(g.node_count()),
        burn_probability: a.p,
        largest_component: !a.all_components,
    };
    let rows = outbreak_comparison(&g, &cfg)?;
    write_outbreak(&rows, output(a.out.as_deref())?)?;
    let censored: usize = rows.iter().map(|r| r.censored).sum();
    Ok(if censored == 0 {
        Outcome::Complete
    } else {
        Outcome::Partial(format!("{censored} censored (strategy, target, seed) results"))
    })
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Sample(a) => cmd_sample(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Communities(a) => cmd_communities(a),
        Command::Synth(SynthCommand::Planted(a)) => cmd_planted(a),
        Command::Synth(SynthCommand::Chunglu(a)) => cmd_chunglu(a),
        Command::Theory(TheoryCommand::XsExpansion(a)) => cmd_xs_expansion(a),
        Command::Theory(TheoryCommand::SecOrder(a)) => cmd_sec_order(a),
        Command::Summary(a) => cmd_summary(a),
        Command::Outbreak(a) => cmd_outbreak(a),
    }
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.downcast_ref::<UsageError>().is_some()
        || matches!(err.downcast_ref::<HarnessError>(), Some(HarnessError::Config(_)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match with_thread_cap(|| run(cli.command)) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial(msg)) => {
            eprintln!("netsample: partial result: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("netsample: {e:#}");
            ExitCode::from(if is_usage(&e) { 1 } else { 2 })
        }
    }
}
