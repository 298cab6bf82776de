use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use stratnet::harness::{run_experiment, table1_calibration, ExperimentConfig};
use stratnet::inference::{
    conditional_p_value, critical_values_from_values, reference_sample, DeltaSource, Reference, TauChoice,
    TestOptions, TestResultRecord, TestStatisticSpec, DEFAULT_PILOT_STEPS,
};
use stratnet::io::{fmt17, load_network, write_edges, write_json, Fixed17, IndexBase, Network};
use stratnet::manifest::RunManifest;
use stratnet::model::{mle_null, params_from_json, simulate_alternative, ParamsRecord, StrategicSpec};
use stratnet::rng::{entropy_seed, substream};
use stratnet::sampler::{enumerate_reference_set, DEFAULT_Q};
use stratnet::{cross_link_matrix, degree_sequence, AdjacencyMatrix, Error, GroupAssignment, Result};

const SIMULATE_STREAM: u64 = 0x51A;

#[derive(Parser, Debug)]
#[command(name = "stratnet", version, about = "Conditional tests for strategic interaction in directed networks")]
pub struct Cli {
    /// Worker threads (default: all available processors).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Whether node ids in CSV files start at 0 or 1.
    #[arg(long, global = true, value_enum, default_value_t = Base::Zero)]
    pub index_base: Base,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Base {
    Zero,
    One,
}

impl From<Base> for IndexBase {
    fn from(b: Base) -> Self {
        match b {
            Base::Zero => IndexBase::Zero,
            Base::One => IndexBase::One,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw networks with the same degrees and cross-link matrix.
    Sample(SampleArgs),
    /// Fit the null model by maximum likelihood.
    Fit(FitArgs),
    /// Simulate a network as the least dense pure-strategy equilibrium.
    Simulate(SimulateArgs),
    /// Conditional test of no strategic interaction.
    Test(TestArgs),
    /// Size and power experiment.
    McExperiment(McArgs),
    /// List every network with the same degrees and cross-link matrix.
    Enumerate(EnumerateArgs),
    /// Print the calibrated link probabilities of the Monte Carlo design.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug)]
pub struct NetworkArgs {
    /// Edge list CSV with header `source,target`.
    #[arg(long)]
    pub edges: PathBuf,
    /// Node CSV with header `node,group`; all nodes share one group if absent.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    /// Chain steps per draw.
    #[arg(long, conflicts_with = "tau_auto")]
    pub tau: Option<usize>,
    /// Choose tau from a pilot run so that each arc is modified about R times.
    #[arg(long, value_name = "R")]
    pub tau_auto: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_PILOT_STEPS)]
    pub pilot_steps: usize,
    /// Probability of a lazy step.
    #[arg(long, default_value_t = DEFAULT_Q)]
    pub q: f64,
}

impl ChainArgs {
    fn tau_choice(&self) -> TauChoice {
        match (self.tau, self.tau_auto) {
            (Some(t), _) => TauChoice::Fixed(t),
            (None, r) => TauChoice::Auto { r: r.unwrap_or(10.0), pilot_steps: self.pilot_steps },
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceArg {
    Density,
    Degree,
    DegreeCrosslink,
    Enumerated,
}

impl From<ReferenceArg> for Reference {
    fn from(r: ReferenceArg) -> Self {
        match r {
            ReferenceArg::Density => Reference::DensityOnly,
            ReferenceArg::Degree => Reference::DegreeOnly,
            ReferenceArg::DegreeCrosslink => Reference::DegreeAndCrosslink,
            ReferenceArg::Enumerated => Reference::Enumerated,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecArg {
    Reciprocity,
    Transitivity,
    CustomerProduct,
}

impl SpecArg {
    fn spec(self) -> StrategicSpec {
        match self {
            SpecArg::Reciprocity => StrategicSpec::reciprocity(),
            SpecArg::Transitivity => StrategicSpec::transitivity(),
            SpecArg::CustomerProduct => StrategicSpec::customer_product(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticArg {
    LocallyBest,
    Ti,
    Reciprocity,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Keep degrees only, or degrees and cross-links.
    #[arg(long, value_enum, default_value_t = ReferenceArg::DegreeCrosslink)]
    pub reference: ReferenceArg,
    #[arg(long)]
    pub seed: Option<u64>,
    /// A `.csv` file (one file, with a `draw` column) or a directory of
    /// per-draw edge lists.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, default_value = "params.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// Node groups; required when the parameters have more than one group.
    #[arg(long)]
    pub nodes: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, value_enum)]
    pub spec: SpecArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "edges.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, value_enum, default_value_t = StatisticArg::LocallyBest)]
    pub statistic: StatisticArg,
    /// Strategic term of the locally best statistic.
    #[arg(long, value_enum)]
    pub spec: Option<SpecArg>,
    /// Use these nuisance parameters instead of the null MLE.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReferenceArg::DegreeCrosslink)]
    pub reference: ReferenceArg,
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Level for the exact randomized test (enumerated reference only).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "result.json")]
    pub out: PathBuf,
    /// One statistic value per row; defaults to `null_draws.csv` next to
    /// the result.
    #[arg(long)]
    pub null_draws: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    /// Experiment configuration JSON; unspecified fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Published scale: 1000 replications, 400 draws per test.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "power.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, default_value = "reference_set.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    let dir = parent_dir(path);
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.display().to_string(), source: e })
}

fn resolve_seed(seed: Option<u64>, manifest: &mut RunManifest) -> u64 {
    let s = seed.unwrap_or_else(entropy_seed);
    manifest.seed = Some(s);
    manifest.seed_from_entropy = seed.is_none();
    s
}

fn load(args: &NetworkArgs, base: IndexBase, manifest: &mut RunManifest) -> Result<Network> {
    manifest.add_input(&args.edges)?;
    if let Some(n) = &args.nodes {
        manifest.add_input(n)?;
    }
    let net = load_network(&args.edges, args.nodes.as_deref(), base)?;
    if net.duplicate_arcs > 0 {
        manifest.warn(format!("{} duplicate arcs collapsed", net.duplicate_arcs));
    }
    Ok(net)
}

fn write_multi_draw_csv(path: &Path, draws: &[AdjacencyMatrix], base: IndexBase, column: &str) -> Result<()> {
    let off = match base {
        IndexBase::Zero => 0,
        IndexBase::One => 1,
    };
    let err = |e: csv::Error| Error::Io { path: path.display().to_string(), source: e.into() };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record([column, "source", "target"]).map_err(err)?;
    for (b, d) in draws.iter().enumerate() {
        for (i, j) in d.to_edge_list() {
            w.write_record([b.to_string(), (i + off).to_string(), (j + off).to_string()]).map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

fn config_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

pub fn run(cli: Cli) -> Result<()> {
    let base: IndexBase = cli.index_base.into();
    match cli.command {
        Command::Sample(a) => sample(a, base),
        Command::Fit(a) => fit(a, base),
        Command::Simulate(a) => simulate(a, base),
        Command::Test(a) => test(a, base),
        Command::McExperiment(a) => mc_experiment(a),
        Command::Enumerate(a) => enumerate(a, base),
        Command::Calibrate(a) => calibrate(a),
    }
}

fn sample(a: SampleArgs, base: IndexBase) -> Result<()> {
    let mut manifest = RunManifest::start(
        "sample",
        serde_json::json!({
            "draws": a.draws, "tau": a.chain.tau, "tau_auto": a.chain.tau_auto,
            "pilot_steps": a.chain.pilot_steps, "q": Fixed17(a.chain.q), "reference": a.reference,
        }),
    );
    let seed = resolve_seed(a.seed, &mut manifest);
    let net = load(&a.network, base, &mut manifest)?;
    let reference: Reference = a.reference.into();
    if !matches!(reference, Reference::DegreeOnly | Reference::DegreeAndCrosslink) {
        return Err(Error::InvalidInput("sample supports --reference degree or degree-crosslink".into()));
    }
    let opts = TestOptions { reference, draws: a.draws, tau: a.chain.tau_choice(), q: a.chain.q, seed };
    let s = reference_sample(&net.adjacency, &net.groups, &opts)?;
    manifest.config["resolved_tau"] = s.tau.into();
    if let Some(stats) = &s.stats {
        manifest.config["acceptance_rate"] = config_value(&Fixed17(stats.acceptance_rate()));
    }
    let out_dir = if a.out.extension().is_some_and(|e| e == "csv") {
        ensure_parent(&a.out)?;
        write_multi_draw_csv(&a.out, &s.networks, base, "draw")?;
        manifest.add_output(&a.out);
        parent_dir(&a.out)
    } else {
        std::fs::create_dir_all(&a.out).map_err(|e| Error::Io { path: a.out.display().to_string(), source: e })?;
        let width = s.networks.len().saturating_sub(1).to_string().len();
        for (b, d) in s.networks.iter().enumerate() {
            let p = a.out.join(format!("draw_{b:0width$}.csv"));
            write_edges(&p, d, base)?;
            manifest.add_output(&p);
        }
        a.out.clone()
    };
    manifest.finish(&out_dir)
}

fn fit(a: FitArgs, base: IndexBase) -> Result<()> {
    let mut manifest = RunManifest::start("fit", serde_json::json!({}));
    let net = load(&a.network, base, &mut manifest)?;
    let fit = mle_null(&net.adjacency, &net.groups)?;
    let norm = fit.normalization();
    let mut record = ParamsRecord::new(&fit.params, &norm);
    record.convergence = Some(fit.report());
    ensure_parent(&a.out)?;
    write_json(&a.out, &record)?;
    manifest.add_output(&a.out);
    manifest.finish(&parent_dir(&a.out))
}

fn simulate(a: SimulateArgs, base: IndexBase) -> Result<()> {
    let mut manifest = RunManifest::start(
        "simulate",
        serde_json::json!({ "gamma": Fixed17(a.gamma), "spec": a.spec }),
    );
    let seed = resolve_seed(a.seed, &mut manifest);
    manifest.add_input(&a.params)?;
    let text = std::fs::read_to_string(&a.params)
        .map_err(|e| Error::Io { path: a.params.display().to_string(), source: e })?;
    let delta = params_from_json(&text)?;
    let g = match &a.nodes {
        Some(p) => {
            manifest.add_input(p)?;
            stratnet::io::read_nodes(p, base)?.0
        }
        None if delta.n_groups() == 1 => GroupAssignment::single(delta.n_nodes()),
        None => return Err(Error::InvalidInput("parameters have several groups; pass --nodes".into())),
    };
    let d = simulate_alternative(a.gamma, &delta, &a.spec.spec(), &g, &mut substream(seed, &[SIMULATE_STREAM]))?;
    ensure_parent(&a.out)?;
    write_edges(&a.out, &d, base)?;
    manifest.add_output(&a.out);
    manifest.finish(&parent_dir(&a.out))
}

#[derive(Serialize)]
struct CriticalRecord {
    alpha: Fixed17,
    c_alpha: Fixed17,
    g_alpha: Fixed17,
    reference_set_size: usize,
    reject_probability: Fixed17,
}

#[derive(Serialize)]
struct TestOutput<'a> {
    #[serde(flatten)]
    result: TestResultRecord<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    randomized_test: Option<CriticalRecord>,
}

fn test(a: TestArgs, base: IndexBase) -> Result<()> {
    let mut manifest = RunManifest::start(
        "test",
        serde_json::json!({
            "statistic": a.statistic, "spec": a.spec, "reference": a.reference, "draws": a.draws,
            "tau": a.chain.tau, "tau_auto": a.chain.tau_auto, "pilot_steps": a.chain.pilot_steps,
            "q": Fixed17(a.chain.q), "alpha": a.alpha.map(Fixed17),
        }),
    );
    let seed = resolve_seed(a.seed, &mut manifest);
    let net = load(&a.network, base, &mut manifest)?;
    let stat = match a.statistic {
        StatisticArg::Ti => TestStatisticSpec::transitivity_index(),
        StatisticArg::Reciprocity => TestStatisticSpec::reciprocity_index(),
        StatisticArg::LocallyBest => {
            let spec = a
                .spec
                .ok_or_else(|| Error::InvalidInput("--statistic locally-best needs --spec".into()))?
                .spec();
            let source = match &a.params {
                Some(p) => {
                    manifest.add_input(p)?;
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Error::Io { path: p.display().to_string(), source: e })?;
                    DeltaSource::Provided(params_from_json(&text)?)
                }
                None => DeltaSource::Fitted,
            };
            TestStatisticSpec::locally_best(spec, source)
        }
    };
    let reference: Reference = a.reference.into();
    if a.alpha.is_some() && reference != Reference::Enumerated {
        return Err(Error::InvalidInput("--alpha applies to --reference enumerated only".into()));
    }
    let opts = TestOptions { reference, draws: a.draws, tau: a.chain.tau_choice(), q: a.chain.q, seed };
    let result = conditional_p_value(&net.adjacency, &net.groups, &stat, &opts)?;
    if result.missing_draws > 0 {
        manifest.warn(format!("statistic undefined on {} draws; excluded", result.missing_draws));
    }
    if result.observed.is_nan() {
        manifest.warn("statistic undefined on the observed network");
    }
    let randomized_test = match a.alpha {
        Some(alpha) => {
            let cv = critical_values_from_values(&result.null_draws, alpha)?;
            Some(CriticalRecord {
                alpha: Fixed17(alpha),
                c_alpha: Fixed17(cv.c_alpha),
                g_alpha: Fixed17(cv.g_alpha),
                reference_set_size: result.null_draws.len(),
                reject_probability: Fixed17(cv.critical_function(result.observed)),
            })
        }
        None => None,
    };
    ensure_parent(&a.out)?;
    write_json(&a.out, &TestOutput { result: result.record(), randomized_test })?;
    manifest.add_output(&a.out);
    let null_path = a.null_draws.clone().unwrap_or_else(|| parent_dir(&a.out).join("null_draws.csv"));
    ensure_parent(&null_path)?;
    let mut body = String::from("statistic\n");
    for v in &result.null_draws {
        body.push_str(&fmt17(*v));
        body.push('\n');
    }
    std::fs::write(&null_path, body).map_err(|e| Error::Io { path: null_path.display().to_string(), source: e })?;
    manifest.add_output(&null_path);
    println!("{} = {}  p-value = {}", result.statistic, fmt17(result.observed), fmt17(result.p_value));
    manifest.finish(&parent_dir(&a.out))
}

fn mc_experiment(a: McArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.display().to_string(), source: e })?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| Error::InvalidInput(format!("malformed experiment config: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    if a.full {
        let base = ExperimentConfig::full_scale(cfg.n_nodes);
        cfg.replications = base.replications;
        cfg.draws_per_test = base.draws_per_test;
    }
    let mut manifest = RunManifest::start("mc-experiment", serde_json::Value::Null);
    if let Some(p) = &a.config {
        manifest.add_input(p)?;
    }
    if a.full {
        manifest.warn(format!(
            "full-scale experiment: {} replications x {} gammas x {} draws; expect a long run",
            cfg.replications,
            cfg.gammas.len(),
            cfg.draws_per_test
        ));
    }
    if a.seed.is_some() || a.config.is_none() {
        cfg.seed = resolve_seed(a.seed, &mut manifest);
    } else {
        manifest.seed = Some(cfg.seed);
    }
    manifest.config = config_value(&cfg);
    let table = run_experiment(&cfg)?;
    for r in &table.rows {
        if r.failures > 0 {
            manifest.warn(format!(
                "gamma {}: {} replications excluded for {}",
                r.gamma,
                r.failures,
                r.statistic.name()
            ));
        }
    }
    ensure_parent(&a.out)?;
    table.write_csv(&a.out)?;
    manifest.add_output(&a.out);
    manifest.finish(&parent_dir(&a.out))
}

fn enumerate(a: EnumerateArgs, base: IndexBase) -> Result<()> {
    let mut manifest = RunManifest::start("enumerate", serde_json::json!({}));
    let net = load(&a.network, base, &mut manifest)?;
    let set = enumerate_reference_set(
        &degree_sequence(&net.adjacency),
        &cross_link_matrix(&net.adjacency, &net.groups),
        &net.groups,
    )?;
    ensure_parent(&a.out)?;
    write_multi_draw_csv(&a.out, &set, base, "network")?;
    manifest.add_output(&a.out);
    println!("{} networks", set.len());
    manifest.finish(&parent_dir(&a.out))
}

fn calibrate(a: CalibrateArgs) -> Result<()> {
    let rows = table1_calibration();
    for (label, p) in &rows {
        let shown = if *p < 0.05 { format!("{p:.3}") } else { format!("{p:.2}") };
        println!("{label:<28} {shown}");
    }
    if let Some(out) = &a.out {
        let mut manifest = RunManifest::start("calibrate", serde_json::json!({}));
        ensure_parent(out)?;
        let mut body = String::from("link,probability\n");
        for (label, p) in &rows {
            body.push_str(&format!("\"{label}\",{}\n", fmt17(*p)));
        }
        std::fs::write(out, body).map_err(|e| Error::Io { path: out.display().to_string(), source: e })?;
        manifest.add_output(out);
        manifest.finish(&parent_dir(out))?;
    }
    Ok(())
}
