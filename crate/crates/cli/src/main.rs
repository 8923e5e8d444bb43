//! `rig-lab`: sample random intersection graphs, decide their properties, and
//! compare Monte Carlo estimates with the limiting probabilities of the
//! threshold laws.

mod format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riglab::config::{seed_from_env, ConfigFile};
use riglab::graph::Graph;
use riglab::models::{
    build_rig, sample_binomial_assignment, sample_model, sample_uniform_assignment, BinomialRigParams, ErParams,
    ModelSpec, Region, RggParams, UniformRigParams,
};
use riglab::montecarlo::{
    run_experiment, summary_json, sweep, write_outputs, write_sweep_csv, ExperimentSummary, SweepAxis,
};
use riglab::properties::{check_k_robust, decide, DecisionBudget, PropertyKind, Robustness};
use riglab::rng::RngStream;
use riglab::scaling::{
    coupling_report, limiting_probability, solve_param, FixedParams, ModelFamily, Prediction, SolveRequest,
    ThresholdSpec,
};
use riglab::Error;

use format::g6;

#[derive(Parser)]
#[command(name = "rig-lab", version, about = "Random intersection graphs: sampling, exact property checks, threshold laws and Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Decide a property on an edge-list file.
    Check(CheckArgs),
    /// Limiting probability at a deviation, or for concrete parameters.
    Predict(PredictArgs),
    /// Solve the scaling law for the free parameter of a family.
    Solve(SolveArgs),
    /// Run a Monte Carlo experiment from a config file.
    Experiment(ExperimentArgs),
    /// Run one experiment per point of a deviation, n or k axis.
    Sweep(SweepArgs),
}

/// Sampled models.
#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    /// Uniform random s-intersection graph G_s(n, K, P).
    Urig,
    /// Binomial random s-intersection graph H_s(n, t, P).
    Brig,
    /// Erdős–Rényi graph G(n, q).
    Er,
    /// Random geometric graph in the unit torus or square.
    Rgg,
    /// G_s(n, K, P) intersected with G(n, q).
    UrigEr,
    /// G_1(n, K, P) intersected with a geometric graph.
    UrigRgg,
}

/// Families with a threshold law.
#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Urig,
    Brig,
    Er,
    UrigEr,
    UrigRgg,
}

/// Decidable properties.
#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    /// Vertex connectivity at least k.
    Kconn,
    /// Minimum degree at least k.
    Mindeg,
    /// Matching covering all nodes but at most one.
    #[value(alias = "pm")]
    Matching,
    /// Hamilton cycle.
    #[value(alias = "hc")]
    Hamilton,
    /// k-robustness.
    Robust,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Torus,
    Square,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Torus => Region::Torus,
            RegionArg::Square => Region::Square,
        }
    }
}

#[derive(Args)]
struct PropertySel {
    /// Property to decide.
    #[arg(long, value_enum)]
    property: PropertyArg,
    /// Parameter k of kconn, mindeg and robust.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

impl PropertySel {
    fn kind(&self) -> PropertyKind {
        let k = self.k;
        match self.property {
            PropertyArg::Kconn => PropertyKind::KConnected { k },
            PropertyArg::Mindeg => PropertyKind::MinDegreeAtLeast { k },
            PropertyArg::Matching => PropertyKind::NearPerfectMatching,
            PropertyArg::Hamilton => PropertyKind::HamiltonCycle,
            PropertyArg::Robust => PropertyKind::KRobust { k },
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Number of nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Items per node (uniform models).
    #[arg(long = "K")]
    big_k: Option<u64>,
    /// Item pool size.
    #[arg(long = "P")]
    big_p: Option<u64>,
    /// Overlap needed for an edge.
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Item probability (binomial model).
    #[arg(long)]
    t: Option<f64>,
    /// Edge probability (Erdős–Rényi).
    #[arg(long)]
    q: Option<f64>,
    /// Connection radius (geometric).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, value_enum, default_value = "torus")]
    region: RegionArg,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParams(format!("missing --{flag}")))
}

impl ParamArgs {
    fn urig(&self) -> Result<UniformRigParams, Error> {
        Ok(UniformRigParams {
            n: need(self.n, "n")?,
            k: need(self.big_k, "K")?,
            p: need(self.big_p, "P")?,
            s: self.s,
        })
    }

    fn spec(&self, model: ModelArg) -> Result<ModelSpec, Error> {
        let n = need(self.n, "n")?;
        let er = || Ok::<_, Error>(ModelSpec::Er(ErParams { n, q: need(self.q, "q")? }));
        let rgg = || {
            Ok::<_, Error>(ModelSpec::Rgg(RggParams {
                n,
                r: need(self.r, "r")?,
                region: self.region.into(),
            }))
        };
        let spec = match model {
            ModelArg::Urig => ModelSpec::UniformRig(self.urig()?),
            ModelArg::Brig => ModelSpec::BinomialRig(BinomialRigParams {
                n,
                t: need(self.t, "t")?,
                p: need(self.big_p, "P")?,
                s: self.s,
            }),
            ModelArg::Er => er()?,
            ModelArg::Rgg => rgg()?,
            ModelArg::UrigEr => ModelSpec::Intersection(vec![ModelSpec::UniformRig(self.urig()?), er()?]),
            ModelArg::UrigRgg => ModelSpec::Intersection(vec![ModelSpec::UniformRig(self.urig()?), rgg()?]),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn fixed(&self) -> FixedParams {
        FixedParams {
            k: self.big_k,
            p: self.big_p,
            t: self.t,
            q: self.q,
            r: self.r,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[command(flatten)]
    params: ParamArgs,
    /// Base seed (default: $RIG_LAB_SEED, else 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list output file.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the item assignment (urig and brig only).
    #[arg(long)]
    items: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest n accepted by the exhaustive checkers.
    #[arg(long, default_value_t = DecisionBudget::default().max_nodes)]
    max_nodes: usize,
    /// Cap on search steps.
    #[arg(long)]
    step_limit: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> DecisionBudget {
        DecisionBudget {
            max_nodes: self.max_nodes,
            step_limit: self.step_limit,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Edge-list file.
    graph: PathBuf,
    #[command(flatten)]
    property: PropertySel,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct TargetArgs {
    /// Deviation from the critical scaling (alias of --beta, --gamma, --delta).
    #[arg(long, allow_hyphen_values = true, visible_aliases = ["beta", "gamma", "delta", "deviation"])]
    alpha: Option<f64>,
    /// Geometric constant a (torus) or b (square), for urig-rgg.
    #[arg(long, allow_hyphen_values = true)]
    constant: Option<f64>,
}

impl TargetArgs {
    fn value(&self) -> Option<f64> {
        self.alpha.or(self.constant)
    }
}

#[derive(Args)]
struct FamilySel {
    #[arg(long, value_enum)]
    family: FamilyArg,
}

fn family(f: FamilyArg, s: u32, region: RegionArg) -> ModelFamily {
    match f {
        FamilyArg::Urig => ModelFamily::UniformRig { s },
        FamilyArg::Brig => ModelFamily::BinomialRig { s },
        FamilyArg::Er => ModelFamily::Er,
        FamilyArg::UrigEr => ModelFamily::UniformRigEr { s },
        FamilyArg::UrigRgg => ModelFamily::UniformRigRgg { region: region.into() },
    }
}

fn model_of(f: FamilyArg) -> ModelArg {
    match f {
        FamilyArg::Urig => ModelArg::Urig,
        FamilyArg::Brig => ModelArg::Brig,
        FamilyArg::Er => ModelArg::Er,
        FamilyArg::UrigEr => ModelArg::UrigEr,
        FamilyArg::UrigRgg => ModelArg::UrigRgg,
    }
}

#[derive(Args)]
struct PredictArgs {
    #[command(flatten)]
    family: FamilySel,
    #[command(flatten)]
    property: PropertySel,
    #[command(flatten)]
    target: TargetArgs,
    /// Concrete parameters, used when no deviation is given.
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    family: FamilySel,
    #[command(flatten)]
    property: PropertySel,
    #[command(flatten)]
    target: TargetArgs,
    /// Fixed parameters; the free one (K, t, q or r) is left out.
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Config file (JSON, schema "rig-lab/1").
    #[arg(long, short)]
    config: PathBuf,
    /// Override the number of trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-trial wall time in the CSV.
    #[arg(long)]
    record_timings: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Override the CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override the JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Print the summary JSON instead of the human report.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Deviations to sweep, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["ns", "ks"])]
    deviations: Option<Vec<f64>>,
    /// Node counts to sweep.
    #[arg(long, value_delimiter = ',', conflicts_with = "ks")]
    ns: Option<Vec<usize>>,
    /// Values of k to sweep.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    /// JSON table output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV table output.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded(_) => 3,
        Error::Io(_) | Error::Csv(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Check(a) => check(a),
        Command::Predict(a) => predict(a),
        Command::Solve(a) => solve(a),
        Command::Experiment(a) => experiment(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rig-lab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn base_seed(flag: Option<u64>) -> Result<u64, Error> {
    Ok(match flag {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(0),
    })
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<(), Error> {
    let spec = a.params.spec(a.model)?;
    let mut rng = RngStream::new(base_seed(a.seed)?, 0).rng();
    let g = match (&spec, &a.items) {
        (ModelSpec::UniformRig(p), Some(path)) => {
            let assignment = sample_uniform_assignment(p, &mut rng)?;
            std::fs::write(path, assignment.to_text())?;
            build_rig(&assignment, p.s)
        }
        (ModelSpec::BinomialRig(p), Some(path)) => {
            let assignment = sample_binomial_assignment(p, &mut rng)?;
            std::fs::write(path, assignment.to_text())?;
            build_rig(&assignment, p.s)
        }
        (_, Some(_)) => return Err(Error::InvalidParams("--items needs --model urig or brig".into())),
        (_, None) => sample_model(&spec, &mut rng)?,
    };
    std::fs::write(&a.out, g.to_edge_list())?;
    println!("nodes {} edges {}", g.node_count(), g.edge_count());
    Ok(())
}

fn check(a: CheckArgs) -> Result<(), Error> {
    let g = Graph::parse_edge_list(&std::fs::read_to_string(&a.graph)?)?;
    let property = a.property.kind();
    let budget = a.budget.budget();
    let (verdict, witness) = match property {
        PropertyKind::KRobust { k } => match check_k_robust(&g, k, &budget)? {
            Robustness::Robust => (true, None),
            Robustness::NotRobust { witness } => (false, Some(witness.iter().collect::<Vec<_>>())),
        },
        _ => (decide(&g, &property, &budget)?, None),
    };
    if a.json {
        print_json(&serde_json::json!({
            "property": property,
            "holds": verdict,
            "witness": witness,
        }))?;
    } else {
        println!("{verdict}");
        if let Some(w) = witness {
            let w: Vec<String> = w.iter().map(usize::to_string).collect();
            println!("witness {}", w.join(" "));
        }
    }
    Ok(())
}

fn predict(a: PredictArgs) -> Result<(), Error> {
    let property = a.property.kind();
    let fam = family(a.family.family, a.params.s, a.params.region);
    let threshold = ThresholdSpec::new(fam, property)?;
    if let Some(x) = a.target.value() {
        let p = limiting_probability(&threshold, x);
        if a.json {
            return print_json(&serde_json::json!({
                "family": fam,
                "property": property,
                "argument": x,
                "limit": threshold.limit,
                "claim": threshold.claim,
                "predicted": p,
            }));
        }
        println!("{}", prediction_text(p));
        return Ok(());
    }
    let spec = a.params.spec(model_of(a.family.family))?;
    let report = coupling_report(&spec, &property)?;
    if a.json {
        return print_json(&report);
    }
    println!("family      {}", report.family);
    println!("property    {}", report.property);
    println!("coupling    {}", g6(report.coupling));
    println!("deviation   {}", g6(report.deviation));
    if let Some(c) = report.rgg_constant {
        println!("constant    {}", g6(c));
    }
    println!("predicted   {}", prediction_text(report.prediction));
    print_side_conditions(&report.side_conditions);
    Ok(())
}

fn prediction_text(p: Prediction) -> String {
    match p {
        Prediction::Probability(p) => g6(p),
        Prediction::Unspecified => "unspecified".into(),
    }
}

fn print_side_conditions(conds: &[riglab::scaling::SideCondition]) {
    for c in conds {
        let mark = if c.holds { "ok  " } else { "FLAG" };
        println!("  {mark} {}: {} = {} (proxy {})", c.condition, c.ratio, g6(c.value), c.proxy);
    }
}

fn solve(a: SolveArgs) -> Result<(), Error> {
    let property = a.property.kind();
    let fam = family(a.family.family, a.params.s, a.params.region);
    let target = a
        .target
        .value()
        .ok_or_else(|| Error::InvalidParams("missing --alpha/--beta/--gamma/--delta or --constant".into()))?;
    let req = SolveRequest {
        family: fam,
        property,
        n: need(a.params.n, "n")?,
        target,
        fixed: a.params.fixed(),
    };
    let sol = solve_param(&req)?;
    if a.json {
        return print_json(&sol);
    }
    match sol.real {
        Some(v) => println!("{} = {}", sol.free, g6(v)),
        None => println!("{} clamped to the bottom of its range (target needs a non-positive coupling)", sol.free),
    }
    for c in &sol.candidates {
        let mut line = format!("  {} = {}: implied deviation {}", sol.free, g6(c.value), g6(c.implied_deviation));
        if let Some(k) = c.implied_constant {
            line.push_str(&format!(", constant {}", g6(k)));
        }
        println!("{line}");
    }
    Ok(())
}

fn load_config(run: &RunArgs) -> Result<(ConfigFile, riglab::montecarlo::ExperimentConfig), Error> {
    let file = ConfigFile::load(&run.config).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", run.config.display()))),
        other => other,
    })?;
    let mut cfg = file.to_experiment()?;
    if let Some(t) = run.trials {
        if t == 0 {
            return Err(Error::Config("--trials must be at least 1".into()));
        }
        cfg.trials = t;
    }
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    if run.workers.is_some() {
        cfg.workers = run.workers;
    }
    if run.record_timings {
        cfg.record_timings = true;
    }
    Ok((file, cfg))
}

fn resolve_path(config: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn experiment(a: ExperimentArgs) -> Result<(), Error> {
    let (file, cfg) = load_config(&a.run)?;
    let csv = a.csv.or_else(|| file.output.csv.as_deref().map(|p| resolve_path(&a.run.config, p)));
    let summary_path = a
        .summary
        .or_else(|| file.output.summary.as_deref().map(|p| resolve_path(&a.run.config, p)));
    let (summary, records) = run_experiment(&cfg)?;
    write_outputs(&summary, &records, csv.as_deref(), summary_path.as_deref())?;
    if a.json {
        print!("{}", summary_json(&summary)?);
    } else {
        print_summary(&summary);
    }
    Ok(())
}

fn print_summary(s: &ExperimentSummary) {
    println!("model       {}", serde_json::to_string(&s.config.model).unwrap_or_default());
    println!("property    {}", s.config.property);
    println!("successes   {} / {}", s.successes, s.trials);
    println!("empirical   {}", g6(s.empirical));
    println!("wilson95    [{}, {}]", g6(s.wilson95[0]), g6(s.wilson95[1]));
    if let Some(d) = s.implied_deviation {
        println!("deviation   {}", g6(d));
    }
    if let Some(c) = s.implied_constant {
        println!("constant    {}", g6(c));
    }
    println!("predicted   {}", prediction_text(s.predicted));
    println!(
        "companions  min-degree>=k {}, connected {}, audit violations {}",
        s.companions.min_degree_at_least_k, s.companions.connected, s.companions.audit_violations
    );
    print_side_conditions(&s.side_conditions);
}

fn run_sweep(a: SweepArgs) -> Result<(), Error> {
    let (file, cfg) = load_config(&a.run)?;
    let axis = match (a.deviations, a.ns, a.ks) {
        (Some(d), _, _) => SweepAxis::Deviation(d),
        (_, Some(n), _) => SweepAxis::N(n),
        (_, _, Some(k)) => SweepAxis::K(k),
        _ => file
            .sweep
            .clone()
            .ok_or_else(|| Error::Config("no sweep axis: pass --deviations, --ns or --ks, or set \"sweep\"".into()))?,
    };
    if axis.is_empty() {
        return Err(Error::Config("sweep axis is empty".into()));
    }
    let table = sweep(&cfg, &axis);
    if let Some(p) = &a.out {
        std::fs::write(p, serde_json::to_string_pretty(&table)? + "\n")?;
    }
    if let Some(p) = &a.csv {
        write_sweep_csv(&table, std::io::BufWriter::new(std::fs::File::create(p)?))?;
    }
    if a.json {
        return print_json(&table);
    }
    println!("{:>12}  {:>9}  {:>9}  {:>21}  {:>9}", table.axis, "empirical", "predicted", "wilson95", "implied");
    for p in &table.points {
        match (&p.summary, &p.error) {
            (Some(s), _) => println!(
                "{:>12}  {:>9}  {:>9}  {:>21}  {:>9}",
                g6(p.axis_value),
                g6(s.empirical),
                prediction_text(s.predicted),
                format!("[{}, {}]", g6(s.wilson95[0]), g6(s.wilson95[1])),
                s.implied_deviation.map(g6).unwrap_or_default()
            ),
            (None, Some(e)) => println!("{:>12}  error: {e}", g6(p.axis_value)),
            (None, None) => {}
        }
    }
    Ok(())
}
