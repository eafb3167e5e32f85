//! Command-line front end for the multi-coverage toolkit.
//!
//! Subcommands cover the full pipeline: `solve` runs the exact LP relaxation
//! plus pipage rounding, `greedy` and `exact` are the baselines, `compare`
//! races all three over a batch and emits CSV, `gen` produces instances,
//! channels, and hardness constructions, `gadget` and `channel` expose the
//! reduction tooling, and `constants` prints the guarantee-factor tables.
//!
//! Exit codes: 0 success, 1 invalid input, 2 resource guard tripped,
//! 3 internal invariant breach.  All randomness sits behind explicit
//! `--seed` flags; nothing reads the wall clock.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use multicover::baselines::{brute_force, gen_duplicated, gen_random, greedy};
use multicover::channels::{
    best_code, code_success_probability, gen_random_channel, simulate_decoding, ChannelSpec,
    SearchMethod,
};
use multicover::combinatorics::{psi, rho};
use multicover::gadget::{
    build_hardness_instance, generate_partition_system, verify_partition_system, HyperUgInstance,
    PartitioningSystem,
};
use multicover::lp::{build_lp, build_weighted_lp, dump_lp};
use multicover::model::canonical_json;
use multicover::pipage::{solve, solve_weighted, PipageStep, SolveOutcome};
use multicover::rational::{parse_rat, rat_to_f64, rat_to_string};
use multicover::rng::SplitMix64;
use multicover::{
    CoverageInstance, Error, IntegralSolution, Rat, Result, WeightedCoverageInstance,
};

/// CSV schema version stamped into every table this binary emits.
const SCHEMA_VERSION: u32 = 1;

const COMPARE_HEADER: &str =
    "schema,id,n,m,k,ell,opt,greedy_value,greedy_ratio,solve_value,solve_ratio,lp_value,rho";

#[derive(Parser)]
#[command(
    name = "multicover",
    version,
    about = "Maximum multi-coverage: solver, baselines, generators, and reduction tooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the LP relaxation + pipage rounding pipeline.
    Solve(SolveArgs),
    /// Run the greedy baseline on an unweighted instance.
    Greedy(InstanceOut),
    /// Enumerate every feasible selection for the exact optimum.
    Exact(InstanceOut),
    /// Race exact, greedy, and the pipeline over a batch; emit a CSV table.
    Compare(CompareArgs),
    /// Generate inputs: instances, channels, a demo hardness construction.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Partitioning-gadget tooling: sample, check, compose.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Channel-code tooling: evaluate and search codes.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Print the guarantee-factor (or psi) table as CSV.
    Constants(ConstantsArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file, unweighted or weighted JSON.
    #[arg(long)]
    instance: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the relaxation in LP text format to this path.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
    /// Write the rounding step trace as JSON to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceOut {
    /// Unweighted instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Explicit instance files; omit to generate a batch instead.
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// Batch seed (generated mode).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of generated instances.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Ground-set size of generated instances.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Number of sets in generated instances.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Budget of generated instances.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Coverage cap of generated instances.
    #[arg(long, default_value_t = 2)]
    ell: u32,
    /// Set density of generated instances, in (0, 1].
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Worker threads; instances run in parallel, output order stays sorted.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random unweighted instance.
    Random(GenRandomArgs),
    /// Replicate every set of a base instance and raise the cap to match.
    Duplicated(GenDuplicatedArgs),
    /// Random discrete memoryless channel with exact rational rows.
    Channel(GenChannelArgs),
    /// Demo hardness instance: a circulant constraint hypergraph composed
    /// with a freshly sampled partitioning gadget.
    Gadget(GenGadgetArgs),
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long)]
    seed: u64,
    /// Ground-set size.
    #[arg(long)]
    n: usize,
    /// Number of sets.
    #[arg(long)]
    m: usize,
    /// Budget.
    #[arg(long)]
    k: usize,
    /// Coverage cap.
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Probability that a set contains an element, in (0, 1].
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Write the instance here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenDuplicatedArgs {
    /// Base unweighted instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Replication factor; also the new coverage cap.
    #[arg(long)]
    ell: u32,
    /// Write the instance here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenChannelArgs {
    #[arg(long)]
    seed: u64,
    /// Input alphabet size.
    #[arg(long)]
    inputs: usize,
    /// Output alphabet size.
    #[arg(long)]
    outputs: usize,
    /// Write the channel here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenGadgetArgs {
    /// Vertices of the circulant constraint hypergraph (at least h).
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    /// Gadget ground-set size (divisible by s).
    #[arg(long)]
    n_hat: usize,
    /// Blocks drawn per constraint; also the edge arity.
    #[arg(long)]
    h: u32,
    /// Partitions per family; also the label alphabet.
    #[arg(long)]
    s: u32,
    /// Coverage cap of the produced instance.
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Cross-family collision slack, e.g. "1/5".
    #[arg(long)]
    eta: String,
    #[arg(long)]
    seed: u64,
    /// Resampling budget for the gadget search.
    #[arg(long, default_value_t = 200)]
    max_tries: u64,
    /// Write the instance here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Sample a partitioning system meeting an eta collision slack.
    Gen(GadgetGenArgs),
    /// Check every cross-family block pair of a system file.
    Verify(GadgetVerifyArgs),
    /// Compose a constraint hypergraph with a system into a coverage instance.
    BuildInstance(BuildInstanceArgs),
}

#[derive(Args)]
struct GadgetGenArgs {
    /// Ground-set size (divisible by s).
    #[arg(long)]
    n_hat: usize,
    /// Blocks drawn per constraint.
    #[arg(long)]
    h: u32,
    /// Partitions per family.
    #[arg(long)]
    s: u32,
    /// Coverage parameter the system is built for.
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Cross-family collision slack, e.g. "1/5".
    #[arg(long)]
    eta: String,
    #[arg(long)]
    seed: u64,
    /// Resampling budget.
    #[arg(long, default_value_t = 200)]
    max_tries: u64,
    /// Write the system here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GadgetVerifyArgs {
    /// Partitioning system file.
    #[arg(long)]
    system: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildInstanceArgs {
    /// Constraint hypergraph file.
    #[arg(long)]
    ug: PathBuf,
    /// Partitioning system file.
    #[arg(long)]
    system: PathBuf,
    /// Also write the set-index-to-label map here.
    #[arg(long)]
    label_map: Option<PathBuf>,
    /// Write the instance here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ChannelCommand {
    /// Success probability of a specific code, optionally Monte Carlo checked.
    Eval(ChannelEvalArgs),
    /// Search for the best size-k code, exactly or with a certified factor.
    BestCode(BestCodeArgs),
}

#[derive(Args)]
struct ChannelEvalArgs {
    /// Channel file.
    #[arg(long)]
    channel: PathBuf,
    /// Comma-separated codeword indices, e.g. "0,2,3".
    #[arg(long)]
    code: String,
    /// List size of the decoder.
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Also run this many Monte Carlo transmissions (needs --seed).
    #[arg(long, requires = "seed")]
    simulate: Option<u64>,
    /// Seed for the simulation.
    #[arg(long, requires = "simulate")]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BestCodeArgs {
    /// Channel file.
    #[arg(long)]
    channel: PathBuf,
    /// Code size.
    #[arg(long)]
    k: usize,
    /// List size of the decoder.
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Search strategy.
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Enumerate every size-k code (guarded against blowup).
    Exact,
    /// LP relaxation plus rounding, with a certified approximation factor.
    Approx,
}

#[derive(Args)]
struct ConstantsArgs {
    /// Coverage cap or inclusive range, e.g. "2" or "1..5".
    #[arg(long, default_value = "1..5")]
    ell: String,
    /// Emit the psi table for this h instead of the rho table.
    #[arg(long)]
    h: Option<u32>,
    /// Largest t in the psi table (default 2h).
    #[arg(long)]
    t_max: Option<u32>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(3))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Greedy(a) => cmd_greedy(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Gen(GenCommand::Random(a)) => cmd_gen_random(a),
        Command::Gen(GenCommand::Duplicated(a)) => cmd_gen_duplicated(a),
        Command::Gen(GenCommand::Channel(a)) => cmd_gen_channel(a),
        Command::Gen(GenCommand::Gadget(a)) => cmd_gen_gadget(a),
        Command::Gadget(GadgetCommand::Gen(a)) => cmd_gadget_gen(a),
        Command::Gadget(GadgetCommand::Verify(a)) => cmd_gadget_verify(a),
        Command::Gadget(GadgetCommand::BuildInstance(a)) => cmd_gadget_build(a),
        Command::Channel(ChannelCommand::Eval(a)) => cmd_channel_eval(a),
        Command::Channel(ChannelCommand::BestCode(a)) => cmd_channel_best(a),
        Command::Constants(a) => cmd_constants(a),
    }
}

// ---------- file plumbing ----------

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

/// Prints to stdout or writes to `out`, always ending with one newline.
fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) => write_text(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{} is not a valid {what}: {e}", path.display())))
}

enum AnyInstance {
    Plain(CoverageInstance),
    Weighted(WeightedCoverageInstance),
}

fn load_instance(path: &Path) -> Result<AnyInstance> {
    let text = read_text(path)?;
    match serde_json::from_str::<CoverageInstance>(&text) {
        Ok(inst) => Ok(AnyInstance::Plain(inst)),
        Err(plain) => match serde_json::from_str::<WeightedCoverageInstance>(&text) {
            Ok(inst) => Ok(AnyInstance::Weighted(inst)),
            Err(weighted) => Err(Error::Parse(format!(
                "{} parses neither as an unweighted instance ({plain}) nor as a weighted one ({weighted})",
                path.display()
            ))),
        },
    }
}

fn load_plain(path: &Path) -> Result<CoverageInstance> {
    match load_instance(path)? {
        AnyInstance::Plain(inst) => Ok(inst),
        AnyInstance::Weighted(_) => Err(Error::Unsupported(format!(
            "{} is a weighted instance; this subcommand takes unweighted instances only",
            path.display()
        ))),
    }
}

// ---------- report shapes ----------

fn solution_json(sol: &IntegralSolution) -> serde_json::Value {
    json!({ "selected": sol.selected, "value": rat_to_string(&sol.value) })
}

fn report_json(out: &SolveOutcome) -> serde_json::Value {
    json!({
        "lp_value": rat_to_string(&out.lp_value),
        "f_fractional": rat_to_string(&out.fractional_value),
        "f_integral": rat_to_string(&out.solution.value),
        "solution": solution_json(&out.solution),
        "ratio_vs_lp": out.ratio_vs_lp(),
    })
}

fn trace_json(steps: &[PipageStep]) -> serde_json::Value {
    serde_json::Value::Array(
        steps
            .iter()
            .map(|s| {
                json!({
                    "i": s.i,
                    "j": s.j,
                    "t": rat_to_string(&s.t),
                    "f_before": rat_to_string(&s.f_before),
                    "f_after": rat_to_string(&s.f_after),
                })
            })
            .collect(),
    )
}

// ---------- solver subcommands ----------

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let loaded = load_instance(&a.instance)?;
    if let Some(path) = &a.dump_lp {
        let model = match &loaded {
            AnyInstance::Plain(inst) => build_lp(inst),
            AnyInstance::Weighted(inst) => build_weighted_lp(inst),
        };
        write_text(path, &dump_lp(&model))?;
    }
    let outcome = match &loaded {
        AnyInstance::Plain(inst) => solve(inst)?,
        AnyInstance::Weighted(inst) => solve_weighted(inst)?,
    };
    if let Some(path) = &a.trace {
        write_text(path, &canonical_json(&trace_json(&outcome.steps)))?;
    }
    emit(a.out.as_ref(), &canonical_json(&report_json(&outcome)))
}

fn cmd_greedy(a: InstanceOut) -> Result<()> {
    let inst = load_plain(&a.instance)?;
    let run = greedy(&inst)?;
    let picks: Vec<serde_json::Value> = run
        .picks
        .iter()
        .map(|(set, gain)| json!({ "set": set, "gain": gain }))
        .collect();
    let body = json!({ "solution": solution_json(&run.solution), "picks": picks });
    emit(a.out.as_ref(), &canonical_json(&body))
}

fn cmd_exact(a: InstanceOut) -> Result<()> {
    let inst = load_plain(&a.instance)?;
    let sol = brute_force(&inst)?;
    emit(
        a.out.as_ref(),
        &canonical_json(&json!({ "solution": solution_json(&sol) })),
    )
}

fn compare_row(id: &str, inst: &CoverageInstance) -> Result<String> {
    let exact = brute_force(inst)?;
    let greedy_run = greedy(inst)?;
    let solved = solve(inst)?;
    let factor = rho(inst.ell())?;
    let opt = rat_to_f64(&exact.value);
    let ratio = |v: &Rat| if opt == 0.0 { 1.0 } else { rat_to_f64(v) / opt };
    Ok(format!(
        "{SCHEMA_VERSION},{id},{},{},{},{},{},{},{:.12},{},{:.12},{},{:.12}",
        inst.n(),
        inst.m(),
        inst.k(),
        inst.ell(),
        rat_to_string(&exact.value),
        rat_to_string(&greedy_run.solution.value),
        ratio(&greedy_run.solution.value),
        rat_to_string(&solved.solution.value),
        ratio(&solved.solution.value),
        rat_to_string(&solved.lp_value),
        factor,
    ))
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let mut items: Vec<(String, CoverageInstance)> = Vec::new();
    if a.instances.is_empty() {
        if a.count == 0 {
            return Err(Error::invalid(
                "--count must be positive when generating a batch",
            ));
        }
        let mut g = SplitMix64::new(a.seed);
        for i in 0..a.count {
            let inst = gen_random(g.next_u64(), a.n, a.m, a.k, a.ell, a.density)?;
            items.push((format!("seed{}-{i:03}", a.seed), inst));
        }
    } else {
        for path in &a.instances {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("instance")
                .to_string();
            items.push((id, load_plain(path)?));
        }
    }
    if a.jobs == 0 {
        return Err(Error::invalid("--jobs must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| Error::SolverFailure(format!("cannot build thread pool: {e}")))?;
    let mut rows: Vec<(String, String)> = pool.install(|| {
        items
            .par_iter()
            .map(|(id, inst)| compare_row(id, inst).map(|row| (id.clone(), row)))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort();
    let mut csv = String::from(COMPARE_HEADER);
    for (_, row) in &rows {
        csv.push('\n');
        csv.push_str(row);
    }
    emit(a.out.as_ref(), &csv)
}

// ---------- generators ----------

fn cmd_gen_random(a: GenRandomArgs) -> Result<()> {
    let inst = gen_random(a.seed, a.n, a.m, a.k, a.ell, a.density)?;
    emit(a.out.as_ref(), &canonical_json(&inst))
}

fn cmd_gen_duplicated(a: GenDuplicatedArgs) -> Result<()> {
    let base = load_plain(&a.instance)?;
    let inst = gen_duplicated(&base, a.ell)?;
    emit(a.out.as_ref(), &canonical_json(&inst))
}

fn cmd_gen_channel(a: GenChannelArgs) -> Result<()> {
    let ch = gen_random_channel(a.seed, a.inputs, a.outputs)?;
    emit(a.out.as_ref(), &canonical_json(&ch))
}

/// Edge i covers vertices i..i+h-1 (mod `vertices`), identity projections.
fn circulant_ug(vertices: usize, h: u32, s: u32) -> Result<HyperUgInstance> {
    let arity = h as usize;
    if vertices < arity {
        return Err(Error::invalid(format!(
            "need at least h = {arity} vertices, got {vertices}"
        )));
    }
    let edges: Vec<Vec<usize>> = (0..vertices)
        .map(|i| (0..arity).map(|d| (i + d) % vertices).collect())
        .collect();
    let identity: Vec<u32> = (0..s).collect();
    let projections = vec![vec![identity; arity]; vertices];
    HyperUgInstance::new(vertices, edges, s, projections, false)
}

fn cmd_gen_gadget(a: GenGadgetArgs) -> Result<()> {
    let eta = parse_rat(&a.eta)?;
    let sys = generate_partition_system(a.n_hat, a.h, a.s, a.ell, &eta, a.seed, a.max_tries)?;
    let ug = circulant_ug(a.vertices, a.h, a.s)?;
    let built = build_hardness_instance(&ug, &sys)?;
    for w in &built.warnings {
        eprintln!("warning: {w}");
    }
    emit(a.out.as_ref(), &canonical_json(&built.instance))
}

// ---------- gadget tooling ----------

fn cmd_gadget_gen(a: GadgetGenArgs) -> Result<()> {
    let eta = parse_rat(&a.eta)?;
    let sys = generate_partition_system(a.n_hat, a.h, a.s, a.ell, &eta, a.seed, a.max_tries)?;
    emit(a.out.as_ref(), &canonical_json(&sys))
}

fn cmd_gadget_verify(a: GadgetVerifyArgs) -> Result<()> {
    let sys: PartitioningSystem = load_json(&a.system, "partitioning system")?;
    let rep = verify_partition_system(&sys)?;
    let witness = rep.witness.as_ref().map(|w| {
        w.iter()
            .map(|(fam, block)| json!([fam, block]))
            .collect::<Vec<_>>()
    });
    let body = json!({
        "ok": rep.ok,
        "required_eta": rat_to_string(&rep.required_eta),
        "worst_violation": rep.worst_violation,
        "witness": witness,
    });
    emit(a.out.as_ref(), &canonical_json(&body))
}

fn cmd_gadget_build(a: BuildInstanceArgs) -> Result<()> {
    let ug: HyperUgInstance = load_json(&a.ug, "constraint hypergraph")?;
    let sys: PartitioningSystem = load_json(&a.system, "partitioning system")?;
    let built = build_hardness_instance(&ug, &sys)?;
    for w in &built.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.label_map {
        write_text(path, &canonical_json(&built.label_map))?;
    }
    emit(a.out.as_ref(), &canonical_json(&built.instance))
}

// ---------- channel tooling ----------

fn parse_code(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad codeword index {tok:?}")))
        })
        .collect()
}

fn cmd_channel_eval(a: ChannelEvalArgs) -> Result<()> {
    let ch: ChannelSpec = load_json(&a.channel, "channel")?;
    let code = parse_code(&a.code)?;
    let prob = code_success_probability(&ch, &code, a.ell)?;
    let mut body = json!({
        "code": code,
        "ell": a.ell,
        "probability": rat_to_string(&prob),
        "rate": rat_to_f64(&prob),
    });
    if let Some(samples) = a.simulate {
        let seed = a.seed.expect("clap ties --seed to --simulate");
        let sim = simulate_decoding(&ch, &code, a.ell, samples, seed)?;
        body["simulation"] = json!({
            "hits": sim.hits,
            "samples": sim.samples,
            "rate": sim.rate(),
            "standard_error": sim.standard_error(),
        });
    }
    emit(a.out.as_ref(), &canonical_json(&body))
}

fn cmd_channel_best(a: BestCodeArgs) -> Result<()> {
    let ch: ChannelSpec = load_json(&a.channel, "channel")?;
    let method = match a.method {
        MethodArg::Exact => SearchMethod::Exact,
        MethodArg::Approx => SearchMethod::Approx,
    };
    let best = best_code(&ch, a.k, a.ell, method)?;
    let body = json!({
        "code": best.code,
        "probability": rat_to_string(&best.probability),
        "rate": rat_to_f64(&best.probability),
        "certified_ratio": best.certified_ratio,
    });
    emit(a.out.as_ref(), &canonical_json(&body))
}

// ---------- constants ----------

fn parse_ell_range(text: &str) -> Result<(u32, u32)> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad range start {lo:?}")))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad range end {hi:?}")))?;
        if lo == 0 || hi < lo {
            return Err(Error::invalid(format!(
                "bad cap range {text:?}: need 1 <= start <= end"
            )));
        }
        Ok((lo, hi))
    } else {
        let v: u32 = text
            .parse()
            .map_err(|_| Error::Parse(format!("bad cap {text:?}")))?;
        if v == 0 {
            return Err(Error::invalid("cap must be at least 1"));
        }
        Ok((v, v))
    }
}

fn cmd_constants(a: ConstantsArgs) -> Result<()> {
    let (lo, hi) = parse_ell_range(&a.ell)?;
    let mut csv = String::new();
    match a.h {
        None => {
            csv.push_str("schema,ell,rho");
            for ell in lo..=hi {
                csv.push_str(&format!("\n{SCHEMA_VERSION},{ell},{:.6}", rho(ell)?));
            }
        }
        Some(h) => {
            let t_max = a.t_max.unwrap_or(2 * h);
            csv.push_str("schema,ell,h,t,psi");
            for ell in lo..=hi {
                if ell > h {
                    continue;
                }
                for t in 1..=t_max {
                    csv.push_str(&format!(
                        "\n{SCHEMA_VERSION},{ell},{h},{t},{:.12}",
                        psi(ell, t, h)?
                    ));
                }
            }
        }
    }
    emit(a.out.as_ref(), &csv)
}
