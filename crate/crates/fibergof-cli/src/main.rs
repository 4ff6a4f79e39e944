//! Command-line interface: exact conditional goodness-of-fit tests for
//! log-linear network models.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fibergof::design::{BlockPartition, ModelSpec, Reciprocity, SbmVariant};
use fibergof::gof::{exact_test, model_name, simulate_tables, StatKind};
use fibergof::io::{
    block_partition_for, format_edge_list, parse_blocks, parse_edge_list, parse_table_csv,
    write_atomic,
};
use fibergof::ipf::{ipf_fit, mle_existence_heuristic};
use fibergof::moves::{curated_moves, integer_kernel, prune, MovesFile};
use fibergof::oracle::{connectivity_check, enumerate_fiber, exact_pvalue_small};
use fibergof::sampler::ChainConfig;
use fibergof::table::{decode_table, encode_graph, DyadTable, Mode};

const EXIT_NONCONVERGED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 66;

#[derive(Parser)]
#[command(
    name = "fibergof",
    version,
    about = "Exact conditional goodness-of-fit tests for log-linear network models"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit a model by iterative proportional scaling and report the means.
    Fit(FitArgs),
    /// Run the exact conditional goodness-of-fit test.
    Test(TestArgs),
    /// Enumerate a small fiber outright; optionally check connectivity and
    /// compute the exact p-value.
    Fiber(FiberArgs),
    /// Emit Markov moves for a model (curated family or kernel basis).
    Moves(MovesArgs),
    /// Draw graphs from a fitted model.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Independence,
    Beta,
    P1Zero,
    P1Constant,
    P1Differential,
    SbmRestricted,
    SbmFull,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatName {
    Chi2,
    G2,
}

impl From<StatName> for StatKind {
    fn from(s: StatName) -> StatKind {
        match s {
            StatName::Chi2 => StatKind::Chi2,
            StatName::G2 => StatKind::G2,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Model family.
    #[arg(long, value_enum)]
    model: ModelName,
    /// Input file: an edge list, or a CSV table for the independence model.
    #[arg(long)]
    input: PathBuf,
    /// Assert that the input edge list is directed (graph models pick this
    /// from the model; passing it for an undirected model is an error).
    #[arg(long)]
    directed: bool,
    /// Treat counts as multigraph data (free nonnegative dyad cells).
    #[arg(long)]
    multigraph: bool,
    /// Block assignment file (`node block` lines); required for blockmodels.
    #[arg(long)]
    blocks: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    /// Total Metropolis steps per chain, including burn-in.
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    /// Steps discarded before recording.
    #[arg(long = "burn-in", default_value_t = 10_000)]
    burn_in: u64,
    /// Record every thin-th post-burn-in state.
    #[arg(long, default_value_t = 10)]
    thin: u64,
    /// RNG seed; falls back to $FIBERGOF_SEED, then to a random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent chains to run and pool.
    #[arg(long, default_value_t = 1)]
    chains: u32,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the JSON fit report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    chain: ChainArgs,
    /// Discrepancy statistic.
    #[arg(long, value_enum, default_value = "chi2")]
    stat: StatName,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a one-row CSV summary here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Exit with status 2 when the model fit did not converge.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct FiberArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Abort enumeration after this many members.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
    /// Include the member tables in the report.
    #[arg(long)]
    dump: bool,
    /// Check fiber connectivity under a move set: `curated`, `kernel`, or a
    /// moves JSON file.
    #[arg(long = "check-moves")]
    check_moves: Option<String>,
    /// Also compute the exact conditional p-value for this statistic.
    #[arg(long, value_enum)]
    stat: Option<StatName>,
}

#[derive(Args)]
struct MovesArgs {
    /// Model family.
    #[arg(long, value_enum)]
    model: ModelName,
    /// Node count (graph models without a block file).
    #[arg(long)]
    nodes: Option<usize>,
    /// Table dimensions for the independence model.
    #[arg(long)]
    d1: Option<usize>,
    #[arg(long)]
    d2: Option<usize>,
    /// Block assignment file; implies the node set for blockmodels.
    #[arg(long)]
    blocks: Option<PathBuf>,
    /// Emit the integer kernel lattice basis instead of the curated family.
    #[arg(long)]
    kernel: bool,
    /// Keep only moves applicable (in either direction) at this input.
    #[arg(long)]
    prune: Option<PathBuf>,
    /// Treat the prune input as multigraph data.
    #[arg(long)]
    multigraph: bool,
    /// Write the moves JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of replicate graphs to draw.
    #[arg(long)]
    count: usize,
    /// RNG seed; falls back to $FIBERGOF_SEED, then to a random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for replicate edge lists (replicate_0001.txt, ...);
    /// replicates go to stdout when omitted.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

/// An error carrying its process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn run(err: fibergof::Error) -> Self {
        let code = match err {
            fibergof::Error::InvalidConfig(_) => EXIT_USAGE,
            _ => 1,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fibergof: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.cmd {
        Cmd::Fit(args) => cmd_fit(args),
        Cmd::Test(args) => cmd_test(args),
        Cmd::Fiber(args) => cmd_fiber(args),
        Cmd::Moves(args) => cmd_moves(args),
        Cmd::Simulate(args) => cmd_simulate(args),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// The model instance plus the encoded observation.
struct Loaded {
    spec: ModelSpec,
    table: DyadTable,
    labels: Option<Vec<String>>,
}

fn model_is_directed(model: ModelName) -> Option<bool> {
    match model {
        ModelName::Independence => None,
        ModelName::Beta => Some(false),
        _ => Some(true),
    }
}

fn load_instance(args: &InputArgs) -> CliResult<Loaded> {
    let text = read_file(&args.input)?;
    let mode = if args.multigraph {
        Mode::Multigraph
    } else {
        Mode::Simple
    };
    match model_is_directed(args.model) {
        None => {
            if args.directed {
                return Err(CliError::usage(
                    "--directed does not apply to the independence model",
                ));
            }
            let (d1, d2, cells) = parse_table_csv(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
            let table = DyadTable::plain(cells)
                .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
            Ok(Loaded {
                spec: ModelSpec::Independence { d1, d2 },
                table,
                labels: None,
            })
        }
        Some(directed) => {
            if args.directed && !directed {
                return Err(CliError::usage(
                    "--directed conflicts with an undirected model",
                ));
            }
            let g = parse_edge_list(&text, directed)
                .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
            let spec = match args.model {
                ModelName::Beta => ModelSpec::Beta { n: g.n() },
                ModelName::P1Zero => ModelSpec::P1 {
                    n: g.n(),
                    recip: Reciprocity::Zero,
                },
                ModelName::P1Constant => ModelSpec::P1 {
                    n: g.n(),
                    recip: Reciprocity::Constant,
                },
                ModelName::P1Differential => ModelSpec::P1 {
                    n: g.n(),
                    recip: Reciprocity::Differential,
                },
                ModelName::SbmRestricted | ModelName::SbmFull => {
                    let partition = load_partition(args, &g)?;
                    let variant = if args.model == ModelName::SbmRestricted {
                        SbmVariant::Restricted
                    } else {
                        SbmVariant::Full
                    };
                    ModelSpec::Sbm { partition, variant }
                }
                ModelName::Independence => unreachable!("handled above"),
            };
            let table = encode_graph(&g, mode)
                .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
            Ok(Loaded {
                spec,
                table,
                labels: Some(g.labels().to_vec()),
            })
        }
    }
}

fn load_partition(args: &InputArgs, g: &fibergof::table::GraphData) -> CliResult<BlockPartition> {
    let Some(path) = &args.blocks else {
        return Err(CliError::usage("blockmodels require --blocks FILE"));
    };
    let pairs = parse_blocks(&read_file(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    block_partition_for(g, &pairs)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("FIBERGOF_SEED") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::usage(format!("FIBERGOF_SEED={v:?} is not a valid seed"))),
        Err(_) => Ok(fibergof::random_seed()),
    }
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, contents)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_fit(args: FitArgs) -> CliResult<u8> {
    let loaded = load_instance(&args.input)?;
    let a = loaded.spec.design().map_err(CliError::run)?;
    let fit = ipf_fit(&a, &loaded.table, 1e-10, 10_000).map_err(CliError::run)?;
    let existence = mle_existence_heuristic(&a, &loaded.table).map_err(CliError::run)?;
    let report = json!({
        "model": model_name(&loaded.spec),
        "converged": fit.converged,
        "iterations": fit.iterations,
        "max_gap": fit.max_gap,
        "mle_may_exist": existence,
        "sufficient_stats": a.row_labels().iter().zip(&fit.targets)
            .map(|(l, v)| json!([l, v])).collect::<Vec<_>>(),
        "fitted": fit.fitted,
        "node_labels": loaded.labels,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("fit report serializes");
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_test(args: TestArgs) -> CliResult<u8> {
    let loaded = load_instance(&args.input)?;
    let seed = resolve_seed(args.chain.seed)?;
    let cfg = ChainConfig {
        steps: args.chain.steps,
        burn_in: args.chain.burn_in,
        thin: args.chain.thin,
        seed,
        chains: args.chain.chains,
        ..ChainConfig::default()
    };
    let report = exact_test(
        &loaded.table,
        &loaded.spec,
        args.stat.into(),
        &cfg,
        loaded.labels.as_deref(),
    )
    .map_err(CliError::run)?;
    let mut text = report.to_json();
    text.push('\n');
    if args.out.is_some() {
        println!(
            "p = {:.6} (se {:.6}), {} kept samples, acceptance {:.4}",
            report.p_value, report.p_se, report.kept_samples, report.acceptance_rate
        );
    }
    emit(args.out.as_deref(), &text)?;
    if let Some(csv) = &args.csv {
        emit(Some(csv), &report.to_csv())?;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if args.strict && !report.fit.converged {
        return Ok(EXIT_NONCONVERGED);
    }
    Ok(0)
}

fn cmd_fiber(args: FiberArgs) -> CliResult<u8> {
    let loaded = load_instance(&args.input)?;
    let a = loaded.spec.design().map_err(CliError::run)?;
    let fiber = enumerate_fiber(&a, &loaded.table, args.cap).map_err(CliError::run)?;

    let connectivity = match &args.check_moves {
        None => None,
        Some(source) => {
            let moves = match source.as_str() {
                "curated" => curated_moves(&loaded.spec).map_err(CliError::run)?,
                "kernel" => integer_kernel(&a)
                    .map_err(CliError::run)?
                    .moves()
                    .to_vec(),
                path => {
                    let file: MovesFile = serde_json::from_str(&read_file(Path::new(path))?)
                        .map_err(|e| CliError::input(format!("{path}: {e}")))?;
                    file.validate(&a).map_err(CliError::run)?;
                    file.moves
                }
            };
            let report = connectivity_check(&fiber, &moves).map_err(CliError::run)?;
            Some(json!({
                "move_count": moves.len(),
                "components": report.components,
                "witness": report.witness,
            }))
        }
    };

    let exact = match args.stat {
        None => None,
        Some(stat) => {
            let stat: StatKind = stat.into();
            let fit = ipf_fit(&a, &loaded.table, 1e-10, 10_000).map_err(CliError::run)?;
            let fitted = fit.fitted;
            let observed = stat.value(loaded.table.cells(), &fitted);
            let target = loaded.spec.target(loaded.table.mode());
            let p = exact_pvalue_small(
                &fiber,
                |cells| stat.value(cells, &fitted),
                observed,
                target,
            )
            .map_err(CliError::run)?;
            Some(json!({
                "statistic": stat.name(),
                "observed": observed,
                "p_value": p,
                "fit_converged": fit.converged,
            }))
        }
    };

    let report = json!({
        "model": model_name(&loaded.spec),
        "fiber_size": fiber.members.len(),
        "truncated": fiber.truncated,
        "cap": args.cap,
        "connectivity": connectivity,
        "exact": exact,
        "members": args.dump.then(|| &fiber.members),
    });
    let mut text = serde_json::to_string_pretty(&report).expect("fiber report serializes");
    text.push('\n');
    print!("{text}");
    Ok(0)
}

fn spec_from_shape(args: &MovesArgs) -> CliResult<ModelSpec> {
    match args.model {
        ModelName::Independence => {
            let (Some(d1), Some(d2)) = (args.d1, args.d2) else {
                return Err(CliError::usage(
                    "independence moves need --d1 and --d2 table dimensions",
                ));
            };
            Ok(ModelSpec::Independence { d1, d2 })
        }
        ModelName::Beta | ModelName::P1Zero | ModelName::P1Constant | ModelName::P1Differential => {
            let Some(n) = args.nodes else {
                return Err(CliError::usage("graph-model moves need --nodes N"));
            };
            Ok(match args.model {
                ModelName::Beta => ModelSpec::Beta { n },
                ModelName::P1Zero => ModelSpec::P1 {
                    n,
                    recip: Reciprocity::Zero,
                },
                ModelName::P1Constant => ModelSpec::P1 {
                    n,
                    recip: Reciprocity::Constant,
                },
                _ => ModelSpec::P1 {
                    n,
                    recip: Reciprocity::Differential,
                },
            })
        }
        ModelName::SbmRestricted | ModelName::SbmFull => {
            let Some(path) = &args.blocks else {
                return Err(CliError::usage(
                    "blockmodel moves need --blocks FILE (it also fixes the node order)",
                ));
            };
            let pairs = parse_blocks(&read_file(path)?)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let names: Vec<String> = pairs.iter().map(|(_, b)| b.clone()).collect();
            let partition = BlockPartition::from_names(&names)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            let variant = if args.model == ModelName::SbmRestricted {
                SbmVariant::Restricted
            } else {
                SbmVariant::Full
            };
            Ok(ModelSpec::Sbm { partition, variant })
        }
    }
}

fn cmd_moves(args: MovesArgs) -> CliResult<u8> {
    let spec = spec_from_shape(&args)?;
    let a = spec.design().map_err(CliError::run)?;
    let mut moves = if args.kernel {
        integer_kernel(&a).map_err(CliError::run)?.moves().to_vec()
    } else {
        curated_moves(&spec).map_err(CliError::run)?
    };
    if let Some(input) = &args.prune {
        let input_args = InputArgs {
            model: args.model,
            input: input.clone(),
            directed: false,
            multigraph: args.multigraph,
            blocks: args.blocks.clone(),
        };
        let loaded = load_instance(&input_args)?;
        if loaded.spec.table_shape() != spec.table_shape() {
            return Err(CliError::usage(
                "prune input dimensions do not match the requested model",
            ));
        }
        moves = prune(&moves, &loaded.table);
    }
    let file = MovesFile::new(a.cols(), moves);
    let mut text = serde_json::to_string_pretty(&file).expect("moves serialize");
    text.push('\n');
    eprintln!("{} moves", file.moves.len());
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<u8> {
    let loaded = load_instance(&args.input)?;
    if args.input.multigraph {
        return Err(CliError::usage(
            "simulation draws simple graphs; --multigraph is not supported here",
        ));
    }
    let a = loaded.spec.design().map_err(CliError::run)?;
    let fit = ipf_fit(&a, &loaded.table, 1e-10, 10_000).map_err(CliError::run)?;
    let seed = resolve_seed(args.seed)?;
    let tables = simulate_tables(&loaded.spec, &fit, args.count, seed).map_err(CliError::run)?;
    eprintln!("seed: {seed}");
    match &args.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
            for (i, t) in tables.iter().enumerate() {
                let g = decode_table(t, loaded.labels.clone()).map_err(CliError::run)?;
                let path = dir.join(format!("replicate_{:04}.txt", i + 1));
                emit(Some(&path), &format_edge_list(&g))?;
            }
            println!(
                "wrote {} replicates to {}",
                tables.len(),
                dir.display()
            );
        }
        None => {
            for (i, t) in tables.iter().enumerate() {
                let g = decode_table(t, loaded.labels.clone()).map_err(CliError::run)?;
                println!("# replicate {}", i + 1);
                print!("{}", format_edge_list(&g));
            }
        }
    }
    Ok(0)
}
