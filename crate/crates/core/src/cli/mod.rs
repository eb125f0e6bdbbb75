//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a domain error (bad input data, unknown
//! metric, uncoverable targets, ...), 2 on a command-line usage error.

pub mod graph_file;
mod output;

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::ingest::{self, attach_attributes, build_graph, parse_dataset};
use crate::metrics::{self, PathSample, DEFAULT_SAMPLE_SEED};
use crate::model::{AsType, Asn, BipartiteGraph, IxpId, NodeClass, PolicyLayer, Relation, Source};
use crate::placement::{self, SiteLocation};
use crate::projection::{self, UnknownRelations};

pub use output::Table;

/// Environment variable overriding the default worker thread count.
pub const THREADS_ENV: &str = "IXPGRAPH_THREADS";

pub const METRIC_NAMES: [&str; 9] = [
    "degree-cdf",
    "member-types",
    "type-share",
    "table2",
    "table3",
    "remote-gain",
    "degree-prefix-corr",
    "betweenness",
    "clustering",
];

#[derive(Parser, Debug)]
#[command(
    name = "ixpgraph",
    version,
    about = "Build and analyze the IXP bipartite graph"
)]
pub struct Cli {
    /// Worker threads for parallel metrics (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Merge two membership datasets into a sanitized graph file.
    Build(BuildArgs),
    /// Compute a metric over a graph file.
    Metrics(MetricsArgs),
    /// Solve an IXP placement problem.
    Place(PlaceArgs),
    /// Write a graph file as an edge list or canonical JSON.
    Export(ExportArgs),
    /// Convert an edge list or JSON graph into a canonical graph file.
    Import(ImportArgs),
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long)]
    pdb: PathBuf,
    #[arg(long)]
    pch: PathBuf,
    /// CSV `asn,as_type`.
    #[arg(long)]
    as_types: Option<PathBuf>,
    /// CSV `ixp_id,country,city,lat,lon`.
    #[arg(long)]
    locations: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
    /// Print the discard report as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// One of: degree-cdf, member-types, type-share, table2, table3,
    /// remote-gain, degree-prefix-corr, betweenness, clustering.
    metric: String,
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long, default_value = "ixp")]
    class: NodeClass,
    #[arg(long)]
    json: bool,
    /// Degree thresholds for type-share.
    #[arg(long, value_delimiter = ',', default_values_t = [0u64, 20, 30])]
    thresholds: Vec<u64>,
    /// Sample this many source ASes for table2 instead of all pairs.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
    seed: u64,
    /// Fold multiplicities at or above this value into one bucket (table3).
    #[arg(long)]
    bucket: Option<u64>,
    /// Policy CSV `as1,as2,relation` filtering the AS projection.
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Keep AS pairs whose relation is unknown when filtering by policy.
    #[arg(long)]
    keep_unknown: bool,
}

#[derive(Args, Debug)]
struct PlaceArgs {
    #[command(subcommand)]
    problem: PlaceCommand,
}

#[derive(Args, Debug)]
struct CoverageArgs {
    #[arg(long, short)]
    graph: PathBuf,
    /// Comma-separated ASNs, or `all`.
    #[arg(long)]
    targets: Option<String>,
    /// File with one ASN per line.
    #[arg(long)]
    targets_file: Option<PathBuf>,
    /// CSV `ixp_id,cost`.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// CSV `asn,weight`.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum PlaceCommand {
    /// Cover every target at minimum cost.
    Cover(CoverageArgs),
    /// Cover as much target weight as a budget allows.
    Budget {
        #[command(flatten)]
        coverage: CoverageArgs,
        #[arg(long)]
        budget: f64,
    },
    /// Rank remote peering tunnels for an AS.
    Tunnels {
        #[arg(long, short)]
        graph: PathBuf,
        #[arg(long = "as")]
        asn: Asn,
    },
    /// Score a candidate location for a new IXP.
    Site {
        #[arg(long, short)]
        graph: PathBuf,
        #[arg(long)]
        country: String,
        #[arg(long)]
        city: Option<String>,
        /// Optional CSV `ixp_id,country,city,lat,lon` applied first.
        #[arg(long)]
        locations: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long, short)]
    graph: PathBuf,
    /// `edgelist` or `json`.
    #[arg(long, short)]
    format: String,
    /// Output file (default: standard output).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ImportArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// `edgelist` or `json`.
    #[arg(long, short)]
    format: String,
    #[arg(long, short)]
    out: PathBuf,
}

/// A failure that maps to exit code 1, optionally followed by usage text.
struct Failure {
    error: Error,
    usage: Option<&'static str>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, usage: None }
    }
}

type CmdResult = std::result::Result<(), Failure>;

const METRICS_USAGE: &str = "usage: ixpgraph metrics <degree-cdf|member-types|type-share|table2|table3|remote-gain|degree-prefix-corr|betweenness|clustering> --graph <FILE> [--class ixp|as] [--json]";
const FORMAT_USAGE: &str = "usage: --format <edgelist|json>";

/// Parse `args` (including the program name) and run the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let threads = cli.threads.or_else(threads_from_env).unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let (mut buf_out, mut buf_err) = (Vec::new(), Vec::new());
    let result = pool.install(|| dispatch(cli.command, &mut buf_out, &mut buf_err));
    let _ = out.write_all(&buf_out);
    let _ = err.write_all(&buf_err);
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error);
            if let Some(usage) = f.usage {
                let _ = writeln!(err, "{usage}");
            }
            1
        }
    }
}

fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Build(args) => cmd_build(args, out, err),
        Command::Metrics(args) => cmd_metrics(args, out),
        Command::Place(args) => cmd_place(args.problem, out),
        Command::Export(args) => cmd_export(args, out),
        Command::Import(args) => cmd_import(args),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e).into())
}

fn cmd_build(args: BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (pdb, pch) = rayon::join(
        || parse_dataset(&args.pdb, Source::Pdb),
        || parse_dataset(&args.pch, Source::Pch),
    );
    let (mut graph, report) = build_graph(&pdb?, &pch?)?;
    let attrs = attach_attributes(
        &mut graph,
        args.as_types.as_deref(),
        args.locations.as_deref(),
    )?;
    if attrs.unknown_ids > 0 || attrs.malformed_rows > 0 {
        let _ = writeln!(
            err,
            "warning: attribute files: {} rows for unknown ids, {} malformed rows ignored",
            attrs.unknown_ids, attrs.malformed_rows
        );
    }
    graph_file::write_graph(&args.out, &graph)?;
    if args.json {
        let doc = json!({
            "ixps": graph.ixp_count(),
            "ases": graph.as_count(),
            "edges": graph.edge_count(),
            "discards": report,
            "attributes": attrs,
        });
        write_out(
            out,
            &format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
        )
    } else {
        write_out(
            out,
            &format!(
                "graph: {} IXPs, {} ASes, {} edges -> {}\n{report}",
                graph.ixp_count(),
                graph.as_count(),
                graph.edge_count(),
                args.out.display()
            ),
        )
    }
}

fn require_as_types(graph: &BipartiteGraph) -> Result<()> {
    if graph.ases().all(|a| a.as_type == AsType::Unknown) {
        return Err(Error::InsufficientData(
            "graph has no AS type attributes (build with --as-types)".into(),
        ));
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs, out: &mut dyn Write) -> CmdResult {
    if !METRIC_NAMES.contains(&args.metric.as_str()) {
        return Err(Failure {
            error: Error::InvalidInput(format!("unknown metric {:?}", args.metric)),
            usage: Some(METRICS_USAGE),
        });
    }
    let graph = graph_file::read_graph(&args.graph)?;
    let table = match args.metric.as_str() {
        "degree-cdf" => output::degree_cdf(&metrics::degree_distribution(&graph, args.class)?),
        "member-types" => {
            require_as_types(&graph)?;
            output::member_types(&metrics::member_type_fractions(&graph)?)
        }
        "type-share" => {
            require_as_types(&graph)?;
            output::type_share(&metrics::type_share_by_degree(&graph, &args.thresholds)?)
        }
        "table2" => {
            let sample = args.sample.map(|sources| PathSample {
                sources,
                seed: args.seed,
            });
            output::path_counts(&metrics::shortest_path_ixp_counts(&graph, sample)?)
        }
        "table3" => {
            let mg = multigraph(&graph, &args)?;
            output::multiplicity(&metrics::multiplicity_distribution(&mg), args.bucket)
        }
        "remote-gain" => output::gain_cdf(&metrics::remote_peering_gain_cdf(&graph)),
        "degree-prefix-corr" => output::correlation(metrics::degree_prefix_correlation(&graph)?),
        "betweenness" => output::node_scores(
            "betweenness",
            &metrics::betweenness_centrality(&multigraph(&graph, &args)?)?,
        ),
        "clustering" => output::node_scores(
            "clustering",
            &metrics::clustering_coefficient(&multigraph(&graph, &args)?)?,
        ),
        _ => unreachable!("metric names validated above"),
    };
    let text = if args.json {
        table.to_json(&args.metric)
    } else {
        table.to_csv()
    };
    write_out(out, &text)
}

fn multigraph(graph: &BipartiteGraph, args: &MetricsArgs) -> Result<projection::Multigraph> {
    let mg = projection::project(graph, args.class)?;
    match &args.policy {
        None => Ok(mg),
        Some(path) => {
            let policy = read_policy(path)?;
            let unknown = if args.keep_unknown {
                UnknownRelations::Keep
            } else {
                UnknownRelations::Drop
            };
            Ok(projection::apply_policy_with(&mg, &policy, unknown)?.0)
        }
    }
}

fn csv_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let found: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::format(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        return Err(Error::format(
            path,
            format!("expected header `{}`", header.join(",")),
        ));
    }
    rdr.records()
        .map(|r| r.map_err(|e| Error::format(path, e.to_string())))
        .collect()
}

fn field<T: std::str::FromStr>(path: &Path, row: &csv::StringRecord, i: usize) -> Result<T> {
    row.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| {
        Error::format(
            path,
            format!("bad value in row {:?}", row.iter().collect::<Vec<_>>()),
        )
    })
}

/// CSV `as1,as2,relation`, relation one of p2p, c2p, p2c, unknown
/// (oriented from as1 towards as2).
pub fn read_policy(path: &Path) -> Result<PolicyLayer> {
    let mut policy = PolicyLayer::new();
    for row in csv_rows(path, &["as1", "as2", "relation"])? {
        let a: Asn = field(path, &row, 0)?;
        let b: Asn = field(path, &row, 1)?;
        let rel: Relation = field(path, &row, 2)?;
        policy.set(a, b, rel);
    }
    Ok(policy)
}

fn parse_targets(graph: &BipartiteGraph, args: &CoverageArgs) -> Result<BTreeSet<Asn>> {
    let mut specs: Vec<String> = Vec::new();
    if let Some(list) = &args.targets {
        specs.extend(list.split(',').map(str::to_string));
    }
    if let Some(path) = &args.targets_file {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        specs.extend(text.lines().map(str::to_string));
    }
    if args.targets.is_none() && args.targets_file.is_none() {
        return Err(Error::InvalidInput(
            "no targets given (use --targets or --targets-file)".into(),
        ));
    }
    let mut targets = BTreeSet::new();
    for spec in specs.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if spec.eq_ignore_ascii_case("all") {
            targets.extend(graph.ases().map(|a| a.asn));
        } else {
            targets.insert(spec.parse::<Asn>().map_err(Error::InvalidInput)?);
        }
    }
    Ok(targets)
}

fn coverage_instance(args: &CoverageArgs) -> Result<placement::CoverageInstance> {
    let graph = graph_file::read_graph(&args.graph)?;
    let targets = parse_targets(&graph, args)?;
    let costs = args
        .costs
        .as_deref()
        .map(|p| -> Result<BTreeMap<IxpId, f64>> {
            csv_rows(p, &["ixp_id", "cost"])?
                .iter()
                .map(|r| Ok((IxpId::new(&r[0]), field(p, r, 1)?)))
                .collect()
        })
        .transpose()?;
    let weights = args
        .weights
        .as_deref()
        .map(|p| -> Result<BTreeMap<Asn, f64>> {
            csv_rows(p, &["asn", "weight"])?
                .iter()
                .map(|r| Ok((field(p, r, 0)?, field(p, r, 1)?)))
                .collect()
        })
        .transpose()?;
    placement::build_instance(&graph, &targets, costs.as_ref(), weights.as_ref())
}

fn cmd_place(problem: PlaceCommand, out: &mut dyn Write) -> CmdResult {
    let value = match problem {
        PlaceCommand::Cover(args) => {
            let instance = coverage_instance(&args)?;
            serde_json::to_value(placement::greedy_set_cover(&instance)?)
        }
        PlaceCommand::Budget { coverage, budget } => {
            let instance = coverage_instance(&coverage)?;
            serde_json::to_value(placement::budgeted_max_coverage(&instance, budget)?)
        }
        PlaceCommand::Tunnels { graph, asn } => {
            let graph = graph_file::read_graph(&graph)?;
            let ranked: Vec<_> = placement::rank_tunnels(&graph, asn)?
                .into_iter()
                .map(|(b, gain)| json!({"asn": b, "gain": gain}))
                .collect();
            Ok(json!({"as": asn, "tunnels": ranked}))
        }
        PlaceCommand::Site {
            graph,
            country,
            city,
            locations,
        } => {
            let mut graph = graph_file::read_graph(&graph)?;
            if let Some(path) = locations {
                let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
                ingest::attach_locations(&mut graph, file, &path)?;
            }
            let site = SiteLocation {
                country: country.clone(),
                city: city.clone(),
            };
            let score = placement::site_selection_score(&graph, &site)?;
            Ok(json!({"country": country, "city": city, "score": score}))
        }
    }
    .expect("placement output serializes");
    write_out(
        out,
        &format!("{}\n", serde_json::to_string_pretty(&value).expect("json")),
    )
}

enum GraphFormat {
    Edgelist,
    Json,
}

fn graph_format(name: &str) -> std::result::Result<GraphFormat, Failure> {
    match name {
        "edgelist" => Ok(GraphFormat::Edgelist),
        "json" => Ok(GraphFormat::Json),
        other => Err(Failure {
            error: Error::InvalidInput(format!("unknown format {other:?}")),
            usage: Some(FORMAT_USAGE),
        }),
    }
}

fn cmd_export(args: ExportArgs, out: &mut dyn Write) -> CmdResult {
    let format = graph_format(&args.format)?;
    let graph = graph_file::read_graph(&args.graph)?;
    let text = match format {
        GraphFormat::Edgelist => graph_file::to_edgelist(&graph),
        GraphFormat::Json => graph_file::to_json(&graph),
    };
    match args.out {
        Some(path) => fs::write(&path, text).map_err(|e| Error::io(&path, e).into()),
        None => write_out(out, &text),
    }
}

fn cmd_import(args: ImportArgs) -> CmdResult {
    let format = graph_format(&args.format)?;
    let text = fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let graph = match format {
        GraphFormat::Edgelist => graph_file::from_edgelist(&text, &args.input)?,
        GraphFormat::Json => graph_file::from_json(&text, &args.input)?,
    };
    graph_file::write_graph(&args.out, &graph)?;
    Ok(())
}
