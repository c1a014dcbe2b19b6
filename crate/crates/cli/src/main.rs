mod config;
mod inputs;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use integraph::pipeline::{last_report, BuildConfig, BuildError, Builder, DatasetFailure};
use integraph::storage::{export_graph, import_graph};
use integraph::{
    connect, BuildReport, Connection, DatasetInput, Graph, GraphStore, DEFAULT_MAX_HOPS,
};

use config::Overrides;
use inputs::{file_uri, InputSpec};

#[derive(Parser, Debug)]
#[command(
    name = "integraph",
    version,
    about = "Integrate heterogeneous datasets into one graph"
)]
struct Cli {
    /// Directory of the persistent store; in-memory when absent
    #[arg(long, global = true, env = "INTEGRAPH_STORE")]
    store: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ingest datasets, then run extraction, disambiguation and matching
    Ingest {
        /// Datasets as [MODEL:]PATH; the model defaults to the file extension
        #[arg(required = true)]
        inputs: Vec<InputSpec>,
        /// Write the build report as JSON to this file
        #[arg(long, env = "INTEGRAPH_OUT")]
        out: Option<PathBuf>,
    },
    /// Most frequent value labels, to help pick null codes
    FrequentValues {
        #[arg(short, long, default_value_t = 20)]
        k: usize,
    },
    /// Shortest path between two labels
    Connect {
        from: String,
        to: String,
        #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
        max_hops: usize,
    },
    /// Relation counts and the last build report
    Stats {
        #[arg(long)]
        json: bool,
    },
    /// Write the graph as JSON lines
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a JSON-lines export into an empty store
    Import { file: PathBuf },
}

enum Failure {
    Config(String),
    Dataset(String),
    Service(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Dataset(_) => 3,
            Failure::Service(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Dataset(m) | Failure::Service(m) | Failure::Other(m) => m,
        }
    }
}

impl From<integraph::GraphError> for Failure {
    fn from(e: integraph::GraphError) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<integraph::StoreError> for Failure {
    fn from(e: integraph::StoreError) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Config(m) => Failure::Config(m),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = cli.overrides.resolve().map_err(Failure::Config)?;
    let store = open_store(cli.store.as_ref(), &config)?;
    match cli.command {
        Command::Ingest { inputs, out } => ingest(config, store, &inputs, out),
        Command::FrequentValues { k } => {
            let mut graph = Graph::open(require(store, &cli.store)?)?;
            let rows = graph.frequent_values(k)?;
            let width = rows
                .iter()
                .map(|(_, c)| c.to_string().len())
                .max()
                .unwrap_or(0);
            for (label, count) in rows {
                println!("{count:>width$}  {label}");
            }
            Ok(())
        }
        Command::Connect { from, to, max_hops } => {
            let mut graph = Graph::open(require(store, &cli.store)?)?;
            match connect(&mut graph, &from, &to, max_hops)? {
                Connection::Path(path) => {
                    println!(
                        "{} hops across {} datasets",
                        path.hops(),
                        path.datasets().len()
                    );
                    println!("{path}");
                }
                Connection::NoMatch { labels } => {
                    println!("no match: no node labeled {}", labels.join(", "))
                }
                Connection::NoPath => println!("no path within {max_hops} hops"),
            }
            Ok(())
        }
        Command::Stats { json } => stats(&require(store, &cli.store)?, json),
        Command::Export { out } => {
            let store = require(store, &cli.store)?;
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
                    let mut sink = BufWriter::new(file);
                    export_graph(&store, &mut sink)?;
                    sink.flush().map_err(|e| Failure::Other(e.to_string()))?;
                }
                None => export_graph(&store, std::io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Import { file } => {
            let store = require(store, &cli.store)?;
            if store.stats()?.counts != Default::default() {
                return Err(Failure::Config("the store already holds a graph".into()));
            }
            let reader = File::open(&file)
                .map_err(|e| Failure::Dataset(format!("{}: {e}", file.display())))?;
            let mut store = import_graph(BufReader::new(reader), store)
                .map_err(|e| Failure::Dataset(e.to_string()))?;
            store.flush()?;
            let c = store.stats()?.counts;
            println!(
                "imported {} nodes, {} edges, {} similar, {} datasets",
                c.nodes, c.edges, c.similar, c.datasets
            );
            Ok(())
        }
    }
}

fn open_store(dir: Option<&PathBuf>, config: &BuildConfig) -> Result<GraphStore, Failure> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
            GraphStore::open_dir(dir, config.buffer_size, config.cache_size)
                .map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))
        }
        None => Ok(config.in_memory_store()),
    }
}

fn require(store: GraphStore, dir: &Option<PathBuf>) -> Result<GraphStore, Failure> {
    match dir {
        Some(_) => Ok(store),
        None => Err(Failure::Config("this command needs --store".into())),
    }
}

fn ingest(
    config: BuildConfig,
    store: GraphStore,
    specs: &[InputSpec],
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut unreadable = Vec::new();
    let mut inputs = Vec::new();
    for spec in specs {
        let name = spec.path.display().to_string();
        match std::fs::read(&spec.path) {
            Ok(data) => {
                let mut input = DatasetInput::new(spec.model, &name, data);
                if let Some(uri) = file_uri(&spec.path) {
                    input = input.with_prov(&uri);
                }
                inputs.push(input);
            }
            Err(e) => unreadable.push(DatasetFailure {
                dataset: name,
                error: e.to_string(),
                retryable: false,
            }),
        }
    }
    let mut builder = Builder::new(config, store)?;
    let mut report = builder.build(&inputs)?;
    report.failures.splice(0..0, unreadable);

    print!("{}", report.table());
    for (name, r) in &report.datasets {
        if r.rejected > 0 {
            eprintln!("{name}: {} rejected", r.rejected);
        }
    }
    for f in &report.failures {
        eprintln!("failed: {}: {}", f.dataset, f.error);
    }
    if let Some(path) = out {
        std::fs::write(&path, report.to_json())
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    }
    outcome(&report)
}

fn outcome(report: &BuildReport) -> Result<(), Failure> {
    let failed = report.failures.iter().filter(|f| !f.retryable).count();
    if failed > 0 {
        return Err(Failure::Dataset(format!("{failed} dataset(s) failed")));
    }
    let service = report.failures.len() + report.extraction_failures + report.ned_failures;
    if service > 0 {
        return Err(Failure::Service(format!(
            "{} service failure(s); the graph was built without them",
            service
        )));
    }
    Ok(())
}

fn stats(store: &GraphStore, json: bool) -> Result<(), Failure> {
    let counts = store.stats()?.counts;
    let report = last_report(store)?;
    if json {
        let value = serde_json::json!({ "counts": counts, "lastReport": report });
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
        return Ok(());
    }
    println!("nodes     {}", counts.nodes);
    println!("edges     {}", counts.edges);
    println!("similar   {}", counts.similar);
    println!("datasets  {}", counts.datasets);
    if let Some(r) = report {
        println!();
        print!("{}", r.table());
        let c = &r.cost;
        println!();
        println!(
            "c1 {:.3e}  c2 {:.3e}  c3 {:.3e}  c4 {:.3e}",
            c.c1, c.c2, c.c3, c.c4
        );
        println!(
            "predicted {:.3}s, measured {:.3}s",
            c.predicted_seconds(),
            r.t.as_secs_f64()
        );
    }
    Ok(())
}
