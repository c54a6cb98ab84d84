//! `cris`: command-line front end for harvesting, generating, querying and
//! serving research annotations.

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cris_core::generator::{embed, generate, GeneratedAnnotation, RecordFile};
use cris_core::model::{Iri, PrefixMap, Triple};
use cris_core::schema::{
    bundled_cerif_schema, closure, is_schema_triple, load_schema, load_schema_lenient, validate,
    ClosureTable, Schema,
};
use cris_core::store::{self, MergeMode, SourceId, Store};
use cris_core::syntax::{extract_annotations, parse_triples, serialize, ParseOutcome};
use cris_core::{evaluate, parse_query};
use cris_harvester::{crawl, parse_seeds, CrawlConfig};

#[derive(Parser)]
#[command(
    name = "cris",
    version,
    about = "Research information harvesting and retrieval"
)]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Harvest annotated pages into a store directory.
    Crawl(CrawlArgs),
    /// Turn a JSON record file into annotation triples.
    Generate(GenerateArgs),
    /// Embed an annotation file into an HTML page.
    Embed(EmbedArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
    /// Run one query against a store directory.
    Query(QueryArgs),
    /// Merge triples files or annotated HTML pages into a store directory.
    Load(LoadArgs),
    /// Check domain and range declarations of a store or of triples files.
    Validate(ValidateArgs),
    /// Print the bundled schema.
    Schema(SchemaArgs),
}

#[derive(Args)]
struct CrawlArgs {
    /// File with one seed URL per line.
    #[arg(long)]
    seeds: PathBuf,
    /// Hosts that may be fetched; defaults to the seeds' hosts.
    #[arg(long, value_delimiter = ',')]
    allow: Vec<String>,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 100)]
    max_pages: usize,
    /// Pause between requests to one host, in milliseconds.
    #[arg(long, default_value_t = 500)]
    delay: u64,
    #[arg(long, default_value_t = 4)]
    parallel: usize,
    /// Per-request timeout in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    timeout: u64,
    /// Store directory; loaded first if it exists.
    #[arg(long)]
    out: PathBuf,
    /// Keep what earlier crawls harvested from a page instead of replacing it.
    #[arg(long)]
    accumulate: bool,
    #[arg(long)]
    no_robots: bool,
    /// Write one JSON line per URL here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Overrides the record file's `base_uri`.
    #[arg(long)]
    base: Option<String>,
    /// Unknown properties are errors instead of warnings.
    #[arg(long)]
    strict: bool,
    /// Extra schema triples on top of the bundled schema.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    annotation: PathBuf,
    #[arg(long)]
    html: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    /// Store directory; writes are persisted there.
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value = cris_server::DEFAULT_BIND)]
    bind: SocketAddr,
    /// Allowed browser origin, e.g. http://localhost:5173.
    #[arg(long)]
    cors: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Header line, then one tab-separated row per line, terms as in triples files.
    Tsv,
    Json,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    query: String,
}

#[derive(Args)]
struct LoadArgs {
    #[arg(long)]
    store: PathBuf,
    /// Source to record; `local` or a URL. Defaults to `local`.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    accumulate: bool,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, conflicts_with = "files")]
    store: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct SchemaArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print class and property counts instead of the triples.
    #[arg(long)]
    summary: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn parse_file(path: &Path, scope: &str) -> Result<ParseOutcome> {
    let parsed = parse_triples(&read(path)?, scope);
    for e in &parsed.errors {
        eprintln!("{}:{}: {}", path.display(), e.line, e.message);
    }
    Ok(parsed)
}

/// Bundled schema plus an optional schema file, which must parse cleanly.
fn base_schema(extra: Option<&Path>) -> Result<Vec<Triple>> {
    let mut triples = bundled_cerif_schema();
    if let Some(path) = extra {
        let parsed = parse_file(path, "schema")?;
        if !parsed.errors.is_empty() {
            bail!(
                "{} has {} malformed lines",
                path.display(),
                parsed.errors.len()
            );
        }
        triples.extend(parsed.triples);
    }
    Ok(triples)
}

/// Schema from the base triples plus any schema triples in `data`.
fn effective_schema<'a>(
    base: &'a [Triple],
    data: impl Iterator<Item = &'a Triple>,
) -> (Schema, ClosureTable) {
    let mut all: Vec<&Triple> = base.iter().collect();
    all.extend(data.filter(|t| is_schema_triple(t)));
    let (schema, errors) = load_schema_lenient(all);
    for e in errors {
        eprintln!("warning: {e}");
    }
    let ct = closure(&schema);
    (schema, ct)
}

fn load_store(dir: &Path) -> Result<Store> {
    Store::load_dir(dir).with_context(|| format!("loading store {}", dir.display()))
}

async fn run_crawl(args: CrawlArgs) -> ExitCode {
    let config = (|| -> Result<CrawlConfig> {
        let seeds = parse_seeds(&read(&args.seeds)?)?;
        let mut c = CrawlConfig::new(seeds);
        c.host_allowlist = args.allow.clone();
        c.max_depth = args.depth;
        c.max_pages = args.max_pages;
        c.per_host_delay = Duration::from_millis(args.delay);
        c.fetch_parallelism = args.parallel;
        c.timeout = Duration::from_millis(args.timeout);
        c.respect_robots = !args.no_robots;
        if args.accumulate {
            c.merge_mode = MergeMode::Accumulate;
        }
        c.validate()?;
        Ok(c)
    })();
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = async {
        let mut store = load_store(&args.out)?;
        let report = crawl(&config, &mut store).await?;
        cris_harvester::export(&store, &args.out)?;
        if let Some(path) = &args.report {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            report.write_jsonl(io::BufWriter::new(file))?;
        }
        let t = &report.totals;
        eprintln!(
            "fetched {}, skipped {}, failed {}; {} triples added, {} parse errors; store has {} triples",
            t.fetched,
            t.skipped,
            t.failed,
            t.triples_added,
            t.parse_errors,
            store.len()
        );
        anyhow::Ok(t.fetched)
    }
    .await;
    match result {
        Ok(0) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let mut rf = RecordFile::from_json(&read(&args.input)?)?;
    if let Some(base) = args.base {
        rf.base_uri = base;
    }
    let schema = load_schema(&base_schema(args.schema.as_deref())?)?;
    let annotation = generate(&rf, &schema, args.strict)?;
    for w in &annotation.warnings {
        eprintln!("warning: {w}");
    }
    write_out(args.out.as_deref(), &annotation.to_ntriples())
}

fn run_embed(args: EmbedArgs) -> Result<()> {
    let parsed = parse_file(&args.annotation, "annotation")?;
    if !parsed.errors.is_empty() {
        bail!("{} has malformed lines", args.annotation.display());
    }
    let annotation = GeneratedAnnotation {
        triples: parsed.triples.into_iter().collect(),
        ..Default::default()
    };
    let html = read(&args.html)?;
    write_out(args.out.as_deref(), &embed(&annotation, &html))
}

async fn run_serve(args: ServeArgs) -> Result<()> {
    let store = match &args.store {
        Some(dir) => load_store(dir)?,
        None => Store::new(),
    };
    let state = cris_server::AppState::new(
        store,
        base_schema(args.schema.as_deref())?,
        args.store.clone(),
    );
    let options = cris_server::ServerOptions {
        cors_origin: args.cors,
        ..Default::default()
    };
    let app = cris_server::router(state, &options)?;
    eprintln!("listening on http://{}", args.bind);
    cris_server::serve(args.bind, app).await?;
    Ok(())
}

fn run_query(args: QueryArgs) -> Result<ExitCode> {
    let store = load_store(&args.store)?;
    let snap = store.snapshot();
    let (_, ct) = effective_schema(&base_schema(args.schema.as_deref())?, snap.triples());
    let ast = match parse_query(&args.query, &PrefixMap::cerif()) {
        Ok(ast) => ast,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("  {}", args.query);
            eprintln!(
                "  {}^",
                " ".repeat(
                    args.query[..e.position().min(args.query.len())]
                        .chars()
                        .count()
                )
            );
            return Ok(ExitCode::from(2));
        }
    };
    let table = evaluate(&ast, &snap, &ct);
    let mut out = io::BufWriter::new(io::stdout().lock());
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &cris_server::json::table_json(&table))?;
            writeln!(out)?;
        }
        Format::Tsv => {
            writeln!(out, "{}", table.columns.join("\t"))?;
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
                writeln!(out, "{}", cells.join("\t"))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn is_html(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("html" | "htm" | "xhtml")
    )
}

/// Triples of a file; HTML pages contribute their inline blocks.
fn parse_any(path: &Path, scope: &str) -> Result<ParseOutcome> {
    if !is_html(path) {
        return parse_file(path, scope);
    }
    let abs = fs::canonicalize(path)?;
    let base = Iri::new(format!("file://{}", abs.display()))?;
    let extract = extract_annotations(&read(path)?, &base);
    let mut parsed = ParseOutcome {
        blank_scope: scope.to_string(),
        ..Default::default()
    };
    for (_, block) in &extract.inline_blocks {
        parsed.extend(parse_triples(block, scope));
    }
    for e in &parsed.errors {
        eprintln!("{}: block line {}: {}", path.display(), e.line, e.message);
    }
    Ok(parsed)
}

fn run_load(args: LoadArgs) -> Result<()> {
    let source = match args.source.as_deref() {
        None => SourceId::Local,
        Some(s) => SourceId::parse(s).with_context(|| format!("bad source {s:?}"))?,
    };
    let mode = if args.accumulate {
        MergeMode::Accumulate
    } else {
        MergeMode::ReplaceSource
    };
    let mut store = load_store(&args.store)?;
    let mut combined = ParseOutcome {
        blank_scope: source.to_string(),
        ..Default::default()
    };
    for path in &args.files {
        let parsed = parse_any(path, &format!("{source} {}", path.display()))?;
        // keep blank labels of different files apart
        combined.triples.extend(
            parsed
                .triples
                .iter()
                .map(|t| store::scope_blanks(t, &parsed.blank_scope)),
        );
        combined.errors.extend(parsed.errors);
    }
    let counts = store.merge(&combined, &source, store::now(), mode);
    store.save_dir(&args.store)?;
    eprintln!(
        "added {}, duplicate {}, {} malformed lines; store has {} triples",
        counts.added,
        counts.duplicate,
        combined.errors.len(),
        store.len()
    );
    Ok(())
}

fn run_validate(args: ValidateArgs) -> Result<ExitCode> {
    let data: Vec<Triple> = match &args.store {
        Some(dir) => load_store(dir)?.snapshot().triples().cloned().collect(),
        None => {
            let mut all = Vec::new();
            for path in &args.files {
                all.extend(parse_any(path, &path.display().to_string())?.triples);
            }
            all
        }
    };
    let (schema, ct) = effective_schema(&base_schema(args.schema.as_deref())?, data.iter());
    let report = validate(&data, &schema, &ct);
    for f in &report.findings {
        println!("{}: {} ({})", f.severity, f.message, f.triple);
    }
    let errors = report.errors().count();
    eprintln!(
        "{} triples checked: {} errors, {} warnings",
        data.len(),
        errors,
        report.warnings().count()
    );
    Ok(if errors > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_schema(args: SchemaArgs) -> Result<()> {
    let triples = bundled_cerif_schema();
    if args.summary {
        let schema = load_schema(&triples)?;
        let ct = closure(&schema);
        let text = format!(
            "triples {}\nclasses {}\nproperties {}\nacyclic {}\n",
            triples.len(),
            schema.classes.len(),
            schema.properties.len(),
            !ct.has_subclass_cycle()
        );
        return write_out(args.out.as_deref(), &text);
    }
    write_out(args.out.as_deref(), &serialize(&triples))
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(level)),
        )
        .with_writer(io::stderr)
        .init();

    let result = match cli.command {
        Command::Crawl(args) => return run_crawl(args).await,
        Command::Generate(args) => run_generate(args).map(|_| ExitCode::SUCCESS),
        Command::Embed(args) => run_embed(args).map(|_| ExitCode::SUCCESS),
        Command::Serve(args) => run_serve(args).await.map(|_| ExitCode::SUCCESS),
        Command::Query(args) => run_query(args),
        Command::Load(args) => run_load(args).map(|_| ExitCode::SUCCESS),
        Command::Validate(args) => run_validate(args),
        Command::Schema(args) => run_schema(args).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
