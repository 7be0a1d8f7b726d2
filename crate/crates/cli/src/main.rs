mod config;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use azul::analysis::{classify_criticality, route, select_content, Architecture, ContentConfig};
use azul::daily::{run_daily, CityStatus, DailyConfig};
use azul::eval::{
    evaluate_systems, make_human_eval_bundle, read_jsonl, split_corpus, synthesize_corpus, write_jsonl, CorpusRow,
    SystemOutput, SystemRun, CORPUS_ROWS, CORPUS_SEED,
};
use azul::fixtures::write_fixture_feeds;
use azul::neural::{serve_echo, Endpoint, GenRequest, NeuralClient};
use azul::pipeline::{run_pipeline, Lexicon, PipelineConfig, VariantMode};
use azul::publish::{compose_thread, publish, RetryPolicy, Sink, DEFAULT_LIMIT};
use azul::store::{ingest_feed, Source, Store};
use azul::template::{generate, TemplateRegistry};
use azul::{parse_ir, serialize_ir, IntentDocument};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "azul", version, about = "Daily coastal reports from observation feeds")]
struct Cli {
    /// Store directory.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for variant choice, splits and sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Log to stderr; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a line-delimited feed into the store.
    Ingest {
        #[arg(long)]
        source: Source,
        #[arg(long)]
        file: PathBuf,
    },
    /// Print the selected content for a city and day as IR.
    Analyze {
        #[arg(long)]
        city: String,
        #[arg(long)]
        date: NaiveDate,
    },
    /// Print the routing decision as JSON.
    Route {
        #[command(flatten)]
        input: DocInput,
        #[arg(long)]
        override_neural: bool,
    },
    /// Write a report with the chosen architecture.
    Generate {
        #[command(flatten)]
        input: DocInput,
        #[arg(long)]
        arch: Architecture,
        #[arg(long, value_enum, default_value = "pt")]
        lang: Lang,
        /// Write the pipeline trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Generator for `--arch neural`: `stdio:<cmd>` or an http URL.
        #[arg(long)]
        endpoint: Option<String>,
    },
    /// Score system outputs against a corpus.
    Evaluate {
        /// `name=path` or `path` to a JSONL file of `{id, text}`.
        #[arg(long)]
        system: Vec<String>,
        /// Also score template and pipeline outputs generated from the corpus.
        #[arg(long)]
        builtin: bool,
        #[arg(long)]
        refs: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Split a corpus into train, validation and test files.
    Split {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a human rating package for one system.
    Bundle {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        refs: PathBuf,
        #[arg(long, default_value_t = 50)]
        sample: usize,
        #[arg(long, default_value_t = 5)]
        raters: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a report into a thread and deliver it.
    Publish {
        /// Report text; `-` reads stdin.
        #[arg(long = "in")]
        input: PathBuf,
        /// `dry-run:<dir>` or `webhook:<url>`.
        #[arg(long)]
        sink: String,
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        date: Option<NaiveDate>,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long, default_value = azul::publish::DEFAULT_TOKEN_ENV)]
        token_env: String,
    },
    /// Select, route, generate and publish for every configured city.
    Daily {
        #[arg(long)]
        date: Option<NaiveDate>,
        #[arg(long = "city")]
        cities: Vec<String>,
        #[arg(long)]
        override_neural: bool,
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        sink: Option<String>,
        /// Write the full summary as JSON.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Write the synthetic evaluation corpus.
    SynthCorpus {
        #[arg(long, default_value_t = CORPUS_ROWS)]
        rows: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the demo feeds and optionally ingest them.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ingest: bool,
    },
    /// Serve the line protocol on stdin/stdout, echoing inputs back.
    EchoGenerator,
}

#[derive(Args)]
struct DocInput {
    /// IR file; `-` reads stdin.
    #[arg(long, conflicts_with_all = ["city", "date"])]
    ir: Option<PathBuf>,
    #[arg(long, requires = "date")]
    city: Option<String>,
    #[arg(long, requires = "city")]
    date: Option<NaiveDate>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lang {
    Pt,
    En,
}

struct Ctx {
    config: RunConfig,
    data_dir: PathBuf,
    seed: u64,
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn open_store(ctx: &Ctx) -> Result<Store> {
    Store::open(&ctx.data_dir).with_context(|| format!("opening store {}", ctx.data_dir.display()))
}

fn load_doc(ctx: &Ctx, input: &DocInput) -> Result<IntentDocument> {
    match (&input.ir, &input.city, input.date) {
        (Some(path), _, _) => Ok(parse_ir(read_input(path)?.trim())?),
        (None, Some(city), Some(date)) => Ok(select_content(
            &open_store(ctx)?,
            city,
            date,
            &ContentConfig::default(),
        )?),
        _ => bail!("give --ir, or --city with --date"),
    }
}

fn endpoint(raw: Option<&str>) -> Result<Option<Endpoint>> {
    raw.map(|s| Endpoint::parse(s).ok_or_else(|| anyhow!("bad endpoint `{s}`: expected stdio:<cmd> or http(s)://")))
        .transpose()
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx {
        data_dir: cli
            .data_dir
            .or_else(|| config.data_dir.clone())
            .unwrap_or_else(|| "data".into()),
        seed: cli.seed.or(config.seed).unwrap_or(0),
        config,
    };

    match cli.command {
        Command::Ingest { source, file } => {
            let report = ingest_feed(&file, source)?;
            let mut store = open_store(&ctx)?;
            let receipt = store.upsert(report.records)?;
            println!(
                "{source}: {} inserted, {} replaced, {} skipped",
                receipt.inserted, receipt.replaced, report.skipped
            );
        }
        Command::Analyze { city, date } => {
            let doc = select_content(&open_store(&ctx)?, &city, date, &ContentConfig::default())?;
            println!("{}", serialize_ir(&doc));
        }
        Command::Route { input, override_neural } => {
            let doc = load_doc(&ctx, &input)?;
            let engines = ctx.config.engines()?;
            let over = override_neural || ctx.config.neural_override;
            print_json(&route(&classify_criticality(&doc, &engines.rules), over))?;
        }
        Command::Generate {
            input,
            arch,
            lang,
            trace,
            endpoint: ep,
        } => {
            let doc = load_doc(&ctx, &input)?;
            let mut engines = ctx.config.engines()?;
            if let Lang::En = lang {
                engines.lexicon = Lexicon::default_en();
                engines.templates = TemplateRegistry::default_en();
            }
            let text = match arch {
                Architecture::Template => generate(&doc, &engines.templates)?.text,
                Architecture::Pipeline => {
                    let config = PipelineConfig {
                        mode: VariantMode::Seeded(ctx.seed),
                        ..engines.pipeline
                    };
                    let out = run_pipeline(&doc, &engines.lexicon, &config)?;
                    if let Some(path) = trace {
                        std::fs::write(&path, serde_json::to_string_pretty(&out.trace)?)
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    out.text
                }
                Architecture::Neural => {
                    let Some(ep) = endpoint(ep.as_deref().or(ctx.config.endpoint.as_deref()))? else {
                        bail!("--arch neural needs --endpoint");
                    };
                    let timeout = Duration::from_millis(ctx.config.generator_timeout_ms.unwrap_or(30_000));
                    let client = NeuralClient::connect(&ep, timeout)?;
                    client.generate(&GenRequest::for_document(&doc, ctx.seed))?.output
                }
            };
            println!("{text}");
        }
        Command::Evaluate {
            system,
            builtin,
            refs,
            report,
        } => {
            let rows: Vec<CorpusRow> = read_jsonl(&refs)?;
            let docs = rows
                .iter()
                .map(|r| parse_ir(&r.input_ir))
                .collect::<Result<Vec<_>, _>>()?;
            let references: Vec<Vec<String>> = rows.iter().map(|r| r.references.clone()).collect();
            let mut named: Vec<(String, Vec<String>)> = Vec::new();
            if builtin {
                let templates = TemplateRegistry::default_pt();
                let lex = Lexicon::default_pt();
                let config = PipelineConfig::default();
                named.push((
                    "template".into(),
                    docs.iter()
                        .map(|d| generate(d, &templates).map(|r| r.text))
                        .collect::<Result<_, _>>()?,
                ));
                named.push((
                    "pipeline".into(),
                    docs.iter()
                        .map(|d| run_pipeline(d, &lex, &config).map(|r| r.text))
                        .collect::<Result<_, _>>()?,
                ));
            }
            for arg in &system {
                let (name, path) = match arg.split_once('=') {
                    Some((n, p)) => (n.to_owned(), PathBuf::from(p)),
                    None => {
                        let p = PathBuf::from(arg);
                        (
                            p.file_stem()
                                .map(|s| s.to_string_lossy().into_owned())
                                .unwrap_or_default(),
                            p,
                        )
                    }
                };
                let outputs: Vec<SystemOutput> = read_jsonl(&path)?;
                let by_id: std::collections::HashMap<&str, &str> =
                    outputs.iter().map(|o| (o.id.as_str(), o.text.as_str())).collect();
                named.push((
                    name,
                    rows.iter()
                        .map(|r| by_id.get(r.id.as_str()).unwrap_or(&"").to_string())
                        .collect(),
                ));
            }
            if named.is_empty() {
                bail!("nothing to score: give --system or --builtin");
            }
            let runs: Vec<SystemRun<'_>> = named
                .iter()
                .map(|(name, outputs)| SystemRun { name, outputs })
                .collect();
            let scores = evaluate_systems(&runs, &references, &docs)?;
            print!("{}", scores.table());
            if let Some(path) = report {
                std::fs::write(&path, serde_json::to_string_pretty(&scores)?)?;
            }
        }
        Command::Split { corpus, out } => {
            let rows: Vec<CorpusRow> = read_jsonl(&corpus)?;
            let split = split_corpus(&rows, ctx.seed);
            std::fs::create_dir_all(&out)?;
            for (name, part) in [
                ("train", &split.train),
                ("validation", &split.validation),
                ("test", &split.test),
            ] {
                write_jsonl(&out.join(format!("corpus.{name}.jsonl")), part)?;
                println!("{name}: {}", part.len());
            }
        }
        Command::Bundle {
            system,
            refs,
            sample,
            raters,
            out,
        } => {
            let rows: Vec<CorpusRow> = read_jsonl(&refs)?;
            let outputs: Vec<SystemOutput> = read_jsonl(&system)?;
            let inputs: std::collections::HashMap<&str, &str> =
                rows.iter().map(|r| (r.id.as_str(), r.input_ir.as_str())).collect();
            let pairs = outputs
                .iter()
                .map(|o| {
                    let ir = inputs
                        .get(o.id.as_str())
                        .ok_or_else(|| anyhow!("{} is not in {}", o.id, refs.display()))?;
                    Ok((ir.to_string(), o.text.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            let bundle = make_human_eval_bundle(&pairs, sample, raters, ctx.seed, &out)?;
            println!(
                "{} items, {} sheets in {}",
                bundle.items.len(),
                bundle.sheets.len(),
                out.display()
            );
        }
        Command::Publish {
            input,
            sink,
            id,
            date,
            limit,
            token_env,
        } => {
            let text = read_input(&input)?;
            let id = id
                .or_else(|| {
                    input
                        .file_stem()
                        .filter(|_| input != Path::new("-"))
                        .map(|s| s.to_string_lossy().into_owned())
                })
                .unwrap_or_else(|| "report".into());
            let thread = compose_thread(&id, text.trim(), limit)?;
            let sink = Sink::from_target(&sink, &token_env)?;
            let date = date.unwrap_or_else(|| chrono::Local::now().date_naive());
            let receipt = publish(&thread, &sink, date, &RetryPolicy::default())?;
            print_json(&receipt)?;
            if !receipt.delivered() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Daily {
            date,
            cities,
            override_neural,
            endpoint: ep,
            sink,
            summary,
        } => {
            let date = date
                .or(ctx.config.date)
                .ok_or_else(|| anyhow!("daily needs --date or `date` in the config"))?;
            let sink = sink
                .or_else(|| ctx.config.sink.clone())
                .unwrap_or_else(|| format!("dry-run:{}", ctx.data_dir.join("out").display()));
            let mut config = DailyConfig::new(date, sink.parse()?);
            config.cities = if cities.is_empty() {
                ctx.config.cities.clone()
            } else {
                cities
            };
            config.seed = ctx.seed;
            config.neural_override = override_neural || ctx.config.neural_override;
            config.endpoint = endpoint(ep.as_deref().or(ctx.config.endpoint.as_deref()))?;
            if let Some(ms) = ctx.config.generator_timeout_ms {
                config.generator_timeout_ms = ms;
            }
            if let Some(limit) = ctx.config.thread_limit {
                config.thread_limit = limit;
            }
            let store = open_store(&ctx)?;
            let result = run_daily(&store, &ctx.config.engines()?, &config);
            for line in result.lines() {
                println!("{line}");
            }
            if let Some(path) = summary {
                std::fs::write(&path, serde_json::to_string_pretty(&result)?)?;
            }
            if result.cities.iter().any(|c| c.status != CityStatus::Published) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::SynthCorpus { rows, out } => {
            let corpus = synthesize_corpus(rows, cli.seed.unwrap_or(CORPUS_SEED), &Lexicon::default_pt())?;
            write_jsonl(&out, &corpus)?;
            println!("{} rows in {}", corpus.len(), out.display());
        }
        Command::Fixtures { out, ingest } => {
            let feeds = write_fixture_feeds(&out, ctx.seed)?;
            let mut store = if ingest { Some(open_store(&ctx)?) } else { None };
            for (source, path) in feeds {
                println!("{source}: {}", path.display());
                if let Some(store) = store.as_mut() {
                    store.upsert(ingest_feed(&path, source)?.records)?;
                }
            }
        }
        Command::EchoGenerator => {
            let stdin = std::io::stdin();
            serve_echo(stdin.lock(), std::io::stdout().lock())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
