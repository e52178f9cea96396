use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use toponym::evalkit::{bundled_gold, evaluate, load_gold, time_extractor, MatchRule};
use toponym::extract::GraphSource;
use toponym::pipeline::{extract_locations, load_gazetteer, Mode, PipelineConfig, ResourcePaths, Resources};
use toponym::store::{parse_batch, Store, StoreConfig};
use toponym::gazetteer::LoadOptions;
use toponym::{RawTweet, Source};
use toponym_cli::output::{render_table, EvalRow, ResultRecord};

#[derive(Parser)]
#[command(name = "toponym", version, about = "Find place names in tweets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract locations from tweet records (JSON lines or a JSON array).
    Extract {
        /// Input file; `-` reads standard input.
        #[arg(short, long, default_value = "-")]
        input: String,
        /// Output file; `-` writes standard output.
        #[arg(short, long, default_value = "-")]
        output: String,
        #[command(flatten)]
        resources: ResourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Score extractors against an annotated corpus.
    Eval {
        /// Gold corpus (JSON lines with id, text, created_at, gold). Defaults
        /// to the bundled corpus.
        #[arg(long, env = "TOPONYM_CORPUS")]
        corpus: Option<PathBuf>,
        /// `names` also accepts the resolved entry's names; `exact` does not.
        #[arg(long = "match", default_value = "names")]
        match_rule: MatchRule,
        /// Evaluate GEOLOC, UNILOC and BILOC side by side.
        #[arg(long)]
        compare: bool,
        /// Timing repeats; the fastest run is reported.
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Write a JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        resources: ResourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Serve the ingestion and query API.
    Serve {
        #[arg(long, env = "TOPONYM_BIND", default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, env = "TOPONYM_PORT", default_value_t = 8080)]
        port: u16,
        #[command(flatten)]
        store: StoreArgs,
        #[command(flatten)]
        resources: ResourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Append tweet records from a file to a store.
    Ingest {
        /// Input file; `-` reads standard input.
        #[arg(short, long, default_value = "-")]
        input: String,
        #[command(flatten)]
        store: StoreArgs,
        #[command(flatten)]
        resources: ResourceArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Turn a GeoNames dump into an index snapshot.
    BuildIndex {
        /// GeoNames dump (19 tab-separated columns).
        #[arg(long, env = "TOPONYM_GAZETTEER")]
        gazetteer: PathBuf,
        /// Keep only rows with this country code; empty keeps all.
        #[arg(long, default_value = "IN")]
        country: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct ResourceArgs {
    /// GeoNames dump or index snapshot; bundled India slice if absent.
    #[arg(long, env = "TOPONYM_GAZETTEER")]
    gazetteer: Option<PathBuf>,
    /// Country code applied when reading a GeoNames dump; empty keeps all.
    #[arg(long, env = "TOPONYM_COUNTRY", default_value = "IN")]
    country: String,
    /// Unigram frequency model (word<TAB>count).
    #[arg(long, env = "TOPONYM_MODEL")]
    model: Option<PathBuf>,
    /// CoNLL-U parses keyed by `# tweet_id`.
    #[arg(long, env = "TOPONYM_PARSES")]
    parses: Option<PathBuf>,
    /// Common-word list used by the ambiguity guard.
    #[arg(long, env = "TOPONYM_COMMON_WORDS")]
    common_words: Option<PathBuf>,
    #[arg(long, env = "TOPONYM_SUFFIXES")]
    suffixes: Option<PathBuf>,
    #[arg(long, env = "TOPONYM_EMERGENCIES")]
    emergencies: Option<PathBuf>,
}

impl ResourceArgs {
    fn load(&self) -> Result<Resources> {
        let paths = ResourcePaths {
            gazetteer: self.gazetteer.clone(),
            unigrams: self.model.clone(),
            parses: self.parses.clone(),
            common_words: self.common_words.clone(),
            suffixes: self.suffixes.clone(),
            emergencies: self.emergencies.clone(),
            country: Some(self.country.clone()).filter(|c| !c.is_empty()),
        };
        Ok(Resources::load(&paths)?)
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// geoloc, uniloc or biloc.
    #[arg(long, default_value = "geoloc")]
    mode: Mode,
    /// Jaro-Winkler threshold for fuzzy suffix cues.
    #[arg(long, default_value_t = toponym::extract::DEFAULT_JW_THRESHOLD)]
    jw: f64,
    /// Largest dependency distance from an emergency word.
    #[arg(long, default_value_t = toponym::extract::DEFAULT_MAX_DEP_DISTANCE)]
    dmax: usize,
    /// Accept lowercase common words without a cue.
    #[arg(long)]
    no_guard: bool,
    /// Ignore supplied parses and use token distance.
    #[arg(long)]
    window_graph: bool,
    /// Comma-separated candidate sources, e.g. PROPER_CHUNK,SUFFIX_MATCH.
    #[arg(long, value_delimiter = ',')]
    sources: Vec<String>,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut enabled_sources: BTreeSet<Source> = Source::ALL.into_iter().collect();
        if !self.sources.is_empty() {
            enabled_sources = self
                .sources
                .iter()
                .map(|s| {
                    serde_json::from_value(serde_json::Value::String(s.trim().to_uppercase()))
                        .with_context(|| format!("unknown source `{s}`"))
                })
                .collect::<Result<_>>()?;
        }
        let cfg = PipelineConfig {
            jw_threshold: self.jw,
            max_dep_distance: self.dmax,
            guard_enabled: !self.no_guard,
            dependency_source: if self.window_graph {
                GraphSource::TokenWindowFallback
            } else {
                GraphSource::Supplied
            },
            enabled_sources,
            mode: self.mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct StoreArgs {
    /// Append-only store log.
    #[arg(long, env = "TOPONYM_STORE", default_value = "toponym-store.jsonl")]
    store: PathBuf,
    /// Drop tweets whose share of known English words is below this.
    #[arg(long, env = "TOPONYM_ENGLISH_MIN")]
    english_min: Option<f64>,
}

impl StoreArgs {
    fn open(&self, resources: Resources, pipeline: PipelineConfig) -> Result<Store> {
        let config = StoreConfig {
            pipeline,
            english_min_fraction: self.english_min,
        };
        Store::open(&self.store, Arc::new(resources), config)
            .with_context(|| format!("opening store {}", self.store.display()))
    }
}

fn read_input(input: &str) -> Result<String> {
    let mut text = String::new();
    if input == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(input)
            .with_context(|| format!("opening {input}"))?
            .read_to_string(&mut text)?;
    }
    Ok(text)
}

fn run_extract(input: &str, output: &str, res: &Resources, cfg: &PipelineConfig) -> Result<()> {
    let text = read_input(input)?;
    let mut out: Box<dyn Write> = if output == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(output).with_context(|| format!("creating {output}"))?))
    };
    let mut bad = 0;
    for item in parse_batch(&text) {
        let tweet: RawTweet = match item {
            Ok(t) => t,
            Err(e) => {
                log::error!("skipping record: {e}");
                bad += 1;
                continue;
            }
        };
        let result = extract_locations(&tweet, cfg, res)?;
        serde_json::to_writer(&mut out, &ResultRecord::from(&result))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    if bad > 0 {
        eprintln!("{bad} malformed record(s) skipped");
    }
    Ok(())
}

fn run_eval(
    corpus: Option<&Path>,
    rule: MatchRule,
    compare: bool,
    repeats: usize,
    report: Option<&Path>,
    res: &Resources,
    cfg: &PipelineConfig,
) -> Result<()> {
    let gold = match corpus {
        Some(p) => load_gold(BufReader::new(File::open(p).with_context(|| format!("opening {}", p.display()))?))?,
        None => bundled_gold(),
    };
    let modes = if compare {
        vec![Mode::Geoloc, Mode::Uniloc, Mode::Biloc]
    } else {
        vec![cfg.mode]
    };
    let tweets: Vec<RawTweet> = gold.iter().map(|g| g.tweet.clone()).collect();
    let mut rows = Vec::new();
    for mode in modes {
        let cfg = PipelineConfig { mode, ..cfg.clone() };
        let extractor = |t: &RawTweet| extract_locations(t, &cfg, res);
        let scores = evaluate(&gold, extractor, rule, &res.gazetteer)?;
        let timing = time_extractor(&tweets, extractor, repeats)?;
        rows.push(EvalRow {
            method: format!("{mode:?}").to_uppercase(),
            precision: scores.precision,
            recall: scores.recall,
            f_score: scores.f_score,
            timing_secs: timing.total.as_secs_f64(),
            report: Some(scores),
        });
    }
    print!("{}", render_table(&rows));
    println!("{} tweets, match rule {rule:?}", gold.len());
    if let Some(path) = report {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &rows)?;
    }
    Ok(())
}

async fn run_serve(addr: SocketAddr, store: Store) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, toponym_cli::service::router(Arc::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Extract {
            input,
            output,
            resources,
            pipeline,
        } => {
            let cfg = pipeline.config()?;
            run_extract(&input, &output, &resources.load()?, &cfg)
        }
        Command::Eval {
            corpus,
            match_rule,
            compare,
            repeats,
            report,
            resources,
            pipeline,
        } => {
            let cfg = pipeline.config()?;
            let res = resources.load()?;
            run_eval(corpus.as_deref(), match_rule, compare, repeats, report.as_deref(), &res, &cfg)
        }
        Command::Serve {
            bind,
            port,
            store,
            resources,
            pipeline,
        } => {
            let cfg = pipeline.config()?;
            let store = store.open(resources.load()?, cfg)?;
            let addr: SocketAddr = format!("{bind}:{port}")
                .parse()
                .with_context(|| format!("bad address {bind}:{port}"))?;
            tokio::runtime::Runtime::new()?.block_on(run_serve(addr, store))
        }
        Command::Ingest {
            input,
            store,
            resources,
            pipeline,
        } => {
            let cfg = pipeline.config()?;
            let store = store.open(resources.load()?, cfg)?;
            let report = store.ingest(parse_batch(&read_input(&input)?))?;
            println!("{}", serde_json::to_string(&report)?);
            Ok(())
        }
        Command::BuildIndex {
            gazetteer,
            country,
            output,
        } => {
            let options = LoadOptions {
                country: Some(country).filter(|c| !c.is_empty()),
                bbox: None,
            };
            let index = load_gazetteer(&gazetteer, &options)?;
            if index.entry_count() == 0 {
                bail!("{} yielded no entries", gazetteer.display());
            }
            let file = File::create(&output).with_context(|| format!("creating {}", output.display()))?;
            index.save_snapshot(BufWriter::new(file))?;
            eprintln!(
                "{} entries, {} names, {} rows skipped",
                index.entry_count(),
                index.name_count(),
                index.skipped_rows()
            );
            Ok(())
        }
    }
}

