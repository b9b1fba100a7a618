//! The `syllo` command line: one subcommand per pipeline stage, each reading
//! the previous stage's artifact and writing its own.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 endpoint
//! failure.

use crate::adapter::{self, EndpointConfig, RawResponse, RetryPolicy};
use crate::artifact::{self, ArtifactHeader, ArtifactKind};
use crate::instantiate::{build_corpus, ArgumentInstance, CorpusConfig, NegativeStrategy};
use crate::logic::{BaseScheme, SchemeId, Variant};
use crate::metrics::{self, EvalRow, ScoreConfig, UnparsedPolicy};
use crate::ontology::{IngestOptions, Ontology, ReactomeSources};
use crate::parse::classify_for;
use crate::prompts::{build_prompts, Mode, PromptRecord, Task};
use anyhow::{anyhow, bail, Context};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "syllo", version, about = "Syllogistic NLI corpus generation and evaluation", args_override_self = true)]
pub struct Cli {
    /// Settings file (JSON object or key=value lines) supplying defaults for
    /// the subcommand's flags; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load an ontology and write it as a canonical artifact.
    Ingest(IngestArgs),
    /// Build and verify the argument corpus.
    Generate(GenerateArgs),
    /// Render prompts for each instance.
    Prompt(PromptArgs),
    /// Collect model responses from an endpoint or a stored file.
    Run(RunArgs),
    /// Classify responses and compute metrics.
    Score(ScoreArgs),
    /// Write CSV, JSON and summary reports from one or more score files.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Jsonl,
    ReactomeTsv,
}

#[derive(Debug, clap::Args)]
pub struct IngestArgs {
    /// Ontology JSONL (for `--format jsonl`).
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: InputFormat,
    /// `parent_id<TAB>child_id` rows.
    #[arg(long)]
    pub relations: Option<PathBuf>,
    /// `gene_symbol<TAB>pathway_id<TAB>pathway_name` rows.
    #[arg(long)]
    pub membership: Option<PathBuf>,
    /// Optional `pathway_id<TAB>name` rows.
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// Keep only the hierarchy under this pathway id or name.
    #[arg(long)]
    pub root: Option<String>,
    /// Version tag recorded in the artifact.
    #[arg(long)]
    pub ontology_version: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-level dictionary statistics as CSV.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    /// Ingested ontology artifact, or plain ontology JSONL.
    #[arg(long)]
    pub ontology: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated scheme ids (`gmp:base`) or bases (`gmp`); default all.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Instances per polarity per scheme.
    #[arg(long, default_value_t = 200)]
    pub cap: usize,
    #[arg(long, default_value_t = 0)]
    pub min_distractors: usize,
    #[arg(long, default_value_t = crate::perturb::MAX_DISTRACTORS)]
    pub max_distractors: usize,
    #[arg(long, num_args = 0..=1, default_value = "false", default_missing_value = "true")]
    pub synthetic_names: bool,
    /// Comma-separated negative strategies, cycled per binding.
    #[arg(long, default_value = "wrapper_flip,entity_swap,pathway_swap")]
    pub strategies: String,
    /// Validation report; defaults to `<out stem>.validation.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct PromptArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated task numbers.
    #[arg(long, default_value = "1,2")]
    pub task: String,
    /// Comma-separated modes (`zs`, `fs`).
    #[arg(long, default_value = "zs,fs")]
    pub mode: String,
    /// Add a twin pair per positive instance for faithfulness scoring.
    #[arg(long, num_args = 0..=1, default_value = "true", default_missing_value = "true")]
    pub faithfulness: bool,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub prompts: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Stored `{"prompt_id", "text"}` lines instead of an endpoint.
    #[arg(long, conflicts_with = "endpoint")]
    pub offline: Option<PathBuf>,
    /// Chat-completions URL.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model name sent to the endpoint and recorded in reports.
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    pub token_env: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub max_in_flight: usize,
    #[arg(long, default_value_t = 20)]
    pub batch_size: usize,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 120)]
    pub timeout: u64,
    #[arg(long, default_value_t = RetryPolicy::default().max_attempts)]
    pub max_attempts: u32,
    #[arg(long, default_value_t = RetryPolicy::default().backoff_base_ms)]
    pub backoff_ms: u64,
    #[arg(long)]
    pub max_tokens: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UnparsedArg {
    Incorrect,
    PredictedFalse,
}

#[derive(Debug, clap::Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub prompts: PathBuf,
    #[arg(long)]
    pub responses: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// How non-compliant responses enter accuracy.
    #[arg(long, value_enum, default_value = "incorrect")]
    pub unparsed: UnparsedArg,
    /// Also write the per-response classification as JSONL.
    #[arg(long)]
    pub parsed: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Score artifacts, one per model.
    #[arg(required = true)]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    fn verification(msg: String) -> CliError {
        CliError { code: 1, error: anyhow!(msg) }
    }
    fn endpoint(error: anyhow::Error) -> CliError {
        CliError { code: 3, error }
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError { code: 2, error: e.into() }
    }
}

type CliResult = Result<(), CliError>;

/// Runs one invocation; messages go to `out`, errors to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            e.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Ingest(a) => cmd_ingest(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Prompt(a) => cmd_prompt(&a, out),
        Command::Run(a) => cmd_run(&a, out),
        Command::Score(a) => cmd_score(&a, out),
        Command::Report(a) => cmd_report(&a, out),
    }
}

fn config_values(text: &str) -> anyhow::Result<Vec<(String, String)>> {
    if text.trim_start().starts_with('{') {
        let map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text).context("config is not a JSON object")?;
        return map
            .into_iter()
            .map(|(k, v)| {
                let s = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Array(items) => items
                        .iter()
                        .map(|i| i.as_str().map(str::to_string).unwrap_or_else(|| i.to_string()))
                        .collect::<Vec<_>>()
                        .join(","),
                    serde_json::Value::Null => bail!("config key `{k}` is null"),
                    other => other.to_string(),
                };
                Ok((k, s))
            })
            .collect();
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Inserts the config file's settings as flags right after the subcommand
/// name, so that later command-line flags override them.
fn expand_config(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        let s = a.to_string_lossy();
        if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if s == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read config {}", path.display()))?;
    let values = config_values(&text).with_context(|| format!("in {}", path.display()))?;

    let cmd = Cli::command();
    let subs: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let Some(pos) = args.iter().position(|a| subs.iter().any(|s| a.to_str() == Some(s))) else {
        return Ok(args);
    };
    let sub = cmd.find_subcommand(args[pos].to_str().expect("matched a name")).expect("known subcommand");
    let longs = |c: &clap::Command| c.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect::<Vec<_>>();
    let here = longs(sub);
    let anywhere: Vec<String> = cmd.get_subcommands().flat_map(longs).collect();

    let mut inserted = Vec::new();
    for (key, value) in values {
        let flag = key.replace('_', "-");
        if flag == "config" {
            continue;
        }
        if here.contains(&flag) {
            inserted.push(OsString::from(format!("--{flag}={value}")));
        } else if !anywhere.contains(&flag) {
            bail!("{}: unknown setting `{key}`", path.display());
        }
    }
    let mut out = args[..=pos].to_vec();
    out.extend(inserted);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_schemes(s: Option<&str>) -> anyhow::Result<Vec<SchemeId>> {
    let Some(s) = s else { return Ok(SchemeId::all().collect()) };
    let mut out = Vec::new();
    for item in split_list(s) {
        if item == "all" {
            out.extend(SchemeId::all());
        } else if let Some(b) = BaseScheme::from_key(item) {
            out.extend(Variant::ALL.into_iter().map(|v| SchemeId::new(b, v)));
        } else {
            out.push(item.parse().map_err(|e: String| anyhow!(e))?);
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|s| seen.insert(*s));
    if out.is_empty() {
        bail!("--schemes selects no scheme");
    }
    Ok(out)
}

fn parse_strategies(s: &str) -> anyhow::Result<Vec<NegativeStrategy>> {
    split_list(s)
        .map(|k| match NegativeStrategy::from_key(k) {
            Some(NegativeStrategy::None) | None => Err(anyhow!("unknown negative strategy `{k}`")),
            Some(x) => Ok(x),
        })
        .collect()
}

fn parse_tasks(s: &str) -> anyhow::Result<Vec<Task>> {
    let out: Vec<Task> = split_list(s)
        .map(|t| {
            let n = t.trim_start_matches("task").parse::<u8>().ok();
            n.and_then(Task::from_number).ok_or_else(|| anyhow!("unknown task `{t}`"))
        })
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        bail!("--task selects no task");
    }
    Ok(out)
}

fn parse_modes(s: &str) -> anyhow::Result<Vec<Mode>> {
    let out: Vec<Mode> = split_list(s)
        .map(|m| Mode::from_key(m).ok_or_else(|| anyhow!("unknown mode `{m}`")))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        bail!("--mode selects no mode");
    }
    Ok(out)
}

#[derive(Serialize)]
struct IngestSettings<'a> {
    format: &'a str,
    root: Option<&'a str>,
    version: Option<&'a str>,
}

fn cmd_ingest(a: &IngestArgs, out: &mut dyn Write) -> CliResult {
    let opts = IngestOptions {
        root: a.root.clone(),
        version: a.ontology_version.clone(),
    };
    let (ontology, report, inputs) = match a.format {
        InputFormat::Jsonl => {
            let input = a.input.as_ref().ok_or_else(|| anyhow!("--format jsonl needs an input file"))?;
            let text = artifact::read_file(input)?;
            let (o, r) = Ontology::ingest_jsonl(&text, &opts).with_context(|| input.display().to_string())?;
            (o, r, vec![artifact::sha256_hex(text.as_bytes())])
        }
        InputFormat::ReactomeTsv => {
            let (Some(relations), Some(membership)) = (&a.relations, &a.membership) else {
                return Err(anyhow!("--format reactome-tsv needs --relations and --membership").into());
            };
            let mut inputs = Vec::new();
            for p in [Some(relations), Some(membership), a.names.as_ref()].into_iter().flatten() {
                inputs.push(artifact::sha256_hex(artifact::read_file(p)?.as_bytes()));
            }
            let sources = ReactomeSources {
                relations: relations.clone(),
                membership: membership.clone(),
                names: a.names.clone(),
            };
            let (o, r) = Ontology::load_reactome(&sources, &opts)?;
            (o, r, inputs)
        }
    };
    let settings = IngestSettings {
        format: match a.format {
            InputFormat::Jsonl => "jsonl",
            InputFormat::ReactomeTsv => "reactome-tsv",
        },
        root: a.root.as_deref(),
        version: a.ontology_version.as_deref(),
    };
    let header = ArtifactHeader::new(ArtifactKind::Ontology, &settings, inputs).with_meta("ontology_version", ontology.version());
    let text = format!("{}{}", artifact::render::<()>(&header, &[]), ontology.to_jsonl());
    artifact::write_raw(&a.out, &text)?;

    let stats = ontology.dictionary_stats();
    let mut csv = String::from("level,unique_pathway_names,unique_genes\n");
    for s in &stats {
        csv.push_str(&format!("{},{},{}\n", s.level, s.unique_pathway_names, s.unique_genes));
    }
    if let Some(p) = &a.stats {
        artifact::write_raw(p, &csv)?;
    }
    writeln!(
        out,
        "ingested {} pathways, {} genes, {} memberships ({} duplicate rows)",
        report.unfiltered.pathways, report.unfiltered.genes, report.unfiltered.memberships, report.duplicate_rows
    )?;
    if let Some(f) = &report.filtered {
        writeln!(out, "kept {} pathways, {} genes, {} memberships", f.pathways, f.genes, f.memberships)?;
    }
    writeln!(out, "{:>5}  {:>22}  {:>12}", "level", "unique pathway names", "unique genes")?;
    for s in &stats {
        writeln!(out, "{:>5}  {:>22}  {:>12}", s.level, s.unique_pathway_names, s.unique_genes)?;
    }
    Ok(())
}

/// An ingested artifact, or plain ontology JSONL.
fn load_ontology(path: &Path) -> anyhow::Result<(Ontology, String)> {
    let text = artifact::read_file(path)?;
    let sha = artifact::sha256_hex(text.as_bytes());
    let body = match artifact::split_header(&text) {
        Some((h, body)) => {
            artifact::check_header(path, &h, ArtifactKind::Ontology)?;
            body
        }
        None => text.as_str(),
    };
    let o = Ontology::from_jsonl_str(body).with_context(|| path.display().to_string())?;
    Ok((o, sha))
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> CliResult {
    if a.min_distractors > a.max_distractors {
        return Err(anyhow!("--min-distractors exceeds --max-distractors").into());
    }
    if a.max_distractors > crate::perturb::MAX_DISTRACTORS {
        return Err(anyhow!("--max-distractors is at most {}", crate::perturb::MAX_DISTRACTORS).into());
    }
    let cfg = CorpusConfig {
        schemes: parse_schemes(a.schemes.as_deref())?,
        cap: a.cap,
        min_distractors: a.min_distractors,
        max_distractors: a.max_distractors,
        seed: a.seed,
        synthetic_names: a.synthetic_names,
        strategies: parse_strategies(&a.strategies)?,
    };
    let (ontology, sha) = load_ontology(&a.ontology)?;
    let corpus = build_corpus(&ontology, &cfg)?;
    let header = ArtifactHeader::new(ArtifactKind::Corpus, &cfg, vec![sha]).with_meta("ontology_version", ontology.version());
    let corpus_sha = artifact::write(&a.out, &header, &corpus.instances)?;

    let report_path = a.report.clone().unwrap_or_else(|| a.out.with_extension("validation.json"));
    let mut report = serde_json::to_string_pretty(&serde_json::json!({
        "corpus_sha256": corpus_sha,
        "instances": corpus.instances.len(),
        "failures": corpus.failures(),
        "schemes": corpus.summaries,
    }))
    .expect("summary serializes");
    report.push('\n');
    artifact::write_raw(&report_path, &report)?;

    writeln!(out, "{:<16} {:>8} {:>9} {:>9} {:>8}", "scheme", "bindings", "positives", "negatives", "failures")?;
    for s in &corpus.summaries {
        let id = s.scheme.map(|x| x.to_string()).unwrap_or_default();
        writeln!(out, "{id:<16} {:>8} {:>9} {:>9} {:>8}", s.bindings, s.positives, s.negatives, s.failures)?;
        if s.bindings == 0 {
            writeln!(out, "  note: {id} has no sound binding in this ontology")?;
        }
    }
    writeln!(out, "{} instances, sha256 {corpus_sha}", corpus.instances.len())?;
    match corpus.failures() {
        0 => Ok(()),
        n => Err(CliError::verification(format!("{n} instance(s) failed verification; see {}", report_path.display()))),
    }
}

#[derive(Serialize)]
struct PromptSettings {
    tasks: Vec<Task>,
    modes: Vec<Mode>,
    faithfulness: bool,
}

fn cmd_prompt(a: &PromptArgs, out: &mut dyn Write) -> CliResult {
    let settings = PromptSettings {
        tasks: parse_tasks(&a.task)?,
        modes: parse_modes(&a.mode)?,
        faithfulness: a.faithfulness,
    };
    let corpus = artifact::read::<ArgumentInstance>(&a.corpus, ArtifactKind::Corpus)?;
    let prompts = build_prompts(&corpus.records, &settings.tasks, &settings.modes, settings.faithfulness);
    let header = ArtifactHeader::new(ArtifactKind::Prompts, &settings, vec![corpus.sha256]);
    artifact::write(&a.out, &header, &prompts)?;
    writeln!(out, "{} prompts from {} instances", prompts.len(), corpus.records.len())?;
    Ok(())
}

#[derive(Serialize)]
struct RunSettings<'a> {
    model: &'a str,
    source: &'a str,
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> CliResult {
    let prompts = artifact::read::<PromptRecord>(&a.prompts, ArtifactKind::Prompts)?;
    let mut upstream = vec![prompts.sha256.clone()];
    let (responses, model, source) = match (&a.offline, &a.endpoint) {
        (Some(path), _) => {
            upstream.push(artifact::sha256_hex(artifact::read_file(path)?.as_bytes()));
            let r = adapter::replay_offline(&prompts.records, path).with_context(|| path.display().to_string())?;
            (r, a.model.clone().unwrap_or_else(|| "offline".into()), "offline")
        }
        (None, Some(url)) => {
            let model = a.model.clone().ok_or_else(|| anyhow!("--endpoint needs --model"))?;
            let cfg = EndpointConfig {
                base_url: url.clone(),
                model_name: model.clone(),
                auth_token_env: a.token_env.clone(),
                max_in_flight: a.max_in_flight,
                batch_size: a.batch_size,
                timeout_secs: a.timeout,
                retry: RetryPolicy {
                    max_attempts: a.max_attempts,
                    backoff_base_ms: a.backoff_ms,
                },
                max_tokens: a.max_tokens,
            };
            let r = adapter::run_batch(&prompts.records, &cfg)?;
            (r, model, "endpoint")
        }
        (None, None) => return Err(anyhow!("give --offline FILE or --endpoint URL").into()),
    };
    let settings = RunSettings { model: &model, source };
    let header = ArtifactHeader::new(ArtifactKind::Responses, &settings, upstream).with_meta("model", &model);
    artifact::write(&a.out, &header, &responses)?;
    let failed = responses.iter().filter(|r| r.error.is_some()).count();
    writeln!(out, "{} responses for model {model} ({failed} without a completion)", responses.len())?;
    if source == "endpoint" && failed > 0 && failed == responses.len() {
        return Err(CliError::endpoint(anyhow!("every request to the endpoint failed")));
    }
    Ok(())
}

fn cmd_score(a: &ScoreArgs, out: &mut dyn Write) -> CliResult {
    let prompts = artifact::read::<PromptRecord>(&a.prompts, ArtifactKind::Prompts)?;
    let responses = artifact::read::<RawResponse>(&a.responses, ArtifactKind::Responses)?;
    if responses.header.upstream.first() != Some(&prompts.sha256) {
        return Err(anyhow!(
            "{} was not produced from {}",
            a.responses.display(),
            a.prompts.display()
        )
        .into());
    }
    let model = responses.header.meta.get("model").cloned().unwrap_or_default();
    let by_id: HashMap<&str, &PromptRecord> = prompts.records.iter().map(|p| (p.prompt_id.as_str(), p)).collect();
    let parsed = responses
        .records
        .iter()
        .map(|r| {
            let p = by_id
                .get(r.prompt_id.as_str())
                .ok_or_else(|| anyhow!("response for unknown prompt {}", r.prompt_id))?;
            Ok(classify_for(p, &r.text))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let cfg = ScoreConfig {
        unparsed: match a.unparsed {
            UnparsedArg::Incorrect => UnparsedPolicy::Incorrect,
            UnparsedArg::PredictedFalse => UnparsedPolicy::PredictedFalse,
        },
    };
    let rows = metrics::evaluate(&model, &prompts.records, &parsed, &cfg)?;
    let upstream = vec![prompts.sha256.clone(), responses.sha256.clone()];
    if let Some(p) = &a.parsed {
        let h = ArtifactHeader::new(ArtifactKind::Scores, &cfg, upstream.clone()).with_meta("model", &model).with_meta("content", "parsed");
        artifact::write(p, &h, &parsed)?;
    }
    let header = ArtifactHeader::new(ArtifactKind::Scores, &cfg, upstream).with_meta("model", &model);
    artifact::write(&a.out, &header, &rows)?;
    let overall: Vec<EvalRow> = rows.iter().filter(|r| r.scheme == metrics::ALL && r.variant == metrics::ALL && r.n_distractors == metrics::ALL).cloned().collect();
    write!(out, "{}", metrics::summary_table(&overall))?;
    Ok(())
}

fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> CliResult {
    let mut rows = Vec::new();
    let mut models: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in &a.scores {
        let l = artifact::read::<EvalRow>(path, ArtifactKind::Scores)?;
        if l.header.meta.contains_key("content") {
            return Err(anyhow!("{} holds parsed responses, not scores", path.display()).into());
        }
        let model = l.header.meta.get("model").cloned().unwrap_or_default();
        if let Some(prev) = models.insert(model.clone(), path.clone()) {
            return Err(anyhow!("model `{model}` appears in both {} and {}", prev.display(), path.display()).into());
        }
        rows.extend(l.records);
    }
    let files = metrics::emit_report(&rows, &a.out_dir)?;
    write!(out, "{}", metrics::summary_table(&rows))?;
    writeln!(out, "wrote {}, {}, {}", files.csv.display(), files.json.display(), files.summary.display())?;
    Ok(())
}
