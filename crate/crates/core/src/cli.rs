//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{full_table_lrs, presentation_round, SmoothingPolicy};
use crate::error::Error;
use crate::exec::Execution;
use crate::ingest::{
    parse_aggregated, parse_records_with, tally, write_aggregated, write_records, DatasetFile,
    DatasetKind, TruthTokens,
};
use crate::interpret::{hardness_adjust, posterior_probability, verbal_label, VerbalScale};
use crate::model::{ConfusionTable, StatementCategory};
use crate::report::{
    format_sig4, read_statement_csv, read_summary_csv, render_lr_table_with,
    render_statement_table, render_summary_table, IntervalSpec, OutputFormat, RenderOptions,
    ReportSpec, SummaryEntry,
};
use crate::simulate::{simulate_study, PanelProfile};
use crate::uncertainty::{
    bootstrap_interval_with, dirichlet_interval_with, zero_count_interval, Interval,
    IntervalMethod, DEFAULT_ALPHA, DEFAULT_DRAWS, DEFAULT_LEVEL, DEFAULT_REPLICATES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "expert-lr",
    version,
    about = "Likelihood ratios for categorical expert statements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tally raw evaluation records into an aggregated table
    Tally(TallyArgs),
    /// Likelihood ratio per statement of a table
    Lr(LrArgs),
    /// Render LR tables for one or more datasets
    Report(ReportArgs),
    /// Posterior probability from a prior and an LR
    Posterior(PosteriorArgs),
    /// Hardest-fraction sensitivity adjustment of an LR
    Adjust(AdjustArgs),
    /// Uncertainty interval for one statement's LR
    Interval(IntervalArgs),
    /// Simulate a study from a profile
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct TallyArgs {
    /// Raw-records CSV (`-` for stdin)
    #[arg(long = "in")]
    input: PathBuf,
    /// Aggregated CSV to write (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated category vocabulary, in output order
    #[arg(long)]
    categories: Option<String>,
    /// Accept only `same`/`different` ground-truth tokens
    #[arg(long)]
    strict_truth: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LrFormat {
    Text,
    Md,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct LrArgs {
    #[arg(long)]
    table: PathBuf,
    /// `none` or `alpha=<value>`
    #[arg(long, default_value = "none")]
    smoothing: String,
    #[arg(long, value_enum, default_value = "text")]
    format: LrFormat,
    /// Add a verbal label column (text format): `forensic`, `scientist` or a scale file
    #[arg(long)]
    verbal: Option<String>,
    /// Show infinite LRs as `∞` instead of a one-sided bound
    #[arg(long)]
    no_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Md,
    Csv,
    Json,
}

impl From<TableFormat> for OutputFormat {
    fn from(f: TableFormat) -> Self {
        match f {
            TableFormat::Md => OutputFormat::Markdown,
            TableFormat::Csv => OutputFormat::Csv,
            TableFormat::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Bootstrap,
    Dirichlet,
    Bound,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Aggregated tables (repeatable)
    #[arg(long = "table")]
    tables: Vec<PathBuf>,
    /// Published display values: `study,identification,exclusion` or `statement,lr` CSV
    #[arg(long, conflicts_with = "tables")]
    published: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "md")]
    format: TableFormat,
    #[arg(long, default_value = "none")]
    smoothing: String,
    /// Attach an interval to every statement
    #[arg(long, value_enum)]
    interval: Option<Method>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Summarise identification/exclusion: label of the identification statement
    #[arg(long, requires = "exclusion")]
    identification: Option<String>,
    /// Summarise identification/exclusion: label of the exclusion statement
    #[arg(long, requires = "identification")]
    exclusion: Option<String>,
    /// Write one file per table here instead of printing
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PosteriorArgs {
    #[arg(long)]
    prior: f64,
    #[arg(long)]
    lr: f64,
}

#[derive(Debug, Args)]
struct AdjustArgs {
    #[arg(long)]
    lr: f64,
    /// Fraction of hardest different-source comparisons retained
    #[arg(long)]
    fraction: f64,
}

#[derive(Debug, Args)]
struct IntervalArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    statement: String,
    #[arg(long, value_enum, default_value = "bootstrap")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
    /// Bootstrap replicates
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: u64,
    /// Dirichlet posterior draws
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    draws: u64,
    /// Dirichlet prior concentration per cell
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Worker threads (1 = sequential)
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: IntervalFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntervalFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// TOML profile
    #[arg(long)]
    profile: PathBuf,
    /// Raw-records CSV to write (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the profile's seed
    #[arg(long)]
    seed: Option<u64>,
}

/// Failure of a command, classified by exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidArgument(_) | Error::UnknownStatement(_) => Failure::Usage(err.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Data(err.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the CLI with `argv[0]` as the program name.
pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    run_with_stdin(argv, &mut std::io::stdin(), stdout, stderr)
}

pub fn run_with_stdin(
    argv: &[String],
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", err.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", err.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Tally(a) => cmd_tally(a, stdin, stdout),
        Command::Lr(a) => cmd_lr(a, stdout),
        Command::Report(a) => cmd_report(a, stdout),
        Command::Posterior(a) => cmd_posterior(a, stdout),
        Command::Adjust(a) => cmd_adjust(a, stdout),
        Command::Interval(a) => cmd_interval(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("cannot read `{}`: {e}", path.display())))
}

fn in_file(path: &Path, err: Error) -> Failure {
    match Failure::from(err) {
        Failure::Data(msg) => Failure::Data(format!("{}: {msg}", path.display())),
        usage => usage,
    }
}

fn load_table(path: &Path) -> Result<ConfusionTable, Failure> {
    let table = parse_aggregated(open(path)?).map_err(|e| in_file(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(table.with_study_name(name))
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Failure::Data(format!("cannot write `{}`: {e}", path.display()))),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn cmd_tally(a: TallyArgs, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CmdResult {
    let tokens = if a.strict_truth {
        TruthTokens::Strict
    } else {
        TruthTokens::WithAliases
    };
    let records = if a.input.as_os_str() == "-" {
        parse_records_with(stdin, tokens)?
    } else {
        parse_records_with(open(&a.input)?, tokens).map_err(|e| in_file(&a.input, e))?
    };
    let vocabulary = a
        .categories
        .as_deref()
        .map(|list| {
            list.split(',')
                .map(StatementCategory::new)
                .collect::<crate::Result<Vec<_>>>()
        })
        .transpose()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let table = tally(&records, vocabulary.as_deref())?;
    let mut buf = Vec::new();
    write_aggregated(&table, &mut buf)?;
    emit(a.out.as_deref(), stdout, &buf)
}

fn load_scale(spec: &str) -> Result<VerbalScale, Failure> {
    match spec {
        "forensic" => Ok(VerbalScale::forensic()),
        "scientist" => Ok(VerbalScale::scientist()),
        path => VerbalScale::load(path).map_err(|e| in_file(Path::new(path), e)),
    }
}

fn cmd_lr(a: LrArgs, stdout: &mut dyn Write) -> CmdResult {
    let smoothing: SmoothingPolicy = a.smoothing.parse()?;
    let table = load_table(&a.table)?;
    let options = RenderOptions {
        smoothing,
        zero_bound_level: if a.no_bound { None } else { Some(DEFAULT_LEVEL) },
    };
    let format = match a.format {
        LrFormat::Md => OutputFormat::Markdown,
        LrFormat::Csv => OutputFormat::Csv,
        LrFormat::Json => OutputFormat::Json,
        LrFormat::Text => {
            let scale = a.verbal.as_deref().map(load_scale).transpose()?;
            let mut out = String::new();
            for e in full_table_lrs(&table, smoothing)? {
                let lr = e.lr.value();
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}",
                    e.statement,
                    lr.map_or_else(|| "undefined".to_string(), format_sig4),
                    format_sig4(e.p_given_h1),
                    format_sig4(e.p_given_h2),
                ));
                if let (Some(scale), Some(v)) = (&scale, lr) {
                    out.push('\t');
                    out.push_str(verbal_label(v, scale).unwrap_or(""));
                }
                out.push('\n');
            }
            return emit(None, stdout, out.as_bytes());
        }
    };
    let text = render_lr_table_with(&table, &options, format)?;
    emit(None, stdout, text.as_bytes())
}

fn interval_spec(method: Method, seed: u64, level: f64) -> Result<Option<IntervalSpec>, Failure> {
    Ok(match method {
        Method::Bootstrap => Some(IntervalSpec::Bootstrap {
            replicates: DEFAULT_REPLICATES,
            level,
            seed,
        }),
        Method::Dirichlet => Some(IntervalSpec::Dirichlet {
            alpha: DEFAULT_ALPHA,
            draws: DEFAULT_DRAWS,
            level,
            seed,
        }),
        Method::Bound => {
            return Err(Failure::Usage(
                "`bound` applies to a single statement; use the interval command".into(),
            ))
        }
    })
}

fn cmd_report(a: ReportArgs, stdout: &mut dyn Write) -> CmdResult {
    let format: OutputFormat = a.format.into();
    if let Some(path) = &a.published {
        return report_published(path, format, stdout);
    }
    if a.tables.is_empty() {
        return Err(Failure::Usage("report needs --table or --published".into()));
    }
    let options = RenderOptions {
        smoothing: a.smoothing.parse()?,
        ..RenderOptions::default()
    };
    if let (Some(id), Some(excl)) = (&a.identification, &a.exclusion) {
        let entries = a
            .tables
            .iter()
            .map(|p| {
                let t = load_table(p)?;
                Ok(SummaryEntry::from_table(t.study_name(), &t, id, excl, &options)?)
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let text = render_summary_table(&entries, format)?;
        return emit(None, stdout, text.as_bytes());
    }
    let interval = a
        .interval
        .map(|m| interval_spec(m, a.seed, a.level))
        .transpose()?
        .flatten();
    for p in &a.tables {
        // surface missing or malformed files with their path before rendering
        load_table(p)?;
    }
    let spec = ReportSpec {
        datasets: a
            .tables
            .iter()
            .map(|p| DatasetFile {
                path: p.clone(),
                kind: DatasetKind::AggregatedTable,
            })
            .collect(),
        options,
        interval,
        format,
    };
    match &a.out_dir {
        Some(dir) => {
            for path in spec.write_to(dir)? {
                writeln!(stdout, "{}", path.display())?;
            }
            Ok(())
        }
        None => emit(None, stdout, spec.render()?.as_bytes()),
    }
}

fn report_published(path: &Path, format: OutputFormat, stdout: &mut dyn Write) -> CmdResult {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    let header = text
        .lines()
        .find(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .unwrap_or("");
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let rendered = match columns.as_slice() {
        ["study", "identification", "exclusion"] => {
            let entries = read_summary_csv(text.as_bytes()).map_err(|e| in_file(path, e))?;
            render_summary_table(&entries, format)?
        }
        ["statement", "lr"] => {
            let rows = read_statement_csv(text.as_bytes()).map_err(|e| in_file(path, e))?;
            render_statement_table("", &rows, format)?
        }
        _ => {
            return Err(Failure::Data(format!(
                "{}: expected header `study,identification,exclusion` or `statement,lr`",
                path.display()
            )))
        }
    };
    emit(None, stdout, rendered.as_bytes())
}

fn cmd_posterior(a: PosteriorArgs, stdout: &mut dyn Write) -> CmdResult {
    let p = posterior_probability(a.prior, a.lr)?;
    writeln!(stdout, "{}", format_sig4(p))?;
    Ok(())
}

fn cmd_adjust(a: AdjustArgs, stdout: &mut dyn Write) -> CmdResult {
    let v = hardness_adjust(a.lr, a.fraction)?;
    writeln!(stdout, "{}", format_sig4(v))?;
    Ok(())
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce(Execution) -> T + Send,
) -> Result<T, Failure> {
    match threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(1) => Ok(f(Execution::Sequential)),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Data(e.to_string()))?;
            Ok(pool.install(|| f(Execution::Parallel)))
        }
        _ => Ok(f(Execution::default())),
    }
}

fn describe_method(method: &IntervalMethod) -> String {
    match method {
        IntervalMethod::BootstrapPercentile {
            replicates,
            seed,
            generator,
        } => format!("bootstrap-percentile replicates={replicates} seed={seed} generator={generator}"),
        IntervalMethod::DirichletPosterior {
            alpha,
            draws,
            seed,
            generator,
        } => format!("dirichlet-posterior alpha={alpha} draws={draws} seed={seed} generator={generator}"),
        IntervalMethod::ZeroCountBound => "zero-count-bound".to_string(),
    }
}

fn cmd_interval(a: IntervalArgs, stdout: &mut dyn Write) -> CmdResult {
    let table = load_table(&a.table)?;
    let estimate = crate::engine::likelihood_ratio(&table, &a.statement, SmoothingPolicy::None)?;
    let interval: Interval = match a.method {
        Method::Bootstrap => with_threads(a.threads, |exec| {
            bootstrap_interval_with(&table, &a.statement, a.replicates, a.level, a.seed, exec)
        })??,
        Method::Dirichlet => with_threads(a.threads, |exec| {
            dirichlet_interval_with(&table, &a.statement, a.alpha, a.draws, a.level, a.seed, exec)
        })??,
        Method::Bound => zero_count_interval(&table, &a.statement, a.level)?,
    };
    let text = match a.format {
        IntervalFormat::Json => {
            let value = serde_json::json!({
                "statement": a.statement,
                "lr_display": presentation_round(estimate.lr).ok().map(|d| d.to_string()),
                "interval": interval,
            });
            let mut s = serde_json::to_string_pretty(&value).map_err(|e| Failure::Data(e.to_string()))?;
            s.push('\n');
            s
        }
        IntervalFormat::Text => {
            let mut s = format!(
                "statement\t{}\nlr\t{}\nlower\t{}\nupper\t{}\nlevel\t{}\nmethod\t{}\n",
                a.statement,
                estimate
                    .lr
                    .value()
                    .map_or_else(|| "undefined".to_string(), format_sig4),
                format_sig4(interval.lower),
                format_sig4(interval.upper),
                interval.level,
                describe_method(&interval.method),
            );
            if interval.undefined_draws > 0 {
                s.push_str(&format!("undefined_draws\t{}\n", interval.undefined_draws));
            }
            s
        }
    };
    emit(None, stdout, text.as_bytes())
}

fn cmd_simulate(a: SimulateArgs, stdout: &mut dyn Write) -> CmdResult {
    let mut profile = PanelProfile::load(&a.profile).map_err(|e| in_file(&a.profile, e))?;
    if let Some(seed) = a.seed {
        profile.seed = seed;
    }
    let records = simulate_study(&profile)?;
    let mut buf = Vec::new();
    write_records(&records, &mut buf)?;
    emit(a.out.as_deref(), stdout, &buf)
}
