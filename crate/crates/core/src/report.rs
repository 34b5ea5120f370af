//! Markdown, CSV and JSON rendering of LR tables.
//!
//! Display strings from [`presentation_round`] are the contract for Markdown and
//! CSV. JSON carries the display string and the unrounded value side by side.
//!
//! JSON schema of one statement entry:
//!
//! | key          | type                          |
//! |--------------|-------------------------------|
//! | `statement`  | string                        |
//! | `lr`         | number, or `"inf"`            |
//! | `lr_display` | string                        |
//! | `p_h1`       | number                        |
//! | `p_h2`       | number                        |
//! | `interval`   | optional [`Interval`] object  |

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{full_table_lrs, presentation_round_bounded, LrDisplay, SmoothingPolicy};
use crate::error::{Error, Result};
use crate::ingest::DatasetFile;
use crate::model::{ConfusionTable, GroundTruth, Lr, LrEstimate};
use crate::uncertainty::{
    bootstrap_interval, dirichlet_interval, zero_count_lower_bound, Interval, DEFAULT_LEVEL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Markdown,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Markdown => "md",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format `{other}` (expected md, csv or json)"
            ))),
        }
    }
}

/// Formats a number with 4 significant digits, trailing zeros trimmed.
pub fn format_sig4(x: f64) -> String {
    if x.is_nan() {
        return "undefined".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99995 -> 10.0000)
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 && (rounded.abs().log10().floor() as i32) > magnitude && decimals > 0 {
        s = format!("{x:.prec$}", prec = decimals - 1);
    }
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        s = trimmed.to_string();
    }
    s
}

/// How an LR table is computed before rendering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub smoothing: SmoothingPolicy,
    /// Level of the one-sided bound shown for infinite LRs (`"> bound"`);
    /// `None` renders them as `"∞"`.
    pub zero_bound_level: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            smoothing: SmoothingPolicy::None,
            zero_bound_level: Some(DEFAULT_LEVEL),
        }
    }
}

/// Interval method requested for a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalSpec {
    Bootstrap { replicates: u64, level: f64, seed: u64 },
    Dirichlet { alpha: f64, draws: u64, level: f64, seed: u64 },
}

impl IntervalSpec {
    pub fn compute(&self, table: &ConfusionTable, statement: &str) -> Result<Interval> {
        match *self {
            IntervalSpec::Bootstrap {
                replicates,
                level,
                seed,
            } => bootstrap_interval(table, statement, replicates, level, seed),
            IntervalSpec::Dirichlet {
                alpha,
                draws,
                level,
                seed,
            } => dirichlet_interval(table, statement, alpha, draws, level, seed),
        }
    }

    fn level(&self) -> f64 {
        match *self {
            IntervalSpec::Bootstrap { level, .. } | IntervalSpec::Dirichlet { level, .. } => level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementRow {
    pub statement: String,
    #[serde(with = "crate::serde_ext")]
    pub lr: f64,
    pub lr_display: String,
    pub p_h1: f64,
    pub p_h2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
}

/// All per-statement results for one table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrReport {
    pub study: String,
    pub smoothing: String,
    pub statements: Vec<StatementRow>,
}

fn display_for(table: &ConfusionTable, e: &LrEstimate, options: &RenderOptions) -> Result<LrDisplay> {
    let bound = match (e.lr, options.zero_bound_level, options.smoothing) {
        (Lr::Infinite, Some(level), SmoothingPolicy::None) => {
            Some(zero_count_lower_bound(table, e.statement.as_str(), level)?)
        }
        _ => None,
    };
    presentation_round_bounded(e.lr, bound)
}

impl LrReport {
    pub fn build(table: &ConfusionTable, options: &RenderOptions) -> Result<Self> {
        let estimates = full_table_lrs(table, options.smoothing)?;
        let statements = estimates
            .iter()
            .map(|e| {
                let lr = e.lr.value().ok_or(Error::UndefinedLr)?;
                Ok(StatementRow {
                    statement: e.statement.to_string(),
                    lr,
                    lr_display: display_for(table, e, options)?.to_string(),
                    p_h1: e.p_given_h1,
                    p_h2: e.p_given_h2,
                    interval: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LrReport {
            study: table.study_name().to_string(),
            smoothing: options.smoothing.to_string(),
            statements,
        })
    }

    pub fn with_intervals(mut self, table: &ConfusionTable, spec: &IntervalSpec) -> Result<Self> {
        for row in &mut self.statements {
            row.interval = Some(spec.compute(table, &row.statement)?);
        }
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        let labels: Vec<&str> = self.statements.iter().map(|r| r.statement.as_str()).collect();
        let displays: Vec<&str> = self.statements.iter().map(|r| r.lr_display.as_str()).collect();
        let interval_row: Option<(String, Vec<String>)> = self
            .statements
            .first()
            .and_then(|r| r.interval.as_ref())
            .map(|iv| {
                let name = format!("{}% interval", format_sig4(iv.level * 100.0));
                let cells = self
                    .statements
                    .iter()
                    .map(|r| match &r.interval {
                        Some(iv) => format!("[{}, {}]", format_sig4(iv.lower), format_sig4(iv.upper)),
                        None => String::new(),
                    })
                    .collect();
                (name, cells)
            });
        match format {
            OutputFormat::Markdown => {
                let mut rows = vec![("LR".to_string(), displays.iter().map(|s| s.to_string()).collect())];
                rows.extend(interval_row);
                Ok(markdown_wide("", &labels, &rows))
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let mut header = vec![""];
                header.extend(&labels);
                w.write_record(&header)?;
                let mut row = vec!["LR"];
                row.extend(&displays);
                w.write_record(&row)?;
                if let Some((name, cells)) = &interval_row {
                    let mut row = vec![name.as_str()];
                    row.extend(cells.iter().map(String::as_str));
                    w.write_record(&row)?;
                }
                finish_csv(w)
            }
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|")
}

fn markdown_row<'a>(cells: impl IntoIterator<Item = &'a str>) -> String {
    let mut line = String::from("|");
    for c in cells {
        line.push(' ');
        line.push_str(&md_cell(c));
        line.push_str(" |");
    }
    line.push('\n');
    line
}

fn markdown_rule(columns: usize) -> String {
    let mut line = String::from("|");
    for _ in 0..columns {
        line.push_str("---|");
    }
    line.push('\n');
    line
}

/// Header row of category labels, then one row per `(name, cells)`.
fn markdown_wide(corner: &str, labels: &[&str], rows: &[(String, Vec<String>)]) -> String {
    let mut out = markdown_row(std::iter::once(corner).chain(labels.iter().copied()));
    out.push_str(&markdown_rule(labels.len() + 1));
    for (name, cells) in rows {
        out.push_str(&markdown_row(
            std::iter::once(name.as_str()).chain(cells.iter().map(String::as_str)),
        ));
    }
    out
}

fn markdown_tall(header: &[&str], rows: &[Vec<&str>]) -> String {
    let mut out = markdown_row(header.iter().copied());
    out.push_str(&markdown_rule(header.len()));
    for row in rows {
        out.push_str(&markdown_row(row.iter().copied()));
    }
    out
}

/// One column per category, one row of display LRs.
pub fn render_lr_table(table: &ConfusionTable, format: OutputFormat) -> Result<String> {
    render_lr_table_with(table, &RenderOptions::default(), format)
}

pub fn render_lr_table_with(
    table: &ConfusionTable,
    options: &RenderOptions,
    format: OutputFormat,
) -> Result<String> {
    LrReport::build(table, options)?.render(format)
}

/// One line of an identification/exclusion summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryEntry {
    pub study: String,
    pub identification: LrDisplay,
    pub exclusion: LrDisplay,
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    study: &'a str,
    identification: &'a str,
    exclusion: &'a str,
}

impl SummaryEntry {
    /// Computes the entry from counts, using the given identification and
    /// exclusion labels.
    pub fn from_table(
        study: impl Into<String>,
        table: &ConfusionTable,
        identification: &str,
        exclusion: &str,
        options: &RenderOptions,
    ) -> Result<Self> {
        let estimates = full_table_lrs(table, options.smoothing)?;
        let pick = |label: &str| -> Result<LrDisplay> {
            let e = estimates
                .iter()
                .find(|e| e.statement.as_str() == label)
                .ok_or_else(|| Error::UnknownStatement(label.to_string()))?;
            display_for(table, e, options)
        };
        Ok(SummaryEntry {
            study: study.into(),
            identification: pick(identification)?,
            exclusion: pick(exclusion)?,
        })
    }
}

/// Identification/exclusion summary, rows in the caller's order.
pub fn render_summary_table(entries: &[SummaryEntry], format: OutputFormat) -> Result<String> {
    const HEADER: [&str; 3] = ["", "LR (identification)", "LR (exclusion)"];
    match format {
        OutputFormat::Markdown => {
            let rows: Vec<Vec<&str>> = entries
                .iter()
                .map(|e| vec![e.study.as_str(), e.identification.as_str(), e.exclusion.as_str()])
                .collect();
            Ok(markdown_tall(&HEADER, &rows))
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["study", "identification", "exclusion"])?;
            for e in entries {
                w.write_record([e.study.as_str(), e.identification.as_str(), e.exclusion.as_str()])?;
            }
            finish_csv(w)
        }
        OutputFormat::Json => {
            let rows: Vec<SummaryJson> = entries
                .iter()
                .map(|e| SummaryJson {
                    study: &e.study,
                    identification: e.identification.as_str(),
                    exclusion: e.exclusion.as_str(),
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Two-column statement/LR table, for studies published without counts.
pub fn render_statement_table(
    corner: &str,
    rows: &[(String, LrDisplay)],
    format: OutputFormat,
) -> Result<String> {
    match format {
        OutputFormat::Markdown => {
            let body: Vec<Vec<&str>> = rows
                .iter()
                .map(|(s, d)| vec![s.as_str(), d.as_str()])
                .collect();
            Ok(markdown_tall(&[corner, "LR"], &body))
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["statement", "lr"])?;
            for (s, d) in rows {
                w.write_record([s.as_str(), d.as_str()])?;
            }
            finish_csv(w)
        }
        OutputFormat::Json => {
            let body: Vec<serde_json::Value> = rows
                .iter()
                .map(|(s, d)| serde_json::json!({ "statement": s, "lr_display": d.as_str() }))
                .collect();
            let mut s = serde_json::to_string_pretty(&body)?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn comment_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source)
}

/// Reads `study,identification,exclusion` rows of published display values.
pub fn read_summary_csv<R: Read>(source: R) -> Result<Vec<SummaryEntry>> {
    let mut reader = comment_reader(source);
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        if row.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "summary rows need 3 fields, found {}",
                row.len()
            )));
        }
        out.push(SummaryEntry {
            study: row[0].to_string(),
            identification: LrDisplay::verbatim(&row[1]),
            exclusion: LrDisplay::verbatim(&row[2]),
        });
    }
    Ok(out)
}

/// Reads `statement,lr` rows of published display values.
pub fn read_statement_csv<R: Read>(source: R) -> Result<Vec<(String, LrDisplay)>> {
    let mut reader = comment_reader(source);
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        if row.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "statement rows need 2 fields, found {}",
                row.len()
            )));
        }
        out.push((row[0].to_string(), LrDisplay::verbatim(&row[1])));
    }
    Ok(out)
}

/// A batch report over several datasets.
#[derive(Debug, Clone)]
pub struct ReportSpec {
    pub datasets: Vec<DatasetFile>,
    pub options: RenderOptions,
    pub interval: Option<IntervalSpec>,
    pub format: OutputFormat,
}

impl ReportSpec {
    pub fn validate(&self) -> Result<()> {
        for ds in &self.datasets {
            if !ds.path.is_file() {
                return Err(Error::InvalidArgument(format!(
                    "dataset `{}` does not exist",
                    ds.path.display()
                )));
            }
        }
        if let Some(spec) = &self.interval {
            let level = spec.level();
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::InvalidArgument(format!("bad interval level {level}")));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Vec<LrReport>> {
        self.validate()?;
        self.datasets
            .iter()
            .map(|ds| {
                let table = ds.load()?;
                let report = LrReport::build(&table, &self.options)?;
                match &self.interval {
                    Some(spec) => report.with_intervals(&table, spec),
                    None => Ok(report),
                }
            })
            .collect()
    }

    /// Renders every dataset into one document.
    pub fn render(&self) -> Result<String> {
        let reports = self.build()?;
        match self.format {
            OutputFormat::Markdown => {
                let mut out = String::new();
                for (i, r) in reports.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = writeln!(out, "## {}\n", r.study);
                    out.push_str(&r.render(OutputFormat::Markdown)?);
                }
                Ok(out)
            }
            OutputFormat::Csv => render_long_csv(&reports),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&reports)?;
                s.push('\n');
                Ok(s)
            }
        }
    }

    /// Writes one `<study>.<ext>` file per dataset into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for report in self.build()? {
            let path = dir.join(format!("{}.{}", report.study, self.format.extension()));
            std::fs::write(&path, report.render(self.format)?)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn render_long_csv(reports: &[LrReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "study", "statement", "lr", "lr_display", "p_h1", "p_h2", "lower", "upper",
    ])?;
    for r in reports {
        for s in &r.statements {
            let (lower, upper) = match &s.interval {
                Some(iv) => (iv.lower.to_string(), iv.upper.to_string()),
                None => (String::new(), String::new()),
            };
            w.write_record([
                r.study.as_str(),
                s.statement.as_str(),
                &s.lr.to_string(),
                s.lr_display.as_str(),
                &s.p_h1.to_string(),
                &s.p_h2.to_string(),
                &lower,
                &upper,
            ])?;
        }
    }
    finish_csv(w)
}

/// Row totals as a short provenance line, e.g. `N(H1) = 1429, N(H2) = 2891`.
pub fn totals_line(table: &ConfusionTable) -> String {
    format!(
        "N(H1) = {}, N(H2) = {}",
        table.row_total(GroundTruth::SameSource),
        table.row_total(GroundTruth::DifferentSource)
    )
}
