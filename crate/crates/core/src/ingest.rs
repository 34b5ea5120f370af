//! Reading and writing the two dataset schemas, and tallying raw records.
//!
//! Raw records: `examiner_id,item_id,ground_truth,statement`, extra columns
//! ignored. Aggregated tables: `statement,same_source_count,different_source_count`,
//! one row per category in file order. Both accept `#` comment lines.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{ConfusionTable, EvaluationRecord, GroundTruth, StatementCategory};

pub const RECORDS_HEADER: [&str; 4] = ["examiner_id", "item_id", "ground_truth", "statement"];
pub const AGGREGATED_HEADER: [&str; 3] =
    ["statement", "same_source_count", "different_source_count"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    RawRecords,
    AggregatedTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub kind: DatasetKind,
}

impl DatasetFile {
    /// Opens `path` and checks that its header matches `kind`.
    pub fn open(path: impl Into<PathBuf>, kind: DatasetKind) -> Result<Self> {
        let path = path.into();
        let file = std::fs::File::open(&path)?;
        let mut reader = reader(file);
        let headers = reader.headers().map_err(csv_error)?.clone();
        match kind {
            DatasetKind::RawRecords => {
                record_columns(&headers)?;
            }
            DatasetKind::AggregatedTable => check_aggregated_header(&headers)?,
        }
        Ok(DatasetFile { path, kind })
    }

    /// Loads the dataset as a confusion table, tallying raw records if needed.
    pub fn load(&self) -> Result<ConfusionTable> {
        let file = std::fs::File::open(&self.path)?;
        let table = match self.kind {
            DatasetKind::RawRecords => tally(&parse_records(file)?, None)?,
            DatasetKind::AggregatedTable => parse_aggregated(file)?,
        };
        Ok(table.with_study_name(study_name_from_path(&self.path)))
    }
}

fn study_name_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Which ground-truth tokens a raw-records file may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruthTokens {
    /// `same` / `different` only.
    Strict,
    /// Also accepts `mated` / `nonmated`, normalized on read.
    #[default]
    WithAliases,
}

impl TruthTokens {
    fn parse(self, token: &str) -> Option<GroundTruth> {
        match (token, self) {
            ("same", _) => Some(GroundTruth::SameSource),
            ("different", _) => Some(GroundTruth::DifferentSource),
            ("mated", TruthTokens::WithAliases) => Some(GroundTruth::SameSource),
            ("nonmated", TruthTokens::WithAliases) => Some(GroundTruth::DifferentSource),
            _ => None,
        }
    }

    fn allowed(self) -> &'static str {
        match self {
            TruthTokens::Strict => "same, different",
            TruthTokens::WithAliases => "same, different, mated, nonmated",
        }
    }
}

pub fn truth_token(truth: GroundTruth) -> &'static str {
    match truth {
        GroundTruth::SameSource => "same",
        GroundTruth::DifferentSource => "different",
    }
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn csv_error(err: csv::Error) -> Error {
    match err.position() {
        Some(pos) => Error::Parse {
            line: pos.line(),
            message: match err.kind() {
                csv::ErrorKind::UnequalLengths {
                    expected_len, len, ..
                } => format!("expected {expected_len} fields, found {len}"),
                _ => err.to_string(),
            },
        },
        None => Error::Csv(err),
    }
}

fn record_columns(headers: &csv::StringRecord) -> Result<[usize; 4]> {
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(RECORDS_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!(
                    "missing column `{name}`; expected header `{}`",
                    RECORDS_HEADER.join(",")
                ),
            })?;
    }
    Ok(idx)
}

fn check_aggregated_header(headers: &csv::StringRecord) -> Result<()> {
    if headers.iter().ne(AGGREGATED_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", AGGREGATED_HEADER.join(",")),
        });
    }
    Ok(())
}

/// Parses raw per-evaluation records, accepting `mated`/`nonmated` aliases.
pub fn parse_records<R: Read>(source: R) -> Result<Vec<EvaluationRecord>> {
    parse_records_with(source, TruthTokens::default())
}

pub fn parse_records_with<R: Read>(source: R, tokens: TruthTokens) -> Result<Vec<EvaluationRecord>> {
    let mut reader = reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let [examiner, item, truth, statement] = record_columns(&headers)?;
    let mut labels: HashMap<String, StatementCategory> = HashMap::new();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let token = &row[truth];
        let truth = tokens.parse(token).ok_or_else(|| Error::UnknownTruth {
            line,
            token: token.to_string(),
            allowed: tokens.allowed().to_string(),
        })?;
        let label = &row[statement];
        let category = match labels.get(label) {
            Some(c) => c.clone(),
            None => {
                let c = StatementCategory::new(label).map_err(|_| Error::Parse {
                    line,
                    message: "empty statement".into(),
                })?;
                labels.insert(label.to_string(), c.clone());
                c
            }
        };
        out.push(EvaluationRecord {
            examiner_id: row[examiner].to_string(),
            item_id: row[item].to_string(),
            truth,
            statement: category,
        });
    }
    Ok(out)
}

/// Counts records per (ground truth, statement).
///
/// With a vocabulary the table uses its order and keeps zero-count categories;
/// without one, categories appear in first-seen order.
pub fn tally(
    records: &[EvaluationRecord],
    vocabulary: Option<&[StatementCategory]>,
) -> Result<ConfusionTable> {
    let mut categories: Vec<StatementCategory> = Vec::new();
    let mut index: HashMap<StatementCategory, usize> = HashMap::new();
    let fixed = vocabulary.is_some();
    if let Some(vocab) = vocabulary {
        for c in vocab {
            if index.insert(c.clone(), categories.len()).is_some() {
                return Err(Error::DuplicateCategory(c.to_string()));
            }
            categories.push(c.clone());
        }
    }
    let mut same = vec![0u64; categories.len()];
    let mut different = vec![0u64; categories.len()];
    for record in records {
        let i = match index.get(&record.statement) {
            Some(&i) => i,
            None if fixed => return Err(Error::UnknownStatement(record.statement.to_string())),
            None => {
                index.insert(record.statement.clone(), categories.len());
                categories.push(record.statement.clone());
                same.push(0);
                different.push(0);
                categories.len() - 1
            }
        };
        match record.truth {
            GroundTruth::SameSource => same[i] += 1,
            GroundTruth::DifferentSource => different[i] += 1,
        }
    }
    if categories.is_empty() {
        return Err(Error::InvalidTable(
            "no records and no vocabulary: a table needs at least one category".into(),
        ));
    }
    Ok(ConfusionTable::from_parts(
        String::new(),
        categories,
        same,
        different,
    ))
}

fn parse_count(field: &str, label: &str, line: u64) -> Result<u64> {
    if let Ok(v) = field.parse::<i64>() {
        if v < 0 {
            return Err(Error::NegativeCount {
                label: label.to_string(),
                value: field.to_string(),
            });
        }
    }
    field.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("count `{field}` for `{label}` is not a non-negative integer"),
    })
}

/// Parses a pre-aggregated confusion table.
pub fn parse_aggregated<R: Read>(source: R) -> Result<ConfusionTable> {
    let mut reader = reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    check_aggregated_header(&headers)?;
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let label = row[0].to_string();
        let h1 = parse_count(&row[1], &label, line)?;
        let h2 = parse_count(&row[2], &label, line)?;
        rows.push((label, h1, h2));
    }
    ConfusionTable::new(String::new(), rows)
}

/// Writes `table` in the aggregated schema.
pub fn write_aggregated<W: Write>(table: &ConfusionTable, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(AGGREGATED_HEADER)?;
    for (c, h1, h2) in table.rows() {
        writer.write_record([c.as_str(), &h1.to_string(), &h2.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_records<W: Write>(records: &[EvaluationRecord], sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(RECORDS_HEADER)?;
    for r in records {
        writer.write_record([
            r.examiner_id.as_str(),
            r.item_id.as_str(),
            truth_token(r.truth),
            r.statement.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
