//! Datasets bundled with the crate.

use crate::engine::LrDisplay;
use crate::ingest::parse_aggregated;
use crate::model::ConfusionTable;
use crate::report::{read_statement_csv, read_summary_csv, SummaryEntry};

pub const BULLETS_CSV: &str = include_str!("../fixtures/bullets.csv");

/// Bullet comparison counts for six conclusion categories (1429 same-source,
/// 2891 different-source comparisons).
pub fn bullets() -> ConfusionTable {
    parse_aggregated(BULLETS_CSV.as_bytes())
        .expect("bundled bullets table parses")
        .with_study_name("bullets")
}

/// Published identification/exclusion display values for six studies.
pub fn published_summary() -> Vec<SummaryEntry> {
    read_summary_csv(include_str!("../fixtures/summary_published.csv").as_bytes())
        .expect("bundled summary parses")
}

/// Published per-statement display values, keyed by study.
pub fn published_statement_tables() -> Vec<(&'static str, Vec<(String, LrDisplay)>)> {
    [
        ("bloodstain", include_str!("../fixtures/bloodstain_published.csv")),
        ("handwriting", include_str!("../fixtures/handwriting_published.csv")),
        ("footwear", include_str!("../fixtures/footwear_published.csv")),
        ("cartridge", include_str!("../fixtures/cartridge_published.csv")),
        ("fingerprint", include_str!("../fixtures/fingerprint_published.csv")),
    ]
    .into_iter()
    .map(|(name, text)| {
        (
            name,
            read_statement_csv(text.as_bytes()).expect("bundled statement table parses"),
        )
    })
    .collect()
}
