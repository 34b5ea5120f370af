//! Likelihood ratios for categorical expert statements.
//!
//! Performance studies record how often experts reach each conclusion for
//! pairs of known ground truth. For a statement `s` the likelihood ratio is
//! `P(s | same source) / P(s | different source)`, estimated directly from the
//! resulting confusion table. This crate ingests such tables, computes and
//! displays the ratios, attaches resampling intervals, and interprets them as
//! posteriors, sensitivity adjustments and verbal labels.
//!
//! ```
//! use expert_lr::{fixtures, engine, report};
//!
//! let table = fixtures::bullets();
//! let id = engine::likelihood_ratio(&table, "ID", Default::default()).unwrap();
//! assert_eq!(engine::presentation_round(id.lr).unwrap().as_str(), "109");
//! let md = report::render_lr_table(&table, report::OutputFormat::Markdown).unwrap();
//! assert!(md.contains("| LR | 109 |"));
//! ```

pub mod cli;
pub mod engine;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod ingest;
pub mod interpret;
pub mod model;
pub mod report;
pub mod rng;
mod serde_ext;
pub mod simulate;
pub mod uncertainty;

pub use engine::{LrDisplay, SmoothingPolicy};
pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{ConfusionTable, EvaluationRecord, GroundTruth, Lr, LrEstimate, StatementCategory};
