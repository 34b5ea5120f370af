//! Domain types shared by every stage of the pipeline.
//!
//! A [`ConfusionTable`] holds exact integer counts of each statement category
//! under the two ground-truth hypotheses. Probabilities only appear once a
//! likelihood ratio is computed from it.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::SmoothingPolicy;
use crate::error::{Error, Result};

/// Ground truth of a comparison pair.
///
/// `SameSource` is the first hypothesis (numerator of the LR), `DifferentSource`
/// the alternative (denominator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroundTruth {
    SameSource,
    DifferentSource,
}

impl GroundTruth {
    pub const BOTH: [GroundTruth; 2] = [GroundTruth::SameSource, GroundTruth::DifferentSource];

    fn row(self) -> usize {
        match self {
            GroundTruth::SameSource => 0,
            GroundTruth::DifferentSource => 1,
        }
    }
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTruth::SameSource => f.write_str("H1 (same source)"),
            GroundTruth::DifferentSource => f.write_str("H2 (different source)"),
        }
    }
}

/// A study-defined conclusion label such as `"ID"` or `"Inconcl.-A"`.
///
/// Labels are compared exactly (case-sensitive). Cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StatementCategory(Arc<str>);

impl StatementCategory {
    pub fn new(label: &str) -> Result<Self> {
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::InvalidTable("empty statement label".into()));
        }
        Ok(StatementCategory(Arc::from(label)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StatementCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for StatementCategory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for StatementCategory {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        StatementCategory::new(&s).map_err(serde::de::Error::custom)
    }
}

/// One examiner decision on one comparison pair of known ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationRecord {
    pub examiner_id: String,
    pub item_id: String,
    pub truth: GroundTruth,
    pub statement: StatementCategory,
}

/// Counts of each statement category under both hypotheses.
///
/// Category order is the order of the source study and is never re-sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionTable {
    study_name: String,
    categories: Vec<StatementCategory>,
    // counts[row][category], row 0 = same source, row 1 = different source
    counts: [Vec<u64>; 2],
}

impl ConfusionTable {
    /// Builds a table from `(label, same_source_count, different_source_count)` rows.
    pub fn new<S: AsRef<str>>(
        study_name: impl Into<String>,
        rows: impl IntoIterator<Item = (S, u64, u64)>,
    ) -> Result<Self> {
        let mut categories = Vec::new();
        let mut same = Vec::new();
        let mut different = Vec::new();
        let mut seen = HashSet::new();
        for (label, h1, h2) in rows {
            let category = StatementCategory::new(label.as_ref())?;
            if !seen.insert(category.clone()) {
                return Err(Error::DuplicateCategory(category.to_string()));
            }
            categories.push(category);
            same.push(h1);
            different.push(h2);
        }
        if categories.is_empty() {
            return Err(Error::InvalidTable("a table needs at least one category".into()));
        }
        Ok(ConfusionTable {
            study_name: study_name.into(),
            categories,
            counts: [same, different],
        })
    }

    pub fn study_name(&self) -> &str {
        &self.study_name
    }

    pub fn with_study_name(mut self, name: impl Into<String>) -> Self {
        self.study_name = name.into();
        self
    }

    pub fn categories(&self) -> &[StatementCategory] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.as_str() == label)
    }

    pub(crate) fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownStatement(label.to_string()))
    }

    /// The full count row for one hypothesis, in category order.
    pub fn row(&self, truth: GroundTruth) -> &[u64] {
        &self.counts[truth.row()]
    }

    pub fn count(&self, truth: GroundTruth, label: &str) -> Option<u64> {
        self.index_of(label).map(|i| self.counts[truth.row()][i])
    }

    pub fn count_at(&self, truth: GroundTruth, index: usize) -> u64 {
        self.counts[truth.row()][index]
    }

    /// Number of comparisons performed under `truth`.
    pub fn row_total(&self, truth: GroundTruth) -> u64 {
        self.counts[truth.row()].iter().sum()
    }

    /// Iterates `(category, same_source_count, different_source_count)`.
    pub fn rows(&self) -> impl Iterator<Item = (&StatementCategory, u64, u64)> + '_ {
        self.categories
            .iter()
            .zip(self.counts[0].iter().zip(&self.counts[1]))
            .map(|(c, (&h1, &h2))| (c, h1, h2))
    }

    /// Returns a copy with every count in one hypothesis row multiplied by `k`.
    pub fn scale_row(&self, truth: GroundTruth, k: u64) -> Self {
        let mut out = self.clone();
        for c in &mut out.counts[truth.row()] {
            *c *= k;
        }
        out
    }

    pub(crate) fn from_parts(
        study_name: String,
        categories: Vec<StatementCategory>,
        same: Vec<u64>,
        different: Vec<u64>,
    ) -> Self {
        debug_assert_eq!(categories.len(), same.len());
        debug_assert_eq!(categories.len(), different.len());
        ConfusionTable {
            study_name,
            categories,
            counts: [same, different],
        }
    }
}

/// Row total of `table` under `truth`.
pub fn row_total(table: &ConfusionTable, truth: GroundTruth) -> u64 {
    table.row_total(truth)
}

/// A likelihood ratio on the extended non-negative reals.
///
/// `Undefined` (0/0) has no numeric value and must be handled explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lr {
    Finite(f64),
    Infinite,
    Undefined,
}

impl Lr {
    /// Ratio of two probabilities following the zero-denominator rules.
    pub fn from_probabilities(numerator: f64, denominator: f64) -> Self {
        if denominator > 0.0 {
            Lr::Finite(numerator / denominator)
        } else if numerator > 0.0 {
            Lr::Infinite
        } else {
            Lr::Undefined
        }
    }

    /// Numeric value, with `Infinite` as `f64::INFINITY`; `None` when undefined.
    pub fn value(self) -> Option<f64> {
        match self {
            Lr::Finite(v) => Some(v),
            Lr::Infinite => Some(f64::INFINITY),
            Lr::Undefined => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Lr::Finite(_))
    }
}

impl fmt::Display for Lr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lr::Finite(v) => write!(f, "{v}"),
            Lr::Infinite => f.write_str("inf"),
            Lr::Undefined => f.write_str("undefined"),
        }
    }
}

/// Per-statement likelihood ratio together with the counts it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LrEstimate {
    pub statement: StatementCategory,
    pub p_given_h1: f64,
    pub p_given_h2: f64,
    pub lr: Lr,
    pub smoothing: SmoothingPolicy,
    pub count_h1: u64,
    pub total_h1: u64,
    pub count_h2: u64,
    pub total_h2: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bullets() -> ConfusionTable {
        crate::fixtures::bullets()
    }

    #[test]
    fn bullet_row_totals() {
        let t = bullets();
        assert_eq!(row_total(&t, GroundTruth::SameSource), 1429);
        assert_eq!(row_total(&t, GroundTruth::DifferentSource), 2891);
    }

    #[test]
    fn zero_rows_total_zero() {
        let t = ConfusionTable::new("z", [("a", 0, 0), ("b", 0, 0)]).unwrap();
        assert_eq!(t.row_total(GroundTruth::SameSource), 0);
        assert_eq!(t.row_total(GroundTruth::DifferentSource), 0);
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(matches!(
            ConfusionTable::new("d", [("a", 1, 1), ("a", 2, 2)]),
            Err(Error::DuplicateCategory(_))
        ));
        assert!(ConfusionTable::new::<&str>("e", []).is_err());
        assert!(ConfusionTable::new("e", [(" ", 1, 1)]).is_err());
    }

    #[test]
    fn order_preserved() {
        let t = ConfusionTable::new("o", [("z", 1, 1), ("a", 1, 1), ("m", 1, 1)]).unwrap();
        let labels: Vec<_> = t.categories().iter().map(|c| c.as_str()).collect();
        assert_eq!(labels, ["z", "a", "m"]);
    }

    #[test]
    fn lr_zero_rules() {
        assert_eq!(Lr::from_probabilities(0.5, 0.25), Lr::Finite(2.0));
        assert_eq!(Lr::from_probabilities(0.5, 0.0), Lr::Infinite);
        assert_eq!(Lr::from_probabilities(0.0, 0.0), Lr::Undefined);
        assert_eq!(Lr::Undefined.value(), None);
    }

    proptest::proptest! {
        #[test]
        fn row_total_permutation_invariant(
            rows in proptest::collection::vec((0u64..1000, 0u64..1000), 1..8),
            rot in 0usize..8,
        ) {
            let labelled: Vec<_> = rows.iter().enumerate()
                .map(|(i, &(a, b))| (format!("c{i}"), a, b)).collect();
            let mut rotated = labelled.clone();
            rotated.rotate_left(rot % labelled.len());
            let a = ConfusionTable::new("p", labelled).unwrap();
            let b = ConfusionTable::new("p", rotated).unwrap();
            for truth in GroundTruth::BOTH {
                proptest::prop_assert_eq!(a.row_total(truth), b.row_total(truth));
            }
        }
    }
}
