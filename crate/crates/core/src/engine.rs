//! Conditional probabilities and likelihood ratios per statement.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{ConfusionTable, GroundTruth, Lr, LrEstimate};

/// How zero cells are treated when estimating `P(statement | hypothesis)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SmoothingPolicy {
    #[default]
    None,
    /// Adds `alpha` pseudo-counts to every cell.
    AddAlpha(f64),
}

impl SmoothingPolicy {
    pub fn add_alpha(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(SmoothingPolicy::AddAlpha(alpha))
        } else {
            Err(Error::InvalidArgument(format!(
                "smoothing alpha must be positive, got {alpha}"
            )))
        }
    }
}

impl fmt::Display for SmoothingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothingPolicy::None => f.write_str("none"),
            SmoothingPolicy::AddAlpha(a) => write!(f, "alpha={a}"),
        }
    }
}

impl FromStr for SmoothingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(SmoothingPolicy::None);
        }
        let value = s.strip_prefix("alpha=").ok_or_else(|| {
            Error::InvalidArgument(format!("smoothing must be `none` or `alpha=<value>`, got `{s}`"))
        })?;
        let alpha = value
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad smoothing alpha `{value}`")))?;
        SmoothingPolicy::add_alpha(alpha)
    }
}

fn probability_at(
    table: &ConfusionTable,
    index: usize,
    truth: GroundTruth,
    smoothing: SmoothingPolicy,
) -> Result<f64> {
    let count = table.count_at(truth, index);
    let total = table.row_total(truth);
    match smoothing {
        SmoothingPolicy::None => {
            if total == 0 {
                return Err(Error::NoObservations(truth));
            }
            Ok(count as f64 / total as f64)
        }
        SmoothingPolicy::AddAlpha(alpha) => {
            let k = table.len() as f64;
            Ok((count as f64 + alpha) / (total as f64 + alpha * k))
        }
    }
}

/// `P(statement | truth)` estimated from the table.
pub fn conditional_probability(
    table: &ConfusionTable,
    statement: &str,
    truth: GroundTruth,
    smoothing: SmoothingPolicy,
) -> Result<f64> {
    let index = table.require_index(statement)?;
    probability_at(table, index, truth, smoothing)
}

fn estimate_at(
    table: &ConfusionTable,
    index: usize,
    smoothing: SmoothingPolicy,
) -> Result<LrEstimate> {
    let p_given_h1 = probability_at(table, index, GroundTruth::SameSource, smoothing)?;
    let p_given_h2 = probability_at(table, index, GroundTruth::DifferentSource, smoothing)?;
    Ok(LrEstimate {
        statement: table.categories()[index].clone(),
        p_given_h1,
        p_given_h2,
        lr: Lr::from_probabilities(p_given_h1, p_given_h2),
        smoothing,
        count_h1: table.count_at(GroundTruth::SameSource, index),
        total_h1: table.row_total(GroundTruth::SameSource),
        count_h2: table.count_at(GroundTruth::DifferentSource, index),
        total_h2: table.row_total(GroundTruth::DifferentSource),
    })
}

/// Likelihood ratio of one statement: `P(s | H1) / P(s | H2)`.
pub fn likelihood_ratio(
    table: &ConfusionTable,
    statement: &str,
    smoothing: SmoothingPolicy,
) -> Result<LrEstimate> {
    let index = table.require_index(statement)?;
    estimate_at(table, index, smoothing)
}

/// One estimate per category, in table order.
pub fn full_table_lrs(table: &ConfusionTable, smoothing: SmoothingPolicy) -> Result<Vec<LrEstimate>> {
    (0..table.len())
        .map(|i| estimate_at(table, i, smoothing))
        .collect()
}

/// LR of an identification statement when only two statements exist:
/// `(1 - fnr) / fpr`.
pub fn lr_from_error_rates(fnr: f64, fpr: f64) -> Result<Lr> {
    for (name, v) in [("false negative rate", fnr), ("false positive rate", fpr)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be in [0, 1], got {v}"
            )));
        }
    }
    Ok(Lr::from_probabilities(1.0 - fnr, fpr))
}

/// Human-facing rendering of an LR: `"109"`, `"1 / 12"`, `"∞"` or `"> 101"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LrDisplay(String);

impl LrDisplay {
    /// Wraps an already rendered display string (e.g. a published value).
    pub fn verbatim(text: impl Into<String>) -> Self {
        LrDisplay(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LrDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn round_half_up(x: f64) -> f64 {
    let floor = x.floor();
    if x - floor >= 0.5 {
        floor + 1.0
    } else {
        floor
    }
}

fn render_finite(lr: f64) -> String {
    if lr >= 1.0 {
        format!("{:.0}", round_half_up(lr))
    } else if lr == 0.0 {
        "0".to_string()
    } else {
        let r = round_half_up(lr.recip());
        if r == 1.0 {
            "1".to_string()
        } else {
            format!("1 / {r:.0}")
        }
    }
}

/// Rounds an LR to its display form. Values `>= 1` round half-up to an integer;
/// values below 1 are shown as `1 / r` with `r` the rounded reciprocal.
pub fn presentation_round(lr: Lr) -> Result<LrDisplay> {
    presentation_round_bounded(lr, None)
}

/// As [`presentation_round`], but an infinite LR with a known lower bound is
/// shown as `"> bound"`.
pub fn presentation_round_bounded(lr: Lr, lower_bound: Option<f64>) -> Result<LrDisplay> {
    match lr {
        Lr::Undefined => Err(Error::UndefinedLr),
        Lr::Infinite => Ok(LrDisplay(match lower_bound {
            Some(b) if b.is_finite() && b >= 0.0 => format!("> {}", render_finite(b)),
            _ => "∞".to_string(),
        })),
        Lr::Finite(v) if v < 0.0 || v.is_nan() => Err(Error::InvalidArgument(format!(
            "likelihood ratio must be non-negative, got {v}"
        ))),
        Lr::Finite(v) if v.is_infinite() => presentation_round_bounded(Lr::Infinite, lower_bound),
        Lr::Finite(v) => Ok(LrDisplay(render_finite(v))),
    }
}
