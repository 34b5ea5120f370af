//! Sampling-uncertainty intervals for per-statement likelihood ratios.
//!
//! Two resampling schemes are offered, a stratified parametric bootstrap and a
//! Dirichlet posterior, plus a one-sided bound for the zero-denominator case.
//! Draw `i` always uses random stream `i` of the caller's seed (see
//! [`crate::rng`]), so intervals are identical for any thread count.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::model::{ConfusionTable, GroundTruth, Lr};
use crate::rng::{self, GENERATOR};

pub const DEFAULT_REPLICATES: u64 = 2000;
pub const DEFAULT_DRAWS: u64 = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const MIN_REPLICATES: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalMethod {
    BootstrapPercentile {
        replicates: u64,
        seed: u64,
        generator: String,
    },
    DirichletPosterior {
        alpha: f64,
        draws: u64,
        seed: u64,
        generator: String,
    },
    ZeroCountBound,
}

/// An interval on the extended non-negative reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::serde_ext")]
    pub lower: f64,
    #[serde(with = "crate::serde_ext")]
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    /// Draws whose LR was 0/0 and therefore left out of the percentiles.
    #[serde(default)]
    pub undefined_draws: u64,
}

impl Interval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "level must be strictly between 0 and 1, got {level}"
        )))
    }
}

fn check_rows(table: &ConfusionTable) -> Result<(u64, u64)> {
    let n1 = table.row_total(GroundTruth::SameSource);
    let n2 = table.row_total(GroundTruth::DifferentSource);
    if n1 == 0 {
        return Err(Error::NoObservations(GroundTruth::SameSource));
    }
    if n2 == 0 {
        return Err(Error::NoObservations(GroundTruth::DifferentSource));
    }
    Ok((n1, n2))
}

/// Nearest-rank percentile of an ascending slice.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    // the small offset keeps q * n from landing one rank high through rounding
    let rank = ((q * n as f64) - 1e-9).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}

/// Percentile interval over replicate LRs. Infinite values sort above every
/// finite one; undefined values are counted and dropped.
fn percentile_interval(draws: Vec<Lr>, level: f64, method: IntervalMethod) -> Result<Interval> {
    let total = draws.len();
    let mut values: Vec<f64> = draws.into_iter().filter_map(Lr::value).collect();
    let undefined_draws = (total - values.len()) as u64;
    if values.is_empty() {
        return Err(Error::UndefinedLr);
    }
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(Interval {
        lower: nearest_rank(&values, tail),
        upper: nearest_rank(&values, 1.0 - tail),
        level,
        method,
        undefined_draws,
    })
}

fn binomial_draw<R: rand::Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("p in (0, 1)").sample(rng)
    }
}

/// Stratified percentile bootstrap with default execution.
pub fn bootstrap_interval(
    table: &ConfusionTable,
    statement: &str,
    replicates: u64,
    level: f64,
    seed: u64,
) -> Result<Interval> {
    bootstrap_interval_with(table, statement, replicates, level, seed, Execution::default())
}

/// Stratified percentile bootstrap.
///
/// Each replicate resamples `N_H1` same-source and `N_H2` different-source
/// evaluations from their observed category distributions, holding both row
/// totals fixed. Only the resampled count of `statement` enters its LR, and
/// that count is binomial under multinomial resampling, so it is drawn
/// directly: first the same-source count, then the different-source count,
/// from stream `i` of `seed`.
pub fn bootstrap_interval_with(
    table: &ConfusionTable,
    statement: &str,
    replicates: u64,
    level: f64,
    seed: u64,
    exec: Execution,
) -> Result<Interval> {
    check_level(level)?;
    if replicates < MIN_REPLICATES {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )));
    }
    let (n1, n2) = check_rows(table)?;
    let index = table.require_index(statement)?;
    let p1 = table.count_at(GroundTruth::SameSource, index) as f64 / n1 as f64;
    let p2 = table.count_at(GroundTruth::DifferentSource, index) as f64 / n2 as f64;

    let draws = map_indexed(exec, replicates, |i| {
        let mut rng = rng::stream_rng(seed, i);
        let c1 = binomial_draw(&mut rng, n1, p1);
        let c2 = binomial_draw(&mut rng, n2, p2);
        Lr::from_probabilities(c1 as f64 / n1 as f64, c2 as f64 / n2 as f64)
    });
    percentile_interval(
        draws,
        level,
        IntervalMethod::BootstrapPercentile {
            replicates,
            seed,
            generator: GENERATOR.to_string(),
        },
    )
}

pub fn dirichlet_interval(
    table: &ConfusionTable,
    statement: &str,
    alpha: f64,
    draws: u64,
    level: f64,
    seed: u64,
) -> Result<Interval> {
    dirichlet_interval_with(table, statement, alpha, draws, level, seed, Execution::default())
}

/// Posterior percentile interval: each hypothesis row gets an independent
/// `Dirichlet(counts + alpha)` draw of its category probabilities.
pub fn dirichlet_interval_with(
    table: &ConfusionTable,
    statement: &str,
    alpha: f64,
    draws: u64,
    level: f64,
    seed: u64,
    exec: Execution,
) -> Result<Interval> {
    check_level(level)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("draws must be positive".into()));
    }
    check_rows(table)?;
    let index = table.require_index(statement)?;
    let concentration = |truth| -> Vec<f64> {
        table.row(truth).iter().map(|&c| c as f64 + alpha).collect()
    };
    let a1 = concentration(GroundTruth::SameSource);
    let a2 = concentration(GroundTruth::DifferentSource);

    let samples = map_indexed(exec, draws, |i| {
        let mut rng = rng::stream_rng(seed, i);
        let p1 = rng::dirichlet(&mut rng, &a1);
        let p2 = rng::dirichlet(&mut rng, &a2);
        Lr::from_probabilities(p1[index], p2[index])
    });
    percentile_interval(
        samples,
        level,
        IntervalMethod::DirichletPosterior {
            alpha,
            draws,
            seed,
            generator: GENERATOR.to_string(),
        },
    )
}

/// One-sided upper bound on a probability after zero events in `n` trials:
/// `1 - (1 - level)^(1/n)`.
pub fn zero_count_upper_probability(n: u64, level: f64) -> Result<f64> {
    check_level(level)?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    Ok(-((1.0 - level).ln() / n as f64).exp_m1())
}

/// Lower bound for an LR whose different-source count is zero.
pub fn zero_count_lower_bound(table: &ConfusionTable, statement: &str, level: f64) -> Result<f64> {
    let index = table.require_index(statement)?;
    let c2 = table.count_at(GroundTruth::DifferentSource, index);
    if c2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "`{statement}` has {c2} different-source observations; the zero-count bound does not apply"
        )));
    }
    let (n1, n2) = check_rows(table)?;
    let c1 = table.count_at(GroundTruth::SameSource, index);
    if c1 == 0 {
        return Err(Error::UndefinedLr);
    }
    let p_upper = zero_count_upper_probability(n2, level)?;
    Ok((c1 as f64 / n1 as f64) / p_upper)
}

/// The zero-count bound as the interval `[bound, inf]`.
pub fn zero_count_interval(table: &ConfusionTable, statement: &str, level: f64) -> Result<Interval> {
    let bound = zero_count_lower_bound(table, statement, level)?;
    Ok(Interval {
        lower: bound,
        upper: f64::INFINITY,
        level,
        method: IntervalMethod::ZeroCountBound,
        undefined_draws: 0,
    })
}
