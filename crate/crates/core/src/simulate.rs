//! Synthetic performance studies with known category distributions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EvaluationRecord, GroundTruth, Lr, StatementCategory};
use crate::rng;

const SUM_TOLERANCE: f64 = 1e-12;

fn default_examiners() -> u32 {
    10
}

/// Generative profile of a study.
///
/// Loadable from TOML:
///
/// ```toml
/// categories = ["ID", "Inconclusive", "Elimination"]
/// p_given_h1 = [0.75, 0.2, 0.05]
/// p_given_h2 = [0.01, 0.3, 0.69]
/// n_h1 = 1000
/// n_h2 = 2000
/// seed = 42
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelProfile {
    pub categories: Vec<String>,
    pub p_given_h1: Vec<f64>,
    pub p_given_h2: Vec<f64>,
    pub n_h1: u64,
    pub n_h2: u64,
    pub seed: u64,
    /// Size of the round-robin pool of synthetic examiner ids.
    #[serde(default = "default_examiners")]
    pub examiners: u32,
}

impl PanelProfile {
    pub fn new(
        categories: &[&str],
        p_given_h1: Vec<f64>,
        p_given_h2: Vec<f64>,
        n_h1: u64,
        n_h2: u64,
        seed: u64,
    ) -> Result<Self> {
        let profile = PanelProfile {
            categories: categories.iter().map(|s| s.to_string()).collect(),
            p_given_h1,
            p_given_h2,
            n_h1,
            n_h2,
            seed,
            examiners: default_examiners(),
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let profile: PanelProfile =
            toml::from_str(text).map_err(|e| Error::InvalidProfile(e.to_string()))?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        PanelProfile::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.categories.len();
        if k == 0 {
            return Err(Error::InvalidProfile("no categories".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.categories {
            if c.trim().is_empty() || !seen.insert(c.trim()) {
                return Err(Error::InvalidProfile(format!(
                    "category labels must be non-empty and unique (`{c}`)"
                )));
            }
        }
        for (name, p) in [("p_given_h1", &self.p_given_h1), ("p_given_h2", &self.p_given_h2)] {
            if p.len() != k {
                return Err(Error::InvalidProfile(format!(
                    "{name} has {} entries for {k} categories",
                    p.len()
                )));
            }
            if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::InvalidProfile(format!("{name} has entries outside [0, 1]")));
            }
            let sum: f64 = p.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidProfile(format!("{name} sums to {sum}, not 1")));
            }
        }
        if self.n_h1 == 0 || self.n_h2 == 0 {
            return Err(Error::InvalidProfile("n_h1 and n_h2 must be positive".into()));
        }
        if self.examiners == 0 {
            return Err(Error::InvalidProfile("examiners must be positive".into()));
        }
        Ok(())
    }

    pub fn index_of(&self, statement: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.trim() == statement)
    }
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Draws `n_h1` same-source then `n_h2` different-source records.
///
/// All draws come from stream 0 of the profile's seed, one uniform per record,
/// mapped to a category by inverse CDF over the profile's category order.
pub fn simulate_study(profile: &PanelProfile) -> Result<Vec<EvaluationRecord>> {
    profile.validate()?;
    let categories = profile
        .categories
        .iter()
        .map(|c| StatementCategory::new(c))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = rng::stream_rng(profile.seed, 0);
    let mut records = Vec::with_capacity((profile.n_h1 + profile.n_h2) as usize);
    let mut item = 0u64;
    for (truth, n, p) in [
        (GroundTruth::SameSource, profile.n_h1, &profile.p_given_h1),
        (GroundTruth::DifferentSource, profile.n_h2, &profile.p_given_h2),
    ] {
        let cum = cumulative(p);
        for _ in 0..n {
            let k = rng::categorical(&mut rng, &cum);
            records.push(EvaluationRecord {
                examiner_id: format!("ex{}", item % u64::from(profile.examiners)),
                item_id: format!("item{item}"),
                truth,
                statement: categories[k].clone(),
            });
            item += 1;
        }
    }
    Ok(records)
}

/// The LR the profile implies for `statement`.
pub fn true_lr(profile: &PanelProfile, statement: &str) -> Result<Lr> {
    let i = profile
        .index_of(statement)
        .ok_or_else(|| Error::UnknownStatement(statement.to_string()))?;
    Ok(Lr::from_probabilities(profile.p_given_h1[i], profile.p_given_h2[i]))
}
