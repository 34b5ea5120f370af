//! Posterior probabilities, hardest-fraction sensitivity, and verbal labels.

use std::path::Path;

use crate::error::{Error, Result};

fn check_lr(lr: f64) -> Result<()> {
    if lr >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "likelihood ratio must be non-negative, got {lr}"
        )))
    }
}

/// Posterior probability of same source: `prior * lr / (prior * lr + 1 - prior)`.
///
/// An infinite `lr` gives 1 and `lr = 0` gives 0.
pub fn posterior_probability(prior: f64, lr: f64) -> Result<f64> {
    if !(prior > 0.0 && prior < 1.0) {
        return Err(Error::InvalidArgument(
            "prior must be strictly between 0 and 1".into(),
        ));
    }
    check_lr(lr)?;
    if lr.is_infinite() {
        return Ok(1.0);
    }
    let weighted = prior * lr;
    Ok(weighted / (weighted + (1.0 - prior)))
}

pub fn odds(probability: f64) -> f64 {
    probability / (1.0 - probability)
}

/// LR recomputed as if every false positive came from the hardest fraction
/// `retained_fraction` of different-source comparisons.
///
/// The denominator probability is inflated by `1 / retained_fraction`, so the
/// result is `lr / (1 / q)`. Only meaningful for `lr > 1`; the adjustment
/// models denominator inflation and nothing else.
pub fn hardness_adjust(lr: f64, retained_fraction: f64) -> Result<f64> {
    if !(retained_fraction > 0.0 && retained_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "retained fraction must be in (0, 1], got {retained_fraction}"
        )));
    }
    check_lr(lr)?;
    Ok(lr / retained_fraction.recip())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    /// Inclusive lower edge.
    pub lower: f64,
    /// Exclusive upper edge; infinite for the last band.
    pub upper: f64,
    pub label: String,
}

/// Ordered LR bands tiling `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerbalScale {
    name: String,
    bands: Vec<Band>,
}

fn parse_edge(text: &str) -> Option<f64> {
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            Some(num / den)
        }
        None => text.parse().ok(),
    }
}

impl VerbalScale {
    /// Builds a scale from `(lower_edge, label)` rows in ascending order.
    pub fn new(name: impl Into<String>, rows: Vec<(f64, String)>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidScale("no bands".into()))?;
        if first.0 != 0.0 {
            return Err(Error::InvalidScale(format!(
                "first band must start at 0, starts at {}",
                first.0
            )));
        }
        let mut bands = Vec::with_capacity(rows.len());
        for (i, (lower, label)) in rows.iter().enumerate() {
            let upper = rows.get(i + 1).map_or(f64::INFINITY, |r| r.0);
            if !(lower.is_finite() && *lower < upper) {
                return Err(Error::InvalidScale(format!(
                    "band edges must strictly increase ({lower} then {upper})"
                )));
            }
            if label.trim().is_empty() {
                return Err(Error::InvalidScale(format!("empty label at band {}", i + 1)));
            }
            bands.push(Band {
                lower: *lower,
                upper,
                label: label.trim().to_string(),
            });
        }
        Ok(VerbalScale {
            name: name.into(),
            bands,
        })
    }

    /// Parses the `lower_lr,label` text format. Edges may be written as
    /// decimals or as `a/b`; `#` lines are comments.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (edge, label) = line.split_once(',').ok_or_else(|| {
                Error::InvalidScale(format!("line {}: expected `lower_lr,label`", n + 1))
            })?;
            let edge = parse_edge(edge).ok_or_else(|| {
                Error::InvalidScale(format!("line {}: bad edge `{}`", n + 1, edge.trim()))
            })?;
            rows.push((edge, label.to_string()));
        }
        VerbalScale::new(name, rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        VerbalScale::parse(name, &text)
    }

    /// Forensic-guideline style scale, bundled as `scales/forensic.scale`.
    pub fn forensic() -> Self {
        VerbalScale::parse("forensic", include_str!("../scales/forensic.scale"))
            .expect("bundled scale is valid")
    }

    /// General-science Bayes-factor nomenclature, bundled as `scales/scientist.scale`.
    pub fn scientist() -> Self {
        VerbalScale::parse("scientist", include_str!("../scales/scientist.scale"))
            .expect("bundled scale is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// The band containing `lr`; `None` only for negative or NaN input.
    pub fn band(&self, lr: f64) -> Option<&Band> {
        if !(lr >= 0.0) {
            return None;
        }
        // the last band is open-ended, so infinity lands there
        self.bands
            .iter()
            .rev()
            .find(|b| lr >= b.lower)
    }
}

/// Label of the band containing `lr` (lower-inclusive, upper-exclusive).
pub fn verbal_label(lr: f64, scale: &VerbalScale) -> Option<&str> {
    scale.band(lr).map(|b| b.label.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn posterior_anchor() {
        let p = posterior_probability(0.10, 1000.0).unwrap();
        assert!((p - 0.9911).abs() < 1e-4, "{p}");
        assert_eq!(format!("{p:.2}"), "0.99");
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(posterior_probability(0.5, 3.0).unwrap(), 0.75);
        for p in [0.01, 0.3, 0.5, 0.77, 0.999] {
            assert!((posterior_probability(p, 1.0).unwrap() - p).abs() < 1e-15);
        }
        assert_eq!(posterior_probability(0.2, f64::INFINITY).unwrap(), 1.0);
        assert_eq!(posterior_probability(0.2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn posterior_rejects_degenerate_prior() {
        for prior in [0.0, 1.0, -0.5, f64::NAN] {
            let err = posterior_probability(prior, 2.0).unwrap_err();
            assert!(err.to_string().contains("prior must be strictly between 0 and 1"));
        }
        assert!(posterior_probability(0.5, -1.0).is_err());
    }

    #[test]
    fn hardness_examples() {
        assert_eq!(hardness_adjust(109.0, 0.01).unwrap(), 109.0 / 100.0);
        assert_eq!(hardness_adjust(376.0, 0.01).unwrap(), 3.76);
        assert_eq!(hardness_adjust(42.5, 1.0).unwrap(), 42.5);
        assert_eq!(hardness_adjust(f64::INFINITY, 0.5).unwrap(), f64::INFINITY);
        assert!(hardness_adjust(10.0, 0.0).is_err());
        assert!(hardness_adjust(10.0, 1.5).is_err());
    }

    #[test]
    fn verbal_anchors() {
        assert_eq!(verbal_label(1000.0, &VerbalScale::forensic()), Some("moderately strong"));
        assert_eq!(verbal_label(1000.0, &VerbalScale::scientist()), Some("decisive"));
        assert_eq!(verbal_label(1.0, &VerbalScale::forensic()), Some("neutral"));
        assert_eq!(
            verbal_label(1.0, &VerbalScale::scientist()),
            Some("barely worth mentioning")
        );
    }

    #[test]
    fn verbal_extremes() {
        let s = VerbalScale::forensic();
        assert_eq!(verbal_label(f64::INFINITY, &s), Some("extremely strong"));
        assert_eq!(verbal_label(0.0, &s), Some("extremely strong against"));
        assert_eq!(verbal_label(-1.0, &s), None);
    }

    #[test]
    fn band_edges_are_lower_inclusive() {
        let s = VerbalScale::scientist();
        assert_eq!(verbal_label(10.0, &s), Some("strong"));
        assert_eq!(verbal_label(f64::from_bits(10f64.to_bits() - 1), &s), Some("substantial"));
        assert_eq!(verbal_label(0.01, &s), Some("very strong against"));
    }

    #[test]
    fn scale_validation() {
        assert!(VerbalScale::parse("x", "1,a\n2,b\n").is_err());
        assert!(VerbalScale::parse("x", "0,a\n2,b\n1,c\n").is_err());
        assert!(VerbalScale::parse("x", "0,a\n2,\n").is_err());
        assert!(VerbalScale::parse("x", "0 a\n").is_err());
        assert!(VerbalScale::parse("x", "").is_err());
        let s = VerbalScale::parse("x", "# c\n0,low\n1/2,mid\n2,high\n").unwrap();
        assert_eq!(s.bands()[1].lower, 0.5);
        assert_eq!(s.bands()[2].upper, f64::INFINITY);
    }

    #[test]
    fn bundled_scales_tile() {
        for s in [VerbalScale::forensic(), VerbalScale::scientist()] {
            assert_eq!(s.bands()[0].lower, 0.0);
            for w in s.bands().windows(2) {
                assert_eq!(w[0].upper, w[1].lower);
            }
        }
    }

    proptest! {
        #[test]
        fn bayes_consistency(prior in 0.01f64..0.99, lr in 1e-3f64..1e3) {
            let post = posterior_probability(prior, lr).unwrap();
            // the odds transform of a probability near 1 is ill-conditioned
            prop_assume!(post < 0.99);
            let expected = odds(prior) * lr;
            prop_assert!((odds(post) - expected).abs() <= 1e-12 * expected);
        }

        #[test]
        fn posterior_increasing(prior in 0.01f64..0.98, lr in 0.01f64..1e4, dp in 0.001f64..0.01, dl in 0.01f64..1.0) {
            let base = posterior_probability(prior, lr).unwrap();
            prop_assert!(posterior_probability(prior + dp, lr).unwrap() > base);
            prop_assert!(posterior_probability(prior, lr * (1.0 + dl)).unwrap() > base);
        }

        #[test]
        fn hardness_composes(lr in 0.0f64..1e6, a in 0.001f64..=1.0, b in 0.001f64..=1.0) {
            let twice = hardness_adjust(hardness_adjust(lr, a).unwrap(), b).unwrap();
            let once = hardness_adjust(lr, a * b).unwrap();
            prop_assert!((twice - once).abs() <= 1e-12 * once.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn label_constant_within_band(lr in 1e-8f64..1e8, t in 0.0f64..1.0) {
            for s in [VerbalScale::forensic(), VerbalScale::scientist()] {
                let band = s.band(lr).unwrap().clone();
                let hi = if band.upper.is_finite() { band.upper } else { band.lower * 10.0 + 1.0 };
                let inside = band.lower + t * (hi - band.lower);
                if inside < band.upper {
                    prop_assert_eq!(verbal_label(inside, &s), Some(band.label.as_str()));
                }
            }
        }
    }
}
