//! Parallel labeling of sampled ideals with their reduced-basis metrics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, PartialStats, Result};
use crate::features::{compute_features, FeatureVector};
use crate::groebner::{buchberger, BuchbergerOptions, GeneratorSet, GroebnerResult};
use crate::sampler::IdealSample;

/// The two regression targets of one ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GbLabel {
    pub size: usize,
    pub max_degree: u32,
}

impl From<&GroebnerResult> for GbLabel {
    fn from(gb: &GroebnerResult) -> Self {
        GbLabel {
            size: gb.cardinality,
            max_degree: gb.max_total_degree,
        }
    }
}

/// Which label a regressor learns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Size,
    MaxDegree,
}

impl Target {
    pub fn of(self, label: GbLabel) -> f64 {
        match self {
            Target::Size => label.size as f64,
            Target::MaxDegree => f64::from(label.max_degree),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Size => "size",
            Target::MaxDegree => "maxdeg",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(Target::Size),
            "maxdeg" | "max_degree" => Ok(Target::MaxDegree),
            other => Err(Error::InvalidArgument(format!(
                "unknown target `{other}` (expected size or maxdeg)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LabelOutcome {
    Labeled {
        label: GbLabel,
        features: Option<FeatureVector>,
    },
    /// The pair budget ran out; the row carries no label.
    Quarantined(PartialStats),
}

impl LabelOutcome {
    pub fn label(&self) -> Option<GbLabel> {
        match self {
            LabelOutcome::Labeled { label, .. } => Some(*label),
            LabelOutcome::Quarantined(_) => None,
        }
    }

    pub fn features(&self) -> Option<FeatureVector> {
        match self {
            LabelOutcome::Labeled { features, .. } => *features,
            LabelOutcome::Quarantined(_) => None,
        }
    }
}

pub fn groebner_of(sample: &IdealSample, opts: &BuchbergerOptions) -> Result<GroebnerResult> {
    buchberger(&GeneratorSet::from_binomials(&sample.gens)?, opts)
}

/// Labels one sample; with `with_features` the engineered features are
/// computed from the same basis.
pub fn label_sample(sample: &IdealSample, opts: &BuchbergerOptions, with_features: bool) -> Result<LabelOutcome> {
    match groebner_of(sample, opts) {
        Ok(gb) => {
            let features = if with_features {
                Some(compute_features(sample, &gb)?)
            } else {
                None
            };
            Ok(LabelOutcome::Labeled {
                label: GbLabel::from(&gb),
                features,
            })
        }
        Err(Error::BudgetExceeded { stats, .. }) => Ok(LabelOutcome::Quarantined(stats)),
        Err(e) => Err(e),
    }
}

/// Labels every sample on the current rayon pool; output is in input order.
pub fn label_samples(
    samples: &[IdealSample],
    opts: &BuchbergerOptions,
    with_features: bool,
) -> Result<Vec<LabelOutcome>> {
    samples
        .par_iter()
        .map(|s| label_sample(s, opts, with_features))
        .collect()
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}
