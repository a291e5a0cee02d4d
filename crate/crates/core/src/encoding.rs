//! Exponent encodings of binomial generating sets.
//!
//! An ideal with `s` generators in `n` variables becomes `2·n·s` integers:
//! generator-major, leading monomial before trailing monomial, variables in
//! declaration order. Read as an `s × 2n` matrix, each row is one binomial.

use std::cmp::Ordering;

use crate::algebra::{Binomial, Exponent};
use crate::error::{Error, Result};
use crate::sampler::IdealSample;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatEncoding {
    pub values: Vec<u32>,
}

impl FlatEncoding {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Row `i` of the `s × 2n` matrix view.
    pub fn row(&self, nvars: usize, i: usize) -> &[u32] {
        &self.values[i * 2 * nvars..(i + 1) * 2 * nvars]
    }
}

fn generator_order(a: &Binomial, b: &Binomial) -> Ordering {
    a.lead().cmp(b.lead()).then_with(|| a.trail().cmp(b.trail()))
}

/// Sorts generators descending by `(lead, trail)` under grevlex.
pub fn canonicalize(sample: &IdealSample) -> IdealSample {
    let mut gens = sample.gens.clone();
    gens.sort_by(|a, b| generator_order(b, a));
    IdealSample {
        index: sample.index,
        nvars: sample.nvars,
        gens,
    }
}

pub fn encode_flat(sample: &IdealSample, canonical: bool) -> FlatEncoding {
    let owned;
    let sample = if canonical {
        owned = canonicalize(sample);
        &owned
    } else {
        sample
    };
    let mut values = Vec::with_capacity(2 * sample.nvars * sample.gens.len());
    for g in &sample.gens {
        values.extend_from_slice(g.lead().entries());
        values.extend_from_slice(g.trail().entries());
    }
    FlatEncoding { values }
}

/// Inverse of [`encode_flat`]; the decoded sample has index 0.
pub fn decode_flat(values: &[u32], nvars: usize, gens: usize) -> Result<IdealSample> {
    let expected = 2 * nvars * gens;
    if nvars == 0 || values.len() != expected {
        return Err(Error::MalformedEncoding(format!(
            "expected {expected} values for n={nvars}, s={gens}, found {}",
            values.len()
        )));
    }
    let gens = values
        .chunks(2 * nvars)
        .enumerate()
        .map(|(i, row)| {
            let lead = Exponent::from(&row[..nvars]);
            let trail = Exponent::from(&row[nvars..]);
            Binomial::new(lead, trail).map_err(|e| match e {
                Error::MalformedEncoding(msg) => {
                    Error::MalformedEncoding(format!("generator {}: {msg}", i + 1))
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    IdealSample::new(0, nvars, gens)
}

pub fn euclidean_distance(u: &[u32], v: &[u32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Shape {
            expected: format!("{} entries", u.len()),
            found: format!("{} entries", v.len()),
        });
    }
    let sq: f64 = u
        .iter()
        .zip(v)
        .map(|(&a, &b)| {
            let d = f64::from(a) - f64::from(b);
            d * d
        })
        .sum();
    Ok(sq.sqrt())
}

/// Population statistics of the generator degrees (degree of each lead).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeStats {
    pub min: u32,
    pub max: u32,
    pub mean: f64,
    pub var: f64,
}

pub fn degree_stats(sample: &IdealSample) -> Result<DegreeStats> {
    if sample.gens.is_empty() {
        return Err(Error::EmptyInput("degree statistics"));
    }
    let degs: Vec<u32> = sample.gens.iter().map(Binomial::degree).collect();
    let n = degs.len() as f64;
    let mean = degs.iter().map(|&d| f64::from(d)).sum::<f64>() / n;
    let var = degs
        .iter()
        .map(|&d| (f64::from(d) - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(DegreeStats {
        min: *degs.iter().min().unwrap(),
        max: *degs.iter().max().unwrap(),
        mean,
        var,
    })
}
