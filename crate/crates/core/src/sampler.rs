//! Random binomial ideals in the n-d-s model.
//!
//! Each generator is the difference of two distinct monomials drawn
//! uniformly either among monomials of degree exactly `d` or among all
//! nonconstant monomials of degree at most `d`. Uniformity comes from
//! unranking a uniformly drawn integer.

use std::fmt;
use std::str::FromStr;

use num_integer::binomial;
use rayon::prelude::*;

use crate::algebra::{Binomial, Exponent};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Every monomial has degree exactly `d` (homogeneous generators).
    Exact,
    /// Monomials of degree `1..=d`.
    UpTo,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMode::Exact => "exact",
            SamplingMode::UpTo => "upto",
        })
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "homogeneous" => Ok(SamplingMode::Exact),
            "upto" | "up-to" | "general" => Ok(SamplingMode::UpTo),
            other => Err(Error::InvalidArgument(format!(
                "unknown sampling mode `{other}` (expected exact or upto)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomModel {
    pub nvars: usize,
    pub degree: u32,
    pub gens: usize,
    pub mode: SamplingMode,
    pub seed: u64,
}

impl RandomModel {
    pub fn new(nvars: usize, degree: u32, gens: usize, mode: SamplingMode, seed: u64) -> Result<Self> {
        if nvars == 0 || degree == 0 || gens == 0 {
            return Err(Error::InvalidArgument(format!(
                "model needs n, d, s >= 1 (got n={nvars}, d={degree}, s={gens})"
            )));
        }
        let model = RandomModel {
            nvars,
            degree,
            gens,
            mode,
            seed,
        };
        if model.support_size() < 2 {
            return Err(Error::InvalidArgument(format!(
                "n={nvars}, d={degree} ({mode}) offers fewer than two monomials; no binomial exists"
            )));
        }
        Ok(model)
    }

    /// Number of distinct monomials the model can draw.
    pub fn support_size(&self) -> u128 {
        match self.mode {
            SamplingMode::Exact => count_monomials(self.nvars, self.degree),
            SamplingMode::UpTo => (1..=self.degree).map(|k| count_monomials(self.nvars, k)).sum(),
        }
    }
}

/// A sampled generating set. `index` is the ordinal within its dataset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealSample {
    pub index: u64,
    pub nvars: usize,
    pub gens: Vec<Binomial>,
}

impl IdealSample {
    pub fn new(index: u64, nvars: usize, gens: Vec<Binomial>) -> Result<Self> {
        for g in &gens {
            if g.nvars() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: g.nvars(),
                });
            }
        }
        Ok(IdealSample { index, nvars, gens })
    }
}

/// Monomials of total degree exactly `k` in `n` variables: `C(k+n-1, n-1)`.
pub fn count_monomials(n: usize, k: u32) -> u128 {
    assert!(n >= 1, "at least one variable");
    binomial(k as u128 + n as u128 - 1, n as u128 - 1)
}

/// The `rank`-th exponent vector of degree `k`, in descending lexicographic
/// order: `(k,0,…,0)` has rank 0 and `(0,…,0,k)` the last rank.
pub fn unrank_monomial(n: usize, k: u32, rank: u128) -> Result<Exponent> {
    let count = count_monomials(n, k);
    if rank >= count {
        return Err(Error::RankOutOfRange { rank, count });
    }
    let mut entries = vec![0u32; n];
    let mut rest = k;
    let mut r = rank;
    for (i, slot) in entries[..n - 1].iter_mut().enumerate() {
        let mut e = rest;
        loop {
            let block = count_monomials(n - 1 - i, rest - e);
            if r < block {
                break;
            }
            r -= block;
            e -= 1;
        }
        *slot = e;
        rest -= e;
    }
    entries[n - 1] = rest;
    Ok(Exponent::new(entries))
}

pub fn sample_monomial(model: &RandomModel, rng: &mut SplitMix64) -> Exponent {
    let n = model.nvars;
    match model.mode {
        SamplingMode::Exact => {
            let r = rng.below_u128(count_monomials(n, model.degree));
            unrank_monomial(n, model.degree, r).expect("rank in range")
        }
        SamplingMode::UpTo => {
            // one uniform draw over all degrees 1..=d; degree k is hit with
            // probability proportional to its monomial count
            let mut r = rng.below_u128(model.support_size());
            for k in 1..=model.degree {
                let c = count_monomials(n, k);
                if r < c {
                    return unrank_monomial(n, k, r).expect("rank in range");
                }
                r -= c;
            }
            unreachable!("rank below support size")
        }
    }
}

/// Sample `index` of the dataset described by `model`; a pure function of
/// `(model, index)`.
pub fn sample_ideal(model: &RandomModel, index: u64) -> IdealSample {
    let mut rng = SplitMix64::stream(model.seed, index);
    let gens = (0..model.gens)
        .map(|_| {
            let a = sample_monomial(model, &mut rng);
            let mut b = sample_monomial(model, &mut rng);
            while b == a {
                b = sample_monomial(model, &mut rng);
            }
            Binomial::from_pair(a, b).expect("distinct monomials of equal length")
        })
        .collect();
    IdealSample {
        index,
        nvars: model.nvars,
        gens,
    }
}

/// Samples `0..count` on the current rayon pool, returned in index order.
pub fn sample_ideals(model: &RandomModel, count: u64) -> Vec<IdealSample> {
    (0..count)
        .into_par_iter()
        .map(|i| sample_ideal(model, i))
        .collect()
}
