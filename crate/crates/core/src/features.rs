//! Engineered ideal features: generator degree statistics plus the
//! dimension and degree of the variety, both read off the initial ideal of
//! the reduced Gröbner basis.

use crate::algebra::Exponent;
use crate::encoding::degree_stats;
use crate::error::{Error, Result};
use crate::groebner::GroebnerResult;
use crate::sampler::IdealSample;

/// Column order used by feature matrices and the features CSV.
pub const FEATURE_COLUMNS: [&str; 7] = [
    "min_deg", "max_deg", "mean_deg", "var_deg", "num_gens", "dim", "degree",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector {
    pub min_deg: u32,
    pub max_deg: u32,
    pub mean_deg: f64,
    pub var_deg: f64,
    pub num_gens: usize,
    /// Krull dimension of `R/I`; −1 for the unit ideal.
    pub dim: i32,
    /// Degree of the variety; 0 for the unit ideal.
    pub degree: u64,
}

impl FeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            f64::from(self.min_deg),
            f64::from(self.max_deg),
            self.mean_deg,
            self.var_deg,
            self.num_gens as f64,
            f64::from(self.dim),
            self.degree as f64,
        ]
    }
}

pub fn compute_features(sample: &IdealSample, gb: &GroebnerResult) -> Result<FeatureVector> {
    let stats = degree_stats(sample)?;
    let n = sample.nvars;
    let leads = gb.lead_monomials();
    let dim = krull_dimension(&leads, n);
    let degree = if dim < 0 {
        0
    } else {
        variety_degree(&hilbert_numerator(&leads, n), n, dim)?
    };
    Ok(FeatureVector {
        min_deg: stats.min,
        max_deg: stats.max,
        mean_deg: stats.mean,
        var_deg: stats.var,
        num_gens: sample.gens.len(),
        dim,
        degree,
    })
}

/// Drops generators divisible by another one (and duplicates).
pub fn minimalize(gens: &[Exponent]) -> Vec<Exponent> {
    let mut sorted: Vec<Exponent> = gens.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<Exponent> = Vec::with_capacity(sorted.len());
    for m in sorted {
        // divisors precede their multiples in any monomial order
        if !out.iter().any(|d| d.divides_unchecked(&m)) {
            out.push(m);
        }
    }
    out
}

/// Krull dimension of `R/I` for the monomial ideal generated by `gens`:
/// `n` minus the size of a smallest variable set meeting every generator's
/// support. −1 for the unit ideal, `n` for the zero ideal.
pub fn krull_dimension(gens: &[Exponent], n: usize) -> i32 {
    let min = minimalize(gens);
    if min.iter().any(Exponent::is_one) {
        return -1;
    }
    let supports: Vec<u64> = min
        .iter()
        .map(|m| m.support().fold(0u64, |acc, i| acc | (1 << i)))
        .collect();
    let mut best = n;
    min_transversal(&supports, 0, 0, &mut best);
    (n - best) as i32
}

fn min_transversal(supports: &[u64], chosen: u64, size: usize, best: &mut usize) {
    if size >= *best {
        return;
    }
    let unhit = supports
        .iter()
        .filter(|&&s| s & chosen == 0)
        .min_by_key(|s| s.count_ones());
    let Some(&support) = unhit else {
        *best = size;
        return;
    };
    let mut bits = support;
    while bits != 0 {
        let v = bits & bits.wrapping_neg();
        min_transversal(supports, chosen | v, size + 1, best);
        bits &= bits - 1;
    }
}

/// Numerator `N(t)` of the Hilbert series `N(t)/(1−t)^n` of `R/I`;
/// `coeffs[i]` is the coefficient of `t^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertNumerator {
    pub coeffs: Vec<i64>,
}

impl HilbertNumerator {
    fn from_coeffs(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        HilbertNumerator { coeffs }
    }

    fn one() -> Self {
        HilbertNumerator { coeffs: vec![1] }
    }

    /// `1 − t^k`
    fn one_minus_power(k: u32) -> Self {
        let mut c = vec![0; k as usize + 1];
        c[0] += 1;
        c[k as usize] -= 1;
        HilbertNumerator::from_coeffs(c)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return HilbertNumerator { coeffs: Vec::new() };
        }
        let mut c = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        HilbertNumerator::from_coeffs(c)
    }

    /// `self + t^shift · other`
    fn add_shifted(&self, other: &Self, shift: usize) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len() + shift);
        let mut c = vec![0i64; len];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i] += a;
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            c[i + shift] += b;
        }
        HilbertNumerator::from_coeffs(c)
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// First `len` coefficients of the series `N(t)/(1−t)^n`, i.e. the
    /// Hilbert function of `R/I` in degrees `0..len`.
    pub fn series(&self, n: usize, len: usize) -> Vec<i64> {
        let mut s: Vec<i64> = (0..len).map(|i| self.coeffs.get(i).copied().unwrap_or(0)).collect();
        for _ in 0..n {
            for i in 1..len {
                s[i] += s[i - 1];
            }
        }
        s
    }
}

/// How the splitting monomial of the Hilbert recursion is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotRule {
    /// Variable occurring in the most non-pure-power generators, raised to
    /// the smallest positive exponent it has among them.
    #[default]
    MostFrequent,
    /// Lowest-index such variable, to the smallest positive exponent.
    FirstVariable,
    /// Lowest-index such variable, to the first power.
    SingleVariable,
}

pub fn hilbert_numerator(gens: &[Exponent], n: usize) -> HilbertNumerator {
    hilbert_numerator_with(gens, n, PivotRule::default())
}

/// Pivot recursion `N(I) = N(I + (p)) + t^{deg p} · N(I : p)`, with
/// products of `1 − t^a` when only pure powers remain.
pub fn hilbert_numerator_with(gens: &[Exponent], n: usize, rule: PivotRule) -> HilbertNumerator {
    numerator_rec(minimalize(gens), n, rule)
}

fn numerator_rec(gens: Vec<Exponent>, n: usize, rule: PivotRule) -> HilbertNumerator {
    if gens.is_empty() {
        return HilbertNumerator::one();
    }
    if gens.iter().any(Exponent::is_one) {
        return HilbertNumerator { coeffs: Vec::new() };
    }
    if gens.len() == 1 {
        return HilbertNumerator::one_minus_power(gens[0].degree());
    }
    let mixed: Vec<&Exponent> = gens.iter().filter(|m| m.support().count() > 1).collect();
    if mixed.is_empty() {
        // minimal pure powers lie in distinct variables
        return gens
            .iter()
            .fold(HilbertNumerator::one(), |acc, m| acc.mul(&HilbertNumerator::one_minus_power(m.degree())));
    }

    let pivot = choose_pivot(&mixed, n, rule);
    let with_pivot = {
        let mut g = gens.clone();
        g.push(pivot.clone());
        minimalize(&g)
    };
    let quotient = minimalize(&gens.iter().map(|m| m.colon(&pivot)).collect::<Vec<_>>());
    numerator_rec(with_pivot, n, rule)
        .add_shifted(&numerator_rec(quotient, n, rule), pivot.degree() as usize)
}

fn choose_pivot(mixed: &[&Exponent], n: usize, rule: PivotRule) -> Exponent {
    let mut freq = vec![0usize; n];
    for m in mixed {
        for v in m.support() {
            freq[v] += 1;
        }
    }
    let var = match rule {
        PivotRule::MostFrequent => (0..n).max_by_key(|&v| (freq[v], std::cmp::Reverse(v))).unwrap(),
        PivotRule::FirstVariable | PivotRule::SingleVariable => (0..n).find(|&v| freq[v] > 0).unwrap(),
    };
    let exp = match rule {
        PivotRule::SingleVariable => 1,
        _ => mixed
            .iter()
            .map(|m| m.entries()[var])
            .filter(|&e| e > 0)
            .min()
            .unwrap(),
    };
    let mut entries = vec![0u32; n];
    entries[var] = exp;
    Exponent::new(entries)
}

/// Degree of the variety: `Q(1)` where `N(t) = (1−t)^{n−dim} · Q(t)`.
pub fn variety_degree(numerator: &HilbertNumerator, n: usize, dim: i32) -> Result<u64> {
    if dim < 0 || dim as usize > n {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} outside 0..={n}"
        )));
    }
    let mut q = numerator.coeffs.clone();
    for _ in 0..n - dim as usize {
        // divide by (1 − t): quotient coefficients are prefix sums, and the
        // remainder N(1) must vanish
        if q.iter().sum::<i64>() != 0 {
            return Err(Error::Inconsistent(format!(
                "(1-t)^{} does not divide the Hilbert numerator {:?}",
                n - dim as usize,
                numerator.coeffs
            )));
        }
        let mut acc = 0;
        let mut next = Vec::with_capacity(q.len().saturating_sub(1));
        for &c in &q[..q.len().saturating_sub(1)] {
            acc += c;
            next.push(acc);
        }
        q = next;
    }
    let value: i64 = q.iter().sum();
    if value <= 0 {
        return Err(Error::Inconsistent(format!(
            "dimension {dim} leaves Q(1) = {value} for numerator {:?}",
            numerator.coeffs
        )));
    }
    Ok(value as u64)
}
