use std::cmp::Ordering;
use std::fmt;

use crate::error::{check_dims, Result};

/// Exponent vector of a monomial. Variable 0 is the greatest variable.
///
/// The total degree is cached; `Ord` is the graded reverse lexicographic
/// order (vectors of different length are ordered by length first so that
/// the impl stays a lawful total order).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent {
    entries: Box<[u32]>,
    degree: u32,
}

impl Exponent {
    pub fn new(entries: impl Into<Box<[u32]>>) -> Self {
        let entries = entries.into();
        let degree = entries.iter().sum();
        Exponent { entries, degree }
    }

    pub fn one(nvars: usize) -> Self {
        Exponent {
            entries: vec![0; nvars].into_boxed_slice(),
            degree: 0,
        }
    }

    /// The monomial `x_var`.
    pub fn variable(nvars: usize, var: usize) -> Self {
        let mut entries = vec![0; nvars];
        entries[var] = 1;
        Exponent::new(entries)
    }

    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// Indices of the variables that occur with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }

    pub fn grevlex_cmp(&self, other: &Self) -> Result<Ordering> {
        check_dims(self.nvars(), other.nvars())?;
        Ok(grevlex_unchecked(self, other))
    }

    /// True iff `self` divides `other`.
    pub fn divides(&self, other: &Self) -> Result<bool> {
        check_dims(self.nvars(), other.nvars())?;
        Ok(self.divides_unchecked(other))
    }

    #[inline]
    pub(crate) fn divides_unchecked(&self, other: &Self) -> bool {
        self.degree <= other.degree
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Self) -> Result<Self> {
        check_dims(self.nvars(), other.nvars())?;
        Ok(self.lcm_unchecked(other))
    }

    pub(crate) fn lcm_unchecked(&self, other: &Self) -> Self {
        let entries: Box<[u32]> = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        Exponent::new(entries)
    }

    pub fn gcd(&self, other: &Self) -> Result<Self> {
        check_dims(self.nvars(), other.nvars())?;
        let entries: Box<[u32]> = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| *a.min(b))
            .collect();
        Ok(Exponent::new(entries))
    }

    /// True iff the two monomials share no variable.
    pub fn is_coprime(&self, other: &Self) -> bool {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dims(self.nvars(), other.nvars())?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        Exponent {
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
            degree: self.degree + other.degree,
        }
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if self.nvars() != other.nvars() || !other.divides_unchecked(self) {
            return None;
        }
        Some(self.div_unchecked(other))
    }

    pub(crate) fn div_unchecked(&self, other: &Self) -> Self {
        Exponent {
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
            degree: self.degree - other.degree,
        }
    }

    /// `self / gcd(self, other)`: the generator of the colon `(self) : (other)`.
    pub fn colon(&self, other: &Self) -> Self {
        Exponent::new(
            self.entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a.saturating_sub(*b))
                .collect::<Box<[u32]>>(),
        )
    }

    /// Caret form such as `v^2*x^2*y*z^2`, or `1` for the unit monomial.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayExponent { exp: self, names }
    }
}

struct DisplayExponent<'a> {
    exp: &'a Exponent,
    names: &'a [String],
}

impl fmt::Display for DisplayExponent<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.exp.entries.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&self.names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Conventional variable names: `x,y,z` up to three variables, `w,x,y,z`
/// for four, `v,w,x,y,z` for five, `x1..xn` beyond.
pub fn variable_names(nvars: usize) -> Vec<String> {
    const XYZ: [&str; 3] = ["x", "y", "z"];
    const VZ: [&str; 5] = ["v", "w", "x", "y", "z"];
    match nvars {
        0..=3 => XYZ[..nvars].iter().map(|s| s.to_string()).collect(),
        4 | 5 => VZ[5 - nvars..].iter().map(|s| s.to_string()).collect(),
        _ => (1..=nvars).map(|i| format!("x{i}")).collect(),
    }
}

#[inline]
pub(crate) fn grevlex_unchecked(a: &Exponent, b: &Exponent) -> Ordering {
    match a.degree.cmp(&b.degree) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for (x, y) in a.entries.iter().rev().zip(b.entries.iter().rev()) {
        if x != y {
            // smaller exponent in the last differing variable wins
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nvars()
            .cmp(&other.nvars())
            .then_with(|| grevlex_unchecked(self, other))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries)
    }
}

impl From<&[u32]> for Exponent {
    fn from(v: &[u32]) -> Self {
        Exponent::new(v.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for Exponent {
    fn from(v: [u32; N]) -> Self {
        Exponent::new(v.to_vec())
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent::new(v)
    }
}
