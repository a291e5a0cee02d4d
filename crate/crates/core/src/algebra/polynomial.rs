use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::exponent::{grevlex_unchecked, Exponent};
use super::Rational;
use crate::error::{check_dims, Error, Result};

/// A nonzero coefficient times a monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub coeff: Rational,
    pub monomial: Exponent,
}

impl Term {
    pub fn new(coeff: Rational, monomial: Exponent) -> Self {
        Term { coeff, monomial }
    }
}

/// Sparse polynomial over the rationals. Terms are kept strictly descending
/// under grevlex with no zero coefficients; an empty term list is zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: Vec<Term>,
    nvars: usize,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            terms: Vec::new(),
            nvars,
        }
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::monomial(Rational::one(), Exponent::one(nvars))
    }

    pub fn monomial(coeff: Rational, monomial: Exponent) -> Self {
        let nvars = monomial.nvars();
        if coeff.is_zero() {
            return Polynomial::zero(nvars);
        }
        Polynomial {
            terms: vec![Term::new(coeff, monomial)],
            nvars,
        }
    }

    /// `a - b`.
    pub fn difference(a: Exponent, b: Exponent) -> Result<Self> {
        Polynomial::from_terms(
            vec![
                Term::new(Rational::one(), a.clone()),
                Term::new(-Rational::one(), b),
            ],
            a.nvars(),
        )
    }

    /// Sorts, combines like monomials and drops zero coefficients.
    pub fn from_terms(mut raw: Vec<Term>, nvars: usize) -> Result<Self> {
        for t in &raw {
            check_dims(nvars, t.monomial.nvars())?;
        }
        raw.sort_by(|a, b| grevlex_unchecked(&b.monomial, &a.monomial));
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.monomial == t.monomial => last.coeff += t.coeff,
                _ => {
                    if terms.last().is_some_and(|l| l.coeff.is_zero()) {
                        terms.pop();
                    }
                    terms.push(t);
                }
            }
        }
        if terms.last().is_some_and(|l| l.coeff.is_zero()) {
            terms.pop();
        }
        Ok(Polynomial { terms, nvars })
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].monomial.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn lead_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    #[inline]
    pub fn lead_monomial(&self) -> Option<&Exponent> {
        self.terms.first().map(|t| &t.monomial)
    }

    pub fn lead_coeff(&self) -> Option<&Rational> {
        self.terms.first().map(|t| &t.coeff)
    }

    /// Largest total degree among the terms; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.monomial.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms
            .windows(2)
            .all(|w| w[0].monomial.degree() == w[1].monomial.degree())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(&t.coeff * c, t.monomial.clone()))
                .collect(),
            nvars: self.nvars,
        }
    }

    /// Scales so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.lead_coeff() {
            Some(lc) if !lc.is_one() => self.scale(&lc.recip()),
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(&Rational::one(), &Exponent::one(self.nvars), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(&-Rational::one(), &Exponent::one(self.nvars), other)
    }

    /// `self + c·m·g` by a single merge of the two sorted term lists.
    pub fn add_scaled(&self, c: &Rational, m: &Exponent, g: &Self) -> Result<Self> {
        check_dims(self.nvars, g.nvars)?;
        check_dims(self.nvars, m.nvars())?;
        if c.is_zero() || g.is_zero() {
            return Ok(self.clone());
        }
        Ok(self.add_scaled_unchecked(c, m, g))
    }

    pub(crate) fn add_scaled_unchecked(&self, c: &Rational, m: &Exponent, g: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut lhs = self.terms.iter().peekable();
        let mut rhs = g
            .terms
            .iter()
            .map(|t| Term::new(&t.coeff * c, t.monomial.mul_unchecked(m)))
            .peekable();
        loop {
            let ord = match (lhs.peek(), rhs.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(a), Some(b)) => grevlex_unchecked(&a.monomial, &b.monomial),
            };
            match ord {
                Ordering::Greater => out.push(lhs.next().unwrap().clone()),
                Ordering::Less => out.push(rhs.next().unwrap()),
                Ordering::Equal => {
                    let a = lhs.next().unwrap();
                    let b = rhs.next().unwrap();
                    let coeff = &a.coeff + b.coeff;
                    if !coeff.is_zero() {
                        out.push(Term::new(coeff, b.monomial));
                    }
                }
            }
        }
        Polynomial {
            terms: out,
            nvars: self.nvars,
        }
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayPoly { poly: self, names }
    }
}

/// `f + c·m·g`, the single reduction step used by division.
pub fn poly_add_scaled(
    f: &Polynomial,
    c: &Rational,
    m: &Exponent,
    g: &Polynomial,
) -> Result<Polynomial> {
    f.add_scaled(c, m, g)
}

pub fn poly_normalize(raw: Vec<Term>, nvars: usize) -> Result<Polynomial> {
    Polynomial::from_terms(raw, nvars)
}

/// Two-term polynomial `lead - trail` with unit coefficients and
/// `lead ≻ trail` under grevlex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Binomial {
    lead: Exponent,
    trail: Exponent,
}

impl Binomial {
    pub fn new(lead: Exponent, trail: Exponent) -> Result<Self> {
        match lead.grevlex_cmp(&trail)? {
            Ordering::Greater => Ok(Binomial { lead, trail }),
            Ordering::Equal => Err(Error::MalformedEncoding(format!(
                "binomial terms coincide: {lead:?}"
            ))),
            Ordering::Less => Err(Error::MalformedEncoding(format!(
                "leading monomial {lead:?} is not greater than trailing {trail:?}"
            ))),
        }
    }

    /// Orders two distinct monomials lead-first.
    pub fn from_pair(a: Exponent, b: Exponent) -> Result<Self> {
        if a.grevlex_cmp(&b)? == Ordering::Less {
            Binomial::new(b, a)
        } else {
            Binomial::new(a, b)
        }
    }

    pub fn lead(&self) -> &Exponent {
        &self.lead
    }

    pub fn trail(&self) -> &Exponent {
        &self.trail
    }

    pub fn nvars(&self) -> usize {
        self.lead.nvars()
    }

    /// Total degree of the leading monomial.
    pub fn degree(&self) -> u32 {
        self.lead.degree()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial {
            terms: vec![
                Term::new(Rational::one(), self.lead.clone()),
                Term::new(-Rational::one(), self.trail.clone()),
            ],
            nvars: self.nvars(),
        }
    }
}

struct DisplayPoly<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.poly.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = t.coeff.abs();
            let mono = t.monomial.display_with(self.names);
            if t.monomial.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = super::exponent::variable_names(self.nvars);
        let shown = self.display_with(&names).to_string();
        f.write_str(&shown)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    pub fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    pub fn t<const N: usize>(c: i64, m: [u32; N]) -> Term {
        Term::new(q(c), Exponent::from(m))
    }

    pub fn p<const N: usize>(terms: &[(i64, [u32; N])]) -> Polynomial {
        Polynomial::from_terms(terms.iter().map(|(c, m)| t(*c, *m)).collect(), N).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert!(p(&[(1, [1, 0]), (-1, [1, 0])]).is_zero());
        let f = p(&[(-1, [0, 1]), (1, [2, 0])]);
        assert_eq!(f.terms()[0].monomial, Exponent::from([2, 0]));
        assert_eq!(f.terms()[1].coeff, q(-1));
        let g = p(&[(1, [1, 0]), (1, [1, 0])]);
        assert_eq!(g.terms(), &[t(2, [1, 0])]);
    }

    #[test]
    fn normalize_rejects_mixed_dimensions() {
        let err = Polynomial::from_terms(vec![t(1, [1, 0]), t(1, [1, 0, 0])], 2).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn add_scaled_examples() {
        // f = x^2 y, g = x^2 - y, c = -1, m = y  ->  y^2
        let f = p(&[(1, [2, 1])]);
        let g = p(&[(1, [2, 0]), (-1, [0, 1])]);
        let r = poly_add_scaled(&f, &q(-1), &Exponent::from([0, 1]), &g).unwrap();
        assert_eq!(r, p(&[(1, [0, 2])]));
        assert_eq!(poly_add_scaled(&f, &q(0), &Exponent::from([1, 1]), &g).unwrap(), f);
        let zero = Polynomial::zero(2);
        assert_eq!(poly_add_scaled(&zero, &q(1), &Exponent::one(2), &g).unwrap(), g);
        assert!(poly_add_scaled(&zero, &q(1), &Exponent::one(3), &g).is_err());
    }

    #[test]
    fn binomial_ordering() {
        let b = Binomial::from_pair(Exponent::from([0, 1]), Exponent::from([2, 0])).unwrap();
        assert_eq!(b.lead(), &Exponent::from([2, 0]));
        assert!(Binomial::new(Exponent::from([0, 1]), Exponent::from([2, 0])).is_err());
        assert!(Binomial::new(Exponent::from([1, 1]), Exponent::from([1, 1])).is_err());
        let names = super::super::variable_names(2);
        assert_eq!(b.to_polynomial().display_with(&names).to_string(), "x^2 - y");
    }

    #[test]
    fn display_rational_coefficients() {
        let f = Polynomial::from_terms(
            vec![
                Term::new(Rational::new(BigInt::from(-3), BigInt::from(2)), Exponent::from([1, 0])),
                Term::new(q(2), Exponent::from([0, 0])),
            ],
            2,
        )
        .unwrap();
        let names = super::super::variable_names(2);
        assert_eq!(f.display_with(&names).to_string(), "-3/2*x + 2");
    }

    fn term_strategy(n: usize) -> impl Strategy<Value = Term> {
        (-9i64..=9, 1i64..=4, prop::collection::vec(0u32..=4, n)).prop_filter_map(
            "nonzero",
            |(num, den, m)| {
                (num != 0).then(|| {
                    Term::new(
                        Rational::new(BigInt::from(num), BigInt::from(den)),
                        Exponent::new(m),
                    )
                })
            },
        )
    }

    fn raw_terms(n: usize) -> impl Strategy<Value = Vec<Term>> {
        prop::collection::vec(term_strategy(n), 0..8)
    }

    fn product(f: &Polynomial, g: &Polynomial) -> Polynomial {
        f.terms().iter().fold(Polynomial::zero(f.nvars()), |acc, t| {
            poly_add_scaled(&acc, &t.coeff, &t.monomial, g).unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalize_idempotent_and_order_insensitive(mut raw in raw_terms(3)) {
            let f = poly_normalize(raw.clone(), 3).unwrap();
            prop_assert_eq!(poly_normalize(f.terms().to_vec(), 3).unwrap(), f.clone());
            raw.reverse();
            prop_assert_eq!(poly_normalize(raw, 3).unwrap(), f.clone());
            for w in f.terms().windows(2) {
                prop_assert_eq!(w[0].monomial.cmp(&w[1].monomial), Ordering::Greater);
            }
        }

        #[test]
        fn add_then_sub_is_exact(a in raw_terms(3), b in raw_terms(3)) {
            let f = poly_normalize(a, 3).unwrap();
            let g = poly_normalize(b, 3).unwrap();
            prop_assert_eq!(f.add(&g).unwrap().sub(&g).unwrap(), f);
        }

        #[test]
        fn leading_term_is_multiplicative(a in raw_terms(3), b in raw_terms(3)) {
            let f = poly_normalize(a, 3).unwrap();
            let g = poly_normalize(b, 3).unwrap();
            prop_assume!(!f.is_zero() && !g.is_zero());
            let fg = product(&f, &g);
            let (lf, lg) = (f.lead_term().unwrap(), g.lead_term().unwrap());
            let lt = fg.lead_term().unwrap();
            prop_assert_eq!(&lt.coeff, &(&lf.coeff * &lg.coeff));
            prop_assert_eq!(&lt.monomial, &lf.monomial.mul(&lg.monomial).unwrap());
        }
    }
}
