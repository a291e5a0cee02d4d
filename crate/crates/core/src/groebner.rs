//! Buchberger's algorithm over the rationals with the grevlex order.
//!
//! Pairs are processed by the normal strategy (smallest lcm first, ties by
//! creation order). The coprime criterion and the Gebauer–Möller chain
//! criterion are applied in the Becker–Weispfenning `update` procedure;
//! both can be switched off for differential testing.

use std::collections::BTreeSet;
use std::num::NonZeroUsize;

use num_traits::Zero;

use crate::algebra::{Binomial, Exponent, Polynomial, Rational};
use crate::error::{check_dims, Error, PartialStats, Result};

/// Nonempty generating set of an ideal; all polynomials share `nvars` and
/// none is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    gens: Vec<Polynomial>,
    nvars: usize,
}

impl GeneratorSet {
    pub fn new(gens: Vec<Polynomial>, nvars: usize) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::EmptyInput("generator set"));
        }
        for g in &gens {
            check_dims(nvars, g.nvars())?;
            if g.is_zero() {
                return Err(Error::ZeroPolynomial("generator set"));
            }
        }
        Ok(GeneratorSet { gens, nvars })
    }

    pub fn from_binomials(gens: &[Binomial]) -> Result<Self> {
        let nvars = gens
            .first()
            .map(Binomial::nvars)
            .ok_or(Error::EmptyInput("generator set"))?;
        GeneratorSet::new(gens.iter().map(Binomial::to_polynomial).collect(), nvars)
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairStrategy {
    #[default]
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuchbergerOptions {
    pub use_coprime_criterion: bool,
    pub use_chain_criterion: bool,
    pub pair_strategy: PairStrategy,
    /// Abort with [`Error::BudgetExceeded`] once this many pairs were reduced.
    pub max_pairs: Option<NonZeroUsize>,
}

impl Default for BuchbergerOptions {
    fn default() -> Self {
        BuchbergerOptions {
            use_coprime_criterion: true,
            use_chain_criterion: true,
            pair_strategy: PairStrategy::Normal,
            max_pairs: None,
        }
    }
}

impl BuchbergerOptions {
    pub fn with_max_pairs(mut self, max_pairs: Option<usize>) -> Self {
        self.max_pairs = max_pairs.and_then(NonZeroUsize::new);
        self
    }
}

/// Reduced Gröbner basis and the complexity labels derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerResult {
    /// Monic, sorted ascending by leading monomial.
    pub basis: Vec<Polynomial>,
    pub cardinality: usize,
    pub max_total_degree: u32,
    pub pairs_processed: usize,
    pub reductions_to_zero: usize,
}

impl GroebnerResult {
    fn from_basis(basis: Vec<Polynomial>, pairs_processed: usize, reductions_to_zero: usize) -> Self {
        let (cardinality, max_total_degree) = gb_metrics(&basis);
        GroebnerResult {
            basis,
            cardinality,
            max_total_degree,
            pairs_processed,
            reductions_to_zero,
        }
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn lead_monomials(&self) -> Vec<Exponent> {
        self.basis
            .iter()
            .filter_map(|g| g.lead_monomial().cloned())
            .collect()
    }
}

/// `(cardinality, max total degree)` of a basis.
pub fn gb_metrics(basis: &[Polynomial]) -> (usize, u32) {
    let max_deg = basis.iter().map(Polynomial::total_degree).max().unwrap_or(0);
    (basis.len(), max_deg)
}

#[inline]
fn support_mask(m: &Exponent) -> u64 {
    m.entries()
        .iter()
        .take(64)
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .fold(0, |acc, (i, _)| acc | (1 << i))
}

struct Reducer {
    mask: u64,
    lead: Exponent,
    poly: Polynomial,
}

/// Divisors kept sorted ascending by leading monomial, so the first match
/// is the grevlex-smallest dividing leading monomial.
#[derive(Default)]
struct ReducerSet {
    items: Vec<Reducer>,
}

impl ReducerSet {
    fn from_polys<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> Self {
        let mut set = ReducerSet::default();
        for p in polys {
            set.insert(p.clone());
        }
        set
    }

    fn insert(&mut self, poly: Polynomial) {
        let lead = poly.lead_monomial().expect("reducers are nonzero").clone();
        let pos = self.items.partition_point(|r| r.lead <= lead);
        self.items.insert(
            pos,
            Reducer {
                mask: support_mask(&lead),
                lead,
                poly,
            },
        );
    }

    fn retain(&mut self, mut keep: impl FnMut(&Exponent) -> bool) {
        self.items.retain(|r| keep(&r.lead));
    }

    #[inline]
    fn find(&self, m: &Exponent) -> Option<&Reducer> {
        let mask = support_mask(m);
        self.items
            .iter()
            .take_while(|r| r.lead.degree() <= m.degree())
            .find(|r| r.mask & !mask == 0 && r.lead.divides_unchecked(m))
    }

    /// Full reduction: the leading term is reduced while possible, then
    /// moved to the remainder, and the process continues on the rest.
    fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let nvars = f.nvars();
        let mut remainder = Vec::new();
        let mut current = f.clone();
        while let Some(lt) = current.lead_term() {
            match self.find(&lt.monomial) {
                Some(r) => {
                    let lc = r.poly.lead_coeff().expect("nonzero reducer");
                    let c = -(&lt.coeff / lc);
                    let m = lt.monomial.div_unchecked(&r.lead);
                    current = current.add_scaled_unchecked(&c, &m, &r.poly);
                }
                None => {
                    let mut terms = current.into_terms();
                    remainder.push(terms.remove(0));
                    current = Polynomial::from_terms(terms, nvars).expect("same dimension");
                }
            }
        }
        Polynomial::from_terms(remainder, nvars).expect("same dimension")
    }
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    check_dims(f.nvars(), g.nvars())?;
    let (ft, gt) = match (f.lead_term(), g.lead_term()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::ZeroPolynomial("s_polynomial")),
    };
    Ok(s_poly_unchecked(f, &ft.monomial, &ft.coeff, g, &gt.monomial, &gt.coeff))
}

fn s_poly_unchecked(
    f: &Polynomial,
    f_lead: &Exponent,
    f_lc: &Rational,
    g: &Polynomial,
    g_lead: &Exponent,
    g_lc: &Rational,
) -> Polynomial {
    let l = f_lead.lcm_unchecked(g_lead);
    let f_part = Polynomial::zero(f.nvars()).add_scaled_unchecked(
        &f_lc.recip(),
        &l.div_unchecked(f_lead),
        f,
    );
    f_part.add_scaled_unchecked(&-g_lc.recip(), &l.div_unchecked(g_lead), g)
}

/// Remainder of `f` on division by `divisors`, fully reduced.
pub fn normal_form(f: &Polynomial, divisors: &[Polynomial]) -> Result<Polynomial> {
    for g in divisors {
        check_dims(f.nvars(), g.nvars())?;
        if g.is_zero() {
            return Err(Error::ZeroPolynomial("normal_form divisor"));
        }
    }
    Ok(ReducerSet::from_polys(divisors).normal_form(f))
}

/// Buchberger's criterion: every S-polynomial reduces to zero.
pub fn verify_groebner(basis: &[Polynomial]) -> bool {
    if basis.iter().any(Polynomial::is_zero) {
        return false;
    }
    let reducers = ReducerSet::from_polys(basis);
    for (i, f) in basis.iter().enumerate() {
        for g in &basis[i + 1..] {
            let s = match s_polynomial(f, g) {
                Ok(s) => s,
                Err(_) => return false,
            };
            if !reducers.normal_form(&s).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Interreduces a Gröbner basis into the unique reduced basis: minimal,
/// monic, tail-reduced and sorted ascending by leading monomial.
pub fn reduce_basis(basis: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let Some(first) = basis.iter().find(|g| !g.is_zero()) else {
        return Ok(Vec::new());
    };
    let nvars = first.nvars();
    for g in basis {
        check_dims(nvars, g.nvars())?;
    }
    let mut monic: Vec<Polynomial> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(Polynomial::monic)
        .collect();
    if monic.iter().any(Polynomial::is_constant) {
        return Ok(vec![Polynomial::one(nvars)]);
    }
    monic.sort_by(|a, b| a.lead_monomial().cmp(&b.lead_monomial()));

    // any divisor of a leading monomial precedes it in the ascending order
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in monic {
        let lead = g.lead_monomial().unwrap();
        if !minimal
            .iter()
            .any(|h| h.lead_monomial().unwrap().divides_unchecked(lead))
        {
            minimal.push(g);
        }
    }

    let mut reduced = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others = ReducerSet::from_polys(
            minimal
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, h)| h),
        );
        reduced.push(others.normal_form(g));
    }
    Ok(reduced)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pair {
    lcm: Exponent,
    id: u64,
    i: usize,
    j: usize,
}

struct State<'a> {
    opts: &'a BuchbergerOptions,
    polys: Vec<Polynomial>,
    leads: Vec<Exponent>,
    active: Vec<usize>,
    reducers: ReducerSet,
    pairs: BTreeSet<Pair>,
    next_id: u64,
}

impl State<'_> {
    fn update(&mut self, h: Polynomial) {
        let h_lead = h.lead_monomial().unwrap().clone();
        let h_idx = self.polys.len();

        let candidates: Vec<(usize, Exponent)> = self
            .active
            .iter()
            .map(|&g| (g, self.leads[g].lcm_unchecked(&h_lead)))
            .collect();

        let kept: Vec<(usize, Exponent)> = if self.opts.use_chain_criterion {
            let mut kept: Vec<(usize, Exponent)> = Vec::new();
            for (k, (g, l)) in candidates.iter().enumerate() {
                let coprime = self.leads[*g].is_coprime(&h_lead);
                let dominated = candidates[k + 1..]
                    .iter()
                    .chain(kept.iter())
                    .any(|(_, other)| other.divides_unchecked(l));
                if coprime || !dominated {
                    kept.push((*g, l.clone()));
                }
            }
            kept
        } else {
            candidates
        };

        let fresh: Vec<(usize, Exponent)> = kept
            .into_iter()
            .filter(|(g, _)| {
                !(self.opts.use_coprime_criterion && self.leads[*g].is_coprime(&h_lead))
            })
            .collect();

        if self.opts.use_chain_criterion {
            let leads = &self.leads;
            self.pairs.retain(|p| {
                !(h_lead.divides_unchecked(&p.lcm)
                    && leads[p.i].lcm_unchecked(&h_lead) != p.lcm
                    && leads[p.j].lcm_unchecked(&h_lead) != p.lcm)
            });
            self.active.retain(|&g| !h_lead.divides_unchecked(&leads[g]));
            self.reducers.retain(|lead| !h_lead.divides_unchecked(lead));
        }

        for (g, lcm) in fresh {
            self.pairs.insert(Pair {
                lcm,
                id: self.next_id,
                i: g,
                j: h_idx,
            });
            self.next_id += 1;
        }

        self.active.push(h_idx);
        self.leads.push(h_lead);
        self.reducers.insert(h.clone());
        self.polys.push(h);
    }
}

pub fn buchberger(gens: &GeneratorSet, opts: &BuchbergerOptions) -> Result<GroebnerResult> {
    let nvars = gens.nvars();
    if gens.gens().iter().any(Polynomial::is_constant) {
        return Ok(GroebnerResult::from_basis(vec![Polynomial::one(nvars)], 0, 0));
    }

    let mut state = State {
        opts,
        polys: Vec::new(),
        leads: Vec::new(),
        active: Vec::new(),
        reducers: ReducerSet::default(),
        pairs: BTreeSet::new(),
        next_id: 0,
    };
    for g in gens.gens() {
        state.update(g.monic());
    }

    let mut pairs_processed = 0;
    let mut reductions_to_zero = 0;
    while let Some(pair) = state.pairs.pop_first() {
        if let Some(limit) = opts.max_pairs {
            if pairs_processed >= limit.get() {
                return Err(Error::BudgetExceeded {
                    limit: limit.get(),
                    stats: PartialStats {
                        pairs_processed,
                        reductions_to_zero,
                        basis_len: state.active.len(),
                    },
                });
            }
        }
        pairs_processed += 1;

        let one = Rational::from_integer(1.into());
        let s = s_poly_unchecked(
            &state.polys[pair.i],
            &state.leads[pair.i],
            &one,
            &state.polys[pair.j],
            &state.leads[pair.j],
            &one,
        );
        let h = state.reducers.normal_form(&s);
        if h.is_zero() {
            reductions_to_zero += 1;
            continue;
        }
        if h.is_constant() {
            return Ok(GroebnerResult::from_basis(
                vec![Polynomial::one(nvars)],
                pairs_processed,
                reductions_to_zero,
            ));
        }
        state.update(h.monic());
    }

    let active: Vec<Polynomial> = state.active.iter().map(|&i| state.polys[i].clone()).collect();
    let basis = reduce_basis(&active)?;
    debug_assert!(basis.iter().all(|g| g.lead_coeff().is_some_and(|c| !c.is_zero())));
    Ok(GroebnerResult::from_basis(
        basis,
        pairs_processed,
        reductions_to_zero,
    ))
}
