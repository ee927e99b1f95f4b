//! Sparse multivariate polynomials over a [`Field`], kept in canonical reduced
//! form: every exponent lies in `0..q` where `q` is the field order, so two
//! polynomials are equal as functions iff they are equal term by term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::combinat::digit_sum;
use crate::field::{Field, FieldElement, FieldError};
use crate::linalg;

mod parse;

pub use parse::{parse_element, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("variable count mismatch: {0} vs {1}")]
    Arity(usize, usize),
    #[error("point has {got} coordinates, polynomial has {expected} variables")]
    PointLength { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("interpolation table has {got} entries, expected {expected}")]
    TableSize { expected: u64, got: usize },
    #[error("interpolation over {0} points is beyond the supported 2^16")]
    TooManyPoints(u64),
    #[error("`{0}` is not a single term")]
    NotATerm(String),
}

/// Exponent vector, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn new(exponents: Vec<u64>) -> Self {
        Monomial(exponents)
    }

    /// Parses a single product of variables with coefficient 1 in exactly
    /// `nvars` variables. Exponents are kept as written, not folded.
    pub fn parse(field: &Field, nvars: usize, text: &str) -> Result<Self, PolyError> {
        let mut raw = parse::parse_poly(field, text)?;
        match raw.pop() {
            Some((mut e, c)) if raw.is_empty() && c == field.one() => {
                if e.len() > nvars {
                    return Err(PolyError::Arity(e.len(), nvars));
                }
                e.resize(nvars, 0);
                Ok(Monomial(e))
            }
            _ => Err(PolyError::NotATerm(text.trim().to_string())),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// `x_i^e` in `nvars` variables (0-based `i`).
    pub fn var_power(nvars: usize, i: usize, e: u64) -> Self {
        let mut v = vec![0; nvars];
        v[i] = e;
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    /// The monomial restricted to the given variables (others zeroed).
    pub fn restrict(&self, vars: &[usize]) -> Monomial {
        let mut v = vec![0; self.0.len()];
        for &i in vars {
            v[i] = self.0[i];
        }
        Monomial(v)
    }

    fn times(&self, other: &Monomial, order: u64) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| fold_exponent(a + b, order))
                .collect(),
        )
    }

    /// Text form in the polynomial grammar, `1` for the constant monomial.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("x{}", i + 1)
                } else {
                    format!("x{}^{e}", i + 1)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the larger exponent of
    /// the earliest differing variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical exponent for a field of order `q`: `x^q = x`, so positive
/// exponents fold into `1..q` and zero stays zero.
pub fn fold_exponent(e: u64, q: u64) -> u64 {
    if e < q {
        e
    } else {
        (e - 1) % (q - 1) + 1
    }
}

/// Sparse polynomial in canonical reduced form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

/// `f = term * quotient + remainder` with no monomial of the remainder
/// divisible by `term`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermFactorization {
    pub term: Monomial,
    pub quotient: MultiPoly,
    pub remainder: MultiPoly,
}

/// Degree summary of a polynomial. The zero polynomial reports all zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub total: u64,
    pub per_var: Vec<u64>,
    /// Largest base-`p` digit sum of an exponent, per variable.
    pub digit_sum: Vec<u64>,
}

impl MultiPoly {
    pub fn zero(field: &Field, nvars: usize) -> Self {
        MultiPoly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: FieldElement) -> Self {
        Self::from_terms(field, nvars, [(Monomial::one(nvars), c)])
    }

    /// The variable `x_i` (0-based).
    pub fn var(field: &Field, nvars: usize, i: usize) -> Self {
        Self::from_terms(
            field,
            nvars,
            [(Monomial::var_power(nvars, i, 1), field.one())],
        )
    }

    /// Builds a canonical polynomial: exponents folded, like terms combined,
    /// zero coefficients dropped. Monomials must have `nvars` entries.
    pub fn from_terms<I>(field: &Field, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, FieldElement)>,
    {
        let q = field.order();
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (mono, c) in terms {
            assert_eq!(mono.nvars(), nvars, "monomial arity");
            if c.is_zero() {
                continue;
            }
            let mono = Monomial(mono.0.into_iter().map(|e| fold_exponent(e, q)).collect());
            accumulate(field, &mut map, mono, c);
        }
        MultiPoly {
            field: field.clone(),
            nvars,
            terms: map,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElement)> {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, mono: &Monomial) -> FieldElement {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    /// The same polynomial viewed in `n >= nvars` variables.
    pub fn with_nvars(&self, n: usize) -> Result<Self, PolyError> {
        if n < self.nvars && self.terms.keys().any(|m| m.0[n..].iter().any(|&e| e > 0)) {
            return Err(PolyError::Arity(self.nvars, n));
        }
        let terms = self.terms.iter().map(|(m, &c)| {
            let mut e = m.0.clone();
            e.resize(n, 0);
            (Monomial(e), c)
        });
        Ok(Self::from_terms(&self.field, n, terms))
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<(), PolyError> {
        self.field.ensure_same(&other.field)?;
        if self.nvars != other.nvars {
            return Err(PolyError::Arity(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let mut map = self.terms.clone();
        for (m, &c) in &other.terms {
            accumulate(&self.field, &mut map, m.clone(), c);
        }
        Ok(MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: map,
        })
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.neg(self.field.one()))
    }

    pub fn scale(&self, c: FieldElement) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.field, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, &x)| (m.clone(), self.field.mul(x, c)))
            .collect();
        MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let q = self.field.order();
        let mut map = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                accumulate(
                    &self.field,
                    &mut map,
                    ma.times(mb, q),
                    self.field.mul(ca, cb),
                );
            }
        }
        Ok(MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: map,
        })
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        let mut acc = f.zero();
        for (m, &c) in &self.terms {
            let mut t = c;
            for (&x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = f.mul(t, f.pow(x, e));
                    if t.is_zero() {
                        break;
                    }
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Substitutes the given values for some variables; the arity is kept and
    /// substituted variables no longer occur.
    pub fn partial_eval(&self, values: &[Option<FieldElement>]) -> Result<MultiPoly, PolyError> {
        if values.len() != self.nvars {
            return Err(PolyError::PointLength {
                expected: self.nvars,
                got: values.len(),
            });
        }
        let f = &self.field;
        let mut map = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut coeff = c;
            let mut e = m.0.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(x) = v {
                    coeff = f.mul(coeff, f.pow(*x, e[i]));
                    e[i] = 0;
                }
            }
            accumulate(f, &mut map, Monomial(e), coeff);
        }
        Ok(MultiPoly {
            field: f.clone(),
            nvars: self.nvars,
            terms: map,
        })
    }

    /// Splits `f = t * quotient + remainder` with no remainder term divisible by `t`.
    pub fn factor_term(&self, t: &Monomial) -> TermFactorization {
        let mut quotient = BTreeMap::new();
        let mut remainder = BTreeMap::new();
        for (m, &c) in &self.terms {
            if t.divides(m) {
                quotient.insert(t.quotient_of(m), c);
            } else {
                remainder.insert(m.clone(), c);
            }
        }
        let wrap = |terms| MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms,
        };
        TermFactorization {
            term: t.clone(),
            quotient: wrap(quotient),
            remainder: wrap(remainder),
        }
    }

    /// Groups terms by their part in `vars`: `f = sum_i t_i * g_i` where `t_i`
    /// only involves `vars` and `g_i` involves none of them.
    pub fn split_by_vars(&self, vars: &[usize]) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let t = m.restrict(vars);
            let mut rest = m.0.clone();
            for &i in vars {
                rest[i] = 0;
            }
            let g = out
                .entry(t)
                .or_insert_with(|| Self::zero(&self.field, self.nvars));
            accumulate(&self.field, &mut g.terms, Monomial(rest), c);
        }
        out
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u64 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Largest base-`p` digit sum of the exponent of `var` over nonzero terms.
    pub fn digit_sum_degree(&self, var: usize) -> u64 {
        let p = self.field.characteristic();
        self.terms
            .keys()
            .map(|m| digit_sum(m.0[var], p))
            .max()
            .unwrap_or(0)
    }

    pub fn degrees(&self) -> Degrees {
        Degrees {
            total: self.total_degree().unwrap_or(0),
            per_var: (0..self.nvars).map(|i| self.degree_in(i)).collect(),
            digit_sum: (0..self.nvars).map(|i| self.digit_sum_degree(i)).collect(),
        }
    }

    /// Whether any term involves `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    /// Parses the polynomial grammar, inferring the variable count from the
    /// largest index used.
    pub fn parse(field: &Field, text: &str) -> Result<Self, PolyError> {
        let raw = parse::parse_poly(field, text)?;
        let n = raw.iter().map(|(e, _)| e.len()).max().unwrap_or(0);
        Ok(Self::from_raw(field, n, raw))
    }

    /// Parses in exactly `nvars` variables.
    pub fn parse_with_nvars(field: &Field, nvars: usize, text: &str) -> Result<Self, PolyError> {
        let raw = parse::parse_poly(field, text)?;
        if let Some(n) = raw.iter().map(|(e, _)| e.len()).max() {
            if n > nvars {
                return Err(PolyError::Arity(n, nvars));
            }
        }
        Ok(Self::from_raw(field, nvars, raw))
    }

    fn from_raw(field: &Field, n: usize, raw: Vec<(Vec<u64>, FieldElement)>) -> Self {
        Self::from_terms(
            field,
            n,
            raw.into_iter().map(|(mut e, c)| {
                e.resize(n, 0);
                (Monomial(e), c)
            }),
        )
    }

    /// Random canonical polynomial with up to `term_count` distinct terms of
    /// total degree at most `max_total_degree`. Deterministic in `seed`.
    pub fn random(
        field: &Field,
        nvars: usize,
        max_total_degree: u64,
        term_count: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(field, nvars, max_total_degree, term_count, &mut rng)
    }

    pub fn random_with<R: Rng + ?Sized>(
        field: &Field,
        nvars: usize,
        max_total_degree: u64,
        term_count: usize,
        rng: &mut R,
    ) -> Self {
        let cap = field.order() - 1;
        let mut map = BTreeMap::new();
        let mut attempts = 0;
        while map.len() < term_count && attempts < 50 * term_count.max(1) {
            attempts += 1;
            let target = rng.gen_range(0..=max_total_degree);
            let mut e = vec![0u64; nvars];
            let mut left = target;
            // scatter `target` units over random variables respecting the cap
            let mut guard = 0;
            while left > 0 && nvars > 0 && guard < 10 * (target as usize + 1) {
                guard += 1;
                let i = rng.gen_range(0..nvars);
                if e[i] < cap {
                    e[i] += 1;
                    left -= 1;
                }
            }
            map.entry(Monomial(e))
                .or_insert_with(|| field.random_nonzero(rng));
        }
        MultiPoly {
            field: field.clone(),
            nvars,
            terms: map,
        }
    }

    /// The unique canonical polynomial matching a function table. Entry
    /// `sum_i k_i q^i` holds the value at the point whose `i`-th coordinate has
    /// packed index `k_i`. Limited to `q^n <= 2^16` points.
    pub fn interpolate(
        field: &Field,
        nvars: usize,
        table: &[FieldElement],
    ) -> Result<Self, PolyError> {
        let q = field.order();
        let points = (0..nvars)
            .try_fold(1u64, |acc, _| acc.checked_mul(q))
            .unwrap_or(u64::MAX);
        if points > 1 << 16 {
            return Err(PolyError::TooManyPoints(points));
        }
        if table.len() as u64 != points {
            return Err(PolyError::TableSize {
                expected: points,
                got: table.len(),
            });
        }
        // Evaluation matrix is V (x) ... (x) V with V[k][e] = x_k^e; undo V along each axis.
        let vandermonde: Vec<Vec<FieldElement>> = field
            .elements()
            .map(|x| (0..q).map(|e| field.pow(x, e)).collect())
            .collect();
        let vinv = linalg::invert(field, &vandermonde)
            .expect("Vandermonde over all elements is invertible");
        let q = q as usize;
        let mut data = table.to_vec();
        let mut stride = 1usize;
        for _ in 0..nvars {
            let mut next = data.clone();
            for base in 0..data.len() {
                if !(base / stride).is_multiple_of(q) {
                    continue;
                }
                for e in 0..q {
                    let mut acc = field.zero();
                    for k in 0..q {
                        acc = field.add(acc, field.mul(vinv[e][k], data[base + k * stride]));
                    }
                    next[base + e * stride] = acc;
                }
            }
            data = next;
            stride *= q;
        }
        let terms = data.into_iter().enumerate().map(|(idx, c)| {
            let mut e = vec![0u64; nvars];
            let mut rest = idx;
            for slot in e.iter_mut() {
                *slot = (rest % q) as u64;
                rest /= q;
            }
            (Monomial(e), c)
        });
        Ok(Self::from_terms(field, nvars, terms))
    }

    /// Function table in the layout used by [`MultiPoly::interpolate`].
    pub fn table(&self) -> Vec<FieldElement> {
        let q = self.field.order();
        let size = (0..self.nvars).fold(1u64, |acc, _| acc * q);
        let mut point = vec![self.field.zero(); self.nvars];
        (0..size)
            .map(|idx| {
                let mut rest = idx;
                for x in point.iter_mut() {
                    *x = self.field.element(rest % q).expect("in range");
                    rest /= q;
                }
                self.eval_unchecked(&point)
            })
            .collect()
    }
}

fn accumulate(
    field: &Field,
    map: &mut BTreeMap<Monomial, FieldElement>,
    m: Monomial,
    c: FieldElement,
) {
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            let s = field.add(*o.get(), c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = self.field.format_element(c);
            let coeff = if coeff.contains(['+', '*']) || coeff == "a" || coeff.starts_with("a^") {
                format!("({coeff})")
            } else {
                coeff
            };
            if m.is_constant() {
                write!(f, "{coeff}")?;
            } else if c == self.field.one() {
                write!(f, "{}", m.to_text())?;
            } else {
                write!(f, "{coeff}*{}", m.to_text())?;
            }
        }
        Ok(())
    }
}
