//! Cube attack over a finite field: maxterm search against a keyed black box
//! (preprocessing) and key recovery from the stored linear forms (online).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::blackbox::{BlackBox, EvalError};
use crate::diff::{DiffError, DiffPlan, Grid};
use crate::field::{Field, FieldElement};
use crate::linalg::{gaussian_solve, EchelonBasis, LinearSystem, Solution};
use crate::poly::{Monomial, MultiPoly};

mod records;

pub use records::{RecordError, RecordFile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttackError {
    #[error("term has {got} variables, the black box has {expected} public inputs")]
    TermArity { expected: usize, got: usize },
    #[error("at least one linearity trial is required")]
    NoTrials,
    #[error("record has {got} secret coefficients, expected {expected}")]
    RecordWidth { expected: usize, got: usize },
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A function `f(public, secret)` that can only be evaluated. Implementations
/// must be deterministic and callable from several threads at once.
pub trait KeyedBlackBox: Sync {
    fn field(&self) -> &Field;
    fn n_pub(&self) -> usize;
    fn n_sec(&self) -> usize;
    fn eval(
        &self,
        public: &[FieldElement],
        secret: &[FieldElement],
    ) -> Result<FieldElement, EvalError>;
}

impl<K: KeyedBlackBox + ?Sized> KeyedBlackBox for &K {
    fn field(&self) -> &Field {
        (**self).field()
    }
    fn n_pub(&self) -> usize {
        (**self).n_pub()
    }
    fn n_sec(&self) -> usize {
        (**self).n_sec()
    }
    fn eval(
        &self,
        public: &[FieldElement],
        secret: &[FieldElement],
    ) -> Result<FieldElement, EvalError> {
        (**self).eval(public, secret)
    }
}

/// A polynomial whose first `n_pub` variables are public and the rest secret.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPoly {
    poly: MultiPoly,
    n_pub: usize,
}

impl SplitPoly {
    pub fn new(poly: MultiPoly, n_pub: usize) -> Self {
        assert!(
            n_pub <= poly.nvars(),
            "more public variables than variables"
        );
        SplitPoly { poly, n_pub }
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }
}

impl KeyedBlackBox for SplitPoly {
    fn field(&self) -> &Field {
        self.poly.field()
    }

    fn n_pub(&self) -> usize {
        self.n_pub
    }

    fn n_sec(&self) -> usize {
        self.poly.nvars() - self.n_pub
    }

    fn eval(
        &self,
        public: &[FieldElement],
        secret: &[FieldElement],
    ) -> Result<FieldElement, EvalError> {
        let point: Vec<FieldElement> = public.iter().chain(secret).copied().collect();
        self.poly
            .evaluate(&point)
            .map_err(|e| EvalError(e.to_string()))
    }
}

/// The public-input function obtained by fixing the key.
pub struct FixedKey<'a, K: ?Sized> {
    inner: &'a K,
    key: Vec<FieldElement>,
}

impl<'a, K: KeyedBlackBox + ?Sized> FixedKey<'a, K> {
    pub fn new(inner: &'a K, key: Vec<FieldElement>) -> Self {
        assert_eq!(key.len(), inner.n_sec(), "key length");
        FixedKey { inner, key }
    }
}

impl<K: KeyedBlackBox + ?Sized> BlackBox for FixedKey<'_, K> {
    fn field(&self) -> &Field {
        self.inner.field()
    }

    fn arity(&self) -> usize {
        self.inner.n_pub()
    }

    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError> {
        self.inner.eval(point, &self.key)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    LikelyLinear,
    Nonlinear,
    Constant,
}

/// Default number of linearity trials for characteristic `p`.
///
/// A trial compares `a F(y) + b F(z)` with `F(a y + b z)` where
/// `F = f_t(0, .) - f_t(0, 0)`. When `F` is a polynomial of degree `2 <= e < p`
/// the difference of the two sides is a nonzero polynomial of degree at most
/// `e + 1` in the random inputs, so a trial passes with probability at most
/// `(e + 1)/p`. Twelve trials give `2^-20` or less once `p >= 7 (e + 1)`
/// roughly; for small `p` the bound is weak and twenty trials are used.
pub fn default_trials(p: u64) -> usize {
    if p >= 5 {
        12
    } else {
        20
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearityOutcome {
    pub verdict: Verdict,
    /// `f_t(0, 0)`.
    pub c0: FieldElement,
    pub evaluations: u64,
}

/// Stored maxterm: `f_t(0, x) = c0 + sum_i c_i x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxtermRecord {
    pub term: Monomial,
    pub c0: FieldElement,
    pub c: Vec<FieldElement>,
    pub evaluations: u64,
}

impl MaxtermRecord {
    /// Whether the linear form is non-constant.
    pub fn is_usable(&self) -> bool {
        self.c.iter().any(|x| !x.is_zero())
    }
}

/// `t` as a difference plan over the public variables. The constant term
/// gives the one-point grid, i.e. `f` itself.
fn plan_for(bb: &(impl KeyedBlackBox + ?Sized), term: &Monomial) -> Result<Grid, AttackError> {
    if term.nvars() != bb.n_pub() {
        return Err(AttackError::TermArity {
            expected: bb.n_pub(),
            got: term.nvars(),
        });
    }
    Ok(Grid::new(&DiffPlan::for_term(bb.field(), term)?))
}

/// `f_t(0, secret)`.
fn cube_sum<K: KeyedBlackBox + ?Sized>(
    bb: &K,
    grid: &Grid,
    zeros: &[FieldElement],
    secret: &[FieldElement],
) -> Result<FieldElement, EvalError> {
    grid.evaluate_with(zeros, |public| bb.eval(public, secret))
}

fn run_linearity<K: KeyedBlackBox + ?Sized, R: Rng>(
    bb: &K,
    grid: &Grid,
    trials: usize,
    rng: &mut R,
) -> Result<LinearityOutcome, AttackError> {
    if trials == 0 {
        return Err(AttackError::NoTrials);
    }
    let f = bb.field();
    let n = bb.n_sec();
    let zeros = vec![f.zero(); bb.n_pub()];
    let cost = grid.len() as u64;
    let c0 = cube_sum(bb, grid, &zeros, &vec![f.zero(); n])?;
    let mut evaluations = cost;
    let mut moved = false;
    for _ in 0..trials {
        let a = f.random(rng);
        let b = f.random(rng);
        let y: Vec<FieldElement> = (0..n).map(|_| f.random(rng)).collect();
        let z: Vec<FieldElement> = (0..n).map(|_| f.random(rng)).collect();
        let w: Vec<FieldElement> = y
            .iter()
            .zip(&z)
            .map(|(&u, &v)| f.add(f.mul(a, u), f.mul(b, v)))
            .collect();
        let fy = f.sub(cube_sum(bb, grid, &zeros, &y)?, c0);
        let fz = f.sub(cube_sum(bb, grid, &zeros, &z)?, c0);
        let fw = f.sub(cube_sum(bb, grid, &zeros, &w)?, c0);
        evaluations += 3 * cost;
        if f.add(f.mul(a, fy), f.mul(b, fz)) != fw {
            return Ok(LinearityOutcome {
                verdict: Verdict::Nonlinear,
                c0,
                evaluations,
            });
        }
        moved |= !(fy.is_zero() && fz.is_zero() && fw.is_zero());
    }
    let verdict = if moved {
        Verdict::LikelyLinear
    } else {
        Verdict::Constant
    };
    Ok(LinearityOutcome {
        verdict,
        c0,
        evaluations,
    })
}

/// Tests whether `f_t(0, .)` is affine in the secret variables.
pub fn linearity_test<K: KeyedBlackBox + ?Sized>(
    bb: &K,
    term: &Monomial,
    trials: usize,
    seed: u64,
) -> Result<LinearityOutcome, AttackError> {
    let grid = plan_for(bb, term)?;
    run_linearity(bb, &grid, trials, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn run_extract<K: KeyedBlackBox + ?Sized>(
    bb: &K,
    term: &Monomial,
    grid: &Grid,
    c0: FieldElement,
) -> Result<MaxtermRecord, AttackError> {
    let f = bb.field();
    let n = bb.n_sec();
    let zeros = vec![f.zero(); bb.n_pub()];
    let mut unit = vec![f.zero(); n];
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        unit[i] = f.one();
        c.push(f.sub(cube_sum(bb, grid, &zeros, &unit)?, c0));
        unit[i] = f.zero();
    }
    Ok(MaxtermRecord {
        term: term.clone(),
        c0,
        c,
        evaluations: n as u64 * grid.len() as u64,
    })
}

/// Reads off `c0 = f_t(0, 0)` and `c_i = f_t(0, e_i) - c0`. Costs
/// `(n_sec + 1)` grid sums.
pub fn extract_linear<K: KeyedBlackBox + ?Sized>(
    bb: &K,
    term: &Monomial,
) -> Result<MaxtermRecord, AttackError> {
    let grid = plan_for(bb, term)?;
    let f = bb.field();
    let c0 = cube_sum(
        bb,
        &grid,
        &vec![f.zero(); bb.n_pub()],
        &vec![f.zero(); bb.n_sec()],
    )?;
    let mut rec = run_extract(bb, term, &grid, c0)?;
    rec.evaluations += grid.len() as u64;
    Ok(rec)
}

/// Candidate terms over `n_pub` public variables with every multiplicity in
/// `1..=max_mult`: by total multiplicity, then number of variables, then
/// variable set in lexicographic order, then by grid size.
pub fn candidate_terms(
    n_pub: usize,
    max_mult: u64,
    max_total: u64,
) -> impl Iterator<Item = Monomial> {
    (1..=max_total).flat_map(move |total| {
        (1..=n_pub.min(total as usize)).flat_map(move |k| {
            let mut mults = compositions_bounded(total, k, max_mult);
            mults.sort_by_key(|m| (m.iter().map(|&x| x + 1).product::<u64>(), m.clone()));
            combinations(n_pub, k).into_iter().flat_map(move |vars| {
                mults.clone().into_iter().map(move |m| {
                    let mut e = vec![0u64; n_pub];
                    for (&v, &x) in vars.iter().zip(&m) {
                        e[v] = x;
                    }
                    Monomial::new(e)
                })
            })
        })
    })
}

fn compositions_bounded(total: u64, k: usize, max: u64) -> Vec<Vec<u64>> {
    fn rec(left: u64, slots: usize, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let lo = left.saturating_sub(max * (slots as u64 - 1)).max(1);
        let hi = max.min(left.saturating_sub(slots as u64 - 1));
        for x in lo..=hi {
            cur.push(x);
            rec(left - x, slots - 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, k, max, &mut Vec::new(), &mut out);
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct PreprocessConfig {
    /// Maximum number of black-box evaluations.
    pub budget: u64,
    /// Largest total multiplicity of a candidate term; `None` for no limit
    /// beyond the per-variable one.
    pub max_total_mult: Option<u64>,
    /// Linearity trials per candidate; `None` for [`default_trials`].
    pub trials: Option<usize>,
    pub seed: u64,
    /// Candidates evaluated concurrently. Results do not depend on it.
    pub jobs: usize,
}

impl PreprocessConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        PreprocessConfig {
            budget,
            max_total_mult: None,
            trials: None,
            seed,
            jobs: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreStatus {
    FullRank,
    BudgetExhausted,
    CandidatesExhausted,
}

#[derive(Clone, Debug)]
pub struct PreprocessOutcome {
    /// Linearly independent maxterms, in discovery order.
    pub records: Vec<MaxtermRecord>,
    /// Maxterms whose linear form was already spanned.
    pub dependent: Vec<MaxtermRecord>,
    pub status: PreStatus,
    pub terms_tried: u64,
    pub evaluations: u64,
}

impl PreprocessOutcome {
    pub fn rank(&self) -> usize {
        self.records.len()
    }
}

struct Tried {
    evaluations: u64,
    record: Option<MaxtermRecord>,
}

fn try_candidate<K: KeyedBlackBox + ?Sized>(
    bb: &K,
    term: &Monomial,
    grid: &Grid,
    trials: usize,
    seed: u64,
    index: u64,
) -> Result<Tried, AttackError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let lin = run_linearity(bb, grid, trials, &mut rng)?;
    if lin.verdict != Verdict::LikelyLinear {
        return Ok(Tried {
            evaluations: lin.evaluations,
            record: None,
        });
    }
    let mut rec = run_extract(bb, term, grid, lin.c0)?;
    rec.evaluations += lin.evaluations;
    Ok(Tried {
        evaluations: rec.evaluations,
        record: Some(rec),
    })
}

/// Searches candidate terms until `n_sec` independent maxterms are found, the
/// candidates run out, or the next candidate's worst-case cost would exceed the
/// budget. Deterministic in the seed for any `jobs`.
pub fn preprocess<K: KeyedBlackBox + ?Sized>(
    bb: &K,
    config: &PreprocessConfig,
) -> Result<PreprocessOutcome, AttackError> {
    let field = bb.field();
    let n_sec = bb.n_sec();
    let trials = config
        .trials
        .unwrap_or_else(|| default_trials(field.characteristic()));
    if trials == 0 {
        return Err(AttackError::NoTrials);
    }
    let mut out = PreprocessOutcome {
        records: Vec::new(),
        dependent: Vec::new(),
        status: PreStatus::CandidatesExhausted,
        terms_tried: 0,
        evaluations: 0,
    };
    if n_sec == 0 {
        out.status = PreStatus::FullRank;
        return Ok(out);
    }
    let max_mult = DiffPlan::max_steps(field);
    let max_total = config
        .max_total_mult
        .unwrap_or(max_mult * bb.n_pub() as u64);
    let worst_sums = 1 + 3 * trials as u64 + n_sec as u64;
    let mut basis = EchelonBasis::new(field, n_sec);
    let mut candidates = candidate_terms(bb.n_pub(), max_mult, max_total)
        .enumerate()
        .peekable();
    let jobs = config.jobs.max(1);
    let mut pending: Option<(usize, Monomial, Grid)> = None;

    'search: loop {
        // assemble a batch whose combined worst case fits the budget
        let mut batch: Vec<(usize, Monomial, Grid)> = Vec::new();
        let mut reserved = out.evaluations;
        while batch.len() < jobs {
            let next = match pending.take() {
                Some(c) => c,
                None => match candidates.next() {
                    Some((i, t)) => {
                        let grid = Grid::new(&DiffPlan::for_term(field, &t)?);
                        (i, t, grid)
                    }
                    None => break,
                },
            };
            let worst = worst_sums * next.2.len() as u64;
            if reserved + worst > config.budget {
                pending = Some(next);
                break;
            }
            reserved += worst;
            batch.push(next);
        }
        if batch.is_empty() {
            out.status = if pending.is_some() {
                PreStatus::BudgetExhausted
            } else {
                PreStatus::CandidatesExhausted
            };
            break;
        }
        let results: Vec<Result<Tried, AttackError>> = if jobs == 1 {
            batch
                .iter()
                .map(|(i, t, g)| try_candidate(bb, t, g, trials, config.seed, *i as u64))
                .collect()
        } else {
            batch
                .par_iter()
                .map(|(i, t, g)| try_candidate(bb, t, g, trials, config.seed, *i as u64))
                .collect()
        };
        for tried in results {
            let tried = tried?;
            out.terms_tried += 1;
            out.evaluations += tried.evaluations;
            if let Some(rec) = tried.record {
                if rec.is_usable() && basis.is_independent(&rec.c) {
                    basis.insert(&rec.c, field.zero());
                    out.records.push(rec);
                    if basis.rank() == n_sec {
                        out.status = PreStatus::FullRank;
                        break 'search;
                    }
                } else {
                    out.dependent.push(rec);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnlineOutcome {
    pub rank: usize,
    pub solution: Solution,
    pub evaluations: u64,
}

impl OnlineOutcome {
    /// The full key when the system determines it.
    pub fn key(&self) -> Option<&[FieldElement]> {
        match &self.solution {
            Solution::Unique(k) => Some(k),
            _ => None,
        }
    }

    /// Secret variables left to exhaustive search.
    pub fn unknowns(&self, n_sec: usize) -> usize {
        n_sec - self.rank
    }
}

/// Evaluates every record's cube sum on the keyed function and solves
/// `c . x = f_t(0) - c0`. A contradiction names the offending record.
pub fn online<B: BlackBox + ?Sized>(
    bb: &B,
    records: &[MaxtermRecord],
    n_sec: usize,
) -> Result<OnlineOutcome, AttackError> {
    let field = bb.field();
    let zeros = vec![field.zero(); bb.arity()];
    let mut rows = Vec::with_capacity(records.len());
    let mut evaluations = 0u64;
    for rec in records {
        if rec.c.len() != n_sec {
            return Err(AttackError::RecordWidth {
                expected: n_sec,
                got: rec.c.len(),
            });
        }
        if rec.term.nvars() != bb.arity() {
            return Err(AttackError::TermArity {
                expected: bb.arity(),
                got: rec.term.nvars(),
            });
        }
        let grid = Grid::new(&DiffPlan::for_term(field, &rec.term)?);
        let value = grid.evaluate(bb, &zeros)?;
        evaluations += grid.len() as u64;
        rows.push((rec.c.clone(), field.sub(value, rec.c0)));
    }
    let report = gaussian_solve(&LinearSystem {
        field: field.clone(),
        ncols: n_sec,
        rows,
    });
    Ok(OnlineOutcome {
        rank: report.rank,
        solution: report.solution,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::Counted;
    use crate::diff::delta_plan;

    fn example() -> SplitPoly {
        let f = Field::prime(31).unwrap();
        SplitPoly::new(
            MultiPoly::parse(&f, "x1^5*x2 + x1^4*x3*x4 + x4^6").unwrap(),
            1,
        )
    }

    #[test]
    fn linearity_verdicts() {
        let bb = example();
        let t5 = Monomial::var_power(1, 0, 5);
        assert_eq!(
            linearity_test(&bb, &t5, 12, 1).unwrap().verdict,
            Verdict::LikelyLinear
        );
        // symbolic oracle: f_{x1^4}(0, .) contains 24*x3*x4
        let f = bb.poly().field().clone();
        let plan = DiffPlan::unit(&f, vec![0], &[4]).unwrap();
        let ft = delta_plan(bb.poly(), &plan).unwrap();
        let at_zero = ft
            .partial_eval(&[Some(f.zero()), None, None, None])
            .unwrap();
        assert_eq!(
            at_zero.coefficient(&Monomial::new(vec![0, 0, 1, 1])),
            f.from_u64(24)
        );
        let t4 = Monomial::var_power(1, 0, 4);
        assert_eq!(
            linearity_test(&bb, &t4, 20, 1).unwrap().verdict,
            Verdict::Nonlinear
        );
        let c = SplitPoly::new(MultiPoly::parse(&f, "x1 + 3*x2^2").unwrap(), 1);
        assert_eq!(
            linearity_test(&c, &Monomial::var_power(1, 0, 1), 12, 0)
                .unwrap()
                .verdict,
            Verdict::Constant
        );
        assert_eq!(
            linearity_test(&c, &Monomial::var_power(1, 0, 1), 0, 0),
            Err(AttackError::NoTrials)
        );
    }

    #[test]
    fn extraction() {
        let bb = example();
        let f = bb.field().clone();
        let rec = extract_linear(&bb, &Monomial::var_power(1, 0, 5)).unwrap();
        assert_eq!(rec.c0, f.zero());
        assert_eq!(rec.c, vec![f.from_u64(27), f.zero(), f.zero()]);
        assert_eq!(rec.evaluations, 4 * 6);
        assert!(rec.is_usable());

        let gf7 = Field::prime(7).unwrap();
        // superpoly of v1^2 is 3*x1 + 5, scaled by D(2,2,2) = 2 under unit steps
        let planted = SplitPoly::new(
            MultiPoly::parse(&gf7, "3*x1^2*x2 + 5*x1^2 + x1*x2").unwrap(),
            1,
        );
        let rec = extract_linear(&planted, &Monomial::var_power(1, 0, 2)).unwrap();
        assert_eq!(rec.c0, gf7.from_u64(10 % 7));
        assert_eq!(rec.c, vec![gf7.from_u64(6)]);
        let planted = SplitPoly::new(MultiPoly::parse(&gf7, "3*x1*x2 + 5*x1 + x2^3").unwrap(), 1);
        let rec = extract_linear(&planted, &Monomial::var_power(1, 0, 1)).unwrap();
        assert_eq!(
            (rec.c0, rec.c.clone()),
            (gf7.from_u64(5), vec![gf7.from_u64(3)])
        );

        let zero = SplitPoly::new(MultiPoly::parse(&gf7, "x2").unwrap(), 1);
        let rec = extract_linear(&zero, &Monomial::var_power(1, 0, 1)).unwrap();
        assert!(rec.c0.is_zero() && !rec.is_usable());
    }

    #[test]
    fn extraction_cost_is_exact() {
        let gf5 = Field::prime(5).unwrap();
        let poly = MultiPoly::parse(&gf5, "x1^2*x2^3*x3 + x4").unwrap();
        let bb = SplitPoly::new(poly, 2);
        struct Count<'a>(&'a SplitPoly, std::sync::atomic::AtomicU64);
        impl KeyedBlackBox for Count<'_> {
            fn field(&self) -> &Field {
                self.0.field()
            }
            fn n_pub(&self) -> usize {
                2
            }
            fn n_sec(&self) -> usize {
                2
            }
            fn eval(
                &self,
                p: &[FieldElement],
                s: &[FieldElement],
            ) -> Result<FieldElement, EvalError> {
                self.1.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                self.0.eval(p, s)
            }
        }
        let counter = Count(&bb, 0.into());
        let rec = extract_linear(&counter, &Monomial::new(vec![2, 3])).unwrap();
        assert_eq!(counter.1.into_inner(), 3 * 12);
        assert_eq!(rec.evaluations, 36);
        assert_eq!(rec.c, vec![gf5.from_u64(2 * 6 % 5), gf5.zero()]);
    }

    #[test]
    fn candidate_order() {
        let terms: Vec<String> = candidate_terms(2, 2, 3).map(|t| t.to_text()).collect();
        assert_eq!(
            terms,
            vec!["x1", "x2", "x1^2", "x2^2", "x1*x2", "x1*x2^2", "x1^2*x2"]
        );
        // every nonzero exponent vector in {0..4}^3
        assert_eq!(candidate_terms(3, 4, 12).count(), 5 * 5 * 5 - 1);
    }

    #[test]
    fn preprocess_and_online_example() {
        let f = Field::prime(31).unwrap();
        let bb = SplitPoly::new(
            MultiPoly::parse(&f, "x1^5*x2 + x1^2*x3 + x1^2*x4 + x1*x4 + x4^6").unwrap(),
            1,
        );
        let out = preprocess(&bb, &PreprocessConfig::new(1_000_000, 3)).unwrap();
        assert_eq!(out.status, PreStatus::FullRank);
        assert_eq!(out.rank(), 3);
        let key = vec![f.from_u64(4), f.from_u64(17), f.from_u64(29)];
        let fixed = FixedKey::new(&bb, key.clone());
        let counted = Counted::new(&fixed);
        let res = online(&counted, &out.records, 3).unwrap();
        assert_eq!(res.key(), Some(&key[..]));
        assert_eq!(res.evaluations, counted.calls());
        let parallel = preprocess(
            &bb,
            &PreprocessConfig {
                jobs: 4,
                ..PreprocessConfig::new(1_000_000, 3)
            },
        )
        .unwrap();
        assert_eq!(parallel.records, out.records);
        assert_eq!(parallel.evaluations, out.evaluations);
    }

    #[test]
    fn preprocess_edges() {
        let f = Field::prime(5).unwrap();
        let none = SplitPoly::new(MultiPoly::parse(&f, "x1^3 + x2").unwrap(), 2);
        let out = preprocess(&none, &PreprocessConfig::new(10, 0)).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.status, PreStatus::FullRank);
        let bb = SplitPoly::new(MultiPoly::parse(&f, "x1*x2 + x3").unwrap(), 1);
        let out = preprocess(&bb, &PreprocessConfig::new(5, 0)).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.status, PreStatus::BudgetExhausted);
        assert_eq!(out.evaluations, 0);
        let res = online(&FixedKey::new(&bb, vec![f.one(), f.one()]), &[], 2).unwrap();
        assert_eq!(res.rank, 0);
        assert!(res.key().is_none());
    }

    #[test]
    fn corrupted_record_is_inconsistent() {
        let f = Field::prime(7).unwrap();
        let bb = SplitPoly::new(MultiPoly::parse(&f, "x1*x3 + x2*x4 + x1*x2*x3").unwrap(), 2);
        let out = preprocess(&bb, &PreprocessConfig::new(100_000, 5)).unwrap();
        assert_eq!(out.status, PreStatus::FullRank);
        let mut records = out.records.clone();
        let mut extra = records[0].clone();
        extra.c0 = f.add(extra.c0, f.one());
        records.push(extra);
        let fixed = FixedKey::new(&bb, vec![f.from_u64(2), f.from_u64(3)]);
        assert_eq!(
            online(&fixed, &records, 2).unwrap().solution,
            Solution::Inconsistent { row: 2 }
        );
    }
}
