//! Finite-difference operators `f(x + a) - f(x)`, applied symbolically to a
//! [`MultiPoly`] or numerically to a [`BlackBox`] by summing over a weighted grid.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::blackbox::{BlackBox, EvalError};
use crate::combinat::{binomial_mod, diff_coefficient, nonzero_compositions};
use crate::field::{Field, FieldElement};
use crate::poly::{Monomial, MultiPoly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiffError {
    #[error("difference vector is zero")]
    ZeroDirection,
    #[error("difference vector has {got} entries, expected {expected}")]
    DirectionLength { expected: usize, got: usize },
    #[error("difference step is zero")]
    ZeroStep,
    #[error("variable x{} listed twice in plan", .0 + 1)]
    DuplicateVariable(usize),
    #[error("no steps given for variable x{}", .0 + 1)]
    NoSteps(usize),
    #[error("{count} differences on x{} exceed the limit {max} for this field", .var + 1)]
    TooManySteps { var: usize, count: usize, max: u64 },
    #[error("variable x{} out of range for {nvars} variables", .var + 1)]
    VariableOutOfRange { var: usize, nvars: usize },
    #[error("step element does not belong to the field")]
    ForeignStep,
    #[error("multiplicity {m} outside 1..={max}")]
    Multiplicity { m: u64, max: u64 },
    #[error("base point has {got} coordinates, expected {expected}")]
    BaseLength { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The symbolic difference `f(x + a) - f(x)` in canonical form.
pub fn delta(f: &MultiPoly, a: &[FieldElement]) -> Result<MultiPoly, DiffError> {
    if a.len() != f.nvars() {
        return Err(DiffError::DirectionLength {
            expected: f.nvars(),
            got: a.len(),
        });
    }
    if a.iter().all(|x| x.is_zero()) {
        return Err(DiffError::ZeroDirection);
    }
    let field = f.field();
    if a.iter().any(|&x| !field.contains(x)) {
        return Err(DiffError::ForeignStep);
    }
    let p = field.characteristic();
    let mut out: Vec<(Monomial, FieldElement)> = Vec::new();
    for (mono, c) in f.terms() {
        // expand prod_i (x_i + a_i)^(e_i) one variable at a time
        let mut partial: Vec<(Vec<u64>, FieldElement)> = vec![(mono.exponents().to_vec(), c)];
        for (i, &ai) in a.iter().enumerate() {
            let e = mono.exponents()[i];
            if ai.is_zero() || e == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
            for (exps, coeff) in &partial {
                for k in 0..=e {
                    let b = binomial_mod(e, k, p);
                    if b == 0 {
                        continue;
                    }
                    let w = field.mul(field.from_u64(b), field.pow(ai, e - k));
                    let mut ex = exps.clone();
                    ex[i] = k;
                    next.push((ex, field.mul(*coeff, w)));
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|(e, c)| (Monomial::new(e), c)));
        out.push((mono.clone(), field.neg(c)));
    }
    Ok(MultiPoly::from_terms(field, f.nvars(), out))
}

/// Which variables to difference and with which steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffPlan {
    field: Field,
    vars: Vec<usize>,
    steps: Vec<Vec<FieldElement>>,
}

impl DiffPlan {
    /// Largest number of differences per variable accepted over `field`:
    /// `p - 1` over GF(p), `m(p - 1)` over GF(p^m).
    pub fn max_steps(field: &Field) -> u64 {
        field.degree() as u64 * (field.characteristic() - 1)
    }

    /// Plan with explicit steps per variable (0-based variable indices).
    pub fn with_steps(
        field: &Field,
        vars: Vec<usize>,
        steps: Vec<Vec<FieldElement>>,
    ) -> Result<Self, DiffError> {
        assert_eq!(vars.len(), steps.len(), "one step list per variable");
        let max = Self::max_steps(field);
        for (k, (&v, hs)) in vars.iter().zip(&steps).enumerate() {
            if vars[..k].contains(&v) {
                return Err(DiffError::DuplicateVariable(v));
            }
            if hs.is_empty() {
                return Err(DiffError::NoSteps(v));
            }
            if hs.len() as u64 > max {
                return Err(DiffError::TooManySteps {
                    var: v,
                    count: hs.len(),
                    max,
                });
            }
            if hs.iter().any(|h| h.is_zero()) {
                return Err(DiffError::ZeroStep);
            }
            if hs.iter().any(|&h| !field.contains(h)) {
                return Err(DiffError::ForeignStep);
            }
        }
        Ok(DiffPlan {
            field: field.clone(),
            vars,
            steps,
        })
    }

    /// Plan for a term `t = x_i1^m1 ... x_ik^mk` with the default steps: all
    /// ones over GF(p), the basis-block sequence over GF(p^m).
    pub fn for_term(field: &Field, term: &Monomial) -> Result<Self, DiffError> {
        let vars = term.support();
        let steps = vars
            .iter()
            .map(|&v| {
                let m = term.exponents()[v];
                if field.is_prime_field() {
                    let max = Self::max_steps(field);
                    if m > max {
                        return Err(DiffError::TooManySteps {
                            var: v,
                            count: m as usize,
                            max,
                        });
                    }
                    Ok(vec![field.one(); m as usize])
                } else {
                    step_sequence_pm(field, m)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_steps(field, vars, steps)
    }

    /// Plan with unit steps, `mults[l]` times on `vars[l]`.
    pub fn unit(field: &Field, vars: Vec<usize>, mults: &[usize]) -> Result<Self, DiffError> {
        let steps = mults.iter().map(|&m| vec![field.one(); m]).collect();
        Self::with_steps(field, vars, steps)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn steps(&self) -> &[Vec<FieldElement>] {
        &self.steps
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.steps.iter().map(Vec::len).collect()
    }

    /// The term `prod x_i^(m_i)` in `nvars` variables.
    pub fn term(&self, nvars: usize) -> Monomial {
        let mut e = vec![0u64; nvars];
        for (&v, hs) in self.vars.iter().zip(&self.steps) {
            e[v] = hs.len() as u64;
        }
        Monomial::new(e)
    }

    /// The same plan with its variables listed in another order.
    pub fn permuted(&self, order: &[usize]) -> DiffPlan {
        DiffPlan {
            field: self.field.clone(),
            vars: order.iter().map(|&i| self.vars[i]).collect(),
            steps: order.iter().map(|&i| self.steps[i].clone()).collect(),
        }
    }

    fn check_arity(&self, nvars: usize) -> Result<(), DiffError> {
        match self.vars.iter().find(|&&v| v >= nvars) {
            Some(&var) => Err(DiffError::VariableOutOfRange { var, nvars }),
            None => Ok(()),
        }
    }
}

/// Applies every difference of the plan symbolically, in plan order.
pub fn delta_plan(f: &MultiPoly, plan: &DiffPlan) -> Result<MultiPoly, DiffError> {
    f.field()
        .ensure_same(plan.field())
        .map_err(PolyError::from)?;
    plan.check_arity(f.nvars())?;
    let mut g = f.clone();
    let mut dir = vec![f.field().zero(); f.nvars()];
    for (&v, hs) in plan.vars.iter().zip(&plan.steps) {
        for &h in hs {
            dir[v] = h;
            g = delta(&g, &dir)?;
            if g.is_zero() {
                return Ok(g);
            }
        }
        dir[v] = f.field().zero();
    }
    Ok(g)
}

/// One evaluation point of a difference grid: offsets per plan variable and
/// the signed weight the value is multiplied by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub offsets: Vec<FieldElement>,
    pub sign: i8,
    /// Product of binomial coefficients mod p. When distinct step
    /// combinations land on the same offset their weights are merged, the
    /// sign becomes `+1` and this holds the net coefficient.
    pub weight: FieldElement,
}

impl GridPoint {
    pub fn coefficient(&self, field: &Field) -> FieldElement {
        if self.sign < 0 {
            field.neg(self.weight)
        } else {
            self.weight
        }
    }
}

/// Per-variable axis: (offset, sign, weight).
fn axis(field: &Field, steps: &[FieldElement]) -> Vec<(FieldElement, i8, FieldElement)> {
    let p = field.characteristic();
    // group equal steps; differences commute
    let mut blocks: Vec<(FieldElement, u64)> = Vec::new();
    for &h in steps {
        match blocks.iter_mut().find(|(b, _)| *b == h) {
            Some((_, c)) => *c += 1,
            None => blocks.push((h, 1)),
        }
    }
    let mut points: Vec<(FieldElement, i8, FieldElement)> = vec![(field.zero(), 1, field.one())];
    for (h, c) in blocks {
        let mut next = Vec::new();
        for (off, sign, w) in &points {
            for a in 0..=c {
                let b = binomial_mod(c, a, p);
                if b == 0 {
                    continue;
                }
                let s = if (c - a) % 2 == 0 { *sign } else { -*sign };
                next.push((
                    field.add(*off, field.scale(h, a)),
                    s,
                    field.mul(*w, field.from_u64(b)),
                ));
            }
        }
        points = next;
    }
    // merge coinciding offsets
    let mut merged: Vec<(FieldElement, i8, FieldElement)> = Vec::new();
    for (off, sign, w) in points {
        match merged.iter_mut().find(|(o, _, _)| *o == off) {
            Some(entry) => {
                let prev = if entry.1 < 0 {
                    field.neg(entry.2)
                } else {
                    entry.2
                };
                let add = if sign < 0 { field.neg(w) } else { w };
                *entry = (off, 1, field.add(prev, add));
            }
            None => merged.push((off, sign, w)),
        }
    }
    merged.retain(|(_, _, w)| !w.is_zero());
    merged
}

/// Evaluation grid for a plan. Weights are computed once and reused for every
/// base point.
#[derive(Clone, Debug)]
pub struct Grid {
    field: Field,
    vars: Vec<usize>,
    points: Vec<GridPoint>,
    coefficients: Vec<FieldElement>,
}

impl Grid {
    pub fn new(plan: &DiffPlan) -> Self {
        let field = plan.field.clone();
        let mut points = vec![GridPoint {
            offsets: Vec::new(),
            sign: 1,
            weight: field.one(),
        }];
        for hs in &plan.steps {
            let ax = axis(&field, hs);
            let mut next = Vec::with_capacity(points.len() * ax.len());
            for gp in &points {
                for (off, s, w) in &ax {
                    let mut offsets = gp.offsets.clone();
                    offsets.push(*off);
                    next.push(GridPoint {
                        offsets,
                        sign: gp.sign * s,
                        weight: field.mul(gp.weight, *w),
                    });
                }
            }
            points = next;
        }
        let coefficients = points.iter().map(|gp| gp.coefficient(&field)).collect();
        Grid {
            field,
            vars: plan.vars.clone(),
            points,
            coefficients,
        }
    }

    /// Number of black-box evaluations per grid sum.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// `sum_g coeff_g * eval(base + offset_g)`.
    pub fn evaluate_with<F>(
        &self,
        base: &[FieldElement],
        mut eval: F,
    ) -> Result<FieldElement, EvalError>
    where
        F: FnMut(&[FieldElement]) -> Result<FieldElement, EvalError>,
    {
        let f = &self.field;
        let mut point = base.to_vec();
        let mut acc = f.zero();
        for (gp, &coeff) in self.points.iter().zip(&self.coefficients) {
            for (&v, &off) in self.vars.iter().zip(&gp.offsets) {
                point[v] = f.add(base[v], off);
            }
            acc = f.add(acc, f.mul(coeff, eval(&point)?));
        }
        Ok(acc)
    }

    pub fn evaluate<B: BlackBox + ?Sized>(
        &self,
        bb: &B,
        base: &[FieldElement],
    ) -> Result<FieldElement, DiffError> {
        if base.len() != bb.arity() {
            return Err(DiffError::BaseLength {
                expected: bb.arity(),
                got: base.len(),
            });
        }
        if let Some(&var) = self.vars.iter().find(|&&v| v >= bb.arity()) {
            return Err(DiffError::VariableOutOfRange {
                var,
                nvars: bb.arity(),
            });
        }
        Ok(self.evaluate_with(base, |x| bb.eval(x))?)
    }
}

/// Grid points and weights for a plan.
pub fn grid_weights(plan: &DiffPlan) -> Vec<GridPoint> {
    Grid::new(plan).points
}

/// Value of the plan's difference of `bb` at `base`, from black-box calls only.
pub fn blackbox_diff<B: BlackBox + ?Sized>(
    bb: &B,
    plan: &DiffPlan,
    base: &[FieldElement],
) -> Result<FieldElement, DiffError> {
    bb.field()
        .ensure_same(plan.field())
        .map_err(PolyError::from)?;
    Grid::new(plan).evaluate(bb, base)
}

/// The step sequence `b_0` (p-1 times), `b_1` (p-1 times), ... truncated to
/// `m1` entries.
pub fn step_sequence_pm(field: &Field, m1: u64) -> Result<Vec<FieldElement>, DiffError> {
    let max = DiffPlan::max_steps(field);
    if m1 == 0 || m1 > max {
        return Err(DiffError::Multiplicity { m: m1, max });
    }
    let per = (field.characteristic() - 1) as usize;
    Ok(field
        .basis()
        .into_iter()
        .flat_map(|b| std::iter::repeat_n(b, per))
        .take(m1 as usize)
        .collect())
}

/// `m1` differences of `bb` along variable `var` with the basis-block steps.
/// Costs `p^q (r + 1)` calls where `m1 = q(p-1) + r`, `0 < r <= p-1`.
pub fn blackbox_diff_pm<B: BlackBox + ?Sized>(
    bb: &B,
    var: usize,
    m1: u64,
    base: &[FieldElement],
) -> Result<FieldElement, DiffError> {
    let field = bb.field();
    let plan = DiffPlan::with_steps(field, vec![var], vec![step_sequence_pm(field, m1)?])?;
    blackbox_diff(bb, &plan, base)
}

/// `sum_{S subset of 1..k} (-1)^(k-|S|) f(x + sum_{i in S} a_i)` for general
/// direction vectors.
pub fn inclusion_exclusion<B: BlackBox + ?Sized>(
    bb: &B,
    directions: &[Vec<FieldElement>],
    base: &[FieldElement],
) -> Result<FieldElement, DiffError> {
    let f = bb.field();
    let n = bb.arity();
    if base.len() != n {
        return Err(DiffError::BaseLength {
            expected: n,
            got: base.len(),
        });
    }
    for a in directions {
        if a.len() != n {
            return Err(DiffError::DirectionLength {
                expected: n,
                got: a.len(),
            });
        }
        if a.iter().all(|x| x.is_zero()) {
            return Err(DiffError::ZeroDirection);
        }
    }
    let k = directions.len();
    let mut acc = f.zero();
    let mut point = vec![f.zero(); n];
    for mask in 0u64..(1u64 << k) {
        point.copy_from_slice(base);
        for (i, a) in directions.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (x, &y) in point.iter_mut().zip(a) {
                    *x = f.add(*x, y);
                }
            }
        }
        let v = bb.eval(&point)?;
        if (k as u32 - mask.count_ones()).is_multiple_of(2) {
            acc = f.add(acc, v);
        } else {
            acc = f.sub(acc, v);
        }
    }
    Ok(acc)
}

/// Constants `c_i` such that `f_t(u) = sum_i c_i g_i` where the quotient
/// `f_S(t) = sum_i t_i g_i` is grouped by its part `t_i` in the variables of
/// `t`, under unit steps. For `t_i = prod x_ij^(l_j)`:
/// `c_i = prod_j D(m_j + l_j, m_j + l_j, m_j)`.
pub fn fundamental_constants(
    field: &Field,
    t: &Monomial,
    quotient: &MultiPoly,
) -> BTreeMap<Monomial, FieldElement> {
    let p = field.characteristic();
    let vars = t.support();
    quotient
        .split_by_vars(&vars)
        .into_keys()
        .map(|ti| {
            let c = vars.iter().fold(1u64, |acc, &v| {
                let m = t.exponents()[v];
                let d = m + ti.exponents()[v];
                let dc = diff_coefficient(d, d, m, p).expect("1 <= m <= d");
                acc * dc % p
            });
            (ti, field.from_u64(c))
        })
        .collect()
}

/// `c_j = sum over C_p(j, j, m1) of binom(j; i_1..i_m1) h_1^i_1 ... h_m1^i_m1`:
/// the factor multiplying the `x^j` coefficient in the value at `x = 0` of the
/// `m1`-fold difference with steps `h`.
pub fn pm_constants(
    field: &Field,
    j: u64,
    m1: u64,
    steps: &[FieldElement],
) -> Result<FieldElement, DiffError> {
    if m1 == 0 || steps.len() < m1 as usize {
        return Err(DiffError::Multiplicity {
            m: m1,
            max: steps.len() as u64,
        });
    }
    let p = field.characteristic();
    let mut acc = field.zero();
    for (comp, value) in nonzero_compositions(j, j, m1, p) {
        let mut term = field.from_u64(value);
        for (&i, &h) in comp.parts.iter().zip(steps) {
            term = field.mul(term, field.pow(h, i));
        }
        acc = field.add(acc, term);
    }
    Ok(acc)
}
