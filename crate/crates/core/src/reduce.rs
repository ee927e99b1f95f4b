//! Coordinate projection of functions over GF(p^m) to m functions over GF(p)
//! in `m n` variables, and checks that differencing commutes with it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::blackbox::{BlackBox, EvalError};
use crate::diff::{blackbox_diff, DiffError, DiffPlan};
use crate::field::{Field, FieldElement};
use crate::poly::{MultiPoly, PolyError};

/// Exhaustive verification up to this many points, sampling beyond.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;
pub const SAMPLE_POINTS: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("r_{index} = {value} exceeds p - 1 = {max}")]
    StepCount { index: usize, value: u64, max: u64 },
    #[error("expected {expected} step counts (one per basis element), got {got}")]
    StepVector { expected: usize, got: usize },
    #[error("variable x{} out of range for {nvars} variables", .var + 1)]
    Variable { var: usize, nvars: usize },
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The map `phi: GF(p^m) -> GF(p)^m` taking an element to its coordinates in
/// the basis `b_0 = 1, b_1 = a, ...`, together with the variable layout
/// `x_i <-> (x_{i,0}, ..., x_{i,m-1})` at indices `i m + j`.
#[derive(Clone, Debug)]
pub struct ProjectionContext {
    source: Field,
    prime: Field,
    n: usize,
}

impl ProjectionContext {
    pub fn new(source: &Field, n: usize) -> Self {
        ProjectionContext {
            source: source.clone(),
            prime: source.prime_subfield(),
            n,
        }
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn prime(&self) -> &Field {
        &self.prime
    }

    pub fn degree(&self) -> usize {
        self.source.degree()
    }

    pub fn basis(&self) -> Vec<FieldElement> {
        self.source.basis()
    }

    /// Number of variables of the projected functions.
    pub fn projected_arity(&self) -> usize {
        self.n * self.degree()
    }

    /// Index of `x_{i,j}` among the projected variables.
    pub fn var_index(&self, i: usize, j: usize) -> usize {
        i * self.degree() + j
    }

    pub fn phi(&self, a: FieldElement) -> Vec<FieldElement> {
        self.source
            .coords(a)
            .into_iter()
            .map(|c| self.prime.from_u64(c))
            .collect()
    }

    pub fn phi_inv(&self, coords: &[FieldElement]) -> FieldElement {
        let raw: Vec<u64> = coords.iter().map(|c| c.packed()).collect();
        self.source
            .from_coords(&raw)
            .expect("coordinates lie in GF(p)")
    }

    /// Lifts a point of GF(p)^{mn} to GF(p^m)^n.
    pub fn lift(&self, coords: &[FieldElement]) -> Vec<FieldElement> {
        coords
            .chunks(self.degree())
            .map(|c| self.phi_inv(c))
            .collect()
    }

    /// Flattens a point of GF(p^m)^n to GF(p)^{mn}.
    pub fn flatten(&self, point: &[FieldElement]) -> Vec<FieldElement> {
        point.iter().flat_map(|&a| self.phi(a)).collect()
    }
}

/// The `j`-th coordinate function of a black box over GF(p^m), as a black box
/// over GF(p).
pub struct ComponentBox<'a, B: ?Sized> {
    inner: &'a B,
    ctx: ProjectionContext,
    j: usize,
}

impl<B: BlackBox + ?Sized> ComponentBox<'_, B> {
    pub fn component(&self) -> usize {
        self.j
    }
}

impl<B: BlackBox + ?Sized> BlackBox for ComponentBox<'_, B> {
    fn field(&self) -> &Field {
        &self.ctx.prime
    }

    fn arity(&self) -> usize {
        self.ctx.projected_arity()
    }

    fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, EvalError> {
        if point.len() != self.arity() {
            return Err(EvalError(format!(
                "expected {} inputs, got {}",
                self.arity(),
                point.len()
            )));
        }
        let value = self.inner.eval(&self.ctx.lift(point))?;
        Ok(self.ctx.phi(value)[self.j])
    }
}

/// The `m` component black boxes of `bb`.
pub fn project_blackbox<B: BlackBox + ?Sized>(bb: &B) -> Vec<ComponentBox<'_, B>> {
    let ctx = ProjectionContext::new(bb.field(), bb.arity());
    (0..ctx.degree())
        .map(|j| ComponentBox {
            inner: bb,
            ctx: ctx.clone(),
            j,
        })
        .collect()
}

/// Symbolic form of a component, by interpolation over all of GF(p)^{mn}.
pub fn component_poly<B: BlackBox + ?Sized>(
    component: &ComponentBox<'_, B>,
) -> Result<MultiPoly, ReduceError> {
    let prime = component.field().clone();
    let p = prime.characteristic();
    let arity = component.arity();
    let size = (0..arity)
        .try_fold(1u64, |acc, _| acc.checked_mul(p))
        .unwrap_or(u64::MAX);
    if size > EXHAUSTIVE_LIMIT {
        return Err(PolyError::TooManyPoints(size).into());
    }
    let mut table = Vec::with_capacity(size as usize);
    for point in all_points(&prime, arity) {
        table.push(component.eval(&point)?);
    }
    Ok(MultiPoly::interpolate(&prime, arity, &table)?)
}

/// Points of `field^n` in the index order `sum_i k_i q^i`.
fn all_points(field: &Field, n: usize) -> impl Iterator<Item = Vec<FieldElement>> + '_ {
    let q = field.order();
    let size = (0..n).fold(1u64, |acc, _| acc.saturating_mul(q));
    (0..size).map(move |idx| {
        let mut rest = idx;
        (0..n)
            .map(|_| {
                let x = field.element(rest % q).expect("in range");
                rest /= q;
                x
            })
            .collect()
    })
}

/// Outcome of [`verify_reduction`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub points: u64,
    pub exhaustive: bool,
    /// First point of GF(p^m)^n where the two sides differ.
    pub mismatch: Option<Vec<FieldElement>>,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Checks that differencing `bb` in `x_var` with step `b_i` applied `r_i`
/// times, then projecting, agrees with differencing every component `r_i`
/// times in `x_{var,i}` with unit steps over GF(p). Exhaustive when
/// `p^{mn} <= 2^16`, otherwise on [`SAMPLE_POINTS`] points drawn from `seed`.
pub fn verify_reduction<B: BlackBox + ?Sized>(
    bb: &B,
    var: usize,
    r: &[u64],
    seed: u64,
) -> Result<ReductionReport, ReduceError> {
    let field = bb.field();
    let ctx = ProjectionContext::new(field, bb.arity());
    let m = ctx.degree();
    let p = field.characteristic();
    if r.len() != m {
        return Err(ReduceError::StepVector {
            expected: m,
            got: r.len(),
        });
    }
    if let Some((index, &value)) = r.iter().enumerate().find(|(_, &v)| v > p - 1) {
        return Err(ReduceError::StepCount {
            index,
            value,
            max: p - 1,
        });
    }
    if var >= bb.arity() {
        return Err(ReduceError::Variable {
            var,
            nvars: bb.arity(),
        });
    }

    let steps: Vec<FieldElement> = ctx
        .basis()
        .into_iter()
        .zip(r)
        .flat_map(|(b, &ri)| std::iter::repeat_n(b, ri as usize))
        .collect();
    let ext_plan = if steps.is_empty() {
        DiffPlan::with_steps(field, vec![], vec![])?
    } else {
        DiffPlan::with_steps(field, vec![var], vec![steps])?
    };
    let (vars, counts): (Vec<usize>, Vec<usize>) = r
        .iter()
        .enumerate()
        .filter(|(_, &ri)| ri > 0)
        .map(|(i, &ri)| (ctx.var_index(var, i), ri as usize))
        .unzip();
    let prime_plan = DiffPlan::unit(ctx.prime(), vars, &counts)?;
    let components = project_blackbox(bb);

    let size = (0..ctx.projected_arity())
        .try_fold(1u64, |acc, _| acc.checked_mul(p))
        .unwrap_or(u64::MAX);
    let exhaustive = size <= EXHAUSTIVE_LIMIT;
    let points: Box<dyn Iterator<Item = Vec<FieldElement>>> = if exhaustive {
        Box::new(all_points(field, bb.arity()))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample: Vec<Vec<FieldElement>> = (0..SAMPLE_POINTS)
            .map(|_| (0..bb.arity()).map(|_| field.random(&mut rng)).collect())
            .collect();
        Box::new(sample.into_iter())
    };

    let mut checked = 0u64;
    for x in points {
        checked += 1;
        let lhs = ctx.phi(blackbox_diff(bb, &ext_plan, &x)?);
        let flat = ctx.flatten(&x);
        for (j, comp) in components.iter().enumerate() {
            if blackbox_diff(comp, &prime_plan, &flat)? != lhs[j] {
                return Ok(ReductionReport {
                    points: checked,
                    exhaustive,
                    mismatch: Some(x),
                });
            }
        }
    }
    Ok(ReductionReport {
        points: checked,
        exhaustive,
        mismatch: None,
    })
}

/// Bound on the total degree of every component in `(x_{i,0}..x_{i,m-1})`:
/// the digit-sum degree of `f` in `x_i`.
pub fn component_degree_bound(f: &MultiPoly, i: usize) -> u64 {
    f.digit_sum_degree(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::FnBox;

    fn gf4() -> Field {
        Field::default_extension(2, 2).unwrap()
    }

    #[test]
    fn phi_is_additive_bijection() {
        for f in [
            gf4(),
            Field::default_extension(3, 2).unwrap(),
            Field::default_extension(2, 3).unwrap(),
        ] {
            let ctx = ProjectionContext::new(&f, 1);
            let images: std::collections::BTreeSet<Vec<u64>> = f
                .elements()
                .map(|a| ctx.phi(a).iter().map(|c| c.packed()).collect())
                .collect();
            assert_eq!(images.len() as u64, f.order());
            for a in f.elements() {
                assert_eq!(ctx.phi_inv(&ctx.phi(a)), a);
                for b in f.elements() {
                    let sum: Vec<FieldElement> = ctx
                        .phi(a)
                        .iter()
                        .zip(ctx.phi(b))
                        .map(|(&x, y)| ctx.prime().add(x, y))
                        .collect();
                    assert_eq!(ctx.phi(f.add(a, b)), sum);
                }
            }
        }
    }

    #[test]
    fn identity_and_constant_components() {
        let f = gf4();
        let id = MultiPoly::parse(&f, "x1").unwrap();
        let comps = project_blackbox(&id);
        let p2 = f.prime_subfield();
        assert_eq!(
            component_poly(&comps[0]).unwrap(),
            MultiPoly::var(&p2, 2, 0)
        );
        assert_eq!(
            component_poly(&comps[1]).unwrap(),
            MultiPoly::var(&p2, 2, 1)
        );
        let a = f.generator().unwrap();
        let c = MultiPoly::constant(&f, 1, f.add(a, f.one()));
        for comp in project_blackbox(&c) {
            assert_eq!(
                component_poly(&comp).unwrap(),
                MultiPoly::constant(&p2, 2, p2.one())
            );
        }
    }

    #[test]
    fn square_over_gf4() {
        let f = gf4();
        let sq = MultiPoly::parse(&f, "x1^2").unwrap();
        let comps = project_blackbox(&sq);
        let polys: Vec<MultiPoly> = comps.iter().map(|c| component_poly(c).unwrap()).collect();
        let ctx = ProjectionContext::new(&f, 1);
        for x in f.elements() {
            let direct = ctx.phi(f.mul(x, x));
            let flat = ctx.flatten(&[x]);
            for j in 0..2 {
                assert_eq!(polys[j].evaluate(&flat).unwrap(), direct[j]);
            }
        }
        // Frobenius is GF(2)-linear: (x0 + x1 a)^2 = x0 + x1 + x1 a
        assert_eq!(polys[0].to_string(), "x1 + x2");
        assert_eq!(polys[1].to_string(), "x2");
    }

    #[test]
    fn reduction_base_cases() {
        let f = gf4();
        let g = MultiPoly::parse(&f, "(a)*x1^3 + x1^2 + (a+1)*x1 + 1").unwrap();
        let rep = verify_reduction(&g, 0, &[1, 0], 0).unwrap();
        assert!(rep.passed() && rep.exhaustive);
        assert_eq!(rep.points, 4);
        assert!(verify_reduction(&g, 0, &[0, 0], 0).unwrap().passed());
        assert!(matches!(
            verify_reduction(&g, 0, &[2, 0], 0),
            Err(ReduceError::StepCount { index: 0, .. })
        ));
    }

    #[test]
    fn full_steps_on_top_power() {
        // x^(p^m - 1) survives m(p-1) basis-block differences as a nonzero constant
        let f = Field::default_extension(3, 2).unwrap();
        let top = MultiPoly::parse(&f, "x1^8").unwrap();
        assert!(verify_reduction(&top, 0, &[2, 2], 0).unwrap().passed());
        let plan = DiffPlan::for_term(&f, &crate::poly::Monomial::var_power(1, 0, 4)).unwrap();
        let value = blackbox_diff(&top, &plan, &[f.zero()]).unwrap();
        assert!(!value.is_zero());
        for x in f.elements() {
            assert_eq!(blackbox_diff(&top, &plan, &[x]).unwrap(), value);
        }
    }

    #[test]
    fn sampled_when_large() {
        let f = Field::default_extension(3, 2).unwrap();
        let k = f.clone();
        let g = FnBox::new(&f, 6, move |x: &[FieldElement]| {
            k.add(k.mul(x[0], k.pow(x[1], 4)), k.pow(x[5], 5))
        });
        let rep = verify_reduction(&g, 1, &[2, 1], 9).unwrap();
        assert!(rep.passed());
        assert!(!rep.exhaustive);
        assert_eq!(rep.points, SAMPLE_POINTS as u64);
    }

    #[test]
    fn degree_bounds() {
        let gf9 = Field::default_extension(3, 2).unwrap();
        let gf8 = Field::default_extension(2, 3).unwrap();
        assert_eq!(
            component_degree_bound(&MultiPoly::parse(&gf9, "x1^5").unwrap(), 0),
            3
        );
        assert_eq!(
            component_degree_bound(&MultiPoly::parse(&gf9, "x1 + x2").unwrap(), 0),
            1
        );
        assert_eq!(
            component_degree_bound(&MultiPoly::parse(&gf9, "x1^8").unwrap(), 0),
            4
        );
        for f in [gf9, gf8] {
            for d in 0..f.order() {
                let x = MultiPoly::parse(&f, &format!("x1^{d}")).unwrap();
                let bound = component_degree_bound(&x, 0);
                for comp in project_blackbox(&x) {
                    let deg = component_poly(&comp).unwrap().total_degree().unwrap_or(0);
                    assert!(deg <= bound, "x^{d}: component degree {deg} > {bound}");
                }
            }
        }
    }
}
