//! Seeded property checks relating the symbolic and black-box sides of the
//! toolkit. Each check returns a [`CheckReport`] instead of panicking so the
//! command line can print a summary.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::FnBox;
use crate::combinat::{degree_after_diff, DegreeBound};
use crate::diff::{blackbox_diff, delta_plan, fundamental_constants, DiffPlan};
use crate::field::{Field, FieldElement};
use crate::poly::{Monomial, MultiPoly};
use crate::reduce::verify_reduction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(
            f,
            "{status} {} ({} cases, {} failures)",
            self.name, self.cases, self.failures
        )?;
        if let Some(first) = &self.first_failure {
            write!(f, ": {first}")?;
        }
        Ok(())
    }
}

fn random_point<R: Rng>(field: &Field, n: usize, rng: &mut R) -> Vec<FieldElement> {
    (0..n).map(|_| field.random(rng)).collect()
}

/// Random plan on a random non-empty subset of variables with up to
/// `max_mult` steps each, steps drawn from the nonzero elements.
fn random_plan<R: Rng>(
    field: &Field,
    n: usize,
    max_mult: u64,
    unit: bool,
    rng: &mut R,
) -> DiffPlan {
    let k = rng.gen_range(1..=n.min(3));
    let mut vars: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        vars.swap(i, j);
    }
    vars.truncate(k);
    let cap = max_mult.min(DiffPlan::max_steps(field));
    let steps = vars
        .iter()
        .map(|_| {
            let m = rng.gen_range(1..=cap);
            (0..m)
                .map(|_| {
                    if unit {
                        field.one()
                    } else {
                        field.random_nonzero(rng)
                    }
                })
                .collect()
        })
        .collect();
    DiffPlan::with_steps(field, vars, steps).expect("valid by construction")
}

/// Black-box grid sums agree with symbolic differencing followed by
/// evaluation, over GF(3), GF(5), GF(31) with `n <= 4`, degree `<= 6`.
pub fn check_duality(seed: u64, cases: usize) -> CheckReport {
    let mut report = CheckReport::new("duality: grid sum = symbolic difference");
    let fields: Vec<Field> = [3, 5, 31]
        .iter()
        .map(|&p| Field::prime(p).expect("prime"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let field = &fields[case % fields.len()];
        let n = rng.gen_range(1..=4);
        let f = MultiPoly::random_with(field, n, 6, rng.gen_range(1..=8), &mut rng);
        let plan = random_plan(field, n, 4, case % 2 == 0, &mut rng);
        let base = random_point(field, n, &mut rng);
        let symbolic = delta_plan(&f, &plan).and_then(|g| Ok(g.evaluate(&base)?));
        let numeric = blackbox_diff(&f, &plan, &base);
        report.record(symbolic.is_ok() && symbolic == numeric, || {
            format!(
                "GF({}) f = {f}, plan {:?}, base {:?}",
                field.order(),
                plan.vars(),
                base
            )
        });
    }
    report
}

/// `f_t(u) = sum_i c_i g_i` with `c_i` the product of `D` constants, over
/// GF(5) and GF(31).
pub fn check_fundamental_constants(seed: u64, cases: usize) -> CheckReport {
    let mut report = CheckReport::new("f_t(u) = sum c_i g_i with D-product constants");
    let fields: Vec<Field> = [5, 31]
        .iter()
        .map(|&p| Field::prime(p).expect("prime"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let field = &fields[case % fields.len()];
        let n = rng.gen_range(2..=4);
        let f = MultiPoly::random_with(field, n, 7, rng.gen_range(3..=12), &mut rng);
        let plan = random_plan(field, n, 4, true, &mut rng);
        let t = plan.term(n);
        let ft = match delta_plan(&f, &plan) {
            Ok(g) => g,
            Err(e) => {
                report.record(false, || e.to_string());
                continue;
            }
        };
        let mut at_u: Vec<Option<FieldElement>> = vec![None; n];
        for &v in plan.vars() {
            at_u[v] = Some(field.zero());
        }
        let lhs = ft.partial_eval(&at_u).expect("arity matches");
        let quotient = f.factor_term(&t).quotient;
        let consts = fundamental_constants(field, &t, &quotient);
        let mut rhs = MultiPoly::zero(field, n);
        for (ti, gi) in quotient.split_by_vars(plan.vars()) {
            rhs = rhs.add(&gi.scale(consts[&ti])).expect("same ring");
        }
        report.record(lhs == rhs, || {
            format!(
                "GF({}) f = {f}, t = {}: {lhs} vs {rhs}",
                field.order(),
                t.to_text()
            )
        });
    }
    report
}

/// Degree laws: exact drop with leading coefficient `d!/(d-m)!` over GF(p),
/// `p <= 7`; the digit-sum bound for every `x^d` over GF(8) and GF(9); and
/// annihilation beyond the digit-sum degree.
pub fn check_degree_laws() -> CheckReport {
    let mut report = CheckReport::new("degree laws");
    for p in [2u64, 3, 5, 7] {
        let field = Field::prime(p).expect("prime");
        for d in 1..p {
            let x = MultiPoly::var(&field, 1, 0);
            let xd = (1..d).fold(x.clone(), |acc, _| acc.mul(&x).expect("same ring"));
            for m in 1..=d {
                let plan = DiffPlan::unit(&field, vec![0], &[m as usize]).expect("m <= p - 1");
                let g = delta_plan(&xd, &plan).expect("valid plan");
                let falling = (d - m + 1..=d).fold(1u64, |acc, k| acc * k % p);
                let ok = g.total_degree() == Some(d - m)
                    && g.coefficient(&Monomial::var_power(1, 0, d - m)) == field.from_u64(falling);
                report.record(ok, || format!("GF({p}) x^{d}, {m} differences gave {g}"));
            }
        }
    }
    for field in [
        Field::default_extension(2, 3).expect("GF(8)"),
        Field::default_extension(3, 2).expect("GF(9)"),
    ] {
        let p = field.characteristic();
        let max = DiffPlan::max_steps(&field);
        for d in 1..field.order() {
            let xd =
                MultiPoly::from_terms(&field, 1, [(Monomial::var_power(1, 0, d), field.one())]);
            for k in 1..=max {
                let plan = DiffPlan::for_term(&field, &Monomial::var_power(1, 0, k))
                    .expect("k <= m(p - 1)");
                let g = delta_plan(&xd, &plan).expect("valid plan");
                let ok = match degree_after_diff(d, k, p) {
                    DegreeBound::IdenticallyZero => g.is_zero(),
                    DegreeBound::Degree(b) => g.total_degree().is_none_or(|deg| deg <= b),
                };
                report.record(ok, || {
                    format!("GF({}) x^{d}, {k} differences gave {g}", field.order())
                });
            }
            // more unit differences than the digit sum always vanish
            let sd = crate::combinat::digit_sum(d, p);
            if sd < max {
                let plan =
                    DiffPlan::unit(&field, vec![0], &[(sd + 1) as usize]).expect("within limit");
                let g = delta_plan(&xd, &plan).expect("valid plan");
                report.record(g.is_zero(), || {
                    format!(
                        "GF({}) x^{d} survived {} differences",
                        field.order(),
                        sd + 1
                    )
                });
            }
        }
    }
    report
}

/// `p` unit-step differences annihilate random functions over GF(4), GF(9).
pub fn check_collapse(seed: u64, cases: usize) -> CheckReport {
    let mut report = CheckReport::new("p unit differences annihilate");
    let fields = [
        Field::default_extension(2, 2).expect("GF(4)"),
        Field::default_extension(3, 2).expect("GF(9)"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let field = fields[case % fields.len()].clone();
        let p = field.characteristic() as usize;
        let q = field.order() as usize;
        let n = rng.gen_range(1..=2);
        // a uniformly random function, given by its table
        let table: Vec<FieldElement> = (0..q.pow(n as u32))
            .map(|_| field.random(&mut rng))
            .collect();
        let bb = FnBox::new(&field, n, move |x: &[FieldElement]| {
            let idx = x
                .iter()
                .rev()
                .fold(0usize, |acc, v| acc * q + v.packed() as usize);
            table[idx]
        });
        let var = rng.gen_range(0..n);
        let plan = DiffPlan::unit(&field, vec![var], &[p]).expect("p <= m(p - 1) for m >= 2");
        let base = random_point(&field, n, &mut rng);
        let value = blackbox_diff(&bb, &plan, &base);
        report.record(value == Ok(field.zero()), || {
            format!("GF({q}) case {case}: {value:?}")
        });
    }
    report
}

/// Differencing commutes with the coordinate projection, over GF(4) and GF(9)
/// for `n = 1, 2` and every step-count vector. Points are exhaustive or
/// sampled as in [`verify_reduction`].
pub fn check_reduction(seed: u64, functions: usize) -> CheckReport {
    let mut report = CheckReport::new("projection commutes with differencing");
    let fields = [
        Field::default_extension(2, 2).expect("GF(4)"),
        Field::default_extension(3, 2).expect("GF(9)"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for field in &fields {
        let p = field.characteristic();
        let m = field.degree();
        let r_vectors: Vec<Vec<u64>> = (0..p.pow(m as u32))
            .map(|idx| (0..m).map(|i| idx / p.pow(i as u32) % p).collect())
            .collect();
        for n in 1..=2usize {
            for _ in 0..functions {
                let f =
                    MultiPoly::random_with(field, n, (field.order() - 1) * n as u64, 6, &mut rng);
                let var = rng.gen_range(0..n);
                for r in &r_vectors {
                    let rep = verify_reduction(&f, var, r, rng.gen());
                    let ok = matches!(&rep, Ok(rep) if rep.passed());
                    report.record(ok, || {
                        format!("GF({}) f = {f}, r = {r:?}: {rep:?}", field.order())
                    });
                }
            }
        }
    }
    report
}

/// Every check at the sizes used by `gfcube verify`.
pub fn run_all(seed: u64, scale: usize) -> Vec<CheckReport> {
    vec![
        check_duality(seed, 100 * scale),
        check_fundamental_constants(seed.wrapping_add(1), 20 * scale),
        check_degree_laws(),
        check_collapse(seed.wrapping_add(2), 20 * scale),
        check_reduction(seed.wrapping_add(3), 2 * scale),
    ]
}
