use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gfcube_core::attack::{online, preprocess, FixedKey, PreStatus, PreprocessConfig, RecordFile};
use gfcube_core::combinat::{carry_count, digits, multinomial_mod};
use gfcube_core::diff::{blackbox_diff, delta_plan, step_sequence_pm};
use gfcube_core::targets::{make_planted, DegreeProfile};
use gfcube_core::{
    degree_after_diff, DegreeBound, DiffPlan, Field, FieldElement, Monomial, MultiPoly,
};

fn field_for(index: usize) -> Field {
    match index % 6 {
        0 => Field::prime(2).unwrap(),
        1 => Field::prime(5).unwrap(),
        2 => Field::prime(31).unwrap(),
        3 => Field::default_extension(2, 2).unwrap(),
        4 => Field::default_extension(3, 2).unwrap(),
        _ => Field::default_extension(2, 3).unwrap(),
    }
}

fn element(field: &Field, x: u64) -> FieldElement {
    field.element(x % field.order()).unwrap()
}

fn point(field: &Field, raw: &[u64]) -> Vec<FieldElement> {
    raw.iter().map(|&x| element(field, x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn field_axioms(fi in 0usize..6, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = field_for(fi);
        let (a, b, c) = (element(&f, a), element(&f, b), element(&f, c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.pow(a, f.order()), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        }
    }

    #[test]
    fn grid_sum_matches_symbolic(fi in 0usize..6, seed in any::<u64>(), n in 1usize..4,
                                 raw in proptest::collection::vec(any::<u64>(), 3),
                                 mults in proptest::collection::vec(1u64..4, 3)) {
        let f = field_for(fi);
        let g = MultiPoly::random(&f, n, 2 * (f.order() - 1), 6, seed);
        let cap = DiffPlan::max_steps(&f);
        let exps: Vec<u64> = mults.iter().take(n).map(|&m| m.min(cap)).collect();
        let plan = DiffPlan::for_term(&f, &Monomial::new(exps)).unwrap();
        let base = point(&f, &raw[..n]);
        let sym = delta_plan(&g, &plan).unwrap().evaluate(&base).unwrap();
        prop_assert_eq!(blackbox_diff(&g, &plan, &base).unwrap(), sym);
    }

    #[test]
    fn plan_order_is_irrelevant(seed in any::<u64>(), raw in proptest::collection::vec(1u64..31, 6)) {
        let f = Field::prime(31).unwrap();
        let g = MultiPoly::random(&f, 3, 7, 10, seed);
        let steps = vec![point(&f, &raw[..1]), point(&f, &raw[1..3]), point(&f, &raw[3..6])];
        let plan = DiffPlan::with_steps(&f, vec![0, 1, 2], steps).unwrap();
        let base = delta_plan(&g, &plan).unwrap();
        for order in [[2, 1, 0], [1, 2, 0], [0, 2, 1]] {
            prop_assert_eq!(&delta_plan(&g, &plan.permuted(&order)).unwrap(), &base);
        }
    }

    #[test]
    fn interpolation_round_trip(fi in 0usize..6, seed in any::<u64>()) {
        let f = field_for(fi);
        let n = if f.order() > 9 { 1 } else { 2 };
        let g = MultiPoly::random(&f, n, n as u64 * (f.order() - 1), 8, seed);
        let q = f.order();
        let table: Vec<FieldElement> = (0..q.pow(n as u32))
            .map(|idx| {
                let x: Vec<FieldElement> = (0..n).map(|i| f.element(idx / q.pow(i as u32) % q).unwrap()).collect();
                g.evaluate(&x).unwrap()
            })
            .collect();
        prop_assert_eq!(MultiPoly::interpolate(&f, n, &table).unwrap(), g);
    }

    #[test]
    fn format_and_parse_round_trip(fi in 0usize..6, seed in any::<u64>()) {
        let f = field_for(fi);
        let g = MultiPoly::random(&f, 3, 6, 8, seed);
        let back = MultiPoly::parse_with_nvars(&f, 3, &g.to_string()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn kummer_carries(p in prop::sample::select(vec![2u64, 3, 5, 7, 31]),
                      parts in proptest::collection::vec(0u64..500, 1..6)) {
        let d: u64 = parts.iter().sum();
        let carries = carry_count(&parts, p).unwrap();
        prop_assert_eq!(multinomial_mod(d, &parts, p).unwrap() == 0, carries > 0);
        // no carries exactly when the digit sums add up
        let s = |x: u64| digits(x, p).iter().sum::<u64>();
        prop_assert_eq!(carries == 0, parts.iter().map(|&x| s(x)).sum::<u64>() == s(d));
    }

    #[test]
    fn degree_bound_holds(fi in 3usize..6, d in 1u64..64, k in 1u64..8) {
        let f = field_for(fi);
        let d = d % f.order();
        let k = k.min(DiffPlan::max_steps(&f));
        prop_assume!(d > 0);
        let xd = MultiPoly::from_terms(&f, 1, [(Monomial::var_power(1, 0, d), f.one())]);
        let steps = step_sequence_pm(&f, k).unwrap();
        let g = delta_plan(&xd, &DiffPlan::with_steps(&f, vec![0], vec![steps]).unwrap()).unwrap();
        match degree_after_diff(d, k, f.characteristic()) {
            DegreeBound::IdenticallyZero => prop_assert!(g.is_zero()),
            DegreeBound::Degree(b) => prop_assert!(g.total_degree().is_none_or(|deg| deg <= b)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planted_attack_recovers_key(p in prop::sample::select(vec![5u64, 7, 31]), n_pub in 1usize..4,
                                   n_sec in 1usize..5, degree in 2u64..6, noise in 0usize..10, seed in any::<u64>()) {
        let f = Field::prime(p).unwrap();
        let Ok(target) = make_planted(&f, n_pub, n_sec, &DegreeProfile::new(degree, noise), seed) else {
            return Ok(());
        };
        let config = PreprocessConfig::new(1_000_000, seed);
        let pre = preprocess(&target, &config).unwrap();
        prop_assert_eq!(pre.status, PreStatus::FullRank);
        // any thread count yields the same records
        let parallel = preprocess(&target, &PreprocessConfig { jobs: 3, ..config }).unwrap();
        prop_assert_eq!(&parallel.records, &pre.records);
        prop_assert_eq!(parallel.evaluations, pre.evaluations);

        let file = RecordFile { field: f.clone(), n_pub, n_sec, seed, records: pre.records.clone() };
        let parsed = RecordFile::parse(&file.to_text()).unwrap();
        prop_assert_eq!(&parsed.records, &pre.records);

        let res = online(&FixedKey::new(&target, target.key().to_vec()), &parsed.records, n_sec).unwrap();
        prop_assert_eq!(res.key(), Some(target.key()));
    }
}

#[test]
fn seeded_generation_is_stable() {
    let f = Field::default_extension(3, 2).unwrap();
    let mut a = ChaCha8Rng::seed_from_u64(5);
    let mut b = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(
        MultiPoly::random_with(&f, 3, 8, 10, &mut a),
        MultiPoly::random_with(&f, 3, 8, 10, &mut b)
    );
}
