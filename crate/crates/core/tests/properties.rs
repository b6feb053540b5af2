use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumprod::arith::{canonical_cmp, GoodPolynomial};
use sumprod::coloring::{
    mod_coloring, product_coloring, seeded_random_coloring, padic_sec6_coloring,
};
use sumprod::pattern::catalog_pattern;
use sumprod::sat::{encode_avoidance, parse_dimacs, write_dimacs};
use sumprod::search::{pattern_search_parallel, verify_witness};
use sumprod::searchers::{folkman_search, folkman_search_unpruned, FolkmanOutcome};
use sumprod::{
    enumerate_rationals, eval_good_poly, pattern_search, sum_product_pattern, Coloring, Domain,
    Rational, RationalMode, SearchBudget, SearchOutcome,
};

fn rat() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=60).prop_map(|(n, d)| Rational::reduce(n, d).unwrap())
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    rat().prop_filter("nonzero", |q| !q.is_zero())
}

fn mode() -> impl Strategy<Value = RationalMode> {
    prop_oneof![
        Just(RationalMode::PositiveOnly),
        Just(RationalMode::FullNonzero),
        Just(RationalMode::WithZero),
        Just(RationalMode::NonNegative),
    ]
}

proptest! {
    #[test]
    fn reduce_round_trips(bound in 1u64..25, m in mode()) {
        for q in enumerate_rationals(bound, m) {
            let back = Rational::reduce(q.numer().clone(), q.denom().clone()).unwrap();
            prop_assert_eq!(back, q);
        }
    }

    #[test]
    fn enumeration_is_sorted_and_bounded(bound in 1u64..30, m in mode()) {
        let v: Vec<Rational> = enumerate_rationals(bound, m).collect();
        for w in v.windows(2) {
            prop_assert_eq!(canonical_cmp(&w[0], &w[1]), std::cmp::Ordering::Less);
        }
        prop_assert!(v.iter().all(|q| q.size_at_most(bound)));
        let set: BTreeSet<_> = v.iter().cloned().collect();
        prop_assert_eq!(set.len(), v.len());
    }

    #[test]
    fn enumeration_is_a_prefix(small in 1u64..20, extra in 1u64..10, m in mode()) {
        let a: Vec<Rational> = enumerate_rationals(small, m).collect();
        let b: Vec<Rational> = enumerate_rationals(small + extra, m).take(a.len()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn field_identities(a in rat(), b in rat(), c in nonzero_rat()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!((&a * &c).checked_div(&c).unwrap(), a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(c.size(), c.recip().unwrap().size());
        prop_assert_eq!(a.size(), (-a.clone()).size());
    }

    #[test]
    fn good_poly_is_linear(
        x0 in nonzero_rat(),
        u in proptest::collection::vec(rat(), 3),
        p in proptest::collection::vec(rat(), 3),
        q in proptest::collection::vec(rat(), 3),
        lead_p in 1i64..9,
        lead_q in 1i64..9,
    ) {
        let mk = |lead: i64, rest: &[Rational]| {
            let mut v = vec![Rational::from(lead)];
            v.extend_from_slice(rest);
            GoodPolynomial::new(v).unwrap()
        };
        let (pp, qq) = (mk(lead_p, &p), mk(lead_q, &q));
        let summed: Vec<Rational> = pp.coeffs().iter().zip(qq.coeffs()).map(|(a, b)| a + b).collect();
        let s = GoodPolynomial::new(summed).unwrap();
        let lhs = eval_good_poly(&s, &x0, &u).unwrap();
        let rhs = &eval_good_poly(&pp, &x0, &u).unwrap() + &eval_good_poly(&qq, &x0, &u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn colorings_survive_serialization(seed in any::<u64>(), palette in 2u32..5, xs in proptest::collection::vec(nonzero_rat(), 20)) {
        let c = seeded_random_coloring(Domain::NonzeroRationals, palette, seed);
        let json = serde_json::to_string(c.descriptor()).unwrap();
        let back = Coloring::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        for x in &xs {
            prop_assert_eq!(c.color(x).unwrap(), back.color(x).unwrap());
        }
    }

    #[test]
    fn product_coloring_refines(seed in any::<u64>(), m0 in 1u64..=3, x in nonzero_rat(), y in nonzero_rat()) {
        let base = seeded_random_coloring(Domain::NonzeroRationals, 2, seed);
        let chi = product_coloring(&base, m0).unwrap();
        let same = chi.color(&x).unwrap() == chi.color(&y).unwrap();
        let ks: Vec<Rational> = enumerate_rationals(m0, RationalMode::FullNonzero).collect();
        let base_same = ks.iter().all(|k| base.color(&(k * &x)).unwrap() == base.color(&(k * &y)).unwrap());
        prop_assert_eq!(same, base_same);
    }

    #[test]
    fn serial_and_parallel_search_agree(seed in 0u64..200, bound in 2u64..7, cap in 1u64..400) {
        let c = seeded_random_coloring(Domain::PositiveRationals, 3, seed);
        for name in ["schur", "moreira", "sum-product-2"] {
            let p = catalog_pattern(name).unwrap();
            let b = SearchBudget::rationals(bound, RationalMode::PositiveOnly, cap);
            let s = pattern_search(&c, &p, &b).unwrap();
            let par = pattern_search_parallel(&c, &p, &b).unwrap();
            let strip = |o: SearchOutcome| match o {
                SearchOutcome::Found(mut w) => { w.engine.clear(); SearchOutcome::Found(w) }
                e => e,
            };
            prop_assert_eq!(strip(s.clone()), strip(par));
            if let Some(w) = s.witness() {
                prop_assert!(verify_witness(w).is_ok());
            }
        }
    }

    #[test]
    fn larger_budgets_keep_the_witness(seed in 0u64..200, bound in 2u64..6, extra in 1u64..4) {
        let c = seeded_random_coloring(Domain::PositiveRationals, 2, seed);
        let p = catalog_pattern("moreira").unwrap();
        let small = pattern_search(&c, &p, &SearchBudget::rationals(bound, RationalMode::PositiveOnly, u64::MAX)).unwrap();
        let big = pattern_search(&c, &p, &SearchBudget::rationals(bound + extra, RationalMode::PositiveOnly, u64::MAX)).unwrap();
        if small.is_found() {
            prop_assert!(big.is_found());
        }
    }

    #[test]
    fn dimacs_round_trips(n in 1u32..15, k in 1u32..4, sb in any::<bool>()) {
        let p = catalog_pattern("schur").unwrap();
        let inst = encode_avoidance(n, k, &p, sb).unwrap();
        let bytes = write_dimacs(&inst);
        prop_assert_eq!(&bytes, &write_dimacs(&encode_avoidance(n, k, &p, sb).unwrap()));
        let (v, clauses) = parse_dimacs(&bytes).unwrap();
        prop_assert_eq!(v, n * k);
        prop_assert_eq!(clauses, inst.clauses);
    }

    #[test]
    fn folkman_pruning_is_sound(seed in 0u64..100, n in 2usize..4, distinct in any::<bool>()) {
        let c = seeded_random_coloring(Domain::Naturals, 2, seed);
        let key = |o: FolkmanOutcome| o.witness().map(|w| (w.xs.clone(), w.color));
        let a = folkman_search(&c, n, 40, distinct, u64::MAX).unwrap();
        let b = folkman_search_unpruned(&c, n, 40, distinct, u64::MAX).unwrap();
        prop_assert_eq!(key(a), key(b));
    }
}

#[test]
fn size_is_submultiplicative_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let draw = |rng: &mut ChaCha8Rng| {
        let n: i64 = rng.gen_range(-1_000_000..=1_000_000);
        let d: i64 = rng.gen_range(1..=1_000_000);
        Rational::reduce(n, d).unwrap()
    };
    for _ in 0..100_000 {
        let (p, q) = (draw(&mut rng), draw(&mut rng));
        assert!((&p * &q).size() <= p.size() * q.size(), "{p} * {q}");
    }
}

#[test]
fn sum_product_term_count() {
    // brute-force oracle: distinct subset sums and products as index sets
    for n in 1..=10usize {
        let mut terms = BTreeSet::new();
        for mask in 1u32..1 << n {
            terms.insert(("sum", mask));
            terms.insert(("prod", mask));
        }
        // singletons coincide
        let oracle = terms.len() - n;
        assert_eq!(oracle, (1 << (n + 1)) - 2 - n);
        assert_eq!(sum_product_pattern(n).terms().len(), oracle, "n = {n}");
    }
}

#[test]
fn colorings_are_pure() {
    let cs = [
        mod_coloring(3, Domain::NonzeroRationals),
        seeded_random_coloring(Domain::PositiveRationals, 3, 99),
        product_coloring(&seeded_random_coloring(Domain::PositiveRationals, 2, 5), 2).unwrap(),
    ];
    let x = Rational::reduce(7, 12).unwrap();
    for c in &cs {
        let first = c.color(&x).unwrap();
        assert!((0..1000).all(|_| c.color(&x).unwrap() == first));
    }
    let p = padic_sec6_coloring();
    let big = Rational::from(BigInt::from(3).pow(40) * 7);
    let first = p.color(&big).unwrap();
    assert!((0..1000).all(|_| p.color(&big).unwrap() == first));
}

#[test]
fn search_is_deterministic() {
    let c = seeded_random_coloring(Domain::NonzeroRationals, 2, 8);
    let p = catalog_pattern("bowen-sabok-ext").unwrap();
    let b = SearchBudget::rationals(6, RationalMode::FullNonzero, 1_000_000);
    let a = serde_json::to_string(&pattern_search(&c, &p, &b).unwrap()).unwrap();
    let again = serde_json::to_string(&pattern_search(&c, &p, &b).unwrap()).unwrap();
    assert_eq!(a, again);
}
