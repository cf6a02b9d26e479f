//! Intersection ring laws, checked against term-by-term expansion.

use num_bigint::BigInt;
use proptest::prelude::*;

use dyndeg::cohomology::{alpha, alpha_window, kaehler_power, CohClass, Space};
use dyndeg::matrix::IntMatrix;
use dyndeg::monomial::{compound, MonomialMap};
use dyndeg::oracle::{pair_oracle, ring_expand_oracle, RingExpr};

fn space() -> impl Strategy<Value = Space> {
    prop::collection::vec(1u32..=3, 1..=3)
        .prop_filter("k <= 6", |f| f.iter().sum::<u32>() <= 6)
        .prop_map(|f| Space::new(f).unwrap())
}

fn class_in(space: &Space, degree: u32, nonneg: bool) -> impl Strategy<Value = CohClass> {
    let m = space.num_factors();
    let factors = space.factors().to_vec();
    let lo = if nonneg { 0i64 } else { -6 };
    let space = space.clone();
    prop::collection::vec((prop::collection::vec(0u32..=3, m), lo..=6), 0..5).prop_map(move |raw| {
        let terms = raw.into_iter().filter_map(|(mut e, v)| {
            // pour surplus into factors with room until the degree is met
            for (x, n) in e.iter_mut().zip(&factors) {
                *x = (*x).min(*n);
            }
            let mut total: u32 = e.iter().sum();
            for (x, n) in e.iter_mut().zip(&factors) {
                while total > degree && *x > 0 {
                    *x -= 1;
                    total -= 1;
                }
                while total < degree && *x < *n {
                    *x += 1;
                    total += 1;
                }
            }
            (total == degree).then(|| (e, BigInt::from(v)))
        });
        CohClass::from_terms(&space, degree, terms.collect::<Vec<_>>()).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (CohClass, CohClass, CohClass)> {
    space().prop_flat_map(|s| {
        let k = s.dim();
        (0..=k, 0..=k, 0..=k).prop_flat_map(move |(a, b, c)| {
            let (b, c) = (b.min(k - a), c.min(k - a - b.min(k - a)));
            (class_in(&s, a, false), class_in(&s, b, false), class_in(&s, c, false))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_associative((x, y, z) in triple()) {
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn product_matches_expansion((x, y, _z) in triple()) {
        let expr = RingExpr::from_class(&x).times(&RingExpr::from_class(&y));
        let want = ring_expand_oracle(x.space(), x.degree() + y.degree(), &expr).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap(), want);
    }

    #[test]
    fn product_distributes((x, y, z) in triple()) {
        let y2 = y.scale(&BigInt::from(-3));
        let lhs = x.mul(&y.add(&y2).unwrap()).unwrap();
        let rhs = x.mul(&y).unwrap().add(&x.mul(&y2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(z.sub(&z).unwrap().is_zero());
    }

    #[test]
    fn pairing_is_symmetric_and_matches_expansion(
        (x, y) in space().prop_flat_map(|s| {
            let k = s.dim();
            (0..=k).prop_flat_map(move |p| (class_in(&s, p, false), class_in(&s, k - p, false)))
        })
    ) {
        prop_assert_eq!(x.pair(&y).unwrap(), y.pair(&x).unwrap());
        prop_assert_eq!(x.pair(&y).unwrap(), pair_oracle(&x, &y).unwrap());
    }

    #[test]
    fn kaehler_mass_is_multinomial(s in space()) {
        // <omega^k> = k! / prod n_i!
        let k = s.dim();
        let fact = |n: u32| (1..=n).map(BigInt::from).product::<BigInt>();
        let want = fact(k) / s.factors().iter().map(|&n| fact(n)).product::<BigInt>();
        prop_assert_eq!(kaehler_power(&s, k).unwrap().mass().unwrap(), want);
    }

    #[test]
    fn alpha_is_monotone_on_effective_classes(
        (s, c) in (1u32..=4, 1u32..=4).prop_flat_map(|(base, fiber)| {
            let s = Space::fibred(
                std::iter::repeat_n(1, (base + fiber) as usize).collect(), base as usize,
            ).unwrap();
            let k = s.dim();
            (Just(s.clone()), (0..=k).prop_flat_map(move |p| class_in(&s, p, true)))
        })
    ) {
        let (lo, hi) = alpha_window(&s, c.degree()).unwrap();
        for j in lo..hi {
            prop_assert!(alpha(&c, j).unwrap() <= alpha(&c, j + 1).unwrap());
        }
    }

    #[test]
    fn compounds_multiply(
        k in 2usize..=4,
        a in prop::collection::vec(-4i64..=4, 16),
        b in prop::collection::vec(-4i64..=4, 16),
    ) {
        let mat = |v: &[i64]| IntMatrix::from_rows(&v.chunks(4).take(k).map(|r| r[..k].to_vec()).collect::<Vec<_>>()).unwrap();
        let (a, b) = (mat(&a), mat(&b));
        let ab = a.mul(&b).unwrap();
        for p in 0..=k as u32 {
            let c = |m: &IntMatrix| compound(m, p).unwrap().matrix;
            prop_assert_eq!(c(&a).mul(&c(&b)).unwrap(), c(&ab));
        }
    }

    #[test]
    fn pullback_classes_are_effective(
        a in prop::collection::vec(-3i64..=3, 9),
    ) {
        let rows: Vec<Vec<i64>> = a.chunks(3).map(<[i64]>::to_vec).collect();
        let Ok(f) = MonomialMap::from_rows(&rows) else { return Ok(()) };
        for p in 0..=3 {
            for c in f.pullback_classes(p, 5).unwrap() {
                prop_assert!(c.is_effective());
            }
        }
    }
}
