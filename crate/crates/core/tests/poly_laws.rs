use mahlerkit::poly::{add, cyclotomic, cyclotomic_split, multiply, reciprocal};
use mahlerkit::{parse, LaurentPoly};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn laurent(max_len: usize, height: i64) -> impl Strategy<Value = LaurentPoly> {
    (prop::collection::vec(-height..=height, 1..=max_len), -4i64..=4)
        .prop_map(|(c, off)| LaurentPoly::from_i64s(&c, off))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_laws(a in laurent(6, 9), b in laurent(6, 9), c in laurent(6, 9)) {
        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(multiply(&a, &b), multiply(&b, &a));
        prop_assert_eq!(multiply(&multiply(&a, &b), &c), multiply(&a, &multiply(&b, &c)));
        prop_assert_eq!(multiply(&a, &add(&b, &c)), add(&multiply(&a, &b), &multiply(&a, &c)));
        prop_assert_eq!(multiply(&a, &LaurentPoly::one()), a.clone());
        prop_assert!(add(&a, &a.neg()).is_zero());
    }

    #[test]
    fn reciprocal_is_multiplicative_involution(a in laurent(6, 5), b in laurent(6, 5)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ra = reciprocal(&a).unwrap();
        prop_assert_eq!(reciprocal(&ra).unwrap(), a.clone());
        let lhs = reciprocal(&multiply(&a, &b)).unwrap();
        let rhs = multiply(&ra, &reciprocal(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_parses_back(a in laurent(8, 20)) {
        prop_assert_eq!(parse(&a.to_string()).unwrap(), a);
    }
}

#[test]
fn split_reassembles_random_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let mut f = LaurentPoly::from_i64s(
            &(0..rng.gen_range(1..5)).map(|_| rng.gen_range(-4..=4)).collect::<Vec<i64>>(),
            rng.gen_range(-3..=3),
        );
        if f.is_zero() {
            f = LaurentPoly::constant(3);
        }
        for _ in 0..rng.gen_range(0..4) {
            let d = rng.gen_range(1..=30u64);
            f = multiply(&f, &cyclotomic(d));
        }
        let split = cyclotomic_split(&f).unwrap();
        assert_eq!(split.reassemble(), f, "{f}");
        assert!(split.content > BigInt::from(0));
    }
}

#[test]
fn cyclotomic_degrees_match_totient() {
    for d in 1..=100u64 {
        assert_eq!(cyclotomic(d).degree() as u64, mahlerkit::poly::euler_phi(d), "Φ_{d}");
    }
}
