use ctpair_core::arith::{ratio, Place, Rational};
use ctpair_core::local::{
    algebra_symbol, hilbert_symbol, reciprocity_check, solvability_oracle_auto, AlgebraClass, SymbolValue,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    loop {
        let n = rng.gen_range(-bound..=bound);
        if n != 0 {
            return ratio(n, rng.gen_range(1..=bound));
        }
    }
}

const PRIMES_TO_50: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

#[test]
fn spec_symbol_values() {
    let m1 = ratio(-1, 1);
    assert_eq!(hilbert_symbol(&m1, &m1, Place::Real).unwrap(), SymbolValue::Minus);
    assert_eq!(hilbert_symbol(&m1, &m1, Place::Finite(2)).unwrap(), SymbolValue::Minus);
    assert_eq!(hilbert_symbol(&ratio(2, 1), &ratio(7, 1), Place::Finite(7)).unwrap(), SymbolValue::Plus);
    for v in [Place::Real, Place::Finite(2), Place::Finite(3)] {
        assert_eq!(hilbert_symbol(&ratio(1, 1), &ratio(-15, 7), v).unwrap(), SymbolValue::Plus);
    }
    assert_eq!(solvability_oracle_auto(&m1, &m1, Place::Finite(2)).unwrap(), SymbolValue::Minus);
    assert_eq!(solvability_oracle_auto(&ratio(2, 1), &ratio(7, 1), Place::Finite(7)).unwrap(), SymbolValue::Plus);
    assert_eq!(solvability_oracle_auto(&ratio(5, 1), &ratio(3, 1), Place::Real).unwrap(), SymbolValue::Plus);
    for (a, b) in [(-1, -1), (1, 13), (2, 5)] {
        assert_eq!(reciprocity_check(&ratio(a, 1), &ratio(b, 1)).unwrap(), SymbolValue::Plus);
    }
}

#[test]
fn algebra_symbol_values() {
    let g = AlgebraClass::from_i64([-1, -1, 1]).unwrap();
    assert_eq!(algebra_symbol(&g, &g, Place::Real).unwrap(), SymbolValue::Plus);
    let m = AlgebraClass::from_i64([-1, -1, -1]).unwrap();
    assert_eq!(algebra_symbol(&m, &m, Place::Real).unwrap(), SymbolValue::Minus);
    let d = AlgebraClass::from_i64([3, -6, 10]).unwrap();
    for v in [Place::Real, Place::Finite(2), Place::Finite(5)] {
        assert_eq!(algebra_symbol(&AlgebraClass::one(), &d, v).unwrap(), SymbolValue::Plus);
    }
}

#[test]
fn reciprocity_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = random_rational(&mut rng, 10_000);
        let b = random_rational(&mut rng, 10_000);
        assert_eq!(reciprocity_check(&a, &b).unwrap(), SymbolValue::Plus, "({a}, {b})");
    }
}

#[test]
fn closed_form_matches_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..25 {
        let a = random_rational(&mut rng, 1000);
        let b = random_rational(&mut rng, 1000);
        for p in PRIMES_TO_50 {
            let v = Place::Finite(p);
            assert_eq!(
                hilbert_symbol(&a, &b, v).unwrap(),
                solvability_oracle_auto(&a, &b, v).unwrap(),
                "({a}, {b}) at {p}"
            );
        }
    }
}

#[test]
fn zero_arguments_rejected() {
    let zero = Rational::from_integer(BigInt::from(0));
    assert!(hilbert_symbol(&zero, &ratio(3, 1), Place::Real).is_err());
    assert!(solvability_oracle_auto(&ratio(3, 1), &zero, Place::Finite(3)).is_err());
}

proptest! {
    #[test]
    fn reciprocity_holds(an in -5000i64..5000, ad in 1i64..5000, bn in -5000i64..5000, bd in 1i64..5000) {
        prop_assume!(an != 0 && bn != 0);
        prop_assert_eq!(reciprocity_check(&ratio(an, ad), &ratio(bn, bd)).unwrap(), SymbolValue::Plus);
    }

    #[test]
    fn steinberg_relations(an in 1i64..3000, ad in 1i64..3000, pi in 0usize..15) {
        prop_assume!(an != ad);
        let v = Place::Finite(PRIMES_TO_50[pi]);
        for a in [ratio(an, ad), ratio(-an, ad)] {
            prop_assert_eq!(hilbert_symbol(&a, &(-a.clone()), v).unwrap(), SymbolValue::Plus);
            prop_assert_eq!(hilbert_symbol(&a, &(ratio(1, 1) - &a), v).unwrap(), SymbolValue::Plus);
        }
    }
}
