use std::collections::BTreeMap;

use ctpair_core::arith::rat;
use ctpair_core::covering::{construct_f, make_covering, Poly};
use ctpair_core::descent::{new_curve, selmer2, Curve2T, SelmerElement, SelmerGroup, SelmerStatus};
use ctpair_core::pairing::{
    basis_data, cassels_pairing, pairing_matrix, refined_bounds, relevant_places, CoveringData, PairingOptions,
};
use ctpair_core::{Place, SymbolValue};

fn gram(data: &[CoveringData], s: &SelmerGroup, choice: usize) -> Vec<Vec<u8>> {
    data.iter()
        .map(|d| s.basis.iter().map(|b| d.pair(&b.classes, choice).unwrap().value.bit()).collect())
        .collect()
}

fn linear(c: [i64; 4]) -> Poly {
    Poly::linear(&c.map(rat))
}

#[test]
fn non_congruent_seventeen_has_a_nondegenerate_block() {
    let e = new_curve(-17, 0, 17).unwrap();
    let r = refined_bounds(&e, 2000, &PairingOptions::default()).unwrap();
    assert_eq!(r.selmer_dimension, 4);
    assert_eq!(r.matrix_rank, 2);
    assert_eq!(r.rank_upper_bound, 0);
    assert_eq!(r.sha2_lower_bound, 2);
    assert!(r.point_images.is_empty());
    assert!(r.consistent());
}

#[test]
fn pairing_is_independent_of_choices() {
    let e = new_curve(-17, 0, 17).unwrap();
    let s = selmer2(&e).unwrap();
    let opts = PairingOptions::default();
    let data = basis_data(&e, &s, &opts).unwrap();
    let reference = gram(&data, &s, 0);
    assert!(reference.iter().flatten().any(|&b| b == 1));
    for choice in 1..3 {
        assert_eq!(gram(&data, &s, choice), reference, "point choice {choice}");
    }
    let reseeded = basis_data(&e, &s, &PairingOptions { seed: 99, ..opts }).unwrap();
    assert_eq!(gram(&reseeded, &s, 0), reference);
    for c in [3, -5, 34] {
        let scaled: Vec<CoveringData> = s
            .basis
            .iter()
            .map(|a| {
                let cov = make_covering(&e, a).unwrap();
                let f = construct_f(&cov).unwrap().scaled(&[rat(c), rat(c), rat(1)]).unwrap();
                CoveringData::with_f(&e, a, cov, f, &opts).unwrap()
            })
            .collect();
        assert_eq!(gram(&scaled, &s, 0), reference, "constant {c}");
    }
    let h = [
        (linear([1, 2, 0, 1]), linear([3, 0, 1, 1])),
        (linear([0, 1, 1, 5]), linear([1, 1, 1, 1])),
        (linear([2, 0, 3, 1]), linear([1, 0, 0, 0])),
    ];
    let squared: Vec<CoveringData> = s
        .basis
        .iter()
        .map(|a| {
            let cov = make_covering(&e, a).unwrap();
            let f = construct_f(&cov).unwrap().times_squares(&h);
            assert!(f.square_identity(&cov));
            CoveringData::with_f(&e, a, cov, f, &opts).unwrap()
        })
        .collect();
    assert_eq!(gram(&squared, &s, 0), reference);
}

#[test]
fn pairing_is_alternating_on_every_element() {
    let e = new_curve(-17, 0, 17).unwrap();
    let s = selmer2(&e).unwrap();
    let opts = PairingOptions::default();
    for a in s.elements() {
        let a = SelmerElement::new(a, SelmerStatus::Selmer).unwrap();
        assert_eq!(cassels_pairing(&e, &a, &a, &opts).unwrap().value, SymbolValue::Plus, "{a}");
    }
}

#[test]
fn local_terms_multiply_to_the_value() {
    let e = new_curve(-17, 0, 17).unwrap();
    let s = selmer2(&e).unwrap();
    let opts = PairingOptions::default();
    for a in &s.basis {
        for b in &s.basis {
            let v = cassels_pairing(&e, a, b, &opts).unwrap();
            assert_eq!(v.local_terms.values().copied().product::<SymbolValue>(), v.value);
            assert!(v.local_terms.contains_key(&Place::Real) && v.local_terms.contains_key(&Place::Finite(2)));
        }
    }
}

#[test]
fn matrix_invariants_on_small_curves() {
    for roots in [[-6, 0, 6], [-8, 2, 9], [-9, -7, 10], [-5, 0, 5], [-2, 3, 7]] {
        let e = Curve2T::new(roots).unwrap();
        let s = selmer2(&e).unwrap();
        let m = pairing_matrix(&e, &s, &PairingOptions::default()).unwrap();
        assert!(m.is_alternating(), "{roots:?}");
        assert_eq!(m.rank() % 2, 0);
        assert!(m.is_bilinear_on_samples());
        assert!(m.spot_checks_trivial());
        assert!(!m.spot_checks.is_empty());
    }
}

#[test]
fn congruent_six_pairs_trivially_and_reports_its_point() {
    let e = new_curve(-6, 0, 6).unwrap();
    let r = refined_bounds(&e, 10_000, &PairingOptions::default()).unwrap();
    assert_eq!((r.selmer_dimension, r.matrix_rank, r.rank_upper_bound, r.rank_lower_bound), (3, 0, 1, 1));
    assert!(r.pairing.entries.iter().flatten().all(|&b| b == 0));
    assert!(r.consistent());
    let s = &r.selmer;
    let opts = PairingOptions::default();
    for a in s.elements() {
        for b in s.elements() {
            let a = SelmerElement::new(a.clone(), SelmerStatus::Selmer).unwrap();
            let b = SelmerElement::new(b, SelmerStatus::Selmer).unwrap();
            assert_eq!(cassels_pairing(&e, &a, &b, &opts).unwrap().value, SymbolValue::Plus);
        }
    }
}

#[test]
fn places_of_the_identity_pairing() {
    let e = new_curve(-1, 0, 1).unwrap();
    let one = SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage).unwrap();
    let f = construct_f(&make_covering(&e, &one).unwrap()).unwrap();
    assert_eq!(relevant_places(&e, &one, &one, &f, &BTreeMap::new()).unwrap(), vec![Place::Real, Place::Finite(2)]);
    let e = new_curve(-6, 0, 6).unwrap();
    let s = selmer2(&e).unwrap();
    for a in &s.basis {
        let f = construct_f(&make_covering(&e, a).unwrap()).unwrap();
        for b in &s.basis {
            let places = relevant_places(&e, a, b, &f, &BTreeMap::new()).unwrap();
            for j in 0..3 {
                for p in a.d(j).support().into_iter().chain(b.d(j).support()) {
                    assert!(places.contains(&Place::Finite(p)));
                }
            }
        }
    }
}
