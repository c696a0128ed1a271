use ctpair_core::arith::rat;
use ctpair_core::descent::{
    corpus, descent_map, local_solvable, new_curve, point_search, selmer2, selmer_candidates, Curve2T, CurvePoint,
    SelmerElement, SelmerStatus,
};
use ctpair_core::{AlgebraClass, Place};
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn curve_records() {
    let e = new_curve(-1, 0, 1).unwrap();
    assert_eq!(e.discriminant(), &BigInt::from(64));
    assert_eq!(new_curve(-6, 0, 6).unwrap().coefficients(), [0.into(), BigInt::from(-36), 0.into()]);
    assert!(new_curve(0, 0, 1).is_err());
    assert_eq!(Curve2T::from_ab(6, 6).unwrap().roots(), new_curve(-6, 0, 6).unwrap().roots());
}

#[test]
fn descent_map_values() {
    let e = new_curve(-6, 0, 6).unwrap();
    let p = CurvePoint::affine(rat(-3), rat(9));
    assert_eq!(descent_map(&e, &p).unwrap(), AlgebraClass::from_i64([3, -3, -1]).unwrap());
    assert!(descent_map(&e, &CurvePoint::Infinity).unwrap().is_one());
    let c = new_curve(-1, 0, 1).unwrap();
    assert_eq!(descent_map(&c, &c.torsion_point(1)).unwrap(), AlgebraClass::from_i64([1, -1, -1]).unwrap());
    assert!(descent_map(&e, &CurvePoint::affine(rat(1), rat(1))).is_err());
}

#[test]
fn selmer_groups_of_anchor_curves() {
    let c = new_curve(-1, 0, 1).unwrap();
    assert_eq!(selmer_candidates(&c).len(), 16);
    assert_eq!(selmer2(&c).unwrap().dimension, 2);
    let d = SelmerElement::from_pair(-1, -1, SelmerStatus::Candidate).unwrap();
    assert!(!local_solvable(&c, &d, Place::Real).unwrap());
    let e = new_curve(-6, 0, 6).unwrap();
    let s = selmer2(&e).unwrap();
    assert_eq!(s.dimension, 3);
    assert!(s.contains(&AlgebraClass::from_i64([3, -3, -1]).unwrap()));
}

#[test]
fn trivial_covering_is_everywhere_solvable() {
    let e = new_curve(-3, 1, 8).unwrap();
    let one = SelmerElement::from_pair(1, 1, SelmerStatus::Candidate).unwrap();
    for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(11)] {
        assert!(local_solvable(&e, &one, v).unwrap());
    }
}

#[test]
fn searched_points_land_in_the_selmer_group() {
    for e in corpus().into_iter().step_by(9) {
        let s = selmer2(&e).unwrap();
        let mut pts = point_search(&e, 400);
        pts.push(CurvePoint::Infinity);
        for p in &pts {
            let img = descent_map(&e, p).unwrap();
            assert!(img.has_square_norm());
            assert!(s.contains(&img), "{:?}: {p}", e.roots());
        }
        for p in pts.iter().take(6) {
            for q in pts.iter().take(6) {
                let sum = descent_map(&e, &e.add(p, q)).unwrap();
                let prod = descent_map(&e, p).unwrap().mul(&descent_map(&e, q).unwrap());
                assert_eq!(sum, prod, "{:?}: {p} + {q}", e.roots());
            }
        }
    }
}

#[test]
fn search_finds_the_congruent_six_point() {
    let e = new_curve(-6, 0, 6).unwrap();
    let pts = point_search(&e, 100);
    assert!(pts.contains(&CurvePoint::affine(rat(-3), rat(9))));
    for t in e.torsion_points() {
        assert!(pts.contains(&t));
    }
    assert!(pts.iter().all(|p| e.contains(p)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn descent_map_is_a_homomorphism(m in -4i64..=4, n in -4i64..=4, t in 0usize..4) {
        let e = new_curve(-6, 0, 6).unwrap();
        let p = CurvePoint::affine(rat(-3), rat(9));
        let tors = if t == 3 { CurvePoint::Infinity } else { e.torsion_point(t) };
        let a = e.add(&e.mul(&p, m), &tors);
        let b = e.mul(&p, n);
        let lhs = descent_map(&e, &e.add(&a, &b)).unwrap();
        let rhs = descent_map(&e, &a).unwrap().mul(&descent_map(&e, &b).unwrap());
        prop_assert_eq!(lhs, rhs);
        let doubled = descent_map(&e, &e.double(&a)).unwrap();
        prop_assert!(doubled.is_one());
    }
}
