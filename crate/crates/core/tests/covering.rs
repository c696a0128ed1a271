use ctpair_core::arith::rat;
use ctpair_core::covering::{
    construct_f, delta_f_consistency, evaluate_f, local_points_auto, make_covering, second_covering, trivial_point,
    verify_f_properties, LocalPoint,
};
use ctpair_core::descent::{new_curve, point_search, selmer2, CurvePoint, SelmerElement, SelmerStatus};
use ctpair_core::local::has_local_square_norm;
use ctpair_core::Place;

fn identity() -> SelmerElement {
    SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage).unwrap()
}

#[test]
fn quadrics_of_the_congruent_one_curve() {
    let e = new_curve(-1, 0, 1).unwrap();
    let c = make_covering(&e, &identity()).unwrap();
    assert_eq!(c.q1.to_string(), "-z0^2 + z1^2 - z2^2");
    assert_eq!(c.q2.to_string(), "-2*z0^2 + z1^2 - z3^2");
    for s in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
        assert!(c.contains(&[rat(0), rat(1), rat(s[0]), rat(s[1])]));
    }
}

#[test]
fn delta_equals_f_on_trivial_coverings() {
    for roots in [[-6, 0, 6], [-9, -7, 10], [-8, 2, 9], [-3, 0, 5]] {
        let e = new_curve(roots[0], roots[1], roots[2]).unwrap();
        let f = construct_f(&make_covering(&e, &identity()).unwrap()).unwrap();
        let mut pts = vec![CurvePoint::Infinity];
        pts.extend(e.torsion_points());
        for p in point_search(&e, 5000).into_iter().filter(|p| !e.is_torsion_2(p)).take(2) {
            pts.push(e.double(&p));
            pts.push(e.add(&p, &e.torsion_point(0)));
            pts.push(p);
        }
        let verdicts = delta_f_consistency(&e, &f, &pts).unwrap();
        let checked: Vec<bool> = verdicts.iter().filter_map(|v| v.1).collect();
        assert!(checked.len() >= 4, "{roots:?}");
        assert!(checked.iter().all(|&b| b), "{roots:?}: {verdicts:?}");
    }
}

#[test]
fn square_identity_and_local_norms() {
    for roots in [[-17, 0, 17], [-5, 0, 5], [-4, 1, 3]] {
        let e = new_curve(roots[0], roots[1], roots[2]).unwrap();
        let s = selmer2(&e).unwrap();
        for code in 0..1u64 << s.dimension {
            let d = SelmerElement::new(s.element(code), SelmerStatus::Selmer).unwrap();
            let c = make_covering(&e, &d).unwrap();
            let f = construct_f(&c).unwrap();
            assert!(f.square_identity(&c), "{roots:?} {d}");
            let mut samples = Vec::new();
            for v in [Place::Real, Place::Finite(2), Place::Finite(3)] {
                samples.extend(local_points_auto(&c, &f, v, 2, 5).unwrap());
            }
            let report = verify_f_properties(&c, &f, &samples).unwrap();
            assert!(report.passed(), "{roots:?} {d}: {report:?}");
        }
    }
}

#[test]
fn local_points_are_certified_and_reproducible() {
    let e = new_curve(-6, 0, 6).unwrap();
    let s = selmer2(&e).unwrap();
    let d = s.basis.last().unwrap();
    let c = make_covering(&e, d).unwrap();
    let f = construct_f(&c).unwrap();
    for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5)] {
        let a = local_points_auto(&c, &f, v, 3, 9).unwrap();
        let b = local_points_auto(&c, &f, v, 3, 9).unwrap();
        assert_eq!(a.iter().map(|p| &p.coordinates).collect::<Vec<_>>(), b.iter().map(|p| &p.coordinates).collect::<Vec<_>>());
        for p in &a {
            assert!(p.check(&c).unwrap(), "{v}");
            assert!(has_local_square_norm(&evaluate_f(&f, p).unwrap(), v).unwrap());
        }
    }
}

#[test]
fn scaling_coordinates_leaves_values_unchanged() {
    let e = new_curve(-6, 0, 6).unwrap();
    let c = make_covering(&e, &identity()).unwrap();
    let f = construct_f(&c).unwrap();
    let z = trivial_point(&e, &CurvePoint::affine(rat(-3), rat(9)));
    let scaled = z.clone().map(|t| t * rat(-14));
    for v in [Place::Finite(3), Place::Finite(7), Place::Real] {
        let a = evaluate_f(&f, &LocalPoint::rational(&c, v, z.clone()).unwrap()).unwrap();
        let b = evaluate_f(&f, &LocalPoint::rational(&c, v, scaled.clone()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn perturbed_triple_is_rejected() {
    let e = new_curve(-6, 0, 6).unwrap();
    let c = make_covering(&e, &identity()).unwrap();
    let f = construct_f(&c).unwrap();
    assert!(f.scaled(&[rat(7), rat(1), rat(1)]).is_err());
    let mut bad = f.clone();
    bad.num[0] = bad.num[0].scale(&rat(7));
    assert!(!bad.square_identity(&c));
}

#[test]
fn emitted_second_covering() {
    let e = new_curve(-6, 0, 6).unwrap();
    let s = selmer2(&e).unwrap();
    for d in &s.basis {
        let c = make_covering(&e, d).unwrap();
        let sys = second_covering(&c, &construct_f(&c).unwrap());
        assert_eq!(sys.variables.len(), 7);
        assert_eq!(sys.equations.len(), 5);
        let text = sys.to_string();
        assert!(!text.contains('/'));
        assert_eq!(text.lines().count(), 5);
        for u in ["u1", "u2", "u3"] {
            assert!(text.contains(u));
        }
    }
}
