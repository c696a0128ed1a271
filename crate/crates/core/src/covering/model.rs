//! The 2-covering `C_d` as the intersection of two diagonal quadrics.

use num_traits::{One, Zero};

use super::conic::Conic;
use super::poly::{var, Poly, QuotientRing, NVARS};
use crate::arith::{rat, Rational};
use crate::descent::{Curve2T, SelmerElement};
use crate::error::{Error, Result};

/// `C_d : d1 z1^2 - d2 z2^2 - (e2 - e1) z0^2 = d1 z1^2 - d1 d2 z3^2 - (e3 - e1) z0^2 = 0`
/// with covering map `x = e1 + d1 (z1/z0)^2`, `y = d1 d2 z1 z2 z3 / z0^3`.
/// Equivalently `delta_k z_k^2 + e_k z0^2` is the same for `k = 1, 2, 3`,
/// where `delta = (d1, d2, d1 d2)`.
#[derive(Debug, Clone)]
pub struct CoveringModel {
    pub curve: Curve2T,
    pub d: SelmerElement,
    pub delta: [Rational; 3],
    pub q1: Poly,
    pub q2: Poly,
    ring: QuotientRing,
}

/// A singular member of the pencil: a cone whose vertex is a coordinate
/// point, over a diagonal conic in the remaining three coordinates.
#[derive(Debug, Clone)]
pub struct Cone {
    /// Coordinate index of the vertex: 0 for the cone at infinity, `k` for
    /// the cone attached to the root `e_k`.
    pub vertex: usize,
    pub vars: [usize; 3],
    pub conic: Conic,
}

impl Cone {
    pub fn form(&self) -> Poly {
        let mut c: [Rational; NVARS] = Default::default();
        for (i, &v) in self.vars.iter().enumerate() {
            c[v] = self.conic.coeffs[i].clone();
        }
        Poly::diagonal(&c)
    }

    /// A point of the base conic placed in projective 3-space.
    pub fn embed(&self, q: &[num_bigint::BigInt; 3]) -> [Rational; NVARS] {
        let mut p: [Rational; NVARS] = Default::default();
        for (i, &v) in self.vars.iter().enumerate() {
            p[v] = Rational::from_integer(q[i].clone());
        }
        p
    }

    /// The plane through the vertex tangent to the cone along the ruling of `q`.
    pub fn tangent_plane(&self, q: &[num_bigint::BigInt; 3]) -> Poly {
        let mut c: [Rational; NVARS] = Default::default();
        for (i, &v) in self.vars.iter().enumerate() {
            c[v] = &self.conic.coeffs[i] * Rational::from_integer(q[i].clone());
        }
        Poly::linear(&c)
    }

    pub fn vertex_point(&self) -> [Rational; NVARS] {
        let mut p: [Rational; NVARS] = Default::default();
        p[self.vertex] = Rational::one();
        p
    }
}

/// Builds `C_d` and checks the covering-map identities symbolically.
pub fn make_covering(e: &Curve2T, d: &SelmerElement) -> Result<CoveringModel> {
    let [e1, e2, e3] = e.roots().map(rat);
    let d1 = d.d(0).to_rational();
    let d2 = d.d(1).to_rational();
    let delta = [d1.clone(), d2.clone(), &d1 * &d2];
    let z = |i: usize| var(i).pow(2);
    let q1 = z(1).scale(&d1).sub(&z(2).scale(&d2)).sub(&z(0).scale(&(&e2 - &e1)));
    let q2 = z(1).scale(&d1).sub(&z(3).scale(&delta[2])).sub(&z(0).scale(&(&e3 - &e1)));
    let base = z(1).scale(&d1).add(&z(0).scale(&e1));
    let a = base.sub(&z(0).scale(&e2)).scale(&(Rational::one() / &delta[1]));
    let b = base.sub(&z(0).scale(&e3)).scale(&(Rational::one() / &delta[2]));
    let ring = QuotientRing::new(a, b);
    let c = CoveringModel { curve: e.clone(), d: d.clone(), delta, q1, q2, ring };
    c.check_covering_map()?;
    Ok(c)
}

impl CoveringModel {
    pub fn ring(&self) -> &QuotientRing {
        &self.ring
    }

    pub fn is_trivial(&self) -> bool {
        self.d.is_identity()
    }

    /// `delta_k z_k^2 + e_k z0^2` for `k = 1, 2, 3`.
    pub fn level(&self, k: usize) -> Poly {
        var(k).pow(2).scale(&self.delta[k - 1]).add(&var(0).pow(2).scale(&rat(self.curve.root(k - 1))))
    }

    /// The two quadrics as symmetric matrices.
    pub fn matrices(&self) -> [[[Rational; NVARS]; NVARS]; 2] {
        [self.q1.gram(), self.q2.gram()]
    }

    fn check_covering_map(&self) -> Result<()> {
        let [e1, ..] = self.curve.roots().map(rat);
        let x_num = var(1).pow(2).scale(&self.delta[0]).add(&var(0).pow(2).scale(&e1));
        // z0^6 F(x) = prod_j (x_num - e_j z0^2)
        let mut f = Poly::constant(Rational::one());
        for j in 0..3 {
            let factor = x_num.sub(&var(0).pow(2).scale(&rat(self.curve.root(j))));
            if !self.ring.is_zero(&factor.sub(&var(j + 1).pow(2).scale(&self.delta[j]))) {
                return Err(Error::Construction(format!("x - e{} is not d{} times a square", j + 1, j + 1)));
            }
            f = f.mul(&factor);
        }
        let y = var(1).mul(&var(2)).mul(&var(3)).scale(&self.delta[2]);
        if !self.ring.is_zero(&y.pow(2).sub(&f)) {
            return Err(Error::Construction("covering map does not land on the curve".into()));
        }
        Ok(())
    }

    /// Whether the exact rational point lies on both quadrics.
    pub fn contains(&self, p: &[Rational; NVARS]) -> bool {
        p.iter().any(|c| !c.is_zero()) && self.q1.eval(p).is_zero() && self.q2.eval(p).is_zero()
    }

    /// The four singular members of the pencil: the cones at `e1, e2, e3`
    /// and at infinity.
    pub fn cones(&self) -> Result<[Cone; 4]> {
        let e = self.curve.roots().map(rat);
        let mut out = Vec::with_capacity(4);
        for k in 1..=3usize {
            let others: Vec<usize> = (1..=3).filter(|&i| i != k).collect();
            let (i, l) = (others[0], others[1]);
            // level(i) - level(l)
            let conic = Conic::new([&e[i - 1] - &e[l - 1], self.delta[i - 1].clone(), -self.delta[l - 1].clone()])?;
            out.push(Cone { vertex: k, vars: [0, i, l], conic });
        }
        // sum_k lambda_k level(k) with lambda = (e2 - e3, e3 - e1, e1 - e2)
        let lambda = [&e[1] - &e[2], &e[2] - &e[0], &e[0] - &e[1]];
        let conic = Conic::new([
            &lambda[0] * &self.delta[0],
            &lambda[1] * &self.delta[1],
            &lambda[2] * &self.delta[2],
        ])?;
        out.push(Cone { vertex: 0, vars: [1, 2, 3], conic });
        let cones: [Cone; 4] = out.try_into().unwrap();
        for c in &cones {
            if !self.ring.is_zero(&c.form()) {
                return Err(Error::Construction("cone is not in the pencil".into()));
            }
        }
        Ok(cones)
    }

    /// The image of a point of `C_d` with `z0 != 0` on the curve.
    pub fn project(&self, p: &[Rational; NVARS]) -> Option<(Rational, Rational)> {
        if p[0].is_zero() {
            return None;
        }
        let r = |i: usize| &p[i] / &p[0];
        let x = rat(self.curve.root(0)) + &self.delta[0] * r(1) * r(1);
        let y = &self.delta[2] * r(1) * r(2) * r(3);
        Some((x, y))
    }
}

/// The point of the trivial covering lying over the point `R` of `E` under
/// the isomorphism `C_1 -> E` fixing the base points:
/// `(2y : (x - e1)^2 - F'(e1) : (x - e2)^2 - F'(e2) : (x - e3)^2 - F'(e3))`, whose
/// image under the covering map is `2R`.
pub fn trivial_point(e: &Curve2T, r: &crate::descent::CurvePoint) -> [Rational; NVARS] {
    match r {
        crate::descent::CurvePoint::Infinity => [Rational::zero(), rat(1), rat(1), rat(1)],
        crate::descent::CurvePoint::Affine { x, y } => {
            let mut p: [Rational; NVARS] = Default::default();
            p[0] = rat(2) * y;
            for j in 0..3 {
                let t = x - rat(e.root(j));
                p[j + 1] = &t * &t - rat(e.derivative_at_root(j));
            }
            p
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::{new_curve, selmer2, CurvePoint, SelmerStatus};

    #[test]
    fn trivial_covering_contains_base_points() {
        let e = new_curve(-6, 0, 6).unwrap();
        let one = SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage).unwrap();
        let c = make_covering(&e, &one).unwrap();
        for s2 in [1, -1] {
            for s3 in [1, -1] {
                assert!(c.contains(&[rat(0), rat(1), rat(s2), rat(s3)]));
            }
        }
        assert!(!c.contains(&[rat(1), rat(1), rat(1), rat(1)]));
    }

    #[test]
    fn over_points_of_the_curve() {
        let e = new_curve(-6, 0, 6).unwrap();
        let one = SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage).unwrap();
        let c = make_covering(&e, &one).unwrap();
        let p = CurvePoint::affine(rat(-3), rat(9));
        for r in [p.clone(), e.double(&p), e.add(&p, &e.torsion_point(0)), CurvePoint::Infinity] {
            let z = trivial_point(&e, &r);
            assert!(c.contains(&z), "{r}");
            if let Some((x, y)) = c.project(&z) {
                assert!(e.contains(&CurvePoint::affine(x.clone(), y)));
                assert_eq!(Some(&x), e.double(&r).x());
            }
        }
        for t in e.torsion_points() {
            let z = trivial_point(&e, &t);
            assert!(z[0].is_zero() && c.contains(&z));
        }
    }

    #[test]
    fn cones_of_selmer_coverings() {
        for roots in [[-6, 0, 6], [0, 5, 12], [-1, 0, 1]] {
            let e = Curve2T::new(roots).unwrap();
            let s = selmer2(&e).unwrap();
            for d in &s.basis {
                let c = make_covering(&e, d).unwrap();
                for cone in c.cones().unwrap() {
                    let q = cone.conic.point().unwrap();
                    assert!(cone.conic.eval(&q).is_zero());
                    assert!(cone.form().eval(&cone.embed(&q)).is_zero());
                }
            }
        }
    }
}
