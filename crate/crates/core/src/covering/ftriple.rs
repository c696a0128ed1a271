//! The functions `f_1, f_2, f_3` on a covering.
//!
//! Each cone of the pencil has a rational ruling, and the plane `l_k` through
//! the vertex tangent along it meets the covering in `2 D_k`. The classes
//! `D_k - D_oo` are the three points of order two, so `f_j = c_j l_j / l_oo`
//! has divisor `2 (D_j - D_oo)`. A quadric `g` through the eight points of
//! the four rulings gives `l_1 l_2 l_3 l_oo = kappa g^2` modulo the quadrics,
//! which makes `f_1 f_2 f_3` a square once `c_1 c_2 c_3 kappa` is.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::model::{Cone, CoveringModel};
use super::poly::{Approx, Monomial, Poly, NVARS};
use crate::arith::qlinear::{nullspace, rank};
use crate::arith::{rat, sqrt_rat, square_class_hinted, squarefree_part, Rational};
use crate::error::{Error, Result};
use crate::local::AlgebraClass;

/// Choices of tangent rulings tried before giving up.
const MAX_ATTEMPTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FTriple {
    /// `f_j = num[j] / den[j]`, homogeneous of equal degree.
    pub num: [Poly; 3],
    pub den: [Poly; 3],
    /// `g_num / g_den` squares to `f_1 f_2 f_3` on the covering.
    pub g_num: Poly,
    pub g_den: Poly,
    /// `l_1, l_2, l_3, l_oo`.
    pub tangents: [Poly; 4],
    pub constants: [Rational; 3],
    pub kappa: Rational,
}

fn monomials() -> Vec<Monomial> {
    let mut out = Vec::new();
    for i in 0..NVARS {
        for k in i..NVARS {
            let mut m = [0u8; NVARS];
            m[i] += 1;
            m[k] += 1;
            out.push(m);
        }
    }
    out
}

fn quad_vector(q: &Poly, basis: &[Monomial]) -> Vec<Rational> {
    basis.iter().map(|m| q.coefficient(m)).collect()
}

/// `B_m(a, b)` for the quadratic monomial `m`.
fn monomial_polar(m: &Monomial, a: &[Rational; NVARS], b: &[Rational; NVARS]) -> Rational {
    let idx: Vec<usize> = (0..NVARS).flat_map(|i| std::iter::repeat(i).take(m[i] as usize)).collect();
    let (i, k) = (idx[0], idx[1]);
    if i == k {
        &a[i] * &b[i]
    } else {
        (&a[i] * &b[k] + &a[k] * &b[i]) / rat(2)
    }
}

/// Linear conditions on `g` forcing its restriction to the ruling through
/// `v` and `q` to be proportional to that of the covering.
fn ruling_conditions(c: &CoveringModel, v: &[Rational; NVARS], q: &[Rational; NVARS], basis: &[Monomial]) -> Vec<Vec<Rational>> {
    let restrict = |f: &Poly| [f.polar(v, v), rat(2) * f.polar(v, q), f.polar(q, q)];
    let mut beta = restrict(&c.q1);
    if beta.iter().all(|b| b.is_zero()) {
        beta = restrict(&c.q2);
    }
    let r: Vec<[Rational; 3]> = basis
        .iter()
        .map(|m| [monomial_polar(m, v, v), rat(2) * monomial_polar(m, v, q), monomial_polar(m, q, q)])
        .collect();
    let mut rows = Vec::new();
    for (s, t) in [(0, 1), (0, 2), (1, 2)] {
        rows.push(r.iter().map(|g| &g[s] * &beta[t] - &g[t] * &beta[s]).collect());
    }
    rows
}

/// Builds `f_1, f_2, f_3` for the covering, normalized on the trivial
/// covering so that `f` is trivial at the base point `(0:1:1:1)`.
pub fn construct_f(c: &CoveringModel) -> Result<FTriple> {
    let cones = c.cones()?;
    let base: Vec<[BigInt; 3]> = cones.iter().map(|k| k.conic.point()).collect::<Result<_>>()?;
    let mut last = Error::Construction("no admissible tangent rulings".into());
    for attempt in 0..MAX_ATTEMPTS {
        let points: Option<Vec<[BigInt; 3]>> =
            cones.iter().zip(&base).map(|(k, b)| k.conic.point_from(b, attempt)).collect();
        let Some(points) = points else { continue };
        match build(c, &cones, &points) {
            Ok(f) => return Ok(f),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn build(c: &CoveringModel, cones: &[Cone; 4], points: &[[BigInt; 3]]) -> Result<FTriple> {
    let tangents: Vec<Poly> = cones.iter().zip(points).map(|(k, q)| k.tangent_plane(q).primitive().0).collect();
    let basis = monomials();
    let mut rows = Vec::new();
    for (k, q) in cones.iter().zip(points) {
        rows.extend(ruling_conditions(c, &k.vertex_point(), &k.embed(q), &basis));
    }
    let sols = nullspace(&rows, basis.len());
    if sols.len() != 3 {
        return Err(Error::Construction(format!("rulings impose {} conditions", basis.len() - sols.len())));
    }
    let span = [quad_vector(&c.q1, &basis), quad_vector(&c.q2, &basis)];
    let g_vec = sols
        .into_iter()
        .find(|s| rank(&[span[0].clone(), span[1].clone(), s.clone()]) == 3)
        .ok_or_else(|| Error::Construction("no quadric through the rulings outside the pencil".into()))?;
    let mut g = Poly::zero();
    for (m, coef) in basis.iter().zip(&g_vec) {
        g = g.add(&Poly::monomial(*m, coef.clone()));
    }
    let g = g.primitive().0;
    let ring = c.ring();
    let lhs = ring.normal_form(&tangents[0].mul(&tangents[1]).mul(&tangents[2]).mul(&tangents[3]));
    let rhs = ring.normal_form(&g.pow(2));
    let (m, r) = rhs.terms().next().ok_or_else(|| Error::Construction("g vanishes on the covering".into()))?;
    let kappa = lhs.coefficient(m) / r;
    if kappa.is_zero() || lhs != rhs.scale(&kappa) {
        return Err(Error::Construction("tangent product is not a square times a constant".into()));
    }
    let (k_class, _) = squarefree_part(&kappa)?;
    let mut constants = [Rational::one(), Rational::one(), k_class.to_rational()];
    let l_inf = &tangents[3].clone();
    if c.is_trivial() {
        let o = [Rational::zero(), rat(1), rat(1), rat(1)];
        if tangents.iter().any(|l| l.eval(&o).is_zero()) {
            return Err(Error::Construction("tangent plane through the base point".into()));
        }
        for j in 0..3 {
            let value = &constants[j] * tangents[j].eval(&o) / l_inf.eval(&o);
            let (s, _) = squarefree_part(&value)?;
            constants[j] = squarefree_part(&(&constants[j] * s.to_rational()))?.0.to_rational();
        }
    }
    let prod: Rational = constants.iter().product::<Rational>() * &kappa;
    let t = sqrt_rat(&prod).ok_or_else(|| Error::Construction("constants do not make the product a square".into()))?;
    let num = [0, 1, 2].map(|j| tangents[j].mul(l_inf).scale(&constants[j]));
    let den = [0, 1, 2].map(|_| l_inf.pow(2));
    let tangents: [Poly; 4] = tangents.try_into().unwrap();
    let f = FTriple { num, den, g_num: g.scale(&t), g_den: l_inf.pow(2), tangents, constants, kappa };
    if !f.square_identity(c) {
        return Err(Error::Construction("square identity fails".into()));
    }
    if f.num.iter().any(|n| c.ring().is_zero(n)) {
        return Err(Error::Construction("some f_j vanishes on the covering".into()));
    }
    Ok(f)
}

impl FTriple {
    /// `f_1 f_2 f_3 = (g_num / g_den)^2` modulo the quadrics, checked exactly.
    pub fn square_identity(&self, c: &CoveringModel) -> bool {
        let lhs = self.num[0].mul(&self.num[1]).mul(&self.num[2]).mul(&self.g_den.pow(2));
        let rhs = self.g_num.pow(2).mul(&self.den[0]).mul(&self.den[1]).mul(&self.den[2]);
        c.ring().is_zero(&lhs.sub(&rhs))
    }

    /// Exact values at a rational point, `None` at zeros and poles.
    pub fn eval(&self, p: &[Rational; NVARS]) -> Option<[Rational; 3]> {
        let mut out: [Rational; 3] = Default::default();
        for j in 0..3 {
            let n = self.num[j].eval(p);
            let d = self.den[j].eval(p);
            if n.is_zero() || d.is_zero() {
                return None;
            }
            out[j] = n / d;
        }
        Some(out)
    }

    /// Square classes of `f` at a rational point, with `support` as a hint
    /// for the primes expected in the values.
    pub fn classes_at(&self, p: &[Rational; NVARS], support: &[u64]) -> Result<Option<AlgebraClass>> {
        let Some(v) = self.eval(p) else { return Ok(None) };
        let c = [
            square_class_hinted(&v[0], support)?,
            square_class_hinted(&v[1], support)?,
            square_class_hinted(&v[2], support)?,
        ];
        Ok(Some(AlgebraClass(c)))
    }

    /// Numerator and denominator values in a completion.
    pub fn eval_approx<T: Approx>(&self, p: &[T; NVARS]) -> [(T, T); 3] {
        [0, 1, 2].map(|j| (self.num[j].eval_approx(p), self.den[j].eval_approx(p)))
    }

    /// The triple `(c_j f_j)`; `c_1 c_2 c_3` must be a square.
    pub fn scaled(&self, c: &[Rational; 3]) -> Result<FTriple> {
        let prod: Rational = c.iter().product();
        let s = sqrt_rat(&prod).ok_or_else(|| Error::Invalid("scaling constants must multiply to a square".into()))?;
        let mut f = self.clone();
        for j in 0..3 {
            f.num[j] = f.num[j].scale(&c[j]);
            f.constants[j] = &f.constants[j] * &c[j];
        }
        f.g_num = f.g_num.scale(&s);
        Ok(f)
    }

    /// The triple `(f_j (h_j / k_j)^2)` for forms `h_j`, `k_j` of equal degree.
    pub fn times_squares(&self, h: &[(Poly, Poly); 3]) -> FTriple {
        let mut f = self.clone();
        for j in 0..3 {
            f.num[j] = f.num[j].mul(&h[j].0.pow(2));
            f.den[j] = f.den[j].mul(&h[j].1.pow(2));
            f.g_num = f.g_num.mul(&h[j].0);
            f.g_den = f.g_den.mul(&h[j].1);
        }
        f
    }

    /// Odd primes dividing a coefficient ratio that can make `f` a non-unit
    /// at a point with unit coordinates.
    pub fn constant_primes(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for c in self.constants.iter().chain(std::iter::once(&self.kappa)) {
            for n in [c.numer(), c.denom()] {
                out.extend(crate::arith::prime_divisors(n)?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Whether the exact identity and non-degeneracy hold.
    pub fn is_valid_on(&self, c: &CoveringModel) -> bool {
        self.square_identity(c) && self.num.iter().chain(self.den.iter()).all(|p| !c.ring().is_zero(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::model::{make_covering, trivial_point};
    use crate::descent::{descent_map, new_curve, point_search, selmer2, SelmerElement, SelmerStatus};

    #[test]
    fn square_identity_on_selmer_coverings() {
        for roots in [[-6, 0, 6], [0, 5, 12], [-1, 0, 1], [-3, 1, 8]] {
            let e = crate::descent::Curve2T::new(roots).unwrap();
            let s = selmer2(&e).unwrap();
            for a in s.elements() {
                let d = SelmerElement::new(a, SelmerStatus::Selmer).unwrap();
                let c = make_covering(&e, &d).unwrap();
                let f = construct_f(&c).unwrap();
                assert!(f.square_identity(&c), "{roots:?} {d}");
            }
        }
    }

    #[test]
    fn delta_equals_f_on_trivial_covering() {
        let e = new_curve(-6, 0, 6).unwrap();
        let one = SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage).unwrap();
        let c = make_covering(&e, &one).unwrap();
        let f = construct_f(&c).unwrap();
        let support = e.bad_primes();
        let mut checked = 0;
        for r in point_search(&e, 400).into_iter().chain([crate::descent::CurvePoint::Infinity]) {
            let z = trivial_point(&e, &r);
            if let Some(cls) = f.classes_at(&z, &support).unwrap() {
                assert_eq!(cls, descent_map(&e, &r).unwrap(), "{r}");
                checked += 1;
            }
        }
        assert!(checked >= 5);
    }
}
