//! Certified points of a covering over a completion of Q, and the values of
//! `f` at them.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ftriple::FTriple;
use super::model::CoveringModel;
use super::poly::NVARS;
use crate::arith::{rat, val_rat, Place, Rational, SquareClass};
use crate::descent::{descent_map, local_image_auto, local_x_witnesses, Curve2T, CurvePoint};
use crate::error::{Error, Result};
use crate::local::{
    has_local_square_norm, local_class, local_rep_padic, local_rep_real, local_triple_bits, AlgebraClass, PAdic,
    RealInterval,
};

/// x-coordinates tried per place when looking for points.
const WITNESSES: usize = 6;

/// Why a local point lies on the covering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointCertificate {
    /// A rational point, checked exactly against both quadrics.
    Rational,
    /// `z0 = 1` and `z_j` a square root of `(x - e_j) / delta_j`, each of
    /// which is a square in the completion; `branches[j]` picks the root.
    Lifted { x: Rational, branches: [bool; 3] },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Approximation {
    Exact,
    PAdic([PAdic; NVARS]),
    Real([RealInterval; NVARS]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalPoint {
    pub place: Place,
    /// Rational approximations of the projective coordinates.
    pub coordinates: [Rational; NVARS],
    /// Relative p-adic digits, or bits of real precision.
    pub precision: u32,
    pub certificate: PointCertificate,
    approx: Approximation,
}

impl LocalPoint {
    /// An exact rational point of the covering.
    pub fn rational(c: &CoveringModel, v: Place, p: [Rational; NVARS]) -> Result<LocalPoint> {
        if !c.contains(&p) {
            return Err(Error::Invalid("point is not on the covering".into()));
        }
        Ok(LocalPoint { place: v, coordinates: p, precision: u32::MAX, certificate: PointCertificate::Rational, approx: Approximation::Exact })
    }

    /// The lifted point over `x` with the given root choices, or `None` if
    /// some `(x - e_j) / delta_j` is not a square at `v`.
    pub fn lifted(c: &CoveringModel, v: Place, x: &Rational, branches: [bool; 3], precision: u32) -> Option<LocalPoint> {
        let q: Vec<Rational> = (0..3).map(|j| (x - rat(c.curve.root(j))) / &c.delta[j]).collect();
        if q.iter().any(|t| t.is_zero()) {
            return None;
        }
        let certificate = PointCertificate::Lifted { x: x.clone(), branches };
        match v {
            Place::Real => {
                let mut z: [RealInterval; NVARS] = std::array::from_fn(|_| RealInterval::exact(&Rational::one()));
                for j in 0..3 {
                    z[j + 1] = RealInterval::sqrt_of(&q[j], precision, branches[j])?;
                }
                let coordinates = std::array::from_fn(|i| (&z[i].lo + &z[i].hi) / rat(2));
                Some(LocalPoint { place: v, coordinates, precision, certificate, approx: Approximation::Real(z) })
            }
            Place::Finite(p) => {
                let mut z: [PAdic; NVARS] = std::array::from_fn(|_| PAdic::from_rational(&Rational::one(), p, precision as i64 + 64));
                for j in 0..3 {
                    let half = val_rat(&q[j], p).div_euclid(2);
                    z[j + 1] = PAdic::sqrt_of(&q[j], p, half + precision as i64, branches[j])?;
                }
                let coordinates = std::array::from_fn(|i| z[i].approximation());
                Some(LocalPoint { place: v, coordinates, precision, certificate, approx: Approximation::PAdic(z) })
            }
        }
    }

    /// Re-derives the certificate: the quadrics vanish exactly at rational
    /// points, and the square roots exist and match at lifted ones.
    pub fn check(&self, c: &CoveringModel) -> Result<bool> {
        match &self.certificate {
            PointCertificate::Rational => Ok(c.contains(&self.coordinates)),
            PointCertificate::Lifted { x, branches } => {
                let again = LocalPoint::lifted(c, self.place, x, *branches, self.precision);
                if again.as_ref() != Some(self) {
                    return Ok(false);
                }
                let q1 = eval_at(&c.q1, self);
                let q2 = eval_at(&c.q2, self);
                Ok(q1.zero_to_precision() && q2.zero_to_precision())
            }
        }
    }
}

enum Value {
    Exact(Rational),
    PAdic(PAdic),
    Real(RealInterval),
}

impl Value {
    fn zero_to_precision(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_zero(),
            Value::PAdic(a) => a.is_indistinguishable_from_zero() || a.relative_precision() <= 0,
            Value::Real(r) => r.sign().is_none(),
        }
    }

    /// The local square class, if the precision determines it.
    fn class(&self, v: Place) -> Result<Option<SquareClass>> {
        Ok(match self {
            Value::Exact(q) if q.is_zero() => None,
            Value::Exact(q) => Some(local_class(q, v)?),
            Value::PAdic(a) => a.square_class().map(|(parity, r)| local_rep_padic(a.prime(), parity, r)),
            Value::Real(r) => r.sign().map(|s| local_rep_real(s < 0)),
        })
    }
}

fn eval_at(poly: &super::poly::Poly, p: &LocalPoint) -> Value {
    match &p.approx {
        Approximation::Exact => Value::Exact(poly.eval(&p.coordinates)),
        Approximation::PAdic(z) => Value::PAdic(poly.eval_approx(z)),
        Approximation::Real(z) => Value::Real(poly.eval_approx(z)),
    }
}

/// Local square classes of `f_1(P), f_2(P), f_3(P)`.
pub fn evaluate_f(f: &FTriple, p: &LocalPoint) -> Result<AlgebraClass> {
    let mut out = Vec::with_capacity(3);
    for j in 0..3 {
        let n = eval_at(&f.num[j], p).class(p.place)?;
        let d = eval_at(&f.den[j], p).class(p.place)?;
        match (n, d) {
            (Some(n), Some(d)) => out.push(n.mul(&d)),
            _ => return Err(Error::Indeterminate { place: p.place, precision: p.precision }),
        }
    }
    Ok(AlgebraClass(out.try_into().unwrap()))
}

fn place_tag(v: Place) -> u64 {
    match v {
        Place::Real => 0,
        Place::Finite(p) => p,
    }
}

/// Up to `count` distinct certified points at `v` where every `f_j` has a
/// determined square class, in an order fixed by `seed`.
pub fn local_points(c: &CoveringModel, f: &FTriple, v: Place, precision: u32, count: usize, seed: u64) -> Result<Vec<LocalPoint>> {
    let e = &c.curve;
    if !local_image_auto(e, v)?.contains(&c.d.classes)? {
        return Err(Error::Unsolvable(v));
    }
    let mut candidates: Vec<Option<[Rational; NVARS]>> = Vec::new();
    let mut lifts: Vec<(Rational, [bool; 3])> = Vec::new();
    if c.is_trivial() {
        for (s2, s3) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            candidates.push(Some([Rational::zero(), rat(1), rat(s2), rat(s3)]));
        }
    }
    for x in local_x_witnesses(e, &c.d.classes, v, WITNESSES)? {
        for b in 0..8u8 {
            candidates.push(None);
            lifts.push((x.clone(), [b & 1 != 0, b & 2 != 0, b & 4 != 0]));
        }
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ place_tag(v).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    order.shuffle(&mut rng);
    let exact = candidates.iter().filter(|c| c.is_some()).count();
    let mut out: Vec<LocalPoint> = Vec::new();
    for i in order {
        if out.len() >= count {
            break;
        }
        let point = match &candidates[i] {
            Some(z) => LocalPoint::rational(c, v, z.clone())?,
            None => {
                let (x, b) = &lifts[i - exact];
                match LocalPoint::lifted(c, v, x, *b, precision) {
                    Some(p) => p,
                    None => continue,
                }
            }
        };
        match evaluate_f(f, &point) {
            Ok(_) => {
                if !out.iter().any(|q| q.coordinates == point.coordinates) {
                    out.push(point);
                }
            }
            Err(err) if err.is_indeterminate() => continue,
            Err(err) => return Err(err),
        }
    }
    if out.is_empty() {
        return Err(Error::Indeterminate { place: v, precision });
    }
    Ok(out)
}

/// A single certified point (see [`local_points`]).
pub fn local_point(c: &CoveringModel, f: &FTriple, v: Place, precision: u32, seed: u64) -> Result<LocalPoint> {
    Ok(local_points(c, f, v, precision, 1, seed)?.remove(0))
}

/// Default working precision at a place: `6 + v_p(2 disc d1 d2)` digits at
/// `p`, 96 bits at the real place.
pub fn default_precision(c: &CoveringModel, v: Place) -> u32 {
    match v {
        Place::Real => 96,
        Place::Finite(p) => {
            let spread = val_rat(&(rat(2) * Rational::from_integer(c.curve.discriminant().clone())), p)
                + val_rat(&c.d.d(0).to_rational(), p)
                + val_rat(&c.d.d(1).to_rational(), p);
            6 + spread.max(0) as u32
        }
    }
}

/// [`local_points`] at the default precision, doubling it on indeterminacy.
pub fn local_points_auto(c: &CoveringModel, f: &FTriple, v: Place, count: usize, seed: u64) -> Result<Vec<LocalPoint>> {
    let mut precision = default_precision(c, v);
    let mut last = None;
    for _ in 0..4 {
        match local_points(c, f, v, precision, count, seed) {
            Err(err) if err.is_indeterminate() => {
                last = Some(err);
                precision *= 2;
            }
            other => return other,
        }
    }
    Err(last.unwrap())
}

/// The point of `E` corresponding to a rational point of the trivial
/// covering, inverting [`super::model::trivial_point`].
pub fn trivial_preimage(e: &Curve2T, p: &[Rational; NVARS]) -> Option<CurvePoint> {
    let [e1, e2, e3] = e.roots().map(rat);
    if p[0].is_zero() {
        let s = [&p[1] / &p[1], &p[2] / &p[1], &p[3] / &p[1]];
        let one = Rational::one();
        return match (s[1] == one, s[2] == one) {
            (true, true) => Some(CurvePoint::Infinity),
            (false, false) => Some(e.torsion_point(0)),
            (false, true) => Some(e.torsion_point(1)),
            (true, false) => Some(e.torsion_point(2)),
        };
    }
    // (u1 - u2)/z0 = (e2 - e1)(x - e3)/y and (u1 - u3)/z0 = (e3 - e1)(x - e2)/y
    let a = (&p[1] - &p[2]) / (&e2 - &e1);
    let b = (&p[1] - &p[3]) / (&e3 - &e1);
    if a == b || a.is_zero() {
        return None;
    }
    let x = (&a * &e2 - &b * &e3) / (&a - &b);
    let y = (&x - &e3) * &p[0] / &a;
    let r = CurvePoint::affine(x, y);
    e.contains(&r).then_some(r)
}

/// The verdicts of [`verify_f_properties`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FReport {
    pub square_identity: bool,
    pub local_norms: Vec<(Place, bool)>,
    /// On the trivial covering: whether `f` matches the descent map at each
    /// rational sample.
    pub delta_f: Vec<bool>,
}

impl FReport {
    pub fn passed(&self) -> bool {
        self.square_identity && self.local_norms.iter().all(|x| x.1) && self.delta_f.iter().all(|&b| b)
    }
}

/// Checks the square identity exactly, the square-norm condition at every
/// sample, and on the trivial covering the agreement of `f` with the descent
/// map at rational samples.
pub fn verify_f_properties(c: &CoveringModel, f: &FTriple, samples: &[LocalPoint]) -> Result<FReport> {
    let mut local_norms = Vec::new();
    let mut delta_f = Vec::new();
    for p in samples {
        let value = evaluate_f(f, p)?;
        local_norms.push((p.place, has_local_square_norm(&value, p.place)?));
        if c.is_trivial() && p.certificate == PointCertificate::Rational {
            if let Some(r) = trivial_preimage(&c.curve, &p.coordinates) {
                let expected = descent_map(&c.curve, &r)?;
                delta_f.push(local_triple_bits(&value, p.place)? == local_triple_bits(&expected, p.place)?);
            }
        }
    }
    Ok(FReport { square_identity: f.is_valid_on(c), local_norms, delta_f })
}

/// Compares `f` at the trivial-covering point over each `R` with
/// `descent_map(R)`, exactly; points at zeros or poles of `f` give `None`.
pub fn delta_f_consistency(e: &Curve2T, f: &FTriple, points: &[CurvePoint]) -> Result<Vec<(CurvePoint, Option<bool>)>> {
    let support = e.bad_primes();
    let mut out = Vec::new();
    for r in points {
        let z = super::model::trivial_point(e, r);
        let verdict = match f.classes_at(&z, &support)? {
            None => None,
            Some(cls) => Some(cls == descent_map(e, r)?),
        };
        out.push((r.clone(), verdict));
    }
    Ok(out)
}
