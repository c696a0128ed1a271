use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{prime_divisors, rat, Rational};
use crate::error::{Error, Result};

/// `y^2 = (x - e1)(x - e2)(x - e3)` with distinct integer roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Curve2T {
    roots: [i64; 3],
    discriminant: BigInt,
}

/// A point of `E(Q)`, or of the curve over a field containing Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl CurvePoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

/// Builds the curve with the given roots.
pub fn new_curve(e1: i64, e2: i64, e3: i64) -> Result<Curve2T> {
    Curve2T::new([e1, e2, e3])
}

impl Curve2T {
    pub fn new(roots: [i64; 3]) -> Result<Self> {
        let [e1, e2, e3] = roots;
        if e1 == e2 || e1 == e3 || e2 == e3 {
            return Err(Error::SingularCurve);
        }
        let d = |a: i64, b: i64| BigInt::from(a) - BigInt::from(b);
        let prod = d(e1, e2) * d(e1, e3) * d(e2, e3);
        let discriminant = BigInt::from(16) * &prod * &prod;
        Ok(Curve2T { roots, discriminant })
    }

    /// The curve `y^2 = x(x - a)(x + b)`, with its roots in increasing order.
    pub fn from_ab(a: i64, b: i64) -> Result<Self> {
        let mut roots = [0, a, -b];
        roots.sort_unstable();
        Curve2T::new(roots)
    }

    pub fn roots(&self) -> [i64; 3] {
        self.roots
    }

    pub fn root(&self, j: usize) -> i64 {
        self.roots[j]
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// `(a2, a4, a6)` with `F(x) = x^3 + a2 x^2 + a4 x + a6`.
    pub fn coefficients(&self) -> [BigInt; 3] {
        let [e1, e2, e3] = self.roots.map(BigInt::from);
        let a2 = -(&e1 + &e2 + &e3);
        let a4 = &e1 * &e2 + &e1 * &e3 + &e2 * &e3;
        let a6 = -(&e1 * &e2 * &e3);
        [a2, a4, a6]
    }

    pub fn eval_f(&self, x: &Rational) -> Rational {
        self.roots.iter().map(|&e| x - rat(e)).product()
    }

    /// `F'(e_j) = prod_{k != j} (e_j - e_k)`.
    pub fn derivative_at_root(&self, j: usize) -> i64 {
        (0..3).filter(|&k| k != j).map(|k| self.roots[j] - self.roots[k]).product()
    }

    pub fn torsion_point(&self, j: usize) -> CurvePoint {
        CurvePoint::affine(rat(self.roots[j]), Rational::zero())
    }

    pub fn torsion_points(&self) -> [CurvePoint; 3] {
        [0, 1, 2].map(|j| self.torsion_point(j))
    }

    /// The primes dividing `2 * discriminant`, increasing.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut primes = vec![2u64];
        for (i, k) in [(0, 1), (0, 2), (1, 2)] {
            let diff = BigInt::from(self.roots[i] - self.roots[k]);
            primes.extend(prime_divisors(&diff).expect("root differences are small"));
        }
        primes.sort_unstable();
        primes.dedup();
        primes
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y * y == self.eval_f(x),
        }
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), -y),
        }
    }

    /// Chord-tangent addition with exact rationals.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let [a2, a4, _] = self.coefficients().map(Rational::from_integer);
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return CurvePoint::Infinity;
            }
            (rat(3) * x1 * x1 + rat(2) * &a2 * x1 + &a4) / (rat(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - &a2 - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        CurvePoint::affine(x3, y3)
    }

    pub fn double(&self, p: &CurvePoint) -> CurvePoint {
        self.add(p, p)
    }

    pub fn mul(&self, p: &CurvePoint, n: i64) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_torsion_2(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { y, .. } => y.is_zero(),
        }
    }

    /// Whether `p` has finite order: torsion points of this integral model
    /// have integral coordinates and order at most 12.
    pub fn is_torsion(&self, p: &CurvePoint) -> bool {
        let mut q = p.clone();
        for _ in 0..12 {
            match &q {
                CurvePoint::Infinity => return true,
                CurvePoint::Affine { x, y } if !x.is_integer() || !y.is_integer() => return false,
                _ => {}
            }
            q = self.add(&q, p);
        }
        false
    }

    /// The roots in increasing order.
    pub fn sorted_roots(&self) -> [i64; 3] {
        let mut r = self.roots;
        r.sort_unstable();
        r
    }

    pub fn is_translate_of(&self, other: &Curve2T) -> bool {
        let a = self.sorted_roots();
        let b = other.sorted_roots();
        a[1] - a[0] == b[1] - b[0] && a[2] - a[0] == b[2] - b[0]
    }
}

impl fmt::Display for Curve2T {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a2, a4, a6] = self.coefficients();
        write!(f, "y^2 = x^3")?;
        for (c, mono) in [(a2, "x^2"), (a4, "x"), (a6, "")] {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            let mag = c.abs();
            if mag.is_one() && !mono.is_empty() {
                write!(f, " {sign} {mono}")?;
            } else {
                write!(f, " {sign} {mag}{mono}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn curve_examples() {
        let e = new_curve(-1, 0, 1).unwrap();
        assert_eq!(e.discriminant(), &BigInt::from(64));
        assert_eq!(e.to_string(), "y^2 = x^3 - x");
        let e = new_curve(-6, 0, 6).unwrap();
        assert_eq!(e.to_string(), "y^2 = x^3 - 36x");
        assert_eq!(new_curve(0, 0, 1), Err(Error::SingularCurve));
        assert_eq!(Curve2T::from_ab(6, 6).unwrap().sorted_roots(), [-6, 0, 6]);
    }

    #[test]
    fn group_law() {
        let e = new_curve(-6, 0, 6).unwrap();
        let p = CurvePoint::affine(rat(-3), rat(9));
        assert!(e.contains(&p));
        let p2 = e.double(&p);
        assert!(e.contains(&p2));
        assert_eq!(p2.x().unwrap(), &ratio(25, 4));
        let p3 = e.add(&p2, &p);
        assert_eq!(e.add(&p3, &e.neg(&p)), p2);
        for t in e.torsion_points() {
            assert_eq!(e.double(&t), CurvePoint::Infinity);
        }
        let t = e.torsion_points();
        assert_eq!(e.add(&t[0], &t[1]), t[2]);
        assert_eq!(e.mul(&p, 3), p3);
        assert!(!e.is_torsion(&p));
        assert!(e.torsion_points().iter().all(|t| e.is_torsion(t)));
        // (0, 5, 12) has a point of order 4 over T = (0, 0)
        let e = new_curve(-2, 0, 1).unwrap();
        assert!(e.torsion_points().iter().all(|t| e.is_torsion(t)));
    }

    #[test]
    fn bad_primes_of_curves() {
        assert_eq!(new_curve(-1, 0, 1).unwrap().bad_primes(), vec![2]);
        assert_eq!(new_curve(-6, 0, 6).unwrap().bad_primes(), vec![2, 3]);
        assert_eq!(new_curve(0, 5, 12).unwrap().bad_primes(), vec![2, 3, 5, 7]);
    }
}
