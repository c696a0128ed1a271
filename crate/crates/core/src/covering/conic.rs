//! Rational points on diagonal conics `a X^2 + b Y^2 + c Z^2 = 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize, int_rat, mod_inverse, sqrt_mod_prime, squarefree_int, Rational};
use crate::error::{Error, Result};

/// Height bound of the direct search tried before descent.
const SEARCH_HEIGHT: i64 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conic {
    pub coeffs: [Rational; 3],
}

impl Conic {
    pub fn new(coeffs: [Rational; 3]) -> Result<Self> {
        if coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::ZeroInput);
        }
        Ok(Conic { coeffs })
    }

    pub fn eval(&self, p: &[BigInt; 3]) -> Rational {
        (0..3).map(|i| &self.coeffs[i] * int_rat(&p[i] * &p[i])).sum()
    }

    pub fn polar(&self, p: &[BigInt; 3], q: &[BigInt; 3]) -> Rational {
        (0..3).map(|i| &self.coeffs[i] * int_rat(&p[i] * &q[i])).sum()
    }

    /// A rational point: the lexicographically smallest primitive one of
    /// small height if any, otherwise one found by Legendre descent.
    pub fn point(&self) -> Result<[BigInt; 3]> {
        if let Some(p) = self.search(SEARCH_HEIGHT) {
            return Ok(p);
        }
        let p = self.descend()?;
        debug_assert!(self.eval(&p).is_zero());
        Ok(p)
    }

    /// Primitive solutions with `max |coordinate| <= h`, smallest height
    /// first and lexicographic within a height.
    pub fn search(&self, h: i64) -> Option<[BigInt; 3]> {
        for height in 1..=h {
            for x in -height..=height {
                for y in -height..=height {
                    for z in -height..=height {
                        if x.abs().max(y.abs()).max(z.abs()) != height {
                            continue;
                        }
                        if x.gcd(&y).gcd(&z) != 1 || first_nonzero_negative([x, y, z]) {
                            continue;
                        }
                        let p = [BigInt::from(x), BigInt::from(y), BigInt::from(z)];
                        if self.eval(&p).is_zero() {
                            return Some(p);
                        }
                    }
                }
            }
        }
        None
    }

    /// The `k`-th point of the rational parametrization through `p0`:
    /// the second intersection with the line through `p0` in a direction
    /// enumerated by `k`. `k = 0` is `p0` itself.
    pub fn point_from(&self, p0: &[BigInt; 3], k: usize) -> Option<[BigInt; 3]> {
        if k == 0 {
            return Some(p0.clone());
        }
        let dir = small_direction(k);
        let qd = self.eval(&dir);
        let b = self.polar(p0, &dir);
        if qd.is_zero() {
            return None;
        }
        let coords: Vec<Rational> =
            (0..3).map(|i| &qd * int_rat(p0[i].clone()) - Rational::from_integer(BigInt::from(2)) * &b * int_rat(dir[i].clone())).collect();
        let p = primitive_integral(&coords)?;
        debug_assert!(self.eval(&p).is_zero());
        Some(p)
    }

    fn descend(&self) -> Result<[BigInt; 3]> {
        // clear denominators and square factors: c_i = s_i * t_i^2
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let mut sq = Vec::new();
        let mut scale = Vec::new();
        for c in &self.coeffs {
            let n = c.numer() * (&den / c.denom());
            let (s, t) = squarefree_int(&n)?;
            sq.push(s);
            scale.push(t);
        }
        let mut a = [sq[0].clone(), sq[1].clone(), sq[2].clone()];
        // extra[i] multiplies the i-th coordinate of the reduced problem
        let mut extra = [Rational::one(), Rational::one(), Rational::one()];
        loop {
            let mut changed = false;
            for (i, k) in [(0usize, 1usize), (0, 2), (1, 2)] {
                let g = a[i].gcd(&a[k]);
                if !g.is_one() {
                    let l = 3 - i - k;
                    a[i] /= &g;
                    a[k] /= &g;
                    a[l] *= &g;
                    let (s, t) = squarefree_int(&a[l])?;
                    a[l] = s;
                    extra[l] = &extra[l] * int_rat(g) / int_rat(t);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // a0 X^2 + a1 Y^2 + a2 Z^2 = 0  <=>  (a0 X)^2 = (-a0 a1) Y^2 + (-a0 a2) Z^2
        let p = legendre(&(-&a[0] * &a[1]), &(-&a[0] * &a[2]))?
            .ok_or_else(|| Error::Construction("conic has no rational point".into()))?;
        let reduced = [int_rat(p[0].clone()) / int_rat(a[0].clone()), int_rat(p[1].clone()), int_rat(p[2].clone())];
        let orig: Vec<Rational> = (0..3).map(|i| &reduced[i] * &extra[i] / int_rat(scale[i].clone())).collect();
        let out = primitive_integral(&orig).ok_or_else(|| Error::Construction("degenerate conic point".into()))?;
        if !self.eval(&out).is_zero() {
            return Err(Error::Construction("conic descent produced a non-point".into()));
        }
        Ok(out)
    }
}

fn first_nonzero_negative(v: [i64; 3]) -> bool {
    v.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0)
}

fn small_direction(k: usize) -> [BigInt; 3] {
    // enumerate (1, s, t) then (0, 1, t) with small s, t
    let k = k as i64;
    let side = 7i64;
    let idx = k - 1;
    if idx < side * side {
        let s = idx / side - side / 2;
        let t = idx % side - side / 2;
        [BigInt::one(), BigInt::from(s), BigInt::from(t)]
    } else {
        let t = idx - side * side - side;
        [BigInt::zero(), BigInt::one(), BigInt::from(t)]
    }
}

/// Scales a rational vector to coprime integers with first nonzero entry positive.
pub fn primitive_integral(v: &[Rational]) -> Option<[BigInt; 3]> {
    if v.iter().all(|c| c.is_zero()) {
        return None;
    }
    let mut den = BigInt::one();
    for c in v {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let mut g = BigInt::zero();
    for n in &ints {
        g = g.gcd(n);
    }
    let mut out: Vec<BigInt> = ints.into_iter().map(|n| n / &g).collect();
    if out.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
        for c in out.iter_mut() {
            *c = -c.clone();
        }
    }
    Some([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// A primitive integer solution of `x^2 = a y^2 + b z^2` for nonzero `a`,
/// `b`, or `None` if none exists.
pub fn legendre(a: &BigInt, b: &BigInt) -> Result<Option<[BigInt; 3]>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (a, sa) = squarefree_int(a)?;
    let (b, sb) = squarefree_int(b)?;
    // x^2 = a (sa y)^2 + b (sb z)^2
    let sol = match legendre_squarefree(&a, &b)? {
        None => return Ok(None),
        Some(s) => s,
    };
    let v = [int_rat(sol[0].clone()), int_rat(sol[1].clone()) / int_rat(sa), int_rat(sol[2].clone()) / int_rat(sb)];
    Ok(primitive_integral(&v))
}

fn legendre_squarefree(a: &BigInt, b: &BigInt) -> Result<Option<[BigInt; 3]>> {
    if a.is_one() {
        return Ok(Some([BigInt::one(), BigInt::one(), BigInt::zero()]));
    }
    if b.is_one() {
        return Ok(Some([BigInt::one(), BigInt::zero(), BigInt::one()]));
    }
    if &(-a) == b {
        return Ok(Some([BigInt::zero(), BigInt::one(), BigInt::one()]));
    }
    if a.is_negative() && b.is_negative() {
        return Ok(None);
    }
    if a.abs() > b.abs() {
        return Ok(legendre_squarefree(b, a)?.map(|[x, y, z]| [x, z, y]));
    }
    // t^2 = a mod |b|
    let t = match sqrt_mod_squarefree(a, &b.abs())? {
        None => return Ok(None),
        Some(t) => t,
    };
    let k = (&t * &t - a) / b;
    if k.is_zero() {
        return Ok(Some([t, BigInt::one(), BigInt::zero()]));
    }
    let (kf, m) = squarefree_int(&k)?;
    let sub = match legendre_squarefree(a, &kf)? {
        None => return Ok(None),
        Some(s) => s,
    };
    let [x1, y1, z1] = sub;
    let x = &t * &x1 + a * &y1;
    let y = &x1 + &t * &y1;
    let z = &kf * &m * &z1;
    debug_assert_eq!(&x * &x, a * &y * &y + b * &z * &z);
    Ok(Some([x, y, z]))
}

/// A root of `t^2 = a` modulo the squarefree `n`, reduced to `|t| <= n/2`.
fn sqrt_mod_squarefree(a: &BigInt, n: &BigInt) -> Result<Option<BigInt>> {
    if n.is_one() {
        return Ok(Some(BigInt::zero()));
    }
    let fac = factorize(n)?;
    let mut t = BigInt::zero();
    let mut modulus = BigInt::one();
    for p in fac.primes() {
        let pu = p.to_u64().ok_or_else(|| Error::Construction("prime too large for conic descent".into()))?;
        let r = a.mod_floor(p).to_u64().unwrap();
        let root = if pu == 2 {
            r % 2
        } else if r == 0 {
            0
        } else {
            match sqrt_mod_prime(r, pu) {
                Some(s) => s,
                None => return Ok(None),
            }
        };
        // CRT: t = t (mod modulus), t = root (mod p)
        let inv = mod_inverse(&(&modulus % p), p).unwrap_or_else(BigInt::zero);
        let lift = ((BigInt::from(root) - &t).mod_floor(p) * inv).mod_floor(p);
        t += &modulus * lift;
        modulus *= p;
    }
    let mut t = t.mod_floor(n);
    if &t * 2u32 > *n {
        t -= n;
    }
    debug_assert!(((&t * &t - a).mod_floor(n)).is_zero());
    Ok(Some(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use crate::local::{hilbert_symbol, symbol_places};

    #[test]
    fn legendre_examples() {
        for (a, b) in [(2i64, 7i64), (-1, 5), (3, -11), (13, 17), (-7, 2), (5, 41), (-2, 3)] {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let s = legendre(&a, &b).unwrap().unwrap();
            assert_eq!(&s[0] * &s[0], &a * &s[1] * &s[1] + &b * &s[2] * &s[2]);
            assert!(!s.iter().all(|c| c.is_zero()));
        }
        assert_eq!(legendre(&BigInt::from(-1), &BigInt::from(-1)).unwrap(), None);
        assert_eq!(legendre(&BigInt::from(3), &BigInt::from(5)).unwrap(), None);
    }

    #[test]
    fn descent_agrees_with_hilbert_symbols() {
        for a in -30i64..=30 {
            for b in -30i64..=30 {
                if a == 0 || b == 0 {
                    continue;
                }
                let (qa, qb) = (rat(a), rat(b));
                let everywhere = symbol_places(&qa, &qb)
                    .unwrap()
                    .into_iter()
                    .all(|v| hilbert_symbol(&qa, &qb, v).unwrap().is_plus());
                let sol = legendre(&BigInt::from(a), &BigInt::from(b)).unwrap();
                assert_eq!(sol.is_some(), everywhere, "{a} {b}");
                if let Some(s) = sol {
                    assert_eq!(&s[0] * &s[0], BigInt::from(a) * &s[1] * &s[1] + BigInt::from(b) * &s[2] * &s[2]);
                }
            }
        }
    }

    #[test]
    fn conic_points() {
        let c = Conic::new([rat(1), rat(1), rat(-2)]).unwrap();
        let p = c.point().unwrap();
        assert_eq!(p, [BigInt::from(1), BigInt::from(-1), BigInt::from(-1)]);
        for k in 0..10 {
            if let Some(q) = c.point_from(&p, k) {
                assert!(c.eval(&q).is_zero());
            }
        }
        // beyond the search height
        let c = Conic::new([rat(1), ratio(-1, 4), rat(-1009 * 1013)]).unwrap();
        let p = c.descend().unwrap();
        assert!(c.eval(&p).is_zero());
        let c = Conic::new([rat(3), rat(5), rat(-47)]).unwrap();
        assert!(c.eval(&c.descend().unwrap()).is_zero());
        assert!(Conic::new([rat(1), rat(1), rat(1)]).unwrap().point().is_err());
    }
}
