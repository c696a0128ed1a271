//! Exact rational and square-class arithmetic.
//!
//! Square classes of `Q^x` are canonicalized as squarefree integers carrying
//! the sign; two classes are equal exactly when their representatives are.

pub mod f2;
pub mod prime;
pub mod qlinear;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
pub use prime::{factorize, is_prime, is_prime_u64, prime_divisors, Factorization, Factorizer, RHO_STEPS};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_rat(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// A place of Q: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    /// A finite place, checked for primality.
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime_u64(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p.to_string()))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(*p),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// An element of `Q^x/(Q^x)^2`, stored as its squarefree representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn one() -> Self {
        SquareClass(BigInt::one())
    }

    /// Wraps a representative, checking it is a nonzero squarefree integer.
    pub fn new(rep: BigInt) -> Result<Self> {
        if rep.is_zero() {
            return Err(Error::ZeroInput);
        }
        let f = factorize(&rep)?;
        if f.factors.iter().any(|(_, e)| *e > 1) {
            return Err(Error::NotSquarefree(rep.to_string()));
        }
        Ok(SquareClass(rep))
    }

    pub fn from_i64(rep: i64) -> Result<Self> {
        SquareClass::new(BigInt::from(rep))
    }

    /// Trusted constructor for values already known to be squarefree.
    pub(crate) fn from_squarefree(rep: BigInt) -> Self {
        debug_assert!(!rep.is_zero());
        SquareClass(rep)
    }

    pub fn rep(&self) -> &BigInt {
        &self.0
    }

    pub fn to_rational(&self) -> Rational {
        int_rat(self.0.clone())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Product of classes; `ab/gcd(a,b)^2` is squarefree when a, b are.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let g = self.0.gcd(&other.0);
        SquareClass((&self.0 * &other.0) / (&g * &g))
    }

    /// Primes dividing the representative (the sign is not included).
    pub fn support(&self) -> Vec<u64> {
        prime_divisors(&self.0).expect("squarefree reps factor within the bound")
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Writes `q = s * r^2` with `s` squarefree.
pub fn squarefree_part(q: &Rational) -> Result<(SquareClass, Rational)> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    // q = n/d = (n d) / d^2
    let (sn, rn) = squarefree_int(q.numer())?;
    let (sd, rd) = squarefree_int(q.denom())?;
    let g = sn.gcd(&sd);
    let s = (&sn * &sd) / (&g * &g);
    // n = sn rn^2, d = sd rd^2, so q = sn sd (rn / (rd sd))^2 = s (g rn / (rd sd))^2
    let r = Rational::new(&g * &rn, &rd * &sd);
    let s = SquareClass(s);
    Ok((s, r.abs()))
}

/// Squarefree decomposition of a nonzero integer: `n = s * r^2`.
pub fn squarefree_int(n: &BigInt) -> Result<(BigInt, BigInt)> {
    let f = factorize(n)?;
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    for (p, e) in &f.factors {
        if e % 2 == 1 {
            s *= p;
        }
        r *= num_traits::pow(p.clone(), (*e / 2) as usize);
    }
    if f.negative {
        s = -s;
    }
    Ok((s, r))
}

/// Square class of a rational whose odd-multiplicity primes are known to lie
/// in `support`. Avoids factoring large cofactors: the remaining part must
/// be a perfect square, otherwise `None` is returned.
pub fn square_class_with_support(q: &Rational, support: &[u64]) -> Option<SquareClass> {
    if q.is_zero() {
        return None;
    }
    let mut s = if q.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut n = q.numer().abs();
    let mut d = q.denom().clone();
    for &p in support {
        let pb = BigInt::from(p);
        let mut parity = 0u32;
        for m in [&mut n, &mut d] {
            loop {
                let (quo, rem) = m.div_rem(&pb);
                if !rem.is_zero() {
                    break;
                }
                *m = quo;
                parity ^= 1;
            }
        }
        if parity == 1 {
            s *= &pb;
        }
    }
    if is_square_int(&n) && is_square_int(&d) {
        Some(SquareClass(s))
    } else {
        None
    }
}

/// Square class of a nonzero rational, trying `support` first.
pub fn square_class_hinted(q: &Rational, support: &[u64]) -> Result<SquareClass> {
    match square_class_with_support(q, support) {
        Some(c) => Ok(c),
        None => Ok(squarefree_part(q)?.0),
    }
}

pub fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Whether a rational is the square of a rational.
pub fn is_square_rat(q: &Rational) -> bool {
    !q.is_negative() && is_square_int(q.numer()) && is_square_int(q.denom())
}

pub fn sqrt_rat(q: &Rational) -> Option<Rational> {
    if !is_square_rat(q) {
        return None;
    }
    Some(Rational::new(q.numer().sqrt(), q.denom().sqrt()))
}

/// Whether two nonzero rationals lie in the same class mod `(Q^x)^2`.
pub fn same_square_class(a: &Rational, b: &Rational) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    is_square_rat(&(a * b))
}

fn check_prime(p: &BigInt) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Exponent of `p` in a nonzero integer (`p` assumed prime).
pub fn val_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)` for a prime `p` (fast path, no primality check).
pub fn val_rat(q: &Rational, p: u64) -> i64 {
    val_int(q.numer(), p) - val_int(q.denom(), p)
}

/// `v_p(q)`: the exponent of `p` in `q`.
pub fn valuation(q: &Rational, p: &BigInt) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_prime(p)?;
    let pv = p
        .to_u64()
        .ok_or_else(|| Error::Invalid("prime exceeds 64 bits".into()))?;
    Ok(val_rat(q, pv))
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre_symbol(a: &BigInt, p: &BigInt) -> Result<i8> {
    if p.is_even() || !is_prime(p) {
        return Err(Error::NotOddPrime(p.to_string()));
    }
    let r = a.mod_floor(p);
    if r.is_zero() {
        return Ok(0);
    }
    if let (Some(r), Some(pv)) = (r.to_u64(), p.to_u64()) {
        return Ok(jacobi_u64(r, pv));
    }
    let e: BigInt = (p - 1u32) >> 1;
    Ok(if r.modpow(&e, p).is_one() { 1 } else { -1 })
}

/// Jacobi symbol (a/n) for odd n.
pub fn jacobi_u64(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Residue of a rational with unit denominator modulo `m`.
pub fn rat_mod(q: &Rational, m: &BigInt) -> Option<BigInt> {
    let den = q.denom().mod_floor(m);
    let inv = mod_inverse(&den, m)?;
    Some((q.numer() * inv).mod_floor(m))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() && e.gcd != -BigInt::one() {
        return None;
    }
    Some((e.x * e.gcd).mod_floor(m))
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| jacobi_u64(a, p) == -1).expect("odd prime has a non-residue")
}

/// Square root of `a` modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if jacobi_u64(a, p) != 1 {
        return None;
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = least_nonresidue(p);
    let mut m = s;
    let mut c = pow(z, q);
    let mut t = pow(a, q);
    let mut r = pow(a, (q + 1) / 2);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt);
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1));
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r)
}
