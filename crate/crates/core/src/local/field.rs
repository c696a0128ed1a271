//! Approximate arithmetic in completions of Q with certified precision:
//! p-adic numbers known modulo a power of p, and real numbers enclosed in
//! exact rational intervals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rat_mod, sqrt_mod_prime, val_int, val_rat, Rational};

/// `m * p^exp + O(p^prec)`. When `m` is zero the value is only known to
/// lie in `p^prec Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    m: BigInt,
    exp: i64,
    prec: i64,
}

fn pow_p(p: u64, k: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), k.max(0) as usize)
}

impl PAdic {
    pub fn zero(p: u64, prec: i64) -> Self {
        PAdic { p, m: BigInt::zero(), exp: prec, prec }
    }

    fn normalized(p: u64, m: BigInt, exp: i64, prec: i64) -> Self {
        if exp >= prec {
            return PAdic::zero(p, prec);
        }
        let modulus = pow_p(p, prec - exp);
        let m = m.mod_floor(&modulus);
        if m.is_zero() {
            return PAdic::zero(p, prec);
        }
        let v = val_int(&m, p);
        let m = m / pow_p(p, v);
        PAdic { p, m, exp: exp + v, prec }
    }

    pub fn from_rational(q: &Rational, p: u64, prec: i64) -> Self {
        if q.is_zero() {
            return PAdic::zero(p, prec);
        }
        let v = val_rat(q, p);
        if v >= prec {
            return PAdic::zero(p, prec);
        }
        let unit = q / pow_rat(p, v);
        let m = rat_mod(&unit, &pow_p(p, prec - v)).expect("unit part is invertible");
        PAdic::normalized(p, m, v, prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The rational `m * p^exp` this value is known modulo `p^prec`.
    pub fn approximation(&self) -> Rational {
        if self.m.is_zero() {
            return Rational::zero();
        }
        Rational::from_integer(self.m.clone()) * pow_rat(self.p, self.exp)
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Known to be zero modulo `p^prec`.
    pub fn is_indistinguishable_from_zero(&self) -> bool {
        self.m.is_zero()
    }

    /// Exact valuation, if determined at this precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.m.is_zero() {
            None
        } else {
            Some(self.exp)
        }
    }

    fn val_lower(&self) -> i64 {
        if self.m.is_zero() {
            self.prec
        } else {
            self.exp
        }
    }

    /// Digits of certainty in the unit part (relative precision).
    pub fn relative_precision(&self) -> i64 {
        if self.m.is_zero() {
            0
        } else {
            self.prec - self.exp
        }
    }

    pub fn add(&self, other: &PAdic) -> PAdic {
        debug_assert_eq!(self.p, other.p);
        let prec = self.prec.min(other.prec);
        let ea = if self.m.is_zero() { prec } else { self.exp };
        let eb = if other.m.is_zero() { prec } else { other.exp };
        let e = ea.min(eb);
        let mut m = BigInt::zero();
        if !self.m.is_zero() {
            m += &self.m * pow_p(self.p, self.exp - e);
        }
        if !other.m.is_zero() {
            m += &other.m * pow_p(self.p, other.exp - e);
        }
        PAdic::normalized(self.p, m, e, prec)
    }

    pub fn neg(&self) -> PAdic {
        PAdic::normalized(self.p, -self.m.clone(), self.exp, self.prec)
    }

    pub fn sub(&self, other: &PAdic) -> PAdic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PAdic) -> PAdic {
        let va = self.val_lower();
        let vb = other.val_lower();
        let prec = (self.prec + vb).min(other.prec + va);
        if self.m.is_zero() || other.m.is_zero() {
            return PAdic::zero(self.p, prec);
        }
        PAdic::normalized(self.p, &self.m * &other.m, self.exp + other.exp, prec)
    }

    /// Multiplication by an exact rational.
    pub fn mul_exact(&self, q: &Rational) -> PAdic {
        if q.is_zero() {
            return PAdic::zero(self.p, i64::MAX / 4);
        }
        let v = val_rat(q, self.p);
        let exact = PAdic::from_rational(q, self.p, v + self.relative_precision().max(1) + 64);
        let prec = self.prec + v;
        if self.m.is_zero() {
            return PAdic::zero(self.p, prec);
        }
        PAdic::normalized(self.p, &self.m * &exact.m, self.exp + exact.exp, prec)
    }

    /// Square class in `Q_p^x/(Q_p^x)^2` as `(valuation parity, unit residue)`;
    /// `None` when the precision does not determine it.
    pub fn square_class(&self) -> Option<(i64, u64)> {
        let need = if self.p == 2 { 3 } else { 1 };
        if self.relative_precision() < need {
            return None;
        }
        let modulus = if self.p == 2 { 8 } else { self.p };
        let r = (&self.m % modulus).to_u64().unwrap();
        Some((self.exp.rem_euclid(2), r))
    }

    /// A square root of the exact rational `q` in `Q_p`, to absolute
    /// precision `prec`; `branch` selects the sign.
    pub fn sqrt_of(q: &Rational, p: u64, prec: i64, branch: bool) -> Option<PAdic> {
        if q.is_zero() {
            return Some(PAdic::zero(p, prec));
        }
        let v = val_rat(q, p);
        if v % 2 != 0 {
            return None;
        }
        let half = v / 2;
        let rel = (prec - half).max(1);
        let unit = q / pow_rat(p, v);
        let root = sqrt_unit(&unit, p, rel)?;
        let mut r = PAdic::normalized(p, root, half, half + rel);
        if branch {
            r = r.neg();
        }
        Some(r)
    }
}

fn pow_rat(p: u64, v: i64) -> Rational {
    if v >= 0 {
        Rational::from_integer(pow_p(p, v))
    } else {
        Rational::new(BigInt::one(), pow_p(p, -v))
    }
}

/// Root of a p-adic unit modulo p^k, canonical choice (residue at most
/// (p-1)/2 for odd p; congruent to 1 mod 4 for p = 2).
fn sqrt_unit(u: &Rational, p: u64, k: i64) -> Option<BigInt> {
    if p == 2 {
        let m = rat_mod(u, &pow_p(2, k + 3))?;
        if (&m % 8u32) != BigInt::one() {
            return None;
        }
        let mut r = BigInt::one();
        let mut j = 3;
        while j < k + 2 {
            let modulus = pow_p(2, j + 1);
            if !((&r * &r - &m).mod_floor(&modulus)).is_zero() {
                r += pow_p(2, j - 1);
            }
            j += 1;
        }
        let modulus = pow_p(2, k);
        let mut r = r.mod_floor(&modulus);
        if (&r % 4u32) != BigInt::one() {
            r = (-r).mod_floor(&modulus);
        }
        return Some(r);
    }
    let u0 = rat_mod(u, &BigInt::from(p))?.to_u64().unwrap();
    let mut r = BigInt::from(sqrt_mod_prime(u0, p)?);
    if r.is_zero() {
        return None;
    }
    if r > BigInt::from((p - 1) / 2) {
        r = BigInt::from(p) - r;
    }
    let mut known = 1i64;
    while known < k {
        known = (2 * known).min(k);
        let modulus = pow_p(p, known);
        let um = rat_mod(u, &modulus)?;
        let two_r = (&r * 2u32).mod_floor(&modulus);
        let inv = crate::arith::mod_inverse(&two_r, &modulus)?;
        r = (&r - (&r * &r - um) * inv).mod_floor(&modulus);
    }
    Some(r.mod_floor(&pow_p(p, k)))
}

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealInterval {
    pub fn exact(q: &Rational) -> Self {
        RealInterval { lo: q.clone(), hi: q.clone() }
    }

    pub fn add(&self, o: &RealInterval) -> Self {
        RealInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &RealInterval) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RealInterval { lo, hi }
    }

    pub fn mul_exact(&self, q: &Rational) -> Self {
        self.mul(&RealInterval::exact(q))
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Enclosure of `sqrt(q)` of width at most `2^-bits`; `negative`
    /// selects the negative root.
    pub fn sqrt_of(q: &Rational, bits: u32, negative: bool) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        let scale = BigInt::one() << (2 * bits as usize);
        let t = (q.numer() * &scale).div_floor(q.denom());
        let s = t.sqrt();
        let den = BigInt::one() << bits as usize;
        let lo = Rational::new(s.clone(), den.clone());
        let hi = Rational::new(s + 1u32, den);
        let iv = RealInterval { lo, hi };
        Some(if negative { iv.neg() } else { iv })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn padic_roundtrip_and_class() {
        let x = PAdic::from_rational(&ratio(18, 5), 3, 10);
        assert_eq!(x.valuation(), Some(2));
        // 18/5 = 9 * (2/5); 2/5 mod 3 = 2*2 = 1
        assert_eq!(x.square_class(), Some((0, 1)));
        let y = PAdic::from_rational(&rat(-1), 2, 10);
        assert_eq!(y.square_class(), Some((0, 7)));
    }

    #[test]
    fn padic_sqrt_squares_back() {
        for (q, p) in [(rat(2), 7u64), (ratio(11, 4), 7), (rat(17), 2), (ratio(-7 * 9, 25), 2), (rat(50), 7)] {
            let r = PAdic::sqrt_of(&q, p, 20, false).unwrap();
            let sq = r.mul(&r);
            let qq = PAdic::from_rational(&q, p, 20);
            let diff = sq.sub(&qq);
            assert!(diff.is_indistinguishable_from_zero() || diff.valuation().unwrap() >= 18, "{q} {p}");
        }
        assert!(PAdic::sqrt_of(&rat(3), 7, 10, false).is_none());
        assert!(PAdic::sqrt_of(&rat(3), 2, 10, false).is_none());
        assert!(PAdic::sqrt_of(&rat(7), 7, 10, false).is_none());
    }

    #[test]
    fn precision_tracking() {
        let a = PAdic::from_rational(&rat(5), 5, 4); // 5 + O(5^4)
        let b = PAdic::from_rational(&rat(25), 5, 3); // 25 + O(5^3)
        let c = a.mul(&b);
        assert_eq!(c.precision(), 4); // min(4 + 2, 3 + 1)
        assert_eq!(c.valuation(), Some(3));
        let z = a.sub(&a);
        assert!(z.is_indistinguishable_from_zero());
    }

    #[test]
    fn interval_sqrt() {
        let iv = RealInterval::sqrt_of(&rat(2), 30, false).unwrap();
        assert!(&iv.lo * &iv.lo <= rat(2) && &iv.hi * &iv.hi >= rat(2));
        assert_eq!(iv.sign(), Some(1));
        let m = iv.mul(&iv.neg());
        assert_eq!(m.sign(), Some(-1));
    }
}
