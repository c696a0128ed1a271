//! Quadratic Hilbert symbols at the places of Q, the symbol on the split
//! algebra `Q_v x Q_v x Q_v`, local square classes, and a brute-force
//! solvability oracle used to cross-check the closed-form symbol.

pub mod field;
mod oracle;

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    is_prime_u64, jacobi_u64, least_nonresidue, prime_divisors, rat_mod, val_rat, Place, Rational,
    SquareClass,
};
use crate::error::{Error, Result};

pub use field::{PAdic, RealInterval};
pub use oracle::{solvability_oracle, solvability_oracle_auto};

/// An element of `mu_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolValue {
    Plus,
    Minus,
}

impl SymbolValue {
    pub fn from_sign(s: i8) -> Self {
        if s < 0 {
            SymbolValue::Minus
        } else {
            SymbolValue::Plus
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            SymbolValue::Plus => 1,
            SymbolValue::Minus => -1,
        }
    }

    /// Additive F2 notation: 0 for +1, 1 for -1.
    pub fn bit(self) -> u8 {
        (self == SymbolValue::Minus) as u8
    }

    pub fn is_plus(self) -> bool {
        self == SymbolValue::Plus
    }
}

impl Mul for SymbolValue {
    type Output = SymbolValue;
    fn mul(self, rhs: SymbolValue) -> SymbolValue {
        if self == rhs {
            SymbolValue::Plus
        } else {
            SymbolValue::Minus
        }
    }
}

impl std::iter::Product for SymbolValue {
    fn product<I: Iterator<Item = SymbolValue>>(iter: I) -> SymbolValue {
        iter.fold(SymbolValue::Plus, |a, b| a * b)
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

/// A class in `A^x/(A^x)^2` for the split algebra `A = Q x Q x Q`, one
/// component per 2-torsion point `T_1, T_2, T_3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraClass(pub [SquareClass; 3]);

impl AlgebraClass {
    pub fn one() -> Self {
        AlgebraClass([SquareClass::one(), SquareClass::one(), SquareClass::one()])
    }

    pub fn from_i64(c: [i64; 3]) -> Result<Self> {
        Ok(AlgebraClass([
            SquareClass::from_i64(c[0])?,
            SquareClass::from_i64(c[1])?,
            SquareClass::from_i64(c[2])?,
        ]))
    }

    pub fn component(&self, j: usize) -> &SquareClass {
        &self.0[j]
    }

    pub fn mul(&self, o: &AlgebraClass) -> AlgebraClass {
        AlgebraClass([self.0[0].mul(&o.0[0]), self.0[1].mul(&o.0[1]), self.0[2].mul(&o.0[2])])
    }

    /// Whether `d_1 d_2 d_3` is a square in Q.
    pub fn has_square_norm(&self) -> bool {
        self.0[0].mul(&self.0[1]).mul(&self.0[2]).is_one()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(SquareClass::is_one)
    }

    pub fn reps_i64(&self) -> [i64; 3] {
        [0, 1, 2].map(|j| self.0[j].rep().to_i64().expect("class fits in i64"))
    }
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

fn check_place(v: Place) -> Result<()> {
    match v {
        Place::Finite(p) if !is_prime_u64(p) => Err(Error::NotPrime(p.to_string())),
        _ => Ok(()),
    }
}

/// Unit part of `q` at `p` reduced mod `m` (denominator coprime to p).
fn unit_residue(q: &Rational, p: u64, v: i64, m: u64) -> u64 {
    let pb = BigInt::from(p);
    let scale = num_traits::pow(pb, v.unsigned_abs() as usize);
    let unit = if v >= 0 {
        q / Rational::from_integer(scale)
    } else {
        q * Rational::from_integer(scale)
    };
    rat_mod(&unit, &BigInt::from(m)).unwrap().to_u64().unwrap()
}

/// The quadratic Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: Place) -> Result<SymbolValue> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_place(v)?;
    let s = match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let alpha = val_rat(a, 2);
            let beta = val_rat(b, 2);
            let u = unit_residue(a, 2, alpha, 8);
            let w = unit_residue(b, 2, beta, 8);
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u) * eps(w)
                + (alpha.rem_euclid(2) as u64) * omega(w)
                + (beta.rem_euclid(2) as u64) * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let alpha = val_rat(a, p);
            let beta = val_rat(b, p);
            let u = unit_residue(a, p, alpha, p);
            let w = unit_residue(b, p, beta, p);
            let mut s = 1i8;
            if (alpha * beta).rem_euclid(2) == 1 && p % 4 == 3 {
                s = -s;
            }
            if beta.rem_euclid(2) == 1 {
                s *= jacobi_u64(u, p);
            }
            if alpha.rem_euclid(2) == 1 {
                s *= jacobi_u64(w, p);
            }
            s
        }
    };
    Ok(SymbolValue::from_sign(s))
}

/// `(gamma, delta)_{A_v}`: product of the componentwise Hilbert symbols.
pub fn algebra_symbol(gamma: &AlgebraClass, delta: &AlgebraClass, v: Place) -> Result<SymbolValue> {
    let mut acc = SymbolValue::Plus;
    for j in 0..3 {
        acc = acc
            * hilbert_symbol(&gamma.0[j].to_rational(), &delta.0[j].to_rational(), v)?;
    }
    Ok(acc)
}

/// Places where `(a, b)_v` can be nontrivial: the real place, 2, and the
/// odd primes dividing the numerators or denominators of a and b.
pub fn symbol_places(a: &Rational, b: &Rational) -> Result<Vec<Place>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut primes = vec![2u64];
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        primes.extend(prime_divisors(n)?);
    }
    primes.sort_unstable();
    primes.dedup();
    let mut out = vec![Place::Real];
    out.extend(primes.into_iter().map(Place::Finite));
    Ok(out)
}

/// Product of `(a, b)_v` over the places returned by [`symbol_places`];
/// always +1 by the product formula.
pub fn reciprocity_check(a: &Rational, b: &Rational) -> Result<SymbolValue> {
    reciprocity_check_with(a, b, hilbert_symbol)
}

/// As [`reciprocity_check`] but with a caller-supplied local symbol.
pub fn reciprocity_check_with<F>(a: &Rational, b: &Rational, symbol: F) -> Result<SymbolValue>
where
    F: Fn(&Rational, &Rational, Place) -> Result<SymbolValue>,
{
    let mut acc = SymbolValue::Plus;
    for v in symbol_places(a, b)? {
        acc = acc * symbol(a, b, v)?;
    }
    Ok(acc)
}

/// Canonical representative of the class of `q` in `Q_v^x/(Q_v^x)^2`:
/// `+-1` at the real place; `p^e n` with `n` in `{1, least non-residue}` at
/// odd p; `2^e u` with `u` in `{1, -1, 3, -3}` at 2.
pub fn local_class(q: &Rational, v: Place) -> Result<SquareClass> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_place(v)?;
    Ok(match v {
        Place::Real => local_rep_real(q.is_negative()),
        Place::Finite(p) => {
            let e = val_rat(q, p);
            let modulus = if p == 2 { 8 } else { p };
            local_rep_padic(p, e.rem_euclid(2), unit_residue(q, p, e, modulus))
        }
    })
}

pub(crate) fn local_rep_real(negative: bool) -> SquareClass {
    SquareClass::from_squarefree(if negative { -BigInt::one() } else { BigInt::one() })
}

/// Representative from valuation parity and unit residue (mod p, or mod 8).
pub(crate) fn local_rep_padic(p: u64, parity: i64, residue: u64) -> SquareClass {
    let unit: i64 = if p == 2 {
        match residue % 8 {
            1 => 1,
            7 => -1,
            3 => 3,
            5 => -3,
            r => panic!("even residue {r} is not a 2-adic unit"),
        }
    } else if jacobi_u64(residue, p) == 1 {
        1
    } else {
        least_nonresidue(p) as i64
    };
    let mut rep = BigInt::from(unit);
    if parity == 1 {
        rep *= p;
    }
    SquareClass::from_squarefree(rep)
}

/// Coordinates of the class of `q` in `Q_v^x/(Q_v^x)^2` as an F2 vector:
/// the sign at the real place; valuation parity and non-residue bit at odd
/// p; valuation parity, `u = 3 mod 4` and `u = +-3 mod 8` at 2.
pub fn local_class_bits(q: &Rational, v: Place) -> Result<u64> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    check_place(v)?;
    Ok(match v {
        Place::Real => q.is_negative() as u64,
        Place::Finite(2) => {
            let e = val_rat(q, 2);
            let u = unit_residue(q, 2, e, 8);
            (e.rem_euclid(2) as u64) | (((u % 4 == 3) as u64) << 1) | (((u % 8 == 3 || u % 8 == 5) as u64) << 2)
        }
        Place::Finite(p) => {
            let e = val_rat(q, p);
            let u = unit_residue(q, p, e, p);
            (e.rem_euclid(2) as u64) | (((jacobi_u64(u, p) == -1) as u64) << 1)
        }
    })
}

/// Number of bits used by [`local_class_bits`] at `v`.
pub fn local_class_width(v: Place) -> u32 {
    match v {
        Place::Real => 1,
        Place::Finite(2) => 3,
        Place::Finite(_) => 2,
    }
}

/// Componentwise [`local_class_bits`], packed with stride [`local_class_width`].
pub fn local_triple_bits(c: &AlgebraClass, v: Place) -> Result<u64> {
    let w = local_class_width(v);
    let mut out = 0u64;
    for j in 0..3 {
        out |= local_class_bits(&c.0[j].to_rational(), v)? << (w * j as u32);
    }
    Ok(out)
}

/// Whether the nonzero rational `q` is a square in `Q_v`.
pub fn is_local_square(q: &Rational, v: Place) -> Result<bool> {
    Ok(local_class(q, v)?.is_one())
}

/// Local classes of a triple, componentwise.
pub fn local_algebra_class(c: &AlgebraClass, v: Place) -> Result<AlgebraClass> {
    Ok(AlgebraClass([
        local_class(&c.0[0].to_rational(), v)?,
        local_class(&c.0[1].to_rational(), v)?,
        local_class(&c.0[2].to_rational(), v)?,
    ]))
}

/// Whether two nonzero rationals agree in `Q_v^x/(Q_v^x)^2`.
pub fn same_local_class(a: &Rational, b: &Rational, v: Place) -> Result<bool> {
    Ok(local_class(a, v)? == local_class(b, v)?)
}

/// Whether the class has square norm in `Q_v`.
pub fn has_local_square_norm(c: &AlgebraClass, v: Place) -> Result<bool> {
    let n = c.0[0].mul(&c.0[1]).mul(&c.0[2]);
    is_local_square(&n.to_rational(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use proptest::prelude::*;

    fn h(a: i64, b: i64, v: Place) -> i8 {
        hilbert_symbol(&rat(a), &rat(b), v).unwrap().as_i8()
    }

    #[test]
    fn symbol_examples() {
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
            for b in [-5, -1, 2, 3, 7, 12] {
                assert_eq!(h(1, b, v), 1);
            }
        }
        assert_eq!(h(-1, -1, Place::Real), -1);
        assert_eq!(h(-1, -1, Place::Finite(2)), -1);
        assert_eq!(h(2, 7, Place::Finite(7)), 1);
        assert_eq!(hilbert_symbol(&rat(0), &rat(1), Place::Real), Err(Error::ZeroInput));
        assert!(hilbert_symbol(&rat(1), &rat(1), Place::Finite(9)).is_err());
    }

    #[test]
    fn known_odd_symbols() {
        // (p, n)_p = (n/p) for a unit n
        assert_eq!(h(5, 2, Place::Finite(5)), -1);
        assert_eq!(h(5, 4, Place::Finite(5)), 1);
        // (p, p)_p = (-1/p)
        assert_eq!(h(3, 3, Place::Finite(3)), -1);
        assert_eq!(h(5, 5, Place::Finite(5)), 1);
        // (2, 2)_2 = 1, (2, 3)_2 = -1, (3, 3)_2 = -1
        assert_eq!(h(2, 2, Place::Finite(2)), 1);
        assert_eq!(h(2, 3, Place::Finite(2)), -1);
        assert_eq!(h(3, 3, Place::Finite(2)), -1);
    }

    #[test]
    fn algebra_symbol_examples() {
        let one = AlgebraClass::one();
        let d = AlgebraClass::from_i64([-1, 3, -3]).unwrap();
        for v in [Place::Real, Place::Finite(2), Place::Finite(3)] {
            assert!(algebra_symbol(&one, &d, v).unwrap().is_plus());
        }
        let g = AlgebraClass::from_i64([-1, -1, 1]).unwrap();
        assert_eq!(algebra_symbol(&g, &g, Place::Real).unwrap(), SymbolValue::Plus);
        let m = AlgebraClass::from_i64([-1, -1, -1]).unwrap();
        assert_eq!(algebra_symbol(&m, &m, Place::Real).unwrap(), SymbolValue::Minus);
    }

    #[test]
    fn reciprocity_examples() {
        assert!(reciprocity_check(&rat(-1), &rat(-1)).unwrap().is_plus());
        assert!(reciprocity_check(&rat(1), &rat(30)).unwrap().is_plus());
        assert!(reciprocity_check(&rat(2), &rat(5)).unwrap().is_plus());
        // (2,5): +1 at inf, -1 at 2, -1 at 5
        assert_eq!(h(2, 5, Place::Finite(2)), -1);
        assert_eq!(h(2, 5, Place::Finite(5)), -1);
    }

    #[test]
    fn local_class_reps() {
        assert_eq!(local_class(&rat(-1), Place::Finite(2)).unwrap().rep(), &BigInt::from(-1));
        assert_eq!(local_class(&rat(17), Place::Finite(2)).unwrap().rep(), &BigInt::from(1));
        assert_eq!(local_class(&rat(-12), Place::Finite(3)).unwrap().rep(), &BigInt::from(6));
        assert_eq!(local_class(&ratio(10, 9), Place::Finite(5)).unwrap().rep(), &BigInt::from(10));
        assert_eq!(local_class(&rat(-7), Place::Real).unwrap().rep(), &BigInt::from(-1));
    }

    #[test]
    fn class_bits_are_additive() {
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
            for a in [-15i64, -6, -1, 2, 3, 5, 12, 28] {
                for b in [-10i64, -3, 1, 6, 7, 14, 20] {
                    let ab = local_class_bits(&rat(a * b), v).unwrap();
                    let sum = local_class_bits(&rat(a), v).unwrap() ^ local_class_bits(&rat(b), v).unwrap();
                    assert_eq!(ab, sum, "{a} {b} {v}");
                    let same = local_class(&rat(a), v).unwrap() == local_class(&rat(b), v).unwrap();
                    assert_eq!(same, local_class_bits(&rat(a), v).unwrap() == local_class_bits(&rat(b), v).unwrap());
                }
            }
        }
    }

    fn place_strategy() -> impl Strategy<Value = Place> {
        prop_oneof![
            Just(Place::Real),
            Just(Place::Finite(2)),
            Just(Place::Finite(3)),
            Just(Place::Finite(5)),
            Just(Place::Finite(7)),
            Just(Place::Finite(11)),
            Just(Place::Finite(13)),
        ]
    }

    fn nz() -> impl Strategy<Value = i64> {
        (-2000i64..2000).prop_filter("nonzero", |x| *x != 0)
    }

    proptest! {
        #[test]
        fn bilinear(a in nz(), a2 in nz(), b in nz(), v in place_strategy()) {
            prop_assert_eq!(h(a * a2, b, v), h(a, b, v) * h(a2, b, v));
        }

        #[test]
        fn symmetric(a in nz(), b in nz(), v in place_strategy()) {
            prop_assert_eq!(h(a, b, v), h(b, a, v));
        }

        #[test]
        fn square_invariant(a in nz(), b in nz(), c in 1i64..60, d in 1i64..60, v in place_strategy()) {
            let q = ratio(c, d);
            let sym = hilbert_symbol(&(rat(a) * &q * &q), &rat(b), v).unwrap().as_i8();
            prop_assert_eq!(sym, h(a, b, v));
        }

        #[test]
        fn unit_triviality(a in nz(), b in nz(), pi in 0usize..6) {
            let p = [3i64, 5, 7, 11, 13, 17][pi];
            prop_assume!(a % p != 0 && b % p != 0);
            prop_assert_eq!(h(a, b, Place::Finite(p as u64)), 1);
        }

        #[test]
        fn product_formula(an in nz(), ad in 1i64..2000, bn in nz(), bd in 1i64..2000) {
            let s = reciprocity_check(&ratio(an, ad), &ratio(bn, bd)).unwrap();
            prop_assert!(s.is_plus());
        }
    }
}
