//! Polynomials over Q in the covering coordinates `(z0, z1, z2, z3)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rational;

pub const NVARS: usize = 4;
pub type Monomial = [u8; NVARS];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn var(i: usize) -> Poly {
    let mut m = [0u8; NVARS];
    m[i] = 1;
    Poly::monomial(m, Rational::one())
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::monomial([0; NVARS], c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// `sum_i c_i z_i`.
    pub fn linear(c: &[Rational; NVARS]) -> Self {
        let mut p = Poly::zero();
        for (i, ci) in c.iter().enumerate() {
            p = p.add(&var(i).scale(ci));
        }
        p
    }

    /// `sum_i c_i z_i^2`.
    pub fn diagonal(c: &[Rational; NVARS]) -> Self {
        let mut p = Poly::zero();
        for (i, ci) in c.iter().enumerate() {
            let mut m = [0u8; NVARS];
            m[i] = 2;
            p = p.add(&Poly::monomial(m, ci.clone()));
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.iter().map(|&e| e as usize).sum()).max().unwrap_or(0)
    }

    fn accumulate(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.accumulate(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = *m1;
                for i in 0..NVARS {
                    m[i] += m2[i];
                }
                r.accumulate(m, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, pt: &[Rational; NVARS]) -> Rational {
        let mut s = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NVARS {
                for _ in 0..m[i] {
                    t *= &pt[i];
                }
            }
            s += t;
        }
        s
    }

    /// Evaluation in any ring of approximations.
    pub fn eval_approx<T: Approx>(&self, pt: &[T; NVARS]) -> T {
        let mut acc: Option<T> = None;
        for (m, c) in &self.terms {
            let mut t: Option<T> = None;
            for i in 0..NVARS {
                for _ in 0..m[i] {
                    t = Some(match t {
                        None => pt[i].clone(),
                        Some(t) => t.mul(&pt[i]),
                    });
                }
            }
            let term = match t {
                None => pt[0].constant(c),
                Some(t) => t.mul_exact(c),
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap_or_else(|| pt[0].constant(&Rational::zero()))
    }

    /// Substitutes linear forms for the variables.
    pub fn substitute(&self, images: &[Poly; NVARS]) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for i in 0..NVARS {
                t = t.mul(&images[i].pow(m[i] as u32));
            }
            r = r.add(&t);
        }
        r
    }

    /// Scales to coprime integer coefficients with positive leading term;
    /// returns the polynomial and the factor `s` with `result = s * self`.
    pub fn primitive(&self) -> (Poly, Rational) {
        if self.is_zero() {
            return (Poly::zero(), Rational::one());
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&den / c.denom())));
        }
        let mut s = Rational::new(den, g);
        if self.terms.values().next_back().unwrap().is_negative() {
            s = -s;
        }
        (self.scale(&s), s)
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Symmetric bilinear form of a quadratic form: `B(a, b)` with `B(a, a) = q(a)`.
    pub fn polar(&self, a: &[Rational; NVARS], b: &[Rational; NVARS]) -> Rational {
        let mut s = Rational::zero();
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        for (m, c) in &self.terms {
            let idx: Vec<usize> = (0..NVARS).flat_map(|i| std::iter::repeat(i).take(m[i] as usize)).collect();
            debug_assert_eq!(idx.len(), 2);
            let (i, k) = (idx[0], idx[1]);
            if i == k {
                s += c * &a[i] * &b[i];
            } else {
                s += c * &half * (&a[i] * &b[k] + &a[k] * &b[i]);
            }
        }
        s
    }

    /// Symmetric matrix of a quadratic form.
    pub fn gram(&self) -> [[Rational; NVARS]; NVARS] {
        let mut g: [[Rational; NVARS]; NVARS] = Default::default();
        let unit = |i: usize| {
            let mut v: [Rational; NVARS] = Default::default();
            v[i] = Rational::one();
            v
        };
        for i in 0..NVARS {
            for k in 0..NVARS {
                g[i][k] = self.polar(&unit(i), &unit(k));
            }
        }
        g
    }

    pub fn fmt_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            if factors.is_empty() || !mag.is_one() {
                factors.insert(0, mag.to_string());
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_with(&["z0", "z1", "z2", "z3"]))
    }
}

/// Approximate ring elements a polynomial can be evaluated on.
pub trait Approx: Clone {
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_exact(&self, c: &Rational) -> Self;
    /// An exact constant in the same completion.
    fn constant(&self, c: &Rational) -> Self;
}

impl Approx for crate::local::PAdic {
    fn add(&self, o: &Self) -> Self {
        crate::local::PAdic::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        crate::local::PAdic::mul(self, o)
    }
    fn mul_exact(&self, c: &Rational) -> Self {
        crate::local::PAdic::mul_exact(self, c)
    }
    fn constant(&self, c: &Rational) -> Self {
        crate::local::PAdic::from_rational(c, self.prime(), self.precision().max(1) + 64)
    }
}

impl Approx for crate::local::RealInterval {
    fn add(&self, o: &Self) -> Self {
        crate::local::RealInterval::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        crate::local::RealInterval::mul(self, o)
    }
    fn mul_exact(&self, c: &Rational) -> Self {
        crate::local::RealInterval::mul_exact(self, c)
    }
    fn constant(&self, c: &Rational) -> Self {
        crate::local::RealInterval::exact(c)
    }
}

/// Reduction modulo the ideal `(u2^2 - a, u3^2 - b)` where `a`, `b` are
/// binary quadratic forms in `(z0, z1)`: every monomial is rewritten to have
/// degree at most one in `z2` and in `z3`. The two leading terms are coprime,
/// so this is a normal form and `p` lies in the ideal iff its form is zero.
#[derive(Debug, Clone)]
pub struct QuotientRing {
    a: Poly,
    b: Poly,
}

impl QuotientRing {
    pub fn new(a: Poly, b: Poly) -> Self {
        QuotientRing { a, b }
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        let mut pow_a: Vec<Poly> = vec![Poly::constant(Rational::one())];
        let mut pow_b: Vec<Poly> = vec![Poly::constant(Rational::one())];
        for (m, c) in &p.terms {
            let (ka, ra) = (m[2] / 2, m[2] % 2);
            let (kb, rb) = (m[3] / 2, m[3] % 2);
            while pow_a.len() <= ka as usize {
                let next = pow_a.last().unwrap().mul(&self.a);
                pow_a.push(next);
            }
            while pow_b.len() <= kb as usize {
                let next = pow_b.last().unwrap().mul(&self.b);
                pow_b.push(next);
            }
            let rest = Poly::monomial([m[0], m[1], ra, rb], c.clone());
            out = out.add(&rest.mul(&pow_a[ka as usize]).mul(&pow_b[kb as usize]));
        }
        out
    }

    pub fn is_zero(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn arithmetic() {
        let x = var(0);
        let y = var(1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.coefficient(&[1, 1, 0, 0]), rat(2));
        assert_eq!(p.eval(&[rat(2), rat(3), rat(0), rat(0)]), rat(25));
        assert!(p.sub(&p).is_zero());
        let (q, s) = p.scale(&ratio(-3, 4)).primitive();
        assert_eq!(q, p);
        assert_eq!(s, ratio(-4, 3));
    }

    #[test]
    fn normal_form_membership() {
        // z2^2 = z0^2 + z1^2, z3^2 = 2 z0^2 + z1^2
        let a = var(0).pow(2).add(&var(1).pow(2));
        let b = var(0).pow(2).scale(&rat(2)).add(&var(1).pow(2));
        let ring = QuotientRing::new(a.clone(), b.clone());
        let g1 = var(2).pow(2).sub(&a);
        let g2 = var(3).pow(2).sub(&b);
        let member = g1.mul(&var(3).pow(3)).add(&g2.mul(&var(0).mul(&var(2))));
        assert!(ring.is_zero(&member));
        assert!(!ring.is_zero(&var(2).pow(2)));
        assert_eq!(ring.normal_form(&var(2).pow(2)), a);
    }

    #[test]
    fn gram_matrix() {
        let q = Poly::diagonal(&[rat(1), rat(-2), rat(3), rat(0)]).add(&var(0).mul(&var(1)).scale(&rat(4)));
        let g = q.gram();
        assert_eq!(g[0][1], rat(2));
        assert_eq!(g[1][1], rat(-2));
        assert_eq!(q.to_string(), "z0^2 + 4*z0*z1 - 2*z1^2 + 3*z2^2");
    }
}
