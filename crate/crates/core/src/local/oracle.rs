//! Brute-force decision of `z^2 = a x^2 + b y^2` over a completion of Q.
//!
//! At a finite prime the search walks the tree of primitive residue triples
//! modulo `p, p^2, ...` up to the requested precision. A branch is accepted
//! once it carries a Hensel certificate `v_p(F) > 2 v_p(dF/dw_i)`; the
//! solution is then lifted two further steps explicitly as a confirmation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::SymbolValue;
use crate::arith::{is_prime_u64, val_int, Place, Rational};
use crate::error::{Error, Result};

/// Precision at which [`solvability_oracle`] is always conclusive.
pub fn default_precision(v: Place) -> u32 {
    match v {
        Place::Finite(2) => 3,
        _ => 2,
    }
}

/// [`solvability_oracle`] at [`default_precision`].
pub fn solvability_oracle_auto(a: &Rational, b: &Rational, v: Place) -> Result<SymbolValue> {
    solvability_oracle(a, b, v, default_precision(v))
}

/// Decides solvability of `z^2 = a x^2 + b y^2` in a nonzero vector over
/// `Q_v` by search. Reports [`Error::Indeterminate`] when the residue tree is
/// not resolved at `precision`.
pub fn solvability_oracle(a: &Rational, b: &Rational, v: Place, precision: u32) -> Result<SymbolValue> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = match v {
        Place::Real => {
            // a > 0 gives (x, y, z) = (1, 0, sqrt a); likewise for b.
            // Otherwise the right side is <= 0 and vanishes only at x = y = 0.
            let solvable = a.is_positive() || b.is_positive();
            return Ok(if solvable { SymbolValue::Plus } else { SymbolValue::Minus });
        }
        Place::Finite(p) => p,
    };
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if precision == 0 {
        return Err(Error::Indeterminate { place: v, precision });
    }
    let coeffs = reduced_form(a, b, p);
    let search = TreeSearch::new(p, coeffs, precision);
    match search.run() {
        Verdict::Solvable => Ok(SymbolValue::Plus),
        Verdict::Unsolvable => Ok(SymbolValue::Minus),
        Verdict::Open => Err(Error::Indeterminate { place: v, precision }),
    }
}

/// Integer diagonal form `c0 z^2 + c1 x^2 + c2 y^2` equivalent to
/// `-z^2 + a x^2 + b y^2`, with every `v_p(c_i)` in {0, 1} and at most one
/// coefficient divisible by p.
fn reduced_form(a: &Rational, b: &Rational, p: u64) -> [BigInt; 3] {
    let integral = |q: &Rational| q.numer() * q.denom();
    let mut c = [BigInt::from(-1), integral(a), integral(b)];
    let pp = BigInt::from(p * p);
    for ci in c.iter_mut() {
        while (&*ci % &pp).is_zero() {
            *ci /= &pp;
        }
    }
    loop {
        let odd: Vec<usize> = (0..3).filter(|&i| val_int(&c[i], p) == 1).collect();
        match odd.len() {
            3 => {
                for ci in c.iter_mut() {
                    *ci /= p;
                }
            }
            2 => {
                let k = (0..3).find(|i| !odd.contains(i)).unwrap();
                c[k] *= p;
                for &i in &odd {
                    c[i] /= p;
                }
            }
            _ => return c,
        }
    }
}

enum Verdict {
    Solvable,
    Unsolvable,
    Open,
}

struct TreeSearch {
    p: u64,
    // coefficients reduced modulo p^(precision + 3)
    c: [u128; 3],
    cval: [u32; 3],
    precision: u32,
}

impl TreeSearch {
    fn new(p: u64, coeffs: [BigInt; 3], precision: u32) -> Self {
        let modulus = BigInt::from(p).pow(precision + 3);
        let c = [0, 1, 2].map(|i| coeffs[i].mod_floor(&modulus).to_u128().unwrap());
        let cval = [0, 1, 2].map(|i| val_int(&coeffs[i], p) as u32);
        TreeSearch { p, c, cval, precision }
    }

    fn modulus(&self, j: u32) -> u128 {
        (self.p as u128).pow(j)
    }

    fn form(&self, w: &[u128; 3], m: u128) -> u128 {
        let mut s = 0u128;
        for i in 0..3 {
            let wi = w[i] % m;
            s = (s + mulmod(self.c[i] % m, mulmod(wi, wi, m), m)) % m;
        }
        s
    }

    fn val_mod(&self, x: u128, j: u32) -> Option<u32> {
        let mut x = x % self.modulus(j);
        if x == 0 {
            return None;
        }
        let mut v = 0;
        while x % self.p as u128 == 0 {
            x /= self.p as u128;
            v += 1;
        }
        Some(v)
    }

    /// Coordinate index whose gradient valuation `g` satisfies `j > 2g`.
    fn certificate(&self, w: &[u128; 3], j: u32) -> Option<(usize, u32)> {
        let two = if self.p == 2 { 1 } else { 0 };
        (0..3).find_map(|i| {
            let vw = self.val_mod(w[i], j)?;
            let g = two + self.cval[i] + vw;
            (j > 2 * g).then_some((i, g))
        })
    }

    /// Lifts a certified residue two steps and checks the result.
    fn confirm(&self, w: &[u128; 3], j: u32, i: usize, g: u32) -> bool {
        let mut w = *w;
        for k in j..j + 2 {
            let shift = self.modulus(k - g);
            let m = self.modulus(k + 1);
            let found = (0..self.p as u128).find(|&t| {
                let mut u = w;
                u[i] = (u[i] + t * shift) % m;
                self.form(&u, m) == 0
            });
            match found {
                Some(t) => w[i] = (w[i] + t * shift) % m,
                None => return false,
            }
        }
        self.form(&w, self.modulus(j + 2)) == 0
    }

    fn roots(&self) -> Vec<[u128; 3]> {
        let p = self.p as u128;
        let mut out = Vec::new();
        for y in 0..p {
            for z in 0..p {
                out.push([1, y, z]);
            }
        }
        for z in 0..p {
            out.push([0, 1, z]);
        }
        out.push([0, 0, 1]);
        out
    }

    fn run(&self) -> Verdict {
        let m1 = self.modulus(1);
        let mut level: Vec<[u128; 3]> =
            self.roots().into_iter().filter(|w| self.form(w, m1) == 0).collect();
        let mut j = 1;
        loop {
            if level.is_empty() {
                return Verdict::Unsolvable;
            }
            for w in &level {
                if let Some((i, g)) = self.certificate(w, j) {
                    if self.confirm(w, j, i, g) {
                        return Verdict::Solvable;
                    }
                }
            }
            if j >= self.precision {
                return Verdict::Open;
            }
            level = self.children(&level, j);
            j += 1;
        }
    }

    fn children(&self, level: &[[u128; 3]], j: u32) -> Vec<[u128; 3]> {
        let p = self.p as u128;
        let step = self.modulus(j);
        let m = self.modulus(j + 1);
        let mut out = Vec::new();
        for w in level {
            let pivot = (0..3).find(|&i| w[i] % p != 0).unwrap();
            let free: Vec<usize> = (0..3).filter(|&i| i != pivot).collect();
            for t0 in 0..p {
                for t1 in 0..p {
                    let mut u = *w;
                    u[free[0]] += t0 * step;
                    u[free[1]] += t1 * step;
                    if self.form(&u, m) == 0 {
                        out.push(u);
                    }
                }
            }
        }
        out
    }
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(x) = a.checked_mul(b) {
        return x % m;
    }
    let (mut a, mut b, mut r) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    r
}
