//! Deterministic primality testing and trial-division factorization.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default trial-division bound.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

// Witness set proven for every n < 3.3 * 10^24.
const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn mr_round_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = powmod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    WITNESSES.iter().all(|&a| mr_round_u64(n, d, s, a))
}

fn mr_round_big(n: &BigInt, d: &BigInt, s: u64, a: &BigInt) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Primality test. Deterministic below 3.3e24 (proven witness set); above
/// that, every base up to 2 ln(n)^2 is tried, which is a proof under GRH.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let bits = n.bits() as f64;
    let limit: u64 = if bits < 81.0 {
        // 3.3e24 < 2^82
        0
    } else {
        let ln = bits * std::f64::consts::LN_2;
        (2.0 * ln * ln).ceil() as u64
    };
    if limit == 0 {
        return WITNESSES
            .iter()
            .all(|&a| mr_round_big(n, &d, s, &BigInt::from(a)));
    }
    (2..=limit).all(|a| mr_round_big(n, &d, s, &BigInt::from(a)))
}

/// Signed factorization `sign * prod p^e` with primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub negative: bool,
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn value(&self) -> BigInt {
        let mut v = BigInt::one();
        for (p, e) in &self.factors {
            v *= num_traits::pow(p.clone(), *e as usize);
        }
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// A reasonable Pollard rho budget for [`Factorizer::with_rho`].
pub const RHO_STEPS: u64 = 1 << 22;

/// Trial-division factorizer with a configurable bound. A cofactor left
/// after trial division must either be provably prime or below the square
/// of the bound. Otherwise it is split with Pollard rho if `rho_steps` is
/// nonzero (at most that many iterations per split); what remains composite
/// is reported as an error.
#[derive(Debug, Clone, Copy)]
pub struct Factorizer {
    pub bound: u64,
    pub rho_steps: u64,
}

impl Default for Factorizer {
    fn default() -> Self {
        Factorizer { bound: DEFAULT_TRIAL_BOUND, rho_steps: 0 }
    }
}

impl Factorizer {
    /// Trial division only.
    pub fn new(bound: u64) -> Self {
        Factorizer { bound: bound.max(2), rho_steps: 0 }
    }

    pub fn with_rho(self, rho_steps: u64) -> Self {
        Factorizer { rho_steps, ..self }
    }

    pub fn factorize(&self, n: &BigInt) -> Result<Factorization> {
        if n.is_zero() {
            return Err(Error::ZeroInput);
        }
        let negative = n.is_negative();
        let m = n.abs();
        let mut factors = Vec::new();
        if let Some(small) = m.to_u64() {
            self.factor_u64(small, &mut factors)?;
        } else {
            self.factor_big(m, &mut factors)?;
        }
        factors.sort();
        let mut merged: Vec<(BigInt, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Factorization { negative, factors: merged })
    }

    fn factor_u64(&self, mut m: u64, out: &mut Vec<(BigInt, u32)>) -> Result<()> {
        let mut push = |p: u64, m: &mut u64| {
            let mut e = 0;
            while *m % p == 0 {
                *m /= p;
                e += 1;
            }
            if e > 0 {
                out.push((BigInt::from(p), e));
            }
        };
        push(2, &mut m);
        push(3, &mut m);
        let mut p = 5u64;
        let mut step = 2u64;
        let mut checked_prime = false;
        while m > 1 && p <= self.bound {
            if p.saturating_mul(p) > m {
                break;
            }
            if !checked_prime && m > 1 << 20 {
                if is_prime_u64(m) {
                    break;
                }
                checked_prime = true;
            }
            if m % p == 0 {
                push(p, &mut m);
                checked_prime = false;
            }
            p += step;
            step = 6 - step;
        }
        if m > 1 {
            let fits = (m as u128) < (self.bound as u128 + 1) * (self.bound as u128 + 1);
            if fits || is_prime_u64(m) {
                out.push((BigInt::from(m), 1));
            } else {
                self.split(BigInt::from(m), out)?;
            }
        }
        // cofactor may coincide with a prime already found only if m <= bound, which
        // was handled in the loop, so primes are strictly increasing
        Ok(())
    }

    fn factor_big(&self, mut m: BigInt, out: &mut Vec<(BigInt, u32)>) -> Result<()> {
        let mut p = 2u64;
        if is_prime(&m) {
            out.push((m, 1));
            return Ok(());
        }
        while p <= self.bound {
            if let Some(small) = m.to_u64() {
                // hand off to the fast path with the same running bound
                let mut rest = Vec::new();
                self.factor_u64(small, &mut rest)?;
                out.extend(rest);
                return Ok(());
            }
            if (&m % p).is_zero() {
                let mut e = 0;
                while (&m % p).is_zero() {
                    m /= p;
                    e += 1;
                }
                out.push((BigInt::from(p), e));
                if is_prime(&m) {
                    break;
                }
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if !m.is_one() {
            self.split(m, out)?;
        }
        Ok(())
    }

    /// Factors a cofactor with no prime divisor below the trial bound.
    fn split(&self, m: BigInt, out: &mut Vec<(BigInt, u32)>) -> Result<()> {
        if m.is_one() {
            return Ok(());
        }
        if is_prime(&m) {
            out.push((m, 1));
            return Ok(());
        }
        let r = m.sqrt();
        if &r * &r == m {
            let mut half = Vec::new();
            self.split(r, &mut half)?;
            out.extend(half.into_iter().map(|(p, e)| (p, 2 * e)));
            return Ok(());
        }
        for c in (1..=8u64).take_while(|_| self.rho_steps > 0) {
            if let Some(d) = pollard_brent(&m, c, self.rho_steps) {
                let other = &m / &d;
                self.split(d, out)?;
                return self.split(other, out);
            }
        }
        Err(Error::CompositeCofactor(m.to_string()))
    }
}

/// Brent's variant of Pollard rho with `x -> x^2 + c`; returns a proper
/// divisor of the odd composite `n` or gives up after `steps` iterations.
fn pollard_brent(n: &BigInt, c: u64, steps: u64) -> Option<BigInt> {
    const BATCH: u64 = 128;
    let c = BigInt::from(c);
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(2);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigInt::one();
    let mut g = BigInt::one();
    let mut r = 1u64;
    let mut done = 0u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += BATCH;
            done += BATCH;
            if done > steps {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Factorization with the default bound.
pub fn factorize(n: &BigInt) -> Result<Factorization> {
    Factorizer::default().factorize(n)
}

/// Distinct prime divisors of a nonzero integer, using the default bound.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    f.primes()
        .map(|p| {
            p.to_u64()
                .ok_or_else(|| Error::Invalid(format!("prime {p} exceeds 64 bits")))
        })
        .collect()
}

pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
