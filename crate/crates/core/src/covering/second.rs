//! Equations of the 4-covering obtained by setting each `f_j` equal to the
//! square of a new variable.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ftriple::FTriple;
use super::model::CoveringModel;
use super::poly::{Poly, NVARS};
use crate::arith::Rational;

pub const VARIABLES: [&str; 7] = ["z0", "z1", "z2", "z3", "u1", "u2", "u3"];

/// A polynomial system with integer coefficients, each equation `= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondCovering {
    pub variables: Vec<String>,
    pub equations: Vec<String>,
}

impl fmt::Display for SecondCovering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq} = 0")?;
        }
        Ok(())
    }
}

type Term = (BigInt, [u8; 7]);

fn terms_of(p: &Poly, extra: Option<usize>) -> Vec<(Rational, [u8; 7])> {
    p.terms()
        .map(|(m, c)| {
            let mut e = [0u8; 7];
            e[..NVARS].copy_from_slice(m);
            if let Some(u) = extra {
                e[NVARS + u] = 2;
            }
            (c.clone(), e)
        })
        .collect()
}

fn integral(terms: Vec<(Rational, [u8; 7])>) -> Vec<Term> {
    let mut den = BigInt::one();
    for (c, _) in &terms {
        den = den.lcm(c.denom());
    }
    let ints: Vec<Term> = terms.into_iter().map(|(c, e)| (c.numer() * (&den / c.denom()), e)).collect();
    let mut g = BigInt::zero();
    for (c, _) in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|(c, e)| (c / &g, e)).collect()
}

fn render(mut terms: Vec<Term>) -> String {
    terms.sort_by(|a, b| b.1.cmp(&a.1));
    let mut out = String::new();
    for (n, (c, e)) in terms.iter().filter(|t| !t.0.is_zero()).enumerate() {
        let neg = c.is_negative();
        if n == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        let mut factors = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => factors.push(VARIABLES[i].to_string()),
                _ => factors.push(format!("{}^{}", VARIABLES[i], k)),
            }
        }
        if factors.is_empty() || !mag.is_one() {
            factors.insert(0, mag.to_string());
        }
        out.push_str(&factors.join("*"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `Q1 = Q2 = 0` and `u_j^2 den_j - num_j = 0` for `j = 1, 2, 3`.
pub fn second_covering(c: &CoveringModel, f: &FTriple) -> SecondCovering {
    let mut equations = vec![render(integral(terms_of(&c.q1, None))), render(integral(terms_of(&c.q2, None)))];
    for j in 0..3 {
        let mut t = terms_of(&f.den[j], Some(j));
        t.extend(terms_of(&f.num[j].scale(&-Rational::one()), None));
        equations.push(render(integral(t)));
    }
    SecondCovering { variables: VARIABLES.iter().map(|s| s.to_string()).collect(), equations }
}
