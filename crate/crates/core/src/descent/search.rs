//! Naive-height search for rational points.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use rayon::prelude::*;

use super::curve::{Curve2T, CurvePoint};
use crate::arith::Rational;

// 64 * 63 * 65 * 11
const SIEVE_MODULUS: u64 = 2_882_880;

fn square_table() -> Vec<bool> {
    let mut t = vec![false; SIEVE_MODULUS as usize];
    for r in 0..SIEVE_MODULUS {
        t[((r * r) % SIEVE_MODULUS) as usize] = true;
    }
    t
}

fn isqrt_exact(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let r = (v as u128).sqrt() as i128;
    (r * r == v).then_some(r)
}

/// All affine points `(m/n^2, y)` with `gcd(m, n) = 1`, `|m| <= bound` and
/// `n^2 <= bound`, each checked exactly, sorted by `(n, m, y)`.
pub fn point_search(e: &Curve2T, height_bound: u64) -> Vec<CurvePoint> {
    let table = square_table();
    let bound = height_bound as i64;
    let r = e.sorted_roots();
    let nmax = (height_bound as u64).sqrt() as i64;
    let per_n: Vec<Vec<(i64, i64, i128)>> = (1..=nmax)
        .into_par_iter()
        .map(|n| search_denominator(&table, r, n, bound))
        .collect();
    let mut out = Vec::new();
    for (n, m, root) in per_n.into_iter().flatten() {
        let n2 = BigInt::from(n) * n;
        let n3 = &n2 * n;
        let x = Rational::new(BigInt::from(m), n2);
        let y = Rational::new(BigInt::from(root), n3);
        for y in if root == 0 { vec![y] } else { vec![y.clone(), -y] } {
            let p = CurvePoint::affine(x.clone(), y);
            debug_assert!(e.contains(&p));
            if e.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn search_denominator(table: &[bool], r: [i64; 3], n: i64, bound: i64) -> Vec<(i64, i64, i128)> {
    let n2 = n * n;
    let mut hits = Vec::new();
    // F(m/n^2) >= 0 exactly on [e1, e2] and [e3, oo)
    let ranges = [(r[0] * n2, r[1] * n2), (r[2] * n2, bound)];
    for (lo, hi) in ranges {
        let lo = lo.max(-bound);
        let hi = hi.min(bound);
        if lo > hi {
            continue;
        }
        let base = [lo - r[0] * n2, lo - r[1] * n2, lo - r[2] * n2];
        let mut res = base.map(|a| a.rem_euclid(SIEVE_MODULUS as i64) as u64);
        for m in lo..=hi {
            let prod = (res[0] * res[1] % SIEVE_MODULUS) * res[2] % SIEVE_MODULUS;
            if table[prod as usize] {
                let k = m - lo;
                let f = |i: usize| (base[i] + k) as i128;
                let value = f(0).checked_mul(f(1)).and_then(|v| v.checked_mul(f(2)));
                let root = match value {
                    Some(v) => isqrt_exact(v),
                    None => big_sqrt([f(0), f(1), f(2)]),
                };
                if let Some(root) = root {
                    if m.gcd(&n) == 1 {
                        hits.push((n, m, root));
                    }
                }
            }
            for v in res.iter_mut() {
                *v += 1;
                if *v == SIEVE_MODULUS {
                    *v = 0;
                }
            }
        }
    }
    hits
}

fn big_sqrt(f: [i128; 3]) -> Option<i128> {
    let v = BigInt::from(f[0]) * f[1] * f[2];
    if v.sign() == num_bigint::Sign::Minus {
        return None;
    }
    let r = v.sqrt();
    if &r * &r != v {
        return None;
    }
    i128::try_from(r).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::descent::curve::new_curve;

    #[test]
    fn finds_known_points() {
        let e = new_curve(-6, 0, 6).unwrap();
        let pts = point_search(&e, 100);
        assert!(pts.contains(&CurvePoint::affine(rat(-3), rat(9))));
        for t in e.torsion_points() {
            assert!(pts.contains(&t));
        }
        assert!(pts.iter().all(|p| e.contains(p)));
    }

    #[test]
    fn congruent_one_has_only_torsion() {
        let e = new_curve(-1, 0, 1).unwrap();
        let pts = point_search(&e, 10_000);
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| e.is_torsion_2(p)));
    }

    #[test]
    fn matches_brute_force() {
        let e = new_curve(-2, 1, 3).unwrap();
        let bound = 400i64;
        let mut brute = Vec::new();
        for n in 1..=20i64 {
            if n * n > bound {
                break;
            }
            for m in -bound..=bound {
                if m.gcd(&n) != 1 {
                    continue;
                }
                let x = Rational::new(BigInt::from(m), BigInt::from(n * n));
                let f = e.eval_f(&x);
                if let Some(y) = crate::arith::sqrt_rat(&f) {
                    brute.push(CurvePoint::affine(x.clone(), y.clone()));
                    if y != rat(0) {
                        brute.push(CurvePoint::affine(x, -y));
                    }
                }
            }
        }
        let mut got = point_search(&e, bound as u64);
        let key = |p: &CurvePoint| format!("{p}");
        got.sort_by_key(key);
        brute.sort_by_key(key);
        assert_eq!(got, brute);
    }
}
