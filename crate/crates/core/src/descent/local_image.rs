//! The image of `E(Q_v)/2E(Q_v)` under the descent map.
//!
//! At a finite prime the x-line is covered by p-adic balls `c + p^r Z_p`.
//! On a ball where every `x - e_j` keeps its square class, membership of the
//! whole ball is decided by its centre. Balls around a root `e_j` that are
//! small enough only carry points with the image of `T_j`, and the region
//! `v(x) < r0` only carries points with trivial image, so the search is
//! finite. The result is checked against `|E(Q_v)/2E(Q_v)|`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::curve::Curve2T;
use super::selmer::descent_map;
use crate::arith::{rat, ratio, val_rat, Place, Rational};
use crate::error::{Error, Result};
use crate::local::{local_class_bits, local_class_width, local_triple_bits, AlgebraClass};

/// Where a local image class was seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Infinity,
    Torsion(usize),
    /// An x-coordinate in Q for which every `d_j (x - e_j)` is a local square.
    X(Rational),
}

/// The local image at one place, keyed by packed local class bits.
#[derive(Debug, Clone)]
pub struct LocalImage {
    pub place: Place,
    pub classes: BTreeMap<u64, Witness>,
}

impl LocalImage {
    pub fn contains_bits(&self, bits: u64) -> bool {
        self.classes.contains_key(&bits)
    }

    pub fn contains(&self, d: &AlgebraClass) -> Result<bool> {
        Ok(self.contains_bits(local_triple_bits(d, self.place)?))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// `|E(Q_v)/2E(Q_v)|` for a curve with full rational 2-torsion.
pub fn expected_size(v: Place) -> usize {
    match v {
        Place::Real => 2,
        Place::Finite(2) => 8,
        Place::Finite(_) => 4,
    }
}

/// Starting depth of the ball search at `p`.
pub fn default_depth(e: &Curve2T, p: u64) -> u32 {
    let diffs: i64 = (0..3)
        .flat_map(|i| (i + 1..3).map(move |k| (i, k)))
        .map(|(i, k)| val_rat(&rat(e.root(i) - e.root(k)), p))
        .sum();
    (6 + 1 + 2 * diffs) as u32 + if p == 2 { 4 } else { 0 }
}

fn margin(p: u64) -> i64 {
    if p == 2 {
        3
    } else {
        1
    }
}

fn pow_p(p: u64, r: i64) -> Rational {
    let base = BigInt::from(p).pow(r.unsigned_abs() as u32);
    if r >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

fn seed_image(e: &Curve2T, v: Place) -> Result<LocalImage> {
    let mut classes = BTreeMap::new();
    classes.insert(local_triple_bits(&AlgebraClass::one(), v)?, Witness::Infinity);
    for j in 0..3 {
        let t = descent_map(e, &e.torsion_point(j))?;
        classes.entry(local_triple_bits(&t, v)?).or_insert(Witness::Torsion(j));
    }
    Ok(LocalImage { place: v, classes })
}

fn real_image(e: &Curve2T) -> Result<LocalImage> {
    let mut img = seed_image(e, Place::Real)?;
    let r = e.sorted_roots();
    let x = ratio(r[0] + r[1], 2);
    img.classes.entry(x_local_bits(e, &x, Place::Real)?).or_insert(Witness::X(x));
    Ok(img)
}

/// Packed local classes of `(x - e_j)_j` at `v`, for `x` not a root.
fn x_local_bits(e: &Curve2T, x: &Rational, v: Place) -> Result<u64> {
    let w = local_class_width(v);
    let mut out = 0u64;
    for j in 0..3 {
        out |= local_class_bits(&(x - rat(e.root(j))), v)? << (w * j as u32);
    }
    Ok(out)
}

/// Class triple of `(x - e_j)_j` in Q, for `x` not a root.
#[cfg(test)]
fn x_image(e: &Curve2T, x: &Rational) -> Result<AlgebraClass> {
    use crate::arith::squarefree_part;
    let c = |j: usize| squarefree_part(&(x - rat(e.root(j)))).map(|s| s.0);
    Ok(AlgebraClass([c(0)?, c(1)?, c(2)?]))
}

enum BallState {
    /// Every `x - e_j` has constant class; the triple is given if it comes
    /// from points.
    Constant(Option<u64>),
    /// Only points with the image of `T_j` (or none) lie in the ball.
    TorsionZone,
    Split,
}

struct BallSearch<'a> {
    e: &'a Curve2T,
    p: u64,
    place: Place,
    depth: i64,
    root_vals: [[i64; 3]; 3],
}

impl<'a> BallSearch<'a> {
    fn new(e: &'a Curve2T, p: u64, depth: u32) -> Self {
        let mut root_vals = [[0i64; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                if i != k {
                    root_vals[i][k] = val_rat(&rat(e.root(i) - e.root(k)), p);
                }
            }
        }
        BallSearch { e, p, place: Place::Finite(p), depth: depth as i64, root_vals }
    }

    fn r0(&self) -> i64 {
        if self.p == 2 {
            -2
        } else {
            0
        }
    }

    fn classify(&self, c: &Rational, r: i64) -> Result<BallState> {
        let mu = margin(self.p);
        let mut vals = [0i64; 3];
        for j in 0..3 {
            let diff = c - rat(self.e.root(j));
            vals[j] = if diff.is_zero() { i64::MAX } else { val_rat(&diff, self.p) };
        }
        if vals.iter().all(|&w| w <= r - mu) {
            let bits = x_local_bits(self.e, c, self.place)?;
            let f = self.e.eval_f(c);
            let is_point = crate::local::is_local_square(&f, self.place)?;
            return Ok(BallState::Constant(is_point.then_some(bits)));
        }
        for j in 0..3 {
            if vals[j] >= r {
                let need = (0..3).filter(|&k| k != j).map(|k| self.root_vals[j][k]).max().unwrap() + mu;
                if r >= need {
                    return Ok(BallState::TorsionZone);
                }
            }
        }
        Ok(BallState::Split)
    }

    /// Visits constant balls in a fixed order; `visit` returns true to stop.
    fn walk<F>(&self, mut visit: F) -> Result<()>
    where
        F: FnMut(u64, &Rational, i64) -> bool,
    {
        let mut stack = vec![(Rational::zero(), self.r0())];
        while let Some((c, r)) = stack.pop() {
            match self.classify(&c, r)? {
                BallState::Constant(Some(bits)) => {
                    if visit(bits, &c, r) {
                        return Ok(());
                    }
                }
                BallState::Constant(None) | BallState::TorsionZone => {}
                BallState::Split => {
                    if r >= self.depth {
                        return Err(Error::Indeterminate { place: self.place, precision: self.depth as u32 });
                    }
                    let step = pow_p(self.p, r);
                    for t in (0..self.p).rev() {
                        stack.push((&c + &step * rat(t as i64), r + 1));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Computes the local image at `v`, with ball depth `depth` at finite places.
pub fn local_image(e: &Curve2T, v: Place, depth: u32) -> Result<LocalImage> {
    let p = match v {
        Place::Real => return real_image(e),
        Place::Finite(p) => p,
    };
    let mut img = seed_image(e, v)?;
    let want = expected_size(v);
    if img.len() < want {
        let search = BallSearch::new(e, p, depth);
        search.walk(|bits, c, _| {
            img.classes.entry(bits).or_insert_with(|| Witness::X(c.clone()));
            img.classes.len() >= want
        })?;
    }
    if img.len() != want {
        return Err(Error::Construction(format!(
            "local image at {v} has {} classes, expected {want}",
            img.len()
        )));
    }
    Ok(img)
}

/// [`local_image`] starting at the default depth and doubling it on
/// indeterminacy a few times.
pub fn local_image_auto(e: &Curve2T, v: Place) -> Result<LocalImage> {
    let mut depth = match v {
        Place::Real => 0,
        Place::Finite(p) => default_depth(e, p),
    };
    let mut last = None;
    for _ in 0..4 {
        match local_image(e, v, depth) {
            Err(err) if err.is_indeterminate() => {
                last = Some(err);
                depth *= 2;
            }
            other => return other,
        }
    }
    Err(last.unwrap())
}

/// Up to `count` rational x-coordinates whose point has local image equal
/// to that of `d` at `v`. Points with `x` a root are never returned.
pub fn local_x_witnesses(e: &Curve2T, d: &AlgebraClass, v: Place, count: usize) -> Result<Vec<Rational>> {
    let target = local_triple_bits(d, v)?;
    let mut out: Vec<Rational> = Vec::new();
    let push = |x: Rational, out: &mut Vec<Rational>| -> Result<()> {
        if e.roots().iter().any(|&r| rat(r) == x) || out.contains(&x) {
            return Ok(());
        }
        if x_local_bits(e, &x, v)? == target && crate::local::is_local_square(&e.eval_f(&x), v)? {
            out.push(x);
        }
        Ok(())
    };
    match v {
        Place::Real => {
            let r = e.sorted_roots();
            for k in 1..=count as i64 {
                push(rat(r[2]) + rat(k), &mut out)?;
                push(rat(r[0]) + ratio((r[1] - r[0]) * k, count as i64 + 1), &mut out)?;
            }
        }
        Place::Finite(p) => {
            // points near infinity and near each torsion point
            let mu = margin(p);
            for m in 0..count as i64 {
                let s = mu + 2 * m;
                push(pow_p(p, -2 * ((s + 1) / 2)), &mut out)?;
                for j in 0..3 {
                    let fp = rat(e.derivative_at_root(j));
                    let zone = (0..3).filter(|&k| k != j).map(|k| val_rat(&rat(e.root(j) - e.root(k)), p)).max().unwrap();
                    let x = rat(e.root(j)) + fp * pow_p(p, 2 * (zone + mu + m));
                    push(x, &mut out)?;
                }
            }
            if out.len() < count {
                let search = BallSearch::new(e, p, default_depth(e, p) * 2);
                // every point of a matching ball is a witness
                search.walk(|bits, c, r| {
                    if bits == target {
                        let step = pow_p(p, r);
                        for t in 0..count as i64 {
                            let x = c + &step * rat(t);
                            if !out.contains(&x) && out.len() < count {
                                out.push(x);
                            }
                        }
                    }
                    out.len() >= count
                })?;
            }
        }
    }
    out.truncate(count);
    Ok(out)
}
