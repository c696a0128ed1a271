use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use super::curve::{Curve2T, CurvePoint};
use super::local_image::{local_image_auto, LocalImage};
use crate::arith::f2::TrackedBasis;
use crate::arith::{rat, square_class_hinted, Place, SquareClass};
use crate::error::{Error, Result};
use crate::local::{local_class_bits, local_class_width, AlgebraClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelmerStatus {
    Candidate,
    Selmer,
    RationalPointImage,
}

/// A class triple with square norm, tagged with what is known about it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelmerElement {
    pub classes: AlgebraClass,
    pub status: SelmerStatus,
}

impl SelmerElement {
    pub fn new(classes: AlgebraClass, status: SelmerStatus) -> Result<Self> {
        if !classes.has_square_norm() {
            return Err(Error::NormViolation);
        }
        Ok(SelmerElement { classes, status })
    }

    /// The element `(d1, d2, squarefree(d1 d2))`.
    pub fn from_pair(d1: i64, d2: i64, status: SelmerStatus) -> Result<Self> {
        let a = SquareClass::from_i64(d1)?;
        let b = SquareClass::from_i64(d2)?;
        let c = a.mul(&b);
        SelmerElement::new(AlgebraClass([a, b, c]), status)
    }

    pub fn d(&self, j: usize) -> &SquareClass {
        &self.classes.0[j]
    }

    pub fn is_identity(&self) -> bool {
        self.classes.is_one()
    }
}

impl fmt::Display for SelmerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.classes)
    }
}

/// The descent map `E(Q) -> (Q^x/Q^x2)^3`, `P -> (x - e_j)_j`, with
/// `F'(e_j)` in the j-th slot at `T_j`.
pub fn descent_map(e: &Curve2T, p: &CurvePoint) -> Result<AlgebraClass> {
    if !e.contains(p) {
        return Err(Error::NotOnCurve);
    }
    let (x, _) = match p {
        CurvePoint::Infinity => return Ok(AlgebraClass::one()),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let support = e.bad_primes();
    let mut classes = Vec::with_capacity(3);
    for j in 0..3 {
        let ej = rat(e.root(j));
        let value = if *x == ej { rat(e.derivative_at_root(j)) } else { x - ej };
        classes.push(square_class_hinted(&value, &support)?);
    }
    let classes: [SquareClass; 3] = classes.try_into().unwrap();
    Ok(AlgebraClass(classes))
}

/// Coordinates for the group of class triples with square norm supported
/// on `{-1} u primes(2 disc)`: the first two components, one bit per
/// support element each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSpace {
    support: Vec<i64>,
}

impl CandidateSpace {
    pub fn new(e: &Curve2T) -> Self {
        let mut support = vec![-1i64];
        support.extend(e.bad_primes().into_iter().map(|p| p as i64));
        CandidateSpace { support }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn dim(&self) -> usize {
        2 * self.support.len()
    }

    fn class_of_mask(&self, mask: u64) -> SquareClass {
        let mut rep = BigInt::one();
        for (i, &s) in self.support.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rep *= s;
            }
        }
        SquareClass::new(rep).expect("products of distinct primes are squarefree")
    }

    fn mask_of_class(&self, c: &SquareClass) -> Option<u64> {
        let mut rest = c.rep().clone();
        let mut mask = 0u64;
        if rest.is_negative() {
            mask |= 1;
            rest = -rest;
        }
        for (i, &p) in self.support.iter().enumerate().skip(1) {
            let pb = BigInt::from(p);
            if (&rest % &pb) == BigInt::from(0) {
                rest /= pb;
                mask |= 1 << i;
            }
        }
        rest.is_one().then_some(mask)
    }

    pub fn decode(&self, bits: u64) -> AlgebraClass {
        let n = self.support.len();
        let a = self.class_of_mask(bits & ((1 << n) - 1));
        let b = self.class_of_mask(bits >> n);
        let c = a.mul(&b);
        AlgebraClass([a, b, c])
    }

    /// Coordinates of a class triple, if it has square norm and the right support.
    pub fn encode(&self, c: &AlgebraClass) -> Option<u64> {
        if !c.has_square_norm() {
            return None;
        }
        let n = self.support.len();
        Some(self.mask_of_class(&c.0[0])? | self.mask_of_class(&c.0[1])? << n)
    }

    /// Local class bits of the element with coordinates `bits`, computed
    /// linearly from the generators' local classes.
    fn local_map(&self, v: Place) -> Result<Vec<u64>> {
        let w = local_class_width(v);
        let n = self.support.len();
        let mut gens = Vec::with_capacity(2 * n);
        for comp in 0..2 {
            for &s in &self.support {
                let b = local_class_bits(&rat(s), v)?;
                // component `comp` and the third component (product)
                gens.push(b << (w * comp) | b << (w * 2));
            }
        }
        Ok(gens)
    }
}

/// All class triples `(d1, d2, d1 d2)` supported on `-1` and the primes of
/// `2 disc`, in coordinate order (identity first).
pub fn selmer_candidates(e: &Curve2T) -> Vec<SelmerElement> {
    let space = CandidateSpace::new(e);
    (0..1u64 << space.dim())
        .map(|bits| SelmerElement { classes: space.decode(bits), status: SelmerStatus::Candidate })
        .collect()
}

/// `S^2(Q, E)` with an F2 basis.
#[derive(Debug, Clone)]
pub struct SelmerGroup {
    pub curve: Curve2T,
    pub basis: Vec<SelmerElement>,
    pub dimension: usize,
    space: CandidateSpace,
    members: Vec<u64>,
    tracked: TrackedBasis,
}

impl SelmerGroup {
    fn from_members(curve: Curve2T, space: CandidateSpace, members: Vec<u64>, torsion: &[u64]) -> Self {
        let mut g = SelmerGroup {
            curve,
            basis: Vec::new(),
            dimension: 0,
            space,
            members,
            tracked: TrackedBasis::new(),
        };
        g.rebase(torsion);
        g
    }

    /// Rebuilds the basis so that the independent elements among `first`
    /// come first (as rational-point images), then members in order.
    fn rebase(&mut self, first: &[u64]) {
        let mut tracked = TrackedBasis::new();
        let mut basis = Vec::new();
        for &b in first {
            if tracked.insert(b).is_some() {
                basis.push(SelmerElement {
                    classes: self.space.decode(b),
                    status: SelmerStatus::RationalPointImage,
                });
            }
        }
        for &b in &self.members {
            if tracked.insert(b).is_some() {
                basis.push(SelmerElement { classes: self.space.decode(b), status: SelmerStatus::Selmer });
            }
        }
        self.dimension = basis.len();
        self.basis = basis;
        self.tracked = tracked;
    }

    /// Reorders the basis to start with the span of the given point images.
    pub fn with_point_images(&self, images: &[AlgebraClass]) -> Result<SelmerGroup> {
        let mut first = Vec::new();
        for t in self.curve.torsion_points().iter().take(2) {
            first.push(self.space.encode(&descent_map(&self.curve, t)?).unwrap());
        }
        for img in images {
            let bits = self
                .space
                .encode(img)
                .filter(|b| self.tracked.express(*b).is_some())
                .ok_or_else(|| Error::Invalid(format!("{img} is not in the Selmer group")))?;
            first.push(bits);
        }
        let mut g = self.clone();
        g.rebase(&first);
        Ok(g)
    }

    pub fn space(&self) -> &CandidateSpace {
        &self.space
    }

    pub fn contains(&self, c: &AlgebraClass) -> bool {
        self.coordinates(c).is_some()
    }

    /// Coordinates of `c` in the basis (bit i for basis element i).
    pub fn coordinates(&self, c: &AlgebraClass) -> Option<u64> {
        self.tracked.express(self.space.encode(c)?)
    }

    /// The element with the given basis coordinates.
    pub fn element(&self, coords: u64) -> AlgebraClass {
        let mut acc = AlgebraClass::one();
        for (i, b) in self.basis.iter().enumerate() {
            if coords >> i & 1 == 1 {
                acc = acc.mul(&b.classes);
            }
        }
        acc
    }

    /// Every element, in coordinate order.
    pub fn elements(&self) -> Vec<AlgebraClass> {
        (0..1u64 << self.dimension).map(|c| self.element(c)).collect()
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }
}

/// The places at which local solvability is tested.
pub fn selmer_places(e: &Curve2T) -> Vec<Place> {
    std::iter::once(Place::Real).chain(e.bad_primes().into_iter().map(Place::Finite)).collect()
}

/// Whether the covering of class `d` has a point over `Q_v`.
pub fn local_solvable(e: &Curve2T, d: &SelmerElement, v: Place) -> Result<bool> {
    local_image_auto(e, v)?.contains(&d.classes)
}

/// Complete 2-descent: the candidates that are locally solvable at the real
/// place, at 2 and at every odd prime of bad reduction.
pub fn selmer2(e: &Curve2T) -> Result<SelmerGroup> {
    let images: Vec<LocalImage> =
        selmer_places(e).into_par_iter().map(|v| local_image_auto(e, v)).collect::<Result<_>>()?;
    selmer2_from_images(e, &images)
}

/// [`selmer2`] from precomputed local images.
pub fn selmer2_from_images(e: &Curve2T, images: &[LocalImage]) -> Result<SelmerGroup> {
    let space = CandidateSpace::new(e);
    let maps: Vec<Vec<u64>> = images.iter().map(|img| space.local_map(img.place)).collect::<Result<_>>()?;
    let dim = space.dim();
    let members: Vec<u64> = (0..1u64 << dim)
        .filter(|&bits| {
            maps.iter().zip(images).all(|(gens, img)| {
                let mut local = 0u64;
                for (i, g) in gens.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        local ^= g;
                    }
                }
                img.contains_bits(local)
            })
        })
        .collect();
    let torsion: Vec<u64> = e
        .torsion_points()
        .iter()
        .map(|t| descent_map(e, t).map(|c| space.encode(&c).expect("torsion classes lie in the candidate space")))
        .collect::<Result<_>>()?;
    for t in &torsion {
        if !members.contains(t) {
            return Err(Error::Construction("torsion image failed a local test".into()));
        }
    }
    Ok(SelmerGroup::from_members(e.clone(), space, members, &torsion))
}

/// Local images at the Selmer places, for reuse.
pub fn selmer_local_images(e: &Curve2T) -> Result<HashMap<Place, LocalImage>> {
    selmer_places(e).into_iter().map(|v| Ok((v, local_image_auto(e, v)?))).collect()
}

/// Squarefree representatives as machine integers, if they fit.
pub fn class_reps(c: &AlgebraClass) -> Option<[i64; 3]> {
    let r = [c.0[0].rep().to_i64()?, c.0[1].rep().to_i64()?, c.0[2].rep().to_i64()?];
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::curve::new_curve;

    fn classes(c: [i64; 3]) -> AlgebraClass {
        AlgebraClass::from_i64(c).unwrap()
    }

    #[test]
    fn descent_map_examples() {
        let e = new_curve(-6, 0, 6).unwrap();
        let p = CurvePoint::affine(rat(-3), rat(9));
        assert_eq!(descent_map(&e, &p).unwrap(), classes([3, -3, -1]));
        assert!(descent_map(&e, &CurvePoint::Infinity).unwrap().is_one());
        let e = new_curve(-1, 0, 1).unwrap();
        assert_eq!(descent_map(&e, &e.torsion_point(1)).unwrap(), classes([1, -1, -1]));
        let off = CurvePoint::affine(rat(2), rat(1));
        assert_eq!(descent_map(&e, &off), Err(Error::NotOnCurve));
    }

    #[test]
    fn candidates_of_congruent_one() {
        let e = new_curve(-1, 0, 1).unwrap();
        let c = selmer_candidates(&e);
        assert_eq!(c.len(), 16);
        assert!(c[0].is_identity());
        assert!(c.iter().all(|s| s.classes.has_square_norm()));
    }

    #[test]
    fn selmer_examples() {
        let e = new_curve(-1, 0, 1).unwrap();
        let s = selmer2(&e).unwrap();
        assert_eq!(s.dimension, 2);
        for t in e.torsion_points() {
            assert!(s.contains(&descent_map(&e, &t).unwrap()));
        }
        let e = new_curve(-6, 0, 6).unwrap();
        let s = selmer2(&e).unwrap();
        assert_eq!(s.dimension, 3);
        assert!(s.contains(&classes([3, -3, -1])));
    }

    #[test]
    fn real_solvability_example() {
        let e = new_curve(-1, 0, 1).unwrap();
        let d = SelmerElement::new(classes([-1, -1, 1]), SelmerStatus::Candidate).unwrap();
        assert!(!local_solvable(&e, &d, Place::Real).unwrap());
        let d = SelmerElement::new(classes([2, 3, 6]), SelmerStatus::Candidate).unwrap();
        assert!(local_solvable(&e, &d, Place::Real).unwrap());
        let one = SelmerElement::new(AlgebraClass::one(), SelmerStatus::Candidate).unwrap();
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
            assert!(local_solvable(&e, &one, v).unwrap());
        }
    }

    #[test]
    fn basis_reordering() {
        let e = new_curve(-6, 0, 6).unwrap();
        let s = selmer2(&e).unwrap();
        let g = s.with_point_images(&[classes([3, -3, -1])]).unwrap();
        assert_eq!(g.dimension, 3);
        assert!(g.basis.iter().all(|b| b.status == SelmerStatus::RationalPointImage));
        assert_eq!(g.coordinates(&classes([3, -3, -1])), Some(0b100));
    }
}
