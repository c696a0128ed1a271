//! The Cassels pairing on the 2-Selmer group, assembled from local
//! algebra symbols, and the refined rank bounds it gives.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::f2;
use crate::arith::{is_prime_u64, rat_mod, Place};
use crate::covering::{
    construct_f, default_precision, evaluate_f, local_points, make_covering, CoveringModel, FTriple, LocalPoint, PointCertificate,
};
use crate::descent::{descent_map, point_search, selmer2, Curve2T, CurvePoint, SelmerElement, SelmerGroup, SelmerStatus};
use crate::error::{Error, Result};
use crate::local::{algebra_symbol, AlgebraClass, SymbolValue};

/// Odd good primes from this bound on always carry a point of the covering
/// at which every tangent form is a unit: `p + 1 - 2 sqrt(p) > 16`.
pub const COUNTING_BOUND: u64 = 29;

/// Local points kept per place.
const POINTS_PER_PLACE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairingOptions {
    pub seed: u64,
    /// Relative p-adic digits for local points, real places using four times
    /// as many bits; by default the precision adapts to the covering.
    pub precision: Option<u32>,
    /// Excluded primes at which the local term is recomputed as an audit.
    pub spot_checks: usize,
}

impl Default for PairingOptions {
    fn default() -> Self {
        PairingOptions { seed: 0, precision: None, spot_checks: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingValue {
    pub value: SymbolValue,
    pub local_terms: BTreeMap<Place, SymbolValue>,
}

/// The covering of a Selmer element with its functions and certified local
/// points, built once and paired against many elements.
#[derive(Debug, Clone)]
pub struct CoveringData {
    pub element: SelmerElement,
    pub covering: CoveringModel,
    pub f: FTriple,
    /// Places at which the local term can be nontrivial for some partner.
    pub places: Vec<Place>,
    /// Certified points with the values of `f` at them.
    pub points: BTreeMap<Place, Vec<(LocalPoint, AlgebraClass)>>,
}

fn precision_at(c: &CoveringModel, v: Place, opts: &PairingOptions) -> u32 {
    match (opts.precision, v) {
        (None, _) => default_precision(c, v),
        (Some(base), Place::Real) => 4 * base,
        (Some(base), Place::Finite(_)) => base,
    }
}

fn points_at(c: &CoveringModel, f: &FTriple, v: Place, opts: &PairingOptions) -> Result<Vec<(LocalPoint, AlgebraClass)>> {
    let mut precision = precision_at(c, v, opts);
    let mut last = None;
    for _ in 0..4 {
        match local_points(c, f, v, precision, POINTS_PER_PLACE, opts.seed) {
            Ok(pts) => {
                return pts
                    .into_iter()
                    .map(|p| {
                        let value = evaluate_f(f, &p)?;
                        Ok((p, value))
                    })
                    .collect()
            }
            Err(err) if err.is_indeterminate() => {
                last = Some(err);
                precision *= 2;
            }
            Err(err) => return Err(err),
        }
    }
    Err(last.unwrap())
}

/// Reduces a form with `p`-integral coefficients modulo `p`.
fn reduce(poly: &crate::covering::Poly, p: u64) -> Option<Vec<([u8; 4], u64)>> {
    let modulus = num_bigint::BigInt::from(p);
    poly.terms()
        .map(|(m, c)| {
            let r = rat_mod(c, &modulus)?;
            Some((*m, u64::try_from(r).ok()?))
        })
        .collect()
}

fn eval_mod(terms: &[([u8; 4], u64)], z: [u64; 4], p: u64) -> u64 {
    let mut s = 0u64;
    for (m, c) in terms {
        let mut t = *c % p;
        for i in 0..4 {
            for _ in 0..m[i] {
                t = t * z[i] % p;
            }
        }
        s = (s + t) % p;
    }
    s
}

/// Whether the reduction of the covering at the odd good prime `p` has a
/// point where all four tangent forms are nonzero. Such a point lifts to
/// `Q_p`, `f` is a unit triple there, and the local term is trivial
/// against any partner that is a unit at `p`.
pub fn has_unit_point_mod(c: &CoveringModel, f: &FTriple, p: u64) -> bool {
    let (Some(q1), Some(q2)) = (reduce(&c.q1, p), reduce(&c.q2, p)) else { return false };
    let Some(tangents) = f.tangents.iter().map(|l| reduce(l, p)).collect::<Option<Vec<_>>>() else { return false };
    let check = |z: [u64; 4]| {
        eval_mod(&q1, z, p) == 0
            && eval_mod(&q2, z, p) == 0
            && tangents.iter().all(|l| eval_mod(l, z, p) != 0)
    };
    for a in 0..p {
        for b in 0..p {
            for d in 0..p {
                if check([1, a, b, d]) {
                    return true;
                }
            }
        }
    }
    for b in 0..p {
        for d in 0..p {
            if check([0, 1, b, d]) {
                return true;
            }
        }
    }
    check([0, 0, 1, 0]) || (0..p).any(|d| check([0, 0, 1, d])) || check([0, 0, 0, 1])
}

fn odd_primes_below(n: u64) -> impl Iterator<Item = u64> {
    (3..n).filter(|&p| is_prime_u64(p))
}

impl CoveringData {
    pub fn new(e: &Curve2T, a: &SelmerElement, opts: &PairingOptions) -> Result<CoveringData> {
        let covering = make_covering(e, a)?;
        let f = construct_f(&covering)?;
        CoveringData::with_f(e, a, covering, f, opts)
    }

    /// Uses the given functions, e.g. a rescaled triple.
    pub fn with_f(e: &Curve2T, a: &SelmerElement, covering: CoveringModel, f: FTriple, opts: &PairingOptions) -> Result<CoveringData> {
        let places = own_places(e, &covering, &f)?;
        let points = places
            .iter()
            .map(|&v| Ok((v, points_at(&covering, &f, v, opts)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(CoveringData { element: a.clone(), covering, f, places, points })
    }

    /// `<a, a'>` using the `choice`-th certified point at each place.
    pub fn pair(&self, other: &AlgebraClass, choice: usize) -> Result<PairingValue> {
        let mut places: BTreeSet<Place> = self.places.iter().copied().collect();
        for j in 0..3 {
            places.extend(other.component(j).support().into_iter().map(Place::Finite));
        }
        let mut local_terms = BTreeMap::new();
        for v in places {
            let pts = self.points.get(&v).ok_or_else(|| Error::Construction(format!("no certified point at {v}")))?;
            let (_, value) = &pts[choice % pts.len()];
            local_terms.insert(v, algebra_symbol(value, other, v)?);
        }
        let value = local_terms.values().copied().product();
        Ok(PairingValue { value, local_terms })
    }

    /// Recomputes the local term at a place outside the certified set.
    pub fn term_at(&self, other: &AlgebraClass, v: Place, opts: &PairingOptions) -> Result<SymbolValue> {
        let pts = points_at(&self.covering, &self.f, v, opts)?;
        algebra_symbol(&pts[0].1, other, v)
    }

    /// Human-readable certificate for each place.
    pub fn certificates(&self) -> BTreeMap<Place, String> {
        self.points
            .iter()
            .map(|(v, pts)| {
                let (p, _) = &pts[0];
                let text = match &p.certificate {
                    PointCertificate::Rational => format!("rational point {:?}", p.coordinates.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                    PointCertificate::Lifted { x, branches } => {
                        let b: String = branches.iter().map(|&s| if s { '-' } else { '+' }).collect();
                        format!("x = {x}, roots {b}, precision {}", p.precision)
                    }
                };
                (*v, text)
            })
            .collect()
    }
}

/// Places where the local term of `<a, .>` may be nontrivial: the real
/// place, 2, the odd primes of the discriminant, the primes of the constants
/// of `f`, and the odd good primes below [`COUNTING_BOUND`] whose reduction
/// has no unit point.
fn own_places(e: &Curve2T, c: &CoveringModel, f: &FTriple) -> Result<Vec<Place>> {
    let mut s: BTreeSet<Place> = BTreeSet::new();
    s.insert(Place::Real);
    s.extend(e.bad_primes().into_iter().map(Place::Finite));
    for j in 0..3 {
        s.extend(c.d.d(j).support().into_iter().map(Place::Finite));
    }
    s.extend(f.constant_primes()?.into_iter().map(Place::Finite));
    for p in odd_primes_below(COUNTING_BOUND) {
        if !s.contains(&Place::Finite(p)) && !has_unit_point_mod(c, f, p) {
            s.insert(Place::Finite(p));
        }
    }
    Ok(s.into_iter().collect())
}

/// The certified place set for `<a, a'>`: see [`CoveringData`], together
/// with the supports of `a'` and any place where a chosen point gives a
/// non-unit value of `f`.
pub fn relevant_places(
    e: &Curve2T,
    a: &SelmerElement,
    a2: &SelmerElement,
    f: &FTriple,
    points: &BTreeMap<Place, LocalPoint>,
) -> Result<Vec<Place>> {
    let c = make_covering(e, a)?;
    let mut s: BTreeSet<Place> = own_places(e, &c, f)?.into_iter().collect();
    for j in 0..3 {
        s.extend(a2.d(j).support().into_iter().map(Place::Finite));
    }
    for (v, p) in points {
        if let Place::Finite(_) = v {
            let value = evaluate_f(f, p)?;
            if value.0.iter().any(|c| !c.support().is_empty()) {
                s.insert(*v);
            }
        }
    }
    Ok(s.into_iter().collect())
}

/// `<a, a'>` from scratch.
pub fn cassels_pairing(e: &Curve2T, a: &SelmerElement, a2: &SelmerElement, opts: &PairingOptions) -> Result<PairingValue> {
    CoveringData::new(e, a, opts)?.pair(&a2.classes, 0)
}

/// Primes outside the certified set at which the local term is recomputed.
pub fn spot_check_primes(data: &CoveringData, other: &AlgebraClass, count: usize, seed: u64) -> Vec<u64> {
    let mut excluded: BTreeSet<u64> = data.places.iter().filter_map(|v| v.prime()).collect();
    for j in 0..3 {
        excluded.extend(other.component(j).support());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 10_000 {
        tries += 1;
        let p: u64 = rng.gen_range(3..400);
        if is_prime_u64(p) && !excluded.contains(&p) && !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMatrix {
    pub basis: Vec<SelmerElement>,
    /// `entries[i][k] = 1` iff `<a_i, a_k> = -1`.
    pub entries: Vec<Vec<u8>>,
    /// `(i, j, k, holds)` for each sampled check of `<a_i a_j, a_k> = <a_i, a_k> <a_j, a_k>`.
    pub bilinearity: Vec<(usize, usize, usize, bool)>,
    /// `(row, prime, term)` for the audited excluded places.
    pub spot_checks: Vec<(usize, u64, SymbolValue)>,
}

impl PairingMatrix {
    pub fn rank(&self) -> usize {
        let rows: Vec<u64> = self.entries.iter().map(|r| r.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum()).collect();
        f2::rank(&rows)
    }

    pub fn is_alternating(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| self.entries[i][i] == 0 && (0..n).all(|k| self.entries[i][k] == self.entries[k][i]))
    }

    pub fn is_bilinear_on_samples(&self) -> bool {
        self.bilinearity.iter().all(|t| t.3)
    }

    pub fn spot_checks_trivial(&self) -> bool {
        self.spot_checks.iter().all(|t| t.2.is_plus())
    }

    /// Rows of `0`/`1` characters.
    pub fn rows(&self) -> Vec<String> {
        self.entries.iter().map(|r| r.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()).collect()
    }
}

/// Covering data for every basis element.
pub fn basis_data(e: &Curve2T, s: &SelmerGroup, opts: &PairingOptions) -> Result<Vec<CoveringData>> {
    s.basis.par_iter().map(|a| CoveringData::new(e, a, opts)).collect()
}

fn symbol_bit(v: SymbolValue) -> u8 {
    v.bit()
}

/// The Gram matrix of the pairing on the basis of `s`, with sampled
/// bilinearity checks and excluded-place audits.
pub fn pairing_matrix(e: &Curve2T, s: &SelmerGroup, opts: &PairingOptions) -> Result<PairingMatrix> {
    let data = basis_data(e, s, opts)?;
    pairing_matrix_from(e, s, &data, opts)
}

/// [`pairing_matrix`] with precomputed covering data.
pub fn pairing_matrix_from(e: &Curve2T, s: &SelmerGroup, data: &[CoveringData], opts: &PairingOptions) -> Result<PairingMatrix> {
    let n = s.basis.len();
    let mut entries = vec![vec![0u8; n]; n];
    for i in 0..n {
        for k in 0..n {
            entries[i][k] = symbol_bit(data[i].pair(&s.basis[k].classes, 0)?.value);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xb111);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    while pairs.len() > 6 {
        let r = rng.gen_range(0..pairs.len());
        pairs.remove(r);
    }
    let mut bilinearity = Vec::new();
    for (i, j) in pairs {
        let prod = SelmerElement::new(s.basis[i].classes.mul(&s.basis[j].classes), SelmerStatus::Selmer)?;
        let d = CoveringData::new(e, &prod, opts)?;
        for k in 0..n {
            let direct = symbol_bit(d.pair(&s.basis[k].classes, 0)?.value);
            bilinearity.push((i, j, k, direct == entries[i][k] ^ entries[j][k]));
        }
    }
    let mut spot_checks = Vec::new();
    if opts.spot_checks > 0 {
        for (i, d) in data.iter().enumerate() {
            let k = rng.gen_range(0..n);
            let other = &s.basis[k].classes;
            for p in spot_check_primes(d, other, opts.spot_checks, opts.seed.wrapping_add(i as u64)) {
                spot_checks.push((i, p, d.term_at(other, Place::Finite(p), opts)?));
            }
        }
    }
    Ok(PairingMatrix { basis: s.basis.clone(), entries, bilinearity, spot_checks })
}

/// A found point whose image is a new independent Selmer class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointImage {
    pub point: CurvePoint,
    pub image: AlgebraClass,
}

#[derive(Debug, Clone)]
pub struct DescentReport {
    pub curve: Curve2T,
    pub selmer: SelmerGroup,
    pub selmer_dimension: usize,
    pub points_found: usize,
    /// Independent images of non-torsion points, with a point achieving each.
    pub point_images: Vec<PointImage>,
    pub pairing: PairingMatrix,
    pub matrix_rank: usize,
    pub rank_upper_bound: i64,
    pub sha2_lower_bound: usize,
    /// `dim` of the span of all point images minus 2.
    pub rank_lower_bound: i64,
    /// Set if the points found contradict the upper bound.
    pub contradiction: bool,
    pub places_used: Vec<Place>,
    pub certificates: Vec<BTreeMap<Place, String>>,
}

/// Images of `points` independent of each other and of the images of
/// `torsion`, with a point achieving each.
pub fn independent_images(e: &Curve2T, s: &SelmerGroup, torsion: &[CurvePoint], points: &[CurvePoint]) -> Result<Vec<PointImage>> {
    let mut basis = f2::EchelonBasis::new();
    for t in torsion {
        basis.insert(s.space().encode(&descent_map(e, t)?).unwrap());
    }
    let mut out = Vec::new();
    for p in points {
        let img = descent_map(e, p)?;
        let bits = s
            .space()
            .encode(&img)
            .filter(|_| s.contains(&img))
            .ok_or_else(|| Error::Construction(format!("image of {p} is not in the Selmer group")))?;
        if basis.insert(bits) {
            out.push(PointImage { point: p.clone(), image: img });
        }
    }
    Ok(out)
}

/// Full 2-descent followed by the pairing on `S^2`.
pub fn refined_bounds(e: &Curve2T, height_bound: u64, opts: &PairingOptions) -> Result<DescentReport> {
    let s = selmer2(e)?;
    let pts = point_search(e, height_bound);
    let (torsion, free): (Vec<CurvePoint>, Vec<CurvePoint>) = pts.iter().cloned().partition(|p| e.is_torsion(p));
    let torsion_images = independent_images(e, &s, &[], &torsion)?;
    let mut point_images = independent_images(e, &s, &torsion, &free)?;
    point_images.sort_by_key(|pi| pi.image.to_string());
    let images: Vec<AlgebraClass> =
        torsion_images.iter().chain(point_images.iter()).map(|p| p.image.clone()).collect();
    let s = s.with_point_images(&images)?;
    let data = basis_data(e, &s, opts)?;
    let pairing = pairing_matrix_from(e, &s, &data, opts)?;
    let matrix_rank = pairing.rank();
    let selmer_dimension = s.dimension;
    let rank_upper_bound = selmer_dimension as i64 - 2 - matrix_rank as i64;
    let rank_lower_bound = point_images.len() as i64;
    let mut places: BTreeSet<Place> = BTreeSet::new();
    for d in &data {
        places.extend(d.places.iter().copied());
    }
    let certificates = data.iter().map(|d| d.certificates()).collect();
    Ok(DescentReport {
        curve: e.clone(),
        selmer: s,
        selmer_dimension,
        points_found: pts.len(),
        point_images,
        pairing,
        matrix_rank,
        rank_upper_bound,
        sha2_lower_bound: matrix_rank,
        rank_lower_bound,
        contradiction: rank_lower_bound > rank_upper_bound,
        places_used: places.into_iter().collect(),
        certificates,
    })
}

impl DescentReport {
    /// Whether every structural invariant of the report holds.
    pub fn consistent(&self) -> bool {
        let point_rows_zero = self
            .pairing
            .basis
            .iter()
            .zip(&self.pairing.entries)
            .filter(|(b, _)| b.status == SelmerStatus::RationalPointImage)
            .all(|(_, row)| row.iter().all(|&x| x == 0));
        self.pairing.is_alternating()
            && self.matrix_rank % 2 == 0
            && self.pairing.is_bilinear_on_samples()
            && self.pairing.spot_checks_trivial()
            && point_rows_zero
            && !self.contradiction
            && self.rank_upper_bound == self.selmer_dimension as i64 - 2 - self.matrix_rank as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::new_curve;

    #[test]
    fn known_curves() {
        let opts = PairingOptions::default();
        let r = refined_bounds(&new_curve(-1, 0, 1).unwrap(), 1000, &opts).unwrap();
        assert_eq!((r.selmer_dimension, r.matrix_rank, r.rank_upper_bound), (2, 0, 0));
        assert!(r.consistent());
        let r = refined_bounds(&new_curve(-6, 0, 6).unwrap(), 1000, &opts).unwrap();
        assert_eq!((r.selmer_dimension, r.matrix_rank, r.rank_upper_bound), (3, 0, 1));
        assert!(r.consistent(), "{:?}", r.pairing);
    }

    #[test]
    fn identity_places_of_the_congruent_curve() {
        let e = new_curve(-1, 0, 1).unwrap();
        let one = SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage).unwrap();
        let c = make_covering(&e, &one).unwrap();
        let f = construct_f(&c).unwrap();
        let places = relevant_places(&e, &one, &one, &f, &BTreeMap::new()).unwrap();
        assert_eq!(places, vec![Place::Real, Place::Finite(2)], "{:?}", f.constants);
    }
}
