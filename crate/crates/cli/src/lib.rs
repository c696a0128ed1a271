//! Configuration, report serialization and the property suite behind the
//! `ctpair` command.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ctpair_core::arith::{ratio, Rational};
use ctpair_core::covering::{construct_f, delta_f_consistency, make_covering, second_covering};
use ctpair_core::descent::{descent_map, point_search, Curve2T, CurvePoint, SelmerElement, SelmerStatus};
use ctpair_core::local::{hilbert_symbol, reciprocity_check_with, solvability_oracle_auto};
use ctpair_core::pairing::{basis_data, refined_bounds, DescentReport, PairingOptions};
use ctpair_core::{AlgebraClass, Error, Place, SymbolValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DEFAULT_HEIGHT_BOUND: u64 = 10_000;

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    InvalidInput = 1,
    PrecisionExhausted = 2,
    InvariantFailed = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of_error(err: &Error) -> Status {
        if err.is_indeterminate() {
            Status::PrecisionExhausted
        } else {
            Status::InvalidInput
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSpec {
    Roots([i64; 3]),
    /// `y^2 = x(x - a)(x + b)`.
    Ab(i64, i64),
}

impl CurveSpec {
    pub fn curve(&self) -> ctpair_core::Result<Curve2T> {
        match *self {
            CurveSpec::Roots(r) => Curve2T::new(r),
            CurveSpec::Ab(a, b) => Curve2T::from_ab(a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Faults the property suite can be asked to plant, to show it catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip every real Hilbert symbol.
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub curve: CurveSpec,
    pub height_bound: u64,
    pub precision: Option<u32>,
    pub format: Format,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl RunConfig {
    pub fn new(curve: CurveSpec) -> Self {
        RunConfig { curve, height_bound: DEFAULT_HEIGHT_BOUND, precision: None, format: Format::Text, seed: 0, fault: None }
    }

    pub fn validate(&self) -> ctpair_core::Result<Curve2T> {
        if self.height_bound == 0 {
            return Err(Error::Invalid("height bound must be at least 1".into()));
        }
        if self.precision == Some(0) {
            return Err(Error::Invalid("precision must be at least 1".into()));
        }
        self.curve.curve()
    }

    pub fn options(&self) -> PairingOptions {
        PairingOptions { seed: self.seed, precision: self.precision, ..PairingOptions::default() }
    }
}

/// Parses `a,b,...` into exactly `N` integers.
pub fn parse_list<const N: usize>(s: &str) -> Result<[i64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated integers, got {:?}", s));
    }
    let mut out = [0i64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("{p:?} is not an integer"))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CurveJson {
    pub roots: [i64; 3],
    /// `[a2, a4, a6]` of `y^2 = x^3 + a2 x^2 + a4 x + a6`.
    pub coefficients: [String; 3],
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PointImageJson {
    pub point: [String; 2],
    pub image: [String; 3],
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SecondCoveringJson {
    pub element: [String; 3],
    pub variables: Vec<String>,
    pub equations: Vec<String>,
}

/// The serialized descent report.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ReportJson {
    pub curve: CurveJson,
    pub discriminant: String,
    pub selmer_basis: Vec<[String; 3]>,
    pub selmer_dimension: usize,
    pub point_images: Vec<PointImageJson>,
    pub pairing_matrix: Vec<String>,
    pub matrix_rank: usize,
    pub rank_upper_bound: i64,
    pub sha2_lower_bound: usize,
    pub places_used: Vec<String>,
    pub certificates: Vec<BTreeMap<String, String>>,
    pub points_found: usize,
    pub rank_lower_bound: i64,
    pub consistent: bool,
    pub second_coverings: Vec<SecondCoveringJson>,
}

fn classes(c: &AlgebraClass) -> [String; 3] {
    [0, 1, 2].map(|j| c.component(j).rep().to_string())
}

fn place_name(v: Place) -> String {
    match v {
        Place::Real => "real".into(),
        Place::Finite(p) => p.to_string(),
    }
}

fn point_coords(p: &CurvePoint) -> [String; 2] {
    match p {
        CurvePoint::Infinity => ["inf".into(), "inf".into()],
        CurvePoint::Affine { x, y } => [x.to_string(), y.to_string()],
    }
}

impl ReportJson {
    pub fn from_report(r: &DescentReport) -> ctpair_core::Result<ReportJson> {
        let e = &r.curve;
        let second_coverings = r
            .selmer
            .basis
            .iter()
            .map(|d| {
                let c = make_covering(e, d)?;
                let sys = second_covering(&c, &construct_f(&c)?);
                Ok(SecondCoveringJson { element: classes(&d.classes), variables: sys.variables, equations: sys.equations })
            })
            .collect::<ctpair_core::Result<_>>()?;
        Ok(ReportJson {
            curve: CurveJson { roots: e.roots(), coefficients: e.coefficients().map(|c| c.to_string()) },
            discriminant: e.discriminant().to_string(),
            selmer_basis: r.selmer.basis.iter().map(|d| classes(&d.classes)).collect(),
            selmer_dimension: r.selmer_dimension,
            point_images: r
                .point_images
                .iter()
                .map(|p| PointImageJson { point: point_coords(&p.point), image: classes(&p.image) })
                .collect(),
            pairing_matrix: r.pairing.rows(),
            matrix_rank: r.matrix_rank,
            rank_upper_bound: r.rank_upper_bound,
            sha2_lower_bound: r.sha2_lower_bound,
            places_used: r.places_used.iter().map(|&v| place_name(v)).collect(),
            certificates: r
                .certificates
                .iter()
                .map(|m| m.iter().map(|(v, c)| (place_name(*v), c.clone())).collect())
                .collect(),
            points_found: r.points_found,
            rank_lower_bound: r.rank_lower_bound,
            consistent: r.consistent(),
            second_coverings,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let factors: String = self
            .curve
            .roots
            .iter()
            .map(|&r| match r {
                0 => "x".to_string(),
                r if r < 0 => format!("(x + {})", -r),
                r => format!("(x - {r})"),
            })
            .collect();
        let _ = writeln!(s, "curve: y^2 = {factors}");
        let _ = writeln!(s, "discriminant: {}", self.discriminant);
        let _ = writeln!(s, "2-Selmer dimension: {}", self.selmer_dimension);
        for (b, row) in self.selmer_basis.iter().zip(&self.pairing_matrix) {
            let _ = writeln!(s, "  ({}, {}, {})  {row}", b[0], b[1], b[2]);
        }
        let _ = writeln!(s, "pairing matrix rank: {}", self.matrix_rank);
        let _ = writeln!(s, "rank upper bound: {}", self.rank_upper_bound);
        let _ = writeln!(s, "Sha[2] lower bound (F2 dimension): {}", self.sha2_lower_bound);
        let _ = writeln!(s, "points found: {} ({} independent non-torsion)", self.points_found, self.rank_lower_bound);
        for p in &self.point_images {
            let _ = writeln!(s, "  ({}, {}) -> ({})", p.point[0], p.point[1], p.image.join(", "));
        }
        let _ = writeln!(s, "places used: {}", self.places_used.join(" "));
        let _ = writeln!(s, "consistent: {}", self.consistent);
        s
    }
}

/// Runs the descent and the pairing and serializes the result.
pub fn run(config: &RunConfig) -> ctpair_core::Result<ReportJson> {
    let e = config.validate()?;
    let report = refined_bounds(&e, config.height_bound, &config.options())?;
    ReportJson::from_report(&report)
}

pub fn render(report: &ReportJson, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Text => report.to_text(),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerifyReport {
    pub curve: [i64; 3],
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        s
    }
}

fn random_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    loop {
        let n = rng.gen_range(-bound..=bound);
        if n != 0 {
            return ratio(n, rng.gen_range(1..=bound));
        }
    }
}

fn symbol(fault: Option<Fault>) -> impl Fn(&Rational, &Rational, Place) -> ctpair_core::Result<SymbolValue> {
    move |a, b, v| {
        let s = hilbert_symbol(a, b, v)?;
        Ok(match (fault, v) {
            (Some(Fault::Symbol), Place::Real) => s * SymbolValue::Minus,
            _ => s,
        })
    }
}

fn check_reciprocity(config: &RunConfig, rng: &mut ChaCha8Rng) -> ctpair_core::Result<Check> {
    let sym = symbol(config.fault);
    let mut failures = 0;
    for _ in 0..200 {
        let a = random_rational(rng, 10_000);
        let b = random_rational(rng, 10_000);
        if !reciprocity_check_with(&a, &b, &sym)?.is_plus() {
            failures += 1;
        }
    }
    Ok(Check { name: "reciprocity".into(), passed: failures == 0, detail: format!("{failures} of 200 random pairs violate the product formula") })
}

fn check_oracle(config: &RunConfig, rng: &mut ChaCha8Rng, e: &Curve2T) -> ctpair_core::Result<Check> {
    let sym = symbol(config.fault);
    let mut primes: Vec<u64> = (2..=50).filter(|&p| ctpair_core::arith::is_prime_u64(p)).collect();
    primes.extend(e.bad_primes().into_iter().filter(|p| *p > 50));
    let mut mismatches = 0;
    let mut total = 0;
    for _ in 0..20 {
        let a = random_rational(rng, 1000);
        let b = random_rational(rng, 1000);
        for &p in &primes {
            total += 1;
            let v = Place::Finite(p);
            if sym(&a, &b, v)? != solvability_oracle_auto(&a, &b, v)? {
                mismatches += 1;
            }
        }
    }
    Ok(Check { name: "oracle equivalence".into(), passed: mismatches == 0, detail: format!("{mismatches} of {total} symbols disagree with the search oracle") })
}

/// Runs the invariant suites on the configured curve.
pub fn verify(config: &RunConfig) -> ctpair_core::Result<VerifyReport> {
    let e = config.validate()?;
    let opts = config.options();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = vec![check_reciprocity(config, &mut rng)?, check_oracle(config, &mut rng, &e)?];

    let report = refined_bounds(&e, config.height_bound, &opts)?;
    let m = &report.pairing;
    let n = m.basis.len();
    checks.push(Check {
        name: "alternating".into(),
        passed: m.is_alternating() && m.rank() % 2 == 0,
        detail: format!("zero diagonal, symmetric, rank {} on dimension {n}", m.rank()),
    });
    checks.push(Check {
        name: "bilinear".into(),
        passed: m.is_bilinear_on_samples(),
        detail: format!("{} sampled triples", m.bilinearity.len()),
    });
    let data = basis_data(&e, &report.selmer, &opts)?;
    let mut differing = 0;
    for d in &data {
        for b in &report.selmer.basis {
            let values: Vec<SymbolValue> = (0..3).map(|k| d.pair(&b.classes, k).map(|v| v.value)).collect::<ctpair_core::Result<_>>()?;
            if values.iter().any(|&v| v != values[0]) {
                differing += 1;
            }
        }
    }
    checks.push(Check {
        name: "point independence".into(),
        passed: differing == 0,
        detail: format!("{differing} of {} basis pairings change across 3 local point choices", n * n),
    });
    checks.push(Check {
        name: "excluded places".into(),
        passed: m.spot_checks_trivial(),
        detail: format!("{} local terms at excluded primes", m.spot_checks.len()),
    });

    let one = SelmerElement::from_pair(1, 1, SelmerStatus::RationalPointImage)?;
    let f = construct_f(&make_covering(&e, &one)?)?;
    let mut pts = vec![CurvePoint::Infinity];
    pts.extend(e.torsion_points());
    pts.extend(point_search(&e, config.height_bound.min(DEFAULT_HEIGHT_BOUND)).into_iter().filter(|p| !e.is_torsion_2(p)).take(12));
    let verdicts = delta_f_consistency(&e, &f, &pts)?;
    let evaluated: Vec<&(CurvePoint, Option<bool>)> = verdicts.iter().filter(|v| v.1.is_some()).collect();
    let bad: Vec<String> = evaluated.iter().filter(|v| v.1 == Some(false)).map(|v| v.0.to_string()).collect();
    let shown: Vec<String> = evaluated.iter().map(|v| v.0.to_string()).collect();
    checks.push(Check {
        name: "delta=f consistency".into(),
        passed: bad.is_empty() && !evaluated.is_empty(),
        detail: if bad.is_empty() {
            format!("f matches the descent map at {}", shown.join(" "))
        } else {
            format!("mismatch at {}", bad.join(" "))
        },
    });

    let mut kernel_ok = true;
    for p in &pts {
        let img = descent_map(&e, p)?;
        let coords = report.selmer.coordinates(&img);
        let Some(coords) = coords else {
            kernel_ok = false;
            continue;
        };
        for k in 0..n {
            let mut bit = 0u8;
            for i in 0..n {
                if coords >> i & 1 == 1 {
                    bit ^= m.entries[i][k];
                }
            }
            kernel_ok &= bit == 0;
        }
    }
    checks.push(Check {
        name: "kernel soundness".into(),
        passed: kernel_ok && report.consistent(),
        detail: format!(
            "{} point images pair trivially; rank bound {} with {} independent points",
            pts.len(),
            report.rank_upper_bound,
            report.rank_lower_bound
        ),
    });
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { curve: e.roots(), checks, passed })
}

pub fn render_verify(report: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        Format::Text => report.to_text(),
    }
}
