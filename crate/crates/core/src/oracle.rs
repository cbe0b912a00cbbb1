//! Floating point realisation of descriptions.
//!
//! Evaluation enumerates every root branch per factor, so one branch choice
//! is applied consistently across all coordinates. Orbit equality in the
//! target total coordinate space compares vanishing patterns and the values
//! of the characters orthogonal to the pattern cone.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::coxring::{MPoly, ToricCoxRing};
use crate::descriptions::{CharacterMap, CoxDescription};
use crate::fan::{Cone, FanError};
use crate::sections::FactoredSection;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Upper bound on the number of branch assignments enumerated.
pub const MAX_BRANCHES: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("the point is a pole of factor {0}")]
    OnPole(String),
    #[error("the point lies in the irrelevant locus")]
    IrrelevantPoint,
    #[error("point has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} branch assignments exceed the enumeration limit")]
    TooManyBranches(usize),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// All values of a description at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueSet {
    /// Distinct image tuples.
    pub tuples: Vec<Vec<Complex64>>,
    /// Number of branch assignments enumerated.
    pub branch_count: usize,
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm())
}

fn relative_deviation(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// A quantity with branches: a factor polynomial value or a scalar prime.
struct Atom {
    value: Complex64,
    /// lcm of the exponent denominators across all images.
    order: u64,
    /// Exponent per image (zero if absent).
    exps: Vec<BigRational>,
}

fn to_complex_point(xi: &[f64]) -> Vec<Complex64> {
    xi.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// Values of all images at `xi`, one tuple per consistent branch choice.
pub fn evaluate_description(phi: &CoxDescription, xi: &[Complex64], tol: f64) -> Result<ValueSet, OracleError> {
    let n = phi.source().nvars();
    if xi.len() != n {
        return Err(OracleError::DimensionMismatch {
            expected: n,
            found: xi.len(),
        });
    }
    let images = phi.images();
    let mut atoms: Vec<Atom> = Vec::new();
    for p in phi.candidate_divisors() {
        let exps: Vec<BigRational> = images
            .iter()
            .map(|im| im.as_nonzero().map_or_else(BigRational::zero, |s| s.exponent_of(&p)))
            .collect();
        let mut value = p.eval_complex(xi);
        // Cancellation below tol relative to the term sizes is a zero.
        if value.norm() <= tol * term_magnitude(&p, xi) {
            if exps.iter().any(|e| *e < BigRational::zero()) {
                return Err(OracleError::OnPole(phi.source().print(&p)));
            }
            value = Complex64::zero();
        }
        atoms.push(atom(value, exps));
    }
    let mut primes: Vec<BigInt> = images
        .iter()
        .filter_map(FactoredSection::as_nonzero)
        .flat_map(|s| s.unit().exponents().keys().cloned())
        .collect();
    primes.sort();
    primes.dedup();
    for pr in primes {
        let exps = images
            .iter()
            .map(|im| im.as_nonzero().map_or_else(BigRational::zero, |s| s.unit().exponent_of(&pr)))
            .collect();
        atoms.push(atom(Complex64::new(pr.to_f64().unwrap_or(f64::INFINITY), 0.0), exps));
    }
    let branch_count = atoms
        .iter()
        .fold(1usize, |acc, a| acc.saturating_mul(a.order as usize));
    if branch_count > MAX_BRANCHES {
        return Err(OracleError::TooManyBranches(branch_count));
    }
    // Candidate roots per atom.
    let roots: Vec<Vec<Complex64>> = atoms.iter().map(|a| all_roots(a.value, a.order)).collect();
    let mut tuples: Vec<Vec<Complex64>> = Vec::new();
    let mut choice = vec![0usize; atoms.len()];
    for _ in 0..branch_count {
        let tuple: Vec<Complex64> = images
            .iter()
            .enumerate()
            .map(|(i, im)| match im.as_nonzero() {
                None => Complex64::zero(),
                Some(s) => {
                    let mut v = Complex64::new(if s.unit().is_negative() { -1.0 } else { 1.0 }, 0.0);
                    for (k, a) in atoms.iter().enumerate() {
                        let e = &a.exps[i];
                        if e.is_zero() {
                            continue;
                        }
                        let power = (e * BigRational::from_integer(a.order.into()))
                            .to_integer()
                            .to_i32()
                            .expect("exponent fits in i32");
                        v *= roots[k][choice[k]].powi(power);
                    }
                    v
                }
            })
            .collect();
        if !tuples
            .iter()
            .any(|t| t.iter().zip(&tuple).all(|(a, b)| close(*a, *b, tol)))
        {
            tuples.push(tuple);
        }
        // Advance the mixed-radix counter.
        for (k, a) in atoms.iter().enumerate() {
            choice[k] += 1;
            if choice[k] < a.order as usize {
                break;
            }
            choice[k] = 0;
        }
    }
    Ok(ValueSet { tuples, branch_count })
}

fn atom(value: Complex64, exps: Vec<BigRational>) -> Atom {
    let order = exps
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
        .to_u64()
        .expect("root order fits in u64");
    Atom { value, order, exps }
}

fn all_roots(v: Complex64, d: u64) -> Vec<Complex64> {
    if d == 1 {
        return vec![v];
    }
    let principal = if v.norm() == 0.0 {
        Complex64::zero()
    } else {
        v.powf(1.0 / d as f64)
    };
    (0..d)
        .map(|k| principal * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect()
}

/// Evaluates a single-valued section (principal branch for radicals).
pub fn evaluate_section(s: &FactoredSection, xi: &[Complex64]) -> Complex64 {
    let Some(s) = s.as_nonzero() else {
        return Complex64::zero();
    };
    let mut v = Complex64::new(if s.unit().is_negative() { -s.unit().abs_f64() } else { s.unit().abs_f64() }, 0.0);
    for (p, e) in s.factors() {
        let base = p.eval_complex(xi);
        v *= if e.is_integer() {
            base.powi(e.to_integer().to_i32().expect("exponent fits in i32"))
        } else {
            base.powf(e.to_f64().unwrap_or(f64::NAN))
        };
    }
    v
}

/// Zero pattern of a point of the target total coordinate space.
/// Coordinates are only comparable within an orbit, so zeros are exact:
/// evaluation already snaps cancelled factor values to zero.
fn vanishing_pattern(eta: &[Complex64]) -> Cone {
    Cone::new((0..eta.len()).filter(|&i| eta[i].norm() == 0.0))
}

/// `sum |c_m xi^m|` over the terms of `p`.
fn term_magnitude(p: &MPoly, xi: &[Complex64]) -> f64 {
    p.terms()
        .map(|(m, c)| {
            let c = c.to_f64().unwrap_or(f64::INFINITY).abs();
            m.exps()
                .iter()
                .zip(xi)
                .fold(c, |acc, (&e, z)| acc * z.norm().powi(e as i32))
        })
        .sum()
}

/// Values of the Hermite basis characters of `pattern^perp` at `eta`.
pub fn character_values(target: &ToricCoxRing, pattern: &Cone, eta: &[Complex64]) -> Result<Vec<Complex64>, OracleError> {
    let fan = target.fan();
    if !fan.contains_cone(pattern) {
        return Err(OracleError::IrrelevantPoint);
    }
    let basis = fan.orthogonal_character_basis(pattern)?;
    Ok(basis
        .iter()
        .map(|m| {
            let mut v = Complex64::new(1.0, 0.0);
            for (i, z) in eta.iter().enumerate() {
                let k: BigInt = fan.ray(i).iter().zip(m).map(|(&r, x)| x * BigInt::from(r)).sum();
                if !k.is_zero() {
                    v *= z.powi(k.to_i32().expect("pairing fits in i32"));
                }
            }
            v
        })
        .collect())
}

/// Largest relative deviation between the orbit invariants of two points,
/// or `None` when their vanishing patterns differ.
pub fn orbit_deviation(
    target: &ToricCoxRing,
    eta: &[Complex64],
    eta2: &[Complex64],
) -> Result<Option<f64>, OracleError> {
    for p in [eta, eta2] {
        if p.len() != target.nvars() {
            return Err(OracleError::DimensionMismatch {
                expected: target.nvars(),
                found: p.len(),
            });
        }
    }
    let pa = vanishing_pattern(eta);
    let pb = vanishing_pattern(eta2);
    let fan = target.fan();
    if !fan.contains_cone(&pa) || !fan.contains_cone(&pb) {
        return Err(OracleError::IrrelevantPoint);
    }
    if pa != pb {
        return Ok(None);
    }
    let a = character_values(target, &pa, eta)?;
    let b = character_values(target, &pb, eta2)?;
    Ok(Some(
        a.iter()
            .zip(&b)
            .map(|(x, y)| relative_deviation(*x, *y))
            .fold(0.0, f64::max),
    ))
}

/// Whether two points lie in one orbit of the characteristic quasitorus.
pub fn orbit_equal(target: &ToricCoxRing, eta: &[Complex64], eta2: &[Complex64], tol: f64) -> Result<bool, OracleError> {
    Ok(orbit_deviation(target, eta, eta2)?.is_some_and(|d| d <= tol))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleReport {
    pub samples: usize,
    pub failures: usize,
    /// Points skipped because they hit a pole or the irrelevant locus.
    pub skipped: usize,
    pub max_deviation: f64,
    pub first_failure: Option<String>,
}

/// A random point with rational coordinates in `[1, 10]`.
pub fn random_point(rng: &mut impl Rng, n: usize) -> Vec<BigRational> {
    (0..n)
        .map(|_| {
            let q: i64 = rng.gen_range(1..=16);
            let p: i64 = rng.gen_range(q..=10 * q);
            BigRational::new(p.into(), q.into())
        })
        .collect()
}

fn to_f64_point(p: &[BigRational]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Randomised cross-check of the homogeneity conditions: at each sample
/// point all branches must lie in one orbit, scaling the point by the free
/// part of the source quasitorus must keep the image orbit, and (given a
/// reference) character values must match.
pub fn sample_agreement(
    phi: &CoxDescription,
    n: usize,
    seed: u64,
    tol: f64,
    reference: Option<&CharacterMap>,
) -> SampleReport {
    let mut report = SampleReport::default();
    let nvars = phi.source().nvars();
    let weights: Vec<Vec<f64>> = phi
        .source()
        .degrees()
        .iter()
        .map(|d| d.free.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
        .collect();
    let free_rank = phi.source().class_group().free_rank();
    for k in 0..n {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let xi = to_complex_point(&to_f64_point(&random_point(&mut rng, nvars)));
        let lambdas: Vec<f64> = (0..free_rank)
            .map(|_| {
                let q: i64 = rng.gen_range(2..=9);
                let p: i64 = rng.gen_range(q / 2 + 1..=2 * q);
                p as f64 / q as f64
            })
            .collect();
        let scaled: Vec<Complex64> = xi
            .iter()
            .zip(&weights)
            .map(|(z, w)| {
                let f: f64 = w.iter().zip(&lambdas).map(|(e, l)| l.powf(*e)).product();
                z * f
            })
            .collect();
        report.samples += 1;
        match sample_once(phi, &xi, &scaled, tol, reference) {
            Ok(dev) => {
                report.max_deviation = report.max_deviation.max(dev);
                if dev > tol {
                    report.failures += 1;
                    report.first_failure.get_or_insert_with(|| {
                        format!("sample {k}: relative deviation {dev:e} exceeds {tol:e}")
                    });
                }
            }
            Err(SampleIssue::Skip) => report.skipped += 1,
            Err(SampleIssue::Fail(msg)) => {
                report.failures += 1;
                report.first_failure.get_or_insert_with(|| format!("sample {k}: {msg}"));
            }
        }
    }
    report
}

enum SampleIssue {
    Skip,
    Fail(String),
}

fn sample_once(
    phi: &CoxDescription,
    xi: &[Complex64],
    scaled: &[Complex64],
    tol: f64,
    reference: Option<&CharacterMap>,
) -> Result<f64, SampleIssue> {
    let target = phi.target();
    let values = match evaluate_description(phi, xi, tol) {
        Ok(v) => v,
        Err(OracleError::OnPole(_)) => return Err(SampleIssue::Skip),
        Err(e) => return Err(SampleIssue::Fail(e.to_string())),
    };
    let first = &values.tuples[0];
    let mut dev: f64 = 0.0;
    let mut compare = |a: &[Complex64], b: &[Complex64], what: &str| -> Result<(), SampleIssue> {
        match orbit_deviation(target, a, b) {
            Ok(Some(d)) => {
                dev = dev.max(d);
                Ok(())
            }
            Ok(None) => Err(SampleIssue::Fail(format!("{what}: vanishing patterns differ"))),
            Err(OracleError::IrrelevantPoint) => Err(SampleIssue::Skip),
            Err(e) => Err(SampleIssue::Fail(e.to_string())),
        }
    };
    for t in &values.tuples[1..] {
        compare(first, t, "branches")?;
    }
    match evaluate_description(phi, scaled, tol) {
        Ok(v) => compare(first, &v.tuples[0], "scaled point")?,
        Err(OracleError::OnPole(_)) => return Err(SampleIssue::Skip),
        Err(e) => return Err(SampleIssue::Fail(e.to_string())),
    }
    if let Some(cm) = reference {
        let fan = target.fan();
        for (m, value) in cm.basis.iter().zip(&cm.values) {
            let mut image = Complex64::new(1.0, 0.0);
            for (i, z) in first.iter().enumerate() {
                let k: BigInt = fan.ray(i).iter().zip(m).map(|(&r, x)| x * BigInt::from(r)).sum();
                if !k.is_zero() {
                    image *= z.powi(k.to_i32().expect("pairing fits in i32"));
                }
            }
            dev = dev.max(relative_deviation(image, evaluate_section(value, xi)));
        }
    }
    Ok(dev)
}
