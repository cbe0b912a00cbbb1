//! Homogeneous multi-valued sections in factored form.
//!
//! A nonzero section is `u * prod p_k^{e_k}` with `u` a signed radical of a
//! positive rational, `p_k` normalized irreducible polynomials and `e_k`
//! nonzero rationals. Everything the completion algorithm needs (orders
//! along divisors, root orders, coprime numerator and denominator) is then
//! exponent arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::abelian::GroupElement;
use crate::coxring::{CoxRingError, HomogeneousWitness, MPoly, ToricCoxRing};

/// Trial division gives up beyond this many candidate divisors.
const TRIAL_DIVISION_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SectionError {
    #[error("division by the zero section")]
    DivisionByZeroSection,
    #[error("the zero section raised to a nonpositive power")]
    ZeroToNonpositivePower,
    #[error("operation undefined on the zero section")]
    ZeroSection,
    #[error("even root of a negative scalar")]
    NegativeRadical,
    #[error("zero is not a unit")]
    ZeroScalar,
    #[error("{0} is too large to factor by trial division")]
    ScalarTooLarge(BigInt),
    #[error("constant polynomial used as a factor")]
    ConstantFactor,
    #[error("factor {0} is not normalized (content 1, positive leading coefficient)")]
    NonNormalizedFactor(String),
    #[error("factor {0} is not homogeneous")]
    InhomogeneousFactor(String),
    #[error("sections live in rings with {expected} and {found} variables")]
    VariableCountMismatch { expected: usize, found: usize },
}

/// Prime factorization of a positive integer by trial division.
pub fn factor_integer(n: &BigInt) -> Result<Vec<(BigInt, u32)>, SectionError> {
    assert!(n.is_positive(), "factor_integer needs a positive argument");
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d = BigInt::from(2u32);
    let mut steps = 0u64;
    while &d * &d <= n {
        if steps > TRIAL_DIVISION_LIMIT {
            return Err(SectionError::ScalarTooLarge(n));
        }
        let mut k = 0;
        while n.is_multiple_of(&d) {
            n /= &d;
            k += 1;
        }
        if k > 0 {
            out.push((d.clone(), k));
        }
        d += if d == BigInt::from(2u32) { 1u32 } else { 2u32 };
        steps += 1;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    Ok(out)
}

/// `sign * prod p^{e_p}` over primes `p` with nonzero rational `e_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RadicalScalar {
    negative: bool,
    exponents: BTreeMap<BigInt, BigRational>,
}

impl Default for RadicalScalar {
    fn default() -> Self {
        RadicalScalar::one()
    }
}

impl RadicalScalar {
    pub fn one() -> Self {
        RadicalScalar {
            negative: false,
            exponents: BTreeMap::new(),
        }
    }

    pub fn minus_one() -> Self {
        RadicalScalar {
            negative: true,
            exponents: BTreeMap::new(),
        }
    }

    pub fn from_rational(q: &BigRational) -> Result<Self, SectionError> {
        if q.is_zero() {
            return Err(SectionError::ZeroScalar);
        }
        let mut exponents = BTreeMap::new();
        for (p, k) in factor_integer(&q.numer().abs())? {
            exponents.insert(p, BigRational::from_integer(k.into()));
        }
        for (p, k) in factor_integer(q.denom())? {
            exponents.insert(p, -BigRational::from_integer(k.into()));
        }
        Ok(RadicalScalar {
            negative: q.is_negative(),
            exponents,
        })
    }

    pub fn from_integer(n: i64) -> Result<Self, SectionError> {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    /// `base^exp` for a positive rational base.
    pub fn radical(base: &BigRational, exp: &BigRational) -> Result<Self, SectionError> {
        Self::from_rational(base)?.pow(exp)
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn exponents(&self) -> &BTreeMap<BigInt, BigRational> {
        &self.exponents
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.exponents.is_empty()
    }

    pub fn exponent_of(&self, p: &BigInt) -> BigRational {
        self.exponents.get(p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (p, e) in &other.exponents {
            let entry = exponents.entry(p.clone()).or_insert_with(BigRational::zero);
            *entry += e;
            if entry.is_zero() {
                exponents.remove(p);
            }
        }
        RadicalScalar {
            negative: self.negative != other.negative,
            exponents,
        }
    }

    pub fn inv(&self) -> Self {
        RadicalScalar {
            negative: self.negative,
            exponents: self.exponents.iter().map(|(p, e)| (p.clone(), -e)).collect(),
        }
    }

    /// `self^q`, with the real root for negative scalars. Errors when a
    /// negative scalar is raised to an exponent with even denominator.
    pub fn pow(&self, q: &BigRational) -> Result<Self, SectionError> {
        if q.is_zero() {
            return Ok(RadicalScalar::one());
        }
        let negative = if self.negative {
            if q.denom().is_even() {
                return Err(SectionError::NegativeRadical);
            }
            q.numer().is_odd()
        } else {
            false
        };
        Ok(RadicalScalar {
            negative,
            exponents: self.exponents.iter().map(|(p, e)| (p.clone(), e * q)).collect(),
        })
    }

    /// lcm of exponent denominators.
    pub fn root_order(&self) -> BigInt {
        self.exponents
            .values()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()))
    }

    pub fn is_rational(&self) -> bool {
        self.exponents.values().all(BigRational::is_integer)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if !self.is_rational() {
            return None;
        }
        let mut q = if self.negative {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        for (p, e) in &self.exponents {
            let k = e.to_integer().to_i32().expect("scalar exponent fits in i32");
            q *= num_traits::pow::Pow::pow(BigRational::from_integer(p.clone()), k);
        }
        Some(q)
    }

    /// `(base, r)` with `|self| = base^{1/r}`, `base` rational and `r` minimal.
    pub fn single_base(&self) -> (BigRational, BigInt) {
        let r = self.root_order();
        let pos = RadicalScalar {
            negative: false,
            exponents: self.exponents.clone(),
        };
        let base = pos
            .pow(&BigRational::from_integer(r.clone()))
            .expect("positive")
            .to_rational()
            .expect("integral exponents");
        (base, r)
    }

    /// Splits `self = i * f` with `i` rational (carrying the sign) and `f`
    /// positive with all exponents in `[0, 1)`.
    pub fn split_fractional(&self) -> (BigRational, RadicalScalar) {
        let mut int = RadicalScalar {
            negative: self.negative,
            exponents: BTreeMap::new(),
        };
        let mut frac = RadicalScalar::one();
        for (p, e) in &self.exponents {
            let fl = e.floor();
            let fr = e - &fl;
            if !fl.is_zero() {
                int.exponents.insert(p.clone(), fl);
            }
            if !fr.is_zero() {
                frac.exponents.insert(p.clone(), fr);
            }
        }
        (int.to_rational().expect("integral"), frac)
    }

    /// Absolute value as a float (the positive real branch).
    pub fn abs_f64(&self) -> f64 {
        self.exponents
            .iter()
            .map(|(p, e)| p.to_f64().unwrap_or(f64::INFINITY).powf(e.to_f64().unwrap_or(f64::NAN)))
            .product()
    }
}

impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        if self.exponents.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(p, e)| if e.is_one() { p.to_string() } else { format!("{p}^({e})") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// A factored homogeneous multi-valued section, or zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactoredSection {
    Zero,
    NonZero(Section),
}

/// Nonzero section `unit * prod p^e`; factors sorted by descending leading
/// monomial, exponents nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    nvars: usize,
    unit: RadicalScalar,
    factors: Vec<(MPoly, BigRational)>,
}

impl Section {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn unit(&self) -> &RadicalScalar {
        &self.unit
    }

    pub fn factors(&self) -> &[(MPoly, BigRational)] {
        &self.factors
    }

    pub fn exponent_of(&self, p: &MPoly) -> BigRational {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(BigRational::zero)
    }

    fn build(nvars: usize, unit: RadicalScalar, factors: BTreeMap<FactorKey, BigRational>) -> Self {
        Section {
            nvars,
            unit,
            factors: factors
                .into_iter()
                .filter(|(_, e)| !e.is_zero())
                .map(|(k, e)| (k.0, e))
                .collect(),
        }
    }

    fn factor_map(&self) -> BTreeMap<FactorKey, BigRational> {
        self.factors
            .iter()
            .map(|(p, e)| (FactorKey(p.clone()), e.clone()))
            .collect()
    }
}

/// Orders factors by descending polynomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
struct FactorKey(MPoly);

impl Ord for FactorKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for FactorKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree data of a section: the degree in `Cl (x) Q` and, for integral
/// exponents, the exact class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionDegree {
    pub rational_free: Vec<BigRational>,
    pub exact: Option<GroupElement>,
}

impl FactoredSection {
    pub fn one(nvars: usize) -> Self {
        FactoredSection::NonZero(Section {
            nvars,
            unit: RadicalScalar::one(),
            factors: Vec::new(),
        })
    }

    pub fn scalar(nvars: usize, unit: RadicalScalar) -> Self {
        FactoredSection::NonZero(Section {
            nvars,
            unit,
            factors: Vec::new(),
        })
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        FactoredSection::NonZero(Section {
            nvars,
            unit: RadicalScalar::one(),
            factors: vec![(MPoly::var(nvars, i), BigRational::one())],
        })
    }

    /// `unit * prod p^e`. Factors must be nonconstant and normalized; repeated
    /// factors are merged and zero exponents dropped.
    pub fn new(
        nvars: usize,
        unit: RadicalScalar,
        factors: impl IntoIterator<Item = (MPoly, BigRational)>,
    ) -> Result<Self, SectionError> {
        let mut map: BTreeMap<FactorKey, BigRational> = BTreeMap::new();
        for (p, e) in factors {
            if p.nvars() != nvars {
                return Err(SectionError::VariableCountMismatch {
                    expected: nvars,
                    found: p.nvars(),
                });
            }
            if p.is_zero() || p.is_constant() {
                return Err(SectionError::ConstantFactor);
            }
            if !p.is_normalized() {
                return Err(SectionError::NonNormalizedFactor(p.to_string()));
            }
            *map.entry(FactorKey(p)).or_insert_with(BigRational::zero) += e;
        }
        Ok(FactoredSection::NonZero(Section::build(nvars, unit, map)))
    }

    /// `f^e` for a single normalized factor.
    pub fn power_of(f: &MPoly, e: BigRational) -> Result<Self, SectionError> {
        Self::new(f.nvars(), RadicalScalar::one(), [(f.clone(), e)])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FactoredSection::Zero)
    }

    pub fn as_nonzero(&self) -> Option<&Section> {
        match self {
            FactoredSection::Zero => None,
            FactoredSection::NonZero(s) => Some(s),
        }
    }

    fn nonzero(&self) -> Result<&Section, SectionError> {
        self.as_nonzero().ok_or(SectionError::ZeroSection)
    }

    pub fn is_one(&self) -> bool {
        self.as_nonzero().is_some_and(|s| s.unit.is_one() && s.factors.is_empty())
    }

    fn check_same_ring(a: &Section, b: &Section) -> Result<(), SectionError> {
        if a.nvars != b.nvars {
            return Err(SectionError::VariableCountMismatch {
                expected: a.nvars,
                found: b.nvars,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SectionError> {
        let (a, b) = match (self, other) {
            (FactoredSection::NonZero(a), FactoredSection::NonZero(b)) => (a, b),
            _ => return Ok(FactoredSection::Zero),
        };
        Self::check_same_ring(a, b)?;
        let mut map = a.factor_map();
        for (p, e) in &b.factors {
            *map.entry(FactorKey(p.clone())).or_insert_with(BigRational::zero) += e;
        }
        Ok(FactoredSection::NonZero(Section::build(a.nvars, a.unit.mul(&b.unit), map)))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SectionError> {
        if other.is_zero() {
            return Err(SectionError::DivisionByZeroSection);
        }
        self.mul(&other.pow(&-BigRational::one())?)
    }

    pub fn pow(&self, q: &BigRational) -> Result<Self, SectionError> {
        match self {
            FactoredSection::Zero if q.is_positive() => Ok(FactoredSection::Zero),
            FactoredSection::Zero => Err(SectionError::ZeroToNonpositivePower),
            FactoredSection::NonZero(s) => Ok(FactoredSection::NonZero(Section {
                nvars: s.nvars,
                unit: s.unit.pow(q)?,
                factors: if q.is_zero() {
                    Vec::new()
                } else {
                    s.factors.iter().map(|(p, e)| (p.clone(), e * q)).collect()
                },
            })),
        }
    }

    pub fn pow_int(&self, k: i64) -> Result<Self, SectionError> {
        self.pow(&BigRational::from_integer(k.into()))
    }

    /// Multiplies the unit by a rational scalar.
    pub fn scale(&self, c: &BigRational) -> Result<Self, SectionError> {
        if c.is_zero() {
            return Ok(FactoredSection::Zero);
        }
        self.mul(&FactoredSection::scalar(
            self.as_nonzero().map_or(0, Section::nvars),
            RadicalScalar::from_rational(c)?,
        ))
    }

    /// Minimal `r` such that the `r`-th power is a rational function.
    pub fn root_order(&self) -> Result<BigInt, SectionError> {
        let s = self.nonzero()?;
        Ok(s.factors
            .iter()
            .fold(s.unit.root_order(), |acc, (_, e)| acc.lcm(e.denom())))
    }

    pub fn order_along(&self, p: &MPoly) -> Result<BigRational, SectionError> {
        Ok(self.nonzero()?.exponent_of(p))
    }

    /// All exponents integral and nonnegative, unit rational.
    pub fn is_polynomial(&self) -> bool {
        match self {
            FactoredSection::Zero => true,
            FactoredSection::NonZero(s) => {
                s.unit.is_rational()
                    && s.factors.iter().all(|(_, e)| e.is_integer() && !e.is_negative())
            }
        }
    }

    pub fn section_degree(&self, ring: &ToricCoxRing) -> Result<SectionDegree, SectionError> {
        let s = self.nonzero()?;
        let group = ring.class_group();
        let mut rational_free = vec![BigRational::zero(); group.free_rank()];
        let mut exact = Some(group.zero());
        for (p, e) in &s.factors {
            let d = match ring.homogeneous_degree(p) {
                Ok(HomogeneousWitness::Homogeneous(d)) => d,
                Ok(HomogeneousWitness::Inhomogeneous { .. }) | Err(CoxRingError::ZeroPolynomial) => {
                    return Err(SectionError::InhomogeneousFactor(ring.print(p)))
                }
                Err(_) => unreachable!("homogeneous_degree fails only on zero"),
            };
            for (acc, x) in rational_free.iter_mut().zip(&d.free) {
                *acc += e * BigRational::from_integer(x.clone());
            }
            exact = match (exact, e.is_integer()) {
                (Some(acc), true) => Some(group.add(&acc, &group.scale(&d, &e.to_integer()))),
                _ => None,
            };
        }
        Ok(SectionDegree { rational_free, exact })
    }

    /// `(f, g, r)` with `self^r = f / g`, `r` the root order and `f`, `g`
    /// coprime products of the stored factors (scalar in `f` and `g`).
    pub fn expand(&self) -> Result<(MPoly, MPoly, BigInt), SectionError> {
        let s = self.nonzero()?;
        let r = self.root_order()?;
        let rq = BigRational::from_integer(r.clone());
        let c = s.unit.pow(&rq)?.to_rational().expect("root order clears the unit");
        let mut f = MPoly::constant(s.nvars, BigRational::from_integer(c.numer().clone()));
        let mut g = MPoly::constant(s.nvars, BigRational::from_integer(c.denom().clone()));
        for (p, e) in &s.factors {
            let k = (e * &rq).to_integer();
            let k32 = k.abs().to_u32().expect("exponent fits in u32");
            if k.is_positive() {
                f = &f * &p.pow(k32);
            } else {
                g = &g * &p.pow(k32);
            }
        }
        Ok((f, g, r))
    }

    /// Splits `self = h * gamma` with `h` having integral exponents and
    /// a rational unit, and `gamma` all exponents in `[0, 1)` with positive
    /// unit.
    pub fn split_fractional(&self) -> Result<(FactoredSection, FactoredSection), SectionError> {
        let s = self.nonzero()?;
        let (c, frac_unit) = s.unit.split_fractional();
        let mut int_f = BTreeMap::new();
        let mut frac_f = BTreeMap::new();
        for (p, e) in &s.factors {
            let fl = e.floor();
            let fr = e - &fl;
            int_f.insert(FactorKey(p.clone()), fl);
            frac_f.insert(FactorKey(p.clone()), fr);
        }
        let int_unit = RadicalScalar::from_rational(&c)?;
        Ok((
            FactoredSection::NonZero(Section::build(s.nvars, int_unit, int_f)),
            FactoredSection::NonZero(Section::build(s.nvars, frac_unit, frac_f)),
        ))
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let s = match self {
            FactoredSection::Zero => return "0".to_string(),
            FactoredSection::NonZero(s) => s,
        };
        let mut parts = Vec::new();
        let unit_text = s.unit.to_string();
        match unit_text.as_str() {
            "1" => {}
            "-1" if !s.factors.is_empty() => parts.push("-".to_string()),
            _ => parts.push(unit_text),
        }
        for (p, e) in &s.factors {
            let base = if p.len() == 1 {
                p.to_string_with(names)
            } else {
                format!("({})", p.to_string_with(names))
            };
            let t = if e.is_one() {
                base
            } else if e.is_integer() && e.is_positive() {
                format!("{base}^{e}")
            } else {
                format!("{base}^({e})")
            };
            parts.push(t);
        }
        if parts.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (k, t) in parts.iter().enumerate() {
            if k > 0 && !out.ends_with('-') {
                out.push('*');
            }
            out.push_str(t);
        }
        out
    }
}

impl fmt::Display for FactoredSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.as_nonzero().map_or(0, Section::nvars);
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

/// `gamma * numerator / denominator`: a homogeneous radical with exponents
/// in `[0, 1)` times a rational function.
#[derive(Clone, Debug)]
pub enum PulledBackSection {
    Zero,
    Value {
        radical: FactoredSection,
        numerator: MPoly,
        denominator: MPoly,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PullbackError {
    #[error("terms have different radical parts: {0} and {1}")]
    FractionalPartMismatch(String, String),
    #[error(transparent)]
    Section(#[from] SectionError),
}

impl PulledBackSection {
    /// Sums `c_j * s_j`. All nonzero terms must share one radical part.
    pub fn from_terms(
        nvars: usize,
        terms: &[(BigRational, FactoredSection)],
    ) -> Result<Self, PullbackError> {
        let mut radical: Option<FactoredSection> = None;
        let mut parts = Vec::new();
        for (c, s) in terms {
            if c.is_zero() || s.is_zero() {
                continue;
            }
            let (h, gamma) = s.split_fractional()?;
            match &radical {
                None => radical = Some(gamma),
                Some(r) if *r == gamma => {}
                Some(r) => {
                    return Err(PullbackError::FractionalPartMismatch(r.to_string(), gamma.to_string()))
                }
            }
            parts.push((c.clone(), h));
        }
        let Some(radical) = radical else {
            return Ok(PulledBackSection::Zero);
        };
        // Common denominator: each factor to the largest negative power.
        let mut den_exp: BTreeMap<FactorKey, BigInt> = BTreeMap::new();
        for (_, h) in &parts {
            for (p, e) in h.as_nonzero().expect("nonzero").factors() {
                if e.is_negative() {
                    let k = -e.to_integer();
                    let slot = den_exp.entry(FactorKey(p.clone())).or_insert_with(BigInt::zero);
                    if k > *slot {
                        *slot = k;
                    }
                }
            }
        }
        let mut denominator = MPoly::one(nvars);
        for (p, k) in &den_exp {
            denominator = &denominator * &p.0.pow(k.to_u32().expect("small exponent"));
        }
        let mut numerator = MPoly::zero(nvars);
        for (c, h) in &parts {
            let s = h.as_nonzero().expect("nonzero");
            let mut t = MPoly::constant(nvars, c * s.unit().to_rational().expect("rational unit"));
            let mut exps: BTreeMap<FactorKey, BigInt> = den_exp.clone();
            for (p, e) in s.factors() {
                *exps.entry(FactorKey(p.clone())).or_insert_with(BigInt::zero) += e.to_integer();
            }
            for (p, k) in &exps {
                t = &t * &p.0.pow(k.to_u32().expect("nonnegative after clearing"));
            }
            numerator = &numerator + &t;
        }
        if numerator.is_zero() {
            return Ok(PulledBackSection::Zero);
        }
        Ok(PulledBackSection::Value {
            radical,
            numerator,
            denominator,
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PulledBackSection::Zero)
    }

    /// Product; radical parts are recombined and re-split.
    pub fn mul(&self, other: &Self) -> Result<Self, SectionError> {
        let (
            PulledBackSection::Value {
                radical: r1,
                numerator: n1,
                denominator: d1,
            },
            PulledBackSection::Value {
                radical: r2,
                numerator: n2,
                denominator: d2,
            },
        ) = (self, other)
        else {
            return Ok(PulledBackSection::Zero);
        };
        let (h, radical) = r1.mul(r2)?.split_fractional()?;
        let (f, g, _) = h.expand()?;
        Ok(PulledBackSection::Value {
            radical,
            numerator: &(n1 * n2) * &f,
            denominator: &(d1 * d2) * &g,
        })
    }

    /// Same radical and equal rational functions (cross-multiplied).
    pub fn equals(&self, other: &Self) -> bool {
        match (self, other) {
            (PulledBackSection::Zero, PulledBackSection::Zero) => true,
            (
                PulledBackSection::Value {
                    radical: r1,
                    numerator: n1,
                    denominator: d1,
                },
                PulledBackSection::Value {
                    radical: r2,
                    numerator: n2,
                    denominator: d2,
                },
            ) => r1 == r2 && n1 * d2 == n2 * d1,
            _ => false,
        }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        match self {
            PulledBackSection::Zero => "0".to_string(),
            PulledBackSection::Value {
                radical,
                numerator,
                denominator,
            } => {
                let mut s = format!("({})", numerator.to_string_with(names));
                if *denominator != MPoly::one(denominator.nvars()) {
                    s = format!("{s}/({})", denominator.to_string_with(names));
                }
                if !radical.is_one() {
                    s = format!("{s}*{}", radical.to_string_with(names));
                }
                s
            }
        }
    }
}
