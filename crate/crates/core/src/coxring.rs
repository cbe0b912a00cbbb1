//! Cox rings of toric varieties: sparse multigraded polynomials over Q.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::abelian::{cokernel, FGAbelianGroup, GroupElement};
use crate::fan::Fan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxRingError {
    #[error("variable name `{0}` is used twice")]
    NameCollision(String),
    #[error("`{0}` is not a valid variable name")]
    InvalidName(String),
    #[error("{names} names given for {rays} rays")]
    NameCountMismatch { names: usize, rays: usize },
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("syntax error at offset {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown variable `{name}` at offset {position}")]
    UnknownVariable { name: String, position: usize },
}

/// Exponent vector. Ordered degree-lexicographically with `x0 > x1 > ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other)
            .then(|| Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with rational coefficients in a fixed number of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        MPoly::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        MPoly::monomial(Monomial::var(nvars, i), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let nvars = m.nvars();
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().is_some_and(Monomial::is_one)
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (k, x) in &self.terms {
            out.terms.insert(k.mul(m), x * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Splits `self = c * p` with `p` having coprime integer coefficients
    /// and a positive leading coefficient.
    pub fn normalize(&self) -> (BigRational, MPoly) {
        if self.is_zero() {
            return (BigRational::zero(), self.clone());
        }
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c * &den).to_integer()));
        let mut content = BigRational::new(num, den);
        if self.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    pub fn is_normalized(&self) -> bool {
        !self.is_zero() && self.normalize().0.is_one()
    }

    /// Componentwise minimum of exponents over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut min = vec![u32::MAX; self.nvars];
        for m in self.terms.keys() {
            for (a, &b) in min.iter_mut().zip(&m.0) {
                *a = (*a).min(b);
            }
        }
        if self.is_zero() {
            min = vec![0; self.nvars];
        }
        Monomial(min)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (z, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= z.powu(e);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (z, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(z.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Variables that occur in some term.
    pub fn support_variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Canonical text in the given variable names, e.g. `3*x0^2*x1 - 2*x2^3`.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mut factors = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl Ord for MPoly {
    /// Compares term lists in descending monomial order, then coefficients.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms();
        let mut b = other.terms();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }
}

impl PartialOrd for MPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_string_with(&names))
    }
}

impl std::ops::Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl std::ops::Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-BigRational::one())
    }
}

impl std::ops::Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

/// `q` with `f = q * g`, or `None` when `g` does not divide `f`.
///
/// Repeatedly cancels the leading term; since leading monomials multiply,
/// a divisor's leading monomial must divide the current remainder's.
pub fn exact_divide(f: &MPoly, g: &MPoly) -> Result<Option<MPoly>, CoxRingError> {
    let (lg, cg) = g.leading_term().ok_or(CoxRingError::DivisionByZeroPolynomial)?;
    let mut rem = f.clone();
    let mut q = MPoly::zero(f.nvars);
    while let Some((lr, cr)) = rem.leading_term() {
        let Some(m) = lg.quotient_of(lr) else {
            return Ok(None);
        };
        let c = cr / cg;
        rem = &rem - &g.mul_monomial(&m, &c);
        q.add_term(m, c);
    }
    Ok(Some(q))
}

/// Largest `k` with `p^k | f`.
pub fn order_along(f: &MPoly, p: &MPoly) -> Result<u32, CoxRingError> {
    if f.is_zero() {
        return Err(CoxRingError::ZeroPolynomial);
    }
    assert!(!p.is_zero() && !p.is_constant(), "order along a constant");
    let mut k = 0;
    let mut cur = f.clone();
    while let Some(q) = exact_divide(&cur, p)? {
        cur = q;
        k += 1;
    }
    Ok(k)
}

/// Either a degree or two monomials of distinct degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomogeneousWitness {
    Homogeneous(GroupElement),
    Inhomogeneous {
        first: (Monomial, GroupElement),
        second: (Monomial, GroupElement),
    },
}

impl HomogeneousWitness {
    pub fn degree(&self) -> Option<&GroupElement> {
        match self {
            HomogeneousWitness::Homogeneous(d) => Some(d),
            HomogeneousWitness::Inhomogeneous { .. } => None,
        }
    }
}

/// The Cox ring of a toric variety, graded by the class group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricCoxRing {
    fan: Fan,
    names: Vec<String>,
    class_group: FGAbelianGroup,
    degrees: Vec<GroupElement>,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn build_cox_ring(fan: Fan, names: Vec<String>) -> Result<ToricCoxRing, CoxRingError> {
    if names.len() != fan.n_rays() {
        return Err(CoxRingError::NameCountMismatch {
            names: names.len(),
            rays: fan.n_rays(),
        });
    }
    for (i, n) in names.iter().enumerate() {
        if !is_identifier(n) {
            return Err(CoxRingError::InvalidName(n.clone()));
        }
        if names[..i].contains(n) {
            return Err(CoxRingError::NameCollision(n.clone()));
        }
    }
    let class_group = cokernel(&fan.pairing_matrix());
    let degrees = (0..fan.n_rays()).map(|i| class_group.basis_image(i)).collect();
    Ok(ToricCoxRing {
        fan,
        names,
        class_group,
        degrees,
    })
}

impl ToricCoxRing {
    /// Ring with variables `prefix0, prefix1, ...`.
    pub fn with_prefix(fan: Fan, prefix: &str) -> Result<Self, CoxRingError> {
        let names = (0..fan.n_rays()).map(|i| format!("{prefix}{i}")).collect();
        build_cox_ring(fan, names)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn class_group(&self) -> &FGAbelianGroup {
        &self.class_group
    }

    pub fn degrees(&self) -> &[GroupElement] {
        &self.degrees
    }

    pub fn var(&self, i: usize) -> MPoly {
        MPoly::var(self.nvars(), i)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> GroupElement {
        let e: Vec<BigInt> = m.exps().iter().map(|&x| BigInt::from(x)).collect();
        self.class_group.image(&e)
    }

    pub fn homogeneous_degree(&self, f: &MPoly) -> Result<HomogeneousWitness, CoxRingError> {
        let mut it = f.terms();
        let (m0, _) = it.next().ok_or(CoxRingError::ZeroPolynomial)?;
        let d0 = self.monomial_degree(m0);
        for (m, _) in it {
            let d = self.monomial_degree(m);
            if d != d0 {
                return Ok(HomogeneousWitness::Inhomogeneous {
                    first: (m0.clone(), d0),
                    second: (m.clone(), d),
                });
            }
        }
        Ok(HomogeneousWitness::Homogeneous(d0))
    }

    pub fn parse(&self, text: &str) -> Result<MPoly, CoxRingError> {
        parse_poly(&self.names, text)
    }

    pub fn print(&self, f: &MPoly) -> String {
        f.to_string_with(&self.names)
    }

    pub fn print_monomial(&self, m: &Monomial) -> String {
        self.print(&MPoly::monomial(m.clone(), BigRational::one()))
    }
}

/// Parses `text` over the grammar
///
/// ```text
/// expr   := ['+'|'-'] term (('+'|'-') term)*
/// term   := factor ('*' factor)*
/// factor := atom ['^' natural]
/// atom   := number ['/' number] | name | '(' expr ')'
/// ```
pub fn parse_poly(names: &[String], text: &str) -> Result<MPoly, CoxRingError> {
    let mut p = Parser {
        names,
        src: text.as_bytes(),
        pos: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    names: &'a [String],
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> CoxRingError {
        CoxRingError::SyntaxError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MPoly, CoxRingError> {
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, CoxRingError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly, CoxRingError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                self.pos = start;
                return Err(self.error("exponent must be a nonnegative integer"));
            }
            let e: u32 = digits.parse().map_err(|_| CoxRingError::SyntaxError {
                position: start,
                message: "exponent too large".to_string(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<MPoly, CoxRingError> {
        let n = self.names.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.digits().parse().expect("digits");
                let mut den = BigInt::one();
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let d = self.digits();
                    if d.is_empty() {
                        return Err(self.error("expected denominator"));
                    }
                    den = d.parse().expect("digits");
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                }
                Ok(MPoly::constant(n, BigRational::new(num, den)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                match self.names.iter().position(|x| *x == name) {
                    Some(i) => Ok(MPoly::var(n, i)),
                    None => Err(CoxRingError::UnknownVariable {
                        name,
                        position: start,
                    }),
                }
            }
            Some(_) => Err(self.error("expected a number, variable or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
