//! Cox descriptions of rational maps `X --> Y` between toric varieties.
//!
//! A [`CoxDescription`] sends each Cox variable `y_i` of the target to a
//! factored multi-valued section on the source. This module checks the
//! zero-cone, homogeneity and relevance conditions, pulls back target
//! polynomials, builds descriptions from character data and completes a
//! description divisor by divisor.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::{hermite_basis, solve_rational, GroupElement, IntMatrix, RationalVector};
use crate::coxring::{exact_divide, CoxRingError, HomogeneousWitness, MPoly, ToricCoxRing};
use crate::fan::{is_nonnegative, Cone, FanError, StarFan};
use crate::sections::{FactoredSection, PullbackError, PulledBackSection, RadicalScalar, SectionError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescriptionError {
    #[error("expected {expected} images, found {found}")]
    ImageCountMismatch { expected: usize, found: usize },
    #[error("image {index} lives in a ring with {found} variables, source has {expected}")]
    RingMismatch { index: usize, expected: usize, found: usize },
    #[error("the rays {0:?} with zero image do not span a cone of the target fan")]
    ZeroConeNotInFan(Vec<usize>),
    #[error("factor {0} is not homogeneous")]
    InhomogeneousFactor(String),
    #[error("pullback terms have different radical parts {0} and {1}")]
    FractionalPartMismatch(String, String),
    #[error("character data is inconsistent for {atom}")]
    InconsistentCharacterData { atom: String },
    #[error("character signs need a square root of -1")]
    UnrepresentableSign,
    #[error("the characters do not form a basis of the orthogonal lattice of the cone")]
    InvalidCharacterBasis,
    #[error("character value {index} is not a single-valued section of degree zero: {reason}")]
    InvalidCharacterValue { index: usize, reason: String },
    #[error("twist vector is not in the kernel of L")]
    NotInKernel,
    #[error("twist vector has {found} entries, expected {expected}")]
    TwistLength { expected: usize, found: usize },
    #[error("divisor polynomial {0} must be nonconstant and normalized")]
    NonNormalizedDivisor(String),
    #[error("L(mu) = {l_mu} is not integral along {f}")]
    NonIntegralL { f: String, l_mu: String },
    #[error("divisor {0} does not need modification")]
    NotModifiable(String),
    #[error("completion did not stabilise within {0} passes")]
    NonTermination(usize),
    #[error("description is not complete along {0}")]
    IncompleteDescription(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    CoxRing(#[from] CoxRingError),
    #[error(transparent)]
    Section(#[from] SectionError),
}

impl From<PullbackError> for DescriptionError {
    fn from(e: PullbackError) -> Self {
        match e {
            PullbackError::FractionalPartMismatch(a, b) => DescriptionError::FractionalPartMismatch(a, b),
            PullbackError::Section(s) => DescriptionError::Section(s),
        }
    }
}

/// Images of a basis of `sigma^perp` in `M_Y` as sections on the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterMap {
    pub sigma: Cone,
    pub basis: Vec<Vec<BigInt>>,
    pub values: Vec<FactoredSection>,
}

/// Why a character did not pull back to a rational function of degree 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomogeneityDefect {
    /// The pullback needs an `r`-th root, `r > 1`.
    NotSingleValued { root_order: BigInt },
    NonzeroDegree { degree: GroupElement },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityFailure {
    pub character: Vec<BigInt>,
    pub value: FactoredSection,
    pub defect: HomogeneityDefect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomogeneityReport {
    Pass(CharacterMap),
    Fail(HomogeneityFailure),
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        matches!(self, HomogeneityReport::Pass(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorStatus {
    /// Zero patterns of the images along `f` are relevant: `witness` is a
    /// maximal cone containing them.
    Agrees { witness: Cone },
    /// `L(mu)` lies outside the support of the star fan.
    NonRegularMapLocus,
    /// `tau` is a cone of the quotient fan, `tau_y` a star cone mapping onto
    /// it, `mu_prime >= 0` supported on `tau_y` with `L(mu_prime) = L(mu)`.
    NeedsModification {
        tau: Cone,
        tau_y: Cone,
        mu_prime: RationalVector,
    },
}

impl DivisorStatus {
    pub fn name(&self) -> &'static str {
        match self {
            DivisorStatus::Agrees { .. } => "Agrees",
            DivisorStatus::NonRegularMapLocus => "NonRegularMapLocus",
            DivisorStatus::NeedsModification { .. } => "NeedsModification",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorDiagnosis {
    pub f: MPoly,
    pub mu: RationalVector,
    pub l_mu: RationalVector,
    pub status: DivisorStatus,
}

/// Per-divisor outcome of [`CoxDescription::complete`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorReport {
    pub f: MPoly,
    /// Diagnosis before any modification.
    pub initial: DivisorDiagnosis,
    /// Diagnosis of the returned description.
    pub last: DivisorDiagnosis,
    pub modified: bool,
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub description: CoxDescription,
    pub divisors: Vec<DivisorReport>,
    pub passes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    /// Divisors along which the map is not regular.
    pub non_regular_divisors: Vec<MPoly>,
    /// Minimal vanishing patterns (sets of factors set to zero) where the
    /// images become irrelevant while the source point is relevant.
    pub patterns: Vec<Vec<MPoly>>,
    /// Whether every image has nonnegative exponents.
    pub nonnegative_exponents: bool,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.non_regular_divisors.is_empty() && self.patterns.is_empty()
    }
}

/// Problems found by [`CoxDescription::factor_sanity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorIssue {
    /// A monomial factor other than a single variable.
    NonVariableMonomial(MPoly),
    /// A multi-term factor divisible by a variable.
    VariableContent(MPoly),
    /// A factor divisible by another stored factor.
    DivisibleBy { factor: MPoly, divisor: MPoly },
}

/// A multi-valued map between total coordinate spaces.
#[derive(Clone, Debug)]
pub struct CoxDescription {
    source: Arc<ToricCoxRing>,
    target: Arc<ToricCoxRing>,
    images: Vec<FactoredSection>,
    zero_set: Vec<usize>,
    sigma: Cone,
    star: Arc<StarFan>,
}

impl PartialEq for CoxDescription {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.images == other.images
    }
}

impl Eq for CoxDescription {}

impl CoxDescription {
    /// Checks image count, rings, homogeneity of factors and that the zero
    /// images span a cone of the target fan.
    pub fn new(
        source: Arc<ToricCoxRing>,
        target: Arc<ToricCoxRing>,
        images: Vec<FactoredSection>,
    ) -> Result<Self, DescriptionError> {
        if images.len() != target.nvars() {
            return Err(DescriptionError::ImageCountMismatch {
                expected: target.nvars(),
                found: images.len(),
            });
        }
        for (index, im) in images.iter().enumerate() {
            let Some(s) = im.as_nonzero() else { continue };
            if s.nvars() != source.nvars() {
                return Err(DescriptionError::RingMismatch {
                    index,
                    expected: source.nvars(),
                    found: s.nvars(),
                });
            }
            for (p, _) in s.factors() {
                if !matches!(source.homogeneous_degree(p)?, HomogeneousWitness::Homogeneous(_)) {
                    return Err(DescriptionError::InhomogeneousFactor(source.print(p)));
                }
            }
        }
        let zero_set: Vec<usize> = (0..images.len()).filter(|&i| images[i].is_zero()).collect();
        let sigma = Cone::new(zero_set.iter().copied());
        if !target.fan().contains_cone(&sigma) {
            return Err(DescriptionError::ZeroConeNotInFan(zero_set));
        }
        let star = Arc::new(target.fan().star_fan(&sigma)?);
        Ok(CoxDescription {
            source,
            target,
            images,
            zero_set,
            sigma,
            star,
        })
    }

    fn with_images(&self, images: Vec<FactoredSection>) -> Result<Self, DescriptionError> {
        let zero_set: Vec<usize> = (0..images.len()).filter(|&i| images[i].is_zero()).collect();
        if zero_set == self.zero_set {
            Ok(CoxDescription {
                images,
                ..self.clone()
            })
        } else {
            CoxDescription::new(self.source.clone(), self.target.clone(), images)
        }
    }

    pub fn source(&self) -> &ToricCoxRing {
        &self.source
    }

    pub fn target(&self) -> &ToricCoxRing {
        &self.target
    }

    pub fn source_arc(&self) -> &Arc<ToricCoxRing> {
        &self.source
    }

    pub fn target_arc(&self) -> &Arc<ToricCoxRing> {
        &self.target
    }

    pub fn images(&self) -> &[FactoredSection] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &FactoredSection {
        &self.images[i]
    }

    /// Indices of target variables with zero image.
    pub fn zero_set(&self) -> &[usize] {
        &self.zero_set
    }

    pub fn sigma(&self) -> &Cone {
        &self.sigma
    }

    pub fn star(&self) -> &StarFan {
        &self.star
    }

    /// The zero set and its cone; both were validated on construction.
    pub fn validate(&self) -> (&[usize], &Cone) {
        (&self.zero_set, &self.sigma)
    }

    /// `prod_i (Phi^* y_i)^{<m, rho_i>}`.
    pub fn pull_back_character(&self, m: &[BigInt]) -> Result<FactoredSection, DescriptionError> {
        let fan = self.target.fan();
        let mut acc = FactoredSection::one(self.source.nvars());
        for (i, im) in self.images.iter().enumerate() {
            let k: BigInt = fan.ray(i).iter().zip(m).map(|(&r, x)| x * BigInt::from(r)).sum();
            if k.is_zero() {
                continue;
            }
            acc = acc.mul(&im.pow(&BigRational::from_integer(k))?)?;
        }
        Ok(acc)
    }

    pub fn induced_character_map_with_basis(
        &self,
        basis: &[Vec<BigInt>],
    ) -> Result<CharacterMap, DescriptionError> {
        let values = basis
            .iter()
            .map(|m| self.pull_back_character(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CharacterMap {
            sigma: self.sigma.clone(),
            basis: basis.to_vec(),
            values,
        })
    }

    /// Pullbacks of the Hermite basis of `sigma^perp`.
    pub fn induced_character_map(&self) -> Result<CharacterMap, DescriptionError> {
        let basis = self.target.fan().orthogonal_character_basis(&self.sigma)?;
        self.induced_character_map_with_basis(&basis)
    }

    /// Every basis character must pull back to a single-valued section of
    /// exact degree zero.
    pub fn check_homogeneity(&self) -> Result<HomogeneityReport, DescriptionError> {
        let map = self.induced_character_map()?;
        for (m, value) in map.basis.iter().zip(&map.values) {
            let defect = character_value_defect(&self.source, value)?;
            if let Some(defect) = defect {
                return Ok(HomogeneityReport::Fail(HomogeneityFailure {
                    character: m.clone(),
                    value: value.clone(),
                    defect,
                }));
            }
        }
        Ok(HomogeneityReport::Pass(map))
    }

    /// A maximal cone containing the zero set, if any.
    pub fn check_relevance(&self) -> Option<Cone> {
        self.target.fan().max_cone_containing(&self.sigma).cloned()
    }

    /// Pullback of a target polynomial as `gamma * f / g`.
    pub fn pullback_polynomial(&self, g: &MPoly) -> Result<PulledBackSection, DescriptionError> {
        let mut terms = Vec::new();
        'terms: for (m, c) in g.terms() {
            let mut s = FactoredSection::one(self.source.nvars());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if self.images[i].is_zero() {
                    continue 'terms;
                }
                s = s.mul(&self.images[i].pow_int(i64::from(e))?)?;
            }
            terms.push((c.clone(), s));
        }
        Ok(PulledBackSection::from_terms(self.source.nvars(), &terms)?)
    }

    /// Index of the first generator with nonzero pullback.
    pub fn verify_ideal_vanishing(&self, gens: &[MPoly]) -> Result<Option<usize>, DescriptionError> {
        for (k, g) in gens.iter().enumerate() {
            if !self.pullback_polynomial(g)?.is_zero() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// Multiplies image `i` by `f^{delta_i}` for `delta` in the kernel of `L`.
    pub fn twist(&self, f: &MPoly, delta: &RationalVector) -> Result<Self, DescriptionError> {
        let n = self.images.len();
        if delta.len() != n {
            return Err(DescriptionError::TwistLength {
                expected: n,
                found: delta.len(),
            });
        }
        if f.is_constant() || f.is_zero() || !f.is_normalized() || f.nvars() != self.source.nvars() {
            return Err(DescriptionError::NonNormalizedDivisor(self.source.print(f)));
        }
        if !self.star.apply_l(delta).is_zero() {
            return Err(DescriptionError::NotInKernel);
        }
        let images = self
            .images
            .iter()
            .zip(delta.iter())
            .map(|(im, d)| {
                if im.is_zero() || d.is_zero() {
                    Ok(im.clone())
                } else {
                    im.mul(&FactoredSection::power_of(f, d.clone())?)
                }
            })
            .collect::<Result<Vec<_>, SectionError>>()?;
        self.with_images(images)
    }

    /// Distinct factor polynomials of all images, in canonical order.
    pub fn candidate_divisors(&self) -> Vec<MPoly> {
        let mut set = BTreeSet::new();
        for im in &self.images {
            if let Some(s) = im.as_nonzero() {
                for (p, _) in s.factors() {
                    set.insert(std::cmp::Reverse(p.clone()));
                }
            }
        }
        set.into_iter().map(|r| r.0).collect()
    }

    pub fn divisor_status(&self, f: &MPoly) -> Result<DivisorDiagnosis, DescriptionError> {
        let mu = RationalVector(
            self.images
                .iter()
                .map(|im| match im {
                    FactoredSection::Zero => Ok(BigRational::zero()),
                    s => s.order_along(f),
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
        let l_mu = self.star.apply_l(&mu);
        if !l_mu.is_integral() {
            return Err(DescriptionError::NonIntegralL {
                f: self.source.print(f),
                l_mu: l_mu.to_string(),
            });
        }
        let status = match self.star.minimal_cone_containing(&l_mu) {
            None => DivisorStatus::NonRegularMapLocus,
            Some(tau_star) => {
                let pattern = Cone::new(
                    self.zero_set
                        .iter()
                        .copied()
                        .chain((0..mu.len()).filter(|&i| mu.0[i].is_positive())),
                );
                let witness = if is_nonnegative(&mu) {
                    self.target.fan().max_cone_containing(&pattern).cloned()
                } else {
                    None
                };
                match witness {
                    Some(witness) => DivisorStatus::Agrees { witness },
                    None => self.modification_data(&tau_star, &l_mu),
                }
            }
        };
        Ok(DivisorDiagnosis {
            f: f.clone(),
            mu,
            l_mu,
            status,
        })
    }

    fn modification_data(&self, tau_star: &Cone, l_mu: &RationalVector) -> DivisorStatus {
        let tau = self.star.image_cone(tau_star);
        let tau_y = self
            .star
            .maximal_cones_with_image(tau_star)
            .into_iter()
            .next()
            .expect("the minimal star cone maps onto its own image");
        let cols: Vec<Vec<BigInt>> = tau_y.rays().iter().map(|&i| self.star.ray_image(i).to_vec()).collect();
        let a = IntMatrix::from_big_columns(self.star.quotient_dim(), &cols);
        let sol = solve_rational(&a, l_mu, true).expect("L(mu) lies in the image of tau_y");
        let mut mu_prime = RationalVector::zeros(self.images.len());
        for (k, &i) in tau_y.rays().iter().enumerate() {
            mu_prime.0[i] = sol.solution.0[k].clone();
        }
        DivisorStatus::NeedsModification { tau, tau_y, mu_prime }
    }

    /// Twists by `f^{mu' - mu}`.
    pub fn complete_along(&self, diagnosis: &DivisorDiagnosis) -> Result<Self, DescriptionError> {
        match &diagnosis.status {
            DivisorStatus::NeedsModification { mu_prime, .. } => {
                self.twist(&diagnosis.f, &mu_prime.sub(&diagnosis.mu))
            }
            _ => Err(DescriptionError::NotModifiable(self.source.print(&diagnosis.f))),
        }
    }

    /// Modifies along every candidate divisor that needs it until all
    /// candidates agree or are non-regular.
    pub fn complete(&self) -> Result<Completion, DescriptionError> {
        let candidates = self.candidate_divisors();
        let bound = candidates.len() + 1;
        let mut current = self.clone();
        let mut initial = Vec::with_capacity(candidates.len());
        let mut modified = vec![false; candidates.len()];
        let mut passes = 0;
        loop {
            passes += 1;
            if passes > bound {
                return Err(DescriptionError::NonTermination(bound));
            }
            let mut changed = false;
            for (k, f) in candidates.iter().enumerate() {
                let d = current.divisor_status(f)?;
                if passes == 1 {
                    initial.push(d.clone());
                }
                if matches!(d.status, DivisorStatus::NeedsModification { .. }) {
                    current = current.complete_along(&d)?;
                    modified[k] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let divisors = candidates
            .iter()
            .zip(initial)
            .zip(modified)
            .map(|((f, initial), modified)| {
                Ok(DivisorReport {
                    f: f.clone(),
                    last: current.divisor_status(f)?,
                    initial,
                    modified,
                })
            })
            .collect::<Result<Vec<_>, DescriptionError>>()?;
        Ok(Completion {
            description: current,
            divisors,
            passes,
        })
    }

    /// Divisors of non-regularity and the vanishing patterns where the image
    /// falls into the irrelevant locus of the target.
    pub fn regularity_report(&self) -> Result<RegularityReport, DescriptionError> {
        let mut non_regular_divisors = Vec::new();
        for f in self.candidate_divisors() {
            match self.divisor_status(&f)?.status {
                DivisorStatus::Agrees { .. } => {}
                DivisorStatus::NonRegularMapLocus => non_regular_divisors.push(f),
                DivisorStatus::NeedsModification { .. } => {
                    return Err(DescriptionError::IncompleteDescription(self.source.print(&f)))
                }
            }
        }
        // Positive-exponent factors of each nonzero pulled-back irrelevant generator.
        let mut families: Vec<BTreeSet<std::cmp::Reverse<MPoly>>> = Vec::new();
        for gen in self.target.fan().irrelevant_monomials() {
            let mut s = FactoredSection::one(self.source.nvars());
            for (i, &e) in gen.iter().enumerate() {
                if e > 0 {
                    s = s.mul(&self.images[i].pow_int(i64::from(e))?)?;
                }
            }
            let Some(s) = s.as_nonzero() else { continue };
            families.push(
                s.factors()
                    .iter()
                    .filter(|(_, e)| e.is_positive())
                    .map(|(p, _)| std::cmp::Reverse(p.clone()))
                    .collect(),
            );
        }
        let mut patterns = Vec::new();
        for hs in minimal_hitting_sets(&families) {
            let polys: Vec<MPoly> = hs.into_iter().map(|r| r.0).collect();
            if !self.pattern_is_irrelevant(&polys) {
                patterns.push(polys);
            }
        }
        let nonnegative_exponents = self.images.iter().all(|im| {
            im.as_nonzero()
                .is_none_or(|s| s.factors().iter().all(|(_, e)| !e.is_negative()))
        });
        Ok(RegularityReport {
            non_regular_divisors,
            patterns,
            nonnegative_exponents,
        })
    }

    /// A pattern of coordinate hyperplanes not contained in any maximal cone
    /// of the source lies inside the irrelevant locus of the source.
    fn pattern_is_irrelevant(&self, polys: &[MPoly]) -> bool {
        let mut vars = Vec::new();
        for p in polys {
            if p.len() != 1 {
                return false;
            }
            let (m, _) = p.leading_term().expect("nonzero");
            let support: Vec<usize> = p.support_variables();
            if support.len() != 1 || m.degree() != 1 {
                return false;
            }
            vars.push(support[0]);
        }
        self.source.fan().max_cone_containing(&Cone::new(vars)).is_none()
    }

    /// Cheap irreducibility sanity checks on the stored factors.
    pub fn factor_sanity(&self) -> Vec<FactorIssue> {
        let pool = self.candidate_divisors();
        let mut issues = Vec::new();
        for p in &pool {
            if p.len() == 1 {
                let (m, _) = p.leading_term().expect("nonzero");
                if m.degree() != 1 {
                    issues.push(FactorIssue::NonVariableMonomial(p.clone()));
                }
                continue;
            }
            if !p.monomial_content().is_one() {
                issues.push(FactorIssue::VariableContent(p.clone()));
                continue;
            }
            for q in &pool {
                if q != p && matches!(exact_divide(p, q), Ok(Some(_))) {
                    issues.push(FactorIssue::DivisibleBy {
                        factor: p.clone(),
                        divisor: q.clone(),
                    });
                }
            }
        }
        issues
    }

    pub fn image_strings(&self) -> Vec<String> {
        self.images
            .iter()
            .map(|im| im.to_string_with(self.source.names()))
            .collect()
    }
}

impl fmt::Display for CoxDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.image_strings().join(", "))
    }
}

fn character_value_defect(
    ring: &ToricCoxRing,
    value: &FactoredSection,
) -> Result<Option<HomogeneityDefect>, DescriptionError> {
    let r = value.root_order()?;
    if !r.is_one() {
        return Ok(Some(HomogeneityDefect::NotSingleValued { root_order: r }));
    }
    let degree = value
        .section_degree(ring)?
        .exact
        .expect("integral exponents give an exact degree");
    if !degree.is_zero() {
        return Ok(Some(HomogeneityDefect::NonzeroDegree { degree }));
    }
    Ok(None)
}

/// Inclusion-minimal sets meeting every family. An empty family admits no
/// hitting set; no families admit the empty set.
fn minimal_hitting_sets<T: Ord + Clone>(families: &[BTreeSet<T>]) -> Vec<BTreeSet<T>> {
    let mut current: Vec<BTreeSet<T>> = vec![BTreeSet::new()];
    for fam in families {
        let mut next: Vec<BTreeSet<T>> = Vec::new();
        for h in &current {
            if h.iter().any(|x| fam.contains(x)) {
                next.push(h.clone());
                continue;
            }
            for x in fam {
                let mut g = h.clone();
                g.insert(x.clone());
                next.push(g);
            }
        }
        next.sort();
        next.dedup();
        let minimal: Vec<BTreeSet<T>> = next
            .iter()
            .filter(|h| !next.iter().any(|g| g != *h && g.is_subset(h)))
            .cloned()
            .collect();
        current = minimal;
    }
    current
}

/// Solves `A x = b` over GF(2); free variables are set to zero.
fn solve_gf2(a: &[Vec<bool>], b: &[bool], ncols: usize) -> Option<Vec<bool>> {
    let mut rows: Vec<(Vec<bool>, bool)> = a.iter().cloned().zip(b.iter().copied()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0[c]) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.0[c] {
                for (x, y) in row.0.iter_mut().zip(&pivot.0) {
                    *x ^= *y;
                }
                row.1 ^= pivot.1;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1) {
        return None;
    }
    let mut x = vec![false; ncols];
    for (k, &c) in pivots.iter().enumerate() {
        x[c] = rows[k].1;
    }
    Some(x)
}

/// Builds a description whose induced character map is `charmap`, setting
/// free exponents to zero.
pub fn construct_description(
    source: Arc<ToricCoxRing>,
    target: Arc<ToricCoxRing>,
    charmap: &CharacterMap,
) -> Result<CoxDescription, DescriptionError> {
    let fan = target.fan();
    let expected = fan.orthogonal_character_basis(&charmap.sigma)?;
    if charmap.basis.len() != expected.len()
        || charmap.basis.iter().any(|m| m.len() != fan.dim())
        || hermite_basis(&charmap.basis, fan.dim()) != expected
    {
        return Err(DescriptionError::InvalidCharacterBasis);
    }
    if charmap.values.len() != charmap.basis.len() {
        return Err(DescriptionError::InvalidCharacterBasis);
    }
    for (index, v) in charmap.values.iter().enumerate() {
        let reason = match v {
            FactoredSection::Zero => Some("zero".to_string()),
            FactoredSection::NonZero(s) if s.nvars() != source.nvars() => {
                Some("wrong number of variables".to_string())
            }
            _ => character_value_defect(&source, v)?.map(|d| format!("{d:?}")),
        };
        if let Some(reason) = reason {
            return Err(DescriptionError::InvalidCharacterValue { index, reason });
        }
    }
    let free: Vec<usize> = (0..fan.n_rays()).filter(|&i| !charmap.sigma.contains_ray(i)).collect();
    let pairing: Vec<Vec<BigInt>> = charmap
        .basis
        .iter()
        .map(|m| {
            free.iter()
                .map(|&i| fan.ray(i).iter().zip(m).map(|(&r, x)| x * BigInt::from(r)).sum())
                .collect()
        })
        .collect();
    let a = IntMatrix::from_big_rows(free.len(), pairing.clone());
    let sections: Vec<_> = charmap.values.iter().map(|v| v.as_nonzero().expect("checked")).collect();

    // Atoms: factor polynomials, then scalar primes.
    let mut polys = BTreeSet::new();
    let mut primes = BTreeSet::new();
    for s in &sections {
        for (p, _) in s.factors() {
            polys.insert(std::cmp::Reverse(p.clone()));
        }
        for p in s.unit().exponents().keys() {
            primes.insert(p.clone());
        }
    }
    let solve = |b: Vec<BigRational>, atom: String| -> Result<Vec<BigRational>, DescriptionError> {
        solve_rational(&a, &RationalVector(b), false)
            .map(|s| s.solution.0)
            .ok_or(DescriptionError::InconsistentCharacterData { atom })
    };
    let mut factor_exps: Vec<Vec<(MPoly, BigRational)>> = vec![Vec::new(); free.len()];
    for p in &polys {
        let b = sections.iter().map(|s| s.exponent_of(&p.0)).collect();
        let x = solve(b, source.print(&p.0))?;
        for (k, e) in x.into_iter().enumerate() {
            factor_exps[k].push((p.0.clone(), e));
        }
    }
    let mut units = vec![RadicalScalar::one(); free.len()];
    for p in &primes {
        let b = sections.iter().map(|s| s.unit().exponent_of(p)).collect();
        let x = solve(b, p.to_string())?;
        for (k, e) in x.into_iter().enumerate() {
            let base = RadicalScalar::from_rational(&BigRational::from_integer(p.clone()))?;
            units[k] = units[k].mul(&base.pow(&e)?);
        }
    }
    let parity: Vec<Vec<bool>> = pairing
        .iter()
        .map(|row| row.iter().map(is_odd).collect())
        .collect();
    let signs: Vec<bool> = sections.iter().map(|s| s.unit().is_negative()).collect();
    let eps = solve_gf2(&parity, &signs, free.len()).ok_or(DescriptionError::UnrepresentableSign)?;
    let mut images = vec![FactoredSection::Zero; fan.n_rays()];
    for (k, &i) in free.iter().enumerate() {
        let mut unit = units[k].clone();
        if eps[k] {
            unit = unit.mul(&RadicalScalar::minus_one());
        }
        images[i] = FactoredSection::new(source.nvars(), unit, factor_exps[k].clone())?;
    }
    CoxDescription::new(source, target, images)
}

fn is_odd(x: &BigInt) -> bool {
    use num_integer::Integer;
    x.is_odd()
}
