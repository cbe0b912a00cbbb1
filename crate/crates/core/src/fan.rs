//! Fans, cone membership, star fans and the projections `p` and `L`.
//!
//! Cones are stored as sets of ray indices. Membership and face questions
//! are answered exactly with [`solve_rational`](crate::abelian::solve_rational).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::{rank, saturated_kernel, solve_rational, IntMatrix, RationalVector};

/// Above this many maximal cones the pairwise intersection check is skipped
/// unless explicitly requested.
pub const PAIRWISE_CHECK_LIMIT: usize = 64;

/// A cone of a fan, as a sorted set of ray indices. The empty set is the
/// zero cone.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(rays: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = rays.into_iter().collect();
        Cone(set.into_iter().collect())
    }

    pub fn zero() -> Self {
        Cone(Vec::new())
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// The zero cone has no rays.
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn contains_ray(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Set inclusion of ray sets; for cones of one fan this is the face relation.
    pub fn is_subset(&self, other: &Cone) -> bool {
        self.0.iter().all(|&i| other.contains_ray(i))
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroRay(usize),
    NonPrimitiveRay(usize),
    NotStronglyConvex(Cone),
    NonExtremalRay { cone: Cone, ray: usize },
    BadIntersection(Cone, Cone),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroRay(i) => write!(f, "ray {i} is zero"),
            Violation::NonPrimitiveRay(i) => write!(f, "ray {i} is not primitive"),
            Violation::NotStronglyConvex(c) => write!(f, "cone {c} contains a line"),
            Violation::NonExtremalRay { cone, ray } => {
                write!(f, "ray {ray} does not span an edge of cone {cone}")
            }
            Violation::BadIntersection(a, b) => {
                write!(f, "cones {a} and {b} do not meet in a common face")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// False when the pairwise check was skipped for size.
    pub pairwise_checked: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("ray {index} has {found} coordinates, expected {expected}")]
    RayDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("cone {cone} refers to missing ray {ray}")]
    RayIndexOutOfRange { cone: Cone, ray: usize },
    #[error("vector has {found} coordinates, lattice has rank {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone {0} is not a cone of the fan")]
    ConeNotInFan(Cone),
    #[error("fan validation failed: {0}")]
    ValidationFailure(Violation),
}

/// Rational polyhedral fan in `N = Z^dim`, given by rays and maximal cones.
#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Cone>,
    all_cones: OnceLock<Vec<Cone>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl Fan {
    /// Structural constructor: checks coordinate counts and ray indices only.
    /// An empty cone list means the fan consisting of the zero cone.
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Cone>) -> Result<Self, FanError> {
        for (index, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::RayDimension {
                    index,
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        for c in &max_cones {
            if let Some(&ray) = c.rays().iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::RayIndexOutOfRange {
                    cone: c.clone(),
                    ray,
                });
            }
        }
        let max_cones = if max_cones.is_empty() {
            vec![Cone::zero()]
        } else {
            max_cones
        };
        Ok(Fan {
            dim,
            rays,
            max_cones,
            all_cones: OnceLock::new(),
        })
    }

    /// Convenience constructor from index lists.
    pub fn from_lists(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Self, FanError> {
        Fan::new(
            dim,
            rays.iter().map(|r| r.to_vec()).collect(),
            cones.iter().map(|c| Cone::new(c.iter().copied())).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn ray_big(&self, i: usize) -> Vec<BigInt> {
        self.rays[i].iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    /// `dim x k` matrix whose columns are the rays of `cone`.
    pub fn ray_columns(&self, cone: &Cone) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = cone.rays().iter().map(|&i| self.ray_big(i)).collect();
        IntMatrix::from_big_columns(self.dim, &cols)
    }

    /// `k x dim` matrix whose rows are the rays of `cone`.
    pub fn ray_rows(&self, cone: &Cone) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = cone.rays().iter().map(|&i| self.ray_big(i)).collect();
        IntMatrix::from_big_rows(self.dim, rows)
    }

    /// Pairing matrix `(<e_j, rho_i>)`: rows are rays, columns the basis of M.
    pub fn pairing_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.dim, &self.rays)
    }

    /// Dimension of the linear span of a cone.
    pub fn cone_dim(&self, cone: &Cone) -> usize {
        rank(&self.ray_columns(cone))
    }

    /// Every cone of the fan: all faces of all maximal cones, sorted by
    /// size and then lexicographically.
    pub fn all_cones(&self) -> &[Cone] {
        self.all_cones.get_or_init(|| {
            let mut set = BTreeSet::new();
            for c in &self.max_cones {
                for face in self.faces_of(c) {
                    set.insert(face);
                }
            }
            let mut v: Vec<Cone> = set.into_iter().collect();
            v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            v
        })
    }

    pub fn contains_cone(&self, cone: &Cone) -> bool {
        self.all_cones().contains(cone)
    }

    /// Ray subsets of `cone` that span faces of it.
    fn faces_of(&self, cone: &Cone) -> Vec<Cone> {
        let rays = cone.rays();
        let k = rays.len();
        let simplicial = self.cone_dim(cone) == k;
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << k) {
            let sub = Cone::new((0..k).filter(|b| mask >> b & 1 == 1).map(|b| rays[b]));
            if simplicial || self.is_face(&sub, cone) {
                out.push(sub);
            }
        }
        out
    }

    /// Whether the ray subset `sub` of `cone` spans a face of `cone`.
    fn is_face(&self, sub: &Cone, cone: &Cone) -> bool {
        let zero: Vec<&[i64]> = sub.rays().iter().map(|&i| self.ray(i)).collect();
        let pos: Vec<&[i64]> = cone
            .rays()
            .iter()
            .filter(|&&i| !sub.contains_ray(i))
            .map(|&i| self.ray(i))
            .collect();
        separating_form_exists(self.dim, &zero, &pos, &[])
    }

    /// Checks primitivity, strong convexity, extremality of listed rays and
    /// (for at most [`PAIRWISE_CHECK_LIMIT`] maximal cones, or when
    /// `force_pairwise`) that maximal cones meet in common faces.
    pub fn validate(&self, force_pairwise: bool) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            let g = r.iter().fold(0i64, |g, &x| g.gcd(&x));
            if g == 0 {
                violations.push(Violation::ZeroRay(i));
            } else if g != 1 {
                violations.push(Violation::NonPrimitiveRay(i));
            }
        }
        for c in &self.max_cones {
            let all: Vec<&[i64]> = c.rays().iter().map(|&i| self.ray(i)).collect();
            if !separating_form_exists(self.dim, &[], &all, &[]) {
                violations.push(Violation::NotStronglyConvex(c.clone()));
                continue;
            }
            for &i in c.rays() {
                if !self.is_face(&Cone::new([i]), c) {
                    violations.push(Violation::NonExtremalRay {
                        cone: c.clone(),
                        ray: i,
                    });
                }
            }
        }
        let pairwise_checked = force_pairwise || self.max_cones.len() <= PAIRWISE_CHECK_LIMIT;
        if pairwise_checked && violations.is_empty() {
            for (a_idx, a) in self.max_cones.iter().enumerate() {
                for b in &self.max_cones[a_idx + 1..] {
                    if !self.meet_in_common_face(a, b) {
                        violations.push(Violation::BadIntersection(a.clone(), b.clone()));
                    }
                }
            }
        }
        ValidationReport {
            violations,
            pairwise_checked,
        }
    }

    /// [`Fan::validate`] turned into a `Result` on the first violation.
    pub fn validate_strict(&self) -> Result<(), FanError> {
        match self.validate(false).violations.into_iter().next() {
            Some(v) => Err(FanError::ValidationFailure(v)),
            None => Ok(()),
        }
    }

    /// `a` and `b` intersect in the cone over their common rays, which is a
    /// face of both, iff some linear form vanishes on the common rays, is
    /// positive on the rest of `a` and negative on the rest of `b`.
    fn meet_in_common_face(&self, a: &Cone, b: &Cone) -> bool {
        let zero: Vec<&[i64]> = a
            .rays()
            .iter()
            .filter(|&&i| b.contains_ray(i))
            .map(|&i| self.ray(i))
            .collect();
        let pos: Vec<&[i64]> = a
            .rays()
            .iter()
            .filter(|&&i| !b.contains_ray(i))
            .map(|&i| self.ray(i))
            .collect();
        let neg: Vec<&[i64]> = b
            .rays()
            .iter()
            .filter(|&&i| !a.contains_ray(i))
            .map(|&i| self.ray(i))
            .collect();
        separating_form_exists(self.dim, &zero, &pos, &neg)
    }

    fn check_dim(&self, v: &RationalVector) -> Result<(), FanError> {
        if v.len() != self.dim {
            return Err(FanError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Whether `v` is a nonnegative rational combination of the rays of `cone`.
    pub fn cone_contains(&self, cone: &Cone, v: &RationalVector) -> Result<bool, FanError> {
        self.check_dim(v)?;
        Ok(solve_rational(&self.ray_columns(cone), v, true).is_some())
    }

    /// The cone of the fan containing `v` in its relative interior, or
    /// `None` when `v` is outside the support.
    pub fn minimal_cone_containing(&self, v: &RationalVector) -> Result<Option<Cone>, FanError> {
        self.check_dim(v)?;
        for c in &self.max_cones {
            let gens: Vec<Vec<BigInt>> = c.rays().iter().map(|&i| self.ray_big(i)).collect();
            if let Some(used) = participating_generators(self.dim, &gens, v) {
                return Ok(Some(Cone::new(used.into_iter().map(|k| c.rays()[k]))));
            }
        }
        Ok(None)
    }

    /// Hermite basis of `sigma^perp` in `M`.
    pub fn orthogonal_character_basis(&self, sigma: &Cone) -> Result<Vec<Vec<BigInt>>, FanError> {
        if !self.contains_cone(sigma) {
            return Err(FanError::ConeNotInFan(sigma.clone()));
        }
        Ok(saturated_kernel(&self.ray_rows(sigma)))
    }

    /// Exponent vectors of the generators of the irrelevant ideal: one
    /// square-free monomial per maximal cone, in the variables of the rays
    /// outside that cone.
    pub fn irrelevant_monomials(&self) -> Vec<Vec<u32>> {
        self.max_cones
            .iter()
            .map(|c| {
                (0..self.rays.len())
                    .map(|i| u32::from(!c.contains_ray(i)))
                    .collect()
            })
            .collect()
    }

    /// Smallest maximal cone (in list order) containing all rays of `cone`.
    pub fn max_cone_containing(&self, cone: &Cone) -> Option<&Cone> {
        self.max_cones.iter().find(|m| cone.is_subset(m))
    }

    pub fn star_fan(&self, sigma: &Cone) -> Result<StarFan, FanError> {
        StarFan::new(self, sigma)
    }
}

/// Whether there is `m` with `<m, z> = 0`, `<m, p> >= 1` and `<m, n> <= -1`
/// for every listed `z`, `p`, `n`.
fn separating_form_exists(dim: usize, zero: &[&[i64]], pos: &[&[i64]], neg: &[&[i64]]) -> bool {
    // Unknowns: m+ (dim), m- (dim), one slack per strict row.
    let slacks = pos.len() + neg.len();
    let ncols = 2 * dim + slacks;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut push = |v: &[i64], slack: Option<(usize, i64)>, b: i64| {
        let mut row = vec![0i64; ncols];
        for (j, &x) in v.iter().enumerate() {
            row[j] = x;
            row[dim + j] = -x;
        }
        if let Some((s, sign)) = slack {
            row[2 * dim + s] = sign;
        }
        rows.push(row);
        rhs.push(b);
    };
    for z in zero {
        push(z, None, 0);
    }
    for (s, p) in pos.iter().enumerate() {
        push(p, Some((s, -1)), 1);
    }
    for (s, n) in neg.iter().enumerate() {
        push(n, Some((pos.len() + s, 1)), -1);
    }
    if rows.is_empty() {
        return true;
    }
    let a = IntMatrix::from_rows(ncols, &rows);
    solve_rational(&a, &RationalVector::from_i64(&rhs), true).is_some()
}

/// If `v` lies in the cone generated by `gens`, the indices of generators
/// that occur with positive weight in some representation of `v`. These
/// span the face containing `v` in its relative interior.
fn participating_generators(dim: usize, gens: &[Vec<BigInt>], v: &RationalVector) -> Option<Vec<usize>> {
    let cols = IntMatrix::from_big_columns(dim, gens);
    solve_rational(&cols, v, true)?;
    // Homogenised test: sum lambda_k g_k - t v = 0 with lambda_j = 1.
    let denom = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = v.iter().map(|x| (x * &denom).to_integer()).collect();
    let k = gens.len();
    let mut used = Vec::new();
    for j in 0..k {
        let mut m = IntMatrix::zeros(dim + 1, k + 1);
        for (c, g) in gens.iter().enumerate() {
            for (r, x) in g.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        for (r, x) in scaled.iter().enumerate() {
            m.set(r, k, -x);
        }
        m.set(dim, j, BigInt::one());
        let mut rhs = RationalVector::zeros(dim + 1);
        rhs.0[dim] = One::one();
        if solve_rational(&m, &rhs, true).is_some() {
            used.push(j);
        }
    }
    Some(used)
}

/// Primitive vector on the ray through a nonzero integer vector.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// The star of a cone `sigma`: the cones containing it together with their
/// images in the quotient lattice `N(sigma) = N / N_sigma`.
#[derive(Clone, Debug)]
pub struct StarFan {
    base: Cone,
    /// Rows are a Hermite basis of `sigma^perp`, so `p(x)_j = <m_j, x>`.
    projection: IntMatrix,
    /// `p(rho_i)` for every ray of the ambient fan.
    ray_images: Vec<Vec<BigInt>>,
    /// Cones of the ambient fan containing `sigma`, sizes ascending.
    star_cones: Vec<Cone>,
    /// Maximal cones of the ambient fan containing `sigma`.
    star_max_cones: Vec<Cone>,
    /// The image fan with primitive generators, for display and comparison.
    quotient_fan: Fan,
    /// For each ray of `quotient_fan`, the star cone of one dimension above
    /// `sigma` it comes from.
    quotient_ray_sources: Vec<Cone>,
}

impl StarFan {
    fn new(fan: &Fan, sigma: &Cone) -> Result<Self, FanError> {
        let basis = fan.orthogonal_character_basis(sigma)?;
        let projection = IntMatrix::from_big_rows(fan.dim(), basis);
        let qdim = projection.rows();
        let ray_images: Vec<Vec<BigInt>> = (0..fan.n_rays())
            .map(|i| projection.mul_vec(&fan.ray_big(i)))
            .collect();
        let star_cones: Vec<Cone> = fan
            .all_cones()
            .iter()
            .filter(|c| sigma.is_subset(c))
            .cloned()
            .collect();
        let star_max_cones: Vec<Cone> = fan
            .max_cones()
            .iter()
            .filter(|c| sigma.is_subset(c))
            .cloned()
            .collect();
        let sigma_dim = fan.cone_dim(sigma);
        let mut rays = Vec::new();
        let mut quotient_ray_sources = Vec::new();
        for c in &star_cones {
            if fan.cone_dim(c) != sigma_dim + 1 {
                continue;
            }
            let i = c
                .rays()
                .iter()
                .copied()
                .find(|&i| !sigma.contains_ray(i))
                .expect("a cone one dimension above sigma has a ray outside it");
            let g = primitive(&ray_images[i]);
            rays.push(
                g.iter()
                    .map(|x| i64::try_from(x).expect("projected ray fits in i64"))
                    .collect(),
            );
            quotient_ray_sources.push(c.clone());
        }
        let cones: Vec<Cone> = star_max_cones
            .iter()
            .map(|m| {
                Cone::new(
                    quotient_ray_sources
                        .iter()
                        .enumerate()
                        .filter(|(_, src)| src.is_subset(m))
                        .map(|(j, _)| j),
                )
            })
            .collect();
        let quotient_fan = Fan::new(qdim, rays, cones)?;
        Ok(StarFan {
            base: sigma.clone(),
            projection,
            ray_images,
            star_cones,
            star_max_cones,
            quotient_fan,
            quotient_ray_sources,
        })
    }

    pub fn base(&self) -> &Cone {
        &self.base
    }

    /// The projection `p : N -> N(sigma)`.
    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    /// Rank of `N(sigma)`.
    pub fn quotient_dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn ray_image(&self, i: usize) -> &[BigInt] {
        &self.ray_images[i]
    }

    /// The cones of the ambient fan that contain `sigma`.
    pub fn star_cones(&self) -> &[Cone] {
        &self.star_cones
    }

    pub fn star_max_cones(&self) -> &[Cone] {
        &self.star_max_cones
    }

    pub fn quotient_fan(&self) -> &Fan {
        &self.quotient_fan
    }

    /// Image of a star cone as a cone of [`StarFan::quotient_fan`].
    pub fn image_cone(&self, star_cone: &Cone) -> Cone {
        Cone::new(
            self.quotient_ray_sources
                .iter()
                .enumerate()
                .filter(|(_, src)| src.is_subset(star_cone))
                .map(|(j, _)| j),
        )
    }

    /// Generators `p(rho_i)` of the image of a star cone (rays of `sigma`
    /// omitted, no re-primitivisation).
    pub fn image_generators(&self, star_cone: &Cone) -> Vec<Vec<BigInt>> {
        star_cone
            .rays()
            .iter()
            .filter(|&&i| !self.base.contains_ray(i))
            .map(|&i| self.ray_images[i].clone())
            .collect()
    }

    /// Matrix of `L : Z^rays -> N(sigma)`, column `i` equal to `p(rho_i)`.
    pub fn ray_projection_map(&self) -> IntMatrix {
        IntMatrix::from_big_columns(self.quotient_dim(), &self.ray_images)
    }

    /// `L(mu)` for a rational weight vector on the rays.
    pub fn apply_l(&self, mu: &RationalVector) -> RationalVector {
        self.ray_projection_map().mul_rational_vec(mu)
    }

    pub fn image_contains(&self, star_cone: &Cone, v: &RationalVector) -> bool {
        let gens = self.image_generators(star_cone);
        let cols = IntMatrix::from_big_columns(self.quotient_dim(), &gens);
        solve_rational(&cols, v, true).is_some()
    }

    /// The star cone whose image is the smallest cone of the quotient fan
    /// containing `v`, or `None` outside the support.
    pub fn minimal_cone_containing(&self, v: &RationalVector) -> Option<Cone> {
        assert_eq!(v.len(), self.quotient_dim(), "vector not in N(sigma)");
        for m in &self.star_max_cones {
            let outside: Vec<usize> = m
                .rays()
                .iter()
                .copied()
                .filter(|&i| !self.base.contains_ray(i))
                .collect();
            let gens: Vec<Vec<BigInt>> = outside.iter().map(|&i| self.ray_images[i].clone()).collect();
            if let Some(used) = participating_generators(self.quotient_dim(), &gens, v) {
                let face = Cone::new(self.base.rays().iter().copied().chain(used.into_iter().map(|k| outside[k])));
                return Some(face);
            }
        }
        None
    }

    /// Star cones whose image equals the image of `star_cone`, inclusion
    /// maximal, lexicographically sorted.
    pub fn maximal_cones_with_image(&self, star_cone: &Cone) -> Vec<Cone> {
        let target = self.image_cone(star_cone);
        let same: Vec<&Cone> = self
            .star_cones
            .iter()
            .filter(|c| self.image_cone(c) == target)
            .collect();
        let mut out: Vec<Cone> = same
            .iter()
            .filter(|c| !same.iter().any(|d| d != *c && c.is_subset(d)))
            .map(|c| (*c).clone())
            .collect();
        out.sort();
        out
    }
}

/// Whether all entries are positive or zero.
pub fn is_nonnegative(v: &RationalVector) -> bool {
    v.iter().all(|x| !x.is_negative())
}
