//! Property checks. Each runs a seeded proptest runner for the requested
//! number of cases and returns the shrunk counterexample on failure.

use std::collections::BTreeSet;

use coxmap::abelian::{
    cokernel, lattice_contains, lexmin_nonneg_fourier_motzkin, lexmin_nonneg_simplex, rational_nullspace,
    saturated_kernel, smith_normal_form, solve_rational, IntMatrix, RationalVector,
};
use coxmap::coxring::{exact_divide, order_along, MPoly, Monomial, ToricCoxRing};
use coxmap::descriptions::{construct_description, CoxDescription, DivisorStatus};
use coxmap::fan::Cone;
use coxmap::oracle::{evaluate_description, orbit_equal, sample_agreement};
use coxmap::sections::{FactoredSection, RadicalScalar};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use super::oracles::{box_points, det, determinantal_divisor, rational_rank, simplicial_cone_contains};
use super::*;

pub type Property = fn(u32) -> Result<(), String>;

/// Every suite with its name, in a fixed order.
pub const SUITES: &[(&str, Property)] = &[
    ("smith normal form identities", snf_identities),
    ("cokernel presentation", cokernel_presentation),
    ("saturated kernel", kernel_basis),
    ("nonnegative solvers", nonnegative_solvers),
    ("minimal cones", minimal_cones),
    ("star fans", star_fans),
    ("irrelevant monomials", irrelevant_monomials),
    ("exact division", exact_division),
    ("order along a divisor", order_along_laws),
    ("parse/print round-trip", parse_print),
    ("degree of products", product_degrees),
    ("section pow/mul algebra", section_algebra),
    ("section expansion", section_expansion),
    ("construct/induced round-trip", construct_round_trip),
    ("twist invariance", twist_invariance),
    ("completion fixpoint", completion_fixpoint),
    ("pullback multiplicativity", pullback_multiplicativity),
    ("branch count", branch_count),
    ("sampling on exact descriptions", sampling_exact),
    ("sampling on the planted example", sampling_planted),
];

pub const DEFAULT_CASES: u32 = 256;

fn run<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(msg: impl Into<String>) -> TestCaseError {
    TestCaseError::fail(msg.into())
}

fn matrix(max_rows: usize, max_cols: usize, entry: i64) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(move |(r, c)| vec(vec(-entry..=entry, c), r).prop_map(move |rows| (c, rows)))
}

fn big_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| big(r)).collect()
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

// ---------------------------------------------------------------- abelian

pub fn snf_identities(cases: u32) -> Result<(), String> {
    run(cases, matrix(6, 6, 5), |(cols, rows)| {
        let a = IntMatrix::from_rows(cols, &rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(&(&(&s.u * &a) * &s.v), &s.d);
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                prop_assert!(i == j || s.d.get(i, j).is_zero(), "off-diagonal entry");
            }
        }
        prop_assert!(det(&to_rows(&s.u)).abs().is_one());
        prop_assert!(det(&to_rows(&s.v)).abs().is_one());
        let d = s.diagonal();
        prop_assert!(d.iter().all(|x| !x.is_negative()));
        for w in d.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            prop_assert!(divides, "{} does not divide {}", w[0], w[1]);
        }
        // d_1 ... d_k is the k-th determinantal divisor.
        let a_rows = big_rows(&rows);
        let mut prod = BigInt::one();
        for (k, dk) in d.iter().enumerate() {
            prod *= dk;
            prop_assert_eq!(&prod, &determinantal_divisor(&a_rows, k + 1), "k = {}", k + 1);
        }
        prop_assert_eq!(s.rank(), rational_rank(&a_rows));
        Ok(())
    })
}

pub fn cokernel_presentation(cases: u32) -> Result<(), String> {
    run(cases, (matrix(5, 5, 4), vec(-6i64..=6, 5)), |((cols, rows), x)| {
        let a = IntMatrix::from_rows(cols, &rows);
        let g = cokernel(&a);
        let zero = g.zero();
        for j in 0..cols {
            prop_assert_eq!(&g.image(&a.column(j)), &zero, "column {} survives", j);
        }
        let d = smith_normal_form(&a).diagonal();
        let expected: BigInt = d.iter().filter(|x| **x > BigInt::one()).product();
        prop_assert_eq!(g.torsion_order(), expected);
        prop_assert_eq!(g.free_rank(), rows.len() - rational_rank(&big_rows(&rows)));
        let x = big(&x[..rows.len()]);
        let e = g.image(&x);
        for (t, m) in e.torsion.iter().zip(g.torsion()) {
            prop_assert!(!t.is_negative() && t < m, "torsion residue out of range");
        }
        // Adding a relation does not change the class.
        let shifted: Vec<BigInt> = x.iter().zip(a.column(0)).map(|(p, q)| p + q * 3).collect();
        prop_assert_eq!(g.image(&shifted), e);
        Ok(())
    })
}

pub fn kernel_basis(cases: u32) -> Result<(), String> {
    run(cases, matrix(4, 4, 3), |(cols, rows)| {
        let a = IntMatrix::from_rows(cols, &rows);
        let basis = saturated_kernel(&a);
        prop_assert_eq!(basis.len(), cols - rational_rank(&big_rows(&rows)));
        for b in &basis {
            prop_assert!(a.mul_vec(b).iter().all(Zero::is_zero), "basis vector not in kernel");
        }
        for p in box_points(cols, 2) {
            let v = big(&p);
            if a.mul_vec(&v).iter().all(Zero::is_zero) {
                prop_assert!(lattice_contains(&basis, &v), "kernel vector {:?} missing", p);
            }
        }
        Ok(())
    })
}

pub fn nonnegative_solvers(cases: u32) -> Result<(), String> {
    let strat = (matrix(3, 7, 3), vec(0i64..=3, 7), vec(-4i64..=4, 3), any::<bool>());
    run(cases, strat, |((cols, rows), x0, b_free, feasible)| {
        let a = IntMatrix::from_rows(cols, &rows);
        let x0 = big(&x0[..cols]);
        let b: Vec<BigInt> = if feasible { a.mul_vec(&x0) } else { big(&b_free[..rows.len()]) };
        let b = RationalVector::from_integers(&b);
        let fm = lexmin_nonneg_fourier_motzkin(&a, &b);
        let sx = lexmin_nonneg_simplex(&a, &b);
        prop_assert_eq!(&fm, &sx);
        let general = solve_rational(&a, &b, true);
        prop_assert_eq!(general.is_some(), fm.is_some());
        if feasible {
            prop_assert!(fm.is_some());
        }
        if let Some(x) = fm {
            let xv = RationalVector(x.clone());
            prop_assert_eq!(&a.mul_rational_vec(&xv), &b);
            prop_assert!(x.iter().all(|c| !c.is_negative()));
            if feasible {
                let x0q: Vec<BigRational> = x0.iter().map(|c| BigRational::from_integer(c.clone())).collect();
                prop_assert!(x <= x0q, "not lexicographically minimal");
            }
        }
        if let Some(sol) = general {
            prop_assert_eq!(&a.mul_rational_vec(&sol.solution), &b);
            prop_assert!(sol.solution.iter().all(|c| !c.is_negative()));
        }
        Ok(())
    })
}

// -------------------------------------------------------------------- fan

pub fn minimal_cones(cases: u32) -> Result<(), String> {
    let zoo = fan_zoo();
    run(cases, (0..zoo.len(), vec(-4i64..=4, 3)), |(k, v)| {
        let fan = zoo[k].fan();
        let v = &v[..fan.dim()];
        let containing: Vec<&Cone> = fan
            .all_cones()
            .iter()
            .filter(|c| {
                let gens: Vec<Vec<i64>> = c.rays().iter().map(|&i| fan.ray(i).to_vec()).collect();
                simplicial_cone_contains(&gens, v)
            })
            .collect();
        let got = fan.minimal_cone_containing(&RationalVector::from_i64(v)).map_err(|e| fail(e.to_string()))?;
        match got {
            None => prop_assert!(containing.is_empty()),
            Some(c) => {
                prop_assert!(containing.contains(&&c), "{} does not contain v", c);
                for d in &containing {
                    prop_assert!(c.is_subset(d), "{} is not a face of {}", c, d);
                    let inside = fan.cone_contains(d, &RationalVector::from_i64(v)).map_err(|e| fail(e.to_string()))?;
                    prop_assert!(inside);
                }
            }
        }
        Ok(())
    })
}

pub fn star_fans(cases: u32) -> Result<(), String> {
    let zoo = fan_zoo();
    run(cases, (0..zoo.len(), any::<prop::sample::Index>()), |(k, idx)| {
        let fan = zoo[k].fan();
        let sigma = idx.get(fan.all_cones()).clone();
        let star = fan.star_fan(&sigma).map_err(|e| fail(e.to_string()))?;
        let p = star.projection();
        prop_assert_eq!(p.rows(), fan.dim() - fan.cone_dim(&sigma));
        for i in 0..fan.n_rays() {
            let image = p.mul_vec(&fan.ray_big(i));
            prop_assert_eq!(&image[..], star.ray_image(i));
            if sigma.contains_ray(i) {
                prop_assert!(image.iter().all(Zero::is_zero), "ray of sigma survives");
            }
        }
        let mut images = BTreeSet::new();
        for c in star.star_cones() {
            prop_assert!(sigma.is_subset(c));
            let expected: Vec<Vec<BigInt>> = c
                .rays()
                .iter()
                .filter(|&&i| !sigma.contains_ray(i))
                .map(|&i| p.mul_vec(&fan.ray_big(i)))
                .collect();
            prop_assert_eq!(star.image_generators(c), expected);
            prop_assert!(images.insert(star.image_cone(c)), "two star cones share an image");
        }
        prop_assert_eq!(star.image_cone(&sigma), Cone::zero());
        Ok(())
    })
}

pub fn irrelevant_monomials(cases: u32) -> Result<(), String> {
    let zoo = fan_zoo();
    run(cases, (0..zoo.len(), vec(any::<bool>(), 4)), |(k, zeros)| {
        let fan = zoo[k].fan();
        let zeros = &zeros[..fan.n_rays()];
        let point: Vec<BigRational> = zeros.iter().map(|&z| if z { q(0, 1) } else { q(1, 1) }).collect();
        let outside_z = fan.irrelevant_monomials().iter().any(|m| {
            MPoly::monomial(Monomial::new(m.clone()), q(1, 1)).eval_rational(&point) != q(0, 1)
        });
        let pattern = Cone::new(zeros.iter().enumerate().filter(|(_, &z)| z).map(|(i, _)| i));
        let relevant = fan.max_cones().iter().any(|c| pattern.is_subset(c));
        prop_assert_eq!(outside_z, relevant);
        Ok(())
    })
}

// ---------------------------------------------------------------- coxring

fn poly_strategy(nvars: usize, max_terms: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64, i64)>> {
    vec((vec(0u32..=3, nvars), -5i64..=5, 1i64..=3), 1..=max_terms)
}

fn poly(nvars: usize, terms: &[(Vec<u32>, i64, i64)]) -> MPoly {
    MPoly::from_terms(nvars, terms.iter().map(|(e, n, d)| (e.clone(), q(*n, *d))))
}

pub fn exact_division(cases: u32) -> Result<(), String> {
    run(cases, (poly_strategy(3, 4), poly_strategy(3, 3)), |(f, g)| {
        let f = poly(3, &f);
        let g = poly(3, &g);
        prop_assume!(!g.is_zero());
        let h = &f * &g;
        prop_assert_eq!(exact_divide(&h, &g).map_err(|e| fail(e.to_string()))?, Some(f.clone()));
        if let Some(quot) = exact_divide(&f, &g).map_err(|e| fail(e.to_string()))? {
            prop_assert_eq!(&quot * &g, f);
        }
        Ok(())
    })
}

pub fn order_along_laws(cases: u32) -> Result<(), String> {
    let r = p2(["x0", "x1", "x2"]);
    let divisors: Vec<MPoly> = ["x0", "x0 + x1", "x0*x1 + x2^2", "x1 - 2*x2"]
        .iter()
        .map(|s| r.parse(s).unwrap())
        .collect();
    run(cases, (0..4usize, poly_strategy(3, 4), poly_strategy(3, 4), 0u32..=3), |(k, f, h, j)| {
        let p = &divisors[k];
        let f = poly(3, &f);
        let h = poly(3, &h);
        prop_assume!(!f.is_zero() && !h.is_zero());
        let of = order_along(&f, p).map_err(|e| fail(e.to_string()))?;
        let oh = order_along(&h, p).map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(order_along(&(&f * &h), p).map_err(|e| fail(e.to_string()))?, of + oh);
        let fp = &f * &p.pow(j);
        prop_assert_eq!(order_along(&fp, p).map_err(|e| fail(e.to_string()))?, of + j);
        Ok(())
    })
}

pub fn parse_print(cases: u32) -> Result<(), String> {
    let r = p2(["x0", "x1", "x2"]);
    run(cases, poly_strategy(3, 5), |terms| {
        let f = poly(3, &terms);
        let text = r.print(&f);
        prop_assert_eq!(r.parse(&text).map_err(|e| fail(format!("{text}: {e}")))?, f);
        Ok(())
    })
}

/// Homogeneous polynomial: monomials bucketed by degree, then one bucket.
fn homogeneous_poly(r: &ToricCoxRing, seed_monomial: &[u32], picks: &[(usize, i64)]) -> MPoly {
    let n = r.nvars();
    let target = r.monomial_degree(&Monomial::new(seed_monomial[..n].to_vec()));
    let same: Vec<Vec<u32>> = box_points(n, 1)
        .into_iter()
        .map(|p| p.iter().map(|&x| (x + 1) as u32).collect::<Vec<u32>>())
        .filter(|e| r.monomial_degree(&Monomial::new(e.clone())) == target)
        .collect();
    let mut terms = vec![(seed_monomial[..n].to_vec(), q(1, 1))];
    for &(i, c) in picks {
        if !same.is_empty() {
            terms.push((same[i % same.len()].clone(), q(c, 1)));
        }
    }
    MPoly::from_terms(n, terms)
}

fn degree_rings() -> Vec<Arc<ToricCoxRing>> {
    vec![a2z2(), p1xp1(["x0", "x1", "x2", "x3"]), weighted_112(), hirzebruch(2), p2(["x0", "x1", "x2"])]
}

pub fn product_degrees(cases: u32) -> Result<(), String> {
    let rings = degree_rings();
    let strat = (
        0..rings.len(),
        vec(0u32..=2, 4),
        vec((any::<usize>(), -3i64..=3), 0..3),
        vec(0u32..=2, 4),
        vec((any::<usize>(), -3i64..=3), 0..3),
    );
    run(cases, strat, |(k, m1, p1s, m2, p2s)| {
        let r = &rings[k];
        let f = homogeneous_poly(r, &m1, &p1s);
        let g = homogeneous_poly(r, &m2, &p2s);
        prop_assume!(!f.is_zero() && !g.is_zero());
        let df = r.homogeneous_degree(&f).map_err(|e| fail(e.to_string()))?;
        let dg = r.homogeneous_degree(&g).map_err(|e| fail(e.to_string()))?;
        let dfg = r.homogeneous_degree(&(&f * &g)).map_err(|e| fail(e.to_string()))?;
        let (Some(a), Some(b)) = (df.degree(), dg.degree()) else {
            return Err(fail("generated polynomial is not homogeneous"));
        };
        prop_assert_eq!(dfg.degree(), Some(&r.class_group().add(a, b)));
        Ok(())
    })
}

// --------------------------------------------------------------- sections

#[derive(Clone, Debug)]
struct SectionCase {
    unit: (i64, i64, i64, i64),
    negative: bool,
    exps: Vec<(i64, i64)>,
}

fn section_case() -> impl Strategy<Value = SectionCase> {
    ((1i64..=12, 1i64..=6, -3i64..=3, 1i64..=3), any::<bool>(), vec((-4i64..=4, 1i64..=3), 6))
        .prop_map(|(unit, negative, exps)| SectionCase { unit, negative, exps })
}

fn pool_p2() -> (Arc<ToricCoxRing>, Vec<MPoly>) {
    let m = source_model(1);
    (m.ring, m.pool)
}

fn build_section(pool: &[MPoly], c: &SectionCase, allow_negative: bool) -> FactoredSection {
    let (bn, bd, en, ed) = c.unit;
    let mut unit = RadicalScalar::radical(&q(bn, bd), &q(en, ed)).unwrap();
    if allow_negative && c.negative {
        unit = unit.mul(&RadicalScalar::minus_one());
    }
    FactoredSection::new(
        pool[0].nvars(),
        unit,
        pool.iter().zip(&c.exps).map(|(p, (n, d))| (p.clone(), q(*n, *d))),
    )
    .unwrap()
}

pub fn section_algebra(cases: u32) -> Result<(), String> {
    let (_, pool) = pool_p2();
    let strat = (section_case(), section_case(), section_case(), (-4i64..=4, 1i64..=4));
    run(cases, strat, |(a, b, c, (qn, qd))| {
        prop_assume!(qn != 0);
        let e = |r: Result<FactoredSection, _>| r.map_err(|err: coxmap::sections::SectionError| fail(err.to_string()));
        let a = build_section(&pool, &a, false);
        let b = build_section(&pool, &b, true);
        let c = build_section(&pool, &c, true);
        let qq = q(qn, qd);
        prop_assert_eq!(&e(e(a.pow(&qq))?.pow(&qq.recip()))?, &a);
        prop_assert_eq!(e(a.mul(&b))?, e(b.mul(&a))?);
        prop_assert_eq!(e(e(a.mul(&b))?.mul(&c))?, e(a.mul(&e(b.mul(&c))?))?);
        prop_assert!(e(e(b.mul(&c))?.div(&c))? == b);
        prop_assert!(e(b.div(&b))?.is_one());
        let ra = a.root_order().map_err(|err| fail(err.to_string()))?;
        let rb = b.root_order().map_err(|err| fail(err.to_string()))?;
        let rab = e(a.mul(&b))?.root_order().map_err(|err| fail(err.to_string()))?;
        prop_assert!(ra.lcm(&rb).is_multiple_of(&rab), "root order does not divide the lcm");
        // Integer powers of products distribute.
        let k = qn % 3;
        prop_assert_eq!(e(e(a.mul(&b))?.pow_int(k))?, e(e(a.pow_int(k))?.mul(&e(b.pow_int(k))?))?);
        Ok(())
    })
}

pub fn section_expansion(cases: u32) -> Result<(), String> {
    let (_, pool) = pool_p2();
    run(cases, section_case(), |c| {
        let s = build_section(&pool, &c, true);
        let (f, g, r) = s.expand().map_err(|e| fail(e.to_string()))?;
        prop_assert_eq!(&r, &s.root_order().map_err(|e| fail(e.to_string()))?);
        // Recompute f and g from the exponent list.
        let sec = s.as_nonzero().unwrap();
        let rq = BigRational::from_integer(r.clone());
        let mut num = MPoly::one(3);
        let mut den = MPoly::one(3);
        for (p, e) in sec.factors() {
            let k = (e * &rq).to_integer().to_i64().unwrap();
            prop_assert!((e * &rq).is_integer());
            if k > 0 {
                num = &num * &p.pow(k as u32);
            } else {
                den = &den * &p.pow((-k) as u32);
            }
        }
        // f/g = c * num/den for the rational c = unit^r.
        let c = sec.unit().pow(&rq).map_err(|e| fail(e.to_string()))?.to_rational();
        prop_assert!(c.is_some(), "unit^r is not rational");
        let c = c.unwrap();
        prop_assert_eq!(&f * &den.scale(&BigRational::from_integer(c.denom().clone())), &num.scale(&BigRational::from_integer(c.numer().clone())) * &g);
        for p in pool.iter() {
            let ef = order_along(&f, p).map_err(|e| fail(e.to_string()))?;
            let eg = order_along(&g, p).map_err(|e| fail(e.to_string()))?;
            prop_assert!(ef == 0 || eg == 0, "f and g share a factor");
            let expected = &sec.exponent_of(p) * &rq;
            prop_assert_eq!(BigRational::from_integer((i64::from(ef) - i64::from(eg)).into()), expected);
        }
        Ok(())
    })
}

// ----------------------------------------------------------- descriptions

fn character_case() -> impl Strategy<Value = CharacterCase> {
    (0..3usize, 0..TARGET_COUNT, vec(-2i64..=2, 24), vec(0usize..5, 4)).prop_map(|(source, target, exps, units)| {
        CharacterCase {
            source,
            target,
            exps,
            units,
        }
    })
}

fn dres<T>(r: Result<T, coxmap::descriptions::DescriptionError>) -> Result<T, TestCaseError> {
    r.map_err(|e| fail(e.to_string()))
}

pub fn construct_round_trip(cases: u32) -> Result<(), String> {
    run(cases, character_case(), |case| {
        let (model, target, cm) = character_map(&case);
        let d = dres(construct_description(model.ring.clone(), target, &cm))?;
        prop_assert_eq!(&dres(d.induced_character_map())?, &cm);
        prop_assert!(dres(d.check_homogeneity())?.passed());
        // The completed description induces the same characters.
        let done = dres(d.complete())?.description;
        prop_assert_eq!(&dres(done.induced_character_map())?, &cm);
        Ok(())
    })
}

#[derive(Clone, Debug)]
struct TwistCase {
    base: CharacterCase,
    divisor: usize,
    coeffs: Vec<(i64, i64)>,
    twice: bool,
}

fn twist_case() -> impl Strategy<Value = TwistCase> {
    (character_case(), 0..6usize, vec((-2i64..=2, 1i64..=2), 4), any::<bool>()).prop_map(
        |(base, divisor, coeffs, twice)| TwistCase {
            base,
            divisor,
            coeffs,
            twice,
        },
    )
}

/// A random element of the kernel of `L`.
fn kernel_vector(d: &CoxDescription, coeffs: &[(i64, i64)]) -> RationalVector {
    let basis = rational_nullspace(&d.star().ray_projection_map());
    let n = d.images().len();
    let mut v = vec![BigRational::zero(); n];
    for (b, (cn, cd)) in basis.iter().zip(coeffs.iter().cycle()) {
        for (x, y) in v.iter_mut().zip(b.iter()) {
            *x += y * q(*cn, *cd);
        }
    }
    RationalVector(v)
}

/// A constructed description twisted by one or two random kernel vectors.
fn twisted(case: &TwistCase) -> Result<(SourceModel, CharacterMap, CoxDescription, CoxDescription), TestCaseError> {
    let (model, cm, d) = constructed(&case.base);
    let f = &model.pool[case.divisor % model.pool.len()];
    let mut t = dres(d.twist(f, &kernel_vector(&d, &case.coeffs)))?;
    if case.twice {
        let g = &model.pool[(case.divisor + 1) % model.pool.len()];
        let rev: Vec<(i64, i64)> = case.coeffs.iter().rev().copied().collect();
        t = dres(t.twist(g, &kernel_vector(&d, &rev)))?;
    }
    Ok((model, cm, d, t))
}

pub fn twist_invariance(cases: u32) -> Result<(), String> {
    run(cases, twist_case(), |case| {
        let (_, cm, d, t) = twisted(&case)?;
        let hd = dres(d.check_homogeneity())?;
        let ht = dres(t.check_homogeneity())?;
        prop_assert_eq!(&hd, &ht);
        prop_assert_eq!(d.check_relevance().is_some(), t.check_relevance().is_some());
        prop_assert_eq!(&dres(t.induced_character_map())?, &cm);
        prop_assert_eq!(t.zero_set(), d.zero_set());
        prop_assert_eq!(t.sigma(), d.sigma());
        Ok(())
    })
}

pub fn completion_fixpoint(cases: u32) -> Result<(), String> {
    run(cases, twist_case(), |case| {
        let (_, cm, d, t) = twisted(&case)?;
        let c = dres(t.complete())?;
        let done = &c.description;
        for f in done.candidate_divisors() {
            let s = dres(done.divisor_status(&f))?;
            prop_assert!(
                !matches!(s.status, DivisorStatus::NeedsModification { .. }),
                "{} still needs modification",
                done.source().print(&f)
            );
        }
        let again = dres(done.complete())?;
        prop_assert_eq!(&again.description, done);
        prop_assert!(again.divisors.iter().all(|r| !r.modified));
        prop_assert_eq!(done.zero_set(), d.zero_set());
        for &i in done.zero_set() {
            prop_assert!(done.image(i).is_zero());
        }
        prop_assert!(done.target().fan().contains_cone(done.sigma()));
        prop_assert_eq!(&dres(done.induced_character_map())?, &cm);
        Ok(())
    })
}

pub fn pullback_multiplicativity(cases: u32) -> Result<(), String> {
    let strat = (
        character_case(),
        vec(0u32..=2, 4),
        vec((any::<usize>(), -3i64..=3), 0..3),
        vec(0u32..=2, 4),
        vec((any::<usize>(), -3i64..=3), 0..3),
    );
    run(cases, strat, |(case, m1, p1s, m2, p2s)| {
        let (_, _, d) = constructed(&case);
        let d = dres(d.complete())?.description;
        let tgt = d.target();
        let g = homogeneous_poly(tgt, &m1, &p1s);
        let h = homogeneous_poly(tgt, &m2, &p2s);
        prop_assume!(!g.is_zero() && !h.is_zero());
        let pg = dres(d.pullback_polynomial(&g))?;
        let ph = dres(d.pullback_polynomial(&h))?;
        let pgh = dres(d.pullback_polynomial(&(&g * &h)))?;
        let prod = pg.mul(&ph).map_err(|e| fail(e.to_string()))?;
        prop_assert!(pgh.equals(&prod), "pullback of g*h differs from the product");
        Ok(())
    })
}

// ----------------------------------------------------------------- oracle

fn generic_point(raw: &[(i64, i64)], n: usize) -> Vec<Complex64> {
    raw.iter()
        .take(n)
        .map(|(p, d)| Complex64::new(*p as f64 / *d as f64, 0.0))
        .collect()
}

pub fn branch_count(cases: u32) -> Result<(), String> {
    let (src, pool) = pool_p2();
    let tgt = p2(["y0", "y1", "y2"]);
    let strat = (vec(vec((-3i64..=3, 1i64..=3), 6), 3), vec((11i64..=97, 7i64..=13), 3));
    run(cases, strat, |(exps, raw)| {
        let images: Vec<FactoredSection> = exps
            .iter()
            .map(|row| {
                FactoredSection::new(
                    3,
                    RadicalScalar::one(),
                    pool.iter().zip(row).map(|(p, (n, d))| (p.clone(), q(*n, *d))),
                )
                .unwrap()
            })
            .collect();
        let single = images.iter().all(|s| s.root_order().is_ok_and(|r| r.is_one()));
        let d = dres(CoxDescription::new(src.clone(), tgt.clone(), images))?;
        let xi = generic_point(&raw, 3);
        let vs = match evaluate_description(&d, &xi, 1e-9) {
            Err(coxmap::oracle::OracleError::OnPole(_)) => return Err(TestCaseError::reject("point on a pole")),
            r => r.map_err(|e| fail(e.to_string()))?,
        };
        prop_assert!(vs.branch_count % vs.tuples.len() == 0, "{} tuples, {} branches", vs.tuples.len(), vs.branch_count);
        prop_assert_eq!(vs.tuples.len() == 1, single);
        Ok(())
    })
}

pub fn sampling_exact(cases: u32) -> Result<(), String> {
    run(cases, (twist_case(), any::<u64>()), |(case, seed)| {
        let (_, cm, _, t) = twisted(&case)?;
        let done = dres(t.complete())?.description;
        for (phi, reference) in [(&t, None), (&done, Some(&cm))] {
            let rep = sample_agreement(phi, 3, seed, 1e-9, reference);
            prop_assert_eq!(rep.failures, 0, "{:?}", rep.first_failure);
            prop_assert!(rep.max_deviation < 1e-9);
        }
        // Branches of the completed description share one orbit.
        let xi = generic_point(&[(3, 2), (7, 3), (5, 4), (9, 5)], done.source().nvars());
        if let Ok(vs) = evaluate_description(&done, &xi, 1e-9) {
            for t in &vs.tuples {
                prop_assert!(orbit_equal(done.target(), &vs.tuples[0], t, 1e-9).map_err(|e| fail(e.to_string()))?);
            }
        }
        Ok(())
    })
}

pub fn planted() -> CoxDescription {
    let src = p2(["x0", "x1", "x2"]);
    desc(&src, &p1("u", "v"), &[&[("x0", 1, 1)], &[("x1", 2, 1)]])
}

pub fn sampling_planted(cases: u32) -> Result<(), String> {
    let d = planted();
    run(cases, any::<u64>(), |seed| {
        let rep = sample_agreement(&d, 10, seed, 1e-9, None);
        prop_assert!(rep.failures > 0, "no failures with seed {}", seed);
        Ok(())
    })
}
