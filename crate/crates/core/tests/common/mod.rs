//! Fixtures, random generators and property checks shared by the
//! `properties` and `acceptance` test targets.
#![allow(dead_code)]

pub mod oracles;
pub mod props;

use std::sync::Arc;

use coxmap::coxring::{build_cox_ring, MPoly, ToricCoxRing};
use coxmap::descriptions::{construct_description, CharacterMap, CoxDescription};
use coxmap::fan::{Cone, Fan};
use coxmap::sections::{FactoredSection, RadicalScalar};
use num_bigint::BigInt;
use num_rational::BigRational;

pub fn ring(dim: usize, rays: &[&[i64]], cones: &[&[usize]], names: &[&str]) -> Arc<ToricCoxRing> {
    let fan = Fan::from_lists(dim, rays, cones).unwrap();
    Arc::new(build_cox_ring(fan, names.iter().map(|s| s.to_string()).collect()).unwrap())
}

pub fn p1(a: &str, b: &str) -> Arc<ToricCoxRing> {
    ring(1, &[&[1], &[-1]], &[&[0], &[1]], &[a, b])
}

pub fn p2(n: [&str; 3]) -> Arc<ToricCoxRing> {
    ring(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]], &n)
}

pub fn p1xp1(n: [&str; 4]) -> Arc<ToricCoxRing> {
    ring(
        2,
        &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]],
        &[&[0, 2], &[0, 3], &[1, 2], &[1, 3]],
        &n,
    )
}

pub fn p3() -> Arc<ToricCoxRing> {
    ring(
        3,
        &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
        &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        &["z0", "z1", "z2", "z3"],
    )
}

pub fn a1(name: &str) -> Arc<ToricCoxRing> {
    ring(1, &[&[1]], &[&[0]], &[name])
}

pub fn a2z2() -> Arc<ToricCoxRing> {
    ring(2, &[&[1, 0], &[1, 2]], &[&[0, 1]], &["y1", "y2"])
}

pub fn hirzebruch(a: i64) -> Arc<ToricCoxRing> {
    ring(
        2,
        &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
        &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        &["w0", "w1", "w2", "w3"],
    )
}

pub fn weighted_112() -> Arc<ToricCoxRing> {
    ring(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[0, 2]], &["s0", "s1", "s2"])
}

/// Fans used by the fan properties; all simplicial.
pub fn fan_zoo() -> Vec<Arc<ToricCoxRing>> {
    vec![
        p1("u", "v"),
        p2(["x0", "x1", "x2"]),
        p1xp1(["x0", "x1", "x2", "x3"]),
        p3(),
        a1("t"),
        a2z2(),
        hirzebruch(0),
        hirzebruch(1),
        hirzebruch(3),
        weighted_112(),
    ]
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn sec(r: &ToricCoxRing, factors: &[(&str, i64, i64)]) -> FactoredSection {
    FactoredSection::new(
        r.nvars(),
        RadicalScalar::one(),
        factors.iter().map(|(p, n, d)| (r.parse(p).unwrap(), q(*n, *d))),
    )
    .unwrap()
}

pub fn desc(src: &Arc<ToricCoxRing>, tgt: &Arc<ToricCoxRing>, images: &[&[(&str, i64, i64)]]) -> CoxDescription {
    let ims = images
        .iter()
        .map(|fs| if fs.is_empty() { FactoredSection::Zero } else { sec(src, fs) })
        .collect();
    CoxDescription::new(src.clone(), tgt.clone(), ims).unwrap()
}

/// A source ring with a pool of normalized irreducible factors and their
/// degrees in hand-chosen coordinates of the class group. The balancing
/// factors have unit-vector degrees, one per coordinate.
pub struct SourceModel {
    pub ring: Arc<ToricCoxRing>,
    pub pool: Vec<MPoly>,
    pub degrees: Vec<Vec<i64>>,
    pub balancing: Vec<usize>,
}

pub fn source_model(k: usize) -> SourceModel {
    let (ring, pool, degrees, balancing): (_, &[&str], Vec<Vec<i64>>, Vec<usize>) = match k % 3 {
        0 => (
            p1("u", "v"),
            &["u", "v", "u + v", "u + 2*v"],
            vec![vec![1]; 4],
            vec![1],
        ),
        1 => (
            p2(["x0", "x1", "x2"]),
            &["x0", "x1", "x2", "x0 + x1", "x0*x1 + x2^2", "x0 - x2"],
            vec![vec![1], vec![1], vec![1], vec![1], vec![2], vec![1]],
            vec![2],
        ),
        _ => (
            p1xp1(["x0", "x1", "x2", "x3"]),
            &["x0", "x1", "x2", "x3", "x0 + x1", "x0*x2 + x1*x3"],
            vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![1, 0], vec![1, 1]],
            vec![1, 3],
        ),
    };
    let pool = pool.iter().map(|p| ring.parse(p).unwrap()).collect();
    SourceModel {
        ring,
        pool,
        degrees,
        balancing,
    }
}

pub const TARGET_COUNT: usize = 8;

/// Target ring and zero cone.
pub fn target_model(k: usize) -> (Arc<ToricCoxRing>, Cone) {
    match k % TARGET_COUNT {
        0 => (p1("a", "b"), Cone::zero()),
        1 => (p2(["y0", "y1", "y2"]), Cone::zero()),
        2 => (p2(["y0", "y1", "y2"]), Cone::new([2])),
        3 => (a2z2(), Cone::zero()),
        4 => (p1xp1(["y0", "y1", "y2", "y3"]), Cone::zero()),
        5 => (a1("t"), Cone::zero()),
        6 => (hirzebruch(1), Cone::new([1])),
        _ => (weighted_112(), Cone::zero()),
    }
}

const UNITS: [(i64, i64); 5] = [(1, 1), (1, 1), (2, 1), (1, 3), (6, 5)];

/// Raw material for a random character map: indices and a stream of small
/// integers consumed in order.
#[derive(Clone, Debug)]
pub struct CharacterCase {
    pub source: usize,
    pub target: usize,
    pub exps: Vec<i64>,
    pub units: Vec<usize>,
}

/// A degree-zero rational function built from the pool.
pub fn degree_zero_value(model: &SourceModel, exps: &mut impl Iterator<Item = i64>, unit: usize) -> FactoredSection {
    let ncoords = model.degrees[0].len();
    let mut e = vec![0i64; model.pool.len()];
    let mut total = vec![0i64; ncoords];
    for k in 0..model.pool.len() {
        if model.balancing.contains(&k) {
            continue;
        }
        e[k] = exps.next().unwrap_or(0);
        for c in 0..ncoords {
            total[c] += e[k] * model.degrees[k][c];
        }
    }
    for (c, &b) in model.balancing.iter().enumerate() {
        e[b] = -total[c];
    }
    let (n, d) = UNITS[unit % UNITS.len()];
    FactoredSection::new(
        model.ring.nvars(),
        RadicalScalar::from_rational(&q(n, d)).unwrap(),
        model.pool.iter().zip(&e).map(|(p, &k)| (p.clone(), q(k, 1))),
    )
    .unwrap()
}

pub fn character_map(case: &CharacterCase) -> (SourceModel, Arc<ToricCoxRing>, CharacterMap) {
    let model = source_model(case.source);
    let (target, sigma) = target_model(case.target);
    let basis = target.fan().orthogonal_character_basis(&sigma).unwrap();
    let mut exps = case.exps.iter().copied();
    let values = (0..basis.len())
        .map(|j| degree_zero_value(&model, &mut exps, case.units[j % case.units.len()]))
        .collect();
    (model, target, CharacterMap { sigma, basis, values })
}

pub fn constructed(case: &CharacterCase) -> (SourceModel, CharacterMap, CoxDescription) {
    let (model, target, cm) = character_map(case);
    let d = construct_description(model.ring.clone(), target, &cm).unwrap();
    (model, cm, d)
}
