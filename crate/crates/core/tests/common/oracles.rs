//! Small brute-force reference computations, deliberately independent of
//! the library's own algorithms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// gcd of all `k x k` minors: the `k`-th determinantal divisor.
pub fn determinantal_divisor(a: &[Vec<BigInt>], k: usize) -> BigInt {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let minor: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c].clone()).collect()).collect();
            g = g.gcd(&det(&minor));
        }
    }
    g
}

/// Rank over the rationals by plain Gaussian elimination.
pub fn rational_rank(a: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &pivot;
                for j in c..cols {
                    let d = &f * &m[rank][j];
                    m[r][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Coordinates of `v` in the linearly independent vectors `gens`, if `v`
/// lies in their span.
pub fn coordinates(gens: &[Vec<i64>], v: &[i64]) -> Option<Vec<BigRational>> {
    let dim = v.len();
    let k = gens.len();
    // Augmented system: columns are the generators.
    let mut m: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<BigRational> = gens.iter().map(|g| BigRational::from_integer(g[i].into())).collect();
            row.push(BigRational::from_integer(v[i].into()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..dim).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..dim {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=k {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][k].clone();
    }
    Some(x)
}

/// Membership in a simplicial cone.
pub fn simplicial_cone_contains(gens: &[Vec<i64>], v: &[i64]) -> bool {
    coordinates(gens, v).is_some_and(|x| x.iter().all(|c| !c.is_negative()))
}

/// All integer vectors in `[-b, b]^n`.
pub fn box_points(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-b..=b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}
