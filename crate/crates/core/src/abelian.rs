//! Exact integer and rational linear algebra.
//!
//! Smith normal form with transforms, cokernel presentations of finitely
//! generated abelian groups, saturated integer kernels in Hermite normal
//! form, and rational linear systems optionally constrained to the
//! nonnegative orthant.
//!
//! Everything here is arbitrary precision; no floating point is involved.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Above this many variables nonnegative feasibility switches from
/// Fourier–Motzkin elimination to the simplex method.
pub const FOURIER_MOTZKIN_MAX_VARS: usize = 12;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have
    /// length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        Self::from_big_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_big_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length does not match column count");
            data.extend(r);
        }
        IntMatrix {
            rows: nrows,
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_big_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length does not match row count");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_rational_vec(&self, v: &RationalVector) -> RationalVector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        RationalVector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.iter())
                        .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                        .fold(BigRational::zero(), |acc, x| acc + x)
                })
                .collect(),
        )
    }

    /// Submatrix consisting of the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> IntMatrix {
        let mut m = Self::zeros(self.rows, columns.len());
        for (jj, &j) in columns.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[src]
    fn add_row_multiple(&mut self, target: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let delta = k * self.get(src, j);
            self.data[target * self.cols + j] += delta;
        }
    }

    /// col[target] += k * col[src]
    fn add_col_multiple(&mut self, target: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let delta = k * self.get(i, src);
            self.data[i * self.cols + target] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl std::ops::Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// The diagonal entries `d_1 | d_2 | ...`, zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form by pivoting on the entry of least absolute value.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for k in 0..m.min(n) {
        loop {
            // Smallest nonzero entry of the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..m {
                for j in k..n {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if d.get(pi, pj).abs() <= x.abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return SmithDecomposition { u, d, v };
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let mut dirty = false;
            for i in k + 1..m {
                if d.get(i, k).is_zero() {
                    continue;
                }
                let q = -d.get(i, k).div_floor(d.get(k, k));
                d.add_row_multiple(i, k, &q);
                u.add_row_multiple(i, k, &q);
                if !d.get(i, k).is_zero() {
                    dirty = true;
                }
            }
            for j in k + 1..n {
                if d.get(k, j).is_zero() {
                    continue;
                }
                let q = -d.get(k, j).div_floor(d.get(k, k));
                d.add_col_multiple(j, k, &q);
                v.add_col_multiple(j, k, &q);
                if !d.get(k, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Row and column k are clear; enforce divisibility of the block.
            let p = d.get(k, k).clone();
            let offender = (k + 1..m)
                .find(|&i| (k + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(k, i, &one);
                    u.add_row_multiple(k, i, &one);
                }
                None => {
                    if p.is_negative() {
                        d.negate_row(k);
                        u.negate_row(k);
                    }
                    break;
                }
            }
        }
    }
    SmithDecomposition { u, d, v }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns the nonzero rows: echelon shape, positive pivots, entries above
/// each pivot reduced into `[0, pivot)`.
pub fn hermite_basis(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut work: Vec<Vec<BigInt>> = rows.to_vec();
    for r in &work {
        assert_eq!(r.len(), ncols, "row length does not match column count");
    }
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        if pivot_row >= work.len() {
            break;
        }
        loop {
            // Row with the smallest nonzero entry in this column goes on top.
            let best = (pivot_row..work.len())
                .filter(|&i| !work[i][col].is_zero())
                .min_by(|&a, &b| work[a][col].abs().cmp(&work[b][col].abs()));
            let Some(best) = best else { break };
            work.swap(pivot_row, best);
            let mut clean = true;
            for i in pivot_row + 1..work.len() {
                if work[i][col].is_zero() {
                    continue;
                }
                let q = work[i][col].div_floor(&work[pivot_row][col]);
                let top = work[pivot_row].clone();
                for (x, t) in work[i].iter_mut().zip(&top) {
                    *x -= &q * t;
                }
                if !work[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                if work[pivot_row][col].is_negative() {
                    for x in work[pivot_row].iter_mut() {
                        *x = -&*x;
                    }
                }
                pivots.push((pivot_row, col));
                pivot_row += 1;
                break;
            }
        }
    }
    work.truncate(pivot_row);
    for &(r, c) in &pivots {
        let p = work[r][c].clone();
        for i in 0..r {
            let q = work[i][c].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let src = work[r].clone();
            for (x, s) in work[i].iter_mut().zip(&src) {
                *x -= &q * s;
            }
        }
    }
    work
}

/// Whether `v` lies in the lattice with Hermite basis `basis`.
pub fn lattice_contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    let mut rest = v.to_vec();
    for row in basis {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if rest[c].is_zero() {
            continue;
        }
        let (q, r) = rest[c].div_rem(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for (x, b) in rest.iter_mut().zip(row) {
            *x -= &q * b;
        }
    }
    rest.iter().all(Zero::is_zero)
}

/// Element of a finitely generated abelian group in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub free: Vec<BigInt>,
    /// Residues in `[0, d_i)`.
    pub torsion: Vec<BigInt>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.free.iter().map(|x| x.to_string()).collect();
        parts.extend(self.torsion.iter().map(|x| format!("{x}~")));
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(", "))
        }
    }
}

/// `Z^free_rank (+) Z/d_1 (+) ... (+) Z/d_k` together with a surjection
/// from an ambient `Z^n`.
///
/// Rows of `quotient_map` are the torsion coordinates first (one per `d_i`)
/// followed by the free coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGAbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
    quotient_map: IntMatrix,
}

impl FGAbelianGroup {
    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn quotient_map(&self) -> &IntMatrix {
        &self.quotient_map
    }

    pub fn ambient_rank(&self) -> usize {
        self.quotient_map.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            free: vec![BigInt::zero(); self.free_rank],
            torsion: vec![BigInt::zero(); self.torsion.len()],
        }
    }

    fn normalize(&self, free: Vec<BigInt>, torsion: Vec<BigInt>) -> GroupElement {
        let torsion = torsion
            .into_iter()
            .zip(&self.torsion)
            .map(|(t, d)| t.mod_floor(d))
            .collect();
        GroupElement { free, torsion }
    }

    /// Image of an ambient vector.
    pub fn image(&self, x: &[BigInt]) -> GroupElement {
        let coords = self.quotient_map.mul_vec(x);
        let t = self.torsion.len();
        self.normalize(coords[t..].to_vec(), coords[..t].to_vec())
    }

    pub fn image_i64(&self, x: &[i64]) -> GroupElement {
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.image(&big)
    }

    /// Image of the `i`-th standard basis vector.
    pub fn basis_image(&self, i: usize) -> GroupElement {
        let mut e = vec![BigInt::zero(); self.ambient_rank()];
        e[i] = BigInt::one();
        self.image(&e)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.normalize(
            a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            a.torsion.iter().zip(&b.torsion).map(|(x, y)| x + y).collect(),
        )
    }

    pub fn scale(&self, a: &GroupElement, k: &BigInt) -> GroupElement {
        self.normalize(
            a.free.iter().map(|x| x * k).collect(),
            a.torsion.iter().map(|x| x * k).collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(a, &BigInt::from(-1))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }
}

/// Cokernel `Z^rows / colspan(A)` with its quotient homomorphism.
///
/// The free coordinates are the Hermite basis of the left kernel of `A`,
/// so the presentation does not depend on pivoting choices.
pub fn cokernel(a: &IntMatrix) -> FGAbelianGroup {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let n = a.rows();
    let mut torsion = Vec::new();
    let mut torsion_rows = Vec::new();
    let mut free_rows = Vec::new();
    for i in 0..n {
        let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if d.is_zero() {
            free_rows.push(snf.u.row(i).to_vec());
        } else if !d.is_one() {
            let row = snf.u.row(i).iter().map(|x| x.mod_floor(&d)).collect();
            torsion_rows.push(row);
            torsion.push(d);
        }
    }
    let free = hermite_basis(&free_rows, n);
    let free_rank = free.len();
    let mut rows = torsion_rows;
    rows.extend(free);
    FGAbelianGroup {
        free_rank,
        torsion,
        quotient_map: IntMatrix::from_big_rows(n, rows),
    }
}

/// Hermite basis of `{x in Z^cols : A x = 0}`.
pub fn saturated_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let gens: Vec<Vec<BigInt>> = (rank..a.cols()).map(|j| snf.v.column(j)).collect();
    hermite_basis(&gens, a.cols())
}

/// Rank over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Vector of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RationalVector(pub Vec<BigRational>);

impl RationalVector {
    pub fn zeros(n: usize) -> Self {
        RationalVector(vec![BigRational::zero(); n])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        RationalVector(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn from_integers(v: &[BigInt]) -> Self {
        RationalVector(v.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigRational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect()
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Result of [`solve_rational`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSolution {
    pub solution: RationalVector,
    /// Basis of the rational null space of `A`.
    pub nullspace: Vec<RationalVector>,
}

/// Solves `A x = b` over the rationals.
///
/// Without `nonneg` the particular solution sets every free column to zero.
/// With `nonneg` the returned point is the lexicographically smallest
/// solution with `x >= 0`, found by Fourier–Motzkin elimination for at most
/// [`FOURIER_MOTZKIN_MAX_VARS`] unknowns and by the simplex method above.
pub fn solve_rational(a: &IntMatrix, b: &RationalVector, nonneg: bool) -> Option<RationalSolution> {
    assert_eq!(a.rows(), b.len(), "right-hand side length does not match row count");
    let rows = to_rational_rows(a);
    let (rref, pivots) = reduced_row_echelon(&rows, Some(&b.0));
    let n = a.cols();
    // Inconsistent row: 0 = nonzero.
    for row in rref.iter().skip(pivots.len()) {
        if !row[n].is_zero() {
            return None;
        }
    }
    let nullspace = nullspace_from_rref(&rref, &pivots, n);
    let solution = if nonneg {
        let x = if n <= FOURIER_MOTZKIN_MAX_VARS {
            lexmin_nonneg_fourier_motzkin(a, b)
        } else {
            lexmin_nonneg_simplex(a, b)
        }?;
        RationalVector(x)
    } else {
        let mut x = vec![BigRational::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = rref[r][n].clone();
        }
        RationalVector(x)
    };
    Some(RationalSolution { solution, nullspace })
}

fn to_rational_rows(a: &IntMatrix) -> Vec<Vec<BigRational>> {
    (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .cloned()
                .map(BigRational::from_integer)
                .collect()
        })
        .collect()
}

/// Gauss–Jordan elimination; with `rhs` the matrix is augmented by one column.
fn reduced_row_echelon(
    rows: &[Vec<BigRational>],
    rhs: Option<&[BigRational]>,
) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            if let Some(b) = rhs {
                r.push(b[i].clone());
            }
            r
        })
        .collect();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let top = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, t) in row.iter_mut().zip(&top) {
                *x -= &f * t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

fn nullspace_from_rref(rref: &[Vec<BigRational>], pivots: &[usize], n: usize) -> Vec<RationalVector> {
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); n];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rref[r][free].clone();
            }
            RationalVector(v)
        })
        .collect()
}

/// Rational null space basis of `A`.
pub fn rational_nullspace(a: &IntMatrix) -> Vec<RationalVector> {
    let (rref, pivots) = reduced_row_echelon(&to_rational_rows(a), None);
    nullspace_from_rref(&rref, &pivots, a.cols())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Constraint {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
}

impl Constraint {
    /// Scales so the first nonzero coefficient has absolute value one.
    /// Equalities additionally get a positive leading coefficient.
    fn normalized(mut self, equality: bool) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|x| !x.is_zero()).cloned() {
            let s = if equality { lead.recip() } else { lead.abs().recip() };
            for x in self.coeffs.iter_mut() {
                *x *= &s;
            }
            self.rhs *= &s;
        }
        self
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Value of the left side minus coefficient `k`, at a partial point.
    fn rest(&self, x: &[BigRational], skip: usize) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .fold(BigRational::zero(), |acc, (_, (c, v))| acc + c * v)
    }
}

enum Eliminated {
    /// `x_k = (rhs - sum_{j != k} c_j x_j) / c_k`.
    Substituted(Constraint),
    /// Inequalities `c . x <= rhs` that involved `x_k`.
    Bounded(Vec<Constraint>),
}

/// Lexicographically smallest `x >= 0` with `A x = b`, by exact
/// Fourier–Motzkin elimination. Equalities are eliminated by substitution.
pub fn lexmin_nonneg_fourier_motzkin(a: &IntMatrix, b: &RationalVector) -> Option<Vec<BigRational>> {
    let n = a.cols();
    let mut equalities: Vec<Constraint> = to_rational_rows(a)
        .into_iter()
        .zip(b.iter().cloned())
        .map(|(coeffs, rhs)| Constraint { coeffs, rhs }.normalized(true))
        .collect();
    let mut inequalities: Vec<Constraint> = (0..n)
        .map(|i| {
            let mut coeffs = vec![BigRational::zero(); n];
            coeffs[i] = -BigRational::one();
            Constraint {
                coeffs,
                rhs: BigRational::zero(),
            }
        })
        .collect();
    let mut log: Vec<(usize, Eliminated)> = Vec::with_capacity(n);

    for k in (0..n).rev() {
        if let Some(pos) = equalities.iter().position(|e| !e.coeffs[k].is_zero()) {
            let eq = equalities.swap_remove(pos);
            let substitute = |c: Constraint, equality: bool| -> Constraint {
                if c.coeffs[k].is_zero() {
                    return c;
                }
                let f = &c.coeffs[k] / &eq.coeffs[k];
                let coeffs = c.coeffs.iter().zip(&eq.coeffs).map(|(x, e)| x - &f * e).collect();
                Constraint {
                    coeffs,
                    rhs: &c.rhs - &f * &eq.rhs,
                }
                .normalized(equality)
            };
            equalities = equalities.into_iter().map(|c| substitute(c, true)).collect();
            inequalities = inequalities.into_iter().map(|c| substitute(c, false)).collect();
            log.push((k, Eliminated::Substituted(eq)));
        } else {
            let (involved, mut kept): (Vec<_>, Vec<_>) =
                inequalities.into_iter().partition(|c| !c.coeffs[k].is_zero());
            let (uppers, lowers): (Vec<_>, Vec<_>) =
                involved.iter().partition(|c| c.coeffs[k].is_positive());
            for up in &uppers {
                for lo in &lowers {
                    // up: x_k <= ..., lo: x_k >= ...; both scaled to |c_k| = 1.
                    let su = up.coeffs[k].abs().recip();
                    let sl = lo.coeffs[k].abs().recip();
                    let coeffs = up
                        .coeffs
                        .iter()
                        .zip(&lo.coeffs)
                        .map(|(u, l)| u * &su + l * &sl)
                        .collect();
                    kept.push(
                        Constraint {
                            coeffs,
                            rhs: &up.rhs * &su + &lo.rhs * &sl,
                        }
                        .normalized(false),
                    );
                }
            }
            inequalities = kept;
            log.push((k, Eliminated::Bounded(involved)));
        }
        // Drop constant constraints, failing fast on contradictions.
        let mut next_eq = Vec::with_capacity(equalities.len());
        for e in equalities {
            if e.is_trivial() {
                if !e.rhs.is_zero() {
                    return None;
                }
            } else {
                next_eq.push(e);
            }
        }
        equalities = next_eq;
        let mut next_ineq = Vec::with_capacity(inequalities.len());
        for c in inequalities {
            if c.is_trivial() {
                if c.rhs.is_negative() {
                    return None;
                }
            } else {
                next_ineq.push(c);
            }
        }
        next_ineq.sort();
        next_ineq.dedup();
        inequalities = next_ineq;
    }

    let mut x = vec![BigRational::zero(); n];
    for (k, step) in log.into_iter().rev() {
        match step {
            Eliminated::Substituted(eq) => {
                x[k] = (&eq.rhs - eq.rest(&x, k)) / &eq.coeffs[k];
            }
            Eliminated::Bounded(cs) => {
                let mut lower: Option<BigRational> = None;
                let mut upper: Option<BigRational> = None;
                for c in &cs {
                    let bound = (&c.rhs - c.rest(&x, k)) / &c.coeffs[k];
                    if c.coeffs[k].is_positive() {
                        upper = Some(match upper {
                            Some(u) if u <= bound => u,
                            _ => bound,
                        });
                    } else {
                        lower = Some(match lower {
                            Some(l) if l >= bound => l,
                            _ => bound,
                        });
                    }
                }
                let value = lower.unwrap_or_else(BigRational::zero);
                if let Some(u) = upper {
                    debug_assert!(value <= u, "projection step produced an empty interval");
                    if value > u {
                        return None;
                    }
                }
                x[k] = value;
            }
        }
    }
    Some(x)
}

/// Lexicographically smallest `x >= 0` with `A x = b`, by a sequence of
/// exact two-phase simplex solves (minimise `x_0`, fix it, minimise `x_1`, ...).
pub fn lexmin_nonneg_simplex(a: &IntMatrix, b: &RationalVector) -> Option<Vec<BigRational>> {
    let n = a.cols();
    let mut rows = to_rational_rows(a);
    let mut rhs = b.0.clone();
    let mut x = Vec::new();
    for k in 0..n {
        let mut cost = vec![BigRational::zero(); n];
        cost[k] = BigRational::one();
        let (_, point) = simplex_minimize(&rows, &rhs, &cost)?;
        let mut fix = vec![BigRational::zero(); n];
        fix[k] = BigRational::one();
        rows.push(fix);
        rhs.push(point[k].clone());
        x = point;
    }
    if n == 0 {
        // Nothing to optimise; only consistency matters.
        return rhs.iter().all(Zero::is_zero).then(Vec::new);
    }
    Some(x)
}

/// Minimises `cost . x` subject to `rows x = rhs`, `x >= 0`, with Bland's
/// rule. Returns `None` when infeasible. The objective must be bounded below
/// on the feasible set (true for nonnegative costs).
fn simplex_minimize(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
    cost: &[BigRational],
) -> Option<(BigRational, Vec<BigRational>)> {
    let m = rows.len();
    let n = cost.len();
    // Tableau columns: n originals, m artificials, then the right-hand side.
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let negate = rhs[i].is_negative();
        let mut r: Vec<BigRational> = row
            .iter()
            .map(|x| if negate { -x.clone() } else { x.clone() })
            .collect();
        r.extend((0..m).map(|j| if j == i { BigRational::one() } else { BigRational::zero() }));
        r.push(if negate { -rhs[i].clone() } else { rhs[i].clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase one: minimise the sum of artificials.
    let mut phase_one = vec![BigRational::zero(); width - 1];
    for c in phase_one.iter_mut().skip(n) {
        *c = BigRational::one();
    }
    run_simplex(&mut t, &mut basis, &phase_one, width - 1);
    let infeasibility: BigRational = basis
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= n)
        .map(|(i, _)| t[i][width - 1].clone())
        .fold(BigRational::zero(), |a, b| a + b);
    if !infeasibility.is_zero() {
        return None;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            } else {
                t.remove(i);
                basis.remove(i);
                continue;
            }
        }
        i += 1;
    }
    // Phase two with the artificial columns frozen out.
    let mut phase_two = vec![BigRational::zero(); width - 1];
    phase_two[..n].clone_from_slice(cost);
    run_simplex(&mut t, &mut basis, &phase_two, n);
    let mut x = vec![BigRational::zero(); n];
    for (i, &v) in basis.iter().enumerate() {
        x[v] = t[i][width - 1].clone();
    }
    let value = cost.iter().zip(&x).fold(BigRational::zero(), |a, (c, v)| a + c * v);
    Some((value, x))
}

/// Simplex iterations on an existing basis. Only the first `eligible`
/// columns may enter.
fn run_simplex(t: &mut [Vec<BigRational>], basis: &mut [usize], cost: &[BigRational], eligible: usize) {
    let rhs_col = cost.len();
    loop {
        // Reduced cost of column j: c_j - c_B . column_j.
        let entering = (0..eligible).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut r = cost[j].clone();
            for (i, &bv) in basis.iter().enumerate() {
                r -= &cost[bv] * &t[i][j];
            }
            r.is_negative()
        });
        let Some(j) = entering else { return };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..t.len() {
            if !t[i][j].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs_col] / &t[i][j];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((i, _)) = leave else {
            // Unbounded; cannot happen for the objectives used here.
            return;
        };
        pivot(t, basis, i, j);
    }
}

fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], row: usize, col: usize) {
    let inv = t[row][col].recip();
    for x in t[row].iter_mut() {
        *x *= &inv;
    }
    let top = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (x, p) in r.iter_mut().zip(&top) {
            *x -= &f * p;
        }
    }
    basis[row] = col;
}
