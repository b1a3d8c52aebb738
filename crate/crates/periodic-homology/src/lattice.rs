//! Exact integer linear algebra: Smith normal form over arbitrary-precision
//! integers, and subgroups of Z^d given by generators (index, cosets,
//! membership, reduction modulo n).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice has infinite index in its ambient group")]
    InfiniteIndex,
}

/// Dense matrix over Z with row-major storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntegerMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let prod = vi * &self[(i, j)];
                out[j] += prod;
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    let tmp = a[(k, j)].clone();
                    a[(k, j)] = a[(swap, j)].clone();
                    a[(swap, j)] = tmp;
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = num / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    /// Inverse of a unimodular matrix, exact over Z.
    pub fn unimodular_inverse(&self) -> IntegerMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let det = self.determinant();
        assert!(det.abs().is_one(), "matrix is not unimodular");
        // Adjugate via cofactors; n is small everywhere this is used.
        let mut adj = IntegerMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let c = minor.determinant();
                let s = if (i + j) % 2 == 0 { c } else { -c };
                adj[(j, i)] = s;
            }
        }
        if det.is_one() {
            adj
        } else {
            let mut neg = adj;
            for v in neg.data.iter_mut() {
                *v = -std::mem::take(v);
            }
            neg
        }
    }

    fn minor(&self, row: usize, col: usize) -> IntegerMatrix {
        let mut m = IntegerMatrix::zero(self.rows - 1, self.cols - 1);
        let mut r = 0;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let mut c = 0;
            for j in 0..self.cols {
                if j == col {
                    continue;
                }
                m[(r, c)] = self[(i, j)].clone();
                c += 1;
            }
            r += 1;
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

    /// row a += c * row b
    fn add_row(&mut self, a: usize, b: usize, c: &BigInt) {
        for j in 0..self.cols {
            let addend = c * &self[(b, j)];
            self[(a, j)] += addend;
        }
    }

    /// col a += c * col b
    fn add_col(&mut self, a: usize, b: usize, c: &BigInt) {
        for i in 0..self.rows {
            let addend = c * &self[(i, b)];
            self[(i, a)] += addend;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            self[(a, j)] = -std::mem::take(&mut self[(a, j)]);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

/// U * A * V = D with U, V unimodular and D diagonal, nonnegative, with
/// d_1 | d_2 | ... | d_r followed by zeros.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Deterministic Smith normal form. Pivot selection: smallest nonzero
/// absolute value in the remaining submatrix, ties broken by (row, col).
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithDecomposition {
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(a.rows);
    let mut v = IntegerMatrix::identity(a.cols);
    let limit = a.rows.min(a.cols);

    let mut t = 0;
    while t < limit {
        // Locate pivot.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..d.rows {
            for j in t..d.cols {
                if d[(i, j)].is_zero() {
                    continue;
                }
                match &pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        let cur = d[(i, j)].abs();
                        let best = d[(*pi, *pj)].abs();
                        if cur < best {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break; // remaining submatrix is zero
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }

        'improve: loop {
            // Clear column t using euclidean steps.
            for i in t + 1..d.rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                let negq = -q;
                d.add_row(i, t, &negq);
                u.add_row(i, t, &negq);
                if !d[(i, t)].is_zero() {
                    // Remainder is a smaller positive pivot candidate.
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    continue 'improve;
                }
            }
            // Clear row t.
            for j in t + 1..d.cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                let negq = -q;
                d.add_col(j, t, &negq);
                v.add_col(j, t, &negq);
                if !d[(t, j)].is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    continue 'improve;
                }
            }
            // Enforce divisibility of the rest of the submatrix.
            for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                        let one = BigInt::one();
                        d.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                        continue 'improve;
                    }
                }
            }
            break;
        }
        t += 1;
    }

    SmithDecomposition { u, d, v }
}

/// Finite or infinite group index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupIndex {
    Finite(BigInt),
    Infinite,
}

impl GroupIndex {
    pub fn is_finite(&self) -> bool {
        matches!(self, GroupIndex::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            GroupIndex::Finite(n) => Some(n),
            GroupIndex::Infinite => None,
        }
    }
}

impl std::fmt::Display for GroupIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupIndex::Finite(n) => write!(f, "{}", n),
            GroupIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Subgroup of Z^d spanned by the rows of a generator matrix, with its
/// Smith decomposition cached at construction.
#[derive(Clone, Debug)]
pub struct IntegerLattice {
    pub ambient_rank: usize,
    pub generators: IntegerMatrix,
    snf: SmithDecomposition,
}

impl IntegerLattice {
    pub fn new(ambient_rank: usize, generators: IntegerMatrix) -> Self {
        assert_eq!(generators.cols, ambient_rank, "generators must have d columns");
        let snf = smith_normal_form(&generators);
        IntegerLattice { ambient_rank, generators, snf }
    }

    pub fn from_rows_i64(ambient_rank: usize, rows: &[Vec<i64>]) -> Self {
        let m = if rows.is_empty() {
            IntegerMatrix::zero(0, ambient_rank)
        } else {
            IntegerMatrix::from_rows_i64(rows)
        };
        Self::new(ambient_rank, m)
    }

    /// Z^d itself.
    pub fn full(ambient_rank: usize) -> Self {
        Self::new(ambient_rank, IntegerMatrix::identity(ambient_rank))
    }

    pub fn snf(&self) -> &SmithDecomposition {
        &self.snf
    }

    pub fn rank(&self) -> usize {
        self.snf.rank()
    }

    /// [Z^d : L], finite exactly when the generators span rank d.
    pub fn subgroup_index(&self) -> GroupIndex {
        if self.rank() < self.ambient_rank {
            return GroupIndex::Infinite;
        }
        let mut idx = BigInt::one();
        for x in self.snf.diagonal() {
            if !x.is_zero() {
                idx *= x;
            }
        }
        GroupIndex::Finite(idx)
    }

    /// Coordinates of `x` in the Smith basis: c = x * V. Membership in the
    /// lattice is equivalent to d_i | c_i for i < rank and c_i = 0 beyond.
    fn smith_coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ambient_rank);
        self.snf.v.apply_row(x)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let c = self.smith_coordinates(x);
        let diag = self.snf.diagonal();
        let r = self.snf.rank();
        for (i, ci) in c.iter().enumerate() {
            if i < r {
                if !(ci % &diag[i]).is_zero() {
                    return false;
                }
            } else if !ci.is_zero() {
                return false;
            }
        }
        true
    }

    pub fn contains_i64(&self, x: &[i64]) -> bool {
        let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
        self.contains(&v)
    }

    /// Writes `x` as an integer combination of the generator rows, if
    /// possible.
    pub fn express(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.smith_coordinates(x);
        let diag = self.snf.diagonal();
        let r = self.snf.rank();
        let m = self.generators.rows;
        let mut z = vec![BigInt::zero(); m];
        for (i, ci) in c.iter().enumerate() {
            if i < r {
                let (q, rem) = ci.div_rem(&diag[i]);
                if !rem.is_zero() {
                    return None;
                }
                if i < m {
                    z[i] = q;
                }
            } else if !ci.is_zero() {
                return None;
            }
        }
        Some(self.snf.u.apply_row(&z))
    }

    /// Exactly index-many coset representatives of Z^d / L, reduced to the
    /// fundamental box of the Smith basis, zero first.
    pub fn coset_representatives(&self) -> Result<Vec<Vec<BigInt>>, LatticeError> {
        let GroupIndex::Finite(_) = self.subgroup_index() else {
            return Err(LatticeError::InfiniteIndex);
        };
        let d = self.ambient_rank;
        let diag = self.snf.diagonal();
        // Smith basis rows: B = V^{-1}; L = <d_i * b_i> and Z^d = <b_i>.
        let b = self.snf.v.unimodular_inverse();
        let mut reps: Vec<Vec<BigInt>> = Vec::new();
        let mut counter = vec![BigInt::zero(); d];
        loop {
            let mut rep = vec![BigInt::zero(); d];
            for i in 0..d {
                if counter[i].is_zero() {
                    continue;
                }
                for j in 0..d {
                    let add = &counter[i] * &b[(i, j)];
                    rep[j] += add;
                }
            }
            reps.push(rep);
            // Lexicographic increment with mixed radix given by the diagonal.
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(reps);
                }
                i -= 1;
                counter[i] += 1;
                if counter[i] < diag[i] {
                    break;
                }
                counter[i] = BigInt::zero();
            }
        }
    }

    /// [Z^d : L + (n_1 Z x ... x n_d Z)]; always finite for n_i >= 1.
    pub fn index_mod(&self, n: &[u64]) -> BigInt {
        assert_eq!(n.len(), self.ambient_rank);
        assert!(n.iter().all(|&x| x >= 1), "window sizes must be positive");
        let d = self.ambient_rank;
        let m = self.generators.rows;
        let mut rows = IntegerMatrix::zero(m + d, d);
        for i in 0..m {
            for j in 0..d {
                rows[(i, j)] = self.generators[(i, j)].clone();
            }
        }
        for (i, &ni) in n.iter().enumerate() {
            rows[(m + i, i)] = BigInt::from(ni);
        }
        let aug = IntegerLattice::new(d, rows);
        match aug.subgroup_index() {
            GroupIndex::Finite(x) => x,
            GroupIndex::Infinite => unreachable!("augmented lattice has full rank"),
        }
    }
}
