//! Sparse exact linear algebra: vectors, column-major matrices, and the
//! column reduction engine used for every rank, kernel, and solve in the
//! crate.
//!
//! Reduction is deterministic: the pivot of a column is its entry of lowest
//! row index, and columns are processed in insertion order. A `HighestRow`
//! pivot rule exists solely so tests can re-run computations under a second
//! pivot order and compare.

use crate::field::Field;

/// Sparse vector with entries sorted by row index. Zero entries are never
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec<F> {
    entries: Vec<(u32, F)>,
}

impl<F: Field> Default for SparseVec<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Field> SparseVec<F> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(idx: u32) -> Self {
        SparseVec { entries: vec![(idx, F::one())] }
    }

    pub fn single(idx: u32, v: F) -> Self {
        if v.is_zero() {
            Self::new()
        } else {
            SparseVec { entries: vec![(idx, v)] }
        }
    }

    /// Builds from unsorted entries, merging duplicates and dropping zeros.
    pub fn from_entries(mut raw: Vec<(u32, F)>) -> Self {
        raw.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(u32, F)> = Vec::with_capacity(raw.len());
        for (i, v) in raw {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w = w.add(&v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u32, F)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: u32) -> Option<&F> {
        self.entries
            .binary_search_by_key(&idx, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    /// Entry of lowest row index.
    pub fn lowest(&self) -> Option<(u32, &F)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    /// Entry of highest row index.
    pub fn highest(&self) -> Option<(u32, &F)> {
        self.entries.last().map(|(i, v)| (*i, v))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v.mul(c))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v.neg())).collect(),
        }
    }

    /// self += c * other, by sorted merge.
    pub fn add_scaled(&mut self, other: &Self, c: &F) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut merged: Vec<(u32, F)> = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = self.entries.iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) => {
                    if ia < ib {
                        merged.push(a.next().unwrap().clone());
                    } else if ib < ia {
                        let (i, v) = b.next().unwrap();
                        let w = v.mul(c);
                        if !w.is_zero() {
                            merged.push((*i, w));
                        }
                    } else {
                        let (i, va) = a.next().unwrap();
                        let (_, vb) = b.next().unwrap();
                        let w = va.add(&vb.mul(c));
                        if !w.is_zero() {
                            merged.push((*i, w));
                        }
                    }
                }
                (Some(_), None) => merged.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (i, v) = b.next().unwrap();
                    let w = v.mul(c);
                    if !w.is_zero() {
                        merged.push((*i, w));
                    }
                }
                (None, None) => break,
            }
        }
        self.entries = merged;
    }

    /// Maps row indices through `f`, merging any collisions.
    pub fn map_indices(&self, f: impl Fn(u32) -> u32) -> Self {
        Self::from_entries(self.entries.iter().map(|(i, v)| (f(*i), v.clone())).collect())
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug)]
pub struct SparseMat<F> {
    pub rows: usize,
    pub cols: Vec<SparseVec<F>>,
}

impl<F: Field> SparseMat<F> {
    pub fn zero(rows: usize, ncols: usize) -> Self {
        SparseMat { rows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: (0..n as u32).map(SparseVec::unit).collect() }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    /// Matrix-vector product, treating `v` as a column of coefficients.
    pub fn apply(&self, v: &SparseVec<F>) -> SparseVec<F> {
        let mut out = SparseVec::new();
        for (j, c) in v.iter() {
            out.add_scaled(&self.cols[*j as usize], c);
        }
        out
    }

    /// self * other.
    pub fn compose(&self, other: &SparseMat<F>) -> SparseMat<F> {
        SparseMat {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut red = Reducer::new(ReducerOptions::default());
        for c in &self.cols {
            red.push(c.clone());
        }
        red.rank()
    }
}

/// Which entry of a column acts as its pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotRule {
    #[default]
    LowestRow,
    HighestRow,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReducerOptions {
    pub pivot: PivotRule,
    /// Track, for every stored column, its expression as a combination of
    /// the pushed inputs. Needed for kernels and preimages.
    pub track_combos: bool,
}

/// Result of pushing a column into a [`Reducer`].
#[derive(Debug)]
pub enum Push<F> {
    /// The column was dependent; `combo` (if tracked) expresses 0 as a
    /// combination of inputs, with coefficient 1 on the pushed column.
    Dependent { combo: Option<SparseVec<F>> },
    /// The column was added with the given pivot row and column slot.
    Added { pivot: u32, col: usize },
}

/// Incremental column reduction with unique pivots.
///
/// Stored columns all have distinct pivot rows, so membership in their span
/// and coordinates with respect to them are well defined.
pub struct Reducer<F> {
    opts: ReducerOptions,
    cols: Vec<SparseVec<F>>,
    /// combos[i]: cols[i] as combination of pushed inputs (by push index).
    combos: Vec<SparseVec<F>>,
    pivot_of_row: std::collections::HashMap<u32, usize>,
    pushed: u32,
}

impl<F: Field> Reducer<F> {
    pub fn new(opts: ReducerOptions) -> Self {
        Reducer {
            opts,
            cols: Vec::new(),
            combos: Vec::new(),
            pivot_of_row: std::collections::HashMap::new(),
            pushed: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn columns(&self) -> &[SparseVec<F>] {
        &self.cols
    }

    fn pivot_entry<'a>(&self, v: &'a SparseVec<F>) -> Option<(u32, &'a F)> {
        match self.opts.pivot {
            PivotRule::LowestRow => v.lowest(),
            PivotRule::HighestRow => v.highest(),
        }
    }

    /// Reduces `v` against the stored columns without modifying the reducer.
    /// Returns the remainder and the usage coefficients per stored column
    /// slot, so that `v = remainder + sum(usage[i] * cols[i])`.
    pub fn reduce(&self, v: &SparseVec<F>) -> (SparseVec<F>, Vec<(usize, F)>) {
        let mut rem = v.clone();
        let mut usage: Vec<(usize, F)> = Vec::new();
        while let Some((row, val)) = self.pivot_entry(&rem) {
            let Some(&slot) = self.pivot_of_row.get(&row) else {
                break;
            };
            let col = &self.cols[slot];
            let (_, pv) = self.pivot_entry(col).expect("stored column is nonzero");
            let factor = val.div(pv);
            rem.add_scaled(col, &factor.neg());
            usage.push((slot, factor));
        }
        (rem, usage)
    }

    /// Is `v` in the span of the stored columns?
    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Pushes a column. If it is independent it is stored (in reduced form);
    /// otherwise nothing is stored.
    pub fn push(&mut self, v: SparseVec<F>) -> Push<F> {
        let push_idx = self.pushed;
        self.pushed += 1;
        let (rem, usage) = self.reduce(&v);
        let combo = if self.opts.track_combos {
            let mut c = SparseVec::unit(push_idx);
            for (slot, factor) in &usage {
                c.add_scaled(&self.combos[*slot], &factor.neg());
            }
            Some(c)
        } else {
            None
        };
        match self.pivot_entry(&rem) {
            None => Push::Dependent { combo },
            Some((row, _)) => {
                let slot = self.cols.len();
                self.pivot_of_row.insert(row, slot);
                self.cols.push(rem);
                if let Some(c) = combo {
                    self.combos.push(c);
                }
                Push::Added { pivot: row, col: slot }
            }
        }
    }

    /// Combination of inputs producing stored column `slot` (requires
    /// `track_combos`).
    pub fn combo(&self, slot: usize) -> &SparseVec<F> {
        &self.combos[slot]
    }

    /// Solves `v = sum(x_i * input_i)` over the pushed inputs, if `v` lies in
    /// their span (requires `track_combos`). Returns the input coefficients.
    pub fn solve(&self, v: &SparseVec<F>) -> Option<SparseVec<F>> {
        assert!(self.opts.track_combos, "solve requires combo tracking");
        let (rem, usage) = self.reduce(v);
        if !rem.is_zero() {
            return None;
        }
        let mut coeffs = SparseVec::new();
        for (slot, factor) in usage {
            coeffs.add_scaled(&self.combos[slot], &factor);
        }
        Some(coeffs)
    }
}

/// Kernel basis of a column-major matrix, as coefficient vectors over its
/// columns, in deterministic order.
pub fn kernel_basis<F: Field>(mat: &SparseMat<F>) -> Vec<SparseVec<F>> {
    let mut red = Reducer::new(ReducerOptions { track_combos: true, ..Default::default() });
    let mut kernel = Vec::new();
    for c in &mat.cols {
        if let Push::Dependent { combo } = red.push(c.clone()) {
            kernel.push(combo.expect("combos tracked"));
        }
    }
    kernel
}

/// Reduced column echelon form: every pivot entry is 1 and is the only
/// nonzero entry in its row among the returned columns. Columns are ordered
/// by pivot row. This is the canonical basis used for homology generators.
pub fn reduced_column_echelon<F: Field>(cols: &[SparseVec<F>]) -> Vec<SparseVec<F>> {
    let mut work: Vec<SparseVec<F>> = Vec::new();
    let mut pivot_of_row: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for c in cols {
        let mut rem = c.clone();
        while let Some((row, val)) = rem.lowest() {
            if let Some(&slot) = pivot_of_row.get(&row) {
                let factor = val.clone();
                rem.add_scaled(&work[slot], &factor.neg());
            } else {
                break;
            }
        }
        if let Some((row, val)) = rem.lowest() {
            let inv = F::one().div(val);
            let normalized = rem.scale(&inv);
            // Clear this row from all previously accepted columns.
            for w in work.iter_mut() {
                if let Some(v) = w.get(row) {
                    let f = v.clone().neg();
                    w.add_scaled(&normalized, &f);
                }
            }
            pivot_of_row.insert(row, work.len());
            work.push(normalized);
        }
    }
    let mut order: Vec<usize> = (0..work.len()).collect();
    order.sort_by_key(|&i| work[i].lowest().map(|(r, _)| r).unwrap_or(u32::MAX));
    order.into_iter().map(|i| work[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn v(entries: &[(u32, i64)]) -> SparseVec<Rational> {
        SparseVec::from_entries(
            entries.iter().map(|(i, x)| (*i, Rational::from_int(*x))).collect(),
        )
    }

    #[test]
    fn add_scaled_merges_and_cancels() {
        let mut a = v(&[(0, 1), (2, 3)]);
        let b = v(&[(0, 1), (1, 5), (2, -3)]);
        a.add_scaled(&b, &Rational::from_int(1));
        assert_eq!(a, v(&[(0, 2), (1, 5)]));
        a.add_scaled(&a.clone(), &Rational::from_int(-1));
        assert!(a.is_zero());
    }

    #[test]
    fn reducer_rank_and_membership() {
        let mut red = Reducer::new(ReducerOptions::default());
        red.push(v(&[(0, 1), (1, 1)]));
        red.push(v(&[(1, 1), (2, 1)]));
        red.push(v(&[(0, 1), (2, -1)])); // dependent: row1 - row2
        assert_eq!(red.rank(), 2);
        assert!(red.contains(&v(&[(0, 2), (1, 1), (2, -1)])));
        assert!(!red.contains(&v(&[(0, 1)])));
    }

    #[test]
    fn kernel_of_boundary_like_matrix() {
        // Triangle boundary: 3 vertices, 3 edges forming a cycle.
        let mat = SparseMat {
            rows: 3,
            cols: vec![v(&[(0, -1), (1, 1)]), v(&[(1, -1), (2, 1)]), v(&[(0, 1), (2, -1)])],
        };
        let k = kernel_basis(&mat);
        assert_eq!(k.len(), 1);
        // The kernel vector really is in the kernel.
        assert!(mat.apply(&k[0]).is_zero());
    }

    #[test]
    fn solve_recovers_coefficients() {
        let mut red = Reducer::new(ReducerOptions { track_combos: true, ..Default::default() });
        let a = v(&[(0, 2), (1, 1)]);
        let b = v(&[(1, 1), (2, 4)]);
        red.push(a.clone());
        red.push(b.clone());
        let mut target = SparseVec::new();
        target.add_scaled(&a, &Rational::from_int(3));
        target.add_scaled(&b, &Rational::from_int(-2));
        let x = red.solve(&target).expect("in span");
        let mut rebuilt = SparseVec::new();
        for (i, c) in x.iter() {
            let col = if *i == 0 { &a } else { &b };
            rebuilt.add_scaled(col, c);
        }
        assert_eq!(rebuilt, target);
        assert!(red.solve(&v(&[(3, 1)])).is_none());
    }

    #[test]
    fn rce_is_canonical() {
        let cols = vec![v(&[(0, 2), (1, 2)]), v(&[(0, 1), (1, 2)])];
        let rce = reduced_column_echelon(&cols);
        assert_eq!(rce.len(), 2);
        assert_eq!(rce[0], v(&[(0, 1)]));
        assert_eq!(rce[1], v(&[(1, 1)]));
        // Same span presented in another order gives the same echelon.
        let cols2 = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 1), (1, 1)])];
        let rce2 = reduced_column_echelon(&cols2);
        assert_eq!(rce, rce2);
    }
}
