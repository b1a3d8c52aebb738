//! Unit-cell templates for d-periodic complexes, validation of the periodic
//! boundary condition, and construction of finite windows.
//!
//! A template lists one cell per translation class; each boundary entry
//! carries the translation shift between the cell's representative and the
//! face's representative. Windows are built either with periodic boundary
//! conditions (X_n) or as genuine finite subcomplexes of the infinite cover
//! (Y_n, truncated).

use crate::complex::{ChainMap, FiniteCellComplex};
use crate::field::Field;
use crate::sparse::{SparseMat, SparseVec};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),
    #[error("cell `{cell}` references unknown face `{face}`")]
    DanglingFace { cell: String, face: String },
    #[error("cell `{cell}`: {detail}")]
    DimensionError { cell: String, detail: String },
    #[error(
        "boundary square is nonzero: cell `{cell}` and face `{face}` at shift {shift:?} (coefficient {coeff})"
    )]
    BoundarySquareNonzero {
        cell: String,
        face: String,
        shift: Vec<i64>,
        coeff: i64,
    },
    #[error("window sizes {larger:?} are not componentwise divisible by {smaller:?}")]
    DivisibilityError { larger: Vec<u64>, smaller: Vec<u64> },
}

#[derive(Clone, Debug)]
pub struct BoundaryEntry {
    pub face: usize,
    pub coeff: i64,
    pub shift: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct TemplateCell {
    pub id: String,
    pub dim: usize,
    pub boundary: Vec<BoundaryEntry>,
}

#[derive(Clone, Debug)]
pub struct PeriodicTemplate {
    pub d: usize,
    pub cells: Vec<TemplateCell>,
    /// Cell indices grouped by dimension, in template order.
    pub by_dim: Vec<Vec<usize>>,
}

/// Group-ring valued matrix: each entry maps a shift vector to an integer
/// coefficient. Used to state the periodic boundary condition exactly.
#[derive(Clone, Debug)]
pub struct ShiftPolyMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: HashMap<(usize, usize), HashMap<Vec<i64>, i64>>,
}

impl ShiftPolyMatrix {
    fn zero(rows: usize, cols: usize) -> Self {
        ShiftPolyMatrix { rows, cols, entries: HashMap::new() }
    }

    fn add(&mut self, r: usize, c: usize, shift: Vec<i64>, coeff: i64) {
        let cell = self.entries.entry((r, c)).or_default();
        *cell.entry(shift).or_insert(0) += coeff;
    }

    /// Shift-wise convolution product self * other.
    pub fn compose(&self, other: &ShiftPolyMatrix) -> ShiftPolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ShiftPolyMatrix::zero(self.rows, other.cols);
        for ((k, j), poly_b) in &other.entries {
            for ((r, k2), poly_a) in &self.entries {
                if k2 != k {
                    continue;
                }
                for (sb, cb) in poly_b {
                    for (sa, ca) in poly_a {
                        let shift: Vec<i64> = sa.iter().zip(sb).map(|(x, y)| x + y).collect();
                        out.add(*r, *j, shift, ca * cb);
                    }
                }
            }
        }
        out
    }

    /// First nonzero entry, if any: (row, col, shift, coeff).
    pub fn first_nonzero(&self) -> Option<(usize, usize, Vec<i64>, i64)> {
        let mut found: Option<(usize, usize, Vec<i64>, i64)> = None;
        for ((r, c), poly) in &self.entries {
            for (s, v) in poly {
                if *v != 0 {
                    let candidate = (*r, *c, s.clone(), *v);
                    found = match found {
                        None => Some(candidate),
                        Some(best) => {
                            if (candidate.0, candidate.1, &candidate.2)
                                < (best.0, best.1, &best.2)
                            {
                                Some(candidate)
                            } else {
                                Some(best)
                            }
                        }
                    };
                }
            }
        }
        found
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowFlavor {
    /// X_n: periodic boundary conditions, shifts reduced mod n.
    Periodic,
    /// Y_n: the smallest subcomplex of the infinite cover containing the
    /// n_1 x ... x n_d box of unit cells.
    Truncated,
}

/// A finite window with each cell labelled by its template cell and shift.
pub struct WindowComplex<F> {
    pub complex: FiniteCellComplex<F>,
    pub n: Vec<u64>,
    pub flavor: WindowFlavor,
    /// Per dimension: (template cell index, shift vector) for each cell.
    pub labels: Vec<Vec<(usize, Vec<i64>)>>,
    index: Vec<HashMap<(usize, Vec<i64>), u32>>,
}

impl<F: Field> WindowComplex<F> {
    pub fn cell_index(&self, dim: usize, cell: usize, shift: &[i64]) -> Option<u32> {
        self.index
            .get(dim)
            .and_then(|m| m.get(&(cell, shift.to_vec())).copied())
    }
}

impl PeriodicTemplate {
    pub fn new(d: usize, cells: Vec<TemplateCell>) -> Result<Self, TemplateError> {
        let max_dim = cells.iter().map(|c| c.dim).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); max_dim + 1];
        for (i, c) in cells.iter().enumerate() {
            for b in &c.boundary {
                if b.face >= cells.len() {
                    return Err(TemplateError::DanglingFace {
                        cell: c.id.clone(),
                        face: format!("#{}", b.face),
                    });
                }
                if c.dim == 0 || cells[b.face].dim != c.dim - 1 {
                    return Err(TemplateError::DimensionError {
                        cell: c.id.clone(),
                        detail: format!(
                            "face `{}` has dimension {}, expected {}",
                            cells[b.face].id,
                            cells[b.face].dim,
                            c.dim as i64 - 1
                        ),
                    });
                }
                if b.shift.len() != d {
                    return Err(TemplateError::DimensionError {
                        cell: c.id.clone(),
                        detail: format!(
                            "shift {:?} has length {}, expected {}",
                            b.shift,
                            b.shift.len(),
                            d
                        ),
                    });
                }
            }
            by_dim[c.dim].push(i);
        }
        Ok(PeriodicTemplate { d, cells, by_dim })
    }

    pub fn max_dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    /// Position of a cell within its dimension group.
    fn dim_position(&self) -> Vec<usize> {
        let mut pos = vec![0usize; self.cells.len()];
        for group in &self.by_dim {
            for (k, &c) in group.iter().enumerate() {
                pos[c] = k;
            }
        }
        pos
    }

    /// The boundary matrix in dimension q as a group-ring matrix.
    pub fn shift_boundary(&self, q: usize) -> ShiftPolyMatrix {
        let pos = self.dim_position();
        let rows = if q == 0 { 0 } else { self.by_dim[q - 1].len() };
        let cols = self.by_dim[q].len();
        let mut m = ShiftPolyMatrix::zero(rows, cols);
        if q == 0 {
            return m;
        }
        for (j, &c) in self.by_dim[q].iter().enumerate() {
            for b in &self.cells[c].boundary {
                m.add(pos[b.face], j, b.shift.clone(), b.coeff);
            }
        }
        m
    }

    /// Checks that consecutive shift-polynomial boundaries compose to zero.
    pub fn validate(&self) -> Result<(), TemplateError> {
        for q in 2..=self.max_dim() {
            let prod = self.shift_boundary(q - 1).compose(&self.shift_boundary(q));
            if let Some((r, c, shift, coeff)) = prod.first_nonzero() {
                let cell = self.by_dim[q][c];
                let face = self.by_dim[q - 2][r];
                return Err(TemplateError::BoundarySquareNonzero {
                    cell: self.cells[cell].id.clone(),
                    face: self.cells[face].id.clone(),
                    shift,
                    coeff,
                });
            }
        }
        Ok(())
    }

    /// Maximum l-infinity norm over all boundary shifts. For a WQG-derived
    /// template this is the maximum edge-weight norm; 4M bounds the window
    /// size past which regular scaling behaviour is expected.
    pub fn offset_bound(&self) -> u64 {
        self.cells
            .iter()
            .flat_map(|c| c.boundary.iter())
            .flat_map(|b| b.shift.iter())
            .map(|s| s.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// All (cell, shift) pairs in the iterated face closure of each cell
    /// placed at shift zero (the cell itself included).
    pub fn closure_shifts(&self) -> Vec<Vec<(usize, Vec<i64>)>> {
        let mut out = Vec::with_capacity(self.cells.len());
        for c in 0..self.cells.len() {
            let mut seen: Vec<(usize, Vec<i64>)> = Vec::new();
            let mut work = vec![(c, vec![0i64; self.d])];
            while let Some((a, s)) = work.pop() {
                if seen.iter().any(|(b, t)| *b == a && *t == s) {
                    continue;
                }
                for b in &self.cells[a].boundary {
                    let shift: Vec<i64> = s.iter().zip(&b.shift).map(|(x, y)| x + y).collect();
                    work.push((b.face, shift));
                }
                seen.push((a, s));
            }
            seen.sort();
            out.push(seen);
        }
        out
    }

    /// Per-coordinate spread of closure shifts, maximized over cells. The
    /// box [0, B_1] x ... x [0, B_d] is the smallest box such that every
    /// cell fits in some translate; it determines the cover by closed unit
    /// cells used by the spectral sequence.
    pub fn cover_box(&self) -> Vec<i64> {
        let mut spread = vec![0i64; self.d];
        for closure in self.closure_shifts() {
            for i in 0..self.d {
                let lo = closure.iter().map(|(_, s)| s[i]).min().unwrap_or(0);
                let hi = closure.iter().map(|(_, s)| s[i]).max().unwrap_or(0);
                spread[i] = spread[i].max(hi - lo);
            }
        }
        spread
    }

    pub fn build_window<F: Field>(&self, n: &[u64], flavor: WindowFlavor) -> WindowComplex<F> {
        assert_eq!(n.len(), self.d, "window size must have length d");
        assert!(n.iter().all(|&x| x >= 1), "window sizes must be positive");
        match flavor {
            WindowFlavor::Periodic => self.build_periodic(n),
            WindowFlavor::Truncated => self.build_truncated(n),
        }
    }

    fn shifts_lex(&self, n: &[u64]) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.d];
        loop {
            out.push(cur.clone());
            let mut i = self.d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if (cur[i] as u64) < n[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    fn build_periodic<F: Field>(&self, n: &[u64]) -> WindowComplex<F> {
        let shifts = self.shifts_lex(n);
        let mut labels: Vec<Vec<(usize, Vec<i64>)>> = Vec::new();
        let mut index: Vec<HashMap<(usize, Vec<i64>), u32>> = Vec::new();
        for q in 0..=self.max_dim() {
            let mut lab = Vec::new();
            let mut idx = HashMap::new();
            for &c in &self.by_dim[q] {
                for s in &shifts {
                    idx.insert((c, s.clone()), lab.len() as u32);
                    lab.push((c, s.clone()));
                }
            }
            labels.push(lab);
            index.push(idx);
        }
        let mut boundaries = Vec::new();
        for q in 0..=self.max_dim() {
            let rows = if q == 0 { 0 } else { labels[q - 1].len() };
            let mut mat = SparseMat::zero(rows, labels[q].len());
            if q > 0 {
                for (j, (c, t)) in labels[q].iter().enumerate() {
                    let mut entries = Vec::new();
                    for b in &self.cells[*c].boundary {
                        let shift: Vec<i64> = t
                            .iter()
                            .zip(&b.shift)
                            .zip(n)
                            .map(|((x, y), m)| (x + y).rem_euclid(*m as i64))
                            .collect();
                        let row = index[q - 1][&(b.face, shift)];
                        entries.push((row, F::from_int(b.coeff)));
                    }
                    mat.cols[j] = SparseVec::from_entries(entries);
                }
            }
            boundaries.push(mat);
        }
        let complex = FiniteCellComplex::new(boundaries)
            .expect("a validated template always yields a chain complex");
        WindowComplex { complex, n: n.to_vec(), flavor: WindowFlavor::Periodic, labels, index }
    }

    fn build_truncated<F: Field>(&self, n: &[u64]) -> WindowComplex<F> {
        // Seed with the box of unit-cell translates, then close under faces.
        let mut included: Vec<std::collections::BTreeSet<(usize, Vec<i64>)>> =
            vec![Default::default(); self.max_dim() + 1];
        let mut work: Vec<(usize, Vec<i64>)> = Vec::new();
        for c in 0..self.cells.len() {
            for s in self.shifts_lex(n) {
                work.push((c, s));
            }
        }
        while let Some((c, s)) = work.pop() {
            let q = self.cells[c].dim;
            if !included[q].insert((c, s.clone())) {
                continue;
            }
            for b in &self.cells[c].boundary {
                let shift: Vec<i64> = s.iter().zip(&b.shift).map(|(x, y)| x + y).collect();
                work.push((b.face, shift));
            }
        }
        let pos = self.dim_position();
        let mut labels: Vec<Vec<(usize, Vec<i64>)>> = Vec::new();
        let mut index: Vec<HashMap<(usize, Vec<i64>), u32>> = Vec::new();
        for q in 0..=self.max_dim() {
            let mut lab: Vec<(usize, Vec<i64>)> = included[q].iter().cloned().collect();
            lab.sort_by(|(a, s), (b, t)| pos[*a].cmp(&pos[*b]).then(s.cmp(t)));
            let idx = lab
                .iter()
                .enumerate()
                .map(|(k, key)| (key.clone(), k as u32))
                .collect();
            labels.push(lab);
            index.push(idx);
        }
        let mut boundaries = Vec::new();
        for q in 0..=self.max_dim() {
            let rows = if q == 0 { 0 } else { labels[q - 1].len() };
            let mut mat = SparseMat::zero(rows, labels[q].len());
            if q > 0 {
                for (j, (c, t)) in labels[q].iter().enumerate() {
                    let mut entries = Vec::new();
                    for b in &self.cells[*c].boundary {
                        let shift: Vec<i64> = t.iter().zip(&b.shift).map(|(x, y)| x + y).collect();
                        let row = index[q - 1]
                            .get(&(b.face, shift))
                            .copied()
                            .expect("closure property: every face of an included cell is included");
                        entries.push((row, F::from_int(b.coeff)));
                    }
                    mat.cols[j] = SparseVec::from_entries(entries);
                }
            }
            boundaries.push(mat);
        }
        let complex = FiniteCellComplex::new(boundaries)
            .expect("a validated template always yields a chain complex");
        WindowComplex { complex, n: n.to_vec(), flavor: WindowFlavor::Truncated, labels, index }
    }

    /// The natural projection X_{n'} -> X_n for componentwise n | n':
    /// (c, t) goes to (c, t mod n). Verified to be a chain map.
    pub fn covering_projection<F: Field>(
        &self,
        source: &WindowComplex<F>,
        target: &WindowComplex<F>,
    ) -> Result<ChainMap<F>, TemplateError> {
        assert_eq!(source.flavor, WindowFlavor::Periodic);
        assert_eq!(target.flavor, WindowFlavor::Periodic);
        let divides = source
            .n
            .iter()
            .zip(&target.n)
            .all(|(big, small)| big % small == 0);
        if !divides {
            return Err(TemplateError::DivisibilityError {
                larger: source.n.clone(),
                smaller: target.n.clone(),
            });
        }
        let mut matrices = Vec::new();
        for q in 0..=self.max_dim() {
            let mut mat = SparseMat::zero(target.labels[q].len(), source.labels[q].len());
            for (j, (c, t)) in source.labels[q].iter().enumerate() {
                let reduced: Vec<i64> = t
                    .iter()
                    .zip(&target.n)
                    .map(|(x, m)| x.rem_euclid(*m as i64))
                    .collect();
                let row = target.index[q][&(*c, reduced)];
                mat.cols[j] = SparseVec::unit(row);
            }
            matrices.push(mat);
        }
        let map = ChainMap::new(&source.complex, &target.complex, matrices)
            .expect("the covering projection commutes with boundaries");
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    pub(crate) fn torus_template() -> PeriodicTemplate {
        PeriodicTemplate::new(
            2,
            vec![
                TemplateCell { id: "v".into(), dim: 0, boundary: vec![] },
                TemplateCell {
                    id: "e1".into(),
                    dim: 1,
                    boundary: vec![
                        BoundaryEntry { face: 0, coeff: 1, shift: vec![1, 0] },
                        BoundaryEntry { face: 0, coeff: -1, shift: vec![0, 0] },
                    ],
                },
                TemplateCell {
                    id: "e2".into(),
                    dim: 1,
                    boundary: vec![
                        BoundaryEntry { face: 0, coeff: 1, shift: vec![0, 1] },
                        BoundaryEntry { face: 0, coeff: -1, shift: vec![0, 0] },
                    ],
                },
                TemplateCell {
                    id: "s".into(),
                    dim: 2,
                    boundary: vec![
                        BoundaryEntry { face: 1, coeff: 1, shift: vec![0, 0] },
                        BoundaryEntry { face: 2, coeff: 1, shift: vec![1, 0] },
                        BoundaryEntry { face: 1, coeff: -1, shift: vec![0, 1] },
                        BoundaryEntry { face: 2, coeff: -1, shift: vec![0, 0] },
                    ],
                },
            ],
        )
        .unwrap()
    }

    pub(crate) fn planes_template() -> PeriodicTemplate {
        let e = |i: usize| TemplateCell {
            id: format!("e{}", i),
            dim: 1,
            boundary: vec![
                BoundaryEntry {
                    face: 0,
                    coeff: 1,
                    shift: (0..3).map(|k| if k + 1 == i { 1 } else { 0 }).collect(),
                },
                BoundaryEntry { face: 0, coeff: -1, shift: vec![0, 0, 0] },
            ],
        };
        PeriodicTemplate::new(
            3,
            vec![
                TemplateCell { id: "v".into(), dim: 0, boundary: vec![] },
                e(1),
                e(2),
                e(3),
                // Square in the plane x = const, spanned by e2 and e3.
                TemplateCell {
                    id: "syz".into(),
                    dim: 2,
                    boundary: vec![
                        BoundaryEntry { face: 2, coeff: 1, shift: vec![0, 0, 0] },
                        BoundaryEntry { face: 3, coeff: 1, shift: vec![0, 1, 0] },
                        BoundaryEntry { face: 2, coeff: -1, shift: vec![0, 0, 1] },
                        BoundaryEntry { face: 3, coeff: -1, shift: vec![0, 0, 0] },
                    ],
                },
                // Square in the plane y = const, spanned by e1 and e3.
                TemplateCell {
                    id: "sxz".into(),
                    dim: 2,
                    boundary: vec![
                        BoundaryEntry { face: 1, coeff: 1, shift: vec![0, 0, 0] },
                        BoundaryEntry { face: 3, coeff: 1, shift: vec![1, 0, 0] },
                        BoundaryEntry { face: 1, coeff: -1, shift: vec![0, 0, 1] },
                        BoundaryEntry { face: 3, coeff: -1, shift: vec![0, 0, 0] },
                    ],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn validate_torus_and_planes() {
        assert!(torus_template().validate().is_ok());
        assert!(planes_template().validate().is_ok());
    }

    #[test]
    fn validate_rejects_flipped_sign() {
        let mut t = torus_template();
        t.cells[3].boundary[0].coeff = -1;
        let err = t.validate().unwrap_err();
        assert!(matches!(err, TemplateError::BoundarySquareNonzero { .. }));
    }

    #[test]
    fn window_cell_counts() {
        let t = planes_template();
        let w: WindowComplex<Rational> = t.build_window(&[3, 3, 3], WindowFlavor::Periodic);
        assert_eq!(w.complex.cell_count(0), 27);
        assert_eq!(w.complex.cell_count(1), 81);
        assert_eq!(w.complex.cell_count(2), 54);
        let torus = torus_template();
        let w1: WindowComplex<Rational> = torus.build_window(&[1, 1], WindowFlavor::Periodic);
        assert_eq!(
            (w1.complex.cell_count(0), w1.complex.cell_count(1), w1.complex.cell_count(2)),
            (1, 2, 1)
        );
    }

    #[test]
    fn planes_window_homology_and_euler() {
        let t = planes_template();
        for n in [2u64, 3, 4] {
            let w: WindowComplex<Rational> = t.build_window(&[n, n, n], WindowFlavor::Periodic);
            assert_eq!(w.complex.euler_characteristic(), 0);
            let h = w.complex.homology();
            let n2 = (n * n) as usize;
            assert_eq!(h.betti, vec![1, n2 + 2, n2 + 1]);
        }
    }

    #[test]
    fn truncated_window_is_closed_and_connected() {
        let t = planes_template();
        let w: WindowComplex<Rational> = t.build_window(&[2, 2, 2], WindowFlavor::Truncated);
        // Closure property is enforced during construction (no panics), and
        // Y_n is connected.
        let h = w.complex.homology();
        assert_eq!(h.betti[0], 1);
    }

    #[test]
    fn projection_preimage_counts() {
        let t = torus_template();
        let big: WindowComplex<Rational> = t.build_window(&[2, 2], WindowFlavor::Periodic);
        let small: WindowComplex<Rational> = t.build_window(&[1, 1], WindowFlavor::Periodic);
        let p = t.covering_projection(&big, &small).unwrap();
        // Every target cell has exactly 4 preimages.
        for q in 0..=2 {
            let mut counts = vec![0usize; small.complex.cell_count(q)];
            for col in &p.matrices[q].cols {
                let (row, _) = col.lowest().unwrap();
                counts[row as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == 4));
        }
        let divid = t.covering_projection(&small, &big);
        assert!(matches!(divid, Err(TemplateError::DivisibilityError { .. })));
    }

    #[test]
    fn offset_bound_and_cover_box() {
        assert_eq!(torus_template().offset_bound(), 1);
        assert_eq!(planes_template().offset_bound(), 1);
        let mut t = torus_template();
        t.cells[1].boundary[0].shift = vec![3, 0];
        assert_eq!(t.offset_bound(), 3);
        assert_eq!(planes_template().cover_box(), vec![1, 1, 1]);
    }
}
