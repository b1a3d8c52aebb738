//! Mayer-Vietoris spectral sequence for periodic windows.
//!
//! The pipeline: cover a periodic window X_n by translates of the closed
//! unit cell, form the nerve, build the blow-up bicomplex E0 with its two
//! anticommuting differentials, run the pages to E-infinity, and reconstruct
//! the homology of X_n along the diagonals. The filtration level of a class
//! (the leftmost column of E-infinity where it admits a representative) is
//! the toroidal-cycle heuristic: level 0 certifies a non-toroidal class.

mod pages;
mod toroidal;

pub use pages::{compute_pages, PageOptions, SpectralSequence, TotalChain};
pub use toroidal::{
    filtration_level, projection_image_proxy, reconstruct_homology, scaling_fit, toroidal_report,
    DegreeReconstruction, ProxyReport, Reconstruction, ScalingReport, ToroidalReport,
    ToroidalVerdict,
};

use crate::field::Field;
use crate::periodic::{PeriodicTemplate, WindowComplex, WindowFlavor};
use crate::sparse::{SparseMat, SparseVec};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MvssError {
    #[error("nerve arity {found} exceeds the cap {cap}; raise max_arity")]
    ArityOverflow { found: usize, cap: usize },
    #[error("cover element {element} is not closed under faces")]
    CoverNotClosed { element: usize },
    #[error("cover does not contain cell {cell} of dimension {dim}")]
    CoverIncomplete { dim: usize, cell: u32 },
    #[error("bicomplex identity failed at p={p}, q={q}: {identity}")]
    AnticommutationFailure { p: usize, q: usize, identity: &'static str },
    #[error("no boundary preimage exists at page {page}, position ({p},{q})")]
    LiftFailure { page: usize, p: usize, q: usize },
    #[error("spectral sequence disagrees with direct homology in degree {degree}: expected {expected}, got {got}")]
    MismatchWithDirectHomology { degree: usize, expected: usize, got: usize },
    #[error("chain does not represent a homology class of the window in degree {degree}")]
    ClassNotFound { degree: usize },
    #[error("scaling fit needs at least {needed} sizes, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("window sizes {larger:?} are not componentwise divisible by {smaller:?}")]
    DivisibilityError { larger: Vec<u64>, smaller: Vec<u64> },
}

/// Cover of a periodic window by subcomplexes, one per translate of the
/// closed unit cell (or user supplied).
#[derive(Clone, Debug)]
pub struct Cover {
    pub n_elements: usize,
    /// Per element, per dimension: sorted window cell ids.
    pub elements: Vec<Vec<Vec<u32>>>,
    /// Per dimension, per cell: sorted ids of the elements containing it.
    pub owners: Vec<Vec<Vec<u32>>>,
}

impl Cover {
    /// The translate cover: element t contains every cell (c, s) such that
    /// the closure of the cell fits in the box [0,B]^d placed at t, where B
    /// is the template's per-coordinate closure spread.
    pub fn from_translates<F: Field>(
        template: &PeriodicTemplate,
        window: &WindowComplex<F>,
    ) -> Result<Self, MvssError> {
        assert_eq!(window.flavor, WindowFlavor::Periodic, "covers are built on X_n windows");
        let d = template.d;
        let box_spread = template.cover_box();
        let closures = template.closure_shifts();
        // Valid placement offsets per template cell: o such that
        // closure_shifts(c) + o fits inside [0, B].
        let mut offsets: Vec<Vec<Vec<i64>>> = Vec::with_capacity(template.cells.len());
        for c in 0..template.cells.len() {
            let mut lo = vec![0i64; d];
            let mut hi = vec![0i64; d];
            for i in 0..d {
                let min = closures[c].iter().map(|(_, s)| s[i]).min().unwrap_or(0);
                let max = closures[c].iter().map(|(_, s)| s[i]).max().unwrap_or(0);
                lo[i] = -min;
                hi[i] = box_spread[i] - max;
            }
            let mut cell_offsets = vec![Vec::new()];
            for i in 0..d {
                let mut next = Vec::new();
                for prefix in &cell_offsets {
                    for v in lo[i]..=hi[i] {
                        let mut o: Vec<i64> = prefix.clone();
                        o.push(v);
                        next.push(o);
                    }
                }
                cell_offsets = next;
            }
            offsets.push(cell_offsets);
        }
        let n = &window.n;
        let n_elements: u64 = n.iter().product();
        let translate_rank = |t: &[i64]| -> u32 {
            let mut r = 0u64;
            for (i, x) in t.iter().enumerate() {
                r = r * n[i] + (*x as u64);
            }
            r as u32
        };
        let max_dim = window.labels.len() - 1;
        let mut owners: Vec<Vec<Vec<u32>>> = Vec::with_capacity(max_dim + 1);
        for q in 0..=max_dim {
            let mut per_cell = Vec::with_capacity(window.labels[q].len());
            for (c, s) in &window.labels[q] {
                let mut ids: Vec<u32> = offsets[*c]
                    .iter()
                    .map(|o| {
                        let t: Vec<i64> = s
                            .iter()
                            .zip(o)
                            .zip(n)
                            .map(|((si, oi), m)| (si - oi).rem_euclid(*m as i64))
                            .collect();
                        translate_rank(&t)
                    })
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                debug_assert!(!ids.is_empty(), "every cell fits in some translate");
                per_cell.push(ids);
            }
            owners.push(per_cell);
        }
        let mut elements = vec![vec![Vec::new(); max_dim + 1]; n_elements as usize];
        for (q, per_cell) in owners.iter().enumerate() {
            for (cell, ids) in per_cell.iter().enumerate() {
                for &t in ids {
                    elements[t as usize][q].push(cell as u32);
                }
            }
        }
        let cover = Cover { n_elements: n_elements as usize, elements, owners };
        cover.validate(window)?;
        Ok(cover)
    }

    /// A user-supplied cover: per element, per dimension, the window cell
    /// ids. Validated for coverage and face-closure.
    pub fn from_cell_sets<F: Field>(
        window: &WindowComplex<F>,
        mut elements: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self, MvssError> {
        let max_dim = window.labels.len() - 1;
        for el in elements.iter_mut() {
            el.resize(max_dim + 1, Vec::new());
            for cells in el.iter_mut() {
                cells.sort_unstable();
                cells.dedup();
            }
        }
        let mut owners = Vec::with_capacity(max_dim + 1);
        for q in 0..=max_dim {
            let mut per_cell = vec![Vec::new(); window.labels[q].len()];
            for (t, el) in elements.iter().enumerate() {
                for &cell in &el[q] {
                    per_cell[cell as usize].push(t as u32);
                }
            }
            owners.push(per_cell);
        }
        let cover = Cover { n_elements: elements.len(), elements, owners };
        cover.validate(window)?;
        Ok(cover)
    }

    fn validate<F: Field>(&self, window: &WindowComplex<F>) -> Result<(), MvssError> {
        for (q, per_cell) in self.owners.iter().enumerate() {
            for (cell, ids) in per_cell.iter().enumerate() {
                if ids.is_empty() {
                    return Err(MvssError::CoverIncomplete { dim: q, cell: cell as u32 });
                }
            }
        }
        // Face closure: owners of a face contain owners of the cell.
        for q in 1..self.owners.len() {
            for (cell, ids) in self.owners[q].iter().enumerate() {
                for (face, _) in window.complex.boundary(q).cols[cell].iter() {
                    let face_ids = &self.owners[q - 1][*face as usize];
                    for t in ids {
                        if face_ids.binary_search(t).is_err() {
                            return Err(MvssError::CoverNotClosed { element: *t as usize });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest number of elements sharing a cell (the top intersection
    /// arity).
    pub fn max_arity(&self) -> usize {
        self.owners
            .iter()
            .flat_map(|per_cell| per_cell.iter().map(|ids| ids.len()))
            .max()
            .unwrap_or(0)
    }
}

/// Nerve of a cover: all index sets with nonempty common intersection,
/// graded by p = |J| - 1, with the intersection cells cached per simplex.
#[derive(Clone, Debug)]
pub struct NerveComplex {
    /// Per p: sorted list of simplices (each a sorted element-id vector).
    pub simplices: Vec<Vec<Vec<u32>>>,
    /// Per p >= 1, per simplex: facet simplex ids ordered by removed vertex.
    pub facets: Vec<Vec<Vec<u32>>>,
    /// Per p, per simplex, per dimension q: sorted window cell ids in the
    /// intersection.
    pub cells: Vec<Vec<Vec<Vec<u32>>>>,
}

/// Builds the nerve. `max_arity` caps the intersection arity; if a nonempty
/// intersection exceeds it the call fails so the caller can raise the cap.
pub fn nerve<F: Field>(
    cover: &Cover,
    window: &WindowComplex<F>,
    max_arity: usize,
) -> Result<NerveComplex, MvssError> {
    assert!(max_arity >= 1);
    let found = cover.max_arity();
    if found > max_arity {
        return Err(MvssError::ArityOverflow { found, cap: max_arity });
    }
    let max_dim = window.labels.len() - 1;
    // Map simplex -> per-dim cell lists, discovered through cell owners.
    let mut table: HashMap<Vec<u32>, Vec<Vec<u32>>> = HashMap::new();
    for q in 0..=max_dim {
        for (cell, ids) in cover.owners[q].iter().enumerate() {
            let k = ids.len();
            debug_assert!(k <= 63);
            for mask in 1u64..(1u64 << k) {
                let simplex: Vec<u32> =
                    (0..k).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
                table
                    .entry(simplex)
                    .or_insert_with(|| vec![Vec::new(); max_dim + 1])[q]
                    .push(cell as u32);
            }
        }
    }
    let top_p = table.keys().map(|s| s.len() - 1).max().unwrap_or(0);
    let mut simplices: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top_p + 1];
    let mut cells: Vec<Vec<Vec<Vec<u32>>>> = vec![Vec::new(); top_p + 1];
    let mut entries: Vec<(Vec<u32>, Vec<Vec<u32>>)> = table.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut id_of: HashMap<Vec<u32>, u32> = HashMap::new();
    for (simplex, mut cell_lists) in entries {
        let p = simplex.len() - 1;
        for l in cell_lists.iter_mut() {
            l.sort_unstable();
        }
        id_of.insert(simplex.clone(), simplices[p].len() as u32);
        simplices[p].push(simplex);
        cells[p].push(cell_lists);
    }
    let mut facets: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top_p + 1];
    for p in 1..=top_p {
        facets[p] = simplices[p]
            .iter()
            .map(|s| {
                (0..s.len())
                    .map(|i| {
                        let mut f = s.clone();
                        f.remove(i);
                        id_of[&f]
                    })
                    .collect()
            })
            .collect();
    }
    Ok(NerveComplex { simplices, facets, cells })
}

/// The blow-up bicomplex: bigraded basis of pairs (p-simplex, q-cell in its
/// intersection) with the cell differential del0 and the nerve differential
/// del1 carrying the sign (-1)^q.
pub struct BlowupComplex<F> {
    pub nerve: NerveComplex,
    pub p_max: usize,
    pub q_max: usize,
    window_boundaries: Vec<SparseMat<F>>,
    /// Per position p*(q_max+1)+q: block offset of each simplex's cell list.
    block_offsets: Vec<Vec<u32>>,
    dims: Vec<u32>,
}

impl<F: Field> BlowupComplex<F> {
    pub fn new(window: &WindowComplex<F>, nerve: NerveComplex) -> Result<Self, MvssError> {
        let p_max = nerve.simplices.len() - 1;
        let q_max = window.labels.len() - 1;
        let window_boundaries: Vec<SparseMat<F>> =
            (0..=q_max).map(|q| window.complex.boundary(q).clone()).collect();
        let npos = (p_max + 1) * (q_max + 1);
        let mut block_offsets = vec![Vec::new(); npos];
        let mut dims = vec![0u32; npos];
        for p in 0..=p_max {
            for q in 0..=q_max {
                let pos = p * (q_max + 1) + q;
                let mut offs = Vec::with_capacity(nerve.cells[p].len());
                let mut total = 0u32;
                for lists in &nerve.cells[p] {
                    offs.push(total);
                    total += lists[q].len() as u32;
                }
                block_offsets[pos] = offs;
                dims[pos] = total;
            }
        }
        let b = BlowupComplex { nerve, p_max, q_max, window_boundaries, block_offsets, dims };
        b.verify_bicomplex()?;
        Ok(b)
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        if p > self.p_max || q > self.q_max {
            return 0;
        }
        self.dims[p * (self.q_max + 1) + q] as usize
    }

    fn offsets(&self, p: usize, q: usize) -> &[u32] {
        &self.block_offsets[p * (self.q_max + 1) + q]
    }

    /// Basis index of (simplex, window cell) at position (p, q).
    pub fn index_of(&self, p: usize, q: usize, simplex: u32, cell: u32) -> u32 {
        let local = self.nerve.cells[p][simplex as usize][q]
            .binary_search(&cell)
            .expect("cell lies in the simplex intersection");
        self.offsets(p, q)[simplex as usize] + local as u32
    }

    /// Inverse of `index_of`.
    pub fn basis_pair(&self, p: usize, q: usize, idx: u32) -> (u32, u32) {
        let offs = self.offsets(p, q);
        let simplex = match offs.binary_search(&idx) {
            Ok(mut k) => {
                while k + 1 < offs.len() && offs[k + 1] == idx {
                    k += 1;
                }
                k
            }
            Err(k) => k - 1,
        };
        let local = (idx - offs[simplex]) as usize;
        (simplex as u32, self.nerve.cells[p][simplex][q][local])
    }

    /// Cell differential: (sigma, x) -> (sigma, boundary x), within the same
    /// simplex column.
    pub fn del0(&self, p: usize, q: usize, v: &SparseVec<F>) -> SparseVec<F> {
        if q == 0 {
            return SparseVec::new();
        }
        let mut entries = Vec::new();
        for (idx, coeff) in v.iter() {
            let (simplex, cell) = self.basis_pair(p, q, *idx);
            for (face, c) in self.window_boundaries[q].cols[cell as usize].iter() {
                let target = self.index_of(p, q - 1, simplex, *face);
                entries.push((target, coeff.mul(c)));
            }
        }
        SparseVec::from_entries(entries)
    }

    /// Nerve differential with sign (-1)^q: (sigma, x) -> (-1)^q (del sigma, x).
    pub fn del1(&self, p: usize, q: usize, v: &SparseVec<F>) -> SparseVec<F> {
        if p == 0 {
            return SparseVec::new();
        }
        let qsign = if q % 2 == 0 { F::one() } else { F::one().neg() };
        let mut entries = Vec::new();
        for (idx, coeff) in v.iter() {
            let (simplex, cell) = self.basis_pair(p, q, *idx);
            for (i, &facet) in self.nerve.facets[p][simplex as usize].iter().enumerate() {
                let sign = if i % 2 == 0 { qsign.clone() } else { qsign.neg() };
                let target = self.index_of(p - 1, q, facet, cell);
                entries.push((target, coeff.mul(&sign)));
            }
        }
        SparseVec::from_entries(entries)
    }

    /// (del0)^2 = 0, (del1)^2 = 0, del0 del1 + del1 del0 = 0, checked on
    /// every basis element (positions in parallel).
    fn verify_bicomplex(&self) -> Result<(), MvssError> {
        use rayon::prelude::*;
        let grid: Vec<(usize, usize)> = (0..=self.p_max)
            .flat_map(|p| (0..=self.q_max).map(move |q| (p, q)))
            .collect();
        grid.par_iter().try_for_each(|&(p, q)| {
            for idx in 0..self.dim(p, q) as u32 {
                let v = SparseVec::unit(idx);
                let d0 = self.del0(p, q, &v);
                if q >= 2 && !self.del0(p, q - 1, &d0).is_zero() {
                    return Err(MvssError::AnticommutationFailure {
                        p,
                        q,
                        identity: "(del0)^2 = 0",
                    });
                }
                let d1 = self.del1(p, q, &v);
                if p >= 2 && !self.del1(p - 1, q, &d1).is_zero() {
                    return Err(MvssError::AnticommutationFailure {
                        p,
                        q,
                        identity: "(del1)^2 = 0",
                    });
                }
                if p >= 1 && q >= 1 {
                    let mut mixed = self.del1(p, q - 1, &d0);
                    mixed.add_scaled(&self.del0(p - 1, q, &d1), &F::one());
                    if !mixed.is_zero() {
                        return Err(MvssError::AnticommutationFailure {
                            p,
                            q,
                            identity: "del0 del1 + del1 del0 = 0",
                        });
                    }
                }
            }
            Ok(())
        })
    }

    /// Projection of the column-0 part onto window chains: ({U}, x) -> x.
    pub fn project_column0(&self, q: usize, v: &SparseVec<F>) -> SparseVec<F> {
        let mut entries = Vec::new();
        for (idx, coeff) in v.iter() {
            let (_, cell) = self.basis_pair(0, q, *idx);
            entries.push((cell, coeff.clone()));
        }
        SparseVec::from_entries(entries)
    }

    /// Homology dimensions of the total complex (T_k, del0 + del1), computed
    /// from ranks only; the independent cross-check for the pages.
    pub fn total_complex_betti(&self) -> Vec<usize> {
        let k_max = self.p_max + self.q_max;
        let positions_of = |k: usize| -> Vec<(usize, usize, usize)> {
            let mut acc = Vec::new();
            let mut total = 0usize;
            for p in 0..=self.p_max.min(k) {
                let q = k - p;
                if q > self.q_max {
                    continue;
                }
                acc.push((p, q, total));
                total += self.dim(p, q);
            }
            acc
        };
        let mut ranks = vec![0usize; k_max + 2];
        for k in 1..=k_max {
            let src = positions_of(k);
            let tgt = positions_of(k - 1);
            let offset = |p: usize, q: usize| -> u32 {
                tgt.iter()
                    .find(|(pp, qq, _)| *pp == p && *qq == q)
                    .map(|(_, _, o)| *o as u32)
                    .expect("target position present")
            };
            let mut red = crate::sparse::Reducer::new(Default::default());
            for (p, q, _) in &src {
                for idx in 0..self.dim(*p, *q) as u32 {
                    let v = SparseVec::unit(idx);
                    let mut col: Vec<(u32, F)> = Vec::new();
                    if *q >= 1 {
                        let d0 = self.del0(*p, *q, &v);
                        let o = offset(*p, q - 1);
                        col.extend(d0.iter().map(|(i, c)| (i + o, c.clone())));
                    }
                    if *p >= 1 {
                        let d1 = self.del1(*p, *q, &v);
                        let o = offset(p - 1, *q);
                        col.extend(d1.iter().map(|(i, c)| (i + o, c.clone())));
                    }
                    red.push(SparseVec::from_entries(col));
                }
            }
            ranks[k] = red.rank();
        }
        (0..=k_max)
            .map(|k| {
                let dim: usize = positions_of(k).iter().map(|(p, q, _)| self.dim(*p, *q)).sum();
                dim - ranks[k] - ranks[k + 1]
            })
            .collect()
    }
}

/// Dimension oracle used in tests: the size of E0 at (p, q) equals the
/// number of (cell, owner-subset) incidences of arity p+1.
pub fn blowup_dimension_oracle(cover: &Cover, q: usize, p: usize) -> usize {
    cover.owners[q]
        .iter()
        .map(|ids| {
            let k = ids.len();
            if p + 1 > k {
                0
            } else {
                let mut num = 1usize;
                let mut den = 1usize;
                for i in 0..p + 1 {
                    num *= k - i;
                    den *= i + 1;
                }
                num / den
            }
        })
        .sum()
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use crate::periodic::{BoundaryEntry, PeriodicTemplate, TemplateCell};

    pub fn point_template() -> PeriodicTemplate {
        PeriodicTemplate::new(
            1,
            vec![TemplateCell { id: "v".into(), dim: 0, boundary: vec![] }],
        )
        .unwrap()
    }

    pub fn circle_template() -> PeriodicTemplate {
        PeriodicTemplate::new(
            1,
            vec![
                TemplateCell { id: "v".into(), dim: 0, boundary: vec![] },
                TemplateCell {
                    id: "e".into(),
                    dim: 1,
                    boundary: vec![
                        BoundaryEntry { face: 0, coeff: 1, shift: vec![1] },
                        BoundaryEntry { face: 0, coeff: -1, shift: vec![0] },
                    ],
                },
            ],
        )
        .unwrap()
    }

    pub fn torus_template() -> PeriodicTemplate {
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

    /// Two families of orthogonal planes in R^3: one vertex, three edges and
    /// two squares per unit cell.
    pub fn planes_template() -> PeriodicTemplate {
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
}

#[cfg(test)]
mod tests {
    use super::test_fixtures::*;
    use super::*;
    use crate::field::Rational;
    use crate::periodic::WindowFlavor;

    #[test]
    fn torus_x1_cover_is_single_element() {
        let t = torus_template();
        let w: WindowComplex<Rational> = t.build_window(&[1, 1], WindowFlavor::Periodic);
        let cover = Cover::from_translates(&t, &w).unwrap();
        assert_eq!(cover.n_elements, 1);
        assert_eq!(cover.elements[0][0].len(), 1);
        assert_eq!(cover.elements[0][1].len(), 2);
        assert_eq!(cover.elements[0][2].len(), 1);
    }

    #[test]
    fn torus_x2_blowup_dims_match_incidence_oracle() {
        let t = torus_template();
        let w: WindowComplex<Rational> = t.build_window(&[2, 2], WindowFlavor::Periodic);
        let cover = Cover::from_translates(&t, &w).unwrap();
        assert_eq!(cover.n_elements, 4);
        let nv = nerve(&cover, &w, 32).unwrap();
        let b = BlowupComplex::new(&w, nv).unwrap();
        for p in 0..=b.p_max {
            for q in 0..=b.q_max {
                assert_eq!(b.dim(p, q), blowup_dimension_oracle(&cover, q, p), "at ({p},{q})");
            }
        }
    }

    #[test]
    fn planes_cover_elements_have_cube_frame_counts() {
        let t = planes_template();
        let w: WindowComplex<Rational> = t.build_window(&[4, 4, 4], WindowFlavor::Periodic);
        let cover = Cover::from_translates(&t, &w).unwrap();
        assert_eq!(cover.n_elements, 64);
        for el in &cover.elements {
            assert_eq!(el[0].len(), 8);
            assert_eq!(el[1].len(), 12);
            assert_eq!(el[2].len(), 4);
        }
        assert_eq!(cover.max_arity(), 8);
    }

    #[test]
    fn planes_blowup_dims_match_paper_table() {
        let t = planes_template();
        let n = 4usize;
        let w: WindowComplex<Rational> =
            t.build_window(&[n as u64, n as u64, n as u64], WindowFlavor::Periodic);
        let cover = Cover::from_translates(&t, &w).unwrap();
        let nv = nerve(&cover, &w, 32).unwrap();
        let b = BlowupComplex::new(&w, nv).unwrap();
        let n3 = n * n * n;
        let row0 = [8, 28, 56, 70, 56, 28, 8, 1];
        for (p, c) in row0.iter().enumerate() {
            assert_eq!(b.dim(p, 0), c * n3, "row 0, p={p}");
        }
        let row1 = [12, 18, 12, 3];
        for (p, c) in row1.iter().enumerate() {
            assert_eq!(b.dim(p, 1), c * n3, "row 1, p={p}");
        }
        assert_eq!(b.dim(4, 1), 0);
        let row2 = [4, 2];
        for (p, c) in row2.iter().enumerate() {
            assert_eq!(b.dim(p, 2), c * n3, "row 2, p={p}");
        }
        assert_eq!(b.dim(2, 2), 0);
    }

    #[test]
    fn single_point_cover() {
        let t = point_template();
        let w: WindowComplex<Rational> = t.build_window(&[1], WindowFlavor::Periodic);
        let cover = Cover::from_translates(&t, &w).unwrap();
        let nv = nerve(&cover, &w, 32).unwrap();
        assert_eq!(nv.simplices[0].len(), 1);
        let b = BlowupComplex::new(&w, nv).unwrap();
        assert_eq!(b.dim(0, 0), 1);
    }

    #[test]
    fn two_overlapping_elements_nerve() {
        let t = circle_template();
        let w: WindowComplex<Rational> = t.build_window(&[2], WindowFlavor::Periodic);
        let cover = Cover::from_translates(&t, &w).unwrap();
        assert_eq!(cover.n_elements, 2);
        let nv = nerve(&cover, &w, 32).unwrap();
        assert_eq!(nv.simplices[0].len(), 2);
        assert_eq!(nv.simplices[1].len(), 1);
        assert!(matches!(
            nerve(&cover, &w, 1),
            Err(MvssError::ArityOverflow { found: 2, cap: 1 })
        ));
    }
}
