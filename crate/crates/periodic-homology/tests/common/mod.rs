//! Shared helpers for integration tests: canonical input files and
//! independent brute-force oracles.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use periodic_homology::formats::{parse_input, InputDocument};
use periodic_homology::periodic::PeriodicTemplate;
use periodic_homology::wqg::WeightedQuotientGraph;

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn load_template(name: &str) -> PeriodicTemplate {
    let text = std::fs::read_to_string(data_path(name)).expect("data file exists");
    match parse_input(&text).expect("parses") {
        InputDocument::Template(doc) => {
            let t = doc.to_template().expect("valid template");
            t.validate().expect("boundary square vanishes");
            t
        }
        InputDocument::Wqg(doc) => {
            let g = doc.to_graph().expect("valid wqg");
            let (t, _, _) = g.to_template();
            t
        }
    }
}

pub fn load_wqg(name: &str) -> WeightedQuotientGraph {
    let text = std::fs::read_to_string(data_path(name)).expect("data file exists");
    match parse_input(&text).expect("parses") {
        InputDocument::Wqg(doc) => doc.to_graph().expect("valid wqg"),
        InputDocument::Template(_) => panic!("{name} is not a WQG document"),
    }
}

/// Independent lattice membership test: solve y * G = x over the rationals
/// by Gaussian elimination and check integrality. Deliberately avoids the
/// Smith-normal-form code path it is used to test.
pub struct RationalMembership {
    /// Row-reduced generators paired with the transformation applied, as
    /// (matrix rows over Q, combination rows over Q).
    rows: Vec<Vec<BigRational>>,
    combos: Vec<Vec<BigRational>>,
    /// Pivot column of each used row, in order.
    pivots: Vec<(usize, usize)>,
    d: usize,
    m: usize,
}

impl RationalMembership {
    pub fn new(generators: &[Vec<i64>], d: usize) -> Self {
        let m = generators.len();
        let mut rows: Vec<Vec<BigRational>> = generators
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        let mut combos: Vec<Vec<BigRational>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        // Gauss-Jordan over Q with full combination tracking.
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..d {
            let Some(src) = (pivot_row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(pivot_row, src);
            combos.swap(pivot_row, src);
            let inv = rows[pivot_row][col].clone();
            for j in 0..d {
                rows[pivot_row][j] = &rows[pivot_row][j] / &inv;
            }
            for j in 0..m {
                combos[pivot_row][j] = &combos[pivot_row][j] / &inv;
            }
            for i in 0..rows.len() {
                if i != pivot_row && !rows[i][col].is_zero() {
                    let f = rows[i][col].clone();
                    for j in 0..d {
                        let delta = &f * &rows[pivot_row][j];
                        rows[i][j] = &rows[i][j] - delta;
                    }
                    for j in 0..m {
                        let delta = &f * &combos[pivot_row][j];
                        combos[i][j] = &combos[i][j] - delta;
                    }
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        RationalMembership { rows, combos, pivots, d, m }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        // Reduce x through the echelon rows; track the combination.
        let mut v: Vec<BigRational> =
            x.iter().map(|&a| BigRational::from_integer(BigInt::from(a))).collect();
        let mut used = vec![BigRational::zero(); self.m];
        for &(row_idx, col) in &self.pivots {
            if v[col].is_zero() {
                continue;
            }
            let f = v[col].clone();
            for j in 0..self.d {
                let delta = &f * &self.rows[row_idx][j];
                v[j] = &v[j] - delta;
            }
            for j in 0..self.m {
                let delta = &f * &self.combos[row_idx][j];
                used[j] = &used[j] + delta;
            }
        }
        v.iter().all(|c| c.is_zero()) && used.iter().all(|c| c.denom().abs().is_one())
    }
}

/// Brute-force order of Z^d / L by breadth-first coset enumeration, using
/// only the rational membership oracle. Requires linearly independent
/// generators (so the rational combination is unique and integrality is a
/// valid membership test). Returns None if the search exceeds `cap` cosets.
pub fn coset_count_bfs(generators: &[Vec<i64>], d: usize, cap: usize) -> Option<usize> {
    let membership = RationalMembership::new(generators, d);
    assert_eq!(
        membership.pivots.len(),
        membership.m,
        "coset oracle needs linearly independent generators"
    );
    let mut reps: Vec<Vec<i64>> = vec![vec![0; d]];
    let mut frontier = vec![vec![0i64; d]];
    while let Some(x) = frontier.pop() {
        for i in 0..d {
            for sign in [1i64, -1] {
                let mut y = x.clone();
                y[i] += sign;
                let mut fresh = true;
                for r in &reps {
                    let diff: Vec<i64> = y.iter().zip(r).map(|(a, b)| a - b).collect();
                    if membership.contains(&diff) {
                        fresh = false;
                        break;
                    }
                }
                if fresh {
                    if reps.len() >= cap {
                        return None;
                    }
                    reps.push(y.clone());
                    frontier.push(y);
                }
            }
        }
    }
    Some(reps.len())
}
