//! Report structures emitted by the CLI, and the builders that fill them.
//!
//! All reports serialize with stable key order (struct order) and canonical
//! number formatting, so identical inputs and flags produce byte-identical
//! JSON. Group indices are emitted as JSON numbers when they fit in i64 and
//! as decimal strings otherwise.

use crate::complex::HomologyResult;
use crate::field::Field;
use crate::lattice::GroupIndex;
use crate::mvss::{
    self, filtration_level, projection_image_proxy, reconstruct_homology, toroidal_report,
    BlowupComplex, Cover, MvssError, PageOptions, SpectralSequence, ToroidalVerdict,
};
use crate::periodic::{PeriodicTemplate, WindowComplex, WindowFlavor};
use crate::sparse::SparseVec;
use crate::wqg::{Dir, EdgePath, WeightedQuotientGraph};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;

fn big_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

fn index_value(x: &GroupIndex) -> Value {
    match x {
        GroupIndex::Finite(n) => big_value(n),
        GroupIndex::Infinite => Value::from("infinite"),
    }
}

#[derive(Serialize)]
pub struct ValidateReport {
    pub kind: &'static str,
    pub valid: bool,
    pub errors: Vec<String>,
}

#[derive(Serialize)]
pub struct StepJson {
    pub edge: String,
    pub dir: Dir,
}

#[derive(Serialize)]
pub struct CycleJson {
    pub label: String,
    pub path: Vec<StepJson>,
    pub weight: Vec<i64>,
}

#[derive(Serialize)]
pub struct CommutatorJson {
    pub label: String,
    pub path: Vec<StepJson>,
}

#[derive(Serialize)]
pub struct ShortcutJson {
    pub label: String,
    pub multiplier: Value,
    pub basis_coefficients: Vec<Value>,
    pub shortcut_coefficients: Vec<Value>,
    pub zero_weight_cycle: Vec<StepJson>,
}

#[derive(Serialize)]
pub struct ComponentJson {
    pub root: String,
    pub vertices: Vec<String>,
    pub spanning_tree: Vec<String>,
    pub weight_lattice_generators: Vec<Vec<i64>>,
    pub index: Value,
    pub coset_representatives: Vec<Vec<Value>>,
    pub basis_cycles: Vec<CycleJson>,
    pub commutators: Vec<CommutatorJson>,
    pub shortcuts: Vec<ShortcutJson>,
}

#[derive(Serialize)]
pub struct WindowBettiJson {
    pub n: Vec<u64>,
    pub beta0: Value,
    pub beta1: Value,
    /// Present with --verify: brute-force window homology comparison.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

#[derive(Serialize)]
pub struct WqgAnalyzeReport {
    pub d: usize,
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub beta0: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1_generators_up_to_translation: Option<Value>,
    pub component_reports: Vec<ComponentJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowBettiJson>,
}

fn path_json(g: &WeightedQuotientGraph, p: &EdgePath) -> Vec<StepJson> {
    p.steps
        .iter()
        .map(|(e, dir)| StepJson { edge: g.edges[*e].id.clone(), dir: *dir })
        .collect()
}

pub fn wqg_analyze<F: Field>(
    g: &WeightedQuotientGraph,
    window: Option<&[u64]>,
    verify: bool,
) -> WqgAnalyzeReport {
    let beta0 = g.betti0_periodic();
    let components = g.components().len();
    let h1 = g.h1_generator_count().ok().map(|v| big_value(&v));
    let mut component_reports = Vec::new();
    if let Ok(report) = g.construct_generators() {
        for comp in &report.components {
            let mut basis_cycles = Vec::new();
            for (i, b) in comp.basis_cycles.iter().enumerate() {
                basis_cycles.push(CycleJson {
                    label: format!("p{}", i + 1),
                    path: path_json(g, &b.path),
                    weight: b.weight.clone(),
                });
            }
            let commutators = comp
                .commutators
                .iter()
                .map(|c| CommutatorJson {
                    label: format!("[p{},p{}]", c.i + 1, c.j + 1),
                    path: path_json(g, &c.cycle),
                })
                .collect();
            let shortcuts = comp
                .shortcuts
                .iter()
                .map(|s| ShortcutJson {
                    label: format!("l{}", s.source + 1),
                    multiplier: big_value(&s.n),
                    basis_coefficients: s.p_coeffs.iter().map(big_value).collect(),
                    shortcut_coefficients: s.l_coeffs.iter().map(big_value).collect(),
                    zero_weight_cycle: path_json(g, &s.cycle),
                })
                .collect();
            component_reports.push(ComponentJson {
                root: g.vertices[comp.root].clone(),
                vertices: comp.vertices.iter().map(|&v| g.vertices[v].clone()).collect(),
                spanning_tree: comp.tree_edges.iter().map(|&e| g.edges[e].id.clone()).collect(),
                weight_lattice_generators: (0..comp.weight_lattice.generators.rows)
                    .map(|i| {
                        comp.weight_lattice
                            .generators
                            .row(i)
                            .iter()
                            .map(|x| x.to_i64().expect("weight fits i64"))
                            .collect()
                    })
                    .collect(),
                index: index_value(&comp.weight_lattice.subgroup_index()),
                coset_representatives: comp
                    .coset_representatives
                    .iter()
                    .map(|rep| rep.iter().map(big_value).collect())
                    .collect(),
                basis_cycles,
                commutators,
                shortcuts,
            });
        }
    }
    let window = window.map(|n| {
        let (b0, b1) = g.corollary_betti(n);
        let verified = verify.then(|| {
            let (template, _, _) = g.to_template();
            let w: WindowComplex<F> = template.build_window(n, WindowFlavor::Periodic);
            let h = w.complex.homology();
            BigInt::from(h.betti[0]) == b0 && BigInt::from(h.betti[1]) == b1
        });
        WindowBettiJson { n: n.to_vec(), beta0: big_value(&b0), beta1: big_value(&b1), verified }
    });
    WqgAnalyzeReport {
        d: g.d,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        components,
        beta0: index_value(&beta0),
        h1_generators_up_to_translation: h1,
        component_reports,
        window,
    }
}

#[derive(Serialize)]
pub struct ChainEntryJson {
    pub cell: String,
    pub shift: Vec<i64>,
    pub coeff: String,
}

#[derive(Serialize)]
pub struct GeneratorJson {
    pub support: Vec<ChainEntryJson>,
}

#[derive(Serialize)]
pub struct DimGeneratorsJson {
    pub dim: usize,
    pub count: usize,
    pub listed: Vec<GeneratorJson>,
    pub truncated: bool,
}

#[derive(Serialize)]
pub struct HomologyReport {
    pub n: Vec<u64>,
    pub flavor: String,
    pub field: String,
    pub cell_counts: Vec<usize>,
    pub betti: Vec<usize>,
    pub euler: i64,
    pub generators: Vec<DimGeneratorsJson>,
}

fn chain_json<F: Field>(
    template: &PeriodicTemplate,
    window: &WindowComplex<F>,
    dim: usize,
    chain: &SparseVec<F>,
) -> GeneratorJson {
    GeneratorJson {
        support: chain
            .iter()
            .map(|(idx, c)| {
                let (cell, shift) = &window.labels[dim][*idx as usize];
                ChainEntryJson {
                    cell: template.cells[*cell].id.clone(),
                    shift: shift.clone(),
                    coeff: format!("{:?}", c).replace("BigRational", ""),
                }
            })
            .collect(),
    }
}

fn field_name<F: Field>() -> String {
    match F::characteristic() {
        0 => "rational".to_string(),
        p => p.to_string(),
    }
}

pub fn homology<F: Field>(
    template: &PeriodicTemplate,
    n: &[u64],
    flavor: WindowFlavor,
    max_generators: usize,
) -> HomologyReport {
    let window: WindowComplex<F> = template.build_window(n, flavor);
    let h = window.complex.homology();
    let top = window.labels.len() - 1;
    let generators = (0..=top)
        .map(|dim| {
            let gens = &h.generators[dim];
            let listed: Vec<GeneratorJson> = gens
                .iter()
                .take(max_generators)
                .map(|g| chain_json(template, &window, dim, g))
                .collect();
            DimGeneratorsJson {
                dim,
                count: gens.len(),
                truncated: gens.len() > max_generators,
                listed,
            }
        })
        .collect();
    HomologyReport {
        n: n.to_vec(),
        flavor: match flavor {
            WindowFlavor::Periodic => "periodic".into(),
            WindowFlavor::Truncated => "truncated".into(),
        },
        field: field_name::<F>(),
        cell_counts: (0..=top).map(|q| window.complex.cell_count(q)).collect(),
        betti: h.betti,
        euler: window.complex.euler_characteristic(),
        generators,
    }
}

#[derive(Serialize)]
pub struct PosDimJson {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
}

#[derive(Serialize)]
pub struct PageJson {
    pub r: usize,
    pub dims: Vec<PosDimJson>,
}

#[derive(Serialize)]
pub struct GodementJson {
    pub degree: usize,
    pub diagonal_sum: usize,
    pub betti: usize,
    pub ok: bool,
}

#[derive(Serialize)]
pub struct GeneratorVerdictJson {
    pub degree: usize,
    pub index: usize,
    pub filtration_level: usize,
    pub verdict: ToroidalVerdict,
    pub orbit_span_dim: usize,
    pub in_projection_image: bool,
}

#[derive(Serialize)]
pub struct ProxyJson {
    pub degree: usize,
    pub larger_window: Vec<u64>,
    pub rank: usize,
    pub cokernel_dim: usize,
}

#[derive(Serialize)]
pub struct ToroidalJson {
    /// The projection proxy compares against this strictly larger window;
    /// it stands in for the (uncomputable) image of the infinite cover.
    pub proxy: Vec<ProxyJson>,
    pub generators: Vec<GeneratorVerdictJson>,
    pub candidate_counts: Vec<usize>,
}

#[derive(Serialize)]
pub struct MvssReport {
    pub n: Vec<u64>,
    pub field: String,
    pub cover_elements: usize,
    pub nerve_arity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pages: Option<Vec<PageJson>>,
    pub e_infinity: Vec<PosDimJson>,
    pub godement: Vec<GodementJson>,
    pub total_complex_ok: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toroidal: Option<ToroidalJson>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum MvssReportKind {
    Pages,
    Toroidal,
    All,
}

pub fn mvss<F: Field>(
    template: &PeriodicTemplate,
    n: &[u64],
    kind: MvssReportKind,
) -> Result<MvssReport, MvssError> {
    let window: WindowComplex<F> = template.build_window(n, WindowFlavor::Periodic);
    let h = window.complex.homology();
    let cover = Cover::from_translates(template, &window)?;
    let nerve = mvss::nerve(&cover, &window, 32)?;
    let blowup = BlowupComplex::new(&window, nerve)?;
    let seq = mvss::compute_pages(&blowup, &PageOptions::default())?;
    let recon = reconstruct_homology(&seq, &blowup, &window, &h)?;
    let godement: Vec<GodementJson> = h
        .betti
        .iter()
        .enumerate()
        .map(|(k, &b)| GodementJson {
            degree: k,
            diagonal_sum: seq.diagonal_sum(k),
            betti: b,
            ok: seq.diagonal_sum(k) == b,
        })
        .collect();
    let total = blowup.total_complex_betti();
    let total_complex_ok: Vec<bool> = h
        .betti
        .iter()
        .enumerate()
        .map(|(k, &b)| total.get(k).copied().unwrap_or(0) == b)
        .collect();
    let pages = (kind != MvssReportKind::Toroidal).then(|| {
        (0..seq.page_dims.len())
            .map(|r| PageJson { r, dims: grid_dims(&seq, r) })
            .collect()
    });
    let e_infinity = einf_dims(&seq);
    let toroidal = if kind != MvssReportKind::Pages {
        // Projection proxy against the doubled window.
        let n2: Vec<u64> = n.iter().map(|x| x * 2).collect();
        let big: WindowComplex<F> = template.build_window(&n2, WindowFlavor::Periodic);
        let big_h = big.complex.homology();
        let mut proxy = Vec::new();
        let mut proxy_images: Vec<Vec<SparseVec<F>>> = Vec::new();
        for k in 0..h.betti.len() {
            let p = projection_image_proxy(template, &big, &window, &big_h, &h, k)?;
            proxy.push(ProxyJson {
                degree: k,
                larger_window: n2.clone(),
                rank: p.rank,
                cokernel_dim: p.cokernel_dim,
            });
            proxy_images.push(p.image_cycles);
        }
        let report = toroidal_report(&recon, &window, &h, Some(&proxy_images))?;
        let generators = report
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| GeneratorVerdictJson {
                degree: g.degree,
                index: i,
                filtration_level: g.filtration_level,
                verdict: g.verdict,
                orbit_span_dim: g.orbit_span_dim,
                in_projection_image: g.in_projection_image.unwrap_or(false),
            })
            .collect();
        Some(ToroidalJson {
            proxy,
            generators,
            candidate_counts: report.candidate_counts,
        })
    } else {
        None
    };
    Ok(MvssReport {
        n: n.to_vec(),
        field: field_name::<F>(),
        cover_elements: cover.n_elements,
        nerve_arity: cover.max_arity(),
        pages,
        e_infinity,
        godement,
        total_complex_ok,
        toroidal,
    })
}

fn grid_dims<F: Field>(seq: &SpectralSequence<F>, r: usize) -> Vec<PosDimJson> {
    let mut out = Vec::new();
    for p in 0..=seq.p_max {
        for q in 0..=seq.q_max {
            let dim = seq.dim(r, p, q);
            if dim > 0 {
                out.push(PosDimJson { p, q, dim });
            }
        }
    }
    out
}

fn einf_dims<F: Field>(seq: &SpectralSequence<F>) -> Vec<PosDimJson> {
    let mut out = Vec::new();
    for p in 0..=seq.p_max {
        for q in 0..=seq.q_max {
            let dim = seq.infinity_dim(p, q);
            if dim > 0 {
                out.push(PosDimJson { p, q, dim });
            }
        }
    }
    out
}

/// Plain-text rendering of the page dimension grids.
pub fn render_page_grids<F: Field>(seq: &SpectralSequence<F>) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for r in 0..seq.page_dims.len() {
        writeln!(out, "page E^{r}:").unwrap();
        for q in (0..=seq.q_max).rev() {
            write!(out, "  q={q} |").unwrap();
            for p in 0..=seq.p_max {
                write!(out, " {:>6}", seq.dim(r, p, q)).unwrap();
            }
            writeln!(out).unwrap();
        }
        write!(out, "        ").unwrap();
        for p in 0..=seq.p_max {
            write!(out, " {:>6}", format!("p={p}")).unwrap();
        }
        writeln!(out).unwrap();
    }
    out
}

#[derive(Serialize)]
pub struct ScalingSizeJson {
    pub n: u64,
    pub betti: usize,
    pub toroidal_candidates: usize,
}

#[derive(Serialize)]
pub struct ScalingJson {
    pub degree: usize,
    pub field: String,
    pub per_size: Vec<ScalingSizeJson>,
    pub betti_exponent: f64,
    pub candidate_exponent: f64,
    pub betti_exponent_bound: f64,
    pub candidate_exponent_bound: f64,
    pub betti_bound_ok: bool,
    pub candidate_bound_ok: bool,
    pub warnings: Vec<String>,
}

/// Tolerance on fitted growth exponents; the asymptotic statements hold up
/// to lower-order terms, which this margin absorbs on small windows.
pub const EXPONENT_TOLERANCE: f64 = 0.15;

pub fn scaling<F: Field>(
    template: &PeriodicTemplate,
    sizes: &[u64],
    k: usize,
) -> Result<ScalingJson, MvssError> {
    let fit = mvss::scaling_fit::<F>(template, sizes, k)?;
    let d = template.d as f64;
    let betti_bound = d + EXPONENT_TOLERANCE;
    let candidate_bound = d - 1.0 + EXPONENT_TOLERANCE;
    let mut warnings = Vec::new();
    if !fit.below_regularity_bound.is_empty() {
        warnings.push(format!(
            "sizes {:?} are not above 4M = {} where regular scaling is expected",
            fit.below_regularity_bound,
            4 * template.offset_bound()
        ));
    }
    Ok(ScalingJson {
        degree: k,
        field: field_name::<F>(),
        per_size: fit
            .sizes
            .iter()
            .zip(&fit.betti)
            .zip(&fit.toroidal_candidates)
            .map(|((&n, &b), &t)| ScalingSizeJson { n, betti: b, toroidal_candidates: t })
            .collect(),
        betti_exponent: fit.betti_exponent,
        candidate_exponent: fit.candidate_exponent,
        betti_exponent_bound: betti_bound,
        candidate_exponent_bound: candidate_bound,
        betti_bound_ok: fit.betti_exponent <= betti_bound,
        candidate_bound_ok: fit.candidate_exponent <= candidate_bound,
        warnings,
    })
}

/// Certifies level-0 homology classes and lists candidates; used by tests
/// through the library as well as the CLI.
pub fn filtration_levels_of_generators<F: Field>(
    recon: &mvss::Reconstruction<F>,
    window: &WindowComplex<F>,
    h: &HomologyResult<F>,
    k: usize,
) -> Result<Vec<usize>, MvssError> {
    h.generators[k]
        .iter()
        .map(|z| filtration_level(recon, window, k, z))
        .collect()
}
