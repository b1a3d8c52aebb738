//! Quick timing probe for the intersecting-planes page computation.
use periodic_homology::field::Rational;
use periodic_homology::mvss::{compute_pages, nerve, BlowupComplex, Cover, PageOptions};
use periodic_homology::periodic::{BoundaryEntry, PeriodicTemplate, TemplateCell, WindowComplex, WindowFlavor};

fn main() {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    match std::env::args().nth(2).as_deref() {
        Some("fp") => run::<periodic_homology::F46337>(n),
        _ => run::<Rational>(n),
    }
}

fn planes_template() -> PeriodicTemplate {
    let e = |i: usize| TemplateCell {
        id: format!("e{}", i),
        dim: 1,
        boundary: vec![
            BoundaryEntry { face: 0, coeff: 1, shift: (0..3).map(|k| if k + 1 == i { 1 } else { 0 }).collect() },
            BoundaryEntry { face: 0, coeff: -1, shift: vec![0, 0, 0] },
        ],
    };
    PeriodicTemplate::new(3, vec![
        TemplateCell { id: "v".into(), dim: 0, boundary: vec![] },
        e(1), e(2), e(3),
        TemplateCell { id: "syz".into(), dim: 2, boundary: vec![
            BoundaryEntry { face: 2, coeff: 1, shift: vec![0, 0, 0] },
            BoundaryEntry { face: 3, coeff: 1, shift: vec![0, 1, 0] },
            BoundaryEntry { face: 2, coeff: -1, shift: vec![0, 0, 1] },
            BoundaryEntry { face: 3, coeff: -1, shift: vec![0, 0, 0] },
        ]},
        TemplateCell { id: "sxz".into(), dim: 2, boundary: vec![
            BoundaryEntry { face: 1, coeff: 1, shift: vec![0, 0, 0] },
            BoundaryEntry { face: 3, coeff: 1, shift: vec![1, 0, 0] },
            BoundaryEntry { face: 1, coeff: -1, shift: vec![0, 0, 1] },
            BoundaryEntry { face: 3, coeff: -1, shift: vec![0, 0, 0] },
        ]},
    ]).unwrap()
}

fn run<F: periodic_homology::Field>(n: u64) {
    let t0 = std::time::Instant::now();
    let t = planes_template();
    let w: WindowComplex<F> = t.build_window(&[n, n, n], WindowFlavor::Periodic);
    let cover = Cover::from_translates(&t, &w).unwrap();
    let nv = nerve(&cover, &w, 32).unwrap();
    let b = BlowupComplex::new(&w, nv).unwrap();
    println!("blowup built in {:?}", t0.elapsed());
    let t1 = std::time::Instant::now();
    let seq = compute_pages(&b, &PageOptions::default()).unwrap();
    println!("pages in {:?}", t1.elapsed());
    for r in 0..seq.page_dims.len() {
        print!("page {r}:");
        for q in (0..=seq.q_max).rev() {
            print!("  q={q}: ");
            for p in 0..=seq.p_max {
                print!("{} ", seq.page_dims[r][p][q]);
            }
        }
        println!();
    }
    let h = w.complex.homology();
    for k in 0..=2 {
        println!("k={k}: diagonal {} vs beta {}", seq.diagonal_sum(k), h.betti[k]);
    }
    let t2 = std::time::Instant::now();
    let total = b.total_complex_betti();
    println!("total complex in {:?}: {:?}", t2.elapsed(), total);
}
