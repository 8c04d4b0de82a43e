use std::sync::OnceLock;

use approx::assert_relative_eq;
use hyperbergman::bounds::{bx_closed_form, theorem21_at};
use hyperbergman::fuchsian::{bolza, count_profile, enumerate_ball, gamma0, systole, BallOptions, SurfaceGeometry};
use hyperbergman::hplane::{HPoint, MobiusTransform};
use hyperbergman::ingest::{fetch_level, FetchOptions};
use hyperbergman::modforms::{
    bergman_kernel, canonical_density_ratio, evaluate_direct, evaluate_form, CuspFormBasis,
    FundamentalCellDecomposition, QuadratureOptions,
};
use hyperbergman::product::{
    canonical_volume_ratio_det, canonical_volume_ratio_perm, kernel_matrix, product_bergman, sample_points,
    ProductPoint,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    basis: CuspFormBasis,
    geom: SurfaceGeometry,
    cells: FundamentalCellDecomposition,
}

fn level29() -> &'static Setup {
    static CELL: OnceLock<Setup> = OnceLock::new();
    CELL.get_or_init(|| {
        let opts = QuadratureOptions::default();
        let recs = fetch_level(29, &FetchOptions { cache_dir: None, ..FetchOptions::default() }).unwrap();
        Setup {
            basis: CuspFormBasis::from_records(&recs, &opts).unwrap(),
            geom: systole(&gamma0(29).unwrap(), 8.0).unwrap(),
            cells: FundamentalCellDecomposition::new(29, &opts).unwrap(),
        }
    })
}

#[test]
fn basis_survives_json() {
    let s = level29();
    let back = CuspFormBasis::from_json(&s.basis.to_json()).unwrap();
    let z = HPoint::new(0.13, 0.21).unwrap();
    assert_eq!(bergman_kernel(&back, z).unwrap(), bergman_kernel(&s.basis, z).unwrap());
    assert!(s.basis.min_eigenvalue > 1e-10);
}

#[test]
fn kernel_is_unchanged_by_unitary_mixing() {
    let s = level29();
    let (c, sn) = (0.6f64, 0.8f64);
    let phase = Complex64::from_polar(1.0, 0.7);
    let u = vec![
        vec![Complex64::new(c, 0.0), Complex64::new(-sn, 0.0) * phase],
        vec![Complex64::new(sn, 0.0) * phase.conj(), Complex64::new(c, 0.0)],
    ];
    let rotated = s.basis.rotated(&u);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let z = s.cells.sample_point(&mut rng).unwrap();
        assert_relative_eq!(
            bergman_kernel(&rotated, z).unwrap(),
            bergman_kernel(&s.basis, z).unwrap(),
            max_relative = 1e-9
        );
    }
}

#[test]
fn reduction_agrees_with_direct_summation_high_up() {
    let s = level29();
    for f in &s.basis.forms {
        for (x, y) in [(0.1, 0.35), (-0.4, 0.6), (0.45, 1.2)] {
            let z = HPoint::new(x, y).unwrap();
            let a = evaluate_form(f, z).unwrap();
            let b = evaluate_direct(f, z, 1e-13).unwrap();
            assert!((a.value - b.value).norm() <= 1e-10 * b.value.norm().max(1e-3));
        }
    }
}

#[test]
fn one_point_ratio_is_the_canonical_density() {
    let s = level29();
    let z = HPoint::new(-0.2, 0.05).unwrap();
    let p = ProductPoint::new(vec![z], None).unwrap();
    let want = canonical_density_ratio(&s.basis, &s.geom, z).unwrap();
    assert_relative_eq!(canonical_volume_ratio_det(&s.basis, &s.geom, &p).unwrap(), want, max_relative = 1e-12);
    assert_relative_eq!(canonical_volume_ratio_perm(&s.basis, &s.geom, &p).unwrap(), want, max_relative = 1e-12);
    let k = kernel_matrix(&s.basis, &p).unwrap();
    assert_relative_eq!(k.entries[0][0].re, bergman_kernel(&s.basis, z).unwrap(), max_relative = 1e-14);
}

#[test]
fn kernel_matrix_structure() {
    let s = level29();
    let bound = bx_closed_form(s.geom.injectivity_radius).unwrap();
    for p in sample_points(&s.cells, 3, 30, 12).unwrap() {
        let k = kernel_matrix(&s.basis, &p).unwrap();
        for a in 0..3 {
            assert_relative_eq!(k.entries[a][a].re, bergman_kernel(&s.basis, p.points[a]).unwrap(), max_relative = 1e-14);
            for b in 0..3 {
                assert_eq!(k.entries[a][b], k.entries[b][a].conj());
            }
        }
        let scale = k.entries.iter().map(|r| r.iter().map(|v| v.norm()).fold(0.0, f64::max)).fold(0.0, f64::max);
        assert!(k.eigenvalues().iter().all(|&e| e >= -1e-10 * scale.max(1.0)));
        let prod = product_bergman(&s.basis, &p).unwrap();
        assert!(prod <= bound.powi(3));
        assert_relative_eq!(prod, product_bergman(&s.basis, &p.permuted(&[2, 0, 1])).unwrap(), max_relative = 1e-14);
    }
    let z = HPoint::new(0.3, 0.4).unwrap();
    let dup = ProductPoint::new(vec![z, z], None).unwrap();
    let det = kernel_matrix(&s.basis, &dup).unwrap().determinant();
    assert!(det.abs() < 1e-14, "{det}");
}

#[test]
fn counts_are_invariant_under_simultaneous_action() {
    let g = gamma0(23).unwrap();
    let z1 = HPoint::new(0.1, 0.8).unwrap();
    let z2 = HPoint::new(-0.3, 0.5).unwrap();
    let h = MobiusTransform::from_integers(2, 1, 23, 12).unwrap();
    let thresholds = [1.0, 2.0, 3.0, 4.0];
    let a = count_profile(&enumerate_ball(&g, z1, z2, 4.0, BallOptions::default()).unwrap(), &thresholds).unwrap();
    let (w1, w2) = (h.apply(z1).unwrap(), h.apply(z2).unwrap());
    let b = count_profile(&enumerate_ball(&g, w1, w2, 4.0, BallOptions::default()).unwrap(), &thresholds).unwrap();
    assert_eq!(a.counts, b.counts);

    // word enumeration agrees with the integer search; Schreier generators
    // move the base point far, so the default slack would be wasteful
    let words = enumerate_ball(&g, z1, z1, 1.5, BallOptions { arithmetic: false, prune_slack: Some(5.0), ..BallOptions::default() }).unwrap();
    let ints = enumerate_ball(&g, z1, z1, 1.5, BallOptions::default()).unwrap();
    assert!(words.complete);
    assert_eq!(words.len(), ints.len(), "{:?} vs {:?}", words.rhos().collect::<Vec<_>>(), ints.rhos().collect::<Vec<_>>());
}

#[test]
fn bolza_chain_off_centre() {
    let g = bolza();
    let geom = systole(&g, 8.0).unwrap().require_certified().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let z = HPoint::new(rng.random_range(-0.8..0.8), rng.random_range(0.4..2.0)).unwrap();
        let rep = theorem21_at(&g, &geom, z).unwrap();
        assert!(rep.chain_holds);
        assert!(rep.near_count == Some(1));
    }
}
