mod common;

use common::*;
use nc_shilov::opspace::cp::{choi_cp_test, cp_extension_feasible, DEFAULT_MAX_ITERS};
use nc_shilov::opspace::{
    is_complete_isometry, is_completely_contractive_seeded, level_bounds, paulsen_map, CbVerdict,
    OperatorSpace, SpaceMap,
};
use nc_shilov::random::{random_matrix, Rng};
use nc_shilov::{CMatrix, C64};
use proptest::prelude::*;

fn units(p: usize) -> Vec<CMatrix> {
    (0..p * p).map(|k| CMatrix::unit(p, k / p, k % p)).collect()
}

proptest! {
    #![proptest_config(proptest_config(32))]

    #[test]
    fn amplification_norms_are_nondecreasing(seed in any::<u64>(), n in 1usize..=3, dim in 1usize..=3, m in 1usize..=3) {
        let mut rng = Rng::seeded(seed);
        let t = random_map(&mut rng, n, dim, m);
        let bounds = level_bounds(&t, 3, 2, seed);
        for w in bounds.windows(2) {
            prop_assert!(w[0].bound <= w[1].bound + 1e-9);
        }
    }

    #[test]
    fn diagonal_maps_are_cc_iff_contractive(seed in any::<u64>(), p in 2usize..=4, q in 1usize..=3, over in any::<bool>()) {
        let mut rng = Rng::seeded(seed);
        let coeffs: Vec<Vec<C64>> = (0..q).map(|_| (0..p).map(|_| rng.complex_normal()).collect()).collect();
        let norm = coeffs.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        let target = if over { rng.uniform(1.03, 1.5) } else { rng.uniform(0.5, 0.97) };
        let s = target / norm;
        let t = SpaceMap::from_fn(diagonal(p), q, |a| {
            CMatrix::diag(&coeffs.iter().map(|r| r.iter().enumerate().map(|(j, c)| c * s * a.get(j, j)).sum()).collect::<Vec<_>>())
        })
        .unwrap();
        let cert = is_completely_contractive_seeded(&t, TOL, seed).unwrap();
        prop_assert_eq!(cert.is_completely_contractive(), !over);
    }

    #[test]
    fn choi_positive_maps_have_feasible_extensions(seed in any::<u64>(), p in 1usize..=3, q in 1usize..=3, kraus in 1usize..=3) {
        let mut rng = Rng::seeded(seed);
        let ks: Vec<CMatrix> = (0..kraus).map(|_| random_matrix(&mut rng, q, p)).collect();
        let phi = |x: &CMatrix| {
            let mut out = CMatrix::zeros(q, q);
            for k in &ks {
                out += &(&(k * x) * &k.adjoint());
            }
            out
        };
        let images: Vec<CMatrix> = units(p).iter().map(phi).collect();
        prop_assert!(choi_cp_test(p, &images).unwrap().is_cp);
        let map = SpaceMap::from_fn(OperatorSpace::full(p), q, phi).unwrap();
        prop_assert!(cp_extension_feasible(&map, TOL, DEFAULT_MAX_ITERS).unwrap().feasible());
    }
}

proptest! {
    #![proptest_config(proptest_config(16))]

    #[test]
    fn paulsen_map_preserves_complete_isometries(seed in any::<u64>(), i in 0usize..4) {
        let mut rng = Rng::seeded(seed);
        let t = small_isometry(&mut rng, i);
        prop_assert!(is_complete_isometry(&t, TOL).unwrap().is_complete_isometry);
        prop_assert!(is_complete_isometry(&paulsen_map(&t), TOL).unwrap().is_complete_isometry);
    }
}

proptest! {
    #![proptest_config(proptest_config(100))]

    #[test]
    fn feasibility_never_contradicts_a_witness(seed in any::<u64>(), n in 1usize..=3, dim in 1usize..=3, m in 1usize..=3, scale in 0.3f64..2.0) {
        let mut rng = Rng::seeded(seed);
        let t = random_map(&mut rng, n, dim, m).scaled(C64::new(scale, 0.0));
        let cert = is_completely_contractive_seeded(&t, TOL, seed).unwrap();
        let k = n.min(m);
        let best = level_bounds(&t, k, 4, seed ^ 1).into_iter().map(|b| b.bound).fold(0.0, f64::max);
        prop_assert!(!(cert.verdict == CbVerdict::CompletelyContractive && best > 1.0 + TOL), "ascent {best} against a CC verdict");
        if let Some(w) = &cert.witness {
            prop_assert!(w.ratio > 1.0 + TOL);
            prop_assert!((w.matrix.opnorm().unwrap() - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn transpose_is_not_completely_positive() {
    let images: Vec<CMatrix> = units(2).iter().map(CMatrix::transpose).collect();
    assert!(!choi_cp_test(2, &images).unwrap().is_cp);
    let map = SpaceMap::from_fn(OperatorSpace::full(2), 2, CMatrix::transpose).unwrap();
    assert!(!cp_extension_feasible(&map, TOL, DEFAULT_MAX_ITERS)
        .unwrap()
        .feasible());
}
