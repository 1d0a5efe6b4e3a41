mod common;

use common::*;
use nc_shilov::envelope::{c_star_envelope, c_star_envelope_with, envelope_in};
use nc_shilov::opspace::OperatorSpace;
use nc_shilov::random::Rng;
use nc_shilov::{CMatrix, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(proptest_config(32))]

    #[test]
    fn kept_blocks_do_not_depend_on_order(seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let x = envelope_corpus_space(&mut rng);
        let base = c_star_envelope_with(&x, TOL, seed, None).unwrap();
        let mut order: Vec<usize> = (0..base.generated.blocks().len()).collect();
        order.reverse();
        let reversed = envelope_in(&x, base.generated.clone(), TOL, Some(&order)).unwrap();
        prop_assert_eq!(&reversed.kept_blocks, &base.kept_blocks);
        rng.shuffle(&mut order);
        let shuffled = envelope_in(&x, base.generated.clone(), TOL, Some(&order)).unwrap();
        prop_assert_eq!(&shuffled.kept_blocks, &base.kept_blocks);
    }

    #[test]
    fn envelope_is_idempotent(seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let x = envelope_corpus_space(&mut rng);
        let env = c_star_envelope(&x, TOL).unwrap();
        let frame = env.co_support.herm_eig().unwrap().frame(|l| l > 0.5);
        let compressed: Vec<CMatrix> = x.basis().iter().map(|b| &(&frame.adjoint() * b) * &frame).collect();
        let x2 = OperatorSpace::new(&compressed, true).unwrap();
        let again = c_star_envelope(&x2, TOL).unwrap();
        prop_assert_eq!(again.kept_blocks.len(), again.generated.blocks().len());
        prop_assert_eq!(again.envelope_profile, env.envelope_profile);
    }

    #[test]
    fn unital_algebras_are_their_own_envelope(seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let profile = random_profile(&mut rng, 8);
        let gens = profile_generators(&mut rng, &profile);
        let a = nc_shilov::staralg::generate_star_algebra(&gens, true).unwrap();
        let x = OperatorSpace::new(a.basis(), true).unwrap();
        let env = c_star_envelope(&x, TOL).unwrap();
        prop_assert_eq!(env.envelope_profile, profile);
    }

    #[test]
    fn diagonal_envelope_is_the_shilov_boundary(seed in any::<u64>(), p in 2usize..=6, extra in 1usize..=2) {
        let mut rng = Rng::seeded(seed);
        let mut gens = vec![CMatrix::identity(p)];
        for _ in 0..extra {
            gens.push(CMatrix::diag(&(0..p).map(|_| rng.complex_normal()).collect::<Vec<_>>()));
        }
        let x = OperatorSpace::new(&gens, true).unwrap();
        let env = c_star_envelope(&x, TOL).unwrap();
        let boundary: Vec<usize> = (0..p).filter(|&i| env.co_support.get(i, i).re > 0.5).collect();
        prop_assert!(!boundary.is_empty());
        for _ in 0..32 {
            let coords: Vec<C64> = (0..x.dim()).map(|_| rng.complex_normal()).collect();
            let v = x.element(&coords);
            let full = (0..p).map(|i| v.get(i, i).norm()).fold(0.0, f64::max);
            let on_boundary = boundary.iter().map(|&i| v.get(i, i).norm()).fold(0.0, f64::max);
            prop_assert!(full - on_boundary <= 1e-9 * full.max(1.0));
        }
    }
}
