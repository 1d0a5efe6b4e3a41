//! The Paulsen operator system
//!
//! ```text
//!   S(X) = { [ λ·1   x  ]          Φ_T [ λ·1   x  ] = [ λ·1    T(x)  ]
//!            [ y*   μ·1 ] }  ⊆ M_2n     [ y*   μ·1 ]   [ T(y)*  μ·1   ]
//! ```
//!
//! `Φ_T` is unital and completely positive exactly when `T` is completely
//! contractive.

use super::map::SpaceMap;
use super::space::{diagonal_unit, lower_corner, upper_corner, OperatorSpace};
use crate::matcore::CMatrix;

/// `S(X) ⊆ M_{2n}`; always unital.
pub fn paulsen_system(x: &OperatorSpace) -> OperatorSpace {
    let n = x.ambient_dim();
    let mut gens = vec![diagonal_unit(n, true), diagonal_unit(n, false)];
    gens.extend(x.basis().iter().map(upper_corner));
    gens.extend(x.basis().iter().map(|b| lower_corner(&b.adjoint())));
    OperatorSpace::new(&gens, true).expect("the diagonal units sum to the identity")
}

/// `Φ_T : S(X) → M_{2m}`.
pub fn paulsen_map(t: &SpaceMap) -> SpaceMap {
    let x = t.domain();
    let n = x.ambient_dim();
    let m = t.codomain_dim();
    let system = paulsen_system(x);
    let nf = n as f64;
    SpaceMap::from_fn(system, 2 * m, |s| {
        let lambda = s.submatrix(0, 0, n, n).trace() / nf;
        let mu = s.submatrix(n, n, n, n).trace() / nf;
        let upper = t.apply(&s.submatrix(0, n, n, n));
        let lower = t.apply(&s.submatrix(n, 0, n, n).adjoint()).adjoint();
        let mut out = CMatrix::zeros(2 * m, 2 * m);
        out.set_block(0, 0, &CMatrix::identity(m).scale(lambda));
        out.set_block(m, m, &CMatrix::identity(m).scale(mu));
        out.set_block(0, m, &upper);
        out.set_block(m, 0, &lower);
        out
    })
    .expect("Paulsen images are 2m x 2m")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::C64;

    #[test]
    fn scalars_give_all_of_m2() {
        let c = OperatorSpace::new(&[CMatrix::identity(1)], true).unwrap();
        let s = paulsen_system(&c);
        assert_eq!(s.ambient_dim(), 2);
        assert_eq!(s.dim(), 4);
        assert!(s.is_unital());
    }

    #[test]
    fn full_m2_gives_ten_dimensions() {
        let s = paulsen_system(&OperatorSpace::full(2));
        assert_eq!(s.dim(), 10);
        assert_eq!(s.unit_index(), Some(0));
    }

    #[test]
    fn identity_map_lifts_to_identity() {
        let x = OperatorSpace::full(2);
        let phi = paulsen_map(&SpaceMap::identity(x));
        for (b, img) in phi.domain().basis().iter().zip(phi.images()) {
            assert!(b.dist(img) < 1e-12);
        }
    }

    #[test]
    fn lambda_x_corner_images() {
        let c = OperatorSpace::new(&[CMatrix::identity(1)], true).unwrap();
        let x = CMatrix::diag_real(&[1.0, 0.5]);
        let t = SpaceMap::from_fn(c, 2, |a| x.scale(a.get(0, 0))).unwrap();
        let phi = paulsen_map(&t);
        let corner = CMatrix::unit(2, 0, 1);
        let image = phi.apply(&corner);
        let mut expected = CMatrix::zeros(4, 4);
        expected.set_block(0, 2, &x);
        assert!(image.dist(&expected) < 1e-12);
        let lower = phi.apply(&CMatrix::unit(2, 1, 0).scale(C64::new(0.0, 1.0)));
        let mut expected = CMatrix::zeros(4, 4);
        expected.set_block(2, 0, &x.scale(C64::new(0.0, 1.0)));
        assert!(lower.dist(&expected) < 1e-12);
    }

    #[test]
    fn unital() {
        let t2 = OperatorSpace::new(&[CMatrix::identity(2), CMatrix::unit(2, 0, 1)], true).unwrap();
        let t = SpaceMap::from_fn(t2, 3, |a| {
            let mut out = CMatrix::zeros(3, 3);
            out.set_block(0, 0, &a.transpose());
            out
        })
        .unwrap();
        let phi = paulsen_map(&t);
        assert!(phi.apply(&CMatrix::identity(4)).dist(&CMatrix::identity(6)) < 1e-12);
    }
}
