//! C*-envelopes of unital operator spaces in `M_n`.
//!
//! Generate `A = C*(X) ≅ ⊕_j M_{n_j}`, then discard central summands whose
//! removal leaves `x ↦ p x p` completely isometric on `X`. Block `k` may be
//! dropped from the kept set `K` exactly when the unital map
//!
//! ```text
//!     (ρ_j(x))_{j ∈ K∖k}  ↦  ρ_k(x)
//! ```
//!
//! is completely contractive, which for unital maps is complete positivity
//! of its self-adjoint extension. Blocks dropped earlier stay dominated by
//! transitivity. What remains is the envelope.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, C64};
use crate::opspace::{
    cp::DEFAULT_MAX_ITERS, cp_extension_feasible, is_complete_isometry, paulsen_system,
    IsometryCertificate, OperatorSpace, SpaceMap, MEMBERSHIP_TOL,
};
use crate::random::{Rng, DEFAULT_SEED};
use crate::staralg::{generate_star_algebra_seeded, StarAlgebra};

const SCREEN_SAMPLES: usize = 16;
const SCREEN_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct EnvelopeResult {
    pub generated: StarAlgebra,
    pub kept_blocks: Vec<usize>,
    /// `p₀ = Σ_{k kept} p_k`.
    pub co_support: CMatrix,
    pub envelope_profile: Vec<(usize, usize)>,
    /// `x ↦ p₀ x p₀` on `X`.
    pub embedding: SpaceMap,
}

impl EnvelopeResult {
    pub fn generated_profile(&self) -> Vec<(usize, usize)> {
        self.generated.profile()
    }

    /// `Σ n_k²` over kept blocks.
    pub fn envelope_dim(&self) -> usize {
        self.envelope_profile.iter().map(|(n, _)| n * n).sum()
    }

    pub fn verify_embedding(&self, tol: f64) -> Result<IsometryCertificate> {
        is_complete_isometry(&self.embedding, tol)
    }
}

#[derive(Serialize)]
struct EnvelopeJson<'a> {
    generated_profile: Vec<(usize, usize)>,
    envelope_profile: &'a [(usize, usize)],
    kept_blocks: &'a [usize],
    co_support: &'a CMatrix,
}

impl Serialize for EnvelopeResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnvelopeJson {
            generated_profile: self.generated_profile(),
            envelope_profile: &self.envelope_profile,
            kept_blocks: &self.kept_blocks,
            co_support: &self.co_support,
        }
        .serialize(s)
    }
}

fn check_inputs(x: &OperatorSpace, a: &StarAlgebra) -> Result<()> {
    if !x.is_unital() {
        return Err(Error::Contract(
            "the envelope procedure needs a unital space".into(),
        ));
    }
    if x.ambient_dim() != a.ambient_dim() {
        return Err(Error::Dimension(
            "space and algebra live in different matrix sizes".into(),
        ));
    }
    for b in x.basis() {
        if !a.contains(b, MEMBERSHIP_TOL) {
            return Err(Error::Contract(
                "the space is not contained in the algebra".into(),
            ));
        }
    }
    Ok(())
}

fn stacked(a: &StarAlgebra, blocks: &[usize], x: &CMatrix) -> CMatrix {
    let parts: Vec<CMatrix> = blocks.iter().map(|&j| a.represent(j, x)).collect();
    CMatrix::direct_sum(&parts.iter().collect::<Vec<_>>())
}

// A sampled element normed more by block k than by the rest settles the
// question without solving a feasibility problem.
fn screened_out(x: &OperatorSpace, a: &StarAlgebra, k: usize, rest: &[usize]) -> Result<bool> {
    let mut rng = Rng::seeded(DEFAULT_SEED ^ k as u64);
    let mut samples: Vec<CMatrix> = x.basis().to_vec();
    for _ in 0..SCREEN_SAMPLES {
        let coords: Vec<C64> = (0..x.dim()).map(|_| rng.complex_normal()).collect();
        samples.push(x.element(&coords));
    }
    for s in &samples {
        let dropped = a.represent(k, s).opnorm()?;
        let remaining = stacked(a, rest, s).opnorm()?;
        if dropped > remaining * (1.0 + SCREEN_MARGIN) + SCREEN_MARGIN * s.frobenius_norm() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether compressing `X` to the blocks `current_kept ∖ {k}` stays
/// completely isometric. Indeterminate numerics count as "not redundant".
pub fn is_block_redundant(
    x: &OperatorSpace,
    a: &StarAlgebra,
    k: usize,
    current_kept: &BTreeSet<usize>,
    tol: f64,
) -> Result<bool> {
    check_inputs(x, a)?;
    if !current_kept.contains(&k) || current_kept.iter().any(|&j| j >= a.blocks().len()) {
        return Err(Error::Contract(format!(
            "block {k} is not among the kept blocks"
        )));
    }
    let rest: Vec<usize> = current_kept.iter().copied().filter(|&j| j != k).collect();
    if rest.is_empty() || screened_out(x, a, k, &rest)? {
        return Ok(false);
    }
    let mut gens = Vec::with_capacity(2 * x.dim());
    let mut images = Vec::with_capacity(2 * x.dim());
    for b in x.basis() {
        let y = stacked(a, &rest, b);
        let z = a.represent(k, b);
        gens.push(y.adjoint());
        images.push(z.adjoint());
        gens.push(y);
        images.push(z);
    }
    let psi = match SpaceMap::from_generators(&gens, &images, true) {
        Ok(psi) => psi,
        // Not even a well-defined self-adjoint map.
        Err(Error::Contract(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(cp_extension_feasible(&psi, tol, DEFAULT_MAX_ITERS)?.feasible())
}

pub fn c_star_envelope(x: &OperatorSpace, tol: f64) -> Result<EnvelopeResult> {
    c_star_envelope_with(x, tol, DEFAULT_SEED, None)
}

/// Like [`c_star_envelope`] with an explicit decomposition seed and,
/// optionally, an elimination order (a permutation of the block indices).
pub fn c_star_envelope_with(
    x: &OperatorSpace,
    tol: f64,
    seed: u64,
    order: Option<&[usize]>,
) -> Result<EnvelopeResult> {
    let generated = generate_star_algebra_seeded(x.basis(), true, seed)?;
    envelope_in(x, generated, tol, order)
}

/// Eliminates redundant blocks of a given decomposition of `C*(X)`.
pub fn envelope_in(
    x: &OperatorSpace,
    generated: StarAlgebra,
    tol: f64,
    order: Option<&[usize]>,
) -> Result<EnvelopeResult> {
    check_inputs(x, &generated)?;
    let count = generated.blocks().len();
    let order: Vec<usize> = match order {
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != (0..count).collect::<Vec<_>>() {
                return Err(Error::Contract(
                    "elimination order must be a permutation of the blocks".into(),
                ));
            }
            o.to_vec()
        }
        None => (0..count).collect(),
    };

    let mut kept: BTreeSet<usize> = (0..count).collect();
    // The final pass removes nothing, so it re-verifies every kept block.
    loop {
        let mut changed = false;
        for &k in &order {
            if kept.contains(&k) && is_block_redundant(x, &generated, k, &kept, tol)? {
                kept.remove(&k);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let n = x.ambient_dim();
    let mut co_support = CMatrix::zeros(n, n);
    for &k in &kept {
        co_support += &generated.blocks()[k].projection;
    }
    let embedding = SpaceMap::from_fn(x.clone(), n, |b| &(&co_support * b) * &co_support)?;
    let kept_blocks: Vec<usize> = kept.into_iter().collect();
    let envelope_profile = kept_blocks
        .iter()
        .map(|&k| generated.profile()[k])
        .collect();
    Ok(EnvelopeResult {
        generated,
        kept_blocks,
        co_support,
        envelope_profile,
        embedding,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PaulsenEnvelope {
    pub envelope: EnvelopeResult,
    pub base: EnvelopeResult,
    /// Whether the envelope of `S(X)` has four times the dimension of the
    /// envelope of `X`, as `M_2` of it should.
    pub consistent: bool,
}

pub fn envelope_of_paulsen(x: &OperatorSpace, tol: f64) -> Result<PaulsenEnvelope> {
    let base = c_star_envelope(x, tol)?;
    let envelope = c_star_envelope(&paulsen_system(x), tol)?;
    let consistent = envelope.envelope_dim() == 4 * base.envelope_dim();
    Ok(PaulsenEnvelope {
        envelope,
        base,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upper_triangular(n: usize) -> OperatorSpace {
        let mut gens = Vec::new();
        for i in 0..n {
            for j in i..n {
                gens.push(CMatrix::unit(n, i, j));
            }
        }
        OperatorSpace::new(&gens, true).unwrap()
    }

    // span{I, [[0,1,0],[0,0,0],[0,0,0]], E₁₁ + E₃₃/2 ...}: the 3-3 entry averages the diagonal.
    fn averaged_entry_space() -> OperatorSpace {
        let a = CMatrix::diag_real(&[1.0, 0.0, 0.5]);
        OperatorSpace::new(&[CMatrix::identity(3), a, CMatrix::unit(3, 0, 1)], true).unwrap()
    }

    #[test]
    fn upper_triangular_envelope_is_full() {
        let e = c_star_envelope(&upper_triangular(2), 1e-8).unwrap();
        assert_eq!(e.envelope_profile, vec![(2, 1)]);
    }

    #[test]
    fn averaged_entry_is_dropped() {
        let x = averaged_entry_space();
        let e = c_star_envelope(&x, 1e-8).unwrap();
        assert_eq!(e.generated_profile(), vec![(2, 1), (1, 1)]);
        assert_eq!(e.envelope_profile, vec![(2, 1)]);
        assert!(e.co_support.dist(&CMatrix::diag_real(&[1.0, 1.0, 0.0])) < 1e-8);
        assert!(e.verify_embedding(1e-8).unwrap().is_complete_isometry);
    }

    #[test]
    fn redundancy_examples() {
        let x = averaged_entry_space();
        let a = generate_star_algebra_seeded(x.basis(), true, DEFAULT_SEED).unwrap();
        let all: BTreeSet<usize> = [0, 1].into();
        assert!(is_block_redundant(&x, &a, 1, &all, 1e-8).unwrap());
        assert!(!is_block_redundant(&x, &a, 0, &all, 1e-8).unwrap());

        let t2 = upper_triangular(2);
        let a = generate_star_algebra_seeded(t2.basis(), true, DEFAULT_SEED).unwrap();
        assert!(!is_block_redundant(&t2, &a, 0, &[0].into(), 1e-8).unwrap());

        let full = OperatorSpace::new(
            &[
                CMatrix::identity(3),
                CMatrix::unit(3, 0, 1),
                CMatrix::unit(3, 1, 0),
                CMatrix::unit(3, 0, 0),
                CMatrix::unit(3, 2, 2),
            ],
            true,
        )
        .unwrap();
        let a = generate_star_algebra_seeded(full.basis(), true, DEFAULT_SEED).unwrap();
        for k in 0..2 {
            assert!(!is_block_redundant(&full, &a, k, &[0, 1].into(), 1e-8).unwrap());
        }
    }

    #[test]
    fn non_unital_rejected() {
        let x = OperatorSpace::new(&[CMatrix::unit(2, 0, 1)], false).unwrap();
        let a = generate_star_algebra_seeded(x.basis(), true, DEFAULT_SEED).unwrap();
        assert!(matches!(
            is_block_redundant(&x, &a, 0, &[0].into(), 1e-8),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn paulsen_envelopes() {
        let c = OperatorSpace::new(&[CMatrix::identity(1)], true).unwrap();
        let p = envelope_of_paulsen(&c, 1e-8).unwrap();
        assert_eq!(p.envelope.envelope_profile, vec![(2, 1)]);
        assert!(p.consistent);

        let p = envelope_of_paulsen(&upper_triangular(2), 1e-8).unwrap();
        assert_eq!(p.envelope.envelope_profile, vec![(4, 1)]);
        assert!(p.consistent);
    }

    #[test]
    fn json_shape() {
        let e = c_star_envelope(&upper_triangular(2), 1e-8).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["envelope_profile"], serde_json::json!([[2, 1]]));
        assert_eq!(v["kept_blocks"], serde_json::json!([0]));
        assert!(v.get("co_support").is_some());
    }
}
